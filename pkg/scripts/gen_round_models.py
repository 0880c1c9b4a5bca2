"""Regenerate the bit-vector DCP and grades model files.

Both models share one round structure. The configuration is a list of
segments, one per bit position; each starts with a flag (``#`` still to be
tossed in this round, ``%`` tossed) and holds one cell per participant. A
round tosses one position of every segment; ``end`` reopens the segments;
announcements start once no untossed cell is left.

    python scripts/gen_round_models.py
"""

from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "src" / "regbisim" / "bundled"


class Cells:
    """Secret cells: symbol -> bit value, and the symbol a coin flip turns it into."""

    def __init__(self, value: dict, flip: dict):
        self.value, self.flip = value, flip


DCP = Cells({"u0": 0, "u1": 1}, {"u0": "u1", "u1": "u0"})
GRADES = Cells(
    {f"g{b}{c}": b ^ c for b in (0, 1) for c in (0, 1)},
    {f"g{b}{c}": f"g{b}{1 - c}" for b in (0, 1) for c in (0, 1)},
)


def generate(name: str, cells: Cells, reference: bool, header: list[str], skip: bool = False) -> str:
    P = (lambda s: s + "'") if reference else (lambda s: s)
    alt = lambda xs: "(" + "|".join(xs) + ")"  # noqa: E731
    pair = lambda a, b: f"<{P(a)},{P(b)}>"  # noqa: E731
    secret = sorted(cells.value)
    t = lambda v: f"t{v}"  # noqa: E731

    same = lambda syms: alt([pair(s, s) for s in syms])  # noqa: E731
    T2 = ["t0", "t1"]
    D2 = ["d0", "d1"]
    flip_t = alt([pair(t(v), t(1 - v)) for v in (0, 1)])
    flip_u = alt([pair(s, cells.flip[s]) for s in secret])
    # secret cell to tossed value, xor a coin bit
    mark = lambda f: alt([pair(s, t(cells.value[s] ^ f)) for s in secret])  # noqa: E731
    one = lambda syms: alt([P(s) for s in syms])  # noqa: E731
    U, T, D = one(secret), one(T2), one(D2)
    pos = one(secret + T2 + D2)
    keep = same(secret + T2 + D2)
    op, dn = P("#"), P("%")
    syms = secret + T2 + D2 + ["#", "%"]
    alphabet = ", ".join(syms + [s + "'" for s in syms] + ["0", "1"])
    before = f"(<{dn},{dn}>{keep}+)*<{op},{dn}>"
    after = f"((<{op},{op}>|<{dn},{dn}>){keep}+)*"
    seg = f"({T}*{U}+|{T}+)"
    L = list(header) + [
        f"model {name}{'_reference' if reference else ''} {{",
        f"  alphabet = [{alphabet}];",
        "  weight = 10;",
        "  bound = 2;",
        "  length_preserving = true;",
        f"  lang Tossing = regex ({dn}{seg})*({op}{seg})+ | ({dn}{seg})+;",
        f"  lang Announcing = regex ({op}{D}+)*({op}{D}*{T}+)?({op}{T}+)*;",
        f"  lang Segs = regex ({op}{pos}+)+;",
        *(
            [
                "  # segments never change length, so requiring three cells is inductive",
                f"  lang Wide = regex (({op}|{dn}){pos}{pos}{pos}+)+;",
                "  domain = (x in lang(Tossing) | x in lang(Announcing) & x in lang(Segs)) & x in lang(Wide);",
            ]
            if skip
            else ["  domain = x in lang(Tossing) | x in lang(Announcing) & x in lang(Segs);"]
        ),
        "  # one toss in the first pending segment; H/T at the observer's two coins",
        f"  rel H0(x, y) = regex {before}{mark(0)}{same(secret)}+{after};",
        f"  rel T0(x, y) = regex {before}{mark(1)}{flip_u}{same(secret)}*{after};",
        f"  rel HL(x, y) = regex {before}{same(T2)}+{mark(0)}{after};",
        f"  rel TL(x, y) = regex {before}{flip_t}{same(T2)}*{mark(1)}{after};",
    ]
    if not reference:
        L += [
            f"  rel M0(x, y) = regex {before}{same(T2)}+{mark(0)}{same(secret)}+{after};",
            f"  rel M1(x, y) = regex {before}{same(T2)}+{mark(1)}{flip_u}{same(secret)}*{after};",
        ]
    else:
        # the coin overwrites the cell; the next cell absorbs the difference
        m = lambda f: alt(  # noqa: E731
            [
                pair(s, t(f)) + (same(secret) if cells.value[s] == f else flip_u)
                for s in secret
            ]
        )
        L += [
            "  # the coin replaces the cell and the next cell keeps the segment's parity",
            f"  rel M0(x, y) = regex {before}{same(T2)}+{m(0)}{same(secret)}*{after};",
            f"  rel M1(x, y) = regex {before}{same(T2)}+{m(1)}{same(secret)}*{after};",
        ]
    if skip:
        anything = f"({op}|{dn}|{pos})*"
        L += [
            "  # an exhausted pending segment is passed over while untossed cells remain,",
            "  # so ragged configurations finish their rounds instead of getting stuck",
            f"  rel Skip(x, y) = regex {before}{same(T2)}+{after};",
            f"  lang Unfinished = regex {anything}{U}{anything};",
        ]
    hd = f"(<{op},{op}>|{same(D2)})*"
    tl = f"(<{op},{op}>|{same(T2)})*"
    L += [
        "  # every segment tossed: reopen them",
        f"  rel End(x, y) = regex (<{dn},{op}>{keep}+)+;",
        "  # announce the leftmost tossed cell",
        f"  rel A0(x, y) = regex {hd}{pair('t0', 'd0')}{tl};",
        f"  rel A1(x, y) = regex {hd}{pair('t1', 'd1')}{tl};",
        "  action head = (H0(x, y) | HL(x, y)) & z = 10 | !(H0(x, y) | HL(x, y)) & z = 0;",
        "  action tail = (T0(x, y) | TL(x, y)) & z = 10 | !(T0(x, y) | TL(x, y)) & z = 0;",
        "  action toss = (M0(x, y) | M1(x, y)) & z = 1 | !(M0(x, y) | M1(x, y)) & z = 0;",
        "  action end = End(x, y) & z = 10 | !End(x, y) & z = 0;",
        "  action zero = A0(x, y) & z = 10 | !A0(x, y) & z = 0;",
        "  action one = A1(x, y) & z = 10 | !A1(x, y) & z = 0;",
    ]
    if skip:
        L.append("  action skip = Skip(x, y) & x in lang(Unfinished) & z = 10 | !(Skip(x, y) & x in lang(Unfinished)) & z = 0;")
    L.append("}")
    return "\n".join(L) + "\n"


DCP_HEADER = [
    "# Dining cryptographers with bit-vector secrets. Segment k holds bit k of",
    "# every secret; '#' marks a segment still to be tossed in the current round,",
    "# '%' one already tossed. u/t/d cells as in the single-bit model.",
]
GRADES_HEADER = [
    "# Grades protocol with M = 2^m. Segment k holds bit k of every participant:",
    "# cell g<b><c> carries the secret bit b and the carry parity c, and is",
    "# announced as b xor c xor the two adjacent coins.",
]


def main() -> None:
    for name, cells, header, skip in (
        ("dcp_multi", DCP, DCP_HEADER, False),
        ("grades", GRADES, GRADES_HEADER, True),
    ):
        d = ROOT / name
        d.mkdir(exist_ok=True)
        (d / "model.pts").write_text(generate(name, cells, False, header, skip))
        (d / "reference.pts").write_text(generate(name, cells, True, header + ["# Reference system."], skip))


if __name__ == "__main__":
    main()
