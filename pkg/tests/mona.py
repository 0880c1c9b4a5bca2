"""Evaluator for the fragment of MONA syntax the exporter writes.

Second-order variables range over subsets of {0, ..., bound}; a word w is
the set {i : w[i] = 1} together with |w|, so nonempty sets within the bound
are exactly the words of length at most ``bound``.
"""

import itertools
import re

TOKEN = re.compile(r"\s*(<=>|=>|~=|<=|>=|ex1|ex2|all1|all2|[A-Za-z_][A-Za-z_0-9]*|\d+|[~&|()<>=:,;+-])")


def tokenize(text):
    text = "\n".join(l for l in text.splitlines() if not l.lstrip().startswith("#"))
    out, i = [], 0
    while i < len(text):
        m = TOKEN.match(text, i)
        if not m:
            if text[i:].strip() == "":
                break
            raise ValueError(f"bad input at {text[i:i + 10]!r}")
        out.append(m.group(1))
        i = m.end()
    return out


def word_set(w):
    return frozenset(i for i, c in enumerate(w) if c == "1") | {len(w)}


class Program:
    def __init__(self, text, bound):
        self.bound = bound
        self.preds = {}
        self.free = []
        self.facts = []
        toks = tokenize(text)
        stmts, cur = [], []
        for t in toks:
            if t == ";":
                stmts.append(cur)
                cur = []
            else:
                cur.append(t)
        for s in stmts:
            if s == ["ws1s"]:
                continue
            if s[0] == "pred":
                name = s[1]
                close = s.index(")")
                params = []
                for chunk in " ".join(s[3:close]).split(","):
                    kind, var = chunk.split()
                    params.append((kind, var))
                self.preds[name] = (params, s[close + 2 :])
            elif s[0] == "var2":
                self.free += [t for t in s[1:] if t != ","]
            else:
                self.facts.append(s)

    def holds(self, env):
        return all(_Eval(self, f, env).formula_all() for f in self.facts)


class _Eval:
    def __init__(self, prog, toks, env):
        self.p, self.t, self.i, self.env = prog, toks, 0, dict(env)

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def take(self, tok=None):
        t = self.peek()
        if tok is not None and t != tok:
            raise ValueError(f"expected {tok}, found {t}")
        self.i += 1
        return t

    def formula_all(self):
        v = self.formula()
        if self.i != len(self.t):
            raise ValueError(f"trailing tokens {self.t[self.i:]}")
        return v

    # The evaluator walks tokens once per call, so quantifiers re-parse their body per value.
    def formula(self):
        left = self.implication()
        while self.peek() == "<=>":
            self.take()
            right = self.implication()
            left = left == right
        return left

    def implication(self):
        left = self.disjunction()
        if self.peek() == "=>":
            self.take()
            right = self.implication()
            return (not left) or right
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            right = self.conjunction()
            left = left or right
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            right = self.unary()
            left = left and right
        return left

    def unary(self):
        t = self.peek()
        if t == "~":
            self.take()
            return not self.unary()
        if t in ("ex1", "ex2", "all1", "all2"):
            return self.quantifier()
        return self.atom()

    def quantifier(self):
        q = self.take()
        names = [self.take()]
        while self.peek() == ",":
            self.take()
            names.append(self.take())
        self.take(":")
        start = self.i
        if q.endswith("1"):
            dom = list(range(self.p.bound + 1))
        else:
            dom = [frozenset(c) for r in range(self.p.bound + 2) for c in itertools.combinations(range(self.p.bound + 1), r)]
        results = []
        end = None
        for vals in itertools.product(dom, repeat=len(names)):
            sub = _Eval(self.p, self.t, {**self.env, **dict(zip(names, vals))})
            sub.i = start
            results.append(sub.formula())
            end = sub.i
        self.i = end
        return any(results) if q.startswith("ex") else all(results)

    def atom(self):
        t = self.peek()
        if t == "true":
            self.take()
            return True
        if t == "false":
            self.take()
            return False
        if t == "(":
            save = self.i
            try:
                self.take()
                v = self.formula()
                self.take(")")
                if self.peek() not in ("in", "<=", "<", ">=", ">", "=", "~=", "+", "-"):
                    return v
            except (ValueError, TypeError, KeyError):
                pass
            self.i = save
        if t in self.p.preds and self.t[self.i + 1] == "(":
            return self.call()
        left = self.term()
        op = self.take()
        if op == "in":
            return left in self.env[self.take()]
        right = self.term()
        return {
            "=": left == right,
            "~=": left != right,
            "<=": left <= right,
            "<": left < right,
            ">=": left >= right,
            ">": left > right,
        }[op]

    def term(self):
        t = self.take()
        if t == "(":
            v = self.term()
            self.take(")")
        elif t == "empty":
            v = frozenset()
        elif t.isdigit():
            v = int(t)
        else:
            v = self.env[t]
        while self.peek() in ("+", "-"):
            op = self.take()
            k = int(self.take())
            v = v + k if op == "+" else v - k
        return v

    def call(self):
        name = self.take()
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        params, body = self.p.preds[name]
        sub = _Eval(self.p, body, dict(zip((v for _, v in params), args)))
        return sub.formula_all()
