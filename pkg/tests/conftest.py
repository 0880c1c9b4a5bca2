import itertools

import pytest

from regbisim.automata import Alphabet, TapedAlphabet


def words_upto(symbols, n):
    for ln in range(n + 1):
        for w in itertools.product(symbols, repeat=ln):
            yield w


@pytest.fixture
def bin1():
    return TapedAlphabet(Alphabet(("0", "1")), 1)


@pytest.fixture
def bin2():
    return TapedAlphabet(Alphabet(("0", "1")), 2)
