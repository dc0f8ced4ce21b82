import itertools
import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmfmi.steenrod import (
    SteenrodSum,
    SubAlgebra,
    milnor_product,
    normalize,
    parse_milnor,
    to_admissible,
    word_to_milnor,
)


def mul(alg: SubAlgebra, x: int, y: int) -> int:
    acc = 0
    for i in range(len(alg)):
        if x >> i & 1:
            for j in range(len(alg)):
                if y >> j & 1:
                    acc ^= alg.prod[i][j]
    return acc


def assoc(alg: SubAlgebra, a: int, b: int, c: int) -> bool:
    ab = alg.prod[a][b]
    bc = alg.prod[b][c]
    return mul(alg, ab, 1 << c) == mul(alg, 1 << a, bc)


def test_dimensions():
    assert [len(SubAlgebra.get(n)) for n in range(3)] == [2, 8, 64]
    assert SubAlgebra.get(1).top_degree == 6
    assert SubAlgebra.get(2).top_degree == 23


def test_a1_associativity_all_triples():
    alg = SubAlgebra.get(1)
    bad = [t for t in itertools.product(range(8), repeat=3) if not assoc(alg, *t)]
    assert bad == []


def test_a2_associativity_random_triples():
    alg = SubAlgebra.get(2)
    rng = random.Random(20241017)
    triples = [tuple(rng.randrange(64) for _ in range(3)) for _ in range(1000)]
    assert [t for t in triples if not assoc(alg, *t)] == []


@pytest.mark.parametrize("n", [0, 1, 2])
def test_unit(n):
    alg = SubAlgebra.get(n)
    for i in range(len(alg)):
        assert alg.prod[alg.unit][i] == 1 << i == alg.prod[i][alg.unit]


def adem(a: int, b: int) -> frozenset:
    acc: set = set()
    for c in range(a // 2 + 1):
        if comb(b - c - 1, a - 2 * c) % 2:
            acc ^= word_to_milnor((a + b - c, c) if c else (a + b - c,))
    return frozenset(acc)


@given(st.integers(1, 12), st.integers(1, 12))
def test_adem_relations(a, b):
    if a < 2 * b:
        assert word_to_milnor((a, b)) == adem(a, b)


def test_small_products():
    assert milnor_product((1,), (1,)) == frozenset()
    assert milnor_product((1,), (2,)) == frozenset({(3,)})
    assert milnor_product((2,), (1,)) == frozenset({(3,), (0, 1)})
    assert milnor_product((2,), (2,)) == frozenset({(1, 1)})


@pytest.mark.parametrize("n", [1, 2])
def test_conjugation_is_an_antiautomorphism(n):
    alg = SubAlgebra.get(n)
    size = len(alg)
    for a in range(size):
        assert _chi(alg, alg.chi[a]) == 1 << a
    rng = random.Random(7)
    for _ in range(200):
        a, b = rng.randrange(size), rng.randrange(size)
        assert _chi(alg, alg.prod[a][b]) == mul(alg, alg.chi[b], alg.chi[a])


def _chi(alg, v):
    acc = 0
    for i in range(len(alg)):
        if v >> i & 1:
            acc ^= alg.chi[i]
    return acc


@given(st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_admissible_roundtrip(r):
    e = normalize(r)
    if e == ():
        return
    a = SteenrodSum(5, [e])
    acc: set = set()
    for w in to_admissible(a):
        acc ^= word_to_milnor(w)
    assert frozenset(acc) == a.terms


def test_parse_milnor():
    assert parse_milnor("Sq(0,1)") == (0, 1)
    with pytest.raises(ValueError):
        parse_milnor("Sq[1]")
    with pytest.raises(ValueError):
        SteenrodSum.sq(1, 0, 0, 1)
