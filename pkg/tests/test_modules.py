import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmfmi.modules import (
    ModuleError,
    ModulePresentation,
    check_action,
    dumps,
    loads,
    quotient_algebra_module,
    restrict,
    stunted_projective,
    suspended_projective,
)
from tmfmi.steenrod import SubAlgebra


def test_fixtures_are_valid_modules(fixtures):
    assert set(fixtures) >= {"f2_a1", "v0_a1", "sigma_p_m9_a1", "a1_mod_a0"}
    for name, m in fixtures.items():
        assert check_action(m) == [], name


def binom_mod2(j: int, k: int) -> int:
    """(j choose k) mod 2 for any integer j, via 2-adic Lucas."""
    if k < 0:
        return 0
    if j < 0:
        # (-m choose k) = (-1)^k (m + k - 1 choose k)
        j = -j + k - 1
    return int(j & k == k)


@given(st.integers(-20, 10), st.integers(1, 12), st.integers(0, 2))
def test_projective_action_is_binomial(N, width, n):
    top = N + width
    m = stunted_projective(N, top, n)
    alg = m.algebra
    for k in (1, 2, 4)[: n + 1]:
        a = alg.index[(k,)]
        for j in range(N, top + 1):
            image = m.act(a, m.index[f"x^{j}"])
            want = binom_mod2(j, k) if j + k <= top else 0
            assert image == (want << m.index[f"x^{j + k}"] if want else 0)


@given(st.integers(-16, 4), st.integers(2, 14), st.integers(0, 2))
def test_stunted_modules_satisfy_relations(N, width, n):
    assert check_action(stunted_projective(N, N + width, n)) == []


def test_a0_restriction_splits_into_v0_cells():
    m = restrict(stunted_projective(-9, 12, 1), 0)
    sq1 = m.algebra.index[(1,)]
    for j in range(-9, 12):
        hit = m.act(sq1, m.index[f"x^{j}"])
        assert bool(hit) == (j % 2 == 1)


@given(st.integers(-12, 4), st.integers(1, 10), st.integers(0, 2))
def test_serialization_roundtrip(N, width, n):
    m = suspended_projective(N, N + width, n)
    back = loads(dumps(m))
    assert (back.n, back.t_min, back.t_max, back.names, back.degrees) == (m.n, m.t_min, m.t_max, m.names, m.degrees)
    assert back.action == m.action


def test_quotient_dimensions():
    assert len(quotient_algebra_module(1, 0)) == 4
    assert len(quotient_algebra_module(2, 1)) == 8
    assert sorted(quotient_algebra_module(1, 0).degrees) == [0, 2, 3, 5]


def test_broken_relation_is_reported():
    # Sq1 Sq1 = 0 fails on a three-cell chain
    sq1 = SubAlgebra.get(0).index[(1,)]
    m = ModulePresentation(0, 0, 2, ["a", "b", "c"], [0, 1, 2], {(sq1, 0): 0b010, (sq1, 1): 0b100}, complete=True)
    assert any("relation" in p for p in check_action(m))


def test_degree_violation_is_reported():
    sq1 = SubAlgebra.get(0).index[(1,)]
    m = ModulePresentation(0, 0, 2, ["a", "b"], [0, 2], {(sq1, 0): 0b10}, complete=True)
    assert any("degree" in p for p in check_action(m))


@pytest.mark.parametrize(
    "text",
    [
        "window 0 1\ngen a 0\n",
        "profile 1\nwindow 0 1\ngen a 0\nact Sq(1) a = b\n",
        "profile 1\nwindow 0 1\ngen a 0\nact Sq(0,0,1) a = a\n",
        "profile 1\nwindow 0 1\nfrobnicate\n",
        "profile 1\nwindow 0 1\ngen a 5\n",
        "profile 1\nwindow 0 x\n",
    ],
)
def test_malformed_module_files(text):
    with pytest.raises(ModuleError):
        loads(text)


def test_empty_window_is_usage_error():
    with pytest.raises(ModuleError):
        stunted_projective(3, 1, 1)
