import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmfmi.modules import quotient_algebra_module, stunted_projective, trivial
from tmfmi.resolution import DEFAULT_PINS, WindowError, ext_chart, load_pins, minimal_resolution

BOUNDS = {
    "f2_a0": (10, 20),
    "f2_a1": (10, 30),
    "f2_a2": (6, 24),
    "v0_a1": (8, 24),
    "sigma_p_m9_a1": (6, 24),
    "a1_mod_a0": (8, 24),
    "a2_mod_a1": (5, 20),
}


@pytest.mark.parametrize("name", sorted(BOUNDS))
def test_fixture_resolutions_are_minimal_complexes(fixtures, name):
    r = minimal_resolution(fixtures[name], *BOUNDS[name])
    assert r.check_d_squared() == []
    assert r.check_minimal() == []


@settings(max_examples=15)
@given(st.integers(-10, 2), st.integers(2, 10), st.integers(0, 1))
def test_stunted_resolutions_are_minimal_complexes(N, width, n):
    r = minimal_resolution(stunted_projective(N, N + width, n), 4, N + width)
    assert r.check_d_squared() == []
    assert r.check_minimal() == []


def test_ext_a0_is_h0_tower():
    c = ext_chart(minimal_resolution(trivial(0), 10, 20))
    assert c.bidegrees() == [(s, s) for s in range(11)]


def test_change_of_rings():
    # Ext_{A(1)}(A(1)//A(0)) = Ext_{A(0)}(F_2)
    a = ext_chart(minimal_resolution(quotient_algebra_module(1, 0), 8, 20))
    b = ext_chart(minimal_resolution(trivial(0), 8, 20))
    assert a.dims == b.dims


def test_beta_periodicity():
    c = ext_chart(minimal_resolution(trivial(1), 12, 40))
    for s in range(0, 9):
        for t in range(s, 29):
            assert c.dim(s, t) == c.dim(s + 4, t + 12), (s, t)


def test_low_products():
    c = ext_chart(minimal_resolution(trivial(1), 6, 20), load_pins(DEFAULT_PINS)[1])
    h0, h1 = c.products[0], c.products[1]
    assert h0[(1, 2)] == [0]  # h0 h1 = 0
    assert h1[(1, 2)] == [1]  # h1^2 != 0
    assert h1[(2, 4)] == [0]  # h1^3 = 0
    assert h0[(3, 7)] == [1]  # h0 alpha != 0


def test_trusted_window_enforced(fixtures):
    with pytest.raises(WindowError):
        minimal_resolution(fixtures["sigma_p_m9_a1"], 6, 40)


def test_pin_file_errors(tmp_path):
    p = tmp_path / "pins.txt"
    p.write_text("pin 1 1 1 h0\n")
    with pytest.raises(ValueError):
        load_pins(p)
