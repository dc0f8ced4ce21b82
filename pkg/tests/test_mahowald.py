import pytest

from tmfmi.mahowald import algebraic_mi, periodicity_check

BO_ROWS = [("1", 1, "1"), ("h0", 2, "h1"), ("h0^2", 3, "h1^2"), ("h0^3", 5, "alpha")]


@pytest.mark.parametrize("x,N,target", BO_ROWS)
def test_bo_base_rows(x, N, target):
    mi = algebraic_mi(1, x)
    assert (mi.N, mi.describe(), mi.indeterminacy) == (N, target, [])


def test_bo_beta_periodicity():
    rows = [("h0^4", "beta", "1")] + [(f"h0^{k + 4}", "beta", "h0" if k == 1 else f"h0^{k}") for k in range(1, 5)]
    assert periodicity_check(1, rows) == []


@pytest.mark.parametrize("x,target", [("h0", "h1"), ("h1", "h2"), ("alpha", "a")])
def test_tmf_seeds(x, target):
    assert algebraic_mi(2, x).describe() == target


def test_report_line_and_bracket():
    mi = algebraic_mi(1, "h0^3")
    assert mi.report_line() == "h0^3 -> (5, alpha, 0)"
    assert mi.bracket == -4


def test_unknown_class():
    with pytest.raises(KeyError):
        algebraic_mi(1, "nonsense")
