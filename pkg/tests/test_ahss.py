from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmfmi.ahss import (
    GENERATORS,
    Monomial,
    RingDataError,
    Window,
    canonical,
    lemma_j_shape,
    load_ring_data,
    missing_explicit,
    name_degree,
    parse_ring_data,
    parse_sum,
    periodicity_defects,
    render_svg,
    run_ahss,
    survivor_tsv,
    survivors,
)

GOLDEN = Path(__file__).with_name("data") / "ahss_e8_s-7_0.tsv"
FIRST = Window(-7, 0, 0, 7)


def test_explicit_lists_reproduced(ahss_run):
    assert ahss_run.explicit
    assert missing_explicit(ahss_run) == []


def test_no_d5(ahss_run):
    assert ahss_run.differentials(5) == []
    p5, p6 = ahss_run.pages[5], ahss_run.pages[6]
    assert all(p5.dim(*k) == p6.dim(*k) for k in p5.basis)


def test_rank_accounting(ahss_run):
    for r in range(2, 8):
        before, after = ahss_run.pages[r], ahss_run.pages[r + 1]
        for key in before.basis:
            lost = after.ranks_out.get(key, 0) + after.ranks_in.get(key, 0)
            assert after.dim(*key) == before.dim(*key) - lost, (r, key)
        assert sum(after.ranks_out.values()) == sum(after.ranks_in.values())


def test_differentials_have_the_right_shape(ahss_run):
    for r in range(2, 8):
        for d in ahss_run.differentials(r):
            assert d.r == r
            assert name_degree(d.source) + d.s == d.t
            assert ahss_run.pages[r].contains(d.s - r, d.t - 1, d.target, ahss_run.ring)


def test_e8_periodic(ahss_run):
    assert periodicity_defects(ahss_run) == []


@pytest.mark.parametrize("name,s", [("kbar", -12), ("eta.D.kbar", -29), ("2.D^4.kbar", -76), ("nu.D^6.kappa", -105)])
def test_named_survivors(ahss_run, name, s):
    assert ahss_run.survives(name, s)


def test_first_window_matches_golden():
    run = run_ahss(view=FIRST)
    assert survivor_tsv(survivors(run, FIRST)) == GOLDEN.read_text()


@pytest.mark.parametrize(
    "name,s",
    # readings stated with the first chart: invariants of 2, 4, 8, eta, eta^2, and eps on cell -5
    [("eta", -1), ("eta^2", -2), ("4.nu", -3), ("nu", -2), ("nu^2", -4), ("eps", -5)],
)
def test_first_window_readings(name, s):
    run = run_ahss(view=FIRST)
    assert run.survives(name, s, view=FIRST)


def test_output_is_deterministic():
    a = survivor_tsv(survivors(run_ahss(view=FIRST), FIRST))
    b = survivor_tsv(survivors(run_ahss(view=FIRST), FIRST))
    assert a == b
    rows = a.splitlines()[1:]
    keys = [(int(r.split("\t")[0]), int(r.split("\t")[1]), r.split("\t")[2]) for r in rows]
    assert keys == sorted(keys)


def test_empty_view_gives_header_only(ahss_run):
    assert survivor_tsv(survivors(ahss_run, Window(0, 0, 1, 0))) == "s\tt\tname\tpermanent\n"


def test_svg_layout():
    run = run_ahss(view=FIRST)
    svg = render_svg(survivors(run, FIRST), FIRST)
    assert svg.startswith("<svg") and "t=7" in svg


def test_lemma_j_shape():
    assert lemma_j_shape("eta.c4")
    assert lemma_j_shape("eta^2.c4^3.D^2")
    assert lemma_j_shape("2.c6.c4")
    assert not lemma_j_shape("c4")
    assert not lemma_j_shape("eta.kbar")
    assert not lemma_j_shape("eta.c4 + nu")


monomials = st.builds(
    lambda two, exps: Monomial(two, tuple(exps)),
    st.integers(0, 3),
    st.lists(st.integers(0, 3), min_size=len(GENERATORS), max_size=len(GENERATORS)),
)


@given(monomials)
def test_canonical_roundtrip(m):
    text = m.ascii()
    assert canonical(text) == text
    assert canonical(canonical(text)) == text
    assert parse_sum(text) == frozenset({m}) or text == "0"


@given(monomials, monomials)
def test_degree_is_additive(a, b):
    assert (a * b).degree == a.degree + b.degree
    assert name_degree((a * b).ascii()) == name_degree(a.ascii()) + name_degree(b.ascii())


def test_factor_order_irrelevant():
    assert canonical("kbar.D^4.2") == canonical("2.D^4.kbar")
    assert parse_sum("(c4+eps).D^2") == parse_sum("c4.D^2 + eps.D^2")


def test_shipped_ring_data_loads():
    ring = load_ring_data()
    assert ring.resolve("eta^3") == "4.nu"
    assert ring.af("kbar") == 4


@pytest.mark.parametrize(
    "text",
    [
        "",
        "deg 1: eta order 2 af 1\ndeg 1: eta order 2 af 1\n",
        "deg 2: eta order 2 af 1\n",
        "deg 1: eta order 3 af 1\n",
        "deg 1: eta order 2 af 1\nmul eta eta = nu\n",
        "deg 1: eta order 2 af 1\nbracket eta,2 = eta\n",
        "deg 1: eta order 2 af 1\nwhatever\n",
        "deg 0: 1 order free af 0\ndeg 1: eta order 2 af 1\nexplicit d3 3 mod 4: 1 -> eta ; x\n",
    ],
)
def test_bad_ring_data(text):
    with pytest.raises(RingDataError):
        parse_ring_data(text)
