import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tmfmi import verifier
from tmfmi.verifier import (
    FAMILY_KEYS,
    ScriptError,
    extend_periodically,
    family_target,
    load_script,
    parse_script,
    script_paths,
    stem_audit,
    verify_all,
    verify_row,
    verify_script,
)

ROW4 = """row 4
step AlgebraicSeed x=beta => g[-12]
step BracketTransfer => kbar[-12]
step AHSSExclusion => kbar[-12]
"""


def shipped():
    return {load_script(p).key: load_script(p) for p in script_paths()}


def test_row_script_passes(ctx):
    assert verify_script(parse_script(ROW4), ctx).ok


def test_planted_differential_is_rejected(ctx):
    # g supports no d3
    text = ROW4.replace("step BracketTransfer", "step AdamsLift d=3 => x35.h21^2[-9]\nstep BracketTransfer")
    rep = verify_script(parse_script(text), ctx)
    assert not rep.ok
    assert [v.ok for _, _, v in rep.lines] == [True, False]


def test_wrong_claim_is_rejected(ctx):
    rep = verify_script(parse_script(ROW4.replace("=> kbar[-12]\n", "=> eta.kbar[-13]\n", 1)), ctx)
    assert not rep.ok


def test_wrong_seed_is_rejected(ctx):
    rep = verify_script(parse_script(ROW4.replace("g[-12]", "D.h1[-12]")), ctx)
    assert not rep.ok and not rep.lines[0][2].ok


@settings(max_examples=20, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 27), st.integers(-3, 3).filter(bool))
def test_shifted_final_cell_is_rejected(ctx, i, delta):
    script = shipped()[f"row:{i}"]
    last = script.steps[-1]
    claim = verifier.parse_claim(last.claim)
    moved = verifier.Step(last.kind, last.args, last.flags, str(verifier.Claim(claim.name, claim.s + delta)), last.line)
    rep = verify_script(verifier.Script(script.key, script.steps[:-1] + (moved,)), ctx)
    assert not rep.ok


def test_row_mismatch_reported(ctx):
    rep = verify_row(5, parse_script(ROW4), ctx)
    assert not rep.ok and "row:4" in rep.lines[0][2].reason


@pytest.mark.parametrize(
    "text",
    [
        "row 4\nstep Frobnicate => kbar[-12]\n",
        "row 4\nstep AlgebraicSeed x=beta g[-12]\n",
        "row 4\nhello\n",
    ],
)
def test_script_syntax_errors(text):
    with pytest.raises(ScriptError):
        parse_script(text)


def test_all_shipped_scripts_pass(ctx):
    reports = verify_all(ctx, extend_to=64)
    failed = [r.key for r in reports if not r.ok]
    assert failed == []
    keys = {r.key for r in reports}
    assert {f"row:{i}" for i in range(65)} <= keys
    assert {"fam:" + ",".join(map(str, k)) for k in FAMILY_KEYS} <= keys


def test_family_scripts_use_relaxed_exclusion(ctx):
    scripts = shipped()
    for key in FAMILY_KEYS:
        s = scripts["fam:" + ",".join(map(str, key))]
        assert any("relaxed" in st.flags for st in s.steps if st.kind == "AHSSExclusion")
        assert verify_script(s, ctx).ok


def test_family_target_degrees():
    for key in FAMILY_KEYS:
        t = family_target(*key)
        assert stem_audit(t) == "ok", key


def test_stem_audit_flags_row_30(ctx):
    assert stem_audit(ctx.rows[30]).startswith("input stem 58")
    assert all(stem_audit(ctx.rows[i]) == "ok" for i in range(32) if i != 30)


@pytest.mark.parametrize("i", [32, 37, 52, 63, 64])
def test_periodic_extension(ctx, i):
    rep = extend_periodically(i, ctx)
    assert rep.ok
    base = ctx.rows[i % 32].claim
    assert rep.final.s == base.s - 128 * (i // 32)


def test_periodic_extension_rejects_wrong_claim(ctx):
    bad = verifier.Script("row:33", (verifier.Step("PeriodicityExtend", {"from": "row:1"}, frozenset(), "nu.D^8[-2]", 1),))
    assert not verify_script(bad, ctx).ok


def test_report_tsv_shape(ctx):
    rep = verify_script(parse_script(ROW4), ctx)
    lines = rep.tsv().splitlines()
    assert len(lines) == 4
    assert all(len(l.split("\t")) == len(verifier.TSV_HEADER.split("\t")) for l in lines)
    assert lines[-1].split("\t")[1:3] == ["summary", "pass"]
