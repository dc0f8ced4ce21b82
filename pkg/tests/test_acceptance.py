"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import subprocess
import sys
import time
from pathlib import Path

from tmfmi import ahss, cli, verifier
from tmfmi.koszul import closed_form_a0, e1_page, run_n1
from tmfmi.mahowald import algebraic_mi, periodicity_check
from tmfmi.modules import load, trivial
from tmfmi.resolution import DEFAULT_PINS, ext_chart, load_pins, minimal_resolution

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "tmfmi" / "data" / "modules"


def line(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"


def criterion_1():
    t0 = time.perf_counter()
    chart = ext_chart(minimal_resolution(trivial(1), 40, 40), load_pins(DEFAULT_PINS)[1])
    dt = time.perf_counter() - t0
    want = {(1, 1): "h0", (1, 2): "h1", (3, 7): "alpha", (4, 12): "beta"}
    got = {k: chart.names.get(k) for k in want}
    ok = all(got[k] == [v] for k, v in want.items()) and dt < 1
    return ok, f"{got}, {dt:.3f}s < 1s"


def criterion_2():
    t0 = time.perf_counter()
    bounds = (12, 40)
    page = e1_page(1, trivial(1), bounds)
    bad = [s for s in range(9) if closed_form_a0(s, bounds) != page.column(s)]
    dt = time.perf_counter() - t0
    return not bad and dt < 5, f"sigma<=8 mismatches {bad}, {dt:.3f}s < 5s"


def criterion_3():
    # s large enough that every class with t <= 30 is in range
    cases = {"f2_a1": 30, "v0_a1": 30, "sigma_p_m9_a1": 38}
    bad = {}
    for name, s_max in cases.items():
        mism = run_n1(load(FIXTURES / f"{name}.txt"), (s_max, 30), check=False).mismatches()
        if mism:
            bad[name] = mism[:3]
    return not bad, f"mismatches {bad or 'none'} for F2, V(0), SigmaP_-9, t<=30"


def criterion_4():
    t0 = time.perf_counter()
    base = {"1": "1", "h0": "h1", "h0^2": "h1^2", "h0^3": "alpha"}
    got = {x: algebraic_mi(1, x) for x in base}
    bad = [x for x, mi in got.items() if mi.describe() != base[x] or mi.indeterminacy]
    rows = [("h0^4", "beta", "1")] + [(f"h0^{k + 4}", "beta", "h0" if k == 1 else f"h0^{k}") for k in range(1, 5)]
    bad += periodicity_check(1, rows)
    dt = time.perf_counter() - t0
    return not bad and dt < 60, f"failures {bad or 'none'} through h0^8, {dt:.2f}s < 60s"


def criterion_5():
    t0 = time.perf_counter()
    run = ahss.run_ahss()
    missing = ahss.missing_explicit(run)
    d5 = run.differentials(5)
    e5_e6 = all(run.pages[5].dim(*k) == run.pages[6].dim(*k) for k in run.pages[5].basis)
    accounting = all(
        run.pages[r + 1].dim(*k)
        == run.pages[r].dim(*k) - run.pages[r + 1].ranks_out.get(k, 0) - run.pages[r + 1].ranks_in.get(k, 0)
        for r in range(2, 8)
        for k in run.pages[r].basis
    )
    defects = ahss.periodicity_defects(run)
    named = [("kbar", -12), ("eta.D.kbar", -29), ("2.D^4.kbar", -76), ("nu.D^6.kappa", -105)]
    absent = [f"{n}[{s}]" for n, s in named if not run.survives(n, s)]
    dt = time.perf_counter() - t0
    ok = not missing and not d5 and e5_e6 and accounting and not defects and not absent and dt < 30
    detail = (
        f"{len(run.explicit)} explicit instances, {len(missing)} missing; d5 count {len(d5)}; "
        f"accounting {accounting}; periodicity defects {len(defects)}; absent {absent or 'none'}; {dt:.2f}s < 30s"
    )
    return ok, detail


def criterion_6(tmp: Path):
    out = tmp / "verify.tsv"
    code = cli.main(["mi-verify", "--out", str(out)])
    rows = {}
    for rec in out.read_text().splitlines()[1:]:
        f = rec.split("\t")
        if f[1] == "summary":
            rows[f[0]] = f[2]
        elif f[3] == "reject":
            rows.setdefault("rejected", []).append(f[0])
    base = [f"row:{i}" for i in range(32)]
    periodic = [f"row:{i}" for i in range(32, 65)]
    ok = code == 0 and all(rows.get(k) == "pass" for k in base + periodic) and "rejected" not in rows
    n_base = sum(rows.get(k) == "pass" for k in base)
    n_per = sum(rows.get(k) == "pass" for k in periodic)
    return ok, f"exit {code}; base rows {n_base}/32; periodic rows 32..64 {n_per}/33"


def criterion_7():
    ctx = verifier.load_context()
    scripts = {verifier.load_script(p).key: verifier.load_script(p) for p in verifier.script_paths()}
    results = {}
    for key in verifier.FAMILY_KEYS:
        s = scripts.get("fam:" + ",".join(map(str, key)))
        relaxed = s is not None and any("relaxed" in st.flags for st in s.steps)
        results[key] = s is not None and relaxed and verifier.verify_script(s, ctx).ok
    bad = [k for k, v in results.items() if not v]
    return not bad, f"{len(results) - len(bad)}/{len(results)} family members (i,j,k,l) verified relaxed"


def criterion_8():
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(ROOT / "tests"),
         "--ignore", str(Path(__file__))],
        capture_output=True, text=True, cwd=ROOT,
    )
    dt = time.perf_counter() - t0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    return proc.returncode == 0 and dt < 300, f"{tail}; {dt:.1f}s < 300s"


def _check(n: int, ok: bool, detail: str, capsys) -> None:
    with capsys.disabled():
        print("\n" + line(n, ok, detail))
    assert ok, detail


def test_criterion_1(capsys):
    _check(1, *criterion_1(), capsys)


def test_criterion_2(capsys):
    _check(2, *criterion_2(), capsys)


def test_criterion_3(capsys):
    _check(3, *criterion_3(), capsys)


def test_criterion_4(capsys):
    _check(4, *criterion_4(), capsys)


def test_criterion_5(capsys):
    _check(5, *criterion_5(), capsys)


def test_criterion_6(capsys, tmp_path):
    _check(6, *criterion_6(tmp_path), capsys)


def test_criterion_7(capsys):
    _check(7, *criterion_7(), capsys)


def test_criterion_8(capsys):
    _check(8, *criterion_8(), capsys)


if __name__ == "__main__":
    import tempfile

    status = 0
    with tempfile.TemporaryDirectory() as d:
        for n, fn in enumerate([criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                lambda: criterion_6(Path(d)), criterion_7, criterion_8], 1):
            ok, detail = fn()
            print(line(n, ok, detail))
            status |= not ok
    sys.exit(status)
