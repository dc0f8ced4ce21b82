"""Machine-checked derivations of tmf-based Mahowald invariants.

A derivation script is a list of steps, one per line::

    row 8
    step AlgebraicSeed x=beta^2 => D^2[-32]
    step AdamsLift d=2 => x35.h21^2[-29]
    step BracketTransfer => eta.D.kbar[-29]
    step AHSSExclusion => eta.D.kbar[-29]

Each step is checked against three read-only sources: the Adams data for tmf
(``data/adams.txt``), the algebraic seed table (``data/seeds.txt``) and the
E8 page of the Atiyah-Hirzebruch spectral sequence computed by
:mod:`tmfmi.ahss`.  The verifier checks certificates; it never searches.

Names in square brackets are Atiyah-Hirzebruch cells.  For a class ``y[s]``
attached to an input of stem ``n`` the invariant ``n = |y| + s`` holds.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from tmfmi.ahss import (
    AHSSRun,
    GENERATORS,
    Monomial,
    TmfRingData,
    Window,
    name_degree,
    parse_sum,
    run_ahss,
)
from tmfmi.f2linalg import RowReducer
from tmfmi.resolution import DEFAULT_PINS, load_pins

DATA = Path(__file__).with_name("data")
VERIFY_VIEW = Window(-184, 0, 0, 7)
KINDS = (
    "AlgebraicSeed",
    "AdamsLift",
    "BracketTransfer",
    "AHSSExclusion",
    "DimensionBound",
    "BifiltrationShift",
    "PeriodicityExtend",
)
ROW_ORDER = list(range(28)) + [30, 29, 28, 31]


class ScriptError(ValueError):
    def __init__(self, line: int | None, message: str):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# ---------------------------------------------------------------- Adams names

def _top_split(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [p.strip() for p in out]


class AdamsAlgebra:
    """Monomials in named Ext_{A(2)} generators, summed over F2."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens

    def monomial(self, text: str) -> tuple[int, ...]:
        exps = [0] * len(self.tokens)
        if text == "1":
            return tuple(exps)
        for part in _top_split(text, "."):
            m = re.fullmatch(r"(\(.*\)|[^^]+)(?:\^(\d+))?", part)
            tok, k = (m.group(1), m.group(2) or "1") if m else (part, "1")
            if tok not in self.tokens:
                raise KeyError(f"unknown Adams generator {tok!r} in {text!r}")
            exps[self.tokens.index(tok)] += int(k)
        return tuple(exps)

    def parse(self, text: str) -> frozenset[tuple[int, ...]]:
        out: set[tuple[int, ...]] = set()
        for term in _top_split(text, "+"):
            out ^= {self.monomial(term)}
        return frozenset(out)

    def fmt_monomial(self, m: tuple[int, ...]) -> str:
        parts = [t if e == 1 else f"{t}^{e}" for t, e in zip(self.tokens, m) if e]
        return ".".join(parts) or "1"

    def fmt(self, s: frozenset[tuple[int, ...]]) -> str:
        return " + ".join(sorted(self.fmt_monomial(m) for m in s)) or "0"

    def canonical(self, text: str) -> str:
        return self.fmt(self.parse(text))

    def times(self, a: frozenset, b: frozenset) -> frozenset:
        out: set[tuple[int, ...]] = set()
        for x in a:
            for y in b:
                out ^= {tuple(i + j for i, j in zip(x, y))}
        return frozenset(out)


@dataclass
class AdamsData:
    alg: AdamsAlgebra
    gens: dict[str, tuple[int, int]]
    fixed: dict[tuple[int, ...], tuple[int, int]]
    diffs: dict[frozenset, tuple[int, frozenset]]
    nonpermanent: set[frozenset]
    detect: dict[frozenset, str]

    def _mono_bideg(self, m: tuple[int, ...]) -> tuple[int, int]:
        if m in self.fixed:
            return self.fixed[m]
        stem = sum(e * self.gens[t][0] for t, e in zip(self.alg.tokens, m))
        af = sum(e * self.gens[t][1] for t, e in zip(self.alg.tokens, m))
        return stem, af

    def stem(self, text: str) -> int:
        stems = {self._mono_bideg(m)[0] for m in self.alg.parse(text)}
        if len(stems) != 1:
            raise ValueError(f"{text!r} is not homogeneous in stem")
        return stems.pop()

    def af(self, text: str) -> int:
        return min(self._mono_bideg(m)[1] for m in self.alg.parse(text))

    def _strip(self, x: frozenset) -> tuple[frozenset, int, int] | None:
        """Split off the common w1^a and D^(8m) factor of every term."""
        w, d = self.alg.tokens.index("w1"), self.alg.tokens.index("D")
        a = min(m[w] for m in x)
        b = min(m[d] for m in x) // 8 * 8
        core = frozenset(tuple(e - (a if i == w else b if i == d else 0) for i, e in enumerate(m)) for m in x)
        return core, a, b

    def _factor(self, a: int, b: int) -> frozenset:
        e = [0] * len(self.alg.tokens)
        e[self.alg.tokens.index("w1")] = a
        e[self.alg.tokens.index("D")] = b
        return frozenset({tuple(e)})

    def differential(self, source: str) -> tuple[int, str] | None:
        core, a, b = self._strip(self.alg.parse(source))
        hit = self.diffs.get(core)
        if hit is None:
            return None
        r, target = hit
        return r, self.alg.fmt(self.alg.times(target, self._factor(a, b)))

    def is_nonpermanent(self, source: str) -> bool:
        core, _, _ = self._strip(self.alg.parse(source))
        return core in self.nonpermanent or core in self.diffs

    def detected(self, source: str) -> tuple[str, int, int] | None:
        """(tmf name, c4 power, D power) multiplied back in by the caller."""
        core, a, b = self._strip(self.alg.parse(source))
        if core not in self.detect:
            return None
        return self.detect[core], a, b

    def cross_check(self, pins: dict[tuple[int, int, int], str]) -> list[str]:
        """Compare generator bidegrees with the pinned Ext_{A(2)} classes."""
        alias = {"v2^4h1": "D.h1"}
        bad = []
        for (s, t, _), name in pins.items():
            name = alias.get(name, name)
            try:
                stem, af = self.stem(name), self.af(name)
            except KeyError:
                continue
            if (stem, af) != (t - s, s):
                bad.append(f"{name}: data (stem {stem}, af {af}) vs pin (s={s}, t={t})")
        return bad


def parse_adams_data(text: str) -> AdamsData:
    gens: dict[str, tuple[int, int]] = {}
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "gen":
            tok, stem, af = rest.split()
            gens[tok] = (int(stem), int(af))
        else:
            lines.append((no, head, rest))
    alg = AdamsAlgebra(list(gens))
    data = AdamsData(alg, gens, {}, {}, set(), {})
    for no, head, rest in lines:
        try:
            if head == "class":
                name, stem, af = rest.split()
                data.fixed[alg.monomial(name)] = (int(stem), int(af))
            elif head == "diff":
                m = re.fullmatch(r"d(\d+)\s+(.+?)\s*->\s*(.+)", rest)
                if not m:
                    raise ValueError("expected 'diff d<r> <source> -> <target>'")
                data.diffs[alg.parse(m.group(2))] = (int(m.group(1)), alg.parse(m.group(3)))
            elif head == "nonpermanent":
                data.nonpermanent.add(alg.parse(rest))
            elif head == "detect":
                src, _, tgt = rest.partition("=")
                data.detect[alg.parse(src.strip())] = tgt.strip()
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (ValueError, KeyError) as exc:
            raise ScriptError(no, f"adams data: {exc}") from None
    for src, (r, tgt) in data.diffs.items():
        s_src, s_tgt = data.stem(alg.fmt(src)), data.stem(alg.fmt(tgt))
        a_src, a_tgt = data.af(alg.fmt(src)), data.af(alg.fmt(tgt))
        if s_tgt != s_src - 1 or a_tgt != a_src + r:
            raise ScriptError(None, f"adams data: d{r}({alg.fmt(src)}) does not shift (s, t-s) by ({r}, -1)")
    return data


def load_adams_data(path: str | Path | None = None) -> AdamsData:
    return parse_adams_data(Path(path or DATA / "adams.txt").read_text())


# ---------------------------------------------------------------- seeds

BO_GENS = {"h0": (0, 1), "h1": (1, 1), "alpha": (4, 3), "beta": (8, 4)}  # stem, Ext degree s


def _bo_exps(text: str) -> dict[str, int]:
    e = dict.fromkeys(BO_GENS, 0)
    if text == "1":
        return e
    for part in text.split("."):
        tok, _, k = part.partition("^")
        if tok not in e:
            raise KeyError(f"unknown bo generator {tok!r}")
        e[tok] += int(k or 1)
    return e


def _bo_fmt(e: dict[str, int]) -> str:
    order = ("alpha", "beta", "h0", "h1")
    return ".".join(t if e[t] == 1 else f"{t}^{e[t]}" for t in order if e[t]) or "1"


def bo_stem(text: str) -> int:
    return sum(k * BO_GENS[t][0] for t, k in _bo_exps(text).items())


def bo_ext_degree(text: str) -> int:
    return sum(k * BO_GENS[t][1] for t, k in _bo_exps(text).items())


@dataclass
class SeedTable:
    """M^alg from Ext_{A(1)} to Ext_{A(2)}, extended by h0^4 -> w1 and beta^2 -> D^2."""

    seeds: dict[str, str]
    adams: AdamsData

    def value(self, x: str) -> str:
        e = _bo_exps(x)
        w, e["h0"] = divmod(e["h0"], 4)
        d, e["beta"] = divmod(e["beta"], 2)
        base = self.seeds.get(_bo_fmt(e))
        if base is None:
            raise KeyError(f"no algebraic seed for {x}")
        alg = self.adams.alg
        return alg.fmt(alg.times(alg.parse(base), self.adams._factor(w, 2 * d)))


def load_seeds(adams: AdamsData, path: str | Path | None = None) -> SeedTable:
    seeds = {}
    for no, raw in enumerate(Path(path or DATA / "seeds.txt").read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("relation"):
            continue
        m = re.fullmatch(r"seed\s+(\S+)\s*->\s*(.+)", line)
        if not m:
            raise ScriptError(no, "seed table: expected 'seed <x> -> <value>'")
        x, v = _bo_fmt(_bo_exps(m.group(1))), adams.alg.canonical(m.group(2))
        if adams.af(v) != bo_ext_degree(x):
            raise ScriptError(no, f"seed table: af({v}) = {adams.af(v)} but {x} has s = {bo_ext_degree(x)}")
        seeds[x] = v
    return SeedTable(seeds, adams)


def bo_row_class(i: int) -> str:
    """M_bo(2^i) = beta^(i//4) times 1, h1, h1^2 or alpha."""
    a, e = divmod(i, 4)
    base = ["1", "h1", "h1^2", "alpha"][e]
    parts = [p for p in (f"beta^{a}" if a > 1 else "beta" if a else "", base if base != "1" else "") if p]
    return ".".join(parts) or "1"


# ---------------------------------------------------------------- golden claims

@dataclass(frozen=True)
class Claim:
    name: str
    s: int

    def __str__(self) -> str:
        return f"{self.name}[{self.s}]"


def parse_claim(text: str) -> Claim:
    m = re.fullmatch(r"(.+)\[(-?\d+)\]", text.strip())
    if not m:
        raise ValueError(f"expected <name>[<cell>], got {text!r}")
    return Claim(m.group(1).strip(), int(m.group(2)))


@dataclass(frozen=True)
class Target:
    key: str
    x: str          # input, as a bo Ext name (or a sphere name for extra targets)
    n: int          # stem of the input
    claim: Claim


def load_rows(path: str | Path | None = None) -> dict[int, Target]:
    rows = {}
    for no, raw in enumerate(Path(path or DATA / "rows.txt").read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"row\s+(\d+)\s+(\S+)\s*=>\s*(.+)", line)
        if not m:
            raise ScriptError(no, "rows: expected 'row <i> <x> => <claim>'")
        i, x = int(m.group(1)), _bo_fmt(_bo_exps(m.group(2)))
        rows[i] = Target(f"row:{i}", x, bo_stem(x), parse_claim(m.group(3)))
    return rows


def family_target(i: int, j: int, k: int, l: int) -> Target:
    """2^(4i+l) beta^j alpha^k; the k = 1 cells carry the degree correction (see README)."""
    x = _bo_fmt({"h0": 4 * i + l, "beta": j, "alpha": k, "h1": 0})
    n = 8 * j + 4 * k
    c = i + k
    if l < 3:
        name = ".".join(p for p in (f"c4^{c}" if c > 1 else "c4" if c else "", f"eta^{l}" if l > 1 else "eta" if l else "",
                                    f"D^{j}" if j > 1 else "D" if j else "") if p) or "1"
    else:
        name = ".".join(p for p in ("2.c6", f"c4^{c - 1}" if c > 2 else "c4" if c == 2 else "", f"D^{j}" if j > 1 else "D" if j else "") if p)
    return Target(f"fam:{i},{j},{k},{l}", x, n, Claim(name, n - name_degree(name)))


def known_targets(ctx: "Context") -> list[Target]:
    """Every invariant the verifier can name: the table rows and the family for i <= 3, j <= 2."""
    fam = [family_target(i, j, k, l) for i in (1, 2, 3) for j in (0, 1, 2) for k in (0, 1) for l in range(4)]
    return list(ctx.rows.values()) + fam


FAMILY_KEYS = [(i, j, k, l) for i in (1, 2) for j in (0, 1) for k in (0, 1) for l in range(4)]
SPHERE_TARGETS = {"eta^3": Target("sphere:eta^3", "eta^3", 3, Claim("nu^3", -6))}


# ---------------------------------------------------------------- context

@dataclass
class Context:
    adams: AdamsData
    seeds: SeedTable
    run: AHSSRun
    view: Window
    rows: dict[int, Target]

    @property
    def ring(self) -> TmfRingData:
        return self.run.ring

    def target(self, key: str) -> Target:
        kind, _, rest = key.partition(":")
        if kind == "row":
            i = int(rest)
            if 0 <= i < 32:
                return self.rows[i]
            return periodic_target(self, i)
        if kind == "fam" and len(rest.split(",")) == 4:
            return family_target(*map(int, rest.split(",")))
        if kind == "sphere" and rest in SPHERE_TARGETS:
            return SPHERE_TARGETS[rest]
        raise KeyError(f"unknown target {key!r}")

    # tmf-side helpers
    def tmf_terms(self, name: str) -> frozenset[str]:
        return frozenset(self.ring.resolve(m.ascii()) for m in parse_sum(name) if self.ring.layer(self.ring.resolve(m.ascii())))

    def tmf_times(self, name: str, factor: str) -> str:
        out: set[str] = set()
        for a in parse_sum(name):
            for b in parse_sum(factor):
                c = self.ring.resolve((a * b).ascii())
                if self.ring.layer(c) is not None:
                    out ^= {c}
        return " + ".join(sorted(out)) or "0"

    def tmf_af(self, name: str) -> int | None:
        afs = [self.ring.af(t) for t in self.tmf_terms(name)]
        return None if not afs or None in afs else min(afs)

    def survives(self, c: Claim) -> bool:
        return bool(self.tmf_terms(c.name)) and self.run.survives(" + ".join(sorted(self.tmf_terms(c.name))), c.s, view=self.view)


def load_context(ring: TmfRingData | None = None, adams_path=None, seeds_path=None, rows_path=None,
                 pins_path=None, view: Window = VERIFY_VIEW) -> Context:
    adams = load_adams_data(adams_path)
    bad = adams.cross_check(load_pins(pins_path or DEFAULT_PINS).get(2, {}))
    if bad:
        raise ScriptError(None, "adams data disagrees with pins: " + "; ".join(bad))
    return Context(adams, load_seeds(adams, seeds_path), run_ahss(ring, view=view), view, load_rows(rows_path))


# ---------------------------------------------------------------- scripts

@dataclass(frozen=True)
class Step:
    kind: str
    args: dict[str, str]
    flags: frozenset[str]
    claim: str
    line: int

    def __str__(self) -> str:
        a = " ".join([f"{k}={v}" for k, v in self.args.items()] + sorted(self.flags))
        return f"{self.kind} {a} => {self.claim}".replace("  ", " ")


@dataclass(frozen=True)
class Script:
    key: str
    steps: tuple[Step, ...]


def parse_script(text: str) -> Script:
    key = None
    steps = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head in ("row", "family", "sphere") and key is None:
            key = {"row": "row:", "family": "fam:", "sphere": "sphere:"}[head] + ",".join(rest.split())
            continue
        if head != "step":
            raise ScriptError(no, f"expected 'step', got {head!r}")
        body, arrow, claim = rest.partition("=>")
        if not arrow:
            raise ScriptError(no, "missing '=> <claim>'")
        words = body.split()
        if not words or words[0] not in KINDS:
            raise ScriptError(no, f"unknown step kind {words[0] if words else ''!r}")
        args, flags = {}, set()
        for w in words[1:]:
            k, eq, v = w.partition("=")
            if eq:
                args[k] = v
            else:
                flags.add(w)
        steps.append(Step(words[0], args, frozenset(flags), claim.strip(), no))
    if key is None:
        raise ScriptError(None, "script names no target (first line 'row <i>', 'family i j k l' or 'sphere <x>')")
    return Script(key, tuple(steps))


def load_script(path: str | Path) -> Script:
    return parse_script(Path(path).read_text())


# ---------------------------------------------------------------- state and checks

@dataclass(frozen=True)
class State:
    target: Target
    kind: str | None = None       # "adams", "tmf" or None once the approximation dies
    name: str | None = None
    s: int | None = None
    k: int | None = None          # the M^[k] label
    seed: tuple[str, int, int] | None = None
    lower: int | None = None
    upper: int | None = None
    floor: int | None = None
    relaxed: bool = False
    flags: tuple[str, ...] = ()
    result: Claim | None = None

    def flag(self, f: str) -> "State":
        return replace(self, flags=self.flags + (f,))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str
    state: State

    def __str__(self) -> str:
        return "accept" if self.ok else f"reject({self.reason})"


class Reject(Exception):
    pass


def _need(cond: bool, why: str) -> None:
    if not cond:
        raise Reject(why)


def _claim(step: Step) -> Claim:
    try:
        return parse_claim(step.claim)
    except ValueError as exc:
        raise Reject(str(exc)) from None


def check_step(step: Step, state: State, ctx: Context) -> Verdict:
    """Accept the step and return the advanced state, or reject naming the first failed check."""
    try:
        new, evidence = _CHECKS[step.kind](step, state, ctx)
        return Verdict(True, evidence, new)
    except Reject as exc:
        return Verdict(False, str(exc), state)
    except (KeyError, ValueError) as exc:
        return Verdict(False, f"bad datum: {exc}", state)


def _seed(step: Step, st: State, ctx: Context):
    x = step.args.get("x")
    _need(x is not None, "AlgebraicSeed needs x=<Ext_{A(1)} class>")
    x = _bo_fmt(_bo_exps(x))
    _need(x == st.target.x, f"seed input {x} is not the target input {st.target.x}")
    try:
        value = ctx.seeds.value(x)
    except KeyError as exc:
        raise Reject(str(exc.args[0])) from None
    c = _claim(step)
    _need(ctx.adams.alg.canonical(c.name) == value, f"M^alg({x}) = {value}, not {c.name}")
    stem, af = ctx.adams.stem(value), ctx.adams.af(value)
    _need(c.s == st.target.n - stem, f"cell of {value} is {st.target.n - stem}, not {c.s}")
    _need(c.s <= 0, f"seed cell {c.s} is positive")
    return replace(st, kind="adams", name=value, s=c.s, k=af, seed=(value, c.s, af)), f"M^[{af}] = {value}[{c.s}]"


def _lift(step: Step, st: State, ctx: Context):
    _need(st.kind == "adams", "AdamsLift needs a current Adams class")
    adams = ctx.adams
    d = ctx.adams.differential(st.name)
    if step.claim == "dead":
        if "nonpermanent" in step.flags:
            _need(adams.is_nonpermanent(st.name), f"{st.name} is not known to support a differential")
            return replace(st, kind=None, name=None), f"{st.name} is not a permanent cycle"
        r = int(step.args.get("d", "0"))
        _need(d is not None and d[0] == r, f"no Adams differential d{r}({st.name})")
        return replace(st, kind=None, name=None), f"d{r}({st.name}) = {d[1]}"
    r = int(step.args.get("d", "0"))
    _need(d is not None, f"no Adams differential on {st.name}")
    _need(d[0] == r, f"the differential on {st.name} is d{d[0]}, not d{r}")
    y = d[1]
    sx, ax, sy, ay = adams.stem(st.name), adams.af(st.name), adams.stem(y), adams.af(y)
    _need(sy == sx - 1 and ay == ax + r, f"d{r}({st.name}) = {y} does not shift (s, t-s) by ({r}, -1)")
    c = _claim(step)
    z = adams.alg.canonical(c.name)
    sz = adams.stem(z)
    _need(sz + c.s == sx + st.s, f"{z}[{c.s}] has total degree {sz + c.s}, expected {sx + st.s}")
    _need(adams.af(z) <= ay, f"af({z}) = {adams.af(z)} exceeds af({y}) = {ay}")
    _need(sy - sz == c.s - st.s - 1, f"attaching map from cell {c.s} to {st.s} cannot carry {z} to {y}")
    return replace(st, name=z, s=c.s, k=st.k + r), f"d{r}({st.name}) = {y}; M^[{st.k + r}] = {z}[{c.s}]"


def _tmf_from_adams(ctx: Context, name: str) -> str | None:
    hit = ctx.adams.detected(name)
    if hit is None:
        return None
    tmf, a, b = hit
    factor = ".".join(p for p in (f"c4^{a}" if a else "", f"D^{b}" if b else "") if p)
    return ctx.tmf_times(tmf, factor) if factor else ctx.tmf_times(tmf, "1")


def _transfer(step: Step, st: State, ctx: Context):
    _need(st.kind == "adams", "BracketTransfer needs a current Adams class")
    tmf = _tmf_from_adams(ctx, st.name)
    _need(tmf is not None and tmf != "0", f"no homotopy class detected by {st.name}")
    c = _claim(step)
    _need(c.s == st.s, f"transfer keeps the cell {st.s}, claim has {c.s}")
    _need(ctx.tmf_terms(c.name) == ctx.tmf_terms(tmf), f"{st.name} detects {tmf}, not {c.name}")
    _need(name_degree(next(iter(ctx.tmf_terms(tmf)))) == ctx.adams.stem(st.name), "stem mismatch")
    return replace(st, kind="tmf", name=tmf), f"{st.name} detects {tmf}"


def _divides(a: Target, b: Target) -> bool:
    """Does the bo input of a divide that of b?  Table rows and family members share Ext_{A(1)}."""
    if "sphere" in (a.key.split(":")[0], b.key.split(":")[0]):
        return False
    ea, eb = _bo_exps(a.x), _bo_exps(b.x)
    return all(ea[g] <= eb[g] for g in BO_GENS)


def _bound(step: Step, st: State, ctx: Context):
    n = st.target.n
    m = re.fullmatch(r"s\s*(<=|>=)\s*(-?\d+)", step.claim)
    _need(m is not None, "DimensionBound claims 's<=<cell>' or 's>=<cell>'")
    op, val = m.group(1), int(m.group(2))
    kind = st.target.key.split(":")[0]
    ref = lambda k: ctx.target(k if ":" in k else f"{kind}:{k}")  # noqa: E731
    if "from" in step.args:
        other = ref(step.args["from"])
        _need(op == "<=", "a divisor gives an upper cell bound")
        _need(_divides(other, st.target), f"{other.x} does not divide {st.target.x}")
        bound = n - name_degree(other.claim.name)
        _need(val == bound, f"|M({other.x})| = {name_degree(other.claim.name)} gives s <= {bound}")
        floor = ctx.tmf_af(other.claim.name)
        upper = bound if st.upper is None else min(st.upper, bound)
        new = replace(st, upper=upper, floor=max(floor, st.floor or 0))
        return new, f"M({st.target.x}) >= |{other.claim}|, af >= {floor}"
    if "below" in step.args:
        other = ref(step.args["below"])
        _need(op == ">=", "a multiple gives a lower cell bound")
        _need(_divides(st.target, other), f"{st.target.x} does not divide {other.x}")
        bound = n - name_degree(other.claim.name)
        _need(val == bound, f"|M({other.x})| = {name_degree(other.claim.name)} gives s >= {bound}")
        lower = bound if st.lower is None else max(st.lower, bound)
        return replace(st, lower=lower), f"M({st.target.x}) <= |{other.claim}|"
    if "external" in step.args:
        name = step.args["external"]
        _need(op == "<=", "an external dimension bound is an upper cell bound")
        bound = n - name_degree(name)
        _need(val == bound, f"|{name}| gives s <= {bound}")
        upper = bound if st.upper is None else min(st.upper, bound)
        return replace(st, upper=upper).flag(f"external-bound:{name}"), f"external fact: dim M({st.target.x}) >= |{name}|"
    raise Reject("DimensionBound needs from=, below= or external=")


def _shift(step: Step, st: State, ctx: Context):
    _need(st.seed is not None, "BifiltrationShift needs a seed")
    op = step.args.get("op")
    _need(op in ("2", "eta"), "op must be 2 or eta")
    base = parse_claim(step.args.get("base", ""))
    seed, seed_s, seed_af = st.seed
    detected = _tmf_from_adams(ctx, seed)
    _need(detected is not None and ctx.tmf_terms(detected) == ctx.tmf_terms(base.name) and base.s == seed_s,
          f"base {base} is not the class detected by the seed {seed}[{seed_s}]")
    c = _claim(step)
    prod = ctx.tmf_times(base.name, op)
    _need(prod != "0" and ctx.tmf_terms(prod) == ctx.tmf_terms(c.name), f"{op} * {base.name} = {prod}, not {c.name}")
    _need(c.s == base.s - name_degree(op), f"cell must be {base.s - name_degree(op)}")
    if "via" in step.args:
        r = int(step.args["via"].lstrip("d"))
        d = ctx.adams.differential(seed)
        _need(d is not None and d[0] == r, f"no d{r} on the seed {seed}")
        k = seed_af + r
    else:
        _need(st.kind == "tmf" and not ctx.survives(Claim(st.name, st.s)),
              "the current approximation must be a dead AHSS class")
        k = st.k
    af = ctx.tmf_af(c.name)
    _need(af is not None and af >= k, f"af({c.name}) = {af} is below {k}")
    _need(ctx.survives(c), f"{c} does not survive to E8")
    return replace(st, kind="tmf", name=c.name, s=c.s, k=k), f"{op} * {base} moves to {c} at M^[{k}]"


def _v2_family_shape(name: str) -> bool:
    terms = parse_sum(name)
    if len(terms) != 1:
        return False
    m = next(iter(terms))
    e = dict(zip(GENERATORS, m.exps))
    if any(e[g] for g in GENERATORS if g not in ("eta", "c4", "c6", "D")):
        return False
    if e["c6"] == 0:
        return m.two == 0 and e["c4"] >= 1 and e["eta"] <= 2
    return e["c6"] == 1 and m.two == 1 and e["eta"] == 0


def _exclusion(step: Step, st: State, ctx: Context):
    c = _claim(step)
    _need(ctx.survives(c), f"{c} does not survive to E8")
    t = name_degree(next(iter(ctx.tmf_terms(c.name)))) + c.s
    caf = ctx.tmf_af(c.name)
    flags = list(st.flags)
    for d in filter(None, step.args.get("dead", "").split(";")):
        dc = parse_claim(d)
        _need(not ctx.survives(dc), f"{dc} survives to E8")
    bounded = st.lower is not None or st.upper is not None
    equal = st.kind == "tmf" and st.s == c.s and ctx.tmf_terms(st.name) == ctx.tmf_terms(c.name)
    if not equal:
        if bounded:
            _need((st.lower is None or c.s >= st.lower) and (st.upper is None or c.s <= st.upper),
                  f"{c} lies outside the cell bounds [{st.lower}, {st.upper}]")
            _need(caf is not None and caf >= (st.floor if st.floor is not None else -1), f"af({c.name}) = {caf} below the floor {st.floor}")
        else:
            _need(st.k is not None and caf is not None and caf > st.k, f"af({c.name}) = {caf} is not above M^[{st.k}]")
            _need(st.s is not None and c.s > st.s, f"{c} is not in a higher cell than {st.s}")
    lo = st.lower if st.lower is not None else (st.s + 1 if st.s is not None else ctx.view.s_lo)
    hi = 0 if st.upper is None else min(0, st.upper)
    floor = st.floor if bounded and not equal else None
    above = st.k if floor is None else None

    def af_ok(a: int | None) -> bool:
        return a is None or ((floor is None or a >= floor) and (above is None or a > above))
    relaxed = "relaxed" in step.flags or st.relaxed
    if relaxed:
        flags.append("relaxed")
    mode = step.args.get("mode", "unique")
    _need(mode in ("unique", "first"), f"unknown mode {mode!r}")

    consumers: list[Claim] = []
    for key in filter(None, step.args.get("by", "").split(";")):
        if key == "known":
            consumers += [t.claim for t in known_targets(ctx) if t.key != st.target.key]
            continue
        key = key if ":" in key else f"{st.target.key.split(':')[0]}:{key}"
        consumers.append(ctx.target(key).claim)
    externals = [parse_claim(e) for e in filter(None, step.args.get("external", "").split(";"))]
    if externals:
        flags.append("external:" + ";".join(map(str, externals)))
    v2_row = st.target.key.startswith("row:")

    page = ctx.run.e8
    ring = ctx.ring
    for s in range(lo, hi + 1):
        rs, rt = ctx.run.reduce(s, t, ctx.view)
        names = page.basis.get((rs, rt), [])
        span = [b for b in page.B.get((rs, rt), [])]
        others = [x for x in consumers] + [x for x in externals if x.s == s]
        for x in others:
            v = page.vector(rs, rt, " + ".join(sorted(ctx.tmf_terms(x.name))), ring) if ctx.tmf_terms(x.name) else None
            if v:
                span.append(v)
        if s == c.s:
            span.append(page.vector(rs, rt, " + ".join(sorted(ctx.tmf_terms(c.name))), ring))
        if v2_row:
            span += [1 << i for i, nm in enumerate(names) if _v2_family_shape(nm)]
        red = RowReducer()
        for v in span:
            red.add(v)
        for v in page.classes(rs, rt):
            label = page.label(rs, rt, v)
            a = ring.af(label)
            if not af_ok(a) or (relaxed and a is not None and caf is not None and a > caf):
                continue
            if mode == "first" and s <= c.s:
                continue
            if not red.contains(v):
                raise Reject(f"unconsumed survivor {label}[{s}] (af {a}) in the box")
    new = replace(st, kind="tmf", name=c.name, s=c.s, result=c, flags=tuple(flags))
    return new, f"box t={t}, s in [{lo}, {hi}], all other survivors consumed"


def _periodic(step: Step, st: State, ctx: Context):
    src = step.args.get("from")
    _need(src is not None, "PeriodicityExtend needs from=<row>")
    base = ctx.target(src)
    i, j = int(st.target.key[4:]), int(base.key[4:])
    m, rem = divmod(i - j, 32)
    _need(rem == 0 and m > 0, f"row {i} is not a D^8-translate of row {j}")
    c = _claim(step)
    want = formal_times(base.claim.name, f"D^{8 * m}")
    _need(parse_sum(c.name) == parse_sum(want), f"D^{8 * m} * {base.claim.name} = {want}, not {c.name}")
    _need(c.s == base.claim.s - 128 * m, f"cell must be {base.claim.s - 128 * m}")
    return replace(st, kind="tmf", name=c.name, s=c.s, result=c), f"D^{8 * m} * {base.claim}"


_CHECKS = {
    "AlgebraicSeed": _seed,
    "AdamsLift": _lift,
    "BracketTransfer": _transfer,
    "AHSSExclusion": _exclusion,
    "DimensionBound": _bound,
    "BifiltrationShift": _shift,
    "PeriodicityExtend": _periodic,
}


# ---------------------------------------------------------------- reports

@dataclass
class Report:
    key: str
    lines: list[tuple[int, Step, Verdict]] = field(default_factory=list)
    final: Claim | None = None
    expected: Claim | None = None
    flags: tuple[str, ...] = ()
    audit: str = "ok"

    @property
    def ok(self) -> bool:
        return all(v.ok for _, _, v in self.lines) and self.final is not None and self.final == self.expected

    def tsv(self) -> str:
        out = []
        for no, step, v in self.lines:
            out.append("\t".join([self.key, str(no), step.kind, "accept" if v.ok else "reject", step.claim, v.reason]))
        summary = "pass" if self.ok else "fail"
        out.append("\t".join([self.key, "summary", summary, str(self.final or "-"), str(self.expected or "-"),
                              ",".join(self.flags + ((f"audit:{self.audit}",) if self.audit != "ok" else ())) or "-"]))
        return "\n".join(out)


TSV_HEADER = "key\tstep\tkind\tverdict\tclaim\tevidence"


def stem_audit(t: Target) -> str:
    """n = |claim| + cell, the degree bookkeeping every row must satisfy."""
    total = name_degree(t.claim.name) + t.claim.s
    return "ok" if total == t.n else f"input stem {t.n} but |claim| + cell = {total}"


def verify_script(script: Script, ctx: Context) -> Report:
    target = ctx.target(script.key)
    report = Report(script.key, expected=target.claim, audit=stem_audit(target))
    st = State(target)
    for no, step in enumerate(script.steps, 1):
        v = check_step(step, st, ctx)
        report.lines.append((no, step, v))
        if not v.ok:
            break
        st = v.state
    else:
        report.final = st.result
    report.flags = st.flags
    return report


def verify_row(i: int, script: Script, ctx: Context) -> Report:
    if script.key != f"row:{i}":
        rep = Report(f"row:{i}", expected=ctx.target(f"row:{i}").claim)
        rep.lines.append((0, Step("AlgebraicSeed", {}, frozenset(), "-", 0),
                          Verdict(False, f"script covers {script.key}, not row {i}", State(ctx.target(f"row:{i}")))))
        return rep
    return verify_script(script, ctx)


def formal_times(name: str, factor: str) -> str:
    """Monomial product, without consulting the ring data (which stops at degree 192)."""
    out: set[str] = set()
    for a in parse_sum(name):
        for b in parse_sum(factor):
            out ^= {(a * b).ascii()}
    return " + ".join(sorted(out)) or "0"


def periodic_target(ctx: Context, i: int) -> Target:
    m, j = divmod(i, 32)
    base = ctx.rows[j]
    x = bo_row_class(i)
    name = formal_times(base.claim.name, f"D^{8 * m}") if m else base.claim.name
    return Target(f"row:{i}", x, bo_stem(x), Claim(name, base.claim.s - 128 * m))


def extend_periodically(i: int, ctx: Context) -> Report:
    """Row i >= 32 from row i mod 32 through the D^8 periodicity."""
    j = i % 32
    target = periodic_target(ctx, i)
    script = Script(f"row:{i}", (Step("PeriodicityExtend", {"from": f"row:{j}"}, frozenset(), str(target.claim), 1),))
    return verify_script(script, ctx)


def script_paths(directory: str | Path | None = None) -> list[Path]:
    d = Path(directory or DATA / "scripts")
    return sorted(p for p in d.rglob("*.txt"))


def verify_all(ctx: Context, directory: str | Path | None = None, extend_to: int = 64) -> list[Report]:
    scripts = {}
    for p in script_paths(directory):
        s = load_script(p)
        scripts[s.key] = s
    reports = []
    for i in ROW_ORDER:
        key = f"row:{i}"
        if key in scripts:
            reports.append(verify_row(i, scripts.pop(key), ctx))
        else:
            rep = Report(key, expected=ctx.rows[i].claim)
            rep.lines.append((0, Step("AlgebraicSeed", {}, frozenset(), "-", 0),
                              Verdict(False, "no script", State(ctx.rows[i]))))
            reports.append(rep)
    for key in sorted(scripts):
        reports.append(verify_script(scripts[key], ctx))
    for i in range(32, extend_to + 1):
        reports.append(extend_periodically(i, ctx))
    return reports


def main(argv: list[str] | None = None) -> int:
    ctx = load_context()
    reports = verify_all(ctx, argv[0] if argv else None)
    print(TSV_HEADER)
    for r in reports:
        print(r.tsv())
    return 0 if all(r.ok for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
