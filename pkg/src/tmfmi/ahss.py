"""Atiyah-Hirzebruch spectral sequence for tmf^{tC2}.

E1^{s,t} is a copy of pi_{t-s}(tmf) on every cell s.  The page is driven by
ingested ring data: additive generators of pi_*(tmf), the action of eta and
nu, and a table of Toda brackets.  Brackets are never computed.  A missing
entry is a zero differential, and every such lookup is logged.

Classes are formal monomials in eta, nu, eps, kappa, kbar, c4, c6, q, D (for
Delta) with a 2-power coefficient, written in ASCII as ``2.D^4.kbar``.  The
order of factors is irrelevant.  A parenthesised sum such as ``(c4+eps).D^2``
expands to a sum of monomials.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .f2linalg import RowReducer

log = logging.getLogger(__name__)

GENERATORS = ("eta", "nu", "eps", "kappa", "kbar", "c4", "c6", "q", "D")
DEGREE = {"eta": 1, "nu": 3, "eps": 8, "kappa": 14, "kbar": 20, "c4": 8, "c6": 12, "q": 32, "D": 24}
_PRETTY = {"eta": "η", "nu": "ν", "eps": "ε", "kappa": "κ", "kbar": "κ̄", "c4": "c₄", "c6": "c₆", "q": "q", "D": "Δ"}
_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
OPERATORS = {"2": 0, "eta": 1, "nu": 3}
N_MAX = 192


class RingDataError(ValueError):
    """A violation found while loading or validating ring data."""

    def __init__(self, line: int | None, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class AHSSInconsistency(RuntimeError):
    """A rule produced a value that does not live on the current page."""


# ---------------------------------------------------------------- names

@dataclass(frozen=True, order=True)
class Monomial:
    two: int  # coefficient 2^two
    exps: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(e * DEGREE[g] for g, e in zip(GENERATORS, self.exps))

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.two + other.two, tuple(a + b for a, b in zip(self.exps, other.exps)))

    def ascii(self) -> str:
        parts = [str(2 ** self.two)] if self.two else []
        for g, e in zip(GENERATORS, self.exps):
            if e:
                parts.append(g if e == 1 else f"{g}^{e}")
        return ".".join(parts) if parts else "1"

    def pretty(self) -> str:
        out = str(2 ** self.two) if self.two else ""
        for g, e in zip(GENERATORS, self.exps):
            if e:
                out += _PRETTY[g] + (str(e).translate(_SUP) if e > 1 else "")
        return out or "1"


ONE = Monomial(0, (0,) * len(GENERATORS))


def _split(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        depth += (ch == "(") - (ch == ")")
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def _factor(tok: str) -> frozenset[Monomial]:
    if tok.startswith("(") and tok.endswith(")"):
        return parse_sum(tok[1:-1])
    if tok.isdigit():
        k = int(tok)
        if k & (k - 1):
            raise ValueError(f"coefficient {k} is not a power of 2")
        return frozenset({Monomial(k.bit_length() - 1, ONE.exps)})
    m = re.fullmatch(r"(\d*)([A-Za-z][A-Za-z0-9]*?)(?:\^(\d+))?", tok)
    if not m or m.group(2) not in DEGREE:
        raise ValueError(f"unknown factor {tok!r}")
    coef = int(m.group(1)) if m.group(1) else 1
    if coef & (coef - 1):
        raise ValueError(f"coefficient {coef} is not a power of 2")
    exps = [0] * len(GENERATORS)
    exps[GENERATORS.index(m.group(2))] = int(m.group(3) or 1)
    return frozenset({Monomial(coef.bit_length() - 1, tuple(exps))})


def _times(a: frozenset[Monomial], b: frozenset[Monomial]) -> frozenset[Monomial]:
    out: set[Monomial] = set()
    for x in a:
        for y in b:
            out ^= {x * y}
    return frozenset(out)


def parse_sum(text: str) -> frozenset[Monomial]:
    """Parse a name into an F2-sum of monomials ("0" is the empty sum)."""
    text = text.replace(" ", "").replace("*", ".")
    if text in ("", "0"):
        return frozenset()
    total: set[Monomial] = set()
    for term in _split(text, "+"):
        acc = frozenset({ONE})
        for tok in _split(term, "."):
            if tok != "1":
                acc = _times(acc, _factor(tok))
        total ^= set(acc)
    return frozenset(total)


def canonical(text: str) -> str:
    """Canonical ASCII form of a single monomial name."""
    terms = parse_sum(text)
    if len(terms) != 1:
        raise ValueError(f"{text!r} is not a single monomial")
    return next(iter(terms)).ascii()


def pretty(text: str) -> str:
    terms = sorted(parse_sum(text))
    return " + ".join(m.pretty() for m in terms) if terms else "0"


def name_degree(text: str) -> int:
    degs = {m.degree for m in parse_sum(text)}
    if len(degs) != 1:
        raise ValueError(f"{text!r} is not homogeneous")
    return degs.pop()


# ---------------------------------------------------------------- ring data

@dataclass(frozen=True)
class Generator:
    name: str  # canonical
    degree: int
    order: int | None  # None for torsion-free
    af: int | None

    @property
    def length(self) -> int:
        """Number of F2 layers 2^j x in the associated graded (1 for free)."""
        return 1 if self.order is None else self.order.bit_length() - 1


@dataclass(frozen=True)
class Layer:
    """The F2 class 2^j * head."""
    head: str
    j: int
    name: str
    degree: int
    af: int | None

    @property
    def is_head(self) -> bool:
        return self.j == 0


@dataclass
class ExplicitDifferential:
    r: int
    modulus: int
    residues: tuple[int, ...]
    source: str
    target: str
    lemma: str


@dataclass
class TmfRingData:
    generators: dict[str, Generator] = field(default_factory=dict)
    aliases: dict[str, str] = field(default_factory=dict)
    mul: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    brackets: dict[tuple[str, tuple[str, ...]], str] = field(default_factory=dict)
    explicit: list[ExplicitDifferential] = field(default_factory=list)
    layers: dict[str, Layer] = field(default_factory=dict)
    n_max: int = N_MAX

    # -- lookups
    def resolve(self, name: str) -> str:
        c = canonical(name)
        return self.aliases.get(c, c)

    def layer(self, name: str) -> Layer | None:
        return self.layers.get(self.resolve(name))

    def by_degree(self, n: int) -> list[Generator]:
        if not hasattr(self, "_by_degree"):
            idx: dict[int, list[Generator]] = {}
            for g in sorted(self.generators.values(), key=lambda g: g.name):
                idx.setdefault(g.degree, []).append(g)
            self._by_degree = idx
        return self._by_degree.get(n, [])

    def af(self, text: str) -> int | None:
        """Adams filtration of a sum of classes: the minimum over its terms."""
        vals = []
        for m in parse_sum(text):
            lay = self.layer(m.ascii())
            if lay is None or lay.af is None:
                return None
            vals.append(lay.af)
        return min(vals) if vals else None

    def scale(self, name: str, k: int) -> str | None:
        """2^k times the layer ``name``, or None when it vanishes."""
        lay = self.layer(name)
        if lay is None:
            return None
        g = self.generators[lay.head]
        if g.order is not None and lay.j + k >= g.length:
            return None
        return self._layer_name(lay.head, lay.j + k) if g.order is not None else None if k else lay.name

    def _layer_name(self, head: str, j: int) -> str:
        if j == 0:
            return head
        m = next(iter(parse_sum(head)))
        c = Monomial(m.two + j, m.exps).ascii()
        return self.aliases.get(c, c)

    def product(self, op: str, name: str) -> frozenset[str]:
        """op * layer, with op in {eta, nu}; layers 2^j x use the table entry of x."""
        lay = self.layer(name)
        if lay is None:
            raise KeyError(name)
        base = self.mul.get((op, lay.head))
        if base is None:
            log.debug("no %s-multiplication entry for %s; taken as zero", op, lay.head)
            return frozenset()
        out: set[str] = set()
        for y in base:
            z = self.scale(y, lay.j)
            if z is not None:
                out ^= {z}
        return frozenset(out)

    def bracket(self, x: str, ops: tuple[str, ...]) -> str | None:
        return self.brackets.get((self.resolve(x), ops))


_DEG = re.compile(r"deg\s+(-?\d+)\s*:\s*(\S+)\s+order\s+(\S+)(?:\s+af\s+(\d+))?\s*$")
_MUL = re.compile(r"mul\s+(2|eta|nu)\s+(\S+)\s*=\s*(.+?)\s*$")
_BR = re.compile(r"bracket\s+(.+?)\s*=\s*(\S+)\s*$")
_ALIAS = re.compile(r"alias\s+(\S+)\s*=\s*(\S+)\s*$")
_EXPL = re.compile(r"explicit\s+d(\d+)\s+([\d,]+)\s+mod\s+(\d+)\s*:\s*(\S+)\s*->\s*(\S+)\s*(?:;\s*(.*))?$")


def parse_ring_data(text: str) -> TmfRingData:
    ring = TmfRingData()
    pending_mul, pending_br, pending_ex = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _DEG.match(line):
                t, name, order, af = int(m.group(1)), m.group(2), m.group(3), m.group(4)
                c = canonical(name)
                if c in ring.generators:
                    raise RingDataError(lineno, f"duplicate generator {c}")
                if name_degree(c) != t:
                    raise RingDataError(lineno, f"{c} has degree {name_degree(c)}, listed in {t}")
                if order == "free":
                    o = None
                else:
                    o = int(order)
                    if o < 2 or o & (o - 1):
                        raise RingDataError(lineno, f"order {order} is not a power of 2")
                ring.generators[c] = Generator(c, t, o, int(af) if af else None)
            elif m := _ALIAS.match(line):
                a, b = canonical(m.group(1)), canonical(m.group(2))
                if name_degree(a) != name_degree(b):
                    raise RingDataError(lineno, f"alias {a} = {b} changes degree")
                ring.aliases[a] = b
            elif m := _MUL.match(line):
                pending_mul.append((lineno, m.group(1), m.group(2), m.group(3)))
            elif m := _BR.match(line):
                pending_br.append((lineno, m.group(1), m.group(2)))
            elif m := _EXPL.match(line):
                pending_ex.append((lineno, m))
            else:
                raise RingDataError(lineno, f"cannot parse {line!r}")
        except ValueError as e:
            if isinstance(e, RingDataError):
                raise
            raise RingDataError(lineno, str(e)) from None
    if not ring.generators:
        raise RingDataError(None, "no generators")
    _build_layers(ring)
    for lineno, op, x, y in pending_mul:
        _add_mul(ring, lineno, op, x, y)
    for lineno, lhs, val in pending_br:
        _add_bracket(ring, lineno, lhs, val)
    for lineno, m in pending_ex:
        _add_explicit(ring, lineno, m)
    return ring


def _build_layers(ring: TmfRingData) -> None:
    for g in ring.generators.values():
        m = next(iter(parse_sum(g.name)))
        for j in range(g.length):
            c = Monomial(m.two + j, m.exps).ascii()
            name = ring.aliases.get(c, c)
            if name in ring.layers:
                raise RingDataError(None, f"layer {name} of {g.name} collides with another class")
            ring.layers[name] = Layer(g.name, j, name, g.degree, None if g.af is None else g.af + j)
    for a, b in ring.aliases.items():
        if b not in ring.layers:
            raise RingDataError(None, f"alias target {b} is not a class")


def _known(ring: TmfRingData, lineno: int, name: str) -> str:
    c = ring.resolve(name)
    if c not in ring.layers:
        raise RingDataError(lineno, f"unknown class {name}")
    return c


def _add_mul(ring: TmfRingData, lineno: int, op: str, x: str, y: str) -> None:
    xc = _known(ring, lineno, x)
    if ring.layers[xc].j:
        raise RingDataError(lineno, f"multiplication entries are given on generators, not on {xc}")
    vals = frozenset(_known(ring, lineno, m.ascii()) for m in parse_sum(y))
    for v in vals:
        if ring.layers[v].degree != ring.layers[xc].degree + OPERATORS[op]:
            raise RingDataError(lineno, f"{op}*{xc} = {v} lands in the wrong degree")
    if op == "2":
        expect = ring.scale(xc, 1)
        if vals != (frozenset({expect}) if expect else frozenset()):
            raise RingDataError(lineno, f"2*{xc} disagrees with the stated order")
        return
    ring.mul[(op, xc)] = vals


def _add_bracket(ring: TmfRingData, lineno: int, lhs: str, val: str) -> None:
    parts = [p.strip() for p in lhs.split(",")]
    if len(parts) not in (3, 4):
        raise RingDataError(lineno, f"bracket needs 3 or 4 entries: {lhs}")
    x = _known(ring, lineno, parts[0])
    ops = tuple(parts[1:])
    for o in ops:
        if o not in OPERATORS:
            raise RingDataError(lineno, f"bracket operand {o} must be one of 2, eta, nu")
    v = _known(ring, lineno, val)
    want = ring.layers[x].degree + sum(OPERATORS[o] for o in ops) + len(ops) - 1
    if ring.layers[v].degree != want:
        raise RingDataError(lineno, f"bracket value {v} has degree {ring.layers[v].degree}, expected {want}")
    ring.brackets[(x, ops)] = v


def _add_explicit(ring: TmfRingData, lineno: int, m: re.Match) -> None:
    r, residues, mod = int(m.group(1)), tuple(int(x) for x in m.group(2).split(",")), int(m.group(3))
    src, tgt = _known(ring, lineno, m.group(4)), _known(ring, lineno, m.group(5))
    if ring.layers[tgt].degree != ring.layers[src].degree + r - 1:
        raise RingDataError(lineno, f"d{r}({src}) = {tgt} breaks the (-r, -1) shift")
    ring.explicit.append(ExplicitDifferential(r, mod, residues, src, tgt, (m.group(6) or "").strip()))


DEFAULT_RING = "tmf_ring.txt"


def load_ring_data(path: str | Path | None = None) -> TmfRingData:
    if path is None:
        text = resources.files("tmfmi").joinpath("data", DEFAULT_RING).read_text()
    else:
        text = Path(path).read_text()
    return parse_ring_data(text)


def validate_names(ring: TmfRingData, names: list[str]) -> None:
    """Every name (possibly a sum) must resolve to classes of the ring data."""
    for nm in names:
        for m in parse_sum(nm):
            if ring.resolve(m.ascii()) not in ring.layers:
                raise RingDataError(None, f"name {nm} refers to the unknown class {m.ascii()}")


# ---------------------------------------------------------------- rules

@dataclass(frozen=True)
class DifferentialRule:
    r: int
    modulus: int
    residues: tuple[int, ...]
    effect: str  # "multiply" | "bracket" | "none"
    operands: tuple[str, ...] = ()

    def applies(self, s: int) -> bool:
        return s % self.modulus in self.residues


RULES: tuple[DifferentialRule, ...] = (
    DifferentialRule(2, 4, (1, 2), "multiply", ("eta",)),
    DifferentialRule(3, 4, (3,), "bracket", ("2", "eta")),
    DifferentialRule(3, 4, (1,), "bracket", ("eta", "2")),
    DifferentialRule(4, 8, (1, 2, 3, 4), "multiply", ("nu",)),
    DifferentialRule(5, 1, (0,), "none"),
    DifferentialRule(6, 8, (5, 6), "bracket", ("eta", "nu")),
    DifferentialRule(6, 8, (1, 2), "bracket", ("nu", "eta")),
    DifferentialRule(7, 8, (7,), "bracket", ("2", "eta", "nu")),
    DifferentialRule(7, 8, (1,), "bracket", ("nu", "eta", "2")),
)


def nu2(r: int) -> int:
    return (r & -r).bit_length() - 1


@dataclass(frozen=True)
class ExplicitInstance:
    r: int
    s: int
    source: str
    target: str
    lemma: str


def expand_periodicity(entries: list[ExplicitDifferential], window: tuple[int, int],
                       ring: TmfRingData | None = None) -> list[ExplicitInstance]:
    """Replicate explicit entries across the s-window.

    Entries repeat with period 2^{nu_2(r)} from any admissible cell, and the
    congruence of the listing lemma then filters the copies.  Delta^8
    multiples are added when they fit under the ring data's degree bound.
    """
    lo, hi = window
    out: list[ExplicitInstance] = []
    for e in entries:
        pairs = [(e.source, e.target)]
        if ring is not None:
            d8 = Monomial(0, tuple(8 if g == "D" else 0 for g in GENERATORS))
            k = 1
            while ring.layers[e.target].degree + 192 * k <= ring.n_max:
                shifted = tuple((next(iter(parse_sum(x))) * Monomial(0, tuple(v * k for v in d8.exps))).ascii()
                                for x in (e.source, e.target))
                if all(ring.resolve(x) in ring.layers for x in shifted):
                    pairs.append(tuple(ring.resolve(x) for x in shifted))
                k += 1
        period = 2 ** nu2(e.r)
        base = next((s for s in range(lo, lo + e.modulus) if s % e.modulus in e.residues), None)
        if base is None:
            continue
        for s in range(base - ((base - lo) // period) * period, hi + 1, period):
            if s % e.modulus in e.residues:
                for src, tgt in pairs:
                    out.append(ExplicitInstance(e.r, s, src, tgt, e.lemma))
    return out


def check_d5(ring: TmfRingData) -> None:
    """No d5 can occur: pi_4 = 0, <x, nu, 2> is undefined and <x, eta, 2, eta> vanishes."""
    for (_, ops) in ring.brackets:
        if ops in (("nu", "2"), ("eta", "2", "eta")):
            raise AHSSInconsistency(f"bracket table has a d5-type entry {ops}")


# ---------------------------------------------------------------- pages

@dataclass(frozen=True)
class Window:
    s_lo: int
    s_hi: int
    t_lo: int
    t_hi: int

    def bidegrees(self, ring: TmfRingData):
        for s in range(self.s_lo, self.s_hi + 1):
            for t in range(self.t_lo, self.t_hi + 1):
                n = t - s
                if 0 <= n <= ring.n_max:
                    yield s, t

    def contains(self, s: int, t: int) -> bool:
        return self.s_lo <= s <= self.s_hi and self.t_lo <= t <= self.t_hi


@dataclass(frozen=True)
class Differential:
    r: int
    s: int
    t: int
    source: str
    target: str


@dataclass
class AHPage:
    r: int
    window: Window
    basis: dict[tuple[int, int], list[str]]  # E2 layers, shared by all pages
    Z: dict[tuple[int, int], list[int]]
    B: dict[tuple[int, int], list[int]]
    differentials: list[Differential] = field(default_factory=list)  # d_{r-1} that produced this page
    ranks_out: dict[tuple[int, int], int] = field(default_factory=dict)
    ranks_in: dict[tuple[int, int], int] = field(default_factory=dict)

    def dim(self, s: int, t: int) -> int:
        return len(self.Z.get((s, t), [])) - len(self.B.get((s, t), []))

    def vector(self, s: int, t: int, text: str, ring: TmfRingData) -> int | None:
        names = self.basis.get((s, t), [])
        v = 0
        for m in parse_sum(text):
            c = ring.resolve(m.ascii())
            if c not in names:
                return None
            v ^= 1 << names.index(c)
        return v

    def contains(self, s: int, t: int, text: str, ring: TmfRingData) -> bool:
        """Is the named sum a nonzero class of this page at (s, t)?"""
        v = self.vector(s, t, text, ring)
        if not v:
            return False
        z = RowReducer()
        for b in self.Z.get((s, t), []):
            z.add(b)
        if not z.contains(v):
            return False
        bd = RowReducer()
        for b in self.B.get((s, t), []):
            bd.add(b)
        return not bd.contains(v)

    def classes(self, s: int, t: int) -> list[int]:
        """A basis of Z/B given as representatives reduced against B."""
        bd = RowReducer()
        for b in self.B.get((s, t), []):
            bd.add(b)
        out = []
        for z in self.Z.get((s, t), []):
            red = bd.reduce(z)[0]
            if red:
                bd.add(red)
                out.append(red)
        return out

    def label(self, s: int, t: int, v: int) -> str:
        names = self.basis[(s, t)]
        return " + ".join(names[k] for k in range(len(names)) if (v >> k) & 1)


def e2_page(ring: TmfRingData, window: Window) -> AHPage:
    """d1(x[s]) = 2x[s-1] for s odd, evaluated on groups: even cells keep
    pi/2pi, odd cells keep the elements of order 2."""
    basis, Z, B = {}, {}, {}
    for s, t in window.bidegrees(ring):
        n = t - s
        names = []
        for g in ring.by_degree(n):
            if s % 2 == 0:
                names.append(g.name)
            elif g.order is not None:
                names.append(ring._layer_name(g.name, g.length - 1))
        if names:
            basis[(s, t)] = names
            Z[(s, t)] = [1 << k for k in range(len(names))]
            B[(s, t)] = []
    return AHPage(2, window, basis, Z, B)


@dataclass
class RunLog:
    missing_brackets: list[tuple[int, int, str, tuple[str, ...]]] = field(default_factory=list)
    vanished: list[tuple[int, int, int, str, str]] = field(default_factory=list)  # (r, s, t, source, value)


def _value_vector(ring: TmfRingData, page: AHPage, s: int, t: int, value: str) -> tuple[int, list[str]]:
    """Vector of the E2 layer ``value`` at (s, t); parts that are not E2 classes
    there (2-divisible on even cells, not of order 2 on odd cells) vanish."""
    names = page.basis.get((s, t), [])
    v, dropped = 0, []
    lay = ring.layer(value)
    if lay is None:
        raise AHSSInconsistency(f"{value} is not a class")
    if lay.name in names:
        v ^= 1 << names.index(lay.name)
    else:
        dropped.append(lay.name)
    return v, dropped


def _rule_value(ring: TmfRingData, rule: DifferentialRule, name: str, s: int, log_: RunLog) -> list[str]:
    if rule.effect == "multiply":
        return sorted(ring.product(rule.operands[0], name))
    if rule.effect == "bracket":
        val = ring.bracket(name, rule.operands)
        if val is None:
            log_.missing_brackets.append((rule.r, s, name, rule.operands))
            return []
        return [val]
    return []


def run_page(page: AHPage, ring: TmfRingData, rules: tuple[DifferentialRule, ...] = RULES,
             log_: RunLog | None = None, strict: set[tuple[int, int, str]] | None = None) -> AHPage:
    """Apply d_r (r = page.r) and return E_{r+1}.

    ``strict`` holds (r, s, source) triples from explicit lists; for those a
    value that does not live on the page is an error instead of a zero.
    """
    r = page.r
    log_ = log_ if log_ is not None else RunLog()
    strict = strict or set()
    active = [ru for ru in rules if ru.r == r]
    if r == 5:
        check_d5(ring)
    Z = {k: list(v) for k, v in page.Z.items()}
    B = {k: list(v) for k, v in page.B.items()}
    diffs: list[Differential] = []
    out_rank: dict[tuple[int, int], int] = {}
    in_rank: dict[tuple[int, int], int] = {}
    images: dict[tuple[int, int], list[int]] = {}
    for (s, t), names in page.basis.items():
        rules_here = [ru for ru in active if ru.applies(s) and ru.effect != "none"]
        if not rules_here:
            continue
        tgt = (s - r, t - 1)
        if tgt not in page.basis or not page.window.contains(*tgt):
            continue
        reps = page.classes(s, t)
        if not reps:
            continue
        tnames = page.basis[tgt]
        bd = RowReducer()
        for b in page.B.get(tgt, []):
            bd.add(b)
        zt = RowReducer()
        for z in page.Z.get(tgt, []):
            zt.add(z)
        # value of d_r on each basis layer
        values: dict[int, int] = {}
        for k, nm in enumerate(names):
            v = 0
            for ru in rules_here:
                for val in _rule_value(ring, ru, nm, s, log_):
                    vec, dropped = _value_vector(ring, page, *tgt, val)
                    for d in dropped:
                        if (r, s, nm) in strict:
                            raise AHSSInconsistency(f"d{r}({nm}[{s}]) = {val}: not a class of E{r} at {tgt}")
                        log_.vanished.append((r, s, t, nm, d))
                    v ^= vec
            values[k] = v
        img = []
        for rep in reps:
            v = 0
            for k in range(len(names)):
                if (rep >> k) & 1:
                    v ^= values[k]
            if v and not zt.contains(v):
                raise AHSSInconsistency(f"d{r}({page.label(s, t, rep)}[{s}]) = "
                                        f"{' + '.join(tnames[k] for k in range(len(tnames)) if (v >> k) & 1)} "
                                        f"is not a d_{{<{r}}}-cycle")
            img.append(bd.reduce(v)[0])
        # kernel of reps -> target / B, and image rank
        ech = RowReducer()
        kernel, rows = [], []
        for rep, im in zip(reps, img):
            rest, combo = ech.reduce(im, rep)
            if rest:
                ech.add(rest, combo)
                rows.append((rest, combo))
            else:
                kernel.append(combo)
        rank = len(rows)
        if rank:
            out_rank[(s, t)] = rank
            in_rank[tgt] = rank
            images.setdefault(tgt, []).extend(b for b, _ in rows)
            for bim, bcombo in rows:
                diffs.append(Differential(r, s, t, page.label(s, t, bcombo), page.label(*tgt, bim)))
        Z[(s, t)] = list(page.B.get((s, t), [])) + kernel
    for tgt, ims in images.items():
        B[tgt] = B.get(tgt, []) + ims
    nxt = AHPage(r + 1, page.window, page.basis, Z, B, diffs, out_rank, in_rank)
    for key in page.basis:
        if nxt.dim(*key) != page.dim(*key) - out_rank.get(key, 0) - in_rank.get(key, 0):
            raise AHSSInconsistency(f"rank accounting fails at {key} on E{r}")
    return nxt


DEFAULT_WINDOW = Window(-164, 0, 0, 7)


@dataclass
class AHSSRun:
    ring: TmfRingData
    window: Window
    pages: dict[int, AHPage]
    log: RunLog
    explicit: list[ExplicitInstance]

    @property
    def e8(self) -> AHPage:
        return self.pages[8]

    def differentials(self, r: int) -> list[Differential]:
        return self.pages[r + 1].differentials

    def reduce(self, s: int, t: int, view: Window = DEFAULT_WINDOW) -> tuple[int, int]:
        """Translate (s, t) by a multiple of (8, 8) into the t-band of ``view``."""
        k = (t - view.t_lo) // 8
        return s - 8 * k, t - 8 * k

    def survives(self, name: str, s: int, page: int = 8, view: Window = DEFAULT_WINDOW) -> bool:
        """Is ``name[s]`` a nonzero class of E_page, read through the (8, 8) periodicity?"""
        t = name_degree(name) + s
        rs, rt = self.reduce(s, t, view)
        if not self.window.contains(rs, rt):
            raise ValueError(f"{name}[{s}] reduces to {(rs, rt)}, outside the computed window")
        return self.pages[page].contains(rs, rt, name, self.ring)

    def find_differential(self, r: int, s: int, source: str) -> Differential | None:
        src = self.ring.resolve(source)
        for d in self.pages[r + 1].differentials:
            if d.s == s and d.source == src:
                return d
        return None


def computation_window(view: Window, margin: int = 8) -> Window:
    """Pad the view so every class in it has its full history computed."""
    return Window(view.s_lo - 4 * margin, view.s_hi + 4 * margin, view.t_lo - margin, view.t_hi + 2 * margin)


def run_ahss(ring: TmfRingData | None = None, view: Window = DEFAULT_WINDOW, last: int = 8) -> AHSSRun:
    ring = ring or load_ring_data()
    win = computation_window(view)
    explicit = expand_periodicity(ring.explicit, (win.s_lo, win.s_hi), ring)
    strict = {(e.r, e.s, e.source) for e in explicit}
    log_ = RunLog()
    pages = {2: e2_page(ring, win)}
    for r in range(2, last):
        pages[r + 1] = run_page(pages[r], ring, RULES, log_, strict)
    return AHSSRun(ring, win, pages, log_, explicit)


def missing_explicit(run: AHSSRun, view: Window = DEFAULT_WINDOW) -> list[ExplicitInstance]:
    """Explicit-list instances inside ``view`` that the run does not reproduce."""
    bad = []
    for e in run.explicit:
        t = run.ring.layers[e.source].degree + e.s
        if not view.contains(e.s, t) or not view.contains(e.s - e.r, t - 1):
            continue
        d = run.find_differential(e.r, e.s, e.source)
        if d is None or d.target != e.target:
            bad.append(e)
    return bad


# ---------------------------------------------------------------- survivors

def lemma_j_shape(name: str) -> bool:
    """c4^i eta^j D^k (i >= 1, 1 <= j <= 3) or 2 c6 c4^i D^k (i >= 1)."""
    terms = parse_sum(name)
    if len(terms) != 1:
        return False
    m = next(iter(terms))
    e = dict(zip(GENERATORS, m.exps))
    others = [g for g in GENERATORS if e[g] and g not in ("eta", "c4", "c6", "D")]
    if others or e["c4"] < 1:
        return False
    if e["c6"] == 0:
        return m.two == 0 and 1 <= e["eta"] <= 3
    return e["c6"] == 1 and m.two == 1 and e["eta"] == 0


@dataclass(frozen=True)
class Survivor:
    s: int
    t: int
    name: str
    af: int | None
    permanent: bool


def survivors(run: AHSSRun, view: Window = DEFAULT_WINDOW, page: int = 8) -> list[Survivor]:
    P = run.pages[page]
    out = []
    for s in range(view.s_lo, view.s_hi + 1):
        for t in range(view.t_lo, view.t_hi + 1):
            for v in P.classes(s, t):
                nm = P.label(s, t, v)
                out.append(Survivor(s, t, nm, run.ring.af(nm), s < 0 and lemma_j_shape(nm)))
    return sorted(out, key=lambda x: (x.s, x.t, x.name))


def survivor_tsv(rows: list[Survivor]) -> str:
    lines = ["s\tt\tname\tpermanent"]
    lines += [f"{r.s}\t{r.t}\t{r.name}\t{int(r.permanent)}" for r in rows]
    return "\n".join(lines) + "\n"


def periodicity_defects(run: AHSSRun, view: Window = DEFAULT_WINDOW, page: int = 8) -> list[tuple[int, int]]:
    """Bidegrees (s, t) of the view whose E_page classes differ from those at (s+8, t+8)."""
    P = run.pages[page]
    bad = []
    for s in range(view.s_lo, view.s_hi + 1 - 8):
        for t in range(view.t_lo, view.t_hi + 1):
            a = sorted(P.label(s, t, v) for v in P.classes(s, t))
            b = sorted(P.label(s + 8, t + 8, v) for v in P.classes(s + 8, t + 8))
            if a != b:
                bad.append((s, t))
    return bad


def render_svg(rows: list[Survivor], view: Window = DEFAULT_WINDOW) -> str:
    """(t, s) dot layout: t runs across, s runs down."""
    cw, ch, pad = 120, 14, 40
    by_cell: dict[tuple[int, int], list[Survivor]] = {}
    for r in rows:
        by_cell.setdefault((r.s, r.t), []).append(r)
    height = max((len(v) for v in by_cell.values()), default=1)
    rowh = ch * height
    W = pad + cw * (view.t_hi - view.t_lo + 1)
    H = pad + rowh * (view.s_hi - view.s_lo + 1)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="serif" font-size="10">']
    for t in range(view.t_lo, view.t_hi + 1):
        out.append(f'<text x="{pad + cw * (t - view.t_lo)}" y="14">t={t}</text>')
    for s in range(view.s_hi, view.s_lo - 1, -1):
        y = pad + rowh * (view.s_hi - s)
        out.append(f'<text x="2" y="{y + 10}">{s}</text>')
        for t in range(view.t_lo, view.t_hi + 1):
            for k, r in enumerate(by_cell.get((s, t), [])):
                x = pad + cw * (t - view.t_lo)
                fill = "black" if not r.permanent else "gray"
                out.append(f'<circle cx="{x + 4}" cy="{y + ch * k + 6}" r="3" fill="{fill}"/>'
                           f'<text x="{x + 10}" y="{y + ch * k + 10}">{pretty(r.name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
