"""Algebraic E-based Mahowald invariants over A(n), E = bo (n = 1) or tmf (n = 2).

M_N denotes H^*(Sigma P_{-N}), bottom class in degree -N+1.  A class alpha of
Ext_{A(n-1)}(F_2) is placed in the stabilized group Ext_{A(n)}(M_{N0}) as the
summand-zero class of its bidegree.  Its image in Ext(M_N) is tracked as N grows from 1; at the
first N where it is nonzero it lifts through the bottom-cell collapse
M_N -> Sigma^{-N+1} F_2, and the coset of lifts is the invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .f2linalg import BitMatrix, RowReducer, kernel_basis, solve
from .modules import ModulePresentation, suspended_projective, trivial
from .resolution import (
    DEFAULT_PINS,
    ChartMap,
    ExtChart,
    FreeResolution,
    ext_chart,
    induced_map,
    load_pins,
    minimal_resolution,
    yoneda_product,
)


class NotDetected(RuntimeError):
    """The image stayed zero over the whole N range: the bounds are too small."""


@dataclass
class MICoset:
    name: str
    s: int
    t: int
    N: int
    # representative and indeterminacy live in Ext_{A(n)}^{s, t+N-1}(F_2)
    representative: int
    indeterminacy: list[int]
    target_names: list[str]
    stabilization: int

    @property
    def target(self) -> tuple[int, int]:
        return self.s, self.t + self.N - 1

    @property
    def bracket(self) -> int:
        """Cell label of the detecting bottom class, in the [k] convention."""
        return -self.N + 1

    def describe(self) -> str:
        terms = [self.target_names[k] for k in range(len(self.target_names)) if (self.representative >> k) & 1]
        return " + ".join(terms) if terms else "0"

    def contains(self, v: int) -> bool:
        """Is v in the coset representative + indeterminacy?"""
        return _in_span(v ^ self.representative, self.indeterminacy)

    def report_line(self) -> str:
        return f"{self.name} -> ({self.N}, {self.describe()}, {len(self.indeterminacy)})"


def _in_span(v: int, basis: list[int]) -> bool:
    red = RowReducer()
    for b in basis:
        red.add(b)
    return red.contains(v)


def projective(n: int, N: int, top: int) -> ModulePresentation:
    """M_N = H^*(Sigma P_{-N}) truncated above ``top``."""
    return suspended_projective(-N, top, n)


def _name(degree: int) -> str:
    # suspended_projective names: s1x^j sits in degree j + 1
    return f"s1x^{degree - 1}"


def _bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


@dataclass
class TruncationFamily:
    n: int
    s_max: int
    t_max: int
    top: int
    modules: dict[int, ModulePresentation] = field(default_factory=dict)
    resolutions: dict[int, FreeResolution] = field(default_factory=dict)
    _maps: dict[tuple[int, int], ChartMap] = field(default_factory=dict)

    def resolution(self, N: int) -> FreeResolution:
        r = self.resolutions.get(N)
        if r is None:
            m = projective(self.n, N, self.top)
            self.modules[N] = m
            r = minimal_resolution(m, self.s_max, self.t_max)
            self.resolutions[N] = r
        return r

    def chart(self, N: int) -> ExtChart:
        return ext_chart(self.resolution(N), products=False)

    def restriction(self, big: int, small: int) -> ChartMap:
        """Ext(M_big) -> Ext(M_small) induced by the inclusion M_small in M_big."""
        key = (big, small)
        if key not in self._maps:
            if small > big:
                raise ValueError("restriction goes from larger N to smaller N")
            rs, rb = self.resolution(small), self.resolution(big)
            ms, mb = self.modules[small], self.modules[big]
            f = {i: 1 << mb.index[nm] for i, nm in enumerate(ms.names)}
            self._maps[key] = induced_map(f, rs, rb)
        return self._maps[key]


def truncation_family(n: int, N_range: range, bounds: tuple[int, int], top: int | None = None) -> TruncationFamily:
    s_max, t_max = bounds
    fam = TruncationFamily(n, s_max, t_max, max(t_max, 1) if top is None else top)
    for N in N_range:
        fam.resolution(N)
    return fam


@lru_cache(maxsize=None)
def _f2_chart(n: int, s_max: int, t_max: int) -> ExtChart:
    pins = load_pins(DEFAULT_PINS).get(n, {})
    return ext_chart(minimal_resolution(trivial(n), s_max, t_max), pins)


def seed_class(n: int, name: str, s_max: int = 12, t_max: int = 30) -> tuple[int, int, int]:
    """A class of Ext_{A(n-1)}(F_2) given as a product of pinned names, e.g.
    ``h0^3`` or ``beta*h0``; returned as (s, t, bitmask)."""
    F = _f2_chart(n - 1, s_max, t_max)
    s, t, v = product_class(F, name)
    return s, t, v


def product_class(chart: ExtChart, expr: str) -> tuple[int, int, int]:
    """Evaluate a product of pinned names such as ``g*h1`` or ``h0^3`` in ``chart``."""
    r = chart.resolution
    acc: tuple[int, int, int] | None = None
    for factor in expr.replace(" ", "").split("*"):
        base, _, power = factor.partition("^")
        k = int(power) if power else 1
        if factor in _all_names(chart):
            base, k = factor, 1
        if base == "1":
            cls = (0, 0, 1)
        else:
            s, t, idx = chart.find(base)
            cls = (s, t, 1 << idx)
        for _ in range(k):
            acc = cls if acc is None else yoneda_product(r, r, acc, cls)
    if acc is None:
        raise ValueError(f"empty product {expr!r}")
    return acc


def _all_names(chart: ExtChart) -> set[str]:
    return {nm for nms in chart.names.values() for nm in nms}


class AmbiguousSeed(RuntimeError):
    """The stable bidegree does not single out one summand-zero class."""


@dataclass
class StableSeed:
    s: int
    t: int
    N0: int
    vector: int
    summand_dims: dict[int, int]
    stabilization: int
    family: TruncationFamily
    depth: list[int]  # depth[N] = dim of the kernel of restriction to M_N


def summand_dims(n: int, s: int, t: int) -> dict[int, int]:
    """Dimensions of the shifted Ext_{A(n-1)}(F_2) summands meeting bidegree (s, t)."""
    step = 2 ** (n + 1)
    # Ext_{A(0)} and Ext_{A(1)} vanish above t = 3s + 3
    hi = 3 * s + 6
    F = _f2_chart(n - 1, max(s, 1), max(hi, 1))
    out = {}
    i_lo = -((hi - t) // step) - 1
    for i in range(i_lo, (t - s) // step + 1):
        d = F.dim(s, t - i * step) if s <= t - i * step <= hi else 0
        if d:
            out[i] = d
    return out


def stable_seed(n: int, s: int, t: int, N_max: int) -> StableSeed:
    """Locate the summand-zero class of bidegree (s, t) in Ext_{A(n)}(M_{N_max}).

    The restriction maps to M_N filter the stable group.  Summands with
    larger index sit on higher cells and are detected at smaller N, so the
    summand-zero layer is found by counting past the negative summands.
    """
    dims = summand_dims(n, s, t)
    if not dims.get(0):
        raise ValueError(f"no Ext_{{A({n - 1})}} class in bidegree {(s, t)}")
    fam = TruncationFamily(n, s, t, t + 1)
    total = sum(dims.values())
    stab = N_max
    while stab > 1 and fam.chart(stab - 1).dim(s, t) == total:
        stab -= 1
    if fam.chart(N_max).dim(s, t) != total:
        raise NotDetected(f"Ext^{{{s},{t}}}(M_{N_max}) has not stabilized; raise N_max")
    m = total
    depth = [m] * N_max + [0]
    kernels: dict[int, list[int]] = {}
    for N in range(1, N_max):
        R = fam.restriction(N_max, N).matrices.get((s, t), [])
        cols = R if R else [0] * m
        rows = fam.chart(N).dim(s, t)
        mat = BitMatrix(len(cols), rows, cols).transpose() if rows else BitMatrix(0, m)
        ker = kernel_basis(mat) if rows else [1 << k for k in range(m)]
        kernels[N] = ker
        depth[N] = len(ker)
    # detection N of each layer, deepest first; summand index increases along it
    layers: list[int] = []
    for N in range(N_max, 0, -1):
        layers += [N] * (depth[N - 1] - depth[N])
    negative = sum(d for i, d in dims.items() if i < 0)
    N_star = layers[negative]
    if layers.count(N_star) != dims[0]:
        raise AmbiguousSeed(f"bidegree {(s, t)}: layer N={N_star} mixes summands")
    shallow = RowReducer()
    for v in kernels.get(N_star, []):
        shallow.add(v)
    wide = kernels[N_star - 1] if N_star > 1 else [1 << k for k in range(m)]
    vector = next(v for v in wide if not shallow.contains(v))
    return StableSeed(s, t, N_max, vector, dims, stab, fam, depth)


def algebraic_mi(n: int, name: str, N_max: int = 24) -> MICoset:
    """Algebraic Mahowald invariant of the named class of Ext_{A(n-1)}(F_2)."""
    s, t, v = seed_class(n, name)
    if not v:
        raise ValueError(f"{name} is zero")
    seed = stable_seed(n, s, t, N_max)
    fam = seed.family
    for N in range(1, N_max + 1):
        image = fam.restriction(N_max, N).apply(s, t, seed.vector) if N < N_max else seed.vector
        if image:
            break
    M = fam.modules[N]
    rM = fam.resolution(N)
    bottom_deg = -N + 1
    rC = minimal_resolution(trivial(n, bottom_deg, "b"), s, t)
    collapse = induced_map({M.index[_name(bottom_deg)]: 1}, rM, rC)
    cols = collapse.matrices.get((s, t), [])
    n_m = len(rM.gens_in(s, t))
    n_c = len(rC.gens_in(s, t))
    mat = BitMatrix(len(cols), n_m, cols).transpose() if cols else BitMatrix(n_m, n_c)
    rep = solve(mat, image)
    if rep is None:
        raise ArithmeticError(f"image of {name} at N={N} does not lift to the bottom cell")
    indet = kernel_basis(mat)
    target = _f2_chart(n, max(s, 1), t + N - 1)
    names = target.names.get((s, t + N - 1), [])
    return MICoset(name, s, t, N, rep, indet, list(names), seed.stabilization)


def periodicity_check(n: int, rows: list[tuple[str, str, str]], N_max: int = 40) -> list[str]:
    """Check M(a) = y * M(b) for each (a, y, b); returns the failures.

    ``y`` is a product of pinned names in Ext_{A(n)}(F_2)."""
    failures = []
    for a, y, b in rows:
        ma = algebraic_mi(n, a, N_max)
        mb = algebraic_mi(n, b, N_max)
        ts, tt = ma.target
        F = _f2_chart(n, ts, tt)
        ys, yt, yv = product_class(F, y)
        bs, bt = mb.target
        if (bs + ys, bt + yt) != (ts, tt):
            failures.append(f"{a}: bidegree {(bs + ys, bt + yt)} != {(ts, tt)}")
            continue
        prod = yoneda_product(F.resolution, F.resolution, (bs, bt, mb.representative), (ys, yt, yv))[2]
        if not ma.contains(prod):
            failures.append(f"{a}: {y}*M({b}) not in the coset {ma.describe()}")
    return failures
