"""Minimal free resolutions over A(n), Ext charts, products and induced maps.

A free module F_s is described by its generator degrees.  Its degree-t part
has the local basis of pairs (generator g, Milnor basis element b) with
deg g + deg b = t, ordered by generator then basis index.  Vectors are ints
over that local basis.  F_{-1} stands for the module being resolved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .f2linalg import BitMatrix, RowReducer, kernel_basis
from .modules import ModulePresentation
from .steenrod import SubAlgebra


class WindowError(ValueError):
    """Requested bounds exceed what the module's window can support."""


class EquivarianceError(ValueError):
    pass


def _bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


class FreeResolution:
    """Minimal resolution of ``module`` for s <= s_max and t <= t_max."""

    def __init__(self, module: ModulePresentation, s_max: int, t_max: int):
        if t_max > module.trusted_top():
            raise WindowError(
                f"t_max={t_max} exceeds trusted window top {module.trusted_top()}"
            )
        if s_max < 0:
            raise ValueError("s_max must be non-negative")
        self.module = module
        self.n = module.n
        self.alg = SubAlgebra.get(module.n)
        self.s_max = s_max
        self.t_max = t_max
        self.t_min = module.t_min
        self.gens: list[list[int]] = [[] for _ in range(s_max + 1)]
        # dval[s][g]: d(g) as a vector in F_{s-1} (local basis in degree of g)
        self.dval: list[list[int]] = [[] for _ in range(s_max + 1)]
        self._basis: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self._index: dict[tuple[int, int], dict[tuple[int, int], int]] = {}
        # images[(s, t)]: d of each local basis vector of F_s in degree t
        self._images: dict[tuple[int, int], list[int]] = {}
        self._solver: dict[tuple[int, int], RowReducer] = {}
        self._build()

    # -- local bases ---------------------------------------------------------

    def dim(self, s: int, t: int) -> int:
        if s < 0:
            return self.module.dim(t)
        return len(self.basis(s, t))

    def basis(self, s: int, t: int) -> list[tuple[int, int]]:
        key = (s, t)
        b = self._basis.get(key)
        if b is None:
            b = []
            for g, d in enumerate(self.gens[s]):
                for a in self.alg.by_degree.get(t - d, ()):
                    b.append((g, a))
            self._basis[key] = b
            self._index[key] = {p: i for i, p in enumerate(b)}
        return b

    def index(self, s: int, t: int) -> dict[tuple[int, int], int]:
        self.basis(s, t)
        return self._index[(s, t)]

    def _invalidate(self, s: int, t: int) -> None:
        self._basis.pop((s, t), None)
        self._index.pop((s, t), None)

    def act(self, s: int, a: int, v: int, t: int) -> int:
        """Multiply a vector of F_s (degree t) on the left by basis element a."""
        if s < 0:
            m = self.module
            return m.to_local(m.act_vec(a, m.from_local(v, t)), t + self.alg.degrees[a])
        if a == self.alg.unit:
            return v
        src = self.basis(s, t)
        dst = self.index(s, t + self.alg.degrees[a])
        out = 0
        prod = self.alg.prod[a]
        for i in _bits(v):
            g, b = src[i]
            for c in _bits(prod[b]):
                out ^= 1 << dst[(g, c)]
        return out

    def unit_vector(self, s: int, g: int) -> int:
        return 1 << self.index(s, self.gens[s][g])[(g, self.alg.unit)]

    # -- construction ----------------------------------------------------------

    def _image_of(self, s: int, g: int, a: int) -> int:
        return self.act(s - 1, a, self.dval[s][g], self.gens[s][g])

    def _images_at(self, s: int, t: int) -> list[int]:
        key = (s, t)
        imgs = self._images.get(key)
        if imgs is None:
            imgs = [self._image_of(s, g, a) for g, a in self.basis(s, t)]
            self._images[key] = imgs
        return imgs

    def _kernel_at(self, s: int, t: int) -> list[int]:
        """Kernel of d_s : F_s -> F_{s-1} in degree t (all of M_t when s = -1)."""
        if s < 0:
            return [1 << k for k in range(self.module.dim(t))]
        imgs = self._images_at(s, t)
        ncols = len(imgs)
        nrows = self.dim(s - 1, t)
        m = BitMatrix(ncols, nrows, imgs).transpose()
        return kernel_basis(m)

    def _build(self) -> None:
        for t in range(self.t_min, self.t_max + 1):
            for s in range(self.s_max + 1):
                self._invalidate(s, t)
                covered = RowReducer()
                for v in self._images_at(s, t):
                    covered.add(v)
                fresh = False
                for z in self._kernel_at(s - 1, t):
                    if covered.add(z):
                        self.gens[s].append(t)
                        self.dval[s].append(z)
                        fresh = True
                if fresh:
                    self._invalidate(s, t)
                    self._images.pop((s, t), None)

    # -- solving -----------------------------------------------------------------

    def preimage(self, s: int, t: int, target: int) -> int:
        """Some x in F_s (degree t) with d x = target; target must be a cycle."""
        key = (s, t)
        red = self._solver.get(key)
        if red is None:
            red = RowReducer()
            for i, v in enumerate(self._images_at(s, t)):
                red.add(v, 1 << i)
            self._solver[key] = red
        x = red.express(target)
        if x is None:
            raise ArithmeticError(f"no preimage in F_{s} degree {t}; not a cycle")
        return x

    def generator_coefficients(self, s: int, t: int, v: int) -> int:
        """Bitmask over generators of F_s in degree t: coefficient of (g, 1) in v."""
        idx = self.index(s, t)
        unit = self.alg.unit
        out = 0
        for k, g in enumerate(self.gens_in(s, t)):
            if (v >> idx[(g, unit)]) & 1:
                out |= 1 << k
        return out

    def gens_in(self, s: int, t: int) -> list[int]:
        if s < 0 or s > self.s_max:
            return []
        return [g for g, d in enumerate(self.gens[s]) if d == t]

    # -- invariants ---------------------------------------------------------------

    def check_d_squared(self) -> list[tuple[int, int]]:
        """Bidegrees where d o d != 0 (empty when the resolution is a complex)."""
        bad = []
        for s in range(1, self.s_max + 1):
            for g, t in enumerate(self.gens[s]):
                img = self.dval[s][g]
                acc = 0
                src = self.basis(s - 1, t)
                for i in _bits(img):
                    h, b = src[i]
                    acc ^= self.act(s - 2, b, self.dval[s - 1][h], self.gens[s - 1][h])
                if acc:
                    bad.append((s, t))
        if self.s_max >= 0:
            # the augmentation must be onto each trusted degree
            for t in range(self.t_min, self.t_max + 1):
                span = RowReducer()
                for v in self._images_at(0, t):
                    span.add(v)
                if len(span) != self.module.dim(t):
                    bad.append((0, t))
        return bad

    def check_minimal(self) -> list[tuple[int, int]]:
        """Bidegrees where a differential has a unit coefficient."""
        bad = []
        for s in range(1, self.s_max + 1):
            for g, t in enumerate(self.gens[s]):
                if self.generator_coefficients(s - 1, t, self.dval[s][g]):
                    bad.append((s, t))
        return bad


def minimal_resolution(m: ModulePresentation, s_max: int, t_max: int) -> FreeResolution:
    return FreeResolution(m, s_max, t_max)


# --- charts ---------------------------------------------------------------------


@dataclass
class ExtChart:
    n: int
    s_max: int
    t_max: int
    t_min: int
    dims: dict[tuple[int, int], int]
    names: dict[tuple[int, int], list[str]]
    # products[i][(s, t)] = images of the classes at (s, t) as bitmasks at (s+1, t+2^i)
    products: dict[int, dict[tuple[int, int], list[int]]] = field(default_factory=dict)
    resolution: FreeResolution | None = field(default=None, repr=False, compare=False)

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def bidegrees(self) -> list[tuple[int, int]]:
        return sorted(k for k, v in self.dims.items() if v)

    def find(self, name: str) -> tuple[int, int, int]:
        for (s, t), nms in self.names.items():
            if name in nms:
                return s, t, nms.index(name)
        raise KeyError(name)

    def class_name(self, s: int, t: int, v: int) -> str:
        nms = self.names.get((s, t), [])
        terms = [nms[k] for k in _bits(v)]
        return " + ".join(terms) if terms else "0"


def load_pins(path: str | Path) -> dict[int, dict[tuple[int, int, int], str]]:
    """Pin file lines: ``pin <n> <s> <t> <index> <name>``."""
    pins: dict[int, dict[tuple[int, int, int], str]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "pin" or len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 'pin n s t index name'")
        n, s, t, k = map(int, parts[1:5])
        pins.setdefault(n, {})[(s, t, k)] = parts[5]
    return pins


DEFAULT_PINS = Path(__file__).with_name("data") / "pins.txt"


def ext_chart(
    r: FreeResolution,
    pins: dict[tuple[int, int, int], str] | None = None,
    products: bool = True,
) -> ExtChart:
    pins = pins or {}
    dims: dict[tuple[int, int], int] = {}
    names: dict[tuple[int, int], list[str]] = {}
    for s in range(r.s_max + 1):
        for t in sorted(set(r.gens[s])):
            k = r.gens[s].count(t)
            dims[(s, t)] = k
            # unpinned: stem, then filtration and index within the bidegree
            names[(s, t)] = [pins.get((s, t, j), f"x_{t - s}^({s}.{j})") for j in range(k)]
    chart = ExtChart(r.n, r.s_max, r.t_max, r.t_min, dims, names, {}, r)
    if products:
        for i in range(r.n + 1):
            chart.products[i] = h_product(r, i)
    return chart


def h_product(r: FreeResolution, i: int) -> dict[tuple[int, int], list[int]]:
    """Multiplication by h_i, read off the coefficient of Sq(2^i) in the differential."""
    if i > r.n:
        raise ValueError(f"h_{i} is not defined over A({r.n})")
    a = r.alg.index[(1 << i,)]
    shift = 1 << i
    table: dict[tuple[int, int], list[int]] = {}
    for s in range(r.s_max):
        for t in sorted(set(r.gens[s])):
            if t + shift > r.t_max:
                continue
            src = r.gens_in(s, t)
            tgt = r.gens_in(s + 1, t + shift)
            idx = r.index(s, t + shift)
            images = []
            for g in src:
                pos = idx[(g, a)]
                v = 0
                for k, h in enumerate(tgt):
                    if (r.dval[s + 1][h] >> pos) & 1:
                        v |= 1 << k
                images.append(v)
            table[(s, t)] = images
    return table


# --- chain maps -------------------------------------------------------------------


@dataclass
class ChainMap:
    """Chain map P_{k+shift} -> Q_k lowering internal degree by tshift,
    stored on generators of P."""

    source: FreeResolution
    target: FreeResolution
    shift: int
    # values[k][g] = image of generator g of P_{k+shift} as a vector of Q_k
    values: dict[int, list[int]] = field(default_factory=dict)
    tshift: int = 0

    def apply(self, k: int, v: int, t: int) -> int:
        """Image of a vector of P_{k+shift} (degree t) in Q_k (degree t - tshift)."""
        P, Q = self.source, self.target
        out = 0
        for i in _bits(v):
            g, b = P.basis(k + self.shift, t)[i]
            out ^= Q.act(k, b, self.values[k][g], P.gens[k + self.shift][g] - self.tshift)
        return out


def _lift(cm: ChainMap, k_max: int) -> ChainMap:
    P, Q, sh = cm.source, cm.target, cm.shift
    for k in range(1, k_max + 1):
        if k + sh > P.s_max or k > Q.s_max:
            break
        vals = []
        for g, t in enumerate(P.gens[k + sh]):
            if t - cm.tshift > Q.t_max:
                vals.append(0)
                continue
            rhs = cm.apply(k - 1, P.dval[k + sh][g], t)
            vals.append(Q.preimage(k, t - cm.tshift, rhs))
        cm.values[k] = vals
    return cm


def class_chain_map(P: FreeResolution, Q: FreeResolution, s: int, t: int, cls: int, k_max: int) -> ChainMap:
    """Chain map lifting the cocycle ``cls`` (bitmask over classes of Ext(P) at (s,t))
    along Q, which must resolve the trivial module F_2 in degree 0."""
    if Q.module.dim(0) != 1 or len(Q.module) != 1:
        raise ValueError("target resolution must resolve F_2")
    gens = P.gens_in(s, t)
    vals = []
    unit_q = Q.unit_vector(0, 0) if Q.gens[0] else 0
    for g, d in enumerate(P.gens[s]):
        hit = d == t and (cls >> gens.index(g)) & 1
        vals.append(unit_q if hit else 0)
    cm = ChainMap(P, Q, s, {0: vals}, tshift=t)
    return _lift(cm, k_max)


def yoneda_product(
    rM: FreeResolution,
    rF: FreeResolution,
    x: tuple[int, int, int],
    y: tuple[int, int, int],
) -> tuple[int, int, int]:
    """Product of x in Ext(M) with y in Ext(F_2).

    Classes are (s, t, bitmask over classes at (s, t)). Returns (s, t, bitmask)."""
    s1, t1, c1 = x
    s2, t2, c2 = y
    s, t = s1 + s2, t1 + t2
    if s > rM.s_max or t > rM.t_max:
        raise WindowError(f"product lands outside the resolution at ({s},{t})")
    cm = class_chain_map(rM, rF, s1, t1, c1, s2)
    out = 0
    ygens = rF.gens_in(s2, t2)
    for k, g in enumerate(rM.gens_in(s, t)):
        v = cm.values[s2][g] if s2 else cm.values[0][g]
        coeffs = rF.generator_coefficients(s2, t2, v)
        if (coeffs & c2).bit_count() & 1:
            out |= 1 << k
    return s, t, out


def check_equivariant(f: dict[int, int], M: ModulePresentation, K: ModulePresentation) -> None:
    """``f`` maps basis indices of M to bitmasks over K; raises on the first defect."""
    alg = M.algebra
    for i in range(len(M)):
        img = f.get(i, 0)
        for j in _bits(img):
            if K.degrees[j] != M.degrees[i]:
                raise EquivarianceError(f"{M.names[i]} maps to {K.names[j]} of another degree")
        for a in alg.generators:
            lhs = 0
            for j in _bits(M.act(a, i)):
                lhs ^= f.get(j, 0)
            rhs = K.act_vec(a, img)
            if lhs != rhs:
                raise EquivarianceError(
                    f"not equivariant at (Sq{alg.basis[a]}, {M.names[i]}): "
                    f"{K.describe(lhs)} != {K.describe(rhs)}"
                )


@dataclass
class ChartMap:
    """Contravariant map Ext(K) -> Ext(M) induced by f: M -> K."""

    # matrices[(s, t)][k] = image of class k of Ext(K) at (s, t) as bitmask over Ext(M) classes
    matrices: dict[tuple[int, int], list[int]]

    def apply(self, s: int, t: int, v: int) -> int:
        cols = self.matrices.get((s, t), [])
        out = 0
        for k in _bits(v):
            out ^= cols[k]
        return out

    def is_zero(self) -> bool:
        return not any(any(col) for col in self.matrices.values())


def induced_map(f: dict[int, int], rM: FreeResolution, rK: FreeResolution) -> ChartMap:
    """Lift a module map M -> K to the resolutions and read off Ext(K) -> Ext(M)."""
    M, K = rM.module, rK.module
    if M.n != K.n:
        raise ValueError("profile mismatch")
    check_equivariant(f, M, K)
    vals = []
    for g, t in enumerate(rM.gens[0]):
        if t > rK.t_max:
            vals.append(0)
            continue
        img = M.from_local(rM.dval[0][g], t)
        fimg = 0
        for i in _bits(img):
            fimg ^= f.get(i, 0)
        vals.append(rK.preimage(0, t, K.to_local(fimg, t)))
    cm = _lift(ChainMap(rM, rK, 0, {0: vals}), min(rM.s_max, rK.s_max))
    mats: dict[tuple[int, int], list[int]] = {}
    top = min(rM.t_max, rK.t_max)
    for s in range(min(rM.s_max, rK.s_max) + 1):
        for t in sorted(set(rK.gens[s])):
            if t > top:
                continue
            kg = rK.gens_in(s, t)
            cols = [0] * len(kg)
            for j, g in enumerate(rM.gens_in(s, t)):
                coeffs = rK.generator_coefficients(s, t, cm.values[s][g])
                for k in _bits(coeffs):
                    cols[k] |= 1 << j
            mats[(s, t)] = cols
    return ChartMap(mats)
