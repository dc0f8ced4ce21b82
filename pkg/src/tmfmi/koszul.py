"""The Koszul spectral sequence for Ext over A(n) from Ext over A(n-1).

E_1^{sigma,s,t} = Ext_{A(n-1)}^{s-sigma,t}(R_n^sigma (x) M).  For n = 1 the
d_1 differential is induced by the boundary of the Koszul resolution

    F_2 <- K_0 <- K_1 <- ...,   K_sigma = A(n) (x)_{A(n-1)} R_n^sigma,

built explicitly: change of rings identifies Ext_{A(n)}(K_sigma (x) M) with
the E_1 column, and d_1 is the map induced by K_{sigma+1} -> K_sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .f2linalg import BitMatrix, pack, rank_of_rows, solve
from .modules import (
    ModulePresentation,
    induced_module,
    koszul_module,
    restrict,
    tensor,
    tensor_pairs,
    trivial,
)
from .resolution import (
    ChartMap,
    EquivarianceError,
    check_equivariant,
    ext_chart,
    induced_map,
    minimal_resolution,
)
from .steenrod import SubAlgebra


class OracleMismatch(RuntimeError):
    """The spectral sequence total disagrees with the direct resolution."""


Trigrade = tuple[int, int, int]


@dataclass
class KoszulPage:
    n: int
    page: int
    s_max: int
    t_max: int
    # (sigma, s, t) -> dimension, s the total homological degree
    dims: dict[Trigrade, int]
    # (sigma, s, t) -> rank of d_1 leaving that group
    d1_rank: dict[Trigrade, int] = field(default_factory=dict)

    def column(self, sigma: int) -> dict[tuple[int, int], int]:
        return {(s, t): d for (g, s, t), d in self.dims.items() if g == sigma and d}

    def totals(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (_, s, t), d in self.dims.items():
            if d:
                out[(s, t)] = out.get((s, t), 0) + d
        return out


def _sigma_range(n: int, M: ModulePresentation, s_max: int, t_max: int) -> range:
    # R_n^sigma starts in degree sigma * 2^n
    top = min(s_max, (t_max - M.t_min) // (1 << n)) if t_max >= M.t_min else -1
    return range(0, top + 1)


def e1_page(n: int, M: ModulePresentation, bounds: tuple[int, int]) -> KoszulPage:
    """E_1 from Ext over A(n-1) of R_n^sigma (x) M."""
    s_max, t_max = bounds
    if M.n != n:
        raise ValueError(f"M is an A({M.n})-module, expected A({n})")
    small = restrict(M, n - 1)
    dims: dict[Trigrade, int] = {}
    for sigma in _sigma_range(n, M, s_max, t_max):
        R = koszul_module(n, sigma, window_top=t_max - M.t_min)
        RM = tensor(R, small, t_max)
        res = minimal_resolution(RM, s_max - sigma, t_max)
        for s in range(res.s_max + 1):
            for t in res.gens[s]:
                key = (sigma, s + sigma, t)
                dims[key] = dims.get(key, 0) + 1
    return KoszulPage(n, 1, s_max, t_max, dims)


def closed_form_a0(sigma: int, bounds: tuple[int, int]) -> dict[tuple[int, int], int]:
    """Ext_{A(0)}(R_1^sigma) in total grading: (s, t) -> dim, s = homological + sigma.

    R_1^sigma is free over A(0) on the monomials x1^(sigma-2i) x2^(2i), plus,
    for even sigma, a trivial summand x2^sigma in degree 3 sigma.
    """
    s_max, t_max = bounds
    out: dict[tuple[int, int], int] = {}
    if sigma > s_max:
        return out
    for i in range((sigma - 1) // 2 + 1):
        t = 2 * sigma + 2 * i
        if t <= t_max:
            out[(sigma, t)] = out.get((sigma, t), 0) + 1
    if sigma % 2 == 0:
        base = 3 * sigma
        for h in range(0, s_max - sigma + 1):
            if base + h > t_max:
                break
            out[(sigma + h, base + h)] = out.get((sigma + h, base + h), 0) + 1
    return out


# --- the Koszul resolution ---------------------------------------------------


@dataclass
class KoszulStage:
    sigma: int
    w: ModulePresentation  # R_n^sigma over A(n-1)
    k: ModulePresentation  # A(n) (x)_{A(n-1)} w
    # basis index of k -> bitmask over the basis of the previous stage (F_2 for sigma = 0)
    boundary: dict[int, int]


def koszul_complex(n: int, sigma_max: int, top: int) -> list[KoszulStage]:
    """Stages K_0 .. K_sigma_max of the Koszul resolution, truncated above ``top``.

    On 1 (x) m the boundary is the contraction sum_k Q_k (x) m/x_k, with Q_k
    the Milnor basis element dual to x_k = xi_k^(2^(n+1-k)), plus the unique
    lowest-order correction that makes it A(n-1)-linear with d o d = 0.
    """
    big = SubAlgebra.get(n)
    duals = []
    for k in range(1, n + 2):
        e = [0] * k
        e[k - 1] = 1 << (n + 1 - k)
        duals.append(big.index[tuple(e)])
    stages: list[KoszulStage] = []
    prev_target = trivial(n)
    for sigma in range(sigma_max + 1):
        R = koszul_module(n, sigma, window_top=top)
        K, reps = induced_module(R, n, t_max=top)
        if sigma == 0:
            phi = {j: 1 for j in range(len(R))}
        else:
            prev = stages[-1]
            phi = _solve_boundary(R, prev, prev_target, _contraction(R, prev, duals, n))
        bnd = {}
        for x, (b, j) in enumerate(reps):
            v = prev_target.act_vec(b, phi[j]) if sigma else (phi[j] if b == big.unit else 0)
            if v:
                bnd[x] = v
        stages.append(KoszulStage(sigma, R, K, bnd))
        prev_target = K
    return stages


def _contraction(R, prev: "KoszulStage", duals: list[int], n: int) -> dict[int, int]:
    prev_index = {nm: j for j, nm in enumerate(prev.w.names)}
    phi: dict[int, int] = {}
    for j, e in enumerate(_exponents(R, n + 1)):
        v = 0
        for k, q in enumerate(duals):
            if e[k]:
                f = list(e)
                f[k] -= 1
                jj = prev_index.get(_mono_name(f))
                if jj is not None:
                    v ^= prev.k.pure_tensor(1 << q, jj)
        phi[j] = v
    return phi


def _solve_boundary(R, prev: "KoszulStage", below: ModulePresentation, phi0: dict[int, int]) -> dict[int, int]:
    """Correct phi0 : R -> K_prev so that it is A(n-1)-linear and lands in cycles.

    Corrections are first sought among unit tensors 1 (x) r, then among all
    elements of the right degree."""
    K = prev.k
    big = K.algebra
    small = R.algebra
    units = [(prev.w.degrees[j], K.pure_tensor(1 << big.unit, j)) for j in range(len(prev.w))]
    every = [(K.degrees[x], 1 << x) for x in range(len(K))]
    for pool in (units, every):
        # variables: (j, correction vector in the degree of R_j)
        vars_ = [(j, v) for j in range(len(R)) for d, v in pool if d == R.degrees[j] and v]
        if not vars_:
            continue
        rows: list[int] = []  # each equation: bitmask over variables
        rhs: list[int] = []

        def add(eqs: dict[tuple, int], consts: dict[tuple, int]):
            for key in set(eqs) | set(consts):
                rows.append(eqs.get(key, 0))
                rhs.append(consts.get(key, 0))

        # linearity under each generator of A(n-1)
        for g_small in small.generators:
            g = big.index[small.basis[g_small]]
            for j in range(len(R)):
                eqs: dict[tuple, int] = {}
                consts: dict[tuple, int] = {}
                gj = R.act(g_small, j)
                for v_idx, (jj, x) in enumerate(vars_):
                    hit = 0
                    if jj == j:
                        hit ^= K.act_vec(g, x)
                    if (gj >> jj) & 1:
                        hit ^= x
                    for y in _bits(hit):
                        eqs[("lin", g, j, y)] = eqs.get(("lin", g, j, y), 0) ^ (1 << v_idx)
                c = K.act_vec(g, phi0[j])
                for y in _bits(gj):
                    c ^= phi0[y]
                for y in _bits(c):
                    consts[("lin", g, j, y)] = 1
                add(eqs, consts)
        # cycle condition
        for j in range(len(R)):
            eqs = {}
            consts = {}
            for v_idx, (jj, x) in enumerate(vars_):
                if jj == j:
                    c = 0
                    for z in _bits(x):
                        c ^= prev.boundary.get(z, 0)
                    for y in _bits(c):
                        eqs[("cyc", j, y)] = eqs.get(("cyc", j, y), 0) ^ (1 << v_idx)
            c = 0
            for x in _bits(phi0[j]):
                c ^= prev.boundary.get(x, 0)
            for y in _bits(c):
                consts[("cyc", j, y)] = 1
            add(eqs, consts)
        if not any(rhs):
            return dict(phi0)
        sol = solve(BitMatrix(len(rows), len(vars_), rows), pack(rhs))
        if sol is None:
            continue
        phi = dict(phi0)
        for v_idx in _bits(sol):
            j, x = vars_[v_idx]
            phi[j] ^= x
        return phi
    raise ArithmeticError(f"no A({small.n})-linear Koszul boundary on R^{R.names[:1]}")


def check_exact(stages: list[KoszulStage]) -> list[tuple[int, int]]:
    """(sigma, degree) where the truncated complex fails to be exact."""
    bad = []
    below = trivial(stages[0].k.n)
    for i, st in enumerate(stages):
        K = st.k
        for d in sorted(K.by_degree):
            idx = K.by_degree[d]
            img = [below.to_local(st.boundary.get(x, 0), d) for x in idx]
            rank_out = rank_of_rows(img)
            kernel = len(idx) - rank_out
            if i + 1 < len(stages):
                nxt = stages[i + 1]
                rank_in = rank_of_rows(
                    K.to_local(nxt.boundary.get(x, 0), d) for x in nxt.k.by_degree.get(d, ())
                )
            else:
                continue
            if kernel != rank_in:
                bad.append((st.sigma, d))
        if i == 0:
            # the augmentation must be onto F_2
            if rank_of_rows([below.to_local(st.boundary.get(x, 0), 0) for x in K.by_degree.get(0, ())]) != 1:
                bad.append((-1, 0))
        below = K
    return bad


def _mono_name(e) -> str:
    return "".join(f"x{k + 1}^{a}" if a > 1 else f"x{k + 1}" for k, a in enumerate(e) if a) or "1"


def _exponents(R: ModulePresentation, width: int) -> list[tuple[int, ...]]:
    out = []
    for nm in R.names:
        e: dict[int, int] = {}
        if nm != "1":
            for part in nm.split("x")[1:]:
                k, _, a = part.partition("^")
                e[int(k)] = int(a) if a else 1
        out.append(tuple(e.get(k, 0) for k in range(1, width + 1)))
    return out


def check_complex(stages: list[KoszulStage]) -> list[str]:
    """Equivariance of each boundary, d o d = 0 and exactness, degree by degree."""
    problems = []
    prev_target = trivial(stages[0].k.n)
    for st in stages:
        K = st.k
        try:
            check_equivariant(st.boundary, K, prev_target)
        except EquivarianceError as exc:
            problems.append(f"sigma={st.sigma}: {exc}")
        prev_target = K
    for lo, hi in zip(stages, stages[1:]):
        for i, v in hi.boundary.items():
            acc = 0
            for j in _bits(v):
                acc ^= lo.boundary.get(j, 0)
            if acc:
                problems.append(f"d o d != 0 on {hi.k.names[i]}")
                break
    return problems


# --- running the spectral sequence ----------------------------------------------


def _tensor_map(
    f: dict[int, int],
    src: ModulePresentation,
    tgt: ModulePresentation,
    M: ModulePresentation,
    t_max: int,
) -> dict[int, int]:
    """f (x) id on the truncated tensor products with M."""
    _, sp = tensor_pairs(src, M, t_max)
    _, tp = tensor_pairs(tgt, M, t_max)
    tindex = {p: x for x, p in enumerate(tp)}
    out = {}
    for x, (i, j) in enumerate(sp):
        v = 0
        for ii in _bits(f.get(i, 0)):
            y = tindex.get((ii, j))
            if y is None:
                raise ArithmeticError("boundary leaves the truncated window")
            v ^= 1 << y
        if v:
            out[x] = v
    return out


def _bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


@dataclass
class KoszulRun:
    e1: KoszulPage
    e_infinity: KoszulPage
    direct: dict[tuple[int, int], int]
    d1: dict[int, ChartMap]

    def mismatches(self) -> list[tuple[int, int, int, int]]:
        tot = self.e_infinity.totals()
        keys = set(tot) | set(self.direct)
        return sorted(
            (s, t, tot.get((s, t), 0), self.direct.get((s, t), 0))
            for s, t in keys
            if tot.get((s, t), 0) != self.direct.get((s, t), 0)
        )


def run_n1(M: ModulePresentation, bounds: tuple[int, int], check: bool = True) -> KoszulRun:
    """Run the n = 1 Koszul spectral sequence to E_2 = E_infinity and compare
    with a direct minimal resolution over A(1)."""
    s_max, t_max = bounds
    if M.n != 1:
        raise ValueError("run_n1 needs an A(1)-module")
    # one extra total degree so every d_1 leaving s <= s_max has its target
    s_int = s_max + 1
    sigmas = list(_sigma_range(1, M, s_int, t_max))
    stages = koszul_complex(1, sigmas[-1], t_max - M.t_min) if sigmas else []
    resolutions = []
    dims: dict[Trigrade, int] = {}
    for sigma in sigmas:
        KM = tensor(stages[sigma].k, M, t_max)
        r = minimal_resolution(KM, s_int - sigma, t_max)
        resolutions.append(r)
        for s in range(r.s_max + 1):
            for t in r.gens[s]:
                key = (sigma, s + sigma, t)
                dims[key] = dims.get(key, 0) + 1
    d1: dict[int, ChartMap] = {}
    rank_out: dict[Trigrade, int] = {}
    for sigma in sigmas[:-1]:
        f = _tensor_map(stages[sigma + 1].boundary, stages[sigma + 1].k, stages[sigma].k, M, t_max)
        cm = induced_map(f, resolutions[sigma + 1], resolutions[sigma])
        d1[sigma] = cm
        for (s, t), cols in cm.matrices.items():
            rank_out[(sigma, s + sigma, t)] = rank_of_rows(cols)
    for sigma in sigmas[:-2]:
        nxt = d1[sigma + 1]
        for (s, t), cols in d1[sigma].matrices.items():
            if any(nxt.apply(s, t, c) for c in cols):
                raise OracleMismatch(f"d1 o d1 != 0 at sigma={sigma}, (s,t)=({s + sigma},{t})")
    e1 = {k: v for k, v in dims.items() if k[1] <= s_max}
    if check:
        want = {k: v for k, v in e1_page(1, M, bounds).dims.items() if v}
        if want != e1:
            bad = sorted(set(want.items()) ^ set(e1.items()))[:3]
            raise OracleMismatch(f"Koszul complex E_1 differs from the R^sigma columns at {bad}")
    einf: dict[Trigrade, int] = {}
    for (sigma, s, t), d in e1.items():
        left = d - rank_out.get((sigma, s, t), 0) - rank_out.get((sigma - 1, s - 1, t), 0)
        if left:
            einf[(sigma, s, t)] = left
    direct_res = minimal_resolution(M, s_max, t_max)
    direct: dict[tuple[int, int], int] = {}
    for s in range(s_max + 1):
        for t in direct_res.gens[s]:
            direct[(s, t)] = direct.get((s, t), 0) + 1
    run = KoszulRun(
        KoszulPage(1, 1, s_max, t_max, e1, {k: v for k, v in rank_out.items() if k[1] <= s_max}),
        KoszulPage(1, 2, s_max, t_max, einf),
        direct,
        d1,
    )
    if check and run.mismatches():
        raise OracleMismatch(f"E_infinity totals differ from direct Ext: {run.mismatches()[:3]}")
    return run
