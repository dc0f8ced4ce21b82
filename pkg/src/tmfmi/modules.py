"""Finite-window graded A(n)-modules.

A module stores, for every Milnor basis element of A(n) and every basis
element, the image as a bitmask over the basis in the target degree.
Anything that would land above the window is dropped; this makes the
stored module the quotient by everything above ``t_max``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

from .f2linalg import RowReducer
from .steenrod import SubAlgebra, milnor_degree, normalize, parse_milnor


class ModuleError(ValueError):
    pass


@dataclass
class ModulePresentation:
    n: int
    t_min: int
    t_max: int
    names: list[str]
    degrees: list[int]
    # action[(milnor index, element index)] = bitmask over global element indices
    action: dict[tuple[int, int], int] = field(default_factory=dict)
    # True when nothing was cut off above t_max (a genuinely finite module)
    complete: bool = False

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ModuleError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ModuleError("duplicate basis names")
        self.algebra = SubAlgebra.get(self.n)
        self.index = {nm: i for i, nm in enumerate(self.names)}
        self.by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            if not (self.t_min <= d <= self.t_max):
                raise ModuleError(f"{self.names[i]} in degree {d} outside window")
            self.by_degree.setdefault(d, []).append(i)
        # position of an element inside its degree
        self.pos = {}
        for d, idx in self.by_degree.items():
            for k, i in enumerate(idx):
                self.pos[i] = k

    def __len__(self) -> int:
        return len(self.names)

    def dim(self, t: int) -> int:
        return len(self.by_degree.get(t, ()))

    def act(self, a: int, i: int) -> int:
        """Sq(basis[a]) applied to element i, as a bitmask over element indices."""
        if a == self.algebra.unit:
            return 1 << i
        return self.action.get((a, i), 0)

    def act_vec(self, a: int, v: int) -> int:
        out = 0
        while v:
            low = v & -v
            out ^= self.act(a, low.bit_length() - 1)
            v ^= low
        return out

    def to_local(self, v: int, t: int) -> int:
        """Global bitmask -> bitmask over ``by_degree[t]`` positions."""
        out = 0
        for k, i in enumerate(self.by_degree.get(t, ())):
            if (v >> i) & 1:
                out |= 1 << k
        return out

    def from_local(self, v: int, t: int) -> int:
        out = 0
        idx = self.by_degree.get(t, ())
        while v:
            low = v & -v
            out |= 1 << idx[low.bit_length() - 1]
            v ^= low
        return out

    def describe(self, v: int) -> str:
        terms = [self.names[i] for i in range(len(self.names)) if (v >> i) & 1]
        return " + ".join(terms) if terms else "0"

    def trusted_top(self) -> float:
        # truncating above t_max changes nothing in internal degrees <= t_max
        return math.inf if self.complete else self.t_max


def from_generator_action(
    n: int,
    t_min: int,
    t_max: int,
    names: list[str],
    degrees: list[int],
    gen_action: dict[tuple[int, int], int],
) -> ModulePresentation:
    """Build a module from the action of Sq(1), Sq(2), ..., Sq(2^n) alone.

    The action of the remaining Milnor basis elements is obtained from the
    fixed decomposition of each one into generator * lower element.
    """
    m = ModulePresentation(n, t_min, t_max, names, degrees, {})
    alg = m.algebra
    decomp = alg.decompositions()
    action: dict[tuple[int, int], int] = {}
    for (a, i), v in gen_action.items():
        if a not in alg.generators:
            raise ModuleError(f"{alg.basis[a]} is not an algebra generator")
        if v:
            action[(a, i)] = v
    m.action = action
    for a in sorted(range(len(alg)), key=lambda k: alg.degrees[k]):
        if a == alg.unit or a in alg.generators:
            continue
        for i in range(len(names)):
            acc = 0
            for g, c in decomp[a]:
                acc ^= m.act_vec(g, m.act(c, i))
            if acc:
                action[(a, i)] = acc
    return m


def check_action(m: ModulePresentation) -> list[str]:
    """Instance-wise verification of the module axioms. Empty list means valid."""
    alg = m.algebra
    problems = []
    for (a, i), v in sorted(m.action.items()):
        target_deg = m.degrees[i] + alg.degrees[a]
        bad = [j for j in range(len(m)) if (v >> j) & 1 and m.degrees[j] != target_deg]
        if bad:
            problems.append(f"degree: {alg.basis[a]} on {m.names[i]} hits {m.names[bad[0]]}")
    for a in range(len(alg)):
        for b in range(len(alg)):
            if a == alg.unit or b == alg.unit:
                continue
            ab = alg.prod[a][b]
            for i in range(len(m)):
                lhs = m.act_vec(a, m.act(b, i))
                rhs = 0
                mask = ab
                while mask:
                    low = mask & -mask
                    rhs ^= m.act(low.bit_length() - 1, i)
                    mask ^= low
                if lhs != rhs:
                    problems.append(
                        f"relation: Sq{alg.basis[a]} Sq{alg.basis[b]} on {m.names[i]}: "
                        f"{m.describe(lhs)} != {m.describe(rhs)}"
                    )
    return problems


# --- constructors -----------------------------------------------------------

def trivial(n: int, degree: int = 0, name: str = "g") -> ModulePresentation:
    return ModulePresentation(n, degree, degree, [name], [degree], {}, complete=True)


def _multinomial_odd(parts: list[int]) -> bool:
    acc = 0
    for p in parts:
        if p < 0 or acc & p:
            return False
        acc |= p
    return True


def projective_coefficient(j: int, r: tuple[int, ...]) -> int:
    """Coefficient of x^{j+|r|} in Sq(r) x^j, for x of degree one and any integer j."""
    total = sum(r)
    if j < 0:
        # 2-adic periodicity: x^j behaves like x^{j + 2^L} for 2^L large
        L = max(abs(j), total, 1).bit_length() + 2
        j += 1 << L
    return int(_multinomial_odd([j - total, *r]))


def stunted_projective(N: int, window_top: int, n: int, shift: int = 0) -> ModulePresentation:
    """H^*(P^infty_N) truncated at x^{window_top}, optionally suspended by ``shift``."""
    if N > window_top:
        raise ModuleError(f"empty window: N={N} > top={window_top}")
    alg = SubAlgebra.get(n)
    js = list(range(N, window_top + 1))
    names = [f"x^{j}" if not shift else f"s{shift}x^{j}" for j in js]
    degrees = [j + shift for j in js]
    action = {}
    for a, r in enumerate(alg.basis):
        if a == alg.unit:
            continue
        d = alg.degrees[a]
        for k, j in enumerate(js):
            if j + d <= window_top and projective_coefficient(j, r):
                action[(a, k)] = 1 << (k + d)
    return ModulePresentation(n, N + shift, window_top + shift, names, degrees, action)


def suspended_projective(N: int, window_top: int, n: int) -> ModulePresentation:
    """H^*(Sigma P^infty_N): bottom class in degree N+1, top in ``window_top``."""
    return stunted_projective(N, window_top - 1, n, shift=1)


def suspend(m: ModulePresentation, k: int) -> ModulePresentation:
    return ModulePresentation(
        m.n, m.t_min + k, m.t_max + k, list(m.names), [d + k for d in m.degrees], dict(m.action),
        m.complete,
    )


def restrict(m: ModulePresentation, n: int) -> ModulePresentation:
    """Restriction of scalars to A(n) for n <= m.n."""
    if n > m.n:
        raise ModuleError("can only restrict to a smaller subalgebra")
    big = m.algebra
    small = SubAlgebra.get(n)
    action = {}
    for (a, i), v in m.action.items():
        e = big.basis[a]
        if e in small.index:
            action[(small.index[e], i)] = v
    return ModulePresentation(n, m.t_min, m.t_max, list(m.names), list(m.degrees), action, m.complete)


def submodule_above(m: ModulePresentation, t_min: int) -> tuple[ModulePresentation, list[int]]:
    """The submodule of elements in degrees >= t_min (closed since actions raise degree).

    Returns the module and the list of original indices of its basis.
    """
    keep = [i for i in range(len(m)) if m.degrees[i] >= t_min]
    return _induced_on(m, keep, t_min, m.t_max, m.complete), keep


def truncate_above(m: ModulePresentation, t_max: int) -> ModulePresentation:
    keep = [i for i in range(len(m)) if m.degrees[i] <= t_max]
    return _induced_on(m, keep, m.t_min, t_max, m.complete and len(keep) == len(m))


def _induced_on(
    m: ModulePresentation, keep: list[int], t_min: int, t_max: int, complete: bool = False
) -> ModulePresentation:
    new = {old: k for k, old in enumerate(keep)}
    action = {}
    for (a, i), v in m.action.items():
        if i not in new:
            continue
        out = 0
        while v:
            low = v & -v
            j = low.bit_length() - 1
            if j in new:
                out |= 1 << new[j]
            v ^= low
        if out:
            action[(a, new[i])] = out
    return ModulePresentation(
        m.n, t_min, t_max, [m.names[i] for i in keep], [m.degrees[i] for i in keep], action, complete
    )


def tensor_pairs(
    m: ModulePresentation, k: ModulePresentation, t_max: int | None = None
) -> tuple[int, list[tuple[int, int]]]:
    """Window top and ordered basis pairs of ``tensor(m, k, t_max)``."""
    top = m.t_max + k.t_max if t_max is None else min(t_max, m.t_max + k.t_max)
    # a truncated factor is only exact up to its own top plus the other's bottom
    if not m.complete:
        top = min(top, m.t_max + k.t_min)
    if not k.complete:
        top = min(top, k.t_max + m.t_min)
    pairs = [(i, j) for i in range(len(m)) for j in range(len(k)) if m.degrees[i] + k.degrees[j] <= top]
    pairs.sort(key=lambda p: (m.degrees[p[0]] + k.degrees[p[1]], p))
    return top, pairs


def tensor(m: ModulePresentation, k: ModulePresentation, t_max: int | None = None) -> ModulePresentation:
    """Tensor product with the Cartan diagonal, truncated at ``t_max``."""
    if m.n != k.n:
        raise ModuleError(f"profile mismatch: A({m.n}) vs A({k.n})")
    alg = m.algebra
    top, pairs = tensor_pairs(m, k, t_max)
    index = {p: x for x, p in enumerate(pairs)}
    names = [f"{m.names[i]}*{k.names[j]}" for i, j in pairs]
    degrees = [m.degrees[i] + k.degrees[j] for i, j in pairs]
    action = {}
    for a in range(len(alg)):
        if a == alg.unit:
            continue
        split = alg.coproduct[a]
        for x, (i, j) in enumerate(pairs):
            out = 0
            for left, right in split:
                u = m.act(left, i)
                if not u:
                    continue
                w = k.act(right, j)
                if not w:
                    continue
                for ii in _bits(u):
                    for jj in _bits(w):
                        y = index.get((ii, jj))
                        if y is not None:
                            out ^= 1 << y
            if out:
                action[(a, x)] = out
    complete = m.complete and k.complete and len(pairs) == len(m) * len(k)
    return ModulePresentation(m.n, m.t_min + k.t_min, top, names, degrees, action, complete)


def direct_sum(mods: list[ModulePresentation]) -> ModulePresentation:
    n = mods[0].n
    names, degrees, action = [], [], {}
    off = 0
    for idx, m in enumerate(mods):
        if m.n != n:
            raise ModuleError("profile mismatch")
        names += [f"{nm}#{idx}" for nm in m.names]
        degrees += m.degrees
        for (a, i), v in m.action.items():
            action[(a, i + off)] = v << off
        off += len(m)
    return ModulePresentation(
        n, min(m.t_min for m in mods), max(m.t_max for m in mods), names, degrees, action,
        all(m.complete for m in mods),
    )


def quotient_algebra_module(n: int, m: int) -> ModulePresentation:
    """A(n)//A(m) = A(n) tensor_{A(m)} F_2 as a left A(n)-module."""
    big = SubAlgebra.get(n)
    small = SubAlgebra.get(m)
    # right ideal A(n) * A(m)^+ spanned by products
    ideal = RowReducer()
    for a in range(len(big)):
        for e in small.basis:
            if e == ():
                continue
            ideal.add(big.prod[a][big.index[e]])
    # complement basis: pick Milnor basis elements not in the span, low degree first
    reps = []
    reducer = RowReducer()
    for v in ideal._basis.values():
        reducer.add(v[0])
    for a in range(len(big)):
        if reducer.add(1 << a):
            reps.append(a)
    names = ["1" if big.basis[a] == () else _sq(big.basis[a]) for a in reps]
    degrees = [big.degrees[a] for a in reps]
    # express products modulo the ideal in terms of reps
    coord = RowReducer()
    for v in ideal._basis.values():
        coord.add(v[0], 0)
    for k, a in enumerate(reps):
        coord.add(1 << a, 1 << k)
    action = {}
    for b in range(len(big)):
        if b == big.unit:
            continue
        for k, a in enumerate(reps):
            prod = big.prod[b][a]
            if prod:
                tag = coord.express(prod)
                assert tag is not None
                if tag:
                    action[(b, k)] = tag
    return ModulePresentation(n, 0, max(degrees), names, degrees, action, complete=True)


def koszul_module(n: int, sigma: int, window_top: int | None = None) -> ModulePresentation:
    """The A(n-1)-module R_n^sigma: degree-sigma monomials in
    x_k = xi_k^{2^{n+1-k}} (k = 1..n+1), as the dual of the restricted coaction
    psi(x_k) = sum_{i<k} xi_i^{2^{n+1-k}} (x) x_{k-i}.
    """
    if n < 1 or sigma < 0:
        raise ModuleError("need n >= 1 and sigma >= 0")
    alg = SubAlgebra.get(n - 1)
    gen_deg = [(1 << (n + 1 - k)) * ((1 << k) - 1) for k in range(1, n + 2)]
    monos = [e for e in _compositions(sigma, n + 1)]
    monos.sort(key=lambda e: (sum(a * d for a, d in zip(e, gen_deg)), e))
    degrees = [sum(a * d for a, d in zip(e, gen_deg)) for e in monos]
    top = max(degrees) if window_top is None else window_top
    keep = [x for x in range(len(monos)) if degrees[x] <= top]
    monos = [monos[x] for x in keep]
    degrees = [degrees[x] for x in keep]
    index = {e: x for x, e in enumerate(monos)}
    names = ["".join(f"x{k + 1}^{a}" if a > 1 else f"x{k + 1}" for k, a in enumerate(e) if a) or "1" for e in monos]

    # coaction of one generator x_k: list of (xi exponent vector, target generator index)
    def gen_coaction(k: int) -> list[tuple[tuple[int, ...], int]]:
        out = []
        for i in range(0, k):
            xi = [0] * (n + 1)
            if i > 0:
                xi[i - 1] = 1 << (n + 1 - k)
            out.append((tuple(xi), k - i))
        return out

    # coaction of a monomial: product over its factors
    action: dict[tuple[int, int], int] = {}
    for x, e in enumerate(monos):
        terms: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {((0,) * (n + 1), (0,) * (n + 1)): 1}
        for k, a in enumerate(e):
            for _ in range(a):
                nxt: dict = {}
                for (xi, mono), c in terms.items():
                    for dxi, tgt in gen_coaction(k + 1):
                        new_xi = tuple(p + q for p, q in zip(xi, dxi))
                        new_mono = list(mono)
                        new_mono[tgt - 1] += 1
                        key = (new_xi, tuple(new_mono))
                        nxt[key] = nxt.get(key, 0) ^ c
                terms = {kk: v for kk, v in nxt.items() if v}
        # psi(m_x) contains xi^R (x) m_y  =>  dual action Sq(R) m_y^* has m_x^* component
        for (xi, mono), c in terms.items():
            r = normalize(xi)
            if not c or r == ():
                continue
            if r not in alg.index:
                continue
            y = index.get(mono)
            if y is None:
                continue
            a = alg.index[r]
            action[(a, y)] = action.get((a, y), 0) ^ (1 << x)
    # the transposed coaction is a right action; conjugate to get a left one
    right = {k: v for k, v in action.items() if v}
    action = {}
    for a in range(len(alg)):
        conj = _bits(alg.chi[a])
        for y in range(len(monos)):
            v = 0
            for c in conj:
                v ^= right.get((c, y), 0)
            if v:
                action[(a, y)] = v
    lo = min(degrees) if degrees else 0
    whole = window_top is None or window_top >= max(degrees, default=0)
    return ModulePresentation(n - 1, lo, max(top, lo), names, degrees, action, complete=whole)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for a in range(total, -1, -1):
        for rest in _compositions(total - a, parts - 1):
            yield (a,) + rest


def _sq(e: tuple[int, ...]) -> str:
    return "Sq(" + ",".join(map(str, e)) + ")"


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# --- text format -------------------------------------------------------------

def dumps(m: ModulePresentation, generators_only: bool = True) -> str:
    alg = m.algebra
    lines = [f"profile {m.n}", f"window {m.t_min} {m.t_max}"]
    if m.complete:
        lines.append("complete")
    for nm, d in zip(m.names, m.degrees):
        lines.append(f"gen {nm} {d}")
    keys = sorted(m.action)
    for a, i in keys:
        if generators_only and a not in alg.generators:
            continue
        tgt = " + ".join(m.names[j] for j in _bits(m.action[(a, i)]))
        lines.append(f"act Sq({','.join(map(str, alg.basis[a]))}) {m.names[i]} = {tgt}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> ModulePresentation:
    n = None
    window = None
    complete = False
    names: list[str] = []
    degrees: list[int] = []
    acts: list[tuple[int, str, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "profile":
                n = int(rest[0])
            elif head == "window":
                window = (int(rest[0]), int(rest[1]))
            elif head == "complete":
                complete = True
            elif head == "gen":
                names.append(rest[0])
                degrees.append(int(rest[1]))
            elif head == "act":
                lhs, rhs = line[3:].split("=", 1)
                op, elem = lhs.split()
                tgts = [t.strip() for t in rhs.split("+") if t.strip() and t.strip() != "0"]
                acts.append((lineno, op, elem, tgts))
            else:
                raise ModuleError(f"unknown directive {head!r}")
        except (IndexError, ValueError) as exc:
            raise ModuleError(f"line {lineno}: {exc}") from exc
    if n is None or window is None:
        raise ModuleError("missing profile or window header")
    alg = SubAlgebra.get(n)
    index = {nm: i for i, nm in enumerate(names)}
    gen_action: dict[tuple[int, int], int] = {}
    full_action: dict[tuple[int, int], int] = {}
    for lineno, op, elem, tgts in acts:
        e = parse_milnor(op)
        if e not in alg.index:
            raise ModuleError(f"line {lineno}: Sq{e} not in A({n})")
        for nm in [elem, *tgts]:
            if nm not in index:
                raise ModuleError(f"line {lineno}: unknown element {nm!r}")
        v = 0
        for t in tgts:
            v ^= 1 << index[t]
        a = alg.index[e]
        target = gen_action if a in alg.generators else full_action
        target[(a, index[elem])] = target.get((a, index[elem]), 0) ^ v
    m = from_generator_action(n, window[0], window[1], names, degrees, gen_action)
    for key, v in full_action.items():
        m.action[key] = v
    m.complete = complete
    return m


def load(path: str | Path) -> ModulePresentation:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(m: ModulePresentation, path: str | Path) -> None:
    Path(path).write_text(dumps(m), encoding="utf-8")


def induced_module(w: ModulePresentation, n: int, t_max: int | None = None):
    """A(n) tensor_{A(m)} W for an A(m)-module W, m = w.n < n.

    Returns the module and, for each basis element, the pure tensor (b, j)
    it stands for (b a Milnor index of A(n), j an index of W).
    """
    if w.n >= n:
        raise ModuleError("induction needs a larger algebra")
    big = SubAlgebra.get(n)
    small = w.algebra
    top = w.t_max + big.top_degree if t_max is None else t_max
    pairs = [
        (b, j) for j in range(len(w)) for b in range(len(big)) if w.degrees[j] + big.degrees[b] <= top
    ]
    pairs.sort(key=lambda p: (w.degrees[p[1]] + big.degrees[p[0]], p[1], p[0]))
    pos = {p: k for k, p in enumerate(pairs)}

    def vec(b_mask: int, j: int) -> int:
        out = 0
        for b in _bits(b_mask):
            k = pos.get((b, j))
            if k is not None:
                out |= 1 << k
        return out

    # relations b c (x) w = b (x) c w for c in the small augmentation ideal
    rel = RowReducer()
    for c_small, e in enumerate(small.basis):
        if e == ():
            continue
        c = big.index[e]
        for j in range(len(w)):
            cw = w.act(c_small, j)
            for b in range(len(big)):
                v = vec(big.prod[b][c], j)
                for jj in _bits(cw):
                    v ^= vec(1 << b, jj)
                rel.add(v)
    coord = RowReducer()
    for v, _ in list(rel._basis.values()):
        coord.add(v, 0)
    reps = []
    for k in range(len(pairs)):
        if coord.add(1 << k, 1 << len(reps)):
            reps.append(k)
    action = {}
    for a in range(len(big)):
        if a == big.unit:
            continue
        for x, k in enumerate(reps):
            b, j = pairs[k]
            v = vec(big.prod[a][b], j)
            if v:
                tag = coord.express(v)
                if tag:
                    action[(a, x)] = tag
    names = [
        (w.names[pairs[k][1]] if big.basis[pairs[k][0]] == () else f"{_sq(big.basis[pairs[k][0]])}.{w.names[pairs[k][1]]}")
        for k in reps
    ]
    degrees = [w.degrees[pairs[k][1]] + big.degrees[pairs[k][0]] for k in reps]
    lo = min(degrees, default=w.t_min)
    complete = w.complete and t_max is None
    m = ModulePresentation(n, lo, max(top, lo), names, degrees, action, complete)

    def pure(b_mask: int, j: int) -> int:
        """Coordinates of (sum of b) (x) w_j in the returned basis."""
        tag = coord.express(vec(b_mask, j))
        if tag is None:
            raise ModuleError("tensor lies above the truncation")
        return tag

    m.pure_tensor = pure
    return m, [pairs[k] for k in reps]
