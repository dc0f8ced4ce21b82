"""Milnor-basis arithmetic in the finite subalgebras A(n) of the mod 2 Steenrod algebra."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .f2linalg import BitMatrix, solve

Exponents = tuple[int, ...]


def normalize(r: Iterable[int]) -> Exponents:
    r = list(r)
    while r and r[-1] == 0:
        r.pop()
    if any(x < 0 for x in r):
        raise ValueError(f"negative Milnor exponent in {r}")
    return tuple(r)


def milnor_degree(r: Exponents) -> int:
    return sum(x * ((1 << (i + 1)) - 1) for i, x in enumerate(r))


def in_profile(r: Exponents, n: int) -> bool:
    """Sq(r1, r2, ...) lies in A(n) iff r_i < 2^(n+2-i)."""
    if len(r) > n + 1:
        return False
    return all(x < (1 << (n + 1 - i)) for i, x in enumerate(r))


@dataclass(frozen=True, order=True)
class MilnorElement:
    exponents: Exponents = ()

    def __post_init__(self):
        object.__setattr__(self, "exponents", normalize(self.exponents))

    @property
    def degree(self) -> int:
        return milnor_degree(self.exponents)

    def __str__(self) -> str:
        return "Sq(" + ",".join(map(str, self.exponents)) + ")"


_SQ_RE = re.compile(r"^\s*Sq\(([\d,\s]*)\)\s*$")


def parse_milnor(text: str) -> Exponents:
    m = _SQ_RE.match(text)
    if not m:
        raise ValueError(f"not a Milnor basis element: {text!r}")
    body = m.group(1).strip()
    return normalize(int(x) for x in body.split(",")) if body else ()


def _row_choices(r: int, ncols: int, caps: list[int]):
    """Vectors (x_1..x_ncols) with sum 2^j x_j <= r and x_j <= caps[j-1]."""
    def rec(j: int, remaining: int):
        if j > ncols:
            yield ()
            return
        w = 1 << j
        for x in range(min(remaining // w, caps[j - 1]) + 1):
            for rest in rec(j + 1, remaining - w * x):
                yield (x,) + rest
    yield from rec(1, r)


@lru_cache(maxsize=None)
def milnor_product(r: Exponents, s: Exponents) -> frozenset[Exponents]:
    """Product Sq(r) * Sq(s) in the full Steenrod algebra, as a set of basis terms."""
    rows, cols = len(r), len(s)
    result: dict[Exponents, int] = {}
    # X[i][j], i = 1..rows, j = 1..cols; x_{i0} and x_{0j} are determined
    def rec(i: int, colsum: list[int], X: list[tuple[int, ...]]):
        if i > rows:
            _emit(X, colsum)
            return
        caps = [s[j] - colsum[j] for j in range(cols)]
        for vec in _row_choices(r[i - 1], cols, caps):
            rec(i + 1, [c + v for c, v in zip(colsum, vec)], X + [vec])

    def _emit(X: list[tuple[int, ...]], colsum: list[int]):
        def entry(i: int, j: int) -> int:
            if i == 0 and j == 0:
                return 0
            if i == 0:
                return s[j - 1] - colsum[j - 1]
            if j == 0:
                return r[i - 1] - sum((1 << jj) * X[i - 1][jj - 1] for jj in range(1, cols + 1))
            return X[i - 1][j - 1]

        t = []
        for nd in range(1, rows + cols + 1):
            acc = 0
            for i in range(max(0, nd - cols), min(rows, nd) + 1):
                e = entry(i, nd - i)
                if acc & e:
                    return
                acc |= e
            t.append(acc)
        key = normalize(t)
        result[key] = result.get(key, 0) ^ 1

    rec(1, [0] * cols, [])
    return frozenset(k for k, v in result.items() if v)


def basis(n: int, degree: int | None = None) -> list[MilnorElement]:
    alg = SubAlgebra.get(n)
    if degree is None:
        return [MilnorElement(e) for e in alg.basis]
    return [MilnorElement(alg.basis[i]) for i in alg.by_degree.get(degree, [])]


class SubAlgebra:
    """Precomputed tables for A(n).

    Basis elements are indexed in canonical order (degree, then exponents);
    products are stored as bitmasks over those indices.
    """

    _cache: dict[int, "SubAlgebra"] = {}

    @classmethod
    def get(cls, n: int) -> "SubAlgebra":
        if n < 0:
            raise ValueError("n must be non-negative")
        if n not in cls._cache:
            cls._cache[n] = cls(n)
        return cls._cache[n]

    def __init__(self, n: int):
        self.n = n
        ranges = [range(1 << (n + 1 - i)) for i in range(n + 1)]
        elems = {normalize(e) for e in itertools.product(*ranges)}
        self.basis: list[Exponents] = sorted(elems, key=lambda e: (milnor_degree(e), e))
        self.index = {e: i for i, e in enumerate(self.basis)}
        self.degrees = [milnor_degree(e) for e in self.basis]
        self.top_degree = max(self.degrees)
        self.by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            self.by_degree.setdefault(d, []).append(i)
        self.unit = self.index[()]
        size = len(self.basis)
        self.prod: list[list[int]] = [[0] * size for _ in range(size)]
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                mask = 0
                for term in milnor_product(a, b):
                    mask |= 1 << self.index[term]
                self.prod[i][j] = mask
        # Cartan diagonal: Sq(R) -> sum over R' + R'' = R of Sq(R') x Sq(R'')
        self.coproduct: list[list[tuple[int, int]]] = []
        for e in self.basis:
            pairs = []
            for left in itertools.product(*[range(x + 1) for x in e]):
                right = tuple(x - y for x, y in zip(e, left))
                pairs.append((self.index[normalize(left)], self.index[normalize(right)]))
            self.coproduct.append(pairs)
        self.generators = [self.index[(1 << k,)] for k in range(n + 1)]
        # conjugation: sum over R' + R'' = R of Sq(R') chi(Sq(R'')) vanishes for R != 0
        self.chi: list[int] = [0] * size
        for k in sorted(range(size), key=lambda x: self.degrees[x]):
            if k == self.unit:
                self.chi[k] = 1 << k
                continue
            acc = 0
            for left, right in self.coproduct[k]:
                if left == self.unit:
                    continue
                for c in _bits(self.chi[right]):
                    acc ^= self.prod[left][c]
            self.chi[k] = acc
        self._decomp: list[list[tuple[int, int]]] | None = None

    def __len__(self) -> int:
        return len(self.basis)

    def multiply(self, a: int, b: int) -> list[int]:
        return _bits(self.prod[a][b])

    def decompositions(self) -> list[list[tuple[int, int]]]:
        """For each positive-degree basis element, pairs (generator, element) with
        sum of products equal to it. Used to extend generator actions to all of A(n)."""
        if self._decomp is not None:
            return self._decomp
        out: list[list[tuple[int, int]]] = [[] for _ in self.basis]
        for d in sorted(self.by_degree):
            if d == 0:
                continue
            targets = self.by_degree[d]
            cols = []
            for g in self.generators:
                for c in self.by_degree.get(d - self.degrees[g], []):
                    cols.append((g, c))
            pos = {t: k for k, t in enumerate(targets)}
            # matrix rows = targets, columns = (g, c) products
            rows = [0] * len(targets)
            for k, (g, c) in enumerate(cols):
                for t in self.multiply(g, c):
                    rows[pos[t]] |= 1 << k
            m = BitMatrix(len(targets), len(cols), rows)
            for t in targets:
                x = solve(m, 1 << pos[t])
                if x is None:
                    raise ArithmeticError(f"{self.basis[t]} is not decomposable in A({self.n})")
                out[t] = [cols[k] for k in _bits(x)]
        self._decomp = out
        return out


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class SteenrodSum:
    """Formal GF(2) sum of Milnor basis elements of A(n)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Iterable[Exponents | MilnorElement] = ()):
        self.n = n
        acc: set[Exponents] = set()
        for t in terms:
            e = t.exponents if isinstance(t, MilnorElement) else normalize(t)
            if not in_profile(e, n):
                raise ValueError(f"Sq{e} is not in A({n})")
            acc ^= {e}
        degs = {milnor_degree(e) for e in acc}
        if len(degs) > 1:
            raise ValueError("inhomogeneous sum")
        self.terms = frozenset(acc)

    @classmethod
    def sq(cls, n: int, *r: int) -> "SteenrodSum":
        return cls(n, [normalize(r)])

    @property
    def degree(self) -> int | None:
        return milnor_degree(next(iter(self.terms))) if self.terms else None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SteenrodSum):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, self.terms))

    def __add__(self, other: "SteenrodSum") -> "SteenrodSum":
        _check_same(self, other)
        return SteenrodSum(self.n, self.terms ^ other.terms)

    def __mul__(self, other: "SteenrodSum") -> "SteenrodSum":
        return product(self, other)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(MilnorElement(e)) for e in sorted(self.terms))


def _check_same(a: SteenrodSum, b: SteenrodSum) -> None:
    if a.n != b.n:
        raise ValueError(f"profile mismatch: A({a.n}) vs A({b.n})")


def product(a: SteenrodSum, b: SteenrodSum) -> SteenrodSum:
    _check_same(a, b)
    acc: set[Exponents] = set()
    for x in a.terms:
        for y in b.terms:
            acc ^= milnor_product(x, y)
    return SteenrodSum(a.n, acc)


# --- admissible forms (display only) ---------------------------------------

def admissible_sequences(degree: int) -> list[tuple[int, ...]]:
    """Admissible sequences (i1 >= 2 i2, ...) of total degree ``degree``, all entries > 0."""
    out = []

    def rec(remaining: int, bound: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        # last entry chosen so far caps the next at floor(last/2)
        for i in range(min(remaining, bound), 0, -1):
            rec(remaining - i, i // 2, prefix + (i,))

    if degree == 0:
        return [()]
    rec(degree, degree, ())
    return sorted(out, reverse=True)


@lru_cache(maxsize=None)
def word_to_milnor(word: tuple[int, ...]) -> frozenset[Exponents]:
    acc: frozenset[Exponents] = frozenset({()})
    for i in word:
        nxt: set[Exponents] = set()
        for e in acc:
            nxt ^= milnor_product(e, normalize((i,)))
        acc = frozenset(nxt)
    return acc


@lru_cache(maxsize=None)
def _admissible_change(degree: int):
    seqs = admissible_sequences(degree)
    milnor = sorted({e for e in _all_milnor(degree)})
    pos = {e: k for k, e in enumerate(milnor)}
    rows = [0] * len(milnor)
    for k, w in enumerate(seqs):
        for e in word_to_milnor(w):
            rows[pos[e]] |= 1 << k
    return seqs, pos, BitMatrix(len(milnor), len(seqs), rows)


def _all_milnor(degree: int) -> list[Exponents]:
    out = []

    def rec(i: int, remaining: int, prefix: list[int]):
        w = (1 << i) - 1
        if w > remaining:
            if remaining == 0:
                out.append(normalize(prefix))
            return
        for x in range(remaining // w + 1):
            rec(i + 1, remaining - w * x, prefix + [x])

    rec(1, degree, [])
    return out


def to_admissible(a: SteenrodSum) -> list[tuple[int, ...]]:
    """Express ``a`` as a sum of admissible words Sq^{i1} Sq^{i2} ..."""
    if not a.terms:
        return []
    seqs, pos, m = _admissible_change(a.degree)
    target = 0
    for e in a.terms:
        target |= 1 << pos[e]
    x = solve(m, target)
    assert x is not None, "admissible monomials span every degree"
    return [seqs[k] for k in _bits(x)]


def format_admissible(words: list[tuple[int, ...]]) -> str:
    if not words:
        return "0"
    return " + ".join(" ".join(f"Sq^{i}" for i in w) if w else "1" for w in words)
