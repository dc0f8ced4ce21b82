"""Dense linear algebra over GF(2).

Rows are stored as Python ints used as bitsets: bit ``j`` of row ``i`` is the
entry ``(i, j)``. Python ints are arbitrary-width word arrays, so XOR of two
rows is a word-wide operation.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class BitMatrix:
    """Immutable ``rows x cols`` matrix over GF(2)."""

    __slots__ = ("_rows", "_ncols", "_data")

    def __init__(self, nrows: int, ncols: int, data: Iterable[int] = ()):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative dimension")
        mask = (1 << ncols) - 1
        rows = tuple(int(r) & mask for r in data)
        if not rows:
            rows = (0,) * nrows
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        self._rows = nrows
        self._ncols = ncols
        self._data = rows

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        data = []
        for row in entries:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            data.append(pack(row))
        return cls(len(entries), ncols, data)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return self._rows, self._ncols

    def row(self, i: int) -> int:
        return self._data[i]

    def row_ints(self) -> tuple[int, ...]:
        return self._data

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self._rows and 0 <= j < self._ncols):
            raise IndexError(ij)
        return (self._data[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [unpack(r, self._ncols) for r in self._data]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self._rows, self._ncols, self._data))

    def __repr__(self) -> str:
        body = "; ".join("".join(map(str, r)) for r in self.to_lists())
        return f"BitMatrix({self._rows}x{self._ncols}: {body})"

    def transpose(self) -> "BitMatrix":
        out = [0] * self._ncols
        for i, r in enumerate(self._data):
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(self._ncols, self._rows, out)

    def matvec(self, v: int) -> int:
        """Product ``M v`` with ``v`` packed as an int of length ``cols``."""
        out = 0
        for i, r in enumerate(self._data):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self._ncols != other._rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for r in self._data:
            acc = 0
            while r:
                low = r & -r
                acc ^= other._data[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return BitMatrix(self._rows, other._ncols, out)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self._rows, self._ncols, [a ^ b for a, b in zip(self._data, other._data)])

    def is_zero(self) -> bool:
        return not any(self._data)


def pack(bits: Sequence[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if b & 1:
            v |= 1 << j
    return v


def unpack(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


def _eliminate(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    # lowest column first, lowest available row as pivot
    rows = list(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        p = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    rows, pivots = _eliminate(list(m.row_ints()), m.cols)
    return BitMatrix(m.rows, m.cols, rows), pivots


def rank(m: BitMatrix) -> int:
    return len(rref(m)[1])


def rank_of_rows(rows: Iterable[int], ncols: int | None = None) -> int:
    """Rank of a list of packed row vectors."""
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            h = v.bit_length() - 1
            if h in basis:
                v ^= basis[h]
            else:
                basis[h] = v
                break
    return len(basis)


def kernel_basis(m: BitMatrix) -> list[int]:
    """Basis of ``{v : M v = 0}``, packed as ints of length ``cols``."""
    rows, pivots = _eliminate(list(m.row_ints()), m.cols)
    pivset = set(pivots)
    out = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = 1 << f
        for i, c in enumerate(pivots):
            if (rows[i] >> f) & 1:
                v |= 1 << c
        out.append(v)
    return out


def solve(m: BitMatrix, b: int | Sequence[int]) -> int | None:
    """Return some packed ``x`` with ``M x = b``, or ``None``."""
    if not isinstance(b, int):
        if len(b) != m.rows:
            raise ValueError(f"rhs has length {len(b)}, matrix has {m.rows} rows")
        b = pack(b)
    elif b >> m.rows:
        raise ValueError("rhs has bits beyond the row count")
    # augment: column m.cols carries b
    aug = [r | (((b >> i) & 1) << m.cols) for i, r in enumerate(m.row_ints())]
    rows, pivots = _eliminate(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = 0
    for i, c in enumerate(pivots):
        if (rows[i] >> m.cols) & 1:
            x |= 1 << c
    return x


class RowReducer:
    """Incremental echelon basis of a subspace, with optional tags.

    Each added vector carries a tag vector (e.g. its preimage) that is
    combined in lockstep, so ``reduce`` can express a vector in terms of the
    original generators.
    """

    def __init__(self) -> None:
        self._basis: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._basis)

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        while v:
            h = v.bit_length() - 1
            hit = self._basis.get(h)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        v, tag = self.reduce(v, tag)
        if not v:
            return False
        self._basis[v.bit_length() - 1] = (v, tag)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def express(self, v: int) -> int | None:
        """Tag combination producing ``v``, or ``None`` if ``v`` is outside the span."""
        r, tag = self.reduce(v, 0)
        return tag if r == 0 else None
