import itertools

from hypothesis import given
from hypothesis import strategies as st

from tmfmi.f2linalg import BitMatrix, RowReducer, kernel_basis, rank, rank_of_rows, rref, solve


def brute_image(m: BitMatrix) -> set[int]:
    return {m.matvec(v) for v in range(1 << m.cols)}


def brute_kernel(m: BitMatrix) -> set[int]:
    return {v for v in range(1 << m.cols) if m.matvec(v) == 0}


def span(vectors) -> set[int]:
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return out


def all_matrices(max_dim=4):
    for r in range(1, max_dim + 1):
        for c in range(1, max_dim + 1):
            for rows in itertools.product(range(1 << c), repeat=r):
                yield BitMatrix(r, c, rows)


def test_exhaustive_up_to_4x4():
    count = 0
    for m in all_matrices():
        image = brute_image(m)
        kernel = brute_kernel(m)
        k = rank(m)
        assert 1 << k == len(image)
        assert rank_of_rows(m.row_ints()) == k
        basis = kernel_basis(m)
        assert len(basis) == m.cols - k
        assert span(basis) == kernel
        # one solvable and one (when possible) unsolvable right-hand side
        b = max(image)
        x = solve(m, b)
        assert x is not None and m.matvec(x) == b
        missing = next((b for b in range(1 << m.rows) if b not in image), None)
        if missing is not None:
            assert solve(m, missing) is None
        count += 1
    assert count == sum((1 << (r * c)) for r in range(1, 5) for c in range(1, 5))


matrices = st.integers(1, 10).flatmap(
    lambda r: st.integers(1, 10).flatmap(
        lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r).map(lambda rows: BitMatrix(r, c, rows))
    )
)


@given(matrices)
def test_rank_equals_transpose_rank(m):
    assert rank(m) == rank(m.transpose())


@given(matrices)
def test_rref_is_reduced(m):
    red, pivots = rref(m)
    assert len(pivots) == rank(m)
    for i, c in enumerate(pivots):
        assert [red[j, c] for j in range(m.rows)] == [int(j == i) for j in range(m.rows)]


@given(matrices, st.data())
def test_solve_roundtrip(m, data):
    x = data.draw(st.integers(0, (1 << m.cols) - 1))
    b = m.matvec(x)
    y = solve(m, b)
    assert y is not None and m.matvec(y) == b


@given(matrices)
def test_kernel_vectors_vanish(m):
    for v in kernel_basis(m):
        assert m.matvec(v) == 0


@given(matrices, matrices)
def test_matmul_matches_composition(a, b):
    if a.cols != b.rows:
        b = BitMatrix(a.cols, b.cols, [b.row(i % b.rows) for i in range(a.cols)])
    ab = a @ b
    for v in range(min(1 << b.cols, 64)):
        assert ab.matvec(v) == a.matvec(b.matvec(v))


@given(st.lists(st.integers(0, 255), max_size=12), st.integers(0, 255))
def test_row_reducer_express(vectors, probe):
    red = RowReducer()
    for i, v in enumerate(vectors):
        red.add(v, 1 << i)
    assert len(red) == rank_of_rows(vectors)
    tag = red.express(probe)
    assert (probe in span(vectors)) == (tag is not None)
    if tag is not None:
        acc = 0
        for i, v in enumerate(vectors):
            if tag >> i & 1:
                acc ^= v
        assert acc == probe
