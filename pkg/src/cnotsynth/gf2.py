"""Dense GF(2) linear algebra for parity matrices.

A parity matrix is an n x n binary matrix whose row i holds the parity
(XOR combination) output on qubit i.  Rows are stored as numpy uint8
vectors so row additions are single vectorized XORs.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ParityMatrix",
    "InconsistentStateError",
    "identity",
    "from_rows",
    "is_invertible",
    "inverse",
    "rank",
    "hamming_weight",
    "hamming_distance",
    "solve_combination",
    "random_invertible",
    "random_walk_matrix",
    "transpose",
    "apply_row_ops",
    "parse_matrix",
    "format_matrix",
    "load_matrix",
    "save_matrix",
]


class InconsistentStateError(RuntimeError):
    """A GF(2) solve had no solution; signals a broken invariant upstream."""


class ParityMatrix:
    """Square binary matrix with in-place row operations.

    Args:
        bits: Square array-like of 0/1 entries.  A copy is stored as uint8.
    """

    __slots__ = ("bits",)

    def __init__(self, bits) -> None:
        arr = np.array(bits, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"parity matrix must be square, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("parity matrix entries must be 0 or 1")
        self.bits = arr

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    def copy(self) -> "ParityMatrix":
        return ParityMatrix(self.bits)

    def row(self, i: int) -> np.ndarray:
        return self.bits[i]

    def column(self, j: int) -> np.ndarray:
        return self.bits[:, j]

    def row_add(self, src: int, dst: int) -> "ParityMatrix":
        """XOR row ``src`` into row ``dst`` (one CNOT worth of work).

        Equivalent to left-multiplying by the elementary matrix that is the
        identity with entry (dst, src) set.
        """
        if src == dst:
            raise ValueError(f"row_add requires src != dst, got {src}")
        n = self.n
        if not (0 <= src < n and 0 <= dst < n):
            raise ValueError(f"row indices out of range for n={n}: {src}, {dst}")
        self.bits[dst] ^= self.bits[src]
        return self

    def __eq__(self, other) -> bool:
        if isinstance(other, ParityMatrix):
            return self.bits.shape == other.bits.shape and bool(
                np.array_equal(self.bits, other.bits)
            )
        return NotImplemented

    def __hash__(self):
        raise TypeError("ParityMatrix is mutable and unhashable")

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.bits, np.eye(self.n, dtype=np.uint8)))

    def __repr__(self) -> str:
        rows = ["".join(str(int(b)) for b in row) for row in self.bits]
        return "ParityMatrix([{}])".format(", ".join(rows))


def identity(n: int) -> ParityMatrix:
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return ParityMatrix(np.eye(n, dtype=np.uint8))


def from_rows(rows: Sequence[str]) -> ParityMatrix:
    """Build a matrix from bitstrings, e.g. ``["10", "11"]``."""
    return ParityMatrix([[int(c) for c in r] for r in rows])


def row_add(m: ParityMatrix, src: int, dst: int) -> ParityMatrix:
    """Module-level alias for :meth:`ParityMatrix.row_add` (in place)."""
    return m.row_add(src, dst)


def _echelon_rank(bits: np.ndarray) -> int:
    a = bits.copy()
    n_rows, n_cols = a.shape
    r = 0
    for col in range(n_cols):
        pivots = np.nonzero(a[r:, col])[0]
        if pivots.size == 0:
            continue
        piv = r + int(pivots[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        below = np.nonzero(a[r + 1 :, col])[0]
        if below.size:
            a[r + 1 + below] ^= a[r]
        r += 1
        if r == n_rows:
            break
    return r


def rank(m: ParityMatrix) -> int:
    """GF(2) rank by Gaussian elimination."""
    return _echelon_rank(m.bits)


def is_invertible(m: ParityMatrix) -> bool:
    return rank(m) == m.n


def inverse(m: ParityMatrix) -> ParityMatrix:
    """GF(2) inverse by Gauss-Jordan elimination.

    Raises:
        ValueError: matrix is singular.
    """
    n = m.n
    a = m.bits.copy()
    out = np.eye(n, dtype=np.uint8)
    for col in range(n):
        pivots = np.nonzero(a[col:, col])[0]
        if pivots.size == 0:
            raise ValueError("matrix is singular over GF(2)")
        piv = col + int(pivots[0])
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            out[[col, piv]] = out[[piv, col]]
        others = np.nonzero(a[:, col])[0]
        others = others[others != col]
        if others.size:
            a[others] ^= a[col]
            out[others] ^= out[col]
    return ParityMatrix(out)


def transpose(m: ParityMatrix) -> ParityMatrix:
    return ParityMatrix(m.bits.T)


def hamming_weight(v) -> int:
    """Number of ones in a bit vector."""
    return int(np.count_nonzero(np.asarray(v)))


def hamming_distance(x, y) -> int:
    """Number of positions where two equal-length bit vectors differ."""
    xa = np.asarray(x)
    ya = np.asarray(y)
    if xa.shape != ya.shape:
        raise ValueError(f"length mismatch: {xa.shape} vs {ya.shape}")
    return int(np.count_nonzero(xa != ya))


def solve_combination(m: ParityMatrix, active: Iterable[int], i: int) -> set[int]:
    """Rows of ``active`` whose XOR equals row i plus the i-th unit vector.

    Solves over the submatrix restricted to the active rows and columns;
    the synthesis driver guarantees that submatrix is invertible, so the
    solution is unique.  Pivots are chosen lowest-index-first, which makes
    the elimination order (and hence everything downstream) deterministic.

    Raises:
        InconsistentStateError: no subset of the active rows works, which
            means a caller invariant was violated.
    """
    act = sorted(set(active))
    if i not in act:
        raise ValueError(f"row {i} is not in the active set")
    n = m.n
    if not all(0 <= v < n for v in act):
        raise ValueError("active indices out of range")

    target_full = m.bits[i].copy()
    target_full[i] ^= 1
    act_arr = np.array(act, dtype=np.intp)

    # Solve A^T x = t on the active submatrix, x marking chosen rows.
    a = m.bits[np.ix_(act_arr, act_arr)].T.copy()
    t = target_full[act_arr].copy()
    k = len(act)
    pivot_of_col: list[int] = [-1] * k
    r = 0
    for col in range(k):
        pivots = np.nonzero(a[r:, col])[0]
        if pivots.size == 0:
            continue
        piv = r + int(pivots[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            t[[r, piv]] = t[[piv, r]]
        others = np.nonzero(a[:, col])[0]
        others = others[others != r]
        if others.size:
            a[others] ^= a[r]
            t[others] ^= t[r]
        pivot_of_col[col] = r
        r += 1
        if r == k:
            break

    x = np.zeros(k, dtype=np.uint8)
    for col in range(k):
        if pivot_of_col[col] >= 0:
            x[col] = t[pivot_of_col[col]]
    # Rows without pivots must have zero targets, else the system is
    # inconsistent; free columns default to 0 which keeps the result the
    # unique solution whenever the submatrix is invertible.
    result = {act[j] for j in range(k) if x[j]}

    check = np.zeros(n, dtype=np.uint8)
    for j in result:
        check ^= m.bits[j]
    if not np.array_equal(check, target_full):
        raise InconsistentStateError(
            f"no active-row combination equals row {i} + e_{i}; "
            "upstream invariant broken"
        )
    return result


def apply_row_ops(m: ParityMatrix, ops: Iterable[tuple[int, int]]) -> ParityMatrix:
    """Replay (src, dst) row additions on a copy of ``m``."""
    out = m.copy()
    for src, dst in ops:
        out.row_add(src, dst)
    return out


def random_invertible(n: int, rng: np.random.Generator) -> ParityMatrix:
    """Uniform draw from GL_2(n) by rejection sampling.

    Acceptance probability tends to prod(1 - 2^-k) ~ 0.289, which is fine
    for the dimensions this package targets (n <= a few hundred).
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    while True:
        bits = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if _echelon_rank(bits) == n:
            return ParityMatrix(bits)


def random_walk_matrix(n: int, k: int, rng: np.random.Generator) -> ParityMatrix:
    """Identity with ``k`` random row additions applied (always invertible)."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if k < 0:
        raise ValueError("step count must be >= 0")
    m = identity(n)
    for _ in range(k):
        src = int(rng.integers(0, n))
        dst = int(rng.integers(0, n - 1))
        if dst >= src:
            dst += 1
        m.row_add(src, dst)
    return m


def parse_matrix(text: str) -> ParityMatrix:
    """Parse the fixture format: first line n, then n lines of '0'/'1'."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ValueError(f"first line must be the dimension, got {lines[0]!r}") from exc
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        if len(ln) != n or any(c not in "01" for c in ln):
            raise ValueError(f"bad matrix row {ln!r}")
        rows.append([int(c) for c in ln])
    return ParityMatrix(rows)


def format_matrix(m: ParityMatrix) -> str:
    body = "\n".join("".join(str(int(b)) for b in row) for row in m.bits)
    return f"{m.n}\n{body}\n"


def load_matrix(path) -> ParityMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def save_matrix(m: ParityMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(m))
