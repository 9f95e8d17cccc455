"""Spectral machinery: Perron values, equitable quotients, exact polynomials.

Two arithmetic regimes coexist on purpose and are kept separate:

* float64 + power iteration for Perron values of nonnegative symmetric
  matrices (all-ones start, Rayleigh-change and residual stopping tests,
  per-block handling for disconnected inputs);
* exact integer/rational arithmetic for quotient matrices, characteristic
  polynomials (Faddeev-LeVerrier over Python ints) and root isolation
  (bisection with exact sign evaluation at dyadic rationals).

Every identity check downstream compares a float route against an exact
route; nothing here collapses the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graphs import Graph


class ConvergenceError(RuntimeError):
    """Power iteration hit its cap; .best carries the last estimate."""

    def __init__(self, message: str, best: "PerronData"):
        super().__init__(message)
        self.best = best


class CellSpreadError(ValueError):
    """A vector is not constant on a partition cell within tolerance."""

    def __init__(self, cell: int, spread: float, tol: float):
        super().__init__(
            f"cell {cell} spread {spread:.3e} exceeds tolerance {tol:.3e}")
        self.cell = cell
        self.spread = spread


@dataclass(frozen=True)
class PerronData:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int


def adjacency_matrix(g: Graph) -> np.ndarray:
    m = np.zeros((g.n, g.n))
    for u in range(g.n):
        row = g.rows[u]
        while row:
            v = (row & -row).bit_length() - 1
            row &= row - 1
            m[u, v] = 1.0
    return m


def signless_laplacian(g: Graph) -> np.ndarray:
    """Q = D + A."""
    m = adjacency_matrix(g)
    m[np.diag_indices(g.n)] = [g.degree(v) for v in range(g.n)]
    return m


def alpha_matrix(g: Graph, alpha: int) -> np.ndarray:
    """alpha*D + A for alpha in {0, 1} (the two cases the toolkit uses)."""
    if alpha == 0:
        return adjacency_matrix(g)
    if alpha == 1:
        return signless_laplacian(g)
    raise ValueError("alpha must be 0 or 1")


def _blocks(m: np.ndarray) -> list[list[int]]:
    # connected components of the nonzero off-diagonal pattern
    n = m.shape[0]
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            v = stack.pop()
            for u in range(n):
                if not seen[u] and u != v and m[v, u] != 0.0:
                    seen[u] = True
                    comp.append(u)
                    stack.append(u)
        out.append(sorted(comp))
    return out


def perron(m: np.ndarray, tol: float = 1e-12, max_iterations: int = 10 ** 6) -> PerronData:
    """Largest eigenvalue and positive eigenvector of a nonnegative
    symmetric matrix, by power iteration from the all-ones vector.

    Converged when the Rayleigh-quotient change drops below tol AND the
    infinity-norm residual ||M x - value x|| drops below 10*tol. For a
    block-diagonal matrix each block is iterated separately, the block with
    the largest value wins and the returned vector is zero off that block.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError("matrix must be square and nonempty")
    if (m < 0).any():
        raise ValueError("matrix must be entrywise nonnegative")
    if (m != m.T).any():
        raise ValueError("matrix must be symmetric")

    n = m.shape[0]
    best: tuple[float, np.ndarray, float, int] | None = None
    total_iterations = 0
    for block in _blocks(m):
        if len(block) == 1:
            i = block[0]
            lam, vec, resid, its = float(m[i, i]), np.array([1.0]), 0.0, 0
        else:
            sub = m[np.ix_(block, block)]
            x = np.ones(len(block)) / np.sqrt(len(block))
            lam_prev = None
            lam = 0.0
            resid = np.inf
            for its in range(1, max_iterations + 1):
                y = sub @ x
                lam = float(x @ y)
                resid = float(np.max(np.abs(y - lam * x)))
                if lam_prev is not None and abs(lam - lam_prev) < tol and resid < 10 * tol:
                    break
                lam_prev = lam
                norm = float(np.linalg.norm(y))
                x = y / norm
            else:
                vec = np.zeros(n)
                vec[block] = x
                raise ConvergenceError(
                    f"power iteration did not converge in {max_iterations} "
                    f"iterations (residual {resid:.3e})",
                    PerronData(lam, vec, resid, max_iterations))
            vec = x
        total_iterations += its
        if best is None or lam > best[0]:
            full = np.zeros(n)
            full[block] = vec
            best = (lam, full, resid, its)
    assert best is not None
    return PerronData(best[0], best[1], best[2], total_iterations)


def perron_q(g: Graph, tol: float = 1e-12) -> PerronData:
    """Perron data of the signless Laplacian."""
    return perron(signless_laplacian(g), tol)


def perron_rho(g: Graph, tol: float = 1e-12) -> PerronData:
    """Adjacency spectral radius, iterated on A+I to dodge the bipartite
    stall (A of a bipartite graph has symmetric spectrum and plain power
    iteration never meets the residual gate). Same eigenvector, same
    residual: (A+I)x - (r+1)x == Ax - rx."""
    shifted = adjacency_matrix(g)
    shifted[np.diag_indices(g.n)] += 1.0
    pd = perron(shifted, tol)
    return PerronData(pd.value - 1.0, pd.vector, pd.residual, pd.iterations)


# ---------------------------------------------------------------------------
# partitions and exact quotients

Cells = Sequence[Sequence[int]]


def _check_partition(n: int, cells: Cells) -> list[list[int]]:
    norm = [sorted(int(v) for v in cell) for cell in cells]
    flat = [v for cell in norm for v in cell]
    if not norm or any(not cell for cell in norm):
        raise ValueError("cells must be nonempty")
    if sorted(flat) != list(range(n)):
        raise ValueError("cells must partition 0..n-1")
    return norm


@dataclass(frozen=True)
class QuotientMatrix:
    """Row-averaged block sums of a matrix over a partition, exact."""

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return len(self.entries)

    @property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 for row in self.entries for e in row)

    def int_rows(self) -> list[list[int]]:
        if not self.is_integral:
            raise ValueError("quotient matrix has non-integral entries")
        return [[int(e) for e in row] for row in self.entries]

    def as_float(self) -> np.ndarray:
        return np.array([[float(e) for e in row] for row in self.entries])


def quotient_matrix(m: np.ndarray, cells: Cells) -> QuotientMatrix:
    """b_rc = (sum of m[i, j], i in cell r, j in cell c) / |cell r|.

    Entries are exact rationals: float64 inputs convert losslessly through
    Fraction, so integer matrices give integer quotient entries exactly.
    """
    m = np.asarray(m, dtype=float)
    norm = _check_partition(m.shape[0], cells)
    rows = []
    for r in norm:
        row = []
        for c in norm:
            total = Fraction(0)
            for i in r:
                for j in c:
                    total += Fraction(m[i, j])
            row.append(total / len(r))
        rows.append(tuple(row))
    return QuotientMatrix(tuple(rows))


def is_equitable(m: np.ndarray, cells: Cells) -> bool:
    """True iff every block of m has constant row sums (exact test)."""
    m = np.asarray(m, dtype=float)
    norm = _check_partition(m.shape[0], cells)
    for r in norm:
        for c in norm:
            sums = {sum(Fraction(m[i, j]) for j in c) for i in r}
            if len(sums) > 1:
                return False
    return True


def cell_values(pd: PerronData | np.ndarray, cells: Cells, tol: float = 1e-8) -> list[float]:
    """One representative vector value per cell (the cell mean).

    Raises CellSpreadError unless entries within each cell agree to tol
    relative to max(1, largest magnitude in the cell).
    """
    vector = pd.vector if isinstance(pd, PerronData) else np.asarray(pd, dtype=float)
    norm = _check_partition(len(vector), cells)
    out = []
    for idx, cell in enumerate(norm):
        vals = vector[cell]
        spread = float(vals.max() - vals.min())
        scale = max(1.0, float(np.max(np.abs(vals))))
        if spread > tol * scale:
            raise CellSpreadError(idx, spread, tol)
        out.append(float(vals.mean()))
    return out


def quadratic_form(m: np.ndarray, x: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if x.shape != (m.shape[0],):
        raise ValueError("vector length must match matrix order")
    return float(x @ m @ x)


# ---------------------------------------------------------------------------
# exact integer polynomials

@dataclass(frozen=True)
class IntPolynomial:
    """Integer-coefficient polynomial, coefficients ascending by degree."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("need at least one coefficient")
        if any(not isinstance(c, int) for c in self.coeffs):
            raise ValueError("coefficients must be ints")
        trimmed = list(self.coeffs)
        while len(trimmed) > 1 and trimmed[-1] == 0:
            trimmed.pop()
        object.__setattr__(self, "coeffs", tuple(trimmed))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation; exact for int and Fraction arguments."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        size = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (size - len(self.coeffs))
        b = list(other.coeffs) + [0] * (size - len(other.coeffs))
        return IntPolynomial(tuple(x - y for x, y in zip(a, b)))

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        size = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (size - len(self.coeffs))
        b = list(other.coeffs) + [0] * (size - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def scaled(self, k: int) -> "IntPolynomial":
        return IntPolynomial(tuple(k * c for c in self.coeffs))

    def is_zero(self) -> bool:
        return self.coeffs == (0,)


def _to_int_matrix(m) -> list[list[int]]:
    if isinstance(m, QuotientMatrix):
        return m.int_rows()
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix must be square")
    out = []
    for row in arr.tolist():
        ints = []
        for v in row:
            if isinstance(v, float):
                if not v.is_integer():
                    raise ValueError("matrix entries must be integers")
                v = int(v)
            elif not isinstance(v, int):
                raise ValueError("matrix entries must be integers")
            ints.append(v)
        out.append(ints)
    return out


def char_poly(m) -> IntPolynomial:
    """det(xI - M) over exact integers via Faddeev-LeVerrier.

    Accepts a QuotientMatrix with integral entries or any integer-valued
    square matrix. Python ints never overflow, so coefficients are exact at
    every order this toolkit touches.
    """
    a = _to_int_matrix(m)
    n = len(a)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[0] * n for _ in range(n)]  # M_0 = 0
    c_prev = 1                        # c_n
    for k in range(1, n + 1):
        # M_k = A @ M_{k-1} + c_{n-k+1} I
        prod = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)]
        for i in range(n):
            prod[i][i] += c_prev
        mk = prod
        trace = sum(sum(a[i][t] * mk[t][i] for t in range(n)) for i in range(n))
        q, r = divmod(-trace, k)
        if r:
            raise ArithmeticError("Faddeev-LeVerrier division not exact")
        coeffs[n - k] = q
        c_prev = q
    return IntPolynomial(tuple(coeffs))


def largest_real_root(
    p: IntPolynomial,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    scan_steps: int = 1024,
) -> float:
    """Largest real root of p in [lo, hi] by downward scan + bisection.

    Signs are evaluated exactly at dyadic rationals, so brackets are
    rigorous; the scan resolution (scan_steps) is the only heuristic and
    suffices for the well-separated cubics this toolkit isolates.
    Requires p(hi) > 0.
    """
    lo_f, hi_f = Fraction(lo), Fraction(hi)
    if lo_f >= hi_f:
        raise ValueError("need lo < hi")
    if p(hi_f) <= 0:
        raise ValueError("p(hi) must be positive")
    step = (hi_f - lo_f) / scan_steps
    upper = hi_f
    lower = None
    for k in range(1, scan_steps + 1):
        x = hi_f - step * k
        val = p(x)
        if val == 0:
            return float(x)
        if val < 0:
            lower = x
            break
        upper = x
    if lower is None:
        raise ValueError("no sign change found in [lo, hi]")
    tol_f = Fraction(tol)
    while upper - lower > tol_f:
        mid = (upper + lower) / 2
        val = p(mid)
        if val == 0:
            return float(mid)
        if val < 0:
            lower = mid
        else:
            upper = mid
    return float((upper + lower) / 2)
