"""Extremal family builders, their exact quotients, and the threshold.

The families are joins of a clique S with disjoint clique unions:

* gstar(n, delta): K_delta joined to (K_{n-2delta+1} union (delta-1)K_1),
  the tight graph for the spectral threshold. Layout: join cell first,
  then the big clique, then the singletons.
* g1(s, parts): K_s joined to arbitrary cliques (the blocking-set family).
* g2(n, s): same shape as gstar with parameter s.
* g3(n, delta, s): K_s joined to (s-1) cliques K_{delta+1-s} followed by
  K_m, m = n - s - (delta+1-s)(s-1). Layout [S | V_1 cells | V_2].
* g4(n, delta, s): g3 after a degree-raising surgery that empties the
  first V_1 clique, detaches each later clique's first vertex, and wires
  V_1 to V_2 (e1 to the first delta-s w's from all of V_1, e2 from the
  detached cliques' interiors to the remaining w's).

Closed-form 3x3 quotient matrices and their characteristic polynomials are
kept as exact integer objects so identity checks are coefficient-exact.
threshold_q is the load-bearing number: the largest root of the gstar
polynomial, cross-validated against power iteration on the actual graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .graphs import Graph, complete, disjoint_union, join
from .spectra import (
    IntPolynomial,
    QuotientMatrix,
    largest_real_root,
    perron_q,
)
from fractions import Fraction


def _join_cliques(s: int, parts: Sequence[int]) -> Graph:
    body = complete(parts[0])
    for p in parts[1:]:
        body = disjoint_union(body, complete(p))
    return join(complete(s), body)


def _cells(s: int, parts: Sequence[int]) -> list[list[int]]:
    out = [list(range(s))]
    base = s
    for p in parts:
        out.append(list(range(base, base + p)))
        base += p
    return out


def build_gstar(n: int, delta: int) -> Graph:
    """The extremal graph for (n, delta). Requires delta >= 2, n even,
    n >= 2*delta."""
    if delta < 2:
        raise ValueError("delta must be >= 2")
    if n % 2:
        raise ValueError("n must be even")
    if n < 2 * delta:
        raise ValueError("need n >= 2*delta")
    return _join_cliques(delta, [n - 2 * delta + 1] + [1] * (delta - 1))


def gstar_cells(n: int, delta: int) -> list[list[int]]:
    """Natural 3-cell partition: join cell, big clique, all singletons."""
    big = n - 2 * delta + 1
    return [
        list(range(delta)),
        list(range(delta, delta + big)),
        list(range(delta + big, n)),
    ]


def build_g1(s: int, parts: Sequence[int]) -> Graph:
    """K_s joined to cliques of the given sizes, in the given order."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if not parts or any(p < 1 for p in parts):
        raise ValueError("parts must be nonempty positive sizes")
    return _join_cliques(s, list(parts))


def g1_cells(s: int, parts: Sequence[int]) -> list[list[int]]:
    return _cells(s, list(parts))


def build_g2(n: int, s: int) -> Graph:
    """K_s joined to (K_{n-2s+1} union (s-1)K_1); gstar with parameter s."""
    if s < 2:
        raise ValueError("s must be >= 2")
    if n < 2 * s:
        raise ValueError("need n >= 2*s")
    return _join_cliques(s, [n - 2 * s + 1] + [1] * (s - 1))


def g2_cells(n: int, s: int) -> list[list[int]]:
    big = n - 2 * s + 1
    return [
        list(range(s)),
        list(range(s, s + big)),
        list(range(s + big, n)),
    ]


def _g3_m(n: int, delta: int, s: int) -> int:
    return n - s - (delta + 1 - s) * (s - 1)


def _check_g3_params(n: int, delta: int, s: int) -> int:
    if not 2 <= s <= delta - 1:
        raise ValueError("need 2 <= s <= delta-1")
    m = _g3_m(n, delta, s)
    if m < delta + 1 - s:
        raise ValueError(f"big part m={m} must be >= delta+1-s={delta + 1 - s}")
    return m


def build_g3(n: int, delta: int, s: int) -> Graph:
    """K_s joined to ((s-1) copies of K_{delta+1-s}, then K_m)."""
    m = _check_g3_params(n, delta, s)
    return _join_cliques(s, [delta + 1 - s] * (s - 1) + [m])


def g3_cells(n: int, delta: int, s: int) -> list[list[int]]:
    m = _check_g3_params(n, delta, s)
    return _cells(s, [delta + 1 - s] * (s - 1) + [m])


@dataclass(frozen=True)
class SurgeryPlan:
    """Edge rewiring that turns g3 into g4. All edges are (u, v), u < v."""

    n: int
    delta: int
    s: int
    m: int
    removed: tuple[tuple[int, int], ...]
    added_e1: tuple[tuple[int, int], ...]
    added_e2: tuple[tuple[int, int], ...]

    @property
    def added(self) -> tuple[tuple[int, int], ...]:
        return self.added_e1 + self.added_e2


def _v_index(s: int, delta: int, i: int, j: int) -> int:
    # v_{i,j}: clique i in 1..s-1, position j in 1..delta+1-s
    return s + (i - 1) * (delta + 1 - s) + (j - 1)


def _w_index(s: int, delta: int, m: int, r: int) -> int:
    # w_r: r in 1..m
    return s + (s - 1) * (delta + 1 - s) + (r - 1)


def surgery_plan(n: int, delta: int, s: int) -> SurgeryPlan:
    """The documented rewiring. Removed: every edge inside the first V_1
    clique, plus each later clique's star at its first vertex. Added:
    e1 = all of V_1 to w_1..w_{delta-s}; e2 = later cliques' interiors to
    w_{delta-s+1}..w_m."""
    m = _check_g3_params(n, delta, s)
    t = delta + 1 - s  # clique size within V_1

    removed = []
    first = [_v_index(s, delta, 1, j) for j in range(1, t + 1)]
    removed.extend(tuple(sorted(e)) for e in combinations(first, 2))
    for i in range(2, s):
        anchor = _v_index(s, delta, i, 1)
        for j in range(2, t + 1):
            removed.append(tuple(sorted((anchor, _v_index(s, delta, i, j)))))

    e1 = []
    for i in range(1, s):
        for j in range(1, t + 1):
            v = _v_index(s, delta, i, j)
            for r in range(1, delta - s + 1):
                e1.append(tuple(sorted((v, _w_index(s, delta, m, r)))))

    e2 = []
    for i in range(2, s):
        for j in range(2, t + 1):
            v = _v_index(s, delta, i, j)
            for r in range(delta - s + 1, m + 1):
                e2.append(tuple(sorted((v, _w_index(s, delta, m, r)))))

    return SurgeryPlan(
        n, delta, s, m,
        tuple(sorted(removed)),
        tuple(sorted(e1)),
        tuple(sorted(e2)),
    )


def build_g4(n: int, delta: int, s: int) -> Graph:
    plan = surgery_plan(n, delta, s)
    return build_g3(n, delta, s).remove_edges(plan.removed).add_edges(plan.added)


@dataclass(frozen=True)
class ContainmentReport:
    """Whether g4 embeds into gstar(n, delta) as a spanning subgraph."""

    identity: bool
    embedded: bool
    mapping: tuple[int, ...] | None


def g4_containment(n: int, delta: int, s: int) -> ContainmentReport:
    """Check (never assume) that g4 is a subgraph of gstar(n, delta).

    Identity embedding is attempted first; if it fails, a constructed map
    is tried: g4's universal vertices (S plus the first delta-s w's) onto
    the join cell, its degree-delta independent set (first V_1 clique plus
    the later cliques' detached anchors) onto the singleton slots, and the
    rest onto the big clique. The result is verified edge by edge.
    """
    plan = surgery_plan(n, delta, s)
    g4 = build_g4(n, delta, s)
    gs = build_gstar(n, delta)

    def embeds(mapping: Sequence[int]) -> bool:
        return all(gs.has_edge(mapping[u], mapping[v]) for u, v in g4.edges())

    ident = tuple(range(n))
    if embeds(ident):
        return ContainmentReport(True, True, ident)

    t = delta + 1 - s
    universal = list(range(plan.s))
    universal += [_w_index(s, delta, plan.m, r) for r in range(1, delta - s + 1)]
    low = [_v_index(s, delta, 1, j) for j in range(1, t + 1)]
    low += [_v_index(s, delta, i, 1) for i in range(2, s)]
    low.sort()
    rest = sorted(set(range(n)) - set(universal) - set(low))

    big = n - 2 * delta + 1
    mapping = [0] * n
    for slot, v in enumerate(universal):
        mapping[v] = slot                      # join cell slots
    for slot, v in enumerate(rest):
        mapping[v] = delta + slot              # big clique slots
    for slot, v in enumerate(low):
        mapping[v] = delta + big + slot        # singleton slots
    ok = embeds(mapping)
    return ContainmentReport(False, ok, tuple(mapping) if ok else None)


# ---------------------------------------------------------------------------
# closed-form quotients and polynomials

def quotient_b2(n: int, s: int) -> QuotientMatrix:
    """Quotient of Q(g2(n, s)) over [join, big clique, singletons]."""
    if s < 2:
        raise ValueError("s must be >= 2")
    if n < 2 * s:
        raise ValueError("need n >= 2*s")
    rows = (
        (n + s - 2, n - 2 * s + 1, s - 1),
        (s, 2 * n - 3 * s, 0),
        (s, 0, s),
    )
    return QuotientMatrix(
        tuple(tuple(Fraction(v) for v in row) for row in rows))


def quotient_bstar(n: int, delta: int) -> QuotientMatrix:
    """Quotient of Q(gstar(n, delta)); same closed form with s -> delta."""
    if n % 2:
        raise ValueError("n must be even")
    return quotient_b2(n, delta)


def phi_b2(n: int, s: int) -> IntPolynomial:
    """Characteristic polynomial of quotient_b2(n, s), closed form."""
    if s < 2:
        raise ValueError("s must be >= 2")
    if n < 2 * s:
        raise ValueError("need n >= 2*s")
    return IntPolynomial((
        -2 * s * n * n + 4 * n * s * s + 2 * n * s - 2 * s ** 3 - 2 * s * s,
        2 * n * n + n * s - 4 * n - 4 * s * s + 4 * s,
        -(3 * n - s - 2),
        1,
    ))


def phi_bstar(n: int, delta: int) -> IntPolynomial:
    """Characteristic polynomial of quotient_bstar(n, delta)."""
    if n % 2:
        raise ValueError("n must be even")
    return phi_b2(n, delta)


def f_poly(n: int, s: int, delta: int) -> IntPolynomial:
    """The quadratic with phi_b2 - phi_bstar == (s - delta) * f."""
    return IntPolynomial((
        -2 * n * n + 2 * n * (2 * s + 2 * delta + 1)
        - 2 * (s * s + s * delta + delta * delta) - 2 * (s + delta),
        n - 4 * s - 4 * delta + 4,
        1,
    ))


@lru_cache(maxsize=None)
def _threshold_cached(n: int, delta: int, tol: float) -> float:
    root = largest_real_root(phi_bstar(n, delta), 0.0, float(2 * n), tol=1e-12)
    check = perron_q(build_gstar(n, delta)).value
    if abs(root - check) > tol:
        raise RuntimeError(
            f"threshold cross-validation failed at (n={n}, delta={delta}): "
            f"root {root!r} vs perron {check!r}")
    return root


def threshold_q(n: int, delta: int, tol: float = 1e-8) -> float:
    """q(gstar(n, delta)): largest root of phi_bstar, cross-validated
    against power iteration on the built graph (mismatch > tol raises)."""
    return _threshold_cached(n, delta, tol)
