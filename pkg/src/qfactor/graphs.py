"""Small dense graphs as immutable adjacency bitrows, plus graph6 I/O.

Vertices are 0..n-1. Row v is a Python int whose bit u is set iff uv is an
edge. Everything downstream (component scans, subset enumeration, factor
search) runs on these bitmasks, so the representation is part of the
determinism contract: two graphs are equal iff they have identical rows.

The graph6 codec implements the short form only (n <= 62): header byte
n+63, then ceil(n(n-1)/2 / 6) payload bytes. Upper-triangle bits are taken
in column order x(0,1), x(0,2), x(1,2), x(0,3), ..., packed six per byte
most-significant bit first, each byte offset by 63. Trailing pad bits must
be zero. An optional ">>graph6<<" prefix is accepted on input.

random_graph draws edges from a bit-exact splitmix64 stream so that seeded
populations are reproducible down to the byte across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class Graph6Error(ValueError):
    """Malformed graph6 input."""


class GuardExceeded(RuntimeError):
    """A size guard blocked a computation; raise the guard to proceed."""


_GRAPH6_HEADER = b">>graph6<<"

# splitmix64 constants (wrapping 64-bit arithmetic)
_MASK64 = (1 << 64) - 1
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 0..n-1 with bitmask adjacency rows."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("order must be nonnegative")
        if len(self.rows) != self.n:
            raise ValueError("row count must equal order")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & (1 << v):
                raise ValueError(f"loop at vertex {v}")
            if row & ~full:
                raise ValueError(f"row {v} has bits outside 0..n-1")
        for u in range(self.n):
            mask = self.rows[u]
            while mask:
                v = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                if not self.rows[v] >> u & 1:
                    raise ValueError(f"asymmetric adjacency {u},{v}")

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("loops not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(n, tuple(rows))

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph(n, (0,) * n)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> tuple[int, ...]:
        return tuple(r.bit_count() for r in self.rows)

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, lexicographically sorted."""
        out = []
        for u in range(self.n):
            mask = self.rows[u] >> (u + 1) << (u + 1)
            while mask:
                v = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                out.append((u, v))
        return out

    def neighbors(self, v: int) -> tuple[int, ...]:
        mask = self.rows[v]
        out = []
        while mask:
            u = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            out.append(u)
        return tuple(out)

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"bad edge ({u},{v})")
            if rows[u] >> v & 1:
                raise ValueError(f"edge ({u},{v}) already present")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(self.n, tuple(rows))

    def remove_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or not rows[u] >> v & 1:
                raise ValueError(f"edge ({u},{v}) not present")
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return Graph(self.n, tuple(rows))


@dataclass(frozen=True)
class ComponentReport:
    """Connected components (each a frozenset), ordered by minimum vertex."""

    components: tuple[frozenset[int], ...]
    odd_count: int


def complete(k: int) -> Graph:
    """K_k. Requires k >= 1."""
    if k < 1:
        raise ValueError("complete graph needs k >= 1")
    full = (1 << k) - 1
    return Graph(k, tuple(full & ~(1 << v) for v in range(k)))


def disjoint_union(a: Graph, b: Graph) -> Graph:
    """a followed by b, with b's vertices shifted up by a.n."""
    rows = list(a.rows) + [row << a.n for row in b.rows]
    return Graph(a.n + b.n, tuple(rows))


def join(a: Graph, b: Graph) -> Graph:
    """Disjoint union plus every cross edge (a's vertices first)."""
    amask = (1 << a.n) - 1
    bmask = ((1 << b.n) - 1) << a.n
    rows = [row | bmask for row in a.rows]
    rows += [(row << a.n) | amask for row in b.rows]
    return Graph(a.n + b.n, tuple(rows))


def delete_vertices(g: Graph, drop: Iterable[int]) -> Graph:
    """Induced subgraph on the kept vertices, order preserved."""
    drop_mask = 0
    for v in drop:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
        drop_mask |= 1 << v
    keep = [v for v in range(g.n) if not drop_mask >> v & 1]
    index = {v: i for i, v in enumerate(keep)}
    rows = []
    for v in keep:
        mask = g.rows[v] & ~drop_mask
        row = 0
        while mask:
            u = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            row |= 1 << index[u]
        rows.append(row)
    return Graph(len(keep), tuple(rows))


def _component_masks(rows: Sequence[int], alive: int) -> Iterator[int]:
    """Yield component bitmasks of the subgraph induced on `alive`."""
    remaining = alive
    while remaining:
        seed = remaining & -remaining
        comp = seed
        frontier = seed
        while frontier:
            nxt = 0
            m = frontier
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                nxt |= rows[v]
            frontier = nxt & alive & ~comp
            comp |= frontier
        yield comp
        remaining &= ~comp


def components(g: Graph) -> ComponentReport:
    comps = []
    odd = 0
    alive = (1 << g.n) - 1
    for mask in _component_masks(g.rows, alive):
        vs = []
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            vs.append(v)
        comps.append(frozenset(vs))
        if len(vs) % 2:
            odd += 1
    return ComponentReport(tuple(comps), odd)


def odd_components_after_removal(g: Graph, removed_mask: int) -> int:
    """o(G - S) for S given as a bitmask. Hot path for the criterion scan."""
    alive = ((1 << g.n) - 1) & ~removed_mask
    odd = 0
    for mask in _component_masks(g.rows, alive):
        if mask.bit_count() % 2:
            odd += 1
    return odd


def min_degree(g: Graph) -> int:
    if g.n == 0:
        raise ValueError("min_degree undefined for the empty graph")
    return min(r.bit_count() for r in g.rows)


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    if g.n == 1:
        return True
    alive = (1 << g.n) - 1
    first = next(_component_masks(g.rows, alive))
    return first == alive


# ---------------------------------------------------------------------------
# graph6 codec (short form, n <= 62)

def _pair_stream(n: int) -> Iterator[tuple[int, int]]:
    # column order: for each j, all i < j
    for j in range(1, n):
        for i in range(j):
            yield i, j


def write_graph6(g: Graph) -> str:
    if g.n > 62:
        raise Graph6Error("short-form graph6 supports n <= 62 only")
    out = [g.n + 63]
    acc = 0
    nbits = 0
    for i, j in _pair_stream(g.n):
        acc = (acc << 1) | (g.rows[i] >> j & 1)
        nbits += 1
        if nbits == 6:
            out.append(acc + 63)
            acc = 0
            nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out).decode("ascii")


def parse_graph6(text: str | bytes) -> Graph:
    if isinstance(text, str):
        try:
            data = text.encode("ascii", errors="strict")
        except UnicodeEncodeError as exc:
            raise Graph6Error(f"non-ascii byte in graph6 string: {exc}") from None
    else:
        data = bytes(text)
    data = data.strip()
    if data.startswith(_GRAPH6_HEADER):
        data = data[len(_GRAPH6_HEADER):]
    if not data:
        raise Graph6Error("empty graph6 string")
    if data[0] == 126:  # '~' starts the long form
        raise Graph6Error("long-form graph6 (n > 62) not supported")
    n = data[0] - 63
    if not 0 <= n <= 62:
        raise Graph6Error(f"bad order byte {data[0]!r}")
    npairs = n * (n - 1) // 2
    nbytes = (npairs + 5) // 6
    if len(data) != 1 + nbytes:
        raise Graph6Error(
            f"expected {1 + nbytes} bytes for n={n}, got {len(data)}")
    bits = 0
    for byte in data[1:]:
        if not 63 <= byte <= 126:
            raise Graph6Error(f"byte {byte!r} outside graph6 range")
        bits = (bits << 6) | (byte - 63)
    total_bits = 6 * nbytes
    pad = total_bits - npairs
    if pad and bits & ((1 << pad) - 1):
        raise Graph6Error("nonzero padding bits")
    rows = [0] * n
    for k, (i, j) in enumerate(_pair_stream(n)):
        if bits >> (total_bits - 1 - k) & 1:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
    return Graph(n, tuple(rows))


# ---------------------------------------------------------------------------
# deterministic populations

def lexicographic_pairs(n: int) -> list[tuple[int, int]]:
    """(0,1), (0,2), ..., (0,n-1), (1,2), ...: the seeded-edge bit order."""
    return list(combinations(range(n), 2))


def enumerate_labeled(
    n: int,
    connected_only: bool = False,
    min_deg: int = 0,
    *,
    max_order: int = 7,
) -> Iterator[Graph]:
    """All labeled graphs on n vertices in ascending edge-mask order.

    Bit k of the mask is the k-th lexicographic pair. Guarded at n <= 7 by
    default (2^21 masks); pass a larger max_order to go beyond.
    """
    if n > max_order:
        raise GuardExceeded(
            f"enumerate_labeled(n={n}) exceeds guard max_order={max_order}")
    pairs = lexicographic_pairs(n)
    for mask in range(1 << len(pairs)):
        rows = [0] * n
        m = mask
        while m:
            k = (m & -m).bit_length() - 1
            m &= m - 1
            i, j = pairs[k]
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        g = Graph(n, tuple(rows))
        if min_deg and (n == 0 or min(r.bit_count() for r in rows) < min_deg):
            continue
        if connected_only and not is_connected(g):
            continue
        yield g


def splitmix64(seed: int) -> Iterator[int]:
    """The documented 64-bit stream behind every seeded population."""
    state = seed & _MASK64
    while True:
        state = (state + _SM_GAMMA) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * _SM_MUL1) & _MASK64
        z = ((z ^ (z >> 27)) * _SM_MUL2) & _MASK64
        yield z ^ (z >> 31)


def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with one splitmix64 draw per lexicographic pair.

    Edge (i, j) is included iff (output >> 11) * 2**-53 < p, so the same
    (n, p, seed) triple yields the same graph everywhere.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    stream = splitmix64(seed)
    rows = [0] * n
    for i, j in combinations(range(n), 2):
        if (next(stream) >> 11) * 2.0 ** -53 < p:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
    return Graph(n, tuple(rows))
