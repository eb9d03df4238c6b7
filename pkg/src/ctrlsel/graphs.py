"""Structured systems and the graphs derived from them.

A structured system is the zero/nonzero pattern of a state matrix A
(n x n) and an input matrix B (n x m), plus a non-negative cost for
every input link (nonzero entry of B).  This module builds the three
views everything else works on: the system digraph, the bipartite
matching graph, and the SCC decomposition of the state digraph, and it
implements the matching-based structural controllability test.

Indices are 1-based at the interface.  A link is the B-entry pair
(i, j), i.e. input u_j actuates state x_i.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Optional, Sequence, Union

Link = tuple[int, int]
# Right-side vertex of the bipartite graph: ("x", j) for the state copy
# x_j^R, ("u", j) for input u_j.
RightVertex = tuple[str, int]

CostsLike = Union[Mapping[Link, Union[int, Fraction]], int, Fraction, None]


def _as_cost(value) -> Fraction:
    if isinstance(value, Rational):
        return Fraction(value)
    raise ValueError(f"cost must be an exact rational, got {value!r}")


@dataclass(frozen=True)
class StructuredSystem:
    """Sparsity patterns of (A, B) with per-link costs.

    a_pattern holds the (i, j) positions of nonzero entries of A and
    b_pattern those of B.  costs maps every element of b_pattern to a
    finite non-negative rational.
    """

    n: int
    m: int
    a_pattern: frozenset[Link]
    b_pattern: frozenset[Link]
    costs: Mapping[Link, Fraction]
    name: str = ""

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ValueError(f"need n >= 1 and m >= 0, got n={self.n}, m={self.m}")
        for (i, j) in self.a_pattern:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"a_pattern entry ({i},{j}) out of range for n={self.n}")
        for (i, j) in self.b_pattern:
            if not (1 <= i <= self.n and 1 <= j <= self.m):
                raise ValueError(
                    f"b_pattern entry ({i},{j}) out of range for n={self.n}, m={self.m}"
                )
        if set(self.costs) != set(self.b_pattern):
            missing = set(self.b_pattern) - set(self.costs)
            extra = set(self.costs) - set(self.b_pattern)
            raise ValueError(
                f"costs must cover b_pattern exactly (missing {sorted(missing)}, "
                f"extra {sorted(extra)})"
            )
        for link, w in self.costs.items():
            if w < 0:
                raise ValueError(f"cost of link {link} is negative: {w}")

    @classmethod
    def create(
        cls,
        n: int,
        m: int,
        a_pattern: Iterable[Sequence[int]],
        b_pattern: Iterable[Sequence[int]],
        costs: CostsLike = 1,
        name: str = "",
    ) -> "StructuredSystem":
        """Normalizing constructor.

        costs may be a mapping from links to rationals, or a single
        scalar applied to every link (handy for uniform-cost systems).
        """
        a = frozenset((int(i), int(j)) for i, j in a_pattern)
        b = frozenset((int(i), int(j)) for i, j in b_pattern)
        if costs is None:
            costs = 1
        if isinstance(costs, Mapping):
            cost_map = {(int(i), int(j)): _as_cost(w) for (i, j), w in costs.items()}
        else:
            scalar = _as_cost(costs)
            cost_map = {link: scalar for link in b}
        return cls(n=n, m=m, a_pattern=a, b_pattern=b, costs=cost_map, name=name)

    def cost_of(self, links: Iterable[Link]) -> Fraction:
        return sum((self.costs[l] for l in links), Fraction(0))

    @property
    def w_max(self) -> Fraction:
        if not self.b_pattern:
            return Fraction(0)
        return max(self.costs.values())


@dataclass(frozen=True)
class SystemDigraph:
    """Digraph on states and inputs: x_j -> x_i per A_ij, u_j -> x_i per B_ij."""

    n: int
    m: int
    state_edges: tuple[tuple[int, int], ...]  # (source state j, target state i)
    links: tuple[Link, ...]                   # b_pattern pairs (i, j)

    def state_adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(1, self.n + 1)}
        for j, i in self.state_edges:
            adj[j].append(i)
        return adj


def build_system_digraph(sys: StructuredSystem) -> SystemDigraph:
    """Build the system digraph; A_ij gives edge x_j -> x_i, B_ij gives u_j -> x_i."""
    state_edges = tuple(sorted((j, i) for i, j in sys.a_pattern))
    links = tuple(sorted(sys.b_pattern))
    return SystemDigraph(n=sys.n, m=sys.m, state_edges=state_edges, links=links)


@dataclass(frozen=True)
class SystemBipartite:
    """Bipartite graph with left vertices x_1^L..x_n^L and right X_R plus U.

    exx lists the A entries (i, j), each the edge (x_j^R, x_i^L); eux
    lists the B entries (i, j), each the edge (u_j, x_i^L).  Both are
    sorted by (i, j), which fixes the canonical column order used by
    the ILP models and incidence matrices: exx first, then eux, then
    downstream slack columns.
    """

    n: int
    m: int
    exx: tuple[Link, ...]
    eux: tuple[Link, ...]

    @property
    def n_edges(self) -> int:
        return len(self.exx) + len(self.eux)

    def right_of_exx(self, edge: Link) -> RightVertex:
        return ("x", edge[1])

    def right_of_eux(self, edge: Link) -> RightVertex:
        return ("u", edge[1])

    def adjacency(
        self,
        allowed_eux: Optional[Iterable[Link]] = None,
        allowed_exx: Optional[Iterable[Link]] = None,
    ) -> dict[int, list[RightVertex]]:
        """Left-to-right adjacency restricted to the given edge subsets.

        None means all edges of that kind.  Neighbor lists follow the
        canonical edge order, so matchings are deterministic.
        """
        eux = self.eux if allowed_eux is None else sorted(set(allowed_eux))
        exx = self.exx if allowed_exx is None else sorted(set(allowed_exx))
        adj: dict[int, list[RightVertex]] = {i: [] for i in range(1, self.n + 1)}
        for i, j in exx:
            adj[i].append(("x", j))
        for i, j in eux:
            adj[i].append(("u", j))
        return adj


def build_bipartite(sys: StructuredSystem) -> SystemBipartite:
    return SystemBipartite(
        n=sys.n,
        m=sys.m,
        exx=tuple(sorted(sys.a_pattern)),
        eux=tuple(sorted(sys.b_pattern)),
    )


@dataclass(frozen=True)
class Matching:
    """A bipartite matching, stored as (left state, right vertex) pairs."""

    pairs: tuple[tuple[int, RightVertex], ...]

    def __post_init__(self):
        lefts = [l for l, _ in self.pairs]
        rights = [r for _, r in self.pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ValueError("edges share an endpoint; not a matching")

    @property
    def size(self) -> int:
        return len(self.pairs)

    def matched_lefts(self) -> frozenset[int]:
        return frozenset(l for l, _ in self.pairs)

    def covers_all_lefts(self, n: int) -> bool:
        return len(self.matched_lefts()) == n

    def as_dict(self) -> dict[int, RightVertex]:
        return dict(self.pairs)


def _hopcroft_karp(adj: dict[int, list[RightVertex]]) -> dict[int, RightVertex]:
    """Maximum matching of a left-to-right adjacency map.

    Phased BFS/DFS as in Hopcroft-Karp; left vertices are processed in
    sorted order so the result is deterministic.
    """
    INF = -1
    match_left: dict[int, Optional[RightVertex]] = {l: None for l in adj}
    match_right: dict[RightVertex, Optional[int]] = {}
    for neigh in adj.values():
        for r in neigh:
            match_right.setdefault(r, None)
    dist: dict[int, int] = {}

    def bfs() -> bool:
        queue: deque[int] = deque()
        for l in sorted(adj):
            if match_left[l] is None:
                dist[l] = 0
                queue.append(l)
            else:
                dist[l] = INF
        found = False
        while queue:
            l = queue.popleft()
            for r in adj[l]:
                nxt = match_right[r]
                if nxt is None:
                    found = True
                elif dist[nxt] == INF:
                    dist[nxt] = dist[l] + 1
                    queue.append(nxt)
        return found

    def dfs(l: int) -> bool:
        for r in adj[l]:
            nxt = match_right[r]
            if nxt is None or (dist[nxt] == dist[l] + 1 and dfs(nxt)):
                match_left[l] = r
                match_right[r] = l
                return True
        dist[l] = INF
        return False

    while bfs():
        for l in sorted(adj):
            if match_left[l] is None:
                dfs(l)
    return {l: r for l, r in match_left.items() if r is not None}


def _has_augmenting_path(
    adj: dict[int, list[RightVertex]], matching: Matching
) -> bool:
    """One BFS phase: is there an alternating path from a free left to a free right?"""
    match_left = matching.as_dict()
    match_right = {r: l for l, r in match_left.items()}
    seen_left = set()
    queue: deque[int] = deque()
    for l in adj:
        if l not in match_left:
            queue.append(l)
            seen_left.add(l)
    while queue:
        l = queue.popleft()
        for r in adj[l]:
            owner = match_right.get(r)
            if owner is None:
                return True
            if owner not in seen_left:
                seen_left.add(owner)
                queue.append(owner)
    return False


def max_matching(
    bg: SystemBipartite,
    allowed_eux: Optional[Iterable[Link]] = None,
    allowed_exx: Optional[Iterable[Link]] = None,
) -> Matching:
    """Maximum matching over E_XX and E_UX restricted to the allowed subsets.

    The returned matching is certified maximum: a final BFS phase must
    find no augmenting path, otherwise an internal error is raised.
    """
    adj = bg.adjacency(allowed_eux=allowed_eux, allowed_exx=allowed_exx)
    pairs = tuple(sorted(_hopcroft_karp(adj).items()))
    matching = Matching(pairs=pairs)
    if _has_augmenting_path(adj, matching):
        raise AssertionError("matcher returned a non-maximum matching")
    return matching


def verify_maximum(
    bg: SystemBipartite,
    matching: Matching,
    allowed_eux: Optional[Iterable[Link]] = None,
    allowed_exx: Optional[Iterable[Link]] = None,
) -> bool:
    """True when the matching admits no augmenting path in the restricted graph."""
    adj = bg.adjacency(allowed_eux=allowed_eux, allowed_exx=allowed_exx)
    return not _has_augmenting_path(adj, matching)


@dataclass(frozen=True)
class SccDecomposition:
    """SCC partition of the state digraph with sources renumbered first.

    components holds every SCC as a frozenset of states; the first r
    entries are the source SCCs (no incoming state edge from another
    component), ordered by their smallest state, then the non-source
    components in the same order.  source_links[i] is E_{i+1}: the
    input links whose target state lies in source component i+1.
    """

    components: tuple[frozenset[int], ...]
    r: int
    comp_index: Mapping[int, int]  # state -> 1-based component number
    source_links: tuple[tuple[Link, ...], ...]

    @property
    def n_c(self) -> int:
        return len(self.components)

    def is_source_state(self, state: int) -> bool:
        return self.comp_index[state] <= self.r

    def source_of_state(self, state: int) -> Optional[int]:
        """1-based source component number, or None for non-source states."""
        c = self.comp_index[state]
        return c if c <= self.r else None

    def grouping_violation(
        self, links: Iterable[Link]
    ) -> Optional[tuple[int, int, int]]:
        """Witness (input j, state, state) breaking the source-grouped constraint.

        A violation is one input actuating states in two different
        source components, or in a source and a non-source component.
        Returns None when the constraint holds over the given links.
        """
        targets: dict[int, list[int]] = {}
        for i, j in sorted(links):
            targets.setdefault(j, []).append(i)
        for j in sorted(targets):
            first_source: Optional[tuple[int, int]] = None  # (component, state)
            first_nonsource: Optional[int] = None
            for state in targets[j]:
                src = self.source_of_state(state)
                if src is None:
                    if first_nonsource is None:
                        first_nonsource = state
                    if first_source is not None:
                        return (j, first_source[1], first_nonsource)
                else:
                    if first_source is None:
                        first_source = (src, state)
                    elif first_source[0] != src:
                        return (j, first_source[1], state)
                    if first_nonsource is not None:
                        return (j, state, first_nonsource)
        return None


def _tarjan_sccs(n: int, adj: dict[int, list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative to keep deep chains off the call stack."""
    index_of: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0

    for root in range(1, n + 1):
        if root in index_of:
            continue
        work = [(root, iter(adj[root]))]
        index_of[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index_of:
                    index_of[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                elif w in on_stack:
                    lowlink[v] = min(lowlink[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def scc_decompose(dg: SystemDigraph) -> SccDecomposition:
    """SCC partition of the state digraph, sources first.

    A component is a source when it has no incoming state edge from
    another component.  Sources are numbered 1..r by smallest contained
    state; non-sources follow in the same order.
    """
    sccs = _tarjan_sccs(dg.n, dg.state_adjacency())
    comp_of: dict[int, int] = {}
    for idx, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = idx
    has_incoming = [False] * len(sccs)
    for j, i in dg.state_edges:
        if comp_of[j] != comp_of[i]:
            has_incoming[comp_of[i]] = True

    sources = sorted(
        (comp for idx, comp in enumerate(sccs) if not has_incoming[idx]),
        key=min,
    )
    others = sorted(
        (comp for idx, comp in enumerate(sccs) if has_incoming[idx]),
        key=min,
    )
    ordered = [frozenset(c) for c in sources + others]
    comp_index = {}
    for num, comp in enumerate(ordered, start=1):
        for v in comp:
            comp_index[v] = num
    r = len(sources)
    source_links = tuple(
        tuple(sorted(l for l in dg.links if l[0] in ordered[i])) for i in range(r)
    )
    return SccDecomposition(
        components=tuple(ordered),
        r=r,
        comp_index=comp_index,
        source_links=source_links,
    )


def is_input_reachable(
    dg: SystemDigraph, selected_links: Iterable[Link]
) -> dict[int, bool]:
    """Reachability flag per state along state edges from the selected links."""
    selected = set(selected_links)
    unknown = selected - set(dg.links)
    if unknown:
        raise ValueError(f"selected links not in b_pattern: {sorted(unknown)}")
    adj = dg.state_adjacency()
    reached = {i: False for i in range(1, dg.n + 1)}
    queue: deque[int] = deque()
    for i, _j in selected:
        if not reached[i]:
            reached[i] = True
            queue.append(i)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if not reached[w]:
                reached[w] = True
                queue.append(w)
    return reached


@dataclass(frozen=True)
class ControllabilityCertificate:
    """Outcome of the two-condition structural controllability test.

    ok is true when every state is input-reachable and the matching
    covers every left vertex; the reachability map and the matching are
    kept so the verdict can be re-checked independently.
    """

    ok: bool
    reachable: tuple[bool, ...]
    matching: Matching
    unmatched: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


def controllability_certificate(
    dg: SystemDigraph,
    bg: SystemBipartite,
    selected_links: Iterable[Link],
) -> ControllabilityCertificate:
    """Controllability test against prebuilt graphs (the hot path for oracles)."""
    selected = sorted(set(selected_links))
    reach = is_input_reachable(dg, selected)
    matching = max_matching(bg, allowed_eux=selected)
    matched = matching.matched_lefts()
    unmatched = tuple(i for i in range(1, bg.n + 1) if i not in matched)
    ok = all(reach.values()) and not unmatched
    return ControllabilityCertificate(
        ok=ok,
        reachable=tuple(reach[i] for i in range(1, dg.n + 1)),
        matching=matching,
        unmatched=unmatched,
    )


def is_structurally_controllable(
    sys: StructuredSystem, selected_links: Iterable[Link]
) -> ControllabilityCertificate:
    """Structural controllability of (A, B') where B' keeps only the selected links.

    True iff every state is reachable from an input through the
    selected links and the bipartite graph restricted to E_XX plus the
    selected links has a matching covering all of X_L.  The returned
    certificate is truthy on success.
    """
    selected = set(selected_links)
    if not selected <= sys.b_pattern:
        raise ValueError(
            f"selected links not in b_pattern: {sorted(selected - sys.b_pattern)}"
        )
    dg = build_system_digraph(sys)
    bg = build_bipartite(sys)
    return controllability_certificate(dg, bg, selected)
