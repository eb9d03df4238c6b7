"""Brute-force reference solvers and random instance generation.

Everything here stays independent of the LP pipeline: the solvers
enumerate link subsets outright and judge each subset with the
two-condition controllability certificate from graphs.  The test
suite uses this module as ground truth, so keep it dumb on purpose.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import GenerationExhausted, TooLarge
from .graphs import (
    Link,
    StructuredSystem,
    SystemBipartite,
    SystemDigraph,
    build_bipartite,
    build_system_digraph,
    controllability_certificate,
    max_matching,
    scc_decompose,
)

ENUMERATION_LIMIT = 18

MODES = ("grouped", "free", "dedicated")


@dataclass(frozen=True)
class ControllabilityTable:
    """Controllability verdict for every subset of the input links.

    Bit t of a mask selects links[t].  flags[mask] is 1 when the
    system is structurally controllable using exactly that subset.
    Costs are carried alongside so a P3 sweep can reuse one table.
    """

    links: tuple[Link, ...]
    flags: bytes
    costs: tuple[Fraction, ...]
    mask_costs: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.links)

    def controllable(self, mask: int) -> bool:
        return self.flags[mask] == 1

    def links_of(self, mask: int) -> tuple[Link, ...]:
        return tuple(l for t, l in enumerate(self.links) if mask >> t & 1)

    def cost_of(self, mask: int) -> Fraction:
        return self.mask_costs[mask]


def _matchable_frontier(
    bg: SystemBipartite, links: tuple[Link, ...], nmask: int
) -> bytes:
    """Per-mask flag: matching over E_XX plus the selected E_UX covers X_L.

    The condition is monotone in the link set, so a mask whose
    one-smaller submask already passes is accepted without running a
    matching; Hopcroft-Karp only runs along the frontier.
    """
    size = len(links)
    out = bytearray(nmask)
    for mask in range(nmask):
        verdict = 0
        rest = mask
        while rest:
            low = rest & -rest
            if out[mask ^ low]:
                verdict = 1
                break
            rest ^= low
        if not verdict:
            allowed = links_of_mask(links, mask)
            if max_matching(bg, allowed_eux=allowed).covers_all_lefts(bg.n):
                verdict = 1
        out[mask] = verdict
    return bytes(out)


def links_of_mask(links: tuple[Link, ...], mask: int) -> tuple[Link, ...]:
    return tuple(l for t, l in enumerate(links) if mask >> t & 1)


def enumerate_controllable(
    sys: StructuredSystem, limit: int = ENUMERATION_LIMIT
) -> ControllabilityTable:
    """Tabulate structural controllability over all 2^|E_UX| link subsets.

    Reachability of every state reduces to covering every source
    component with at least one selected link, which is a bitwise OR,
    so the expensive matching check only runs where coverage holds.
    """
    links = tuple(sorted(sys.b_pattern))
    size = len(links)
    if size > limit:
        raise TooLarge(f"{size} input links exceed the 2^{limit} enumeration bound")
    dg = build_system_digraph(sys)
    bg = build_bipartite(sys)
    scc = scc_decompose(dg)
    full = (1 << scc.r) - 1
    cover_bit = []
    for (i, _j) in links:
        src = scc.source_of_state(i)
        cover_bit.append(0 if src is None else 1 << (src - 1))

    nmask = 1 << size
    coverage = bytearray(nmask)
    coverage[0] = 1 if full == 0 else 0
    acc = [0] * nmask
    for mask in range(1, nmask):
        low = mask & -mask
        acc[mask] = acc[mask ^ low] | cover_bit[low.bit_length() - 1]
        coverage[mask] = 1 if acc[mask] == full else 0

    matchable = _matchable_frontier(bg, links, nmask)
    flags = bytes(c & m for c, m in zip(coverage, matchable))
    costs = tuple(sys.costs[l] for l in links)
    mask_costs = [Fraction(0)] * nmask
    for mask in range(1, nmask):
        low = mask & -mask
        mask_costs[mask] = mask_costs[mask ^ low] + costs[low.bit_length() - 1]
    table = ControllabilityTable(
        links=links, flags=flags, costs=costs, mask_costs=tuple(mask_costs)
    )

    spot = controllability_certificate(dg, bg, links)
    assert bool(spot) == table.controllable(nmask - 1), "full-set verdict mismatch"
    return table


@dataclass(frozen=True)
class OracleSolution:
    """Exhaustive-search answer for one problem on one system."""

    problem: str
    status: str  # optimal | infeasible
    optimum: Optional[Fraction]
    links: tuple[Link, ...]
    sparsity: Optional[int]
    total_cost: Optional[Fraction]
    k: Optional[int] = None


def _infeasible(problem: str, k: Optional[int]) -> OracleSolution:
    return OracleSolution(
        problem=problem,
        status="infeasible",
        optimum=None,
        links=(),
        sparsity=None,
        total_cost=None,
        k=k,
    )


def brute_force_solve(
    sys: StructuredSystem,
    problem: str,
    k: Optional[int] = None,
    table: Optional[ControllabilityTable] = None,
) -> OracleSolution:
    """Exact optimum by enumerating controllable link subsets.

    Objectives: p1 minimizes cardinality, p2 cost, p3 cost subject to
    cardinality <= k, p4 the pair (cardinality, cost).  Ties are broken
    by the lexicographically smallest sorted link set so the answer is
    a deterministic function of the instance.
    """
    if problem not in ("p1", "p2", "p3", "p4"):
        raise ValueError(f"unknown problem {problem!r}")
    if problem == "p3":
        if k is None:
            raise ValueError("p3 needs a sparsity bound k")
        if k < 0:
            raise ValueError("k must be non-negative")
    elif k is not None:
        raise ValueError(f"{problem} does not take k")
    if table is None:
        table = enumerate_controllable(sys)

    best_key: Optional[tuple] = None
    best_masks: list[int] = []
    for mask in range(len(table.flags)):
        if not table.flags[mask]:
            continue
        card = mask.bit_count()
        if problem == "p3" and card > k:
            continue
        cost = table.cost_of(mask)
        if problem == "p1":
            key = (card, cost)
        elif problem in ("p2", "p3"):
            key = (cost, card)
        else:
            key = (card, cost)
        if best_key is None or key < best_key:
            best_key, best_masks = key, [mask]
        elif key == best_key:
            best_masks.append(mask)

    if best_key is None:
        return _infeasible(problem, k)
    chosen = min(best_masks, key=lambda m: table.links_of(m))
    links = table.links_of(chosen)
    card = chosen.bit_count()
    cost = table.cost_of(chosen)
    if problem == "p1":
        optimum: Fraction = Fraction(card)
    else:
        optimum = cost
    return OracleSolution(
        problem=problem,
        status="optimal",
        optimum=optimum,
        links=links,
        sparsity=card,
        total_cost=cost,
        k=k,
    )


_RANK_PRIME = 2**61 - 1
_ENTRY_SPAN = 10**6


def _rank_mod_p(rows: list[list[int]], p: int = _RANK_PRIME) -> int:
    """Row-reduction rank over GF(p)."""
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    rows = [r[:] for r in rows]
    while rank < len(rows) and col < ncols:
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def generic_rank_controllable(
    sys: StructuredSystem,
    selected_links: Optional[tuple[Link, ...]] = None,
    draws: int = 2,
    seed: int = 0,
) -> bool:
    """Numeric controllability of a random realization, mod a large prime.

    Draws entries uniformly from [1, 10^6] at the pattern positions and
    tests rank [B, AB, ..., A^(n-1) B] = n over GF(2^61 - 1).  Generic
    rank equals the maximum over realizations, so any full-rank draw
    certifies structural controllability; the converse direction fails
    only with vanishing probability, handled by taking several draws.
    """
    links = sorted(sys.b_pattern) if selected_links is None else sorted(selected_links)
    n, m = sys.n, sys.m
    rng = random.Random(seed)
    p = _RANK_PRIME
    for _ in range(draws):
        a = [[0] * n for _ in range(n)]
        for (i, j) in sys.a_pattern:
            a[i - 1][j - 1] = rng.randint(1, _ENTRY_SPAN)
        b = [[0] * m for _ in range(n)]
        for (i, j) in links:
            b[i - 1][j - 1] = rng.randint(1, _ENTRY_SPAN)
        blocks = []
        power = b
        for _ in range(n):
            blocks.append(power)
            power = [
                [sum(a[i][l] * power[l][j] for l in range(n)) % p for j in range(m)]
                for i in range(n)
            ]
        ctrb = [
            [block[i][j] for block in blocks for j in range(m)] for i in range(n)
        ]
        if _rank_mod_p(ctrb) == n:
            return True
    return False


@dataclass(frozen=True)
class InstanceGenSpec:
    """Knobs for the random instance generator.

    mode picks the input-structure family: "grouped" keeps every input
    inside one source component or entirely off the sources, "dedicated"
    gives each input at most one link, "free" places links anywhere.
    Generated instances are always structurally controllable with the
    full link set; draws failing that are thrown away and retried.
    """

    seed: int = 0
    n_lo: int = 3
    n_hi: int = 8
    m_lo: int = 1
    m_hi: int = 3
    a_density: float = 0.3
    b_density: float = 0.5
    cost_lo: int = 1
    cost_hi: int = 20
    mode: str = "grouped"
    max_links: Optional[int] = None
    max_tries: int = 500

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (1 <= self.n_lo <= self.n_hi):
            raise ValueError("need 1 <= n_lo <= n_hi")
        if not (1 <= self.m_lo <= self.m_hi):
            raise ValueError("need 1 <= m_lo <= m_hi")
        if not (0 <= self.cost_lo <= self.cost_hi):
            raise ValueError("need 0 <= cost_lo <= cost_hi")


def _draw_grouped_links(
    rng: random.Random, spec: InstanceGenSpec, scc, n: int, m: int
) -> list[Link]:
    sources = [c + 1 for c in range(scc.r)]
    nonsource_states = sorted(s for s in range(1, n + 1) if not scc.is_source_state(s))
    links: list[Link] = []
    for j in range(1, m + 1):
        from_source = not nonsource_states or rng.random() < 0.5
        if from_source:
            comp = scc.components[rng.choice(sources) - 1]
            pool = sorted(comp)
        else:
            pool = nonsource_states
        chosen = [i for i in pool if rng.random() < spec.b_density]
        if not chosen:
            chosen = [rng.choice(pool)]
        links.extend((i, j) for i in chosen)
    return links


def generate_instance(spec: InstanceGenSpec) -> StructuredSystem:
    """Seeded random instance honoring the spec's mode and bounds."""
    rng = random.Random(spec.seed)
    for attempt in range(spec.max_tries):
        n = rng.randint(spec.n_lo, spec.n_hi)
        m = rng.randint(spec.m_lo, spec.m_hi)
        a_pattern = [
            (i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if rng.random() < spec.a_density
        ]
        dg_links: list[Link]
        if spec.mode == "dedicated":
            dg_links = [(rng.randint(1, n), j) for j in range(1, m + 1)]
            dg_links = sorted(set(dg_links))
        elif spec.mode == "free":
            dg_links = [
                (i, j)
                for i in range(1, n + 1)
                for j in range(1, m + 1)
                if rng.random() < spec.b_density
            ]
        else:
            probe = SystemDigraph(
                n=n,
                m=m,
                state_edges=tuple(sorted({(j, i) for (i, j) in a_pattern})),
                links=(),
            )
            dg_links = sorted(set(_draw_grouped_links(rng, spec, scc_decompose(probe), n, m)))
        if not dg_links:
            continue
        if spec.max_links is not None and len(dg_links) > spec.max_links:
            continue
        costs = {l: Fraction(rng.randint(spec.cost_lo, spec.cost_hi)) for l in dg_links}
        sys = StructuredSystem.create(
            n=n,
            m=m,
            a_pattern=a_pattern,
            b_pattern=dg_links,
            costs=costs,
            name=f"gen-{spec.mode}-{spec.seed}",
        )
        dg = build_system_digraph(sys)
        bg = build_bipartite(sys)
        if not controllability_certificate(dg, bg, sys.b_pattern):
            continue
        if spec.mode == "grouped":
            scc = scc_decompose(dg)
            assert scc.grouping_violation(sys.b_pattern) is None
        return sys
    raise GenerationExhausted(
        f"no structurally controllable instance in {spec.max_tries} tries (seed {spec.seed})"
    )
