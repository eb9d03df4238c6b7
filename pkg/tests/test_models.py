import random
from fractions import Fraction

import pytest

from ctrlsel import (
    CertificateFailure,
    GroupingViolation,
    InfeasibleSystem,
    StructuredSystem,
    ZeroMaxCost,
    build_bipartite,
    build_system_digraph,
    scc_decompose,
    solve_problem,
)
from ctrlsel.models import (
    build_model,
    build_p3_ilp,
    build_p4_as_p2,
    debug_text,
    recover_selection,
    relax,
    source_cost_profile,
)

F = Fraction


def _graphs(sys):
    scc = scc_decompose(build_system_digraph(sys))
    return scc, build_bipartite(sys)


def test_directory_layout(demo10):
    scc, bg = _graphs(demo10)
    d = build_model(demo10, "p1", scc, bg).directory
    assert d.exx == bg.exx
    assert d.eux == bg.eux
    assert d.r == scc.r
    assert d.ncols == len(bg.exx) + len(bg.eux) + scc.r
    assert d.exx_col(bg.exx[0]) == 0
    assert d.eux_col(bg.eux[0]) == len(bg.exx)
    assert d.z_col(1) == d.ncols - scc.r


def test_base_row_structure(demo10):
    """One matching row per left state, one degree row per right vertex,
    one reach row per source."""
    scc, bg = _graphs(demo10)
    model = build_model(demo10, "p1", scc, bg)
    tags = [row.tag for row in model.rows]
    n, m, r = demo10.n, demo10.m, scc.r
    assert tags[:n] == [f"match[xL{i}]" for i in range(1, n + 1)]
    assert tags[n:2 * n] == [f"degree[xR{j}]" for j in range(1, n + 1)]
    assert tags[2 * n:2 * n + m] == [f"degree[u{j}]" for j in range(1, m + 1)]
    assert tags[2 * n + m:] == [f"reach[{l}]" for l in range(1, r + 1)]

    d = model.directory
    for row in model.rows[:n]:
        assert row.sense == "==" and row.rhs == 1
        assert all(v == 1 for v in row.coeffs.values())
    for row in model.rows[n:2 * n + m]:
        assert row.sense == "<=" and row.rhs == 1
    for l, row in enumerate(model.rows[2 * n + m:], start=1):
        assert row.sense == "<=" and row.rhs == 0
        assert row.coeffs[d.z_col(l)] == 1
        eis = {d.eux_col(e) for e in scc.source_links[l - 1]}
        assert {c for c, v in row.coeffs.items() if v == -1} == eis


def test_p1_objective_offset(demo10):
    scc, bg = _graphs(demo10)
    model = build_model(demo10, "p1", scc, bg)
    d = model.directory
    assert model.offset == scc.r
    for c in range(d.ncols):
        if c in d.eux_cols():
            assert model.objective[c] == 1
        elif c in d.z_cols():
            assert model.objective[c] == -1
        else:
            assert model.objective[c] == 0


def test_p2_objective_offset(demo10):
    scc, bg = _graphs(demo10)
    model = build_model(demo10, "p2", scc, bg)
    d = model.directory
    profile = source_cost_profile(demo10, scc)
    assert profile.min_costs == (F(1), F(1))
    assert profile.argmin_links == ((1, 1), (5, 3))
    assert model.offset == F(2)
    for c, edge in zip(d.eux_cols(), d.eux):
        assert model.objective[c] == demo10.costs[edge]
    for i, c in enumerate(d.z_cols()):
        assert model.objective[c] == -profile.min_costs[i]


def test_p3_cardinality_row(demo10):
    scc, bg = _graphs(demo10)
    model = build_model(demo10, "p3", scc, bg, k=3)
    row = model.rows[-1]
    d = model.directory
    assert row.tag == "card"
    assert row.sense == "<=" and row.rhs == 3 - scc.r
    assert all(row.coeffs[c] == 1 for c in d.eux_cols())
    assert all(row.coeffs[c] == -1 for c in d.z_cols())
    assert model.k == 3

    profile = source_cost_profile(demo10, scc)
    with pytest.raises(ValueError):
        build_p3_ilp(demo10, scc, bg, profile, k=-1)


def test_p4_shift(demo10):
    scc, bg = _graphs(demo10)
    model = build_model(demo10, "p4", scc, bg)
    d = model.directory
    gamma = demo10.n * demo10.w_max
    assert gamma == F(980)
    for c, edge in zip(d.eux_cols(), d.eux):
        assert model.objective[c] == demo10.costs[edge] + gamma
    assert model.offset == F(2) + 2 * gamma


def test_p4_rejects_all_zero_costs(chain3):
    free = StructuredSystem(
        name=chain3.name,
        n=chain3.n,
        m=chain3.m,
        a_pattern=chain3.a_pattern,
        b_pattern=chain3.b_pattern,
        costs={l: F(0) for l in chain3.b_pattern},
    )
    scc, bg = _graphs(free)
    profile = source_cost_profile(free, scc)
    with pytest.raises(ZeroMaxCost):
        build_p4_as_p2(free, scc, bg, profile)


def test_debug_text_golden(chain3):
    scc, bg = _graphs(chain3)
    text = debug_text(build_model(chain3, "p1", scc, bg))
    assert text == (
        "problem p1  cols 4  rows 8\n"
        "offset 1\n"
        "min 0 0 1 -1\n"
        "col 0 y[a:2,1]\n"
        "col 1 y[a:3,2]\n"
        "col 2 y[b:1,1]\n"
        "col 3 z[1]\n"
        "row match[xL1] +y[b:1,1] == 1\n"
        "row match[xL2] +y[a:2,1] == 1\n"
        "row match[xL3] +y[a:3,2] == 1\n"
        "row degree[xR1] +y[a:2,1] <= 1\n"
        "row degree[xR2] +y[a:3,2] <= 1\n"
        "row degree[xR3]  <= 1\n"
        "row degree[u1] +y[b:1,1] <= 1\n"
        "row reach[1] -y[b:1,1] +z[1] <= 0\n"
        "integral yes\n"
    )


def test_recover_selection_dedups_zero_cost_repair(chain3):
    """A zero-cost repair link still enters the selection, once."""
    free = StructuredSystem(
        name="freechain",
        n=chain3.n,
        m=chain3.m,
        a_pattern=chain3.a_pattern,
        b_pattern=chain3.b_pattern,
        costs={(1, 1): F(0)},
    )
    scc, bg = _graphs(free)
    profile = source_cost_profile(free, scc)
    model = build_model(free, "p2", scc, bg)
    d = model.directory
    vec = [F(0)] * d.ncols
    vec[d.eux_col((1, 1))] = F(1)  # y forced by the matching row
    # z_1 = 0: the repair path also picks (1, 1)
    sel = recover_selection(free, scc, profile, model, vec)
    assert sel.links == ((1, 1),)
    assert sel.e_mat == ((1, 1),) and sel.e_rea == ((1, 1),)
    assert sel.total_cost == 0 and sel.sparsity == 1
    assert sel.certificate.ok


def test_recover_selection_rejects_fractional(chain3):
    scc, bg = _graphs(chain3)
    profile = source_cost_profile(chain3, scc)
    model = build_model(chain3, "p2", scc, bg)
    vec = [F(1, 2)] * model.directory.ncols
    from ctrlsel import NonIntegralSolution

    with pytest.raises(NonIntegralSolution):
        recover_selection(chain3, scc, profile, model, vec)


def test_recover_selection_certifies(chain3):
    """An integral point that is not controllable is refused."""
    scc, bg = _graphs(chain3)
    profile = source_cost_profile(chain3, scc)
    model = build_model(chain3, "p2", scc, bg)
    vec = [F(0)] * model.directory.ncols
    vec[model.directory.z_col(1)] = F(1)  # claims the source is matched away
    with pytest.raises(CertificateFailure):
        recover_selection(chain3, scc, profile, model, vec)


def test_solve_demo10_p1(demo10):
    res = solve_problem(demo10, "p1")
    assert res.status == "optimal"
    assert res.optimum == 2
    assert res.selection.links == ((2, 1), (4, 4))
    assert res.selection.total_cost == F(140)


def test_solve_demo10_p2(demo10):
    res = solve_problem(demo10, "p2")
    assert res.status == "optimal"
    assert res.optimum == F(13)
    assert res.selection.sparsity == 4
    assert res.selection.certificate.ok


def test_solve_demo10_p3(demo10):
    res = solve_problem(demo10, "p3", k=3)
    assert res.status == "optimal" and res.optimum == F(52)
    assert res.selection.sparsity <= 3

    res = solve_problem(demo10, "p3", k=2)
    assert res.optimum == F(140)

    res = solve_problem(demo10, "p3", k=1)
    assert res.status == "infeasible"
    assert res.optimum is None and res.selection is None


def test_solve_demo10_p4(demo10):
    res = solve_problem(demo10, "p4")
    assert res.status == "optimal"
    assert res.optimum == F(140)
    assert res.selection.sparsity == 2
    assert res.penalized_optimum == F(140) + 2 * F(980)


def test_solve_strict_grouping(straddle3):
    with pytest.raises(GroupingViolation):
        solve_problem(straddle3, "p1")


def test_solve_lenient(straddle3):
    res = solve_problem(straddle3, "p1", strict_grouping=False)
    assert not res.grouped
    assert res.grouping_witness is not None
    assert res.status in ("optimal", "fractional")
    if res.status == "optimal":
        assert res.selection.certificate.ok


def test_solve_linkless_source_infeasible():
    sys = StructuredSystem(
        name="nolink",
        n=2,
        m=1,
        a_pattern=frozenset(),
        b_pattern=frozenset({(1, 1)}),
        costs={(1, 1): F(1)},
    )
    res = solve_problem(sys, "p1")
    assert res.status == "infeasible"


def test_solve_unmatchable_infeasible():
    """Reachable but unmatchable: state 2 has no incoming edge at all."""
    sys = StructuredSystem(
        name="thin",
        n=2,
        m=1,
        a_pattern=frozenset({(1, 1), (2, 1)}),
        b_pattern=frozenset({(1, 1)}),
        costs={(1, 1): F(1)},
    )
    res = solve_problem(sys, "p2")
    assert res.status == "optimal"

    sparse = StructuredSystem(
        name="thin2",
        n=3,
        m=1,
        a_pattern=frozenset({(2, 1), (3, 1)}),
        b_pattern=frozenset({(1, 1)}),
        costs={(1, 1): F(1)},
    )
    res = solve_problem(sparse, "p1")
    assert res.status == "infeasible"


def test_solve_rejects_unknown_problem(chain3):
    with pytest.raises(ValueError):
        solve_problem(chain3, "p9")
