"""LP engine versus an independent reference solver.

Every scenario here is cross-checked against scipy's HiGHS interface, which
shares no code with the engine under test.
"""

import numpy as np
import pytest
from scipy.optimize import linprog

from cfvcran.solver.simplex import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
    BoundedLp,
    solve_lp,
)


def _reference(c, a, senses, b, lb, ub):
    a = np.asarray(a, dtype=float)
    le = [i for i, s in enumerate(senses) if s == "<="]
    ge = [i for i, s in enumerate(senses) if s == ">="]
    eq = [i for i, s in enumerate(senses) if s == "="]
    a_ub = np.vstack([a[le], -a[ge]]) if le or ge else None
    b_ub = np.concatenate([b[le], -b[ge]]) if le or ge else None
    bounds = [(l, None if np.isinf(u) else u) for l, u in zip(lb, ub)]
    return linprog(c, A_ub=a_ub, b_ub=b_ub,
                   A_eq=a[eq] if eq else None, b_eq=b[eq] if eq else None,
                   bounds=bounds, method="highs")


def _random_case(gen):
    m = int(gen.integers(2, 9))
    n = int(gen.integers(2, 12))
    a = gen.normal(size=(m, n)) * (gen.random((m, n)) < 0.7)
    c = gen.normal(size=n)
    b = 2.0 * gen.normal(size=m)
    senses = [("<=", ">=", "=")[gen.integers(0, 3)] for _ in range(m)]
    lb = np.where(gen.random(n) < 0.8, gen.uniform(-3.0, 0.0, n), 0.0)
    ub = np.where(gen.random(n) < 0.85, gen.uniform(0.5, 4.0, n), np.inf)
    return c, a, senses, b, lb, ub


def _check_feasible(x, a, senses, b, lb, ub, tol=1e-6):
    assert np.all(x >= lb - tol) and np.all(x <= ub + tol)
    ax = a @ x
    for i, s in enumerate(senses):
        if s == "<=":
            assert ax[i] <= b[i] + tol
        elif s == ">=":
            assert ax[i] >= b[i] - tol
        else:
            assert abs(ax[i] - b[i]) <= tol


@pytest.mark.parametrize("seed", range(40))
def test_random_lps_match_reference(seed):
    gen = np.random.default_rng(seed)
    case = _random_case(gen)
    c, a, senses, b, lb, ub = case
    status, x, obj = solve_lp(*case)
    ref = _reference(c, a, senses, b, lb, ub)
    if ref.status == 0:
        assert status == OPTIMAL
        assert obj == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
        _check_feasible(x, a, senses, b, lb, ub)
    elif ref.status == 2:
        assert status == INFEASIBLE
    elif ref.status == 3:
        assert status == UNBOUNDED
    else:  # pragma: no cover - reference solver hiccup
        pytest.skip(f"reference returned status {ref.status}")


def test_simple_known_optimum():
    # max x+y on the unit square cut by x + y <= 1.5
    status, x, obj = solve_lp(
        c=[-1.0, -1.0],
        a=[[1.0, 1.0]],
        senses=["<="],
        b=[1.5],
        lb=[0.0, 0.0],
        ub=[1.0, 1.0],
    )
    assert status == OPTIMAL
    assert obj == pytest.approx(-1.5)


def test_equality_only_system():
    status, x, obj = solve_lp(
        c=[1.0, 2.0, 0.5],
        a=[[1.0, 1.0, 1.0], [1.0, -1.0, 0.0]],
        senses=["=", "="],
        b=[2.0, 0.5],
        lb=[0.0, 0.0, 0.0],
        ub=[np.inf, np.inf, np.inf],
    )
    assert status == OPTIMAL
    assert x[0] - x[1] == pytest.approx(0.5, abs=1e-9)
    assert x.sum() == pytest.approx(2.0, abs=1e-9)


def test_infeasible_detected():
    status, x, obj = solve_lp(
        c=[1.0],
        a=[[1.0], [1.0]],
        senses=["<=", ">="],
        b=[1.0, 2.0],
        lb=[0.0],
        ub=[10.0],
    )
    assert status == INFEASIBLE and x is None


def test_unbounded_detected():
    status, x, obj = solve_lp(
        c=[-1.0, 0.0],
        a=[[0.0, 1.0]],
        senses=["<="],
        b=[1.0],
        lb=[0.0, 0.0],
        ub=[np.inf, 2.0],
    )
    assert status == UNBOUNDED


def test_degenerate_cycling_guard():
    """A classically degenerate LP (many ties at the origin) terminates."""
    c = [-0.75, 150.0, -0.02, 6.0]
    a = [
        [0.25, -60.0, -0.04, 9.0],
        [0.5, -90.0, -0.02, 3.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
    senses = ["<=", "<=", "<="]
    b = [0.0, 0.0, 1.0]
    status, x, obj = solve_lp(c, a, senses, b,
                              lb=[0.0] * 4, ub=[np.inf] * 4)
    assert status == OPTIMAL
    assert obj == pytest.approx(-0.05, abs=1e-9)


def test_iteration_limit_reported():
    gen = np.random.default_rng(1)
    c, a, senses, b, lb, ub = _random_case(gen)
    status, _, _ = solve_lp(c, a, senses, b, lb, ub, max_iter=1)
    assert status == ITERATION_LIMIT


def test_free_variables_rejected():
    with pytest.raises(NotImplementedError):
        BoundedLp([1.0], [[1.0]], ["<="], [1.0], [-np.inf], [np.inf])


def test_bad_sense_rejected():
    with pytest.raises(ValueError, match="sense"):
        BoundedLp([1.0], [[1.0]], ["<"], [1.0], [0.0], [1.0])


# ---------------------------------------------------------------------------
# warm restarts through bound edits (the branch-and-bound access pattern)
# ---------------------------------------------------------------------------

def test_reoptimize_after_tightening_matches_fresh_solve():
    gen = np.random.default_rng(7)
    for _ in range(15):
        c, a, senses, b, lb, ub = _random_case(gen)
        lp = BoundedLp(c, a, senses, b, lb, ub)
        if lp.reoptimize() != OPTIMAL:
            continue
        j = int(gen.integers(0, len(c)))
        new_lb, new_ub = 0.0, 0.0  # pin variable j to zero
        if lb[j] > 0.0:
            continue
        lp.set_bound(j, new_lb, new_ub)
        status = lp.reoptimize()
        lb2 = lb.copy()
        ub2 = ub.copy()
        lb2[j] = new_lb
        ub2[j] = new_ub
        ref = _reference(c, a, senses, b, lb2, ub2)
        if ref.status == 0:
            assert status == OPTIMAL
            assert lp.objective() == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
        elif ref.status == 2:
            assert status == INFEASIBLE


def test_bound_push_and_pop_restores_optimum():
    c = [-1.0, -2.0, -1.5]
    a = [[1.0, 1.0, 1.0], [2.0, 1.0, 0.0]]
    senses = ["<=", "<="]
    b = [2.0, 2.5]
    lb = [0.0, 0.0, 0.0]
    ub = [1.0, 1.0, 1.0]
    lp = BoundedLp(c, a, senses, b, lb, ub)
    assert lp.reoptimize() == OPTIMAL
    base = lp.objective()
    saved = lp.get_bound(1)
    lp.set_bound(1, 0.0, 0.0)
    assert lp.reoptimize() == OPTIMAL
    pinned = lp.objective()
    assert pinned >= base - 1e-12
    lp.set_bound(1, *saved)
    assert lp.reoptimize() == OPTIMAL
    assert lp.objective() == pytest.approx(base, abs=1e-9)


def test_repeated_fix_unfix_stays_consistent():
    """Exhaustively fixing binaries through bounds equals brute enumeration."""
    gen = np.random.default_rng(11)
    n = 4
    c = gen.normal(size=n)
    a = gen.normal(size=(3, n))
    b = a @ (0.5 * np.ones(n)) + 0.3  # keep some slack around the centre
    senses = ["<="] * 3
    lp = BoundedLp(c, a, senses, b, [0.0] * n, [1.0] * n)
    best_lp = np.inf
    for mask in range(2 ** n):
        bits = [(mask >> i) & 1 for i in range(n)]
        for i, bit in enumerate(bits):
            lp.set_bound(i, float(bit), float(bit))
        if lp.reoptimize() == OPTIMAL:
            best_lp = min(best_lp, lp.objective())
        for i in range(n):
            lp.set_bound(i, 0.0, 1.0)
    feas = []
    for mask in range(2 ** n):
        x = np.array([(mask >> i) & 1 for i in range(n)], dtype=float)
        if np.all(a @ x <= b + 1e-9):
            feas.append(c @ x)
    assert best_lp == pytest.approx(min(feas), abs=1e-9)


def test_row_scaling_preserves_solution():
    """Badly scaled rows (1e6 spread) still solve to reference accuracy."""
    c = [1.0, -1.0]
    a = [[1e6, 2e6], [1e-4, -3e-4]]
    senses = ["<=", ">="]
    b = [3e6, -2e-4]
    lb = [0.0, 0.0]
    ub = [5.0, 5.0]
    status, x, obj = solve_lp(c, a, senses, b, lb, ub)
    ref = _reference(c, np.asarray(a), senses, np.asarray(b), lb, ub)
    assert status == OPTIMAL
    assert obj == pytest.approx(ref.fun, rel=1e-8)
