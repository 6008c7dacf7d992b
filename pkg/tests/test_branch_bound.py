import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import Bounds, LinearConstraint, milp

from clearnet.milp.branch_bound import MilpInstance, solve_milp, tighten_bounds

from oracles import lp_by_vertices


def random_instance(rng, nb, nc, m):
    nv = nb + nc
    A = rng.normal(size=(m, nv)) * (rng.random((m, nv)) < 0.7)
    b = rng.uniform(0.5, 3.0, m)
    c = rng.normal(size=nv)
    integer = np.zeros(nv, dtype=bool)
    integer[:nb] = True
    hi = np.concatenate([np.ones(nb), rng.uniform(0.5, 2.0, nc)])
    return MilpInstance(c, A, b, np.zeros(nv), hi, integer, "max")


def brute_force(inst):
    """Fix every binary assignment and solve the rest by vertex enumeration."""
    nb = int(inst.integer.sum())
    best = None
    for bits in itertools.product((0.0, 1.0), repeat=nb):
        bits = np.array(bits)
        A = inst.A_ub[:, nb:]
        rhs = inst.b_ub - inst.A_ub[:, :nb] @ bits
        if A.shape[1] == 0:
            val = float(inst.c[:nb] @ bits) if np.all(rhs >= -1e-12) else None
        else:
            val, _ = lp_by_vertices(inst.c[nb:], A, rhs, inst.lower[nb:], inst.upper[nb:])
            val = None if val is None else val + float(inst.c[:nb] @ bits)
        if val is not None and (best is None or val > best):
            best = val
    return best


def test_pure_lp_toy():
    inst = MilpInstance(np.array([1.0, 1.0]), np.array([[1.0, 2.0], [1.0, 0.0]]), np.array([4.0, 3.0]),
                        np.zeros(2), np.full(2, 10.0), np.zeros(2, dtype=bool), "max")
    sol = solve_milp(inst)
    assert sol.status == "optimal" and sol.nodes == 1
    np.testing.assert_allclose(sol.x, [3, 0.5])


def test_knapsack():
    w = np.array([5.0, 4.0, 3.0])
    inst = MilpInstance(np.array([10.0, 40.0, 30.0]), w[None, :], np.array([8.0]), np.zeros(3),
                        np.ones(3), np.ones(3, dtype=bool), "max")
    sol = solve_milp(inst)
    np.testing.assert_array_equal(sol.x, [0, 1, 1])
    assert sol.objective == pytest.approx(70)


def test_infeasible_instance():
    inst = MilpInstance(np.array([1.0]), np.array([[-1.0]]), np.array([-0.5]), np.zeros(1), np.ones(1),
                        np.ones(1, dtype=bool), "max")
    inst.upper[:] = 0.4  # x >= 0.5 and x <= 0.4
    assert solve_milp(inst).status == "infeasible"
    assert solve_milp(inst, tighten=False).status == "infeasible"


def test_node_limit_reported():
    rng = np.random.default_rng(30)
    n = 12
    w = rng.uniform(1, 2, n)
    inst = MilpInstance(w + rng.uniform(0, 0.01, n), w[None, :], np.array([w.sum() / 2]), np.zeros(n),
                        np.ones(n), np.ones(n, dtype=bool), "max")
    assert solve_milp(inst, node_limit=3).status == "node-limit"


def test_tighten_bounds_basic():
    A = np.array([[1.0, 1.0]])
    lo, hi = tighten_bounds(A, np.array([1.5]), np.zeros(2), np.array([1.0, 5.0]),
                            np.array([True, False]))
    assert hi[0] == 1.0
    assert hi[1] == pytest.approx(1.5, abs=1e-8)
    # an integer forced below 1 by another variable's lower bound is fixed to 0
    lo, hi = tighten_bounds(A, np.array([1.5]), np.array([0.0, 0.8]), np.array([1.0, 5.0]),
                            np.array([True, False]))
    assert hi[0] == 0.0


def test_tighten_bounds_detects_empty_box():
    A = np.array([[1.0, 1.0]])
    assert tighten_bounds(A, np.array([1.0]), np.array([0.6, 0.6]), np.ones(2),
                          np.zeros(2, dtype=bool)) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_matches_brute_force(nb, nc, m, seed):
    inst = random_instance(np.random.default_rng(seed), nb, nc, m)
    want = brute_force(inst)
    sol = solve_milp(inst)
    if want is None:
        assert sol.status == "infeasible"
    else:
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(want, abs=1e-7)
        assert inst.max_violation(sol.x) <= 1e-7
        assert np.all(np.isin(sol.x[inst.integer], (0.0, 1.0)))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.integers(2, 8), st.integers(0, 2**31))
def test_matches_highs_milp(nb, nc, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, nb, nc, int(rng.integers(2, 8)))
    ref = milp(-inst.c, constraints=LinearConstraint(inst.A_ub, -np.inf, inst.b_ub),
               bounds=Bounds(inst.lower, inst.upper), integrality=inst.integer.astype(int))
    sol = solve_milp(inst)
    assert sol.status == "optimal" and ref.status == 0
    assert sol.objective == pytest.approx(-ref.fun, abs=1e-6)
    # the same optimum without bound tightening
    assert solve_milp(inst, tighten=False).objective == pytest.approx(sol.objective, abs=1e-6)
