"""Factor-graph solver: linear oracles, trilateration, windowing, Jacobians."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccfg.config import SolverOptions
from ccfg.errors import DuplicateId, UnknownVariable
from ccfg.graph import Factor, FactorGraph, jacobian_check


def linear_factor(var_ids, blocks, rhs, sigma, kind="linear"):
    """Residual sum_i A_i x_i - b with constant Jacobians."""
    blocks = [np.atleast_2d(np.asarray(b, float)) for b in blocks]
    rhs = np.atleast_1d(np.asarray(rhs, float))

    def res(*vals):
        out = -rhs.copy()
        for A, x in zip(blocks, vals):
            out = out + A @ x
        return out

    def jac(*vals):
        return [A.copy() for A in blocks]

    return Factor(var_ids, res, jac, sigma, kind=kind)


def range_factor(var_id, anchor, dist, sigma):
    anchor = np.asarray(anchor, float)

    def res(p):
        return np.array([np.hypot(*(p - anchor)) - dist])

    def jac(p):
        d = np.hypot(*(p - anchor))
        return [np.array([[(p[0] - anchor[0]) / d, (p[1] - anchor[1]) / d]])]

    return Factor((var_id,), res, jac, sigma, kind="range")


def test_add_variable_and_duplicate():
    g = FactorGraph()
    g.add_variable("x", 0.0)
    assert g.get("x").shape == (1,)
    g.add_variable("pose", [1.0, 2.0, 0.3])
    np.testing.assert_allclose(g.get("pose"), [1, 2, 0.3])
    with pytest.raises(DuplicateId):
        g.add_variable("x", 1.0)


def test_add_factor_unknown_variable():
    g = FactorGraph()
    g.add_variable("x", 0.0)
    with pytest.raises(UnknownVariable):
        g.add_factor(linear_factor(("y",), [np.eye(1)], [0.0], 1.0))


def test_two_priors_average():
    # Normal equations by hand: minimizing (x-3)^2 + (x-5)^2 gives x = 4.
    g = FactorGraph()
    g.add_variable("x", 0.0)
    g.add_factor(linear_factor(("x",), [np.eye(1)], [3.0], 1.0))
    g.add_factor(linear_factor(("x",), [np.eye(1)], [5.0], 1.0))
    report = g.solve()
    assert report.converged
    assert g.get("x")[0] == pytest.approx(4.0, abs=1e-10)


def test_prior_only_keeps_value():
    g = FactorGraph()
    g.add_variable("x", 7.0)
    g.add_factor(linear_factor(("x",), [np.eye(1)], [7.0], 0.1))
    g.solve()
    assert g.get("x")[0] == pytest.approx(7.0, abs=1e-12)


def _random_linear_graph(rng, n_vars=4, n_factors=9):
    g = FactorGraph()
    dims = rng.integers(1, 4, size=n_vars)
    for i, d in enumerate(dims):
        g.add_variable(f"v{i}", rng.normal(size=d))
    specs = []
    for k in range(n_factors):
        picks = sorted(set(rng.integers(0, n_vars,
                                        size=rng.integers(1, 3)).tolist()))
        rows = int(rng.integers(1, 4))
        blocks = [rng.normal(size=(rows, dims[i])) for i in picks]
        rhs = rng.normal(size=rows)
        sigma = rng.uniform(0.1, 2.0, size=rows)
        specs.append((picks, blocks, rhs, sigma))
        g.add_factor(linear_factor(tuple(f"v{i}" for i in picks),
                                   blocks, rhs, sigma))
    # Weak prior on every variable so the system has a unique minimizer.
    for i, d in enumerate(dims):
        spec = ([i], [np.eye(d)], np.zeros(d), np.full(d, 1e3))
        specs.append(spec)
        g.add_factor(linear_factor((f"v{i}",), [np.eye(d)], np.zeros(d),
                                   np.full(d, 1e3), kind="prior"))
    return g, dims, specs


def dense_lsq_oracle(dims, specs):
    """Independent weighted least-squares solve of the same linear system."""
    offs = np.concatenate([[0], np.cumsum(dims)])
    n = offs[-1]
    A_rows, b_rows = [], []
    for picks, blocks, rhs, sigma in specs:
        rows = len(rhs)
        A = np.zeros((rows, n))
        for i, block in zip(picks, blocks):
            A[:, offs[i]:offs[i] + dims[i]] = block
        A_rows.append(A / sigma[:, None])
        b_rows.append(rhs / sigma)
    A = np.vstack(A_rows)
    b = np.concatenate(b_rows)
    return np.linalg.lstsq(A, b, rcond=None)[0], offs


def test_linear_graph_matches_dense_oracle():
    for seed in range(6):
        rng = np.random.default_rng(seed)
        g, dims, specs = _random_linear_graph(rng)
        report = g.solve()
        assert report.converged
        assert report.final_cost <= report.initial_cost + 1e-12
        x_star, offs = dense_lsq_oracle(dims, specs)
        for i, d in enumerate(dims):
            np.testing.assert_allclose(g.get(f"v{i}"), x_star[offs[i]:offs[i] + d],
                                       atol=1e-10)


def test_linear_graph_converges_in_one_iteration():
    rng = np.random.default_rng(3)
    g, _, _ = _random_linear_graph(rng, n_vars=2, n_factors=4)
    report = g.solve(SolverOptions(lambda0=1e-12))
    assert report.iterations <= 2


def test_trilateration():
    truth = np.array([1.3, -0.7])
    anchors = [np.array([0.0, 0.0]), np.array([3.0, 0.0]), np.array([0.0, 2.0])]
    g = FactorGraph()
    g.add_variable("p", [0.0, 0.1])
    for k, a in enumerate(anchors):
        g.add_factor(range_factor("p", a, float(np.hypot(*(truth - a))), 1e-3))
    report = g.solve()
    assert report.converged
    np.testing.assert_allclose(g.get("p"), truth, atol=1e-8)


def test_sigma_scaling_leaves_minimizer_unchanged():
    for seed in range(4):
        rng = np.random.default_rng(100 + seed)
        g1, dims, specs = _random_linear_graph(rng)
        g1.solve()
        g2 = FactorGraph()
        for i, d in enumerate(dims):
            g2.add_variable(f"v{i}", np.zeros(d))
        for picks, blocks, rhs, sigma in specs:
            g2.add_factor(linear_factor(tuple(f"v{i}" for i in picks),
                                        blocks, rhs, sigma * 37.5))
        g2.solve()
        for i in range(len(dims)):
            np.testing.assert_allclose(g1.get(f"v{i}"), g2.get(f"v{i}"),
                                       atol=1e-8)


def test_slide_window_fixes_old_frames_keeps_static():
    g = FactorGraph()
    g.add_variable("bias", 0.0)
    for t in range(200):
        g.add_variable(f"x{t}", float(t), time_index=t)
        g.add_factor(linear_factor((f"x{t}", "bias"), [np.eye(1), np.eye(1)],
                                   [float(t)], 1.0, kind="obs"))
    g.slide_window(50)
    active = g.active_time_indices()
    assert len(active) == 50
    assert active[0] == 150 and active[-1] == 199
    assert not g.variables["bias"].fixed


def test_slide_window_no_new_factors_no_drift():
    g = FactorGraph()
    g.add_variable("bias", 0.5)
    rng = np.random.default_rng(7)
    for t in range(60):
        g.add_variable(f"x{t}", 0.0, time_index=t)
        g.add_factor(linear_factor((f"x{t}", "bias"), [np.eye(1), np.eye(1)],
                                   [rng.normal()], 0.5, kind="obs"))
        g.add_factor(linear_factor((f"x{t}",), [np.eye(1)],
                                   [rng.normal()], 1.0, kind="prior"))
    g.solve()
    before = {vid: g.get(vid) for vid in g.variables if not g.variables[vid].fixed}
    g.slide_window(20)
    g.solve()
    for vid, old in before.items():
        if not g.variables[vid].fixed:
            np.testing.assert_allclose(g.get(vid), old, atol=1e-6)


def test_jacobian_check_linear_and_trig():
    f = linear_factor(("x",), [np.array([[2.0, -1.0]])], [0.3], 1.0)
    assert jacobian_check(f, [np.array([0.4, 1.2])]) < 1e-10

    def res(x):
        return np.array([np.sin(x[0]) * x[1], np.cos(x[0]) + x[1] ** 2])

    def jac(x):
        return [np.array([[np.cos(x[0]) * x[1], np.sin(x[0])],
                          [-np.sin(x[0]), 2 * x[1]]])]

    trig = Factor(("x",), res, jac, 1.0, kind="trig")
    assert jacobian_check(trig, [np.array([0.7, -0.3])], h=1e-6) < 1e-5


def test_jacobian_check_flags_wrong_jacobian():
    def res(x):
        return np.array([x[0] ** 2])

    def jac(x):
        return [np.array([[1.0]])]  # wrong on purpose

    bad = Factor(("x",), res, jac, 1.0)
    assert jacobian_check(bad, [np.array([1.5])]) > 0.1


def test_nonlinear_cost_monotone():
    g = FactorGraph()
    g.add_variable("p", [4.0, 4.0])
    for a in ([0, 0], [2, 0], [0, 3], [1, 2]):
        g.add_factor(range_factor("p", np.array(a, float), 1.0, 0.1))
    report = g.solve()
    assert report.final_cost <= report.initial_cost


def test_dump_is_json_friendly():
    import json
    g = FactorGraph()
    g.add_variable("x", 1.0)
    g.add_factor(linear_factor(("x",), [np.eye(1)], [2.0], 1.0))
    json.dumps(g.dump())
