"""Integer-program representation and the two scenario builders.

The builder checks hinge on two independent oracles: closed-form counting of
rows/columns from the instance dimensions, and direct evaluation of the rate
rows against the quadratic form they linearize.
"""

import numpy as np
import pytest

import cfvcran as cf
from cfvcran.milp.builders import build_scenario1, build_scenario2, decode_assignment
from cfvcran.milp.model import BINARY, CONTINUOUS, EQ, GE, LE, IlpModel
from cfvcran.solver.planner import assemble_values


# ---------------------------------------------------------------------------
# the model container
# ---------------------------------------------------------------------------

def test_model_construction_basics():
    m = IlpModel()
    x = m.add_variable("x", BINARY)
    y = m.add_variable("y", CONTINUOUS, lb=-1.0, ub=3.0)
    m.add_constraint("r1", [(x, 2.0), (y, -1.0)], LE, 4.0)
    m.set_objective([(y, 1.0)])
    m.validate()
    assert m.n_variables() == 2 and m.n_constraints() == 1
    assert m.variable_id("y") == y
    lb, ub = m.bounds()
    assert lb.tolist() == [0.0, -1.0] and ub.tolist() == [1.0, 3.0]
    assert m.binary_ids().tolist() == [x]


def test_model_rejects_duplicates_and_bad_sense():
    m = IlpModel()
    m.add_variable("x", BINARY)
    with pytest.raises(ValueError, match="duplicate"):
        m.add_variable("x", BINARY)
    with pytest.raises(ValueError, match="sense"):
        m.add_constraint("r", [(0, 1.0)], "<", 0.0)
    m.add_constraint("r", [(0, 1.0)], LE, 0.0)
    with pytest.raises(ValueError, match="duplicate"):
        m.add_constraint("r", [(0, 1.0)], LE, 0.0)


def test_model_validate_catches_bad_references():
    m = IlpModel()
    m.add_variable("x", BINARY)
    m.add_constraint("r", [(5, 1.0)], LE, 0.0)
    with pytest.raises(ValueError, match="unknown variable"):
        m.validate()
    m2 = IlpModel()
    m2.add_variable("x", BINARY)
    m2.add_constraint("r", [(0, np.inf)], LE, 0.0)
    with pytest.raises(ValueError, match="non-finite"):
        m2.validate()


def test_model_evaluate_signs():
    m = IlpModel()
    v = m.add_variable("v", CONTINUOUS, lb=0.0, ub=10.0)
    m.add_constraint("le", [(v, 1.0)], LE, 2.0)
    m.add_constraint("ge", [(v, 1.0)], GE, 2.0)
    m.add_constraint("eq", [(v, 1.0)], EQ, 2.0)
    viol = m.evaluate(np.array([5.0]))
    assert viol == [3.0, -3.0, 3.0]
    viol = m.evaluate(np.array([1.0]))
    assert viol == [-1.0, 1.0, 1.0]


def test_model_json_round_trip(tiny_deployment, tiny_sp, tiny_pc):
    model, _ = build_scenario2(tiny_deployment, tiny_sp, tiny_pc)
    back = IlpModel.from_json(model.to_json())
    assert back.coefficient_dict() == model.coefficient_dict()
    assert [v.name for v in back.variables] == [v.name for v in model.variables]
    assert np.array_equal(back.objective_vector(), model.objective_vector())
    assert [c.rhs for c in back.constraints] == [c.rhs for c in model.constraints]
    assert back.metadata == model.metadata


def test_constraint_matrix_matches_terms():
    m = IlpModel()
    x = m.add_variable("x", BINARY)
    y = m.add_variable("y", CONTINUOUS)
    m.add_constraint("r1", [(x, 2.0), (y, -1.0), (x, 0.5)], LE, 4.0)
    a, senses, rhs = m.constraint_matrix()
    assert a.toarray().tolist() == [[2.5, -1.0]]
    assert senses == [LE] and rhs.tolist() == [4.0]


# ---------------------------------------------------------------------------
# builder dimension oracles
# ---------------------------------------------------------------------------

def _counts_scenario1(cfg):
    """Closed-form variable/row counts for the fixed-assignment program."""
    lm = cfg.L // cfg.M
    pairs_per_ue = lm * (lm - 1) // 2
    n_x = cfg.K * lm
    n_a = cfg.K * pairs_per_ue
    n_vars = n_x + cfg.L + 2 * cfg.W + n_a + 3 * cfg.M + cfg.M + 1
    n_rows = (
        2 * cfg.M          # worst-operator link + power accounting
        + cfg.K            # coverage
        + 2 * cfg.L        # shared activation cap + no-idle-active
        + 3 * n_a          # product linearization
        + 4 * cfg.M        # wavelength cap, lightpath count, load, hosting
        + 3 * cfg.M        # count aggregates (APs, lightpaths, DUs)
        + cfg.K            # rate rows
    )
    return n_vars, n_rows


def _counts_scenario2(cfg):
    lm = cfg.L // cfg.M
    pairs_per_ue = cfg.M * (lm * (lm - 1) // 2)
    n_x = cfg.K * cfg.L
    n_a = cfg.K * pairs_per_ue
    n_rho = cfg.K * cfg.M
    n_vars = n_x + cfg.L + 2 * cfg.W + n_a + n_rho + 3 * cfg.M + cfg.M + 1
    n_rows = (
        2 * cfg.M
        + cfg.K
        + 2 * cfg.L
        + 3 * n_a
        + 4 * cfg.M
        + 3 * cfg.M                                       # count aggregates
        + cfg.K * cfg.M                                   # rate rows per operator
        + cfg.K * (cfg.M * (cfg.M - 1) // 2) * lm * lm    # no mixing
        + cfg.K * cfg.L + cfg.K * cfg.M                   # attachment link rows
    )
    return n_vars, n_rows


def test_scenario1_dimensions(tiny_deployment, tiny_sp, tiny_pc):
    model, index = build_scenario1(tiny_deployment, tiny_sp, tiny_pc)
    n_vars, n_rows = _counts_scenario1(tiny_deployment.config)
    assert model.n_variables() == n_vars
    assert model.n_constraints() == n_rows
    assert len(index.x) == tiny_deployment.config.K * 2
    assert index.rho == {}


def test_scenario2_dimensions(tiny_deployment, tiny_sp, tiny_pc):
    model, index = build_scenario2(tiny_deployment, tiny_sp, tiny_pc)
    n_vars, n_rows = _counts_scenario2(tiny_deployment.config)
    assert model.n_variables() == n_vars
    assert model.n_constraints() == n_rows


def test_zero_target_drops_rate_machinery(tiny_deployment, tiny_exp, tiny_pc):
    cfg = tiny_deployment.config
    sp0 = cf.build_sinr_program(tiny_exp, cfg, 0.0)
    model, index = build_scenario1(tiny_deployment, sp0, tiny_pc)
    assert index.a == {}
    names = [c.name for c in model.constraints]
    assert not any(n.startswith("SIN") for n in names)
    assert not any(n.startswith("L1") for n in names)


def test_scenario1_keeps_users_on_home_operator(tiny_deployment, tiny_sp, tiny_pc):
    _, index = build_scenario1(tiny_deployment, tiny_sp, tiny_pc)
    d = tiny_deployment
    for (k, l) in index.x:
        assert d.ap_owner[l] == d.ue_owner[k]


def test_tighten_activation_swaps_row_shape(tiny_deployment, tiny_sp, tiny_pc):
    loose, _ = build_scenario1(tiny_deployment, tiny_sp, tiny_pc)
    tight, _ = build_scenario1(tiny_deployment, tiny_sp, tiny_pc, tighten_activation=True)
    loose_names = {c.name for c in loose.constraints}
    tight_names = {c.name for c in tight.constraints}
    assert any(n.startswith("CAP") for n in loose_names)
    assert not any(n.startswith("CAP") for n in tight_names)
    assert any(n.startswith("XZ") for n in tight_names)


# ---------------------------------------------------------------------------
# rate-row fidelity
# ---------------------------------------------------------------------------

def _rate_row_value(model, name, values):
    row = next(c for c in model.constraints if c.name == name)
    lhs = sum(coef * values[vid] for vid, coef in row.terms)
    return lhs, row.rhs


def test_rate_row_reproduces_quadratic_form(tiny_deployment, tiny_exp, tiny_sp, tiny_pc):
    """At any 0-1 serving pattern with consistent products, the linear row
    body must equal the quadratic form sum_i x_i^T cbar[k,i] x_i restricted
    to the operator's APs."""
    d = tiny_deployment
    cfg = d.config
    model, index = build_scenario1(d, tiny_sp, tiny_pc)
    gen = np.random.default_rng(3)
    for _ in range(20):
        x = np.zeros((cfg.K, cfg.L), dtype=int)
        for (k, l) in index.x:
            x[k, l] = gen.integers(0, 2)
        values = assemble_values(index, model.n_variables(), d, tiny_pc,
                                 x, np.asarray(d.ue_owner))
        for k in range(cfg.K):
            m = int(d.ue_owner[k])
            aps = [int(l) for l in d.aps_of(m)]
            users = [int(i) for i in d.ues_of(m)]
            quad = 0.0
            for i in users:
                xi = x[i, aps]
                quad += xi @ tiny_sp.cbar[k][i][np.ix_(aps, aps)] @ xi
            lhs, rhs = _rate_row_value(model, f"SIN{k}", values)
            assert lhs == pytest.approx(quad, rel=1e-12, abs=1e-12)
            assert rhs == -1.0


def test_scenario2_rate_rows_deactivate(tiny_deployment, tiny_exp, tiny_sp, tiny_pc):
    """A user attached to operator m must satisfy that operator's rate row;
    the other operator's row must be slack at any serving pattern."""
    d = tiny_deployment
    cfg = d.config
    model, index = build_scenario2(d, tiny_sp, tiny_pc)
    x = np.zeros((cfg.K, cfg.L), dtype=int)
    owner = np.zeros(cfg.K, dtype=int)
    for k in range(cfg.K):
        aps = d.aps_of(0)
        x[k, aps] = 1  # everyone on operator 0, all its APs
    values = assemble_values(index, model.n_variables(), d, tiny_pc, x, owner)
    for k in range(cfg.K):
        lhs_off, rhs_off = _rate_row_value(model, f"SIN{k}_1", values)
        assert lhs_off <= rhs_off + 1e-12  # deactivated row holds trivially


def test_no_mixing_rows_bite(tiny_deployment, tiny_sp, tiny_pc):
    d = tiny_deployment
    cfg = d.config
    model, index = build_scenario2(d, tiny_sp, tiny_pc)
    x = np.zeros((cfg.K, cfg.L), dtype=int)
    x[0, d.aps_of(0)[0]] = 1
    x[0, d.aps_of(1)[0]] = 1  # user 0 mixes both operators
    for k in range(1, cfg.K):
        x[k, d.aps_of(0)[0]] = 1
    values = assemble_values(index, model.n_variables(), d, tiny_pc,
                             x, np.zeros(cfg.K, dtype=int))
    viol = np.asarray(model.evaluate(values))
    names = [c.name for c in model.constraints]
    mixing = [i for i, n in enumerate(names) if n.startswith("NC0")]
    assert viol[mixing].max() > 0.5


def test_assemble_values_feasible_for_model(tiny_deployment, tiny_exp, tiny_sp, tiny_pc):
    """A greedy plan assembled into a full vector satisfies every row."""
    from cfvcran.solver.planner import greedy_plan
    d = tiny_deployment
    for scenario, builder in ((1, build_scenario1), (2, build_scenario2)):
        plan = greedy_plan(d, tiny_exp, tiny_sp, scenario)
        if plan is None:
            continue
        model, index = builder(d, tiny_sp, tiny_pc)
        values = assemble_values(index, model.n_variables(), d, tiny_pc, *plan)
        viol = np.asarray(model.evaluate(values))
        assert viol.max() <= 1e-9, (scenario, float(viol.max()))


def test_decode_assignment_round_trip(tiny_deployment, tiny_sp, tiny_pc):
    d = tiny_deployment
    cfg = d.config
    model, index = build_scenario1(d, tiny_sp, tiny_pc)
    x = np.zeros((cfg.K, cfg.L), dtype=int)
    for k in range(cfg.K):
        x[k, d.aps_of(int(d.ue_owner[k]))[0]] = 1
    values = assemble_values(index, model.n_variables(), d, tiny_pc,
                             x, np.asarray(d.ue_owner))
    decoded = decode_assignment(index, values, d)
    assert np.array_equal(decoded["x"], x)
    assert np.array_equal(decoded["z"], (x.sum(axis=0) > 0).astype(int))
    assert decoded["rho"][np.arange(cfg.K), d.ue_owner].all()
    assert decoded["tpc"].shape == (cfg.M,)
    assert decoded["tpc_max"] == pytest.approx(decoded["tpc"].max())


def test_metadata_identifies_build(tiny_deployment, tiny_sp, tiny_pc):
    model, _ = build_scenario2(tiny_deployment, tiny_sp, tiny_pc)
    assert model.metadata["scenario"] == 2
    assert model.metadata["se_target"] == tiny_sp.se_target
    assert model.metadata["deployment"] == tiny_deployment.digest()


def test_scenario1_requires_fixed_assignment(tiny_deployment, tiny_sp, tiny_pc):
    with pytest.raises(ValueError, match="ue_owner"):
        build_scenario1(tiny_deployment.without_ue_owner(), tiny_sp, tiny_pc)
