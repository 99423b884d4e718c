"""MPS writer/parser: the round trip must preserve every coefficient."""

import numpy as np
import pytest

from cfvcran.milp.builders import build_scenario1, build_scenario2
from cfvcran.milp.model import BINARY, CONTINUOUS, EQ, GE, LE, IlpModel
from cfvcran.milp.mps import dumps_mps, parse_mps, read_mps, write_mps


def _assert_equivalent(a: IlpModel, b: IlpModel, renamed: bool) -> None:
    assert b.n_variables() == a.n_variables()
    assert b.n_constraints() == a.n_constraints()
    assert [v.kind for v in b.variables] == [v.kind for v in a.variables]
    assert [c.sense for c in b.constraints] == [c.sense for c in a.constraints]
    assert [c.rhs for c in b.constraints] == [c.rhs for c in a.constraints]
    lb_a, ub_a = a.bounds()
    lb_b, ub_b = b.bounds()
    assert np.array_equal(lb_a, lb_b) and np.array_equal(ub_a, ub_b)
    assert np.array_equal(a.objective_vector(), b.objective_vector())
    if renamed:
        da = {}
        for c in a.constraints:
            ridx = a._row_names[c.name]
            for vid, coef in c.terms:
                key = (ridx, vid)
                da[key] = da.get(key, 0.0) + coef
        db = {}
        for c in b.constraints:
            ridx = b._row_names[c.name]
            for vid, coef in c.terms:
                key = (ridx, vid)
                db[key] = db.get(key, 0.0) + coef
        assert da == db
    else:
        assert a.coefficient_dict() == b.coefficient_dict()


def test_round_trip_small_hand_model():
    m = IlpModel()
    x = m.add_variable("X0", BINARY)
    y = m.add_variable("Y0", CONTINUOUS, lb=-2.5, ub=7.0)
    f = m.add_variable("F0", CONTINUOUS, lb=3.0, ub=3.0)
    m.add_constraint("R_LE", [(x, 1.0 / 3.0), (y, -1.0)], LE, 0.1)
    m.add_constraint("R_GE", [(y, 2.0), (f, 1e-17)], GE, -4.0)
    m.add_constraint("R_EQ", [(x, 1.0)], EQ, 1.0)
    m.set_objective([(y, 1.0), (x, -0.25)])
    back = parse_mps(dumps_mps(m))
    _assert_equivalent(m, back, renamed=False)
    # 1/3 must survive the text representation bit for bit
    key = ("R_LE", "X0")
    assert back.coefficient_dict()[key] == 1.0 / 3.0


def test_round_trip_scenario_models(tiny_deployment, tiny_sp, tiny_pc):
    for builder in (build_scenario1, build_scenario2):
        model, _ = builder(tiny_deployment, tiny_sp, tiny_pc)
        back = parse_mps(dumps_mps(model))
        _assert_equivalent(model, back, renamed=False)


def test_long_names_fall_back_to_ids():
    m = IlpModel()
    v = m.add_variable("AVERYLONGNAME", CONTINUOUS, lb=0.0, ub=5.0)
    m.add_constraint("ROW", [(v, 2.0)], LE, 3.0)
    m.set_objective([(v, 1.0)])
    text = dumps_mps(m)
    assert "AVERYLONGNAME" not in text
    assert "C0" in text and "R0" in text
    back = parse_mps(text)
    _assert_equivalent(m, back, renamed=True)


def test_zero_rhs_not_written_but_restored():
    m = IlpModel()
    v = m.add_variable("V", CONTINUOUS, lb=0.0, ub=1.0)
    m.add_constraint("RZ", [(v, 1.0)], LE, 0.0)
    text = dumps_mps(m)
    assert "RHS       RZ" not in text
    back = parse_mps(text)
    assert back.constraints[0].rhs == 0.0


def test_binary_marker_and_bv():
    m = IlpModel()
    m.add_variable("B1", BINARY)
    m.add_variable("CT", CONTINUOUS, lb=0.0, ub=None)
    m.add_variable("B2", BINARY)
    m.add_constraint("R", [(0, 1.0), (1, 1.0), (2, 1.0)], LE, 2.0)
    m.set_objective([(0, 1.0)])
    text = dumps_mps(m)
    assert text.count("'INTORG'") == 2  # binary block is split by CT
    assert text.count("'INTEND'") == 2
    assert text.count(" BV BND") == 2
    back = parse_mps(text)
    assert [v.kind for v in back.variables] == [BINARY, CONTINUOUS, BINARY]


def test_fixed_bound_parse():
    text = """NAME          T
ROWS
 N  COST
 L  R0
COLUMNS
    V0        COST      1
    V0        R0        1
RHS
    RHS       R0        5
BOUNDS
 FX BND       V0        2.5
ENDATA
"""
    back = parse_mps(text)
    lb, ub = back.bounds()
    assert lb.tolist() == [2.5] and ub.tolist() == [2.5]


def test_unsupported_bound_type_raises():
    text = """NAME          T
ROWS
 N  COST
 L  R0
COLUMNS
    V0        R0        1
RHS
BOUNDS
 MI BND       V0
ENDATA
"""
    with pytest.raises(ValueError, match="bound type"):
        parse_mps(text)


def test_file_round_trip(tmp_path, tiny_deployment, tiny_sp, tiny_pc):
    model, _ = build_scenario1(tiny_deployment, tiny_sp, tiny_pc)
    path = tmp_path / "plan.mps"
    write_mps(model, path, name="CASE0")
    assert read_mps(path).coefficient_dict() == model.coefficient_dict()
    # writing twice yields identical bytes
    text1 = path.read_bytes()
    write_mps(model, path, name="CASE0")
    assert path.read_bytes() == text1


def test_mps_loadable_by_reference_tools(tmp_path, tiny_deployment, tiny_sp, tiny_pc):
    """The emitted file must be plain sectioned MPS: every data line indented,
    sections in canonical order, one objective row."""
    model, _ = build_scenario2(tiny_deployment, tiny_sp, tiny_pc)
    text = dumps_mps(model)
    lines = text.splitlines()
    sections = [ln for ln in lines if not ln.startswith(" ") and ln != "ENDATA"]
    assert [s.split()[0] for s in sections] == ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS"]
    assert lines[-1] == "ENDATA"
    assert sum(1 for ln in lines if ln.startswith(" N ")) == 1
