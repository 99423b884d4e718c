"""Solver-independent integer-program representation.

A model is a list of named variables (binary or continuous with bounds), a
list of named linear constraints, and a minimization objective.  Builders
fill it; the solver, the MPS writer and the JSON dump all consume it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

BINARY = "binary"
CONTINUOUS = "continuous"

LE = "<="
GE = ">="
EQ = "="


@dataclass
class Variable:
    name: str
    kind: str                 # BINARY | CONTINUOUS
    lb: float = 0.0
    ub: Optional[float] = None  # None = +inf


@dataclass
class Constraint:
    name: str
    terms: list               # [(variable id, coefficient), ...]
    sense: str                # LE | GE | EQ
    rhs: float


@dataclass
class IlpModel:
    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: list = field(default_factory=list)   # [(variable id, coefficient)]
    metadata: dict = field(default_factory=dict)
    _names: dict = field(default_factory=dict, repr=False)
    _row_names: dict = field(default_factory=dict, repr=False)

    # -- construction --------------------------------------------------

    def add_variable(self, name: str, kind: str = BINARY, lb: float = 0.0,
                     ub: Optional[float] = None) -> int:
        if name in self._names:
            raise ValueError(f"duplicate variable name: {name}")
        if kind == BINARY:
            lb, ub = 0.0, 1.0
        elif kind != CONTINUOUS:
            raise ValueError(f"unknown variable kind: {kind}")
        vid = len(self.variables)
        self.variables.append(Variable(name=name, kind=kind, lb=lb, ub=ub))
        self._names[name] = vid
        return vid

    def add_constraint(self, name: str, terms, sense: str, rhs: float) -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"unknown sense: {sense}")
        if name in self._row_names:
            raise ValueError(f"duplicate constraint name: {name}")
        rid = len(self.constraints)
        self.constraints.append(Constraint(name=name, terms=list(terms), sense=sense, rhs=rhs))
        self._row_names[name] = rid
        return rid

    def set_objective(self, terms) -> None:
        self.objective = list(terms)

    def variable_id(self, name: str) -> int:
        return self._names[name]

    # -- validation -----------------------------------------------------

    def validate(self) -> None:
        n = len(self.variables)
        seen = set()
        for v in self.variables:
            if v.name in seen:
                raise ValueError(f"duplicate variable name: {v.name}")
            seen.add(v.name)
            if v.kind == BINARY and (v.lb, v.ub) != (0.0, 1.0):
                raise ValueError(f"binary variable {v.name} must have bounds [0, 1]")
            if v.ub is not None and v.lb > v.ub:
                raise ValueError(f"variable {v.name} has lb > ub")
        rows = set()
        for c in self.constraints:
            if c.name in rows:
                raise ValueError(f"duplicate constraint name: {c.name}")
            rows.add(c.name)
            for vid, coef in c.terms:
                if not 0 <= vid < n:
                    raise ValueError(f"constraint {c.name} references unknown variable {vid}")
                if not math.isfinite(coef):
                    raise ValueError(f"constraint {c.name} has non-finite coefficient")
            if not math.isfinite(c.rhs):
                raise ValueError(f"constraint {c.name} has non-finite rhs")
        for vid, coef in self.objective:
            if not 0 <= vid < n:
                raise ValueError(f"objective references unknown variable {vid}")

    # -- views ------------------------------------------------------------

    def n_variables(self) -> int:
        return len(self.variables)

    def n_constraints(self) -> int:
        return len(self.constraints)

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(len(self.variables))
        for vid, coef in self.objective:
            c[vid] += coef
        return c

    def constraint_matrix(self) -> tuple:
        """(A csr, senses list, rhs array) over all constraints."""
        rows, cols, vals = [], [], []
        for i, c in enumerate(self.constraints):
            for vid, coef in c.terms:
                rows.append(i)
                cols.append(vid)
                vals.append(coef)
        a = sp.csr_matrix(
            (vals, (rows, cols)),
            shape=(len(self.constraints), len(self.variables)),
        )
        senses = [c.sense for c in self.constraints]
        rhs = np.array([c.rhs for c in self.constraints])
        return a, senses, rhs

    def bounds(self) -> tuple:
        lb = np.array([v.lb for v in self.variables])
        ub = np.array([math.inf if v.ub is None else v.ub for v in self.variables])
        return lb, ub

    def binary_ids(self) -> np.ndarray:
        return np.array([i for i, v in enumerate(self.variables) if v.kind == BINARY],
                        dtype=int)

    def coefficient_dict(self) -> dict:
        """{(row name, column name): coefficient} with duplicates summed."""
        out: dict = {}
        for c in self.constraints:
            for vid, coef in c.terms:
                key = (c.name, self.variables[vid].name)
                out[key] = out.get(key, 0.0) + coef
        return out

    def evaluate(self, values: np.ndarray) -> list:
        """Signed violation per constraint at the given point.

        Positive means violated by that amount; <= 0 means satisfied.
        """
        out = []
        for c in self.constraints:
            lhs = sum(coef * values[vid] for vid, coef in c.terms)
            if c.sense == LE:
                out.append(lhs - c.rhs)
            elif c.sense == GE:
                out.append(c.rhs - lhs)
            else:
                out.append(abs(lhs - c.rhs))
        return out

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "variables": [
                {"name": v.name, "kind": v.kind, "lb": v.lb, "ub": v.ub}
                for v in self.variables
            ],
            "constraints": [
                {"name": c.name, "terms": [[vid, coef] for vid, coef in c.terms],
                 "sense": c.sense, "rhs": c.rhs}
                for c in self.constraints
            ],
            "objective": [[vid, coef] for vid, coef in self.objective],
            "metadata": self.metadata,
        }, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "IlpModel":
        raw = json.loads(text)
        model = cls(metadata=raw.get("metadata", {}))
        for v in raw["variables"]:
            model.add_variable(v["name"], v["kind"], v["lb"], v["ub"])
        for c in raw["constraints"]:
            model.add_constraint(
                c["name"], [(int(vid), float(coef)) for vid, coef in c["terms"]],
                c["sense"], c["rhs"],
            )
        model.set_objective([(int(vid), float(coef)) for vid, coef in raw["objective"]])
        return model


@dataclass
class VariableIndex:
    """Maps between model columns and the planning quantities.

    x[(k, l)]   AP l serves user k          (only instantiated pairs exist)
    z[l]        AP l active
    lc[w]       lightpath of stack w lit
    du[w]       DU of stack w active
    a[(i, l, r)] product x_il * x_ir, l < r within one operator
    rho[(k, m)]  user k attached to operator m (flexible scenario only)
    nap[m]      count of operator m's active APs (continuous, pinned by an
                equality row, integral whenever z is; same for nlc and ndu)
    nlc[m]      count of operator m's lit lightpaths
    ndu[m]      count of operator m's active DUs
    tpc[m]       operator power (continuous)
    tpc_max      objective variable
    """

    x: dict = field(default_factory=dict)
    z: dict = field(default_factory=dict)
    lc: dict = field(default_factory=dict)
    du: dict = field(default_factory=dict)
    a: dict = field(default_factory=dict)
    rho: dict = field(default_factory=dict)
    nap: dict = field(default_factory=dict)
    nlc: dict = field(default_factory=dict)
    ndu: dict = field(default_factory=dict)
    tpc: dict = field(default_factory=dict)
    tpc_max: int = -1
