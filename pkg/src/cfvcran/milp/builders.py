"""Assemble the two planning programs as 0-1 ILPs.

Both scenarios minimize the worst per-operator power tpc_max subject to the
power accounting, coverage, AP activation linking, fronthaul wavelength and
DU capacity limits, and the linearized SINR constraints.

Scenario 1 (fixed user-operator assignment): users may only be served by
their own operator's APs; cross-operator serving variables are never
instantiated, which realizes the non-cooperation constraint exactly.

Scenario 2 (flexible assignment): serving variables exist for every (user,
AP) pair; pairwise exclusion rows forbid mixing APs of two operators for one
user, attachment indicators rho_km tie users to the operator that serves
them, and each SINR constraint is deactivated through its big-M constant
unless the user is attached to that operator.

Quadratic serving products x_il * x_ir are linearized with one binary a per
unordered within-operator pair (l < r) and the three standard rows
a <= x_il, a <= x_ir, a >= x_il + x_ir - 1; the symmetric coefficient pair
folds onto a (factor 2) and diagonal products collapse to x itself.  Product
variables are only created when SINR rows exist (se_target > 0).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..instance import Deployment
from ..program import PowerCoefficients, SinrProgram
from .model import BINARY, CONTINUOUS, EQ, GE, LE, IlpModel, VariableIndex


def _add_common_variables(model: IlpModel, index: VariableIndex, d: Deployment,
                          x_pairs, a_triples) -> None:
    """Declaration order: x, z, lc, du, a, (rho added by scenario 2), tpc,
    tpc_max.  Binaries first keeps one integer block in the MPS file."""
    for (k, l) in x_pairs:
        index.x[(k, l)] = model.add_variable(f"X{k}_{l}", BINARY)
    cfg = d.config
    for l in range(cfg.L):
        index.z[l] = model.add_variable(f"Z{l}", BINARY)
    for w in range(cfg.W):
        index.lc[w] = model.add_variable(f"LC{w}", BINARY)
    for w in range(cfg.W):
        index.du[w] = model.add_variable(f"DU{w}", BINARY)
    for (i, l, r) in a_triples:
        index.a[(i, l, r)] = model.add_variable(f"A{i}_{l}_{r}", BINARY)


def _add_tpc_variables(model: IlpModel, index: VariableIndex, d: Deployment) -> None:
    for m in range(d.config.M):
        index.tpc[m] = model.add_variable(f"TPC{m}", CONTINUOUS, lb=0.0, ub=None)
    index.tpc_max = model.add_variable("TPCMAX", CONTINUOUS, lb=0.0, ub=None)
    model.set_objective([(index.tpc_max, 1.0)])


def _add_count_rows(model: IlpModel, index: VariableIndex, d: Deployment) -> None:
    """Per-operator counts of active APs, lit lightpaths and active DUs as
    continuous variables pinned to the binary sums by equality rows.  They
    carry no cost and cut nothing from the relaxation; their purpose is to
    give the search integral aggregates to branch on, which moves the bound
    by whole radios or stacks instead of one fractional binary at a time."""
    cfg = d.config
    for m in range(cfg.M):
        aps = [int(l) for l in d.aps_of(m)]
        stacks = [int(w) for w in d.stacks_of(m)]
        ap_cap = float(min(len(aps), cfg.aps_per_wavelength * len(stacks)))
        index.nap[m] = model.add_variable(f"NAP{m}", CONTINUOUS, lb=0.0, ub=ap_cap)
        index.nlc[m] = model.add_variable(f"NLC{m}", CONTINUOUS, lb=0.0, ub=float(len(stacks)))
        index.ndu[m] = model.add_variable(f"NDU{m}", CONTINUOUS, lb=0.0, ub=float(len(stacks)))
        model.add_constraint(
            f"NAPR{m}",
            [(index.z[l], 1.0) for l in aps] + [(index.nap[m], -1.0)], EQ, 0.0,
        )
        model.add_constraint(
            f"NLCR{m}",
            [(index.lc[w], 1.0) for w in stacks] + [(index.nlc[m], -1.0)], EQ, 0.0,
        )
        model.add_constraint(
            f"NDUR{m}",
            [(index.du[w], 1.0) for w in stacks] + [(index.ndu[m], -1.0)], EQ, 0.0,
        )


def _add_power_rows(model: IlpModel, index: VariableIndex, d: Deployment,
                    pc: PowerCoefficients) -> None:
    cfg = d.config
    for m in range(cfg.M):
        model.add_constraint(
            f"TMAX{m}", [(index.tpc_max, 1.0), (index.tpc[m], -1.0)], GE, 0.0
        )
        terms = [(index.tpc[m], 1.0)]
        for l in d.aps_of(m):
            terms.append((index.z[int(l)], -(pc.c2 + pc.c3)))
        for w in d.stacks_of(m):
            terms.append((index.lc[int(w)], -pc.c4))
            terms.append((index.du[int(w)], -pc.c5))
        for (k, l), vid in index.x.items():
            if d.ap_owner[l] == m:
                terms.append((vid, -pc.c6))
        model.add_constraint(f"TEQ{m}", terms, EQ, pc.c1 + pc.c7)


def _add_activation_rows(model: IlpModel, index: VariableIndex, d: Deployment,
                         tighten_activation: bool) -> None:
    cfg = d.config
    served_by = {l: [] for l in range(cfg.L)}
    for (k, l), vid in index.x.items():
        served_by[l].append((k, vid))
    for l in range(cfg.L):
        if tighten_activation:
            for k, vid in served_by[l]:
                model.add_constraint(f"XZ{k}_{l}", [(vid, 1.0), (index.z[l], -1.0)], LE, 0.0)
        else:
            terms = [(vid, 1.0) for _, vid in served_by[l]]
            terms.append((index.z[l], -float(cfg.K)))
            model.add_constraint(f"CAP{l}", terms, LE, 0.0)
        on_terms = [(index.z[l], 1.0)] + [(vid, -1.0) for _, vid in served_by[l]]
        model.add_constraint(f"ON{l}", on_terms, LE, 0.0)


def _add_linearization_rows(model: IlpModel, index: VariableIndex) -> None:
    for j, ((i, l, r), aid) in enumerate(index.a.items()):
        xl = index.x[(i, l)]
        xr = index.x[(i, r)]
        model.add_constraint(f"L1_{j}", [(aid, 1.0), (xl, -1.0)], LE, 0.0)
        model.add_constraint(f"L2_{j}", [(aid, 1.0), (xr, -1.0)], LE, 0.0)
        model.add_constraint(f"L3_{j}", [(xl, 1.0), (xr, 1.0), (aid, -1.0)], LE, 1.0)


def _add_cloud_rows(model: IlpModel, index: VariableIndex, d: Deployment) -> None:
    cfg = d.config
    w_max = float(cfg.aps_per_wavelength)
    for m in range(cfg.M):
        aps = [int(l) for l in d.aps_of(m)]
        stacks = [int(w) for w in d.stacks_of(m)]
        model.add_constraint(
            f"WAV{m}", [(index.z[l], 1.0) for l in aps], LE, w_max * len(stacks)
        )
        terms = [(index.lc[w], w_max) for w in stacks]
        terms += [(index.z[l], -1.0) for l in aps]
        model.add_constraint(f"LCN{m}", terms, GE, 0.0)
        gops = [(index.z[l], cfg.gops_z) for l in aps]
        for (k, l), vid in index.x.items():
            if d.ap_owner[l] == m:
                gops.append((vid, cfg.gops_x))
        gops += [(index.du[w], -cfg.c_max) for w in stacks]
        model.add_constraint(f"GOP{m}", gops, LE, -cfg.gops_f)
        model.add_constraint(
            f"LDU{m}",
            [(index.lc[w], 1.0) for w in stacks] + [(index.du[w], -1.0) for w in stacks],
            LE, 0.0,
        )


def _sinr_terms(index: VariableIndex, sp: SinrProgram, k: int, users, aps) -> list:
    """Quadratic-form terms of user k's constraint over the given users and
    APs: folded pair coefficients on a, diagonal coefficients on x."""
    terms = []
    cbar = sp.cbar
    for i in users:
        for ai, l in enumerate(aps):
            diag = cbar[k, i, l, l]
            if diag != 0.0:
                terms.append((index.x[(i, l)], diag))
            for r in aps[ai + 1:]:
                coef = 2.0 * cbar[k, i, l, r]
                if coef != 0.0:
                    terms.append((index.a[(i, l, r)], coef))
    return terms


def build_scenario1(d: Deployment, sp: SinrProgram, pc: PowerCoefficients,
                    tighten_activation: bool = False) -> tuple:
    """Fixed user-operator assignment program. Returns (model, index)."""
    cfg = d.config
    if d.ue_owner is None:
        raise ValueError("scenario 1 needs a deployment with ue_owner")
    model = IlpModel(metadata={
        "scenario": 1,
        "se_target": sp.se_target,
        "deployment": d.digest(),
        "tighten_activation": tighten_activation,
    })
    index = VariableIndex()

    own_aps = {m: [int(l) for l in d.aps_of(m)] for m in range(cfg.M)}
    x_pairs = [(k, l) for k in range(cfg.K) for l in own_aps[int(d.ue_owner[k])]]
    a_triples = []
    if sp.cbar is not None:
        for i in range(cfg.K):
            aps = own_aps[int(d.ue_owner[i])]
            for ai, l in enumerate(aps):
                for r in aps[ai + 1:]:
                    a_triples.append((i, l, r))
    _add_common_variables(model, index, d, x_pairs, a_triples)
    _add_tpc_variables(model, index, d)

    _add_power_rows(model, index, d, pc)
    for k in range(cfg.K):
        cov = [(index.x[(k, l)], 1.0) for l in own_aps[int(d.ue_owner[k])]]
        model.add_constraint(f"COV{k}", cov, GE, 1.0)
    _add_activation_rows(model, index, d, tighten_activation)
    _add_linearization_rows(model, index)
    _add_cloud_rows(model, index, d)
    _add_count_rows(model, index, d)

    if sp.cbar is not None:
        for k in range(cfg.K):
            if sp.gamma[k] <= 0:
                continue
            m = int(d.ue_owner[k])
            users = [int(i) for i in d.ues_of(m)]
            terms = _sinr_terms(index, sp, k, users, own_aps[m])
            model.add_constraint(f"SIN{k}", terms, LE, -1.0)

    model.validate()
    return model, index


def build_scenario2(d: Deployment, sp: SinrProgram, pc: PowerCoefficients,
                    tighten_activation: bool = False) -> tuple:
    """Flexible user-operator assignment program. Returns (model, index).

    Any fixed ue_owner on the deployment is ignored.
    """
    cfg = d.config
    model = IlpModel(metadata={
        "scenario": 2,
        "se_target": sp.se_target,
        "deployment": d.digest(),
        "tighten_activation": tighten_activation,
    })
    index = VariableIndex()

    own_aps = {m: [int(l) for l in d.aps_of(m)] for m in range(cfg.M)}
    x_pairs = [(k, l) for k in range(cfg.K) for l in range(cfg.L)]
    a_triples = []
    if sp.cbar is not None:
        for i in range(cfg.K):
            for m in range(cfg.M):
                aps = own_aps[m]
                for ai, l in enumerate(aps):
                    for r in aps[ai + 1:]:
                        a_triples.append((i, l, r))
    _add_common_variables(model, index, d, x_pairs, a_triples)
    for k in range(cfg.K):
        for m in range(cfg.M):
            index.rho[(k, m)] = model.add_variable(f"RH{k}_{m}", BINARY)
    _add_tpc_variables(model, index, d)

    _add_power_rows(model, index, d, pc)
    for k in range(cfg.K):
        cov = [(index.x[(k, l)], 1.0) for l in range(cfg.L)]
        model.add_constraint(f"COV{k}", cov, GE, 1.0)
    _add_activation_rows(model, index, d, tighten_activation)
    _add_linearization_rows(model, index)
    _add_cloud_rows(model, index, d)
    _add_count_rows(model, index, d)

    if sp.cbar is not None:
        users = list(range(cfg.K))
        for k in range(cfg.K):
            if sp.gamma[k] <= 0:
                continue
            bm = float(sp.big_m[k])
            for m in range(cfg.M):
                terms = _sinr_terms(index, sp, k, users, own_aps[m])
                terms.append((index.rho[(k, m)], bm))
                model.add_constraint(f"SIN{k}_{m}", terms, LE, bm - 1.0)

    # one user never mixes APs of two operators
    for k in range(cfg.K):
        j = 0
        for m in range(cfg.M):
            for t in range(m + 1, cfg.M):
                for l in own_aps[m]:
                    for r in own_aps[t]:
                        model.add_constraint(
                            f"NC{k}_{j}",
                            [(index.x[(k, l)], 1.0), (index.x[(k, r)], 1.0)],
                            LE, 1.0,
                        )
                        j += 1

    # attachment indicators follow the serving pattern
    for k in range(cfg.K):
        for m in range(cfg.M):
            for l in own_aps[m]:
                model.add_constraint(
                    f"RHL{k}_{l}",
                    [(index.x[(k, l)], 1.0), (index.rho[(k, m)], -1.0)],
                    LE, 0.0,
                )
            model.add_constraint(
                f"RHU{k}_{m}",
                [(index.rho[(k, m)], 1.0)] + [(index.x[(k, l)], -1.0) for l in own_aps[m]],
                LE, 0.0,
            )

    model.validate()
    return model, index


def decode_assignment(index: VariableIndex, values: np.ndarray, d: Deployment) -> dict:
    """Turn a solution vector into planning arrays.

    Binary entries are rounded; rho defaults to the fixed assignment when the
    model has no attachment variables.
    """
    cfg = d.config
    x = np.zeros((cfg.K, cfg.L), dtype=int)
    for (k, l), vid in index.x.items():
        x[k, l] = int(round(values[vid]))
    z = np.array([int(round(values[index.z[l]])) for l in range(cfg.L)])
    lc = np.array([int(round(values[index.lc[w]])) for w in range(cfg.W)])
    du = np.array([int(round(values[index.du[w]])) for w in range(cfg.W)])
    rho = np.zeros((cfg.K, cfg.M), dtype=int)
    if index.rho:
        for (k, m), vid in index.rho.items():
            rho[k, m] = int(round(values[vid]))
    elif d.ue_owner is not None:
        for k in range(cfg.K):
            rho[k, int(d.ue_owner[k])] = 1
    a = {triple: int(round(values[vid])) for triple, vid in index.a.items()}
    tpc = np.array([float(values[index.tpc[m]]) for m in range(cfg.M)])
    return {
        "x": x,
        "z": z,
        "lc": lc,
        "du": du,
        "rho": rho,
        "a": a,
        "tpc": tpc,
        "tpc_max": float(values[index.tpc_max]),
    }
