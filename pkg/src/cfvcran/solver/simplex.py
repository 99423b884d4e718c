"""Bounded-variable revised simplex with warm restarts.

Rows a.x {<=,>=,=} b become equalities a.x + s = b with slack bounds
[0, inf), (-inf, 0] or [0, 0]; every variable carries box bounds.  Rows are
equilibrated (scaled by their largest coefficient) on construction, which
keeps tableau entries near unit size.  The basis is held in product form: a
sparse LU factorization taken at the last refactorization plus one eta
vector per pivot since, so solves stay cheap and backward stable at any
size; the factorization is refreshed periodically and whenever the entering
column disagrees with the sparse matrix by more than rounding.
Three drivers share the machinery:

  * composite phase 1: minimizes total bound violation of basic variables
    (costs -1/+1 on violated basics, re-priced every iteration);
  * primal phase 2: Dantzig pricing with bound flips and a Harris-style
    two-pass ratio test that prefers large pivots inside a small
    feasibility window;
  * dual simplex with the bound-flipping ratio test: used to reoptimize
    after bound tightening, which is how branch and bound warm-starts
    child nodes.

Anti-cycling: each driver watches its own monotone progress measure (the
phase-1 deficit falls, the phase-2 objective falls, the dual objective
rises).  A long run of iterations without improvement switches pivoting to
Bland's rule, with the ratio tests narrowed to exact windows and the
heuristic flips disabled so the rule's termination guarantee holds; an
extreme run means the factorization itself is lying and forces a restart.

If the inverse is beyond repair (a truly singular basis after numerical
trouble) the engine restarts from the all-slack basis instead of failing;
the restart is capped so genuine singularities still surface as errors.

Bound changes through set_bound keep the current point whenever the old
active bound value is still a bound of the variable (the fix/unfix pattern
of 0-1 branching), so a restored parent state stays primal feasible and only
needs primal cleanup.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import solve_triangular

AT_LB = 0
AT_UB = 1
BASIC = 2

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

_FEAS_TOL = 1e-8
_DJ_TOL = 1e-9
_PIV_TOL = 1e-7
_HARRIS_SLACK = 1e-8
_DUAL_HARRIS = 1e-7
_REFACTOR_EVERY = 100
_BLAND_AFTER = 120
_MAX_RESTARTS = 4


class SimplexError(RuntimeError):
    pass


class _Restart(Exception):
    """Internal: numerical state was reset, the driver must start over."""


class BoundedLp:
    """One live LP over which bounds can be pushed and popped."""

    def __init__(self, c, a, senses, b, lb, ub, max_iter: int = 500_000):
        a = sp.csc_matrix(a, dtype=float)
        m, n = a.shape
        self.m = m
        self.n_struct = n
        self.n_total = n + m
        b = np.asarray(b, dtype=float)

        # equilibrate: scale each row by its largest coefficient
        row_max = np.zeros(m)
        acoo = a.tocoo()
        np.maximum.at(row_max, acoo.row, np.abs(acoo.data))
        scale = np.where(row_max > 0, row_max, 1.0)
        a = sp.diags(1.0 / scale) @ a
        b = b / scale
        self.row_scale = scale

        slack_lb = np.empty(m)
        slack_ub = np.empty(m)
        for i, sense in enumerate(senses):
            if sense == "<=":
                slack_lb[i], slack_ub[i] = 0.0, np.inf
            elif sense == ">=":
                slack_lb[i], slack_ub[i] = -np.inf, 0.0
            elif sense == "=":
                slack_lb[i], slack_ub[i] = 0.0, 0.0
            else:
                raise ValueError(f"unknown sense: {sense}")
        self.a_full = sp.hstack([a, sp.eye(m, format="csc")], format="csc")
        self.at = self.a_full.T.tocsr()
        self.c = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        self.b = b
        self.lb = np.concatenate([np.asarray(lb, dtype=float), slack_lb])
        self.ub = np.concatenate([np.asarray(ub, dtype=float), slack_ub])
        if np.any(~np.isfinite(self.lb) & ~np.isfinite(self.ub)):
            raise NotImplementedError("free variables are not supported")
        self.max_iter = max_iter

        self.basis = np.arange(n, n + m)
        self.vstat = np.where(np.isfinite(self.lb), AT_LB, AT_UB).astype(np.int8)
        self.vstat[n:] = BASIC
        self._identity = sp.eye(m, format="csc")
        self._lu = spla.splu(self._identity)
        cap = _REFACTOR_EVERY + 8
        self._eta_n = 0
        self._eta_r = np.zeros(cap, dtype=np.intp)
        self._eta_v = np.zeros((cap, m))
        # negated strict-upper gather, eta_u[i, j] = -eta_v[i][eta_r[j]] for
        # i < j; it is the only cross-eta coupling the batched application in
        # _ftran_vec/_btran_vec ever reads
        self._eta_u = np.zeros((cap, cap))
        self.xb = np.zeros(m)
        self._pivots_since_refactor = 0
        self._restarts = 0
        self._prefer_primal = False
        self.iterations = 0
        self._iter_stop = max_iter
        self._recompute_xb()

    # -- bound management -----------------------------------------------------

    def set_bound(self, j: int, lb: float, ub: float) -> None:
        """Change the bounds of variable j, preserving the current point when
        its old active bound value is still one of the new bounds."""
        if self.vstat[j] != BASIC:
            value = self.lb[j] if self.vstat[j] == AT_LB else self.ub[j]
            self.lb[j], self.ub[j] = lb, ub
            if value == lb:
                self.vstat[j] = AT_LB
            elif value == ub:
                self.vstat[j] = AT_UB
            else:
                self.vstat[j] = AT_LB if np.isfinite(lb) else AT_UB
        else:
            self.lb[j], self.ub[j] = lb, ub

    def get_bound(self, j: int) -> tuple:
        return float(self.lb[j]), float(self.ub[j])

    # -- state helpers ----------------------------------------------------------

    def _nonbasic_values(self) -> np.ndarray:
        x = np.where(self.vstat == AT_UB, self.ub, self.lb)
        x[self.vstat == BASIC] = 0.0
        return x

    def _ftran_vec(self, rhs: np.ndarray) -> np.ndarray:
        """B^-1 @ rhs through the LU factor and the eta file.

        Applying eta i to y means y += eta_v[i] * y[eta_r[i]].  The scalars
        c[i] = y[eta_r[i]] taken just before eta i therefore satisfy the unit
        lower triangular system (I - strict_lower(G^T)) c = y0[eta_r], after
        which all etas land at once as y0 + eta_v^T c.  Short files use the
        plain sequential loop, which is cheaper than a LAPACK round trip.
        """
        y = self._lu.solve(rhs)
        n = self._eta_n
        if n == 0:
            return y
        if n <= 8:
            for i in range(n):
                yr = y[self._eta_r[i]]
                if yr != 0.0:
                    y += self._eta_v[i] * yr
            return y
        c = solve_triangular(self._eta_u[:n, :n], y[self._eta_r[:n]],
                             lower=False, trans="T", unit_diagonal=True,
                             overwrite_b=True, check_finite=False)
        y += self._eta_v[:n].T @ c
        return y

    def _btran_vec(self, rhs: np.ndarray) -> np.ndarray:
        """B^-T @ rhs: transposed etas in reverse order, then the factor.

        Transposed eta i does u[eta_r[i]] += eta_v[i] @ u and only touches one
        entry of u, so the increments d[i] = eta_v[i] @ u (with i running from
        the newest eta down) solve the unit upper triangular system
        (I - strict_upper(G)) d = eta_v @ u0 and scatter-add onto u0.
        """
        n = self._eta_n
        if n == 0:
            return self._lu.solve(rhs, trans="T")
        u = rhs.copy()
        if n <= 8:
            for i in range(n - 1, -1, -1):
                u[self._eta_r[i]] += self._eta_v[i] @ u
            return self._lu.solve(u, trans="T")
        d = solve_triangular(self._eta_u[:n, :n], self._eta_v[:n] @ u,
                             lower=False, unit_diagonal=True,
                             overwrite_b=True, check_finite=False)
        np.add.at(u, self._eta_r[:n], d)
        return self._lu.solve(u, trans="T")

    def _recompute_xb(self) -> None:
        xn = self._nonbasic_values()
        self.xb = self._ftran_vec(self.b - self.a_full @ xn)

    def _refactor(self) -> None:
        bmat = self.a_full[:, self.basis].tocsc()
        try:
            lu = spla.splu(bmat)
        except RuntimeError:
            self._hard_restart()
            return
        # a nearly singular basis factorizes but solves uselessly; probe both
        # solve directions, the transposed one feeds every reduced-cost vector
        probe = lu.solve(self.b)
        scale = 1.0 + np.abs(self.b).max(initial=0.0)
        probe_t = lu.solve(self.b, trans="T")
        bad = (not np.isfinite(probe).all()
               or np.abs(bmat @ probe - self.b).max(initial=0.0) > 1e-6 * scale
               or not np.isfinite(probe_t).all()
               or np.abs(bmat.T @ probe_t - self.b).max(initial=0.0) > 1e-6 * scale)
        if bad:
            self._hard_restart()
            return
        self._lu = lu
        self._eta_n = 0
        self._pivots_since_refactor = 0
        self._recompute_xb()

    def _hard_restart(self) -> None:
        """Numerical dead end: fall back to the all-slack basis and make the
        driver start over.  Every structural variable moves to its nearest
        finite bound, so the restarted point is integral-feasible whenever the
        previous one was."""
        self._restarts += 1
        if self._restarts > _MAX_RESTARTS:
            raise SimplexError("basis matrix kept degenerating after restarts")
        n = self.n_struct
        x = self._nonbasic_values()
        x[self.basis] = self.xb
        for j in range(n):
            self.vstat[j] = _nearest_bound(self.lb[j], self.ub[j], x[j])
        self.basis = np.arange(n, n + self.m)
        self.vstat[n:] = BASIC
        self._lu = spla.splu(self._identity)
        self._eta_n = 0
        self._pivots_since_refactor = 0
        # whatever drove the numbers into the ground, retracing it with the
        # dual walks straight back; let phase 1 rebuild feasibility instead
        self._prefer_primal = True
        self._recompute_xb()
        raise _Restart()

    def _ftran(self, j: int) -> np.ndarray:
        """B^-1 @ column j of the full matrix."""
        start, end = self.a_full.indptr[j], self.a_full.indptr[j + 1]
        rhs = np.zeros(self.m)
        rhs[self.a_full.indices[start:end]] = self.a_full.data[start:end]
        return self._ftran_vec(rhs)

    def _ftran_checked(self, j: int) -> np.ndarray:
        """_ftran plus a drift check: B @ alpha must reproduce column j.
        Refactorizes and retries on disagreement; restarts if a fresh
        factorization cannot certify the column either."""
        for attempt in range(2):
            alpha = self._ftran(j)
            full = np.zeros(self.n_total)
            full[self.basis] = alpha
            resid = self.a_full @ full
            start, end = self.a_full.indptr[j], self.a_full.indptr[j + 1]
            resid[self.a_full.indices[start:end]] -= self.a_full.data[start:end]
            if np.abs(resid).max(initial=0.0) <= 1e-7:
                return alpha
            if attempt == 0 and self._pivots_since_refactor > 0:
                self._refactor()
            else:
                self._hard_restart()
        raise AssertionError("unreachable")

    def _reduced_costs(self, c_eff: np.ndarray) -> np.ndarray:
        y = self._btran_vec(c_eff[self.basis])
        return c_eff - self.at @ y

    def _update_basis(self, irow: int, j: int, alpha: np.ndarray) -> None:
        piv = alpha[irow]
        if abs(piv) < _PIV_TOL:
            # the selection rules should never offer this; treat as rot
            self._hard_restart()
        v = alpha / (-piv)
        v[irow] = 1.0 / piv - 1.0
        n = self._eta_n
        if n == self._eta_r.shape[0]:
            grow = n + _REFACTOR_EVERY
            self._eta_r = np.resize(self._eta_r, grow)
            self._eta_v = np.resize(self._eta_v, (grow, self.m))
            u = np.zeros((grow, grow))
            u[:n, :n] = self._eta_u[:n, :n]
            self._eta_u = u
        self._eta_r[n] = irow
        self._eta_v[n] = v
        self._eta_u[:n, n] = -self._eta_v[:n, irow]
        self._eta_n = n + 1
        self._pivots_since_refactor += 1

    def solution(self) -> np.ndarray:
        x = self._nonbasic_values()
        x[self.basis] = self.xb
        return x[: self.n_struct]

    def objective(self) -> float:
        x = self._nonbasic_values()
        x[self.basis] = self.xb
        return float(self.c @ x)

    def primal_infeasibility(self) -> float:
        lo = self.lb[self.basis] - self.xb
        hi = self.xb - self.ub[self.basis]
        return float(max(np.max(lo, initial=0.0), np.max(hi, initial=0.0)))

    def _dual_infeasible(self) -> bool:
        d = self._reduced_costs(self.c)
        movable = self.lb < self.ub
        bad = ((self.vstat == AT_LB) & (d < -_DJ_TOL) & movable) | (
            (self.vstat == AT_UB) & (d > _DJ_TOL) & movable
        )
        return bool(bad.any())

    # -- primal iterations --------------------------------------------------------

    def _phase1_costs(self) -> tuple:
        """(cost vector on basics, total infeasibility)."""
        c_eff = np.zeros(self.n_total)
        lo = self.lb[self.basis] - self.xb
        hi = self.xb - self.ub[self.basis]
        below = lo > _FEAS_TOL
        above = hi > _FEAS_TOL
        c_eff[self.basis[below]] = -1.0
        c_eff[self.basis[above]] = 1.0
        total = float(np.sum(lo[below]) + np.sum(hi[above]))
        return c_eff, total

    def _select_entering(self, d: np.ndarray, bland: bool):
        movable = self.lb < self.ub
        lo_cand = (self.vstat == AT_LB) & movable & (d < -_DJ_TOL)
        hi_cand = (self.vstat == AT_UB) & movable & (d > _DJ_TOL)
        cand = lo_cand | hi_cand
        if not cand.any():
            return None, 0
        idx = np.flatnonzero(cand)
        if bland:
            j = int(idx[0])
        else:
            j = int(idx[np.argmax(np.abs(d[idx]))])
        sign = 1 if self.vstat[j] == AT_LB else -1
        return j, sign

    def _ratio_test(self, delta: np.ndarray, bland: bool):
        """(t, blocking row or -1) for the current basics moving by t*delta.

        Basics outside their bounds (phase 1) block at the bound they are
        returning to and do not block when moving further away.  Two passes
        in the style of Harris: the first finds the smallest ratio with
        bounds relaxed by a feasibility slack, the second picks the largest
        pivot among rows whose true ratio fits under it.
        """
        lbb = self.lb[self.basis]
        ubb = self.ub[self.basis]
        below = self.xb < lbb - _FEAS_TOL
        above = self.xb > ubb + _FEAS_TOL
        target_down = np.where(above, ubb, lbb)
        target_up = np.where(below, lbb, ubb)
        t_arr = np.full(self.m, np.inf)
        t_slack = np.full(self.m, np.inf)
        down = (delta < -_PIV_TOL) & ~below
        up = (delta > _PIV_TOL) & ~above
        with np.errstate(divide="ignore", invalid="ignore"):
            td = (self.xb - target_down) / (-delta)
            tds = (self.xb - target_down + _HARRIS_SLACK) / (-delta)
            tu = (target_up - self.xb) / delta
            tus = (target_up - self.xb + _HARRIS_SLACK) / delta
        t_arr[down] = td[down]
        t_slack[down] = tds[down]
        t_arr[up] = tu[up]
        t_slack[up] = tus[up]
        t_arr = np.maximum(t_arr, 0.0)
        t_arr[~np.isfinite(t_arr)] = np.inf
        t_slack[~np.isfinite(t_slack)] = np.inf
        theta = float(t_slack.min(initial=np.inf))
        if not np.isfinite(theta):
            return np.inf, -1
        if bland:
            # anti-cycling needs the exact smallest ratio and the smallest
            # basis label among its ties, not the slack-widened window
            window = np.flatnonzero(t_arr <= t_arr.min() + 1e-12)
            irow = int(window[np.argmin(self.basis[window])])
            return float(max(t_arr[irow], 0.0)), irow
        window = np.flatnonzero(t_arr <= theta)
        if window.size == 0:
            window = np.flatnonzero(t_arr <= t_arr.min() + 1e-12)
        irow = int(window[np.argmax(np.abs(delta[window]))])
        return float(max(t_arr[irow], 0.0)), irow

    def _primal(self, phase1: bool) -> str:
        # progress watchdog: the phase-1 deficit and the phase-2 objective
        # both fall monotonically when the numbers are right, so a long run
        # without improvement means degeneracy (engage Bland's rule) and an
        # extreme one means the factorization is feeding back garbage
        best = np.inf
        stall = 0
        while True:
            if self.iterations >= self._iter_stop:
                return ITERATION_LIMIT
            self.iterations += 1
            if self._pivots_since_refactor >= _REFACTOR_EVERY:
                self._refactor()
            if phase1:
                c_eff, total = self._phase1_costs()
                if total <= _FEAS_TOL:
                    return OPTIMAL
                metric = total
            else:
                c_eff = self.c
                metric = self.objective()
            if metric < best - 1e-12 * (1.0 + abs(best)):
                best = metric
                stall = 0
            else:
                stall += 1
            bland = stall > _BLAND_AFTER
            if stall > 20 * _BLAND_AFTER:
                # not even Bland's rule moves the number: numbers are rotten
                self._hard_restart()
            d = self._reduced_costs(c_eff)
            j, sign = self._select_entering(d, bland)
            if j is None:
                return INFEASIBLE if phase1 else OPTIMAL
            alpha = self._ftran_checked(j)
            delta = -sign * alpha
            t_basic, irow = self._ratio_test(delta, bland)
            span = self.ub[j] - self.lb[j]
            t_flip = span if np.isfinite(span) else np.inf
            if t_flip <= t_basic:
                if not np.isfinite(t_flip):
                    if phase1:
                        raise SimplexError("phase 1 direction unbounded")
                    return UNBOUNDED
                self.vstat[j] = AT_UB if self.vstat[j] == AT_LB else AT_LB
                self.xb += t_flip * delta
                continue
            if irow < 0:
                if phase1:
                    raise SimplexError("phase 1 direction unbounded")
                return UNBOUNDED
            t = t_basic
            self.xb += t * delta
            leave = self.basis[irow]
            # the leaving variable exits at the bound it blocked on, which is
            # the finite bound its post-step value landed on
            self.vstat[leave] = _nearest_bound(self.lb[leave], self.ub[leave], self.xb[irow])
            enter_start = self.lb[j] if self.vstat[j] == AT_LB else self.ub[j]
            self._update_basis(irow, j, alpha)
            self.basis[irow] = j
            self.vstat[j] = BASIC
            self.xb[irow] = enter_start + sign * t

    # -- dual iterations ----------------------------------------------------------

    def _dual(self) -> str:
        # progress watchdog, mirroring _primal: dual steps push the objective
        # of the (infeasible) basic point monotonically up toward the optimum
        best = -np.inf
        stall = 0
        # pivots the certified column view exposed as vanishing, keyed by
        # (row, column); the row view that nominated them cannot be trusted
        # again until the basis changes
        banned = set()
        while True:
            if self.iterations >= self._iter_stop:
                return ITERATION_LIMIT
            self.iterations += 1
            if self._pivots_since_refactor >= _REFACTOR_EVERY:
                self._refactor()
            lbb = self.lb[self.basis]
            ubb = self.ub[self.basis]
            lo = lbb - self.xb
            hi = self.xb - ubb
            worst = np.maximum(lo, hi)
            if worst.max(initial=0.0) <= _FEAS_TOL:
                return OPTIMAL
            metric = self.objective()
            if metric > best + 1e-12 * (1.0 + abs(best)):
                best = metric
                stall = 0
            else:
                stall += 1
            bland = stall > _BLAND_AFTER
            if stall > 20 * _BLAND_AFTER:
                # not even Bland's rule moves the number: numbers are rotten
                self._hard_restart()
            viol = np.flatnonzero(worst > _FEAS_TOL)
            if bland:
                irow = int(viol[np.argmin(self.basis[viol])])
            else:
                irow = int(viol[np.argmax(worst[viol])])
            going_up = lo[irow] > _FEAS_TOL  # basic below lb must increase
            e_row = np.zeros(self.m)
            e_row[irow] = 1.0
            rho = self._btran_vec(e_row)
            w = self.at @ rho
            movable = self.lb < self.ub
            nonbasic_lo = (self.vstat == AT_LB) & movable
            nonbasic_hi = (self.vstat == AT_UB) & movable
            if going_up:
                cand = (nonbasic_lo & (w < -_PIV_TOL)) | (nonbasic_hi & (w > _PIV_TOL))
            else:
                cand = (nonbasic_lo & (w > _PIV_TOL)) | (nonbasic_hi & (w < -_PIV_TOL))
            for row_b, j_b in banned:
                if row_b == irow:
                    cand[j_b] = False
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                if self._pivots_since_refactor > 0:
                    # a dead row is a pruning certificate, never sign one
                    # with stale numbers
                    self._refactor()
                    continue
                if banned:
                    # the row views at this basis were caught lying, so the
                    # claim cannot rest on them; restart and let phase 1
                    # settle the question from clean ground
                    self._hard_restart()
                return INFEASIBLE
            d = self._reduced_costs(self.c)
            ratios = np.abs(d[idx]) / np.abs(w[idx])
            target = lbb[irow] if going_up else ubb[irow]
            if bland:
                # plain anti-cycling pivot: exact smallest ratio, smallest
                # index among its ties, no bound flips and no widening
                tied = idx[ratios <= ratios.min() + 1e-12]
                pivot_j = int(tied.min())
                flips = []
            else:
                order = np.argsort(ratios, kind="stable")
                # bound-flipping ratio test: cheap candidates whose full span
                # cannot close the deficit are flipped; among candidates that
                # can close it inside a small dual window, the largest pivot
                # wins
                deficit = abs(self.xb[irow] - target)
                pivot_j = -1
                flips = []
                pos_at = 0
                for pos_at, pos in enumerate(order):
                    j = int(idx[pos])
                    span = self.ub[j] - self.lb[j]
                    if np.isinf(span) or span * abs(w[j]) >= deficit - 1e-12:
                        pivot_j = j
                        break
                    flips.append(j)
                    deficit -= span * abs(w[j])
                if pivot_j == -1:
                    # flipping every eligible nonbasic cannot repair the row
                    if self._pivots_since_refactor > 0:
                        self._refactor()
                        continue
                    if banned:
                        self._hard_restart()
                    return INFEASIBLE
                # widen, Harris style: any unflipped candidate whose reduced
                # cost would cross zero by at most the dual slack under the
                # chosen step stays admissible, and among the admissible ones
                # that can close the deficit the largest pivot element wins;
                # tiny pivots make wild steps, so this trades a whisker of
                # dual feasibility for numbers worth dividing by
                rest = order[pos_at:]
                theta_cap = float(np.min(ratios[rest] + _DUAL_HARRIS / np.abs(w[idx[rest]])))
                best_w = abs(w[pivot_j])
                for pos in rest:
                    if ratios[pos] > theta_cap:
                        break
                    j2 = int(idx[pos])
                    span2 = self.ub[j2] - self.lb[j2]
                    if (np.isinf(span2) or span2 * abs(w[j2]) >= deficit - 1e-12) and abs(w[j2]) > best_w:
                        best_w = abs(w[j2])
                        pivot_j = j2
            j = pivot_j
            alpha = self._ftran_checked(j)
            diff = abs(alpha[irow] - w[j])
            if diff > 1e-3 * max(abs(alpha[irow]), abs(w[j])) and diff > 1e-8:
                # row and column views of the pivot disagree beyond the noise
                # floor of a tiny pivot; retry once with fresh numbers
                if self._pivots_since_refactor > 0:
                    self._refactor()
                    continue
                # with a fresh factor this is plain ill-conditioning: alpha
                # passed the residual check in _ftran_checked and is the
                # trustworthy view, the uncertified row view merely skewed
                # this iteration's ratios, which the next pivot re-prices
            if abs(alpha[irow]) < _PIV_TOL:
                # the certified view says this pivot vanishes: it never
                # belonged in the candidate set, so drop it and choose again
                banned.add((irow, j))
                continue
            for jf in flips:
                alpha_f = self._ftran_checked(jf)
                span = self.ub[jf] - self.lb[jf]
                if self.vstat[jf] == AT_LB:
                    self.vstat[jf] = AT_UB
                    self.xb -= span * alpha_f
                else:
                    self.vstat[jf] = AT_LB
                    self.xb += span * alpha_f
            leave = self.basis[irow]
            xj0 = self.lb[j] if self.vstat[j] == AT_LB else self.ub[j]
            dx = (self.xb[irow] - target) / alpha[irow]
            self.xb -= dx * alpha
            self.vstat[leave] = AT_LB if going_up else AT_UB
            self._update_basis(irow, j, alpha)
            self.basis[irow] = j
            self.vstat[j] = BASIC
            self.xb[irow] = xj0 + dx
            banned.clear()

    # -- drivers ------------------------------------------------------------------

    def reoptimize(self) -> str:
        """Solve from the current basis after any bound edits.  max_iter
        limits this call; the lifetime count lives in self.iterations."""
        self._restarts = 0
        self._iter_stop = self.iterations + self.max_iter
        self._recompute_xb()
        status = None
        for attempt in range(2 + _MAX_RESTARTS):
            try:
                if self.primal_infeasibility() <= _FEAS_TOL:
                    status = self._primal(phase1=False)
                elif not self._prefer_primal and not self._dual_infeasible():
                    status = self._dual()
                    if status == OPTIMAL:
                        status = self._primal(phase1=False)
                else:
                    self._prefer_primal = False
                    status = self._primal(phase1=True)
                    if status == OPTIMAL:
                        status = self._primal(phase1=False)
            except _Restart:
                continue
            if status != OPTIMAL:
                return status
            # polish: refactorize and verify the claim with fresh numbers
            try:
                self._refactor()
            except _Restart:
                continue
            if self.primal_infeasibility() <= 10 * _FEAS_TOL and not self._dual_infeasible():
                return OPTIMAL
        if status == OPTIMAL:
            return OPTIMAL
        raise SimplexError("reoptimization did not converge")


def _nearest_bound(lb: float, ub: float, value: float) -> int:
    if not np.isfinite(ub):
        return AT_LB
    if not np.isfinite(lb):
        return AT_UB
    return AT_LB if abs(value - lb) <= abs(value - ub) else AT_UB


def solve_lp(c, a, senses, b, lb, ub, max_iter: int = 500_000):
    """One-shot LP solve: returns (status, x, objective)."""
    lp = BoundedLp(c, a, senses, b, lb, ub, max_iter=max_iter)
    status = lp.reoptimize()
    if status != OPTIMAL:
        return status, None, None
    return status, lp.solution(), lp.objective()
