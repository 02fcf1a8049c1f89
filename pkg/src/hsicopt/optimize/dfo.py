"""Derivative-free constrained local optimizer using linear approximations.

The method follows the classic COBYLA design: a simplex of ``n + 1``
interpolation points carries linear models of the objective and of every
constraint, a trust-region step minimizes those models inside a ball of
radius ``rho``, a penalty parameter ``mu`` turns objective and worst
violation into the merit ``f + mu * max(0, g)``, and ``rho`` is halved
from ``rho_begin`` down to ``rho_end``.  Box bounds enter as linear
constraints with exact gradients, and trial points are projected onto the
box so the objective is never called outside it.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from ..errors import ArgumentError, DomainError
from ..problem import ProblemSpec

ALPHA, BETA, GAMMA, DELTA = 0.25, 2.1, 0.5, 1.1

CONVERGED = "converged"
BUDGET = "budget-exhausted"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class StudyRecord:
    version: str
    start: np.ndarray
    final: np.ndarray
    f_final: float
    feasible: bool
    n_calls: int
    status: str
    max_violation: float = 0.0
    rep: int = 0
    run: int = 0
    extra: dict = field(default_factory=dict, compare=False, repr=False)


# ------------------------------------------------------------ trust region

def _ball_step(s, p, rho):
    """Largest t >= 0 with ||s + t p|| <= rho."""
    pp = p @ p
    sp = s @ p
    rem = max(rho * rho - s @ s, 0.0)
    return rem / (sp + np.sqrt(sp * sp + pp * rem)) if rem > 0 else 0.0


def _least_distance(rows):
    """Shortest p with ``rows @ p <= -1``; None when no such p exists."""
    k, n = rows.shape
    E = np.vstack([-rows.T, np.ones((1, k))])
    target = np.zeros(n + 1)
    target[-1] = 1.0
    u, _ = nnls(E, target, maxiter=50 * (n + k))
    r = E @ u - target
    if -r[-1] <= 1e-13:
        return None
    return -r[:n] / r[-1]


def trust_region_step(gc, cons, gf, rho):
    """Step ``s`` for the linear models within ``||s|| <= rho``.

    Stage one walks along the steepest descent path of the largest
    linearized violation ``max_j(cons_j + gc_j . s)`` until it is zero,
    stationary, or the ball is reached.  Stage two then decreases
    ``gf . s`` along projected steepest descent while no linearized
    constraint rises above the level left by stage one.  Returns
    ``(s, full)`` where ``full`` tells whether ``||s|| == rho``.
    """
    n = gf.size
    s = np.zeros(n)
    cap = 4 * (n + cons.size) + 10
    scale = 1.0 + np.abs(cons).max(initial=0.0) + rho * np.abs(gc).max(initial=0.0)
    tol = 1e-11 * scale

    level = 0.0
    for _ in range(cap):
        v = cons + gc @ s
        vmax = v.max(initial=-np.inf)
        if vmax <= 0.0:
            break
        act = v >= vmax - tol
        p = _least_distance(gc[act])
        if p is None:
            level = vmax
            break
        rate = gc @ p
        t = vmax
        grow = ~act & (rate + 1.0 > 0.0)
        if grow.any():
            t = min(t, ((vmax - v[grow]) / (rate[grow] + 1.0)).min())
        t_ball = _ball_step(s, p, rho)
        if t_ball <= t:
            return s + t_ball * p, True
        s = s + max(t, 0.0) * p
    else:
        level = max((cons + gc @ s).max(initial=0.0), 0.0)

    gnorm = np.linalg.norm(gf)
    if gnorm == 0.0:
        return s, False
    for _ in range(cap):
        v = cons + gc @ s
        act = v >= level - tol
        if act.any():
            mu, _ = nnls(gc[act].T, -gf, maxiter=50 * (n + cons.size))
            p = -gf - gc[act].T @ mu
        else:
            p = -gf
        if np.linalg.norm(p) <= 1e-12 * gnorm:
            return s, False
        rate = gc @ p
        t = np.inf
        hit = ~act & (rate > 0.0)
        if hit.any():
            # tiny positive rates overflow to inf, which correctly never binds
            with np.errstate(over="ignore"):
                t = max(((level - v[hit]) / rate[hit]).min(), 0.0)
        t_ball = _ball_step(s, p, rho)
        if t_ball <= t:
            return s + t_ball * p, True
        s = s + t * p
    return s, False


# ---------------------------------------------------------------- driver

class _Evaluator:
    """Counts calls and remembers the best point (feasible first)."""

    def __init__(self, problem, ctol):
        self.problem = problem
        self.lower = problem.domain.lower
        self.upper = problem.domain.upper
        self.ctol = ctol
        self.n_calls = 0
        self.best = None

    def __call__(self, x):
        f, g = self.problem.evaluate_point(x)
        self.n_calls += 1
        viol = max(g.max(initial=0.0), 0.0)
        key = (0, f) if viol <= self.ctol else (1, viol)
        if self.best is None or key < self.best[0]:
            self.best = (key, x.copy(), f, viol)
        cons = np.concatenate([g, self.lower - x, x - self.upper])
        return f, cons, max(cons.max(initial=0.0), 0.0)


def dfo_minimize(problem: ProblemSpec, x0, rho_begin=None, rho_end=None,
                 budget: int = 500, ctol: float = 1e-6,
                 version: str = "original") -> StudyRecord:
    """Minimize ``problem`` from ``x0``; returns a :class:`StudyRecord`.

    Defaults: ``rho_begin = 0.1 * min box width``,
    ``rho_end = 1e-4 * min box width``.  ``n_calls`` counts objective
    evaluations and never exceeds ``budget``.  The reported point is the
    best one evaluated: any point with violation <= ``ctol`` beats every
    infeasible one, feasible points rank by ``f`` and infeasible ones by
    their largest violation.
    """
    dom = problem.domain
    n = dom.dim
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (n,):
        raise ArgumentError(f"x0 has length {x0.size}, problem has d={n}")
    if not dom.contains(x0)[0]:
        raise DomainError(f"start point {x0.tolist()} outside the box")
    wmin = dom.width.min()
    rho_begin = 0.1 * wmin if rho_begin is None else float(rho_begin)
    rho_end = 1e-4 * wmin if rho_end is None else float(rho_end)
    if not (0 < rho_end < rho_begin):
        raise ArgumentError("need 0 < rho_end < rho_begin")
    if budget < n + 2:
        raise ArgumentError(f"budget must be >= d + 2 = {n + 2}")

    ev = _Evaluator(problem, ctol)
    status = _cobyla(ev, x0, rho_begin, rho_end, budget)
    _, x_best, f_best, viol = ev.best
    return StudyRecord(version=version, start=x0, final=x_best, f_final=f_best,
                       feasible=bool(viol <= ctol), n_calls=ev.n_calls,
                       status=status, max_violation=viol)


def _cobyla(ev, x0, rho, rho_end, budget):
    lower, upper = ev.lower, ev.upper
    n = x0.size
    restarts = 0

    def build_simplex(x, rho):
        sim = np.zeros((n, n))
        for j in range(n):
            sim[j, j] = rho if x[j] + rho <= upper[j] else -rho
        fv = np.empty(n + 1)
        res = np.empty(n + 1)
        cv = [None] * (n + 1)
        fv[n], cv[n], res[n] = ev(x)
        for j in range(n):
            if ev.n_calls >= budget:
                return None
            fv[j], cv[j], res[j] = ev(x + sim[:, j])
        return sim, np.diag(1.0 / np.diag(sim)), fv, np.array(cv), res

    if budget < n + 1:
        return BUDGET
    built = build_simplex(x0.copy(), rho)
    if built is None:
        return BUDGET
    sim, simi, fv, cv, res = built
    x = x0.copy()
    parmu = 0.0
    ibrnch = True

    while True:
        # best vertex to the pole position
        phi = fv + parmu * res
        nbest = n
        for j in range(n):
            if phi[j] < phi[nbest] or (phi[j] == phi[nbest] and parmu == 0.0
                                       and res[j] < res[nbest]):
                nbest = j
        if nbest < n:
            for arr in (fv, res):
                arr[[n, nbest]] = arr[[nbest, n]]
            cv[[n, nbest]] = cv[[nbest, n]]
            shift = sim[:, nbest].copy()
            x = x + shift
            sim -= shift[:, None]
            sim[:, nbest] = -shift
            simi[nbest] = -simi.sum(axis=0)

        if np.abs(simi @ sim - np.eye(n)).max() > 0.1:
            if restarts >= 1 or ev.n_calls + n + 1 > budget:
                return DEGENERATE
            restarts += 1
            built = build_simplex(ev.best[1].copy(), rho)
            if built is None:
                return BUDGET
            sim, simi, fv, cv, res = built
            x = ev.best[1].copy()
            ibrnch = True
            continue

        # linear models: rows of gc are constraint gradients
        gc = simi.T.dot(cv[:n] - cv[n]).T
        gf = simi.T @ (fv[:n] - fv[n])

        parsig, pareta = ALPHA * rho, BETA * rho
        vsig = 1.0 / np.sqrt((simi ** 2).sum(axis=1))
        veta = np.sqrt((sim ** 2).sum(axis=0))
        iflag = not (np.any(vsig < parsig) or np.any(veta > pareta))

        if not ibrnch and not iflag:
            if ev.n_calls >= budget:
                return BUDGET
            jdrop = int(np.argmax(veta)) if np.any(veta > pareta) else int(np.argmin(vsig))
            dx = GAMMA * rho * vsig[jdrop] * simi[jdrop]
            pred = gc @ dx
            cvmaxp = max(0.0, (cv[n] + pred).max(initial=0.0))
            cvmaxm = max(0.0, (cv[n] - pred).max(initial=0.0))
            if parmu * (cvmaxp - cvmaxm) > -2.0 * (gf @ dx):
                dx = -dx
            out = (x + dx < lower) | (x + dx > upper)
            dx[out] = -dx[out]
            dx = np.clip(x + dx, lower, upper) - x
            _replace_vertex(sim, simi, jdrop, dx)
            fv[jdrop], cv[jdrop], res[jdrop] = ev(x + dx)
            ibrnch = True
            continue

        dx, full = trust_region_step(gc, cv[n], gf, rho)
        reduce = False
        if not full and dx @ dx < 0.25 * rho * rho:
            reduce = True
        else:
            pred_f = gf @ dx
            resnew = max(0.0, (cv[n] + gc @ dx).max(initial=0.0))
            prerec = res[n] - resnew
            barmu = pred_f / prerec if prerec > 0.0 else 0.0
            if parmu < 1.5 * barmu:
                parmu = 2.0 * barmu
                phi_pole = fv[n] + parmu * res[n]
                phi = fv[:n] + parmu * res[:n]
                if np.any(phi < phi_pole) or (parmu == 0.0 and np.any(
                        (phi == phi_pole) & (res[:n] < res[n]))):
                    continue
            prerem = parmu * prerec - pred_f

            if ev.n_calls >= budget:
                return BUDGET
            dx = np.clip(x + dx, lower, upper) - x
            f_new, c_new, r_new = ev(x + dx)
            trared = (fv[n] + parmu * res[n]) - (f_new + parmu * r_new)
            if parmu == 0.0 and f_new == fv[n]:
                prerem = prerec
                trared = res[n] - r_new

            ratio = 1.0 if trared <= 0.0 else 0.0
            proj = np.abs(simi @ dx)
            jdrop = -1
            for j in range(n):
                if proj[j] > ratio:
                    jdrop, ratio = j, proj[j]
            sigbar = proj * vsig
            edgmax = DELTA * rho
            ell = -1
            for j in range(n):
                if sigbar[j] >= parsig or sigbar[j] >= vsig[j]:
                    dist = veta[j]
                    if trared > 0.0:
                        dist = np.linalg.norm(dx - sim[:, j])
                    if dist > edgmax:
                        ell, edgmax = j, dist
            if ell >= 0:
                jdrop = ell
            if jdrop < 0:
                reduce = True
            else:
                _replace_vertex(sim, simi, jdrop, dx)
                fv[jdrop], cv[jdrop], res[jdrop] = f_new, c_new, r_new
                if trared > 0.0 and trared >= 0.1 * prerem:
                    continue
                reduce = True

        if reduce:
            if not iflag:
                ibrnch = False
                continue
            if rho <= rho_end:
                return CONVERGED
            rho *= 0.5
            if rho <= 1.5 * rho_end:
                rho = rho_end
            if parmu > 0.0:
                parmu = _shrink_penalty(parmu, fv, cv)


def _replace_vertex(sim, simi, jdrop, dx):
    sim[:, jdrop] = dx
    proj = simi @ dx
    simi[jdrop] /= proj[jdrop]
    for j in range(simi.shape[0]):
        if j != jdrop:
            simi[j] -= proj[j] * simi[jdrop]


def _shrink_penalty(parmu, fv, cv):
    """Lower ``mu`` when the simplex values no longer need it."""
    denom = 0.0
    # constraints are stored as g <= 0; the test below is on c = -g >= 0
    for k in range(cv.shape[1]):
        cmin, cmax = -cv[:, k].max(), -cv[:, k].min()
        if cmin < 0.5 * cmax:
            temp = max(cmax, 0.0) - cmin
            denom = temp if denom <= 0.0 else min(denom, temp)
    if denom == 0.0:
        return 0.0
    spread = fv.max() - fv.min()
    if spread < parmu * denom:
        return spread / denom
    return parmu
