"""Least energy solver: global descent (H1b) and Nehari-constrained descent (H1a).

Both problems collapse onto rays.  Writing A = [u]_{alpha,p}^p, B = [u]_{beta,q}^q
and D = mu ||u||_r^p - A, the optimal scale along the ray through u is
t = (B/D)^{1/(p-q)} in either case: in H1a it is the Nehari multiplier, in H1b
the minimizer of E along the ray.  At that scale the energy is a monotone
function of

    H(u) = (log B)/q - (log D)/p,

which is scale-invariant, so the solver runs Barzilai-Borwein descent on H
over the nonnegative cone (negative parts clipped at every step; taking the
modulus never raises the energy).  H blows up as D -> 0+, which keeps line
searches away from non-projectable functions for free.  An increasing-r
continuation sharpens the L^r surrogate norm toward the max-norm.

All reported quantities and residuals are recomputed with the exact max-norm:
the converged function is rescaled by the exact-norm t, which lands it on the
Nehari set (H1a) or at the ray minimum of the true energy (H1b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import DIM, GridDomain, GridFunction, cone_function, eight_neighborhood
from .errors import MuBelowThreshold, NoConvergence, NotProjectable, Overflow, WrongCase
from .energy import (
    EnergySpec,
    _bb_descent,
    _lr_grad_parts,
    _nehari_log_t,
    argmax_set,
    log_lr_norm,
)
from .seminorm import MAX_LOG, FracParams, gagliardo_with_log, seminorm_pow_and_grad

MU_SLACK = 0.9  # discretization slack on the lambda_{alpha,p} estimate

_INITS = ("cone", "warm", "random_positive")


@dataclass(frozen=True)
class SolverOpts:
    """Knobs for the descent loops (solver and Rayleigh minimization)."""

    max_iters: int = 4000
    grad_tol: float = 1e-8
    ls_shrink: float = 0.5
    ls_c1: float = 1e-4
    r_schedule: tuple[float, ...] | None = None
    init: str = "cone"
    warm_start: GridFunction | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iters <= 0:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if self.grad_tol <= 0.0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if not 0.0 < self.ls_shrink < 1.0:
            raise ValueError(f"ls_shrink must lie in (0,1), got {self.ls_shrink}")
        if not 0.0 < self.ls_c1 < 1.0:
            raise ValueError(f"ls_c1 must lie in (0,1), got {self.ls_c1}")
        if self.r_schedule is not None:
            sched = tuple(float(r) for r in self.r_schedule)
            if list(sched) != sorted(sched):
                raise ValueError("r_schedule must be nondecreasing")
            object.__setattr__(self, "r_schedule", sched)
        if self.init not in _INITS:
            raise ValueError(f"init must be one of {_INITS}, got {self.init!r}")
        if self.init == "warm" and self.warm_start is None:
            raise ValueError("init='warm' needs warm_start")


@dataclass(frozen=True)
class SolveResult:
    """Converged solution with exact-norm diagnostics."""

    u: GridFunction
    x_u: int
    sup_norm: float
    semi_alpha: float
    semi_beta: float
    energy: float
    nehari_residual: float
    stationarity: float
    iterations: int
    r_final: float

    def to_record(self) -> dict:
        """JSON-ready summary (the function itself is dumped separately)."""
        x, y = self.u.domain.node_xy(self.x_u)
        return {
            "x_u": self.x_u,
            "x_u_xy": [x, y],
            "sup_norm": self.sup_norm,
            "semi_alpha": self.semi_alpha,
            "semi_beta": self.semi_beta,
            "energy": self.energy,
            "nehari_residual": self.nehari_residual,
            "stationarity": self.stationarity,
            "iterations": self.iterations,
            "r_final": self.r_final,
        }


def _cone_lambda_log(dom: GridDomain, fp: FracParams) -> float:
    """log of the cone's Rayleigh quotient ([phi_R]_{s,m} / R)^m, an upper
    bound for lambda_{s,m} up to discretization error."""
    phi = cone_function(dom)
    _, log_pow = gagliardo_with_log(phi, fp)
    return log_pow - fp.m * math.log(phi.sup_norm())


def _kkt_residual(w: np.ndarray, g: np.ndarray) -> float:
    """Stationarity measure for descent over the nonnegative cone: the raw
    gradient at free nodes, only its infeasible (negative) part at clipped
    ones."""
    pg = np.where(w > 0.0, g, np.minimum(g, 0.0))
    return float(np.max(np.abs(pg)))


def _initial_values(dom: GridDomain, opts: SolverOpts) -> np.ndarray:
    if opts.init == "warm":
        if opts.warm_start.domain is not dom:
            raise ValueError("warm start lives on a different domain")
        return opts.warm_start.values.copy()
    if opts.init == "cone":
        return cone_function(dom).values
    rng = np.random.default_rng(opts.seed)
    return rng.uniform(0.1, 1.0, dom.n_interior)


class _RayReduced:
    """The ray-reduced objective H = (log B)/q - (log D)/p at a fixed r."""

    def __init__(self, es: EnergySpec, dom: GridDomain):
        self.es = es
        self.dom = dom

    def _log_d(self, log_a: float, log_nr: float) -> float:
        log_m = self.es.mu_log + self.es.p * log_nr
        if not log_a < log_m:
            return -math.inf  # not projectable: D <= 0
        return log_m + math.log1p(-math.exp(log_a - log_m))

    def value(self, w: np.ndarray) -> float:
        es = self.es
        u = GridFunction(self.dom, w)
        _, log_a = gagliardo_with_log(u, es.fp_alpha)
        _, log_b = gagliardo_with_log(u, es.fp_beta)
        log_d = self._log_d(log_a, log_lr_norm(w, self.dom.h, es.r))
        if log_d == -math.inf:
            return math.inf  # barrier: the ray misses the feasible set
        return log_b / es.q - log_d / es.p

    def value_and_grad(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        es = self.es
        u = GridFunction(self.dom, w)
        log_a, grad_a = seminorm_pow_and_grad(u, es.fp_alpha)
        log_b, grad_b = seminorm_pow_and_grad(u, es.fp_beta)
        log_nr = log_lr_norm(w, self.dom.h, es.r)
        log_d = self._log_d(log_a, log_nr)
        if log_d == -math.inf:
            raise NotProjectable(
                "descent reached a function with [u]_{alpha,p}^p >= mu ||u||_r^p"
            )
        sign, log_mag = _lr_grad_parts(w, self.dom.h, es.r)
        arg = es.mu_log + (es.p - es.r) * log_nr + log_mag
        top = float(np.max(arg, initial=-math.inf))
        if top > MAX_LOG:
            raise Overflow(f"norm-gradient exponent {top:.1f} exceeds the representable range")
        norm_vec = sign * np.exp(arg)  # gradient of (mu/p)||u||_r^p
        # grad H = (grad B)/(q B) - (grad D)/(p D), with grad A = p grad_a etc.
        g = grad_b * math.exp(-log_b) - (norm_vec - grad_a) * math.exp(-log_d)
        return log_b / es.q - log_d / es.p, g

    def retract(self, w: np.ndarray) -> np.ndarray | None:
        w = np.maximum(w, 0.0)
        if not np.any(w > 0.0):
            return None
        log_nr = log_lr_norm(w, self.dom.h, self.es.r)
        return w * math.exp(-log_nr)


def solve_least_energy(es: EnergySpec, dom: GridDomain, opts: SolverOpts) -> SolveResult:
    """Compute a nonnegative least energy solution for the given spec.

    Case H1b minimizes the energy globally; case H1a minimizes over the Nehari
    set.  Raises MuBelowThreshold when mu fails the necessary-condition
    estimate, NoConvergence when the final continuation stage hits the
    iteration cap, NotProjectable if descent leaves the projectable region.
    """
    es.fp_alpha.resolve_T(dom)
    es.fp_beta.resolve_T(dom)
    if es.case == "H1a" and not es.q < es.p:
        raise WrongCase("case H1a solving needs q strictly below p")
    if es.case == "H1b" and not es.p < es.q:
        raise WrongCase("case H1b solving needs p strictly below q")

    if es.case == "H1a":
        log_lam_est = _cone_lambda_log(dom, es.fp_alpha)
        if not es.mu_log > math.log(MU_SLACK) + log_lam_est:
            raise MuBelowThreshold(
                f"mu = {es.mu:.6g} does not exceed {MU_SLACK} * lambda_alpha,p "
                f"estimate exp({log_lam_est:.6g}); no nontrivial solution can exist"
            )

    base = max(es.p, es.q)
    schedule = opts.r_schedule if opts.r_schedule is not None else (2 * base, 4 * base, 8 * base)
    schedule = tuple(float(r) for r in schedule)
    if schedule[0] < base:
        raise ValueError(f"surrogate exponents must be >= max(p,q) = {base}")

    w = np.maximum(_initial_values(dom, opts), 0.0)
    if not np.any(w > 0.0):
        raise ValueError("initial function has no positive part")

    first = _RayReduced(replace(es, r=schedule[0]), dom)
    if not math.isfinite(first.value(first.retract(w))):
        raise MuBelowThreshold(
            "initial function is not projectable onto the feasible set; mu is "
            "too small relative to its Rayleigh quotient"
        )

    iterations, converged = 0, False
    for r in schedule:
        red = _RayReduced(replace(es, r=r), dom)
        w, _, iters, converged = _bb_descent(
            w,
            value=red.value,
            value_and_grad=red.value_and_grad,
            retract=red.retract,
            max_iters=opts.max_iters,
            # the two gradient pieces are O(1/||w||_oo) after the retraction
            grad_tol=lambda w, _g: opts.grad_tol / float(np.max(np.abs(w))),
            shrink=opts.ls_shrink,
            c1=opts.ls_c1,
            residual=_kkt_residual,
        )
        iterations += iters
    if not converged:
        raise NoConvergence(
            f"gradient tolerance not met within {opts.max_iters} iterations "
            f"in the final continuation stage"
        )

    # exact-max-norm scale: Nehari multiplier (H1a) / ray energy minimum (H1b)
    u = GridFunction(dom, w)
    _, log_a = gagliardo_with_log(u, es.fp_alpha)
    _, log_b = gagliardo_with_log(u, es.fp_beta)
    log_m = es.mu_log + es.p * math.log(u.sup_norm())
    log_t = _nehari_log_t(log_a, log_b, log_m, es.p, es.q)
    u = math.exp(log_t) * u

    return _build_result(u, es, iterations, schedule[-1])


def _build_result(u: GridFunction, es: EnergySpec, iterations: int, r_final: float) -> SolveResult:
    _, log_a = gagliardo_with_log(u, es.fp_alpha)
    _, log_b = gagliardo_with_log(u, es.fp_beta)
    sup = u.sup_norm()
    log_m = es.mu_log + es.p * math.log(sup)
    energy = math.exp(log_a) / es.p + math.exp(log_b) / es.q - math.exp(log_m) / es.p
    residual = abs(math.exp(log_a - log_m) + math.exp(log_b - log_m) - 1.0)
    nodes, x_u = argmax_set(u)
    exclude = set(nodes) | set(eight_neighborhood(u.domain, nodes))
    return SolveResult(
        u=u,
        x_u=x_u,
        sup_norm=sup,
        semi_alpha=math.exp(log_a / es.p),
        semi_beta=math.exp(log_b / es.q),
        energy=energy,
        nehari_residual=residual,
        stationarity=stationarity_residual(u, es, exclude),
        iterations=iterations,
        r_final=r_final,
    )


def stationarity_residual(u: GridFunction, es: EnergySpec, exclude) -> float:
    """How close u is to solving the equation away from the excluded nodes.

    The combined field F_i = (-Delta_p)^alpha u(i) + (-Delta_q)^beta u(i) is
    assembled for all interior nodes at once (it is -h^{-N} times the gradient
    of the two seminorm terms).  Returns max |F_i| off the excluded set divided
    by max |F_i| over all interior nodes, a number in [0, 1]: small means the
    equation holds everywhere except where the sup-norm Dirac sits.
    """
    if u.sup_norm() == 0.0:
        return 0.0
    _, grad_a = seminorm_pow_and_grad(u, es.fp_alpha)
    _, grad_b = seminorm_pow_and_grad(u, es.fp_beta)
    absf = np.abs(grad_a + grad_b) / u.domain.h**DIM
    denom = float(absf.max())
    if denom == 0.0:
        return 0.0
    keep = ~np.isin(u.domain.interior_idx, np.asarray(sorted(exclude), dtype=np.int64))
    if not keep.any():
        return 0.0
    return float(absf[keep].max()) / denom
