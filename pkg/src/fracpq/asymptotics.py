"""The p -> infinity sweep and its closed-form limit targets.

A sweep fixes a ratio Q and a growth constant Lambda, then solves the least
energy problem along an increasing schedule of exponents with q = Q*p and
mu_p = Lambda^p (assembled in log space, so the p-th root of mu_p recovers
Lambda exactly).  Each solve is warm-started from the previous one.  The
recorded quantities converge, as p grows, to explicit functions of Lambda,
the inradius R, and the two differentiability orders; those limits are
evaluated here and every table row carries its relative errors against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._fmt import dump_json, g17
from .domain import (
    DIM,
    GridDomain,
    GridFunction,
    ShapeSpec,
    build_domain,
    shape_to_dict,
)
from .energy import EnergySpec
from .errors import DomainMismatch, LambdaTooSmall, Overflow, QEqualsOne
from .seminorm import MAX_LOG, holder_seminorm
from .solver import SolverOpts, solve_least_energy


@dataclass(frozen=True)
class SweepConfig:
    """One asymptotic experiment: exponent schedule plus fixed data.

    Q < 1 runs the Nehari case (q below p, beta below alpha); Q > 1 runs the
    global-minimum case with the orders swapped.  Every exponent in play must
    clear N/min(alpha, beta) so both structure hypotheses hold along the whole
    schedule.  r_multiplier sets the final surrogate exponent r = mult*max(p,q);
    the continuation doubles from 2*max(p,q) up to it.
    """

    Q: float
    Lambda: float
    p_schedule: tuple[float, ...]
    alpha: float
    beta: float
    shape: ShapeSpec
    h: float | None = None
    collar_width: int | None = None
    r_multiplier: float = 8.0
    solver: SolverOpts = field(default_factory=SolverOpts)

    def __post_init__(self) -> None:
        if not (self.Q > 0.0 and math.isfinite(self.Q)):
            raise ValueError(f"Q must be positive and finite, got {self.Q}")
        if self.Q == 1.0:
            raise QEqualsOne("the limit formulas divide by Q - 1")
        a, b = self.alpha, self.beta
        if self.Q < 1.0 and not (0.0 < b < a < 1.0):
            raise ValueError(f"Q < 1 needs 0 < beta < alpha < 1, got alpha={a}, beta={b}")
        if self.Q > 1.0 and not (0.0 < a < b < 1.0):
            raise ValueError(f"Q > 1 needs 0 < alpha < beta < 1, got alpha={a}, beta={b}")
        if not (self.Lambda > 0.0 and math.isfinite(self.Lambda)):
            raise ValueError(f"Lambda must be positive and finite, got {self.Lambda}")
        ps = tuple(float(p) for p in self.p_schedule)
        if not ps:
            raise ValueError("p_schedule must be nonempty")
        if list(ps) != sorted(set(ps)):
            raise ValueError(f"p_schedule must be strictly increasing, got {ps}")
        floor = DIM / min(a, b)
        for p in ps:
            if not min(p, self.Q * p) > floor:
                raise ValueError(
                    f"p={p} gives an exponent at or below N/min(alpha,beta)={floor:.6g}"
                )
        object.__setattr__(self, "p_schedule", ps)
        if not self.r_multiplier >= 1.0:
            raise ValueError(f"r_multiplier must be >= 1, got {self.r_multiplier}")
        if self.solver.r_schedule is not None:
            raise ValueError(
                "sweep surrogate exponents come from r_multiplier; "
                "solver.r_schedule must stay unset"
            )

    @property
    def case(self) -> str:
        return "H1a" if self.Q < 1.0 else "H1b"

    def r_factors(self) -> tuple[float, ...]:
        out, f = [], 2.0
        while f < self.r_multiplier:
            out.append(f)
            f *= 2.0
        out.append(float(self.r_multiplier))
        return tuple(out)

    def to_dict(self) -> dict:
        s = self.solver
        return {
            "Q": self.Q,
            "Lambda": self.Lambda,
            "p_schedule": list(self.p_schedule),
            "alpha": self.alpha,
            "beta": self.beta,
            "shape": shape_to_dict(self.shape),
            "h": self.h,
            "collar_width": self.collar_width,
            "r_multiplier": self.r_multiplier,
            "solver": {
                "max_iters": s.max_iters,
                "grad_tol": s.grad_tol,
                "ls_shrink": s.ls_shrink,
                "ls_c1": s.ls_c1,
                "init": s.init,
                "seed": s.seed,
            },
        }


@dataclass(frozen=True)
class LimitPrediction:
    """Closed-form p -> infinity values for a sweep's observables.

    The alpha-seminorm is only pinned to a band (lower, upper); all other
    fields are exact limits.  beta is carried along because the distance
    envelope u(x) <= beta_semi_limit * d(x)^beta needs the exponent.
    """

    sup_limit: float
    beta_semi_limit: float
    alpha_semi_lower: float
    alpha_semi_upper: float
    depth_limit: float
    holder_quotient: float
    beta: float

    def __post_init__(self) -> None:
        vals = (self.sup_limit, self.beta_semi_limit, self.alpha_semi_lower,
                self.alpha_semi_upper, self.depth_limit, self.holder_quotient)
        if not all(math.isfinite(v) and v > 0.0 for v in vals):
            raise Overflow(f"limit predictions must be finite and positive, got {vals}")
        if self.alpha_semi_lower > self.alpha_semi_upper:
            raise LambdaTooSmall(
                "alpha-seminorm band is empty: Lambda * R^alpha is below 1"
            )

    def to_dict(self) -> dict:
        return {
            "sup_limit": self.sup_limit,
            "beta_semi_limit": self.beta_semi_limit,
            "alpha_semi_lower": self.alpha_semi_lower,
            "alpha_semi_upper": self.alpha_semi_upper,
            "depth_limit": self.depth_limit,
            "holder_quotient": self.holder_quotient,
            "beta": self.beta,
        }


def predict_limits(cfg: SweepConfig, R: float) -> LimitPrediction:
    """Evaluate the five limit formulas at inradius R.

    sup -> R^beta * (Lambda R^beta)^(1/(Q-1));  [.]_beta -> (Lambda R^beta)^(1/(Q-1));
    [.]_alpha lands in [ (Lambda R^beta)^(Q/(Q-1)) / (Lambda R^alpha),
    (Lambda R^beta)^(Q/(Q-1)) ];  the max point depth -> R; the Holder
    quotient's minimum -> R^(-beta).
    """
    if cfg.Q == 1.0:
        raise QEqualsOne("the limit formulas divide by Q - 1")
    if not (R > 0.0 and math.isfinite(R)):
        raise ValueError(f"inradius must be positive and finite, got {R}")
    e = 1.0 / (cfg.Q - 1.0)
    lrb = cfg.Lambda * R**cfg.beta
    beta_semi = lrb**e
    upper = lrb ** (cfg.Q * e)
    return LimitPrediction(
        sup_limit=R**cfg.beta * beta_semi,
        beta_semi_limit=beta_semi,
        alpha_semi_lower=upper / (cfg.Lambda * R**cfg.alpha),
        alpha_semi_upper=upper,
        depth_limit=R,
        holder_quotient=R**-cfg.beta,
        beta=cfg.beta,
    )


SWEEP_COLUMNS = (
    "p", "q", "mu_log", "sup_norm", "semi_beta", "semi_alpha", "x_p_x", "x_p_y",
    "depth", "holder_q", "err_sup", "err_beta", "iters", "stationarity",
)


@dataclass(frozen=True)
class SweepRow:
    p: float
    q: float
    mu_log: float
    sup_norm: float
    semi_beta: float
    semi_alpha: float
    x_p_x: float
    x_p_y: float
    depth: float
    holder_q: float
    err_sup: float
    err_beta: float
    iters: int
    stationarity: float

    def cells(self) -> list[str]:
        return [
            g17(v) if isinstance(v, float) else str(v)
            for v in (getattr(self, c) for c in SWEEP_COLUMNS)
        ]


@dataclass(frozen=True)
class SweepTable:
    """Rows over the schedule plus everything needed to interpret them."""

    rows: tuple[SweepRow, ...]
    predictions: LimitPrediction
    config: SweepConfig
    domain: GridDomain
    solutions: tuple[GridFunction, ...]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w") as f:
            f.write(",".join(SWEEP_COLUMNS) + "\n")
            for row in self.rows:
                f.write(",".join(row.cells()) + "\n")

    def sidecar(self) -> dict:
        dom = self.domain
        return {
            "config": self.config.to_dict(),
            "predictions": self.predictions.to_dict(),
            "grid": {
                "shape": shape_to_dict(dom.shape),
                "h": dom.h,
                "extent": list(dom.extent),
                "collar_width": dom.collar_width,
                "n_interior": dom.n_interior,
                "inradius": dom.inradius,
            },
        }

    def write_json(self, path: str | Path) -> None:
        dump_json(self.sidecar(), path)


def run_sweep(cfg: SweepConfig, domain: GridDomain | None = None) -> SweepTable:
    """Solve along the schedule and tabulate against the limit predictions.

    Warm-starts each exponent from the previous solution (the first one uses
    the solver's configured initialization).  Raises LambdaTooSmall when
    Lambda * R^alpha <= 1 for the computed inradius, Overflow when Lambda^p
    leaves the double range, and propagates solver failures.
    """
    dom = build_domain(cfg.shape, cfg.h, cfg.collar_width) if domain is None else domain
    R = dom.inradius
    if not cfg.Lambda * R**cfg.alpha > 1.0:
        raise LambdaTooSmall(
            f"Lambda = {cfg.Lambda:.6g} needs Lambda * R^alpha > 1 at the computed "
            f"inradius R = {R:.6g}; got {cfg.Lambda * R ** cfg.alpha:.6g}"
        )
    pred = predict_limits(cfg, R)
    factors = cfg.r_factors()
    dist = dom.distance.ravel()

    rows: list[SweepRow] = []
    sols: list[GridFunction] = []
    warm: GridFunction | None = None
    for p in cfg.p_schedule:
        q = cfg.Q * p
        mu_log = p * math.log(cfg.Lambda)
        if mu_log > MAX_LOG:
            raise Overflow(f"mu = Lambda^{p:g} has log {mu_log:.1f}, beyond double range")
        base = max(p, q)
        es = EnergySpec(alpha=cfg.alpha, beta=cfg.beta, p=p, q=q,
                        mu=math.exp(mu_log), r=factors[-1] * base, case=cfg.case)
        opts = cfg.solver if warm is None else replace(
            cfg.solver, init="warm", warm_start=warm
        )
        opts = replace(opts, r_schedule=tuple(f * base for f in factors))
        res = solve_least_energy(es, dom, opts)
        warm = res.u
        sols.append(res.u)
        x, y = dom.node_xy(res.x_u)
        rows.append(SweepRow(
            p=p,
            q=q,
            mu_log=mu_log,
            sup_norm=res.sup_norm,
            semi_beta=res.semi_beta,
            semi_alpha=res.semi_alpha,
            x_p_x=x,
            x_p_y=y,
            depth=float(dist[res.x_u]),
            holder_q=holder_seminorm(res.u, cfg.beta)[0] / res.sup_norm,
            err_sup=abs(res.sup_norm - pred.sup_limit) / pred.sup_limit,
            err_beta=abs(res.semi_beta - pred.beta_semi_limit) / pred.beta_semi_limit,
            iters=res.iterations,
            stationarity=res.stationarity,
        ))
    return SweepTable(rows=tuple(rows), predictions=pred, config=cfg,
                      domain=dom, solutions=tuple(sols))


def distance_bound_check(u: GridFunction, pred: LimitPrediction, dom: GridDomain) -> float:
    """max_i u_i / (beta_semi_limit * d(x_i)^beta), the distance-envelope ratio.

    Values at or slightly above 1 are consistent with the limiting bound
    u_infty(x) <= beta_semi_limit * d(x)^beta; 0 for the zero function.
    """
    if u.domain is not dom:
        raise DomainMismatch("function and domain disagree")
    if u.sup_norm() == 0.0:
        return 0.0
    d = dom.interior_distance
    return float(np.max(u.values / (pred.beta_semi_limit * d**pred.beta)))
