"""Energy functional, surrogate gradient, Nehari projection, Rayleigh quotients.

The energy is

    E_mu(u) = (1/p) [u]_{alpha,p}^p + (1/q) [u]_{beta,q}^q - (mu/p) ||u||_oo^p

with the sup-norm term smoothed, during optimization only, by the discrete
L^r norm  ||u||_r = (sum_i |u_i|^r h^N)^{1/r}  for large r.  All reported
identities (Nehari residual, necessary condition) use the exact max-norm.

Every p-th power is assembled in log space: the parameter regimes of interest
push p to 40 and r to several hundred, where raw powers of node values
over/underflow long before the combined quantities do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np
from scipy.special import logsumexp

from .domain import DIM, GridDomain, GridFunction, cone_function
from .errors import (
    NoConvergence,
    NotProjectable,
    Overflow,
    WrongCase,
    ZeroFunction,
)
from .seminorm import (
    LOG_FLOOR,
    MAX_LOG,
    FracParams,
    gagliardo_with_log,
    seminorm_pow_and_grad,
)

if TYPE_CHECKING:  # pragma: no cover - type names only; avoids an import cycle
    from .solver import SolverOpts

CASES = ("H1b", "H1a")


@dataclass(frozen=True)
class EnergySpec:
    """Parameters of E_mu and its L^r surrogate.

    case "H1b": 0 < alpha < beta < 1 and N/alpha < p <= q  (global minimum).
    case "H1a": 0 < beta < alpha < 1 and N/beta < q <= p  (Nehari-constrained).

    p == q is admitted so that gradient diagnostics can run on the symmetric
    functional; the Nehari projection itself additionally demands q < p.
    fp_alpha/fp_beta default to FracParams(alpha, p) / FracParams(beta, q) and
    may be overridden to set a custom interaction radius or disable the tail.
    """

    alpha: float
    beta: float
    p: float
    q: float
    mu: float
    r: float
    case: str
    fp_alpha: FracParams | None = None
    fp_beta: FracParams | None = None

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        a, b, p, q = self.alpha, self.beta, self.p, self.q
        if self.case == "H1b":
            if not (0.0 < a < b < 1.0):
                raise ValueError(f"case H1b needs 0 < alpha < beta < 1, got alpha={a}, beta={b}")
            if not (DIM / a < p <= q):
                raise ValueError(f"case H1b needs N/alpha < p <= q, got p={p}, q={q}, N/alpha={DIM / a}")
        else:
            if not (0.0 < b < a < 1.0):
                raise ValueError(f"case H1a needs 0 < beta < alpha < 1, got alpha={a}, beta={b}")
            if not (DIM / b < q <= p):
                raise ValueError(f"case H1a needs N/beta < q <= p, got p={p}, q={q}, N/beta={DIM / b}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive and finite, got {self.mu}")
        if self.r < max(p, q):
            raise ValueError(f"surrogate exponent r={self.r} must be >= max(p,q)={max(p, q)}")
        if self.fp_alpha is None:
            object.__setattr__(self, "fp_alpha", FracParams(s=a, m=p))
        elif (self.fp_alpha.s, self.fp_alpha.m) != (a, p):
            raise ValueError("fp_alpha disagrees with (alpha, p)")
        if self.fp_beta is None:
            object.__setattr__(self, "fp_beta", FracParams(s=b, m=q))
        elif (self.fp_beta.s, self.fp_beta.m) != (b, q):
            raise ValueError("fp_beta disagrees with (beta, q)")

    @property
    def mu_log(self) -> float:
        return math.log(self.mu)


# ---------------------------------------------------------------------------
# norms


def log_lr_norm(values: np.ndarray, h: float, r: float) -> float:
    """log of the discrete L^r norm (sum |u_i|^r h^N)^(1/r); -inf for u = 0."""
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(values))
    la[np.abs(values) < LOG_FLOOR] = -np.inf
    if np.all(np.isinf(la)):
        return -math.inf
    return float(logsumexp(r * la) + DIM * math.log(h)) / r


def lr_norm(u: GridFunction, r: float) -> float:
    return math.exp(log_lr_norm(u.values, u.domain.h, r))


def _log_norm(u: GridFunction, es: EnergySpec, surrogate: bool) -> float:
    if surrogate:
        return log_lr_norm(u.values, u.domain.h, es.r)
    m = u.sup_norm()
    return math.log(m) if m > 0.0 else -math.inf


# ---------------------------------------------------------------------------
# energy and gradient


def _energy_logs(u: GridFunction, es: EnergySpec, surrogate: bool) -> tuple[float, float, float]:
    """(log [u]_a^p, log [u]_b^q, log mu*||u||^p), each possibly -inf."""
    _, log_a = gagliardo_with_log(u, es.fp_alpha)
    _, log_b = gagliardo_with_log(u, es.fp_beta)
    log_m = es.mu_log + es.p * _log_norm(u, es, surrogate)
    for name, val in (("alpha term", log_a), ("beta term", log_b), ("norm term", log_m)):
        if val > MAX_LOG:
            raise Overflow(f"{name} exponent {val:.1f} exceeds the representable range")
    return log_a, log_b, log_m


def energy_eval(u: GridFunction, es: EnergySpec, surrogate: bool = False) -> float:
    """E_mu(u); with surrogate=True the sup-norm is replaced by ||.||_r."""
    if u.sup_norm() == 0.0:
        return 0.0
    log_a, log_b, log_m = _energy_logs(u, es, surrogate)
    return math.exp(log_a) / es.p + math.exp(log_b) / es.q - math.exp(log_m) / es.p


def _lr_grad_parts(values: np.ndarray, h: float, r: float) -> tuple[np.ndarray, np.ndarray]:
    """(sign(u_i), log(|u_i|^(r-1) h^N)) for the L^r norm gradient."""
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(values))
    la[np.abs(values) < LOG_FLOOR] = -np.inf
    return np.sign(values), (r - 1.0) * la + DIM * math.log(h)


def _surrogate_grad(u: GridFunction, es: EnergySpec) -> np.ndarray:
    """Gradient array of the surrogate energy at u (u must be nonzero)."""
    _, grad_a = seminorm_pow_and_grad(u, es.fp_alpha)
    _, grad_b = seminorm_pow_and_grad(u, es.fp_beta)
    log_nr = log_lr_norm(u.values, u.domain.h, es.r)
    sign, log_mag = _lr_grad_parts(u.values, u.domain.h, es.r)
    # d/du_i (mu/p)||u||_r^p = mu ||u||_r^(p-r) |u_i|^(r-2) u_i h^N
    arg = es.mu_log + (es.p - es.r) * log_nr + log_mag
    top = np.max(arg, initial=-math.inf)
    if top > MAX_LOG:
        raise Overflow(f"norm-term gradient exponent {top:.1f} exceeds the representable range")
    return grad_a + grad_b - sign * np.exp(arg)


def energy_grad(u: GridFunction, es: EnergySpec) -> GridFunction:
    """Gradient of the surrogate energy energy_eval(., es, surrogate=True)."""
    if u.sup_norm() == 0.0:
        raise ZeroFunction("energy gradient needs a nonzero function")
    return GridFunction(u.domain, _surrogate_grad(u, es))


# ---------------------------------------------------------------------------
# sup-norm structure


def argmax_set(u: GridFunction, tol: float = 1e-6) -> tuple[list[int], int]:
    """Nodes within relative tol of the max of |u|, ascending, plus the first."""
    m = u.sup_norm()
    if m == 0.0:
        raise ZeroFunction("argmax set of the zero function is the whole domain")
    hit = np.abs(u.values) >= (1.0 - tol) * m
    nodes = [int(i) for i in u.domain.interior_idx[hit]]
    return nodes, nodes[0]


def gateaux_supnorm_check(
    u: GridFunction, v: GridFunction, p: float, eps: float
) -> tuple[float, float]:
    """One-sided derivative of ||.||_oo^p/p at u along v vs its argmax formula.

    lhs = (||u + eps v||_oo^p - ||u||_oo^p) / (p eps); rhs = max over the
    argmax set of |u_i|^(p-2) u_i v_i.  The two converge as eps -> 0.
    """
    if u.sup_norm() == 0.0:
        raise ZeroFunction("directional sup-norm derivative needs u != 0")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")

    def _pow(x: float) -> float:
        if x == 0.0:
            return 0.0
        arg = p * math.log(x)
        if arg > MAX_LOG:
            raise Overflow(f"sup-norm power exponent {arg:.1f} exceeds the representable range")
        return math.exp(arg)

    lhs = (_pow((u + eps * v).sup_norm()) - _pow(u.sup_norm())) / (p * eps)
    nodes, _ = argmax_set(u)
    pos = np.searchsorted(u.domain.interior_idx, nodes)
    ui, vi = u.values[pos], v.values[pos]
    terms = np.sign(ui) * np.exp((p - 1.0) * np.log(np.abs(ui))) * vi
    return lhs, float(np.max(terms))


# ---------------------------------------------------------------------------
# Nehari projection


def _nehari_log_t(
    log_a: float, log_b: float, log_mu_norm_p: float, p: float, q: float
) -> float:
    """log t with t = (B / (mu ||u||^p - A))^(1/(p-q)); NotProjectable if A >= mu||u||^p."""
    if not log_a < log_mu_norm_p:
        raise NotProjectable(
            "[u]_{alpha,p}^p exceeds mu ||u||^p; no Nehari multiplier exists "
            f"(log A = {log_a:.6g}, log mu||u||^p = {log_mu_norm_p:.6g})"
        )
    log_d = log_mu_norm_p + math.log1p(-math.exp(log_a - log_mu_norm_p))
    return (log_b - log_d) / (p - q)


def nehari_project(u: GridFunction, es: EnergySpec) -> tuple[float, GridFunction]:
    """Scale u onto the Nehari set using the exact max-norm.

    Returns (t, t*u) with [tu]_a^p + [tu]_b^q = mu ||tu||_oo^p.  Only defined
    in case H1a with q strictly below p.
    """
    if es.case != "H1a":
        raise WrongCase("the Nehari projection is a case-H1a construction")
    if not es.q < es.p:
        raise WrongCase("the Nehari multiplier formula needs q < p")
    sup = u.sup_norm()
    if sup == 0.0:
        raise NotProjectable("the zero function cannot be projected onto the Nehari set")
    _, log_a = gagliardo_with_log(u, es.fp_alpha)
    _, log_b = gagliardo_with_log(u, es.fp_beta)
    log_t = _nehari_log_t(log_a, log_b, es.mu_log + es.p * math.log(sup), es.p, es.q)
    if log_t > MAX_LOG:
        raise Overflow(f"Nehari multiplier exponent {log_t:.1f} exceeds the representable range")
    t = math.exp(log_t)
    return t, t * u


# ---------------------------------------------------------------------------
# descent driver (shared with the solver module)


def _bb_descent(
    w0: np.ndarray,
    value: Callable[[np.ndarray], float],
    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    retract: Callable[[np.ndarray], np.ndarray | None],
    max_iters: int,
    grad_tol: Callable[[np.ndarray, np.ndarray], float],
    shrink: float,
    c1: float,
    residual: Callable[[np.ndarray, np.ndarray], float] | None = None,
) -> tuple[np.ndarray, float, int, bool]:
    """Barzilai-Borwein gradient descent with nonmonotone backtracking.

    `retract` maps a trial point back to the feasible set (normalization,
    clipping) and may return None to veto the trial.  `grad_tol(w, g)` returns
    the convergence threshold, so callers can scale the tolerance to the size
    of the objective's terms.  `residual(w, g)` is the stationarity measure
    compared against it; the default is ||g||_oo, constrained callers pass a
    KKT residual instead (a clipped node with inward-pointing gradient is
    stationary even though the raw gradient component is not zero).
    Returns (w, f(w), iterations, converged).
    """
    if residual is None:
        residual = lambda _w, g: float(np.max(np.abs(g)))
    w = retract(np.asarray(w0, dtype=float))
    if w is None:
        raise ValueError("retraction rejected the starting point")
    f, g = value_and_grad(w)
    recent = [f]  # nonmonotone line-search memory
    t = 1.0 / max(float(np.max(np.abs(g))), 1e-30)
    w_prev: np.ndarray | None = None
    g_prev: np.ndarray | None = None
    for k in range(max_iters):
        if residual(w, g) <= grad_tol(w, g):
            return w, f, k, True
        if w_prev is not None:
            s = w - w_prev
            y = g - g_prev
            sy = float(s @ y)
            if sy > 0.0:
                # alternate the two Barzilai-Borwein step lengths; the long
                # step alone is prone to cycling on ill-conditioned problems
                t = float(s @ s) / sy if k % 2 else sy / float(y @ y)
        t = min(max(t, 1e-30), 1e30)
        f_ref = max(recent)
        g2 = float(g @ g)
        t_try, accepted = t, False
        for _ in range(80):
            trial = retract(w - t_try * g)
            if trial is not None:
                f_new = value(trial)
                if f_new <= f_ref - c1 * t_try * g2:
                    accepted = True
                    break
            t_try *= shrink
        if not accepted:
            return w, f, k, residual(w, g) <= grad_tol(w, g)
        w_prev, g_prev = w, g
        w = trial
        f, g = value_and_grad(w)
        recent.append(f)
        if len(recent) > 10:
            recent.pop(0)
    return w, f, max_iters, False


# ---------------------------------------------------------------------------
# Rayleigh quotient


def _quotient_value(values: np.ndarray, dom: GridDomain, fp: FracParams, r: float) -> float:
    """log( [u]_{s,m} / ||u||_r ), the scale-free objective."""
    _, log_pow = gagliardo_with_log(GridFunction(dom, values), fp)
    return log_pow / fp.m - log_lr_norm(values, dom.h, r)


def _quotient_value_grad(
    values: np.ndarray, dom: GridDomain, fp: FracParams, r: float
) -> tuple[float, np.ndarray]:
    u = GridFunction(dom, values)
    log_pow, grad_pow = seminorm_pow_and_grad(u, fp)
    log_nr = log_lr_norm(values, dom.h, r)
    sign, log_mag = _lr_grad_parts(values, dom.h, r)
    f = log_pow / fp.m - log_nr
    arg = log_mag - r * log_nr
    top = np.max(arg, initial=-math.inf)
    if top > MAX_LOG:
        raise Overflow(f"quotient gradient exponent {top:.1f} exceeds the representable range")
    g = grad_pow * math.exp(-log_pow) - sign * np.exp(arg)
    return f, g


def rayleigh_min(
    fp: FracParams, dom: GridDomain, opts: "SolverOpts"
) -> tuple[float, GridFunction]:
    """Minimize the sup-norm Rayleigh quotient [u]_{s,m}^m / ||u||_oo^m.

    Minimizes the L^r surrogate quotient over an r continuation schedule from
    several starts (the distance cone plus seeded random positive functions)
    and reports lambda = ([u*]_{s,m} / ||u*||_oo)^m with the exact max-norm,
    the minimizer normalized to ||u*||_oo = 1.  The problem is nonconvex for
    m != 2, so this is a best-of-local-minima estimate, not a certificate.
    """
    fp.resolve_T(dom)  # fail fast on collar/interaction-radius mismatch
    m = fp.m
    schedule = opts.r_schedule if opts.r_schedule is not None else (2 * m, 4 * m, 8 * m)
    if list(schedule) != sorted(schedule):
        raise ValueError("r_schedule must be nondecreasing")
    if schedule[0] < m:
        raise ValueError(f"surrogate exponents must be >= m = {m}")
    rng = np.random.default_rng(opts.seed)
    n = dom.n_interior

    starts: list[np.ndarray] = []
    if opts.init == "warm":
        if opts.warm_start is None:
            raise ValueError("init='warm' needs warm_start")
        if opts.warm_start.domain is not dom:
            raise ValueError("warm start lives on a different domain")
        starts.append(opts.warm_start.values.copy())
    elif opts.init == "cone":
        starts.append(cone_function(dom).values)
    elif opts.init == "random_positive":
        starts.append(rng.uniform(0.1, 1.0, n))
    else:
        raise ValueError(f"unknown init {opts.init!r}")
    starts.extend(rng.uniform(0.1, 1.0, n) for _ in range(3))

    def retract(w: np.ndarray, r: float) -> np.ndarray | None:
        ln = log_lr_norm(w, dom.h, r)
        if not math.isfinite(ln):
            return None
        return w * math.exp(-ln)

    best: tuple[float, np.ndarray] | None = None
    any_converged = False
    for w in starts:
        converged = True
        for r in schedule:
            w, _, _, ok = _bb_descent(
                w,
                value=lambda x, r=r: _quotient_value(x, dom, fp, r),
                value_and_grad=lambda x, r=r: _quotient_value_grad(x, dom, fp, r),
                retract=lambda x, r=r: retract(x, r),
                max_iters=opts.max_iters,
                grad_tol=lambda _w, _g: opts.grad_tol,
                shrink=opts.ls_shrink,
                c1=opts.ls_c1,
            )
            converged = ok  # the last (largest-r) stage decides
        any_converged |= converged
        if converged:
            _, log_pow = gagliardo_with_log(GridFunction(dom, w), fp)
            log_lam = log_pow - m * math.log(float(np.max(np.abs(w))))
            if best is None or log_lam < best[0]:
                best = (log_lam, w)
    if not any_converged or best is None:
        raise NoConvergence(
            f"no Rayleigh-quotient start converged within {opts.max_iters} iterations per stage"
        )
    log_lam, w = best
    if log_lam > MAX_LOG:
        raise Overflow(f"lambda exponent {log_lam:.1f} exceeds the representable range")
    # canonical sign: positive at the max of |u|, then sup-normalize
    peak = int(np.argmax(np.abs(w)))
    w = w * (math.copysign(1.0, w[peak]) / abs(w[peak]))
    return math.exp(log_lam), GridFunction(dom, w)
