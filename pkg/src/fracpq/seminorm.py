"""Discrete Gagliardo seminorms, weak pairings, and slope operators.

The seminorm is the midpoint quadrature of the double integral over node
pairs (interior plus collar) with kernel |x-y|^(-N-sm), the diagonal pair
excluded, plus an analytic radial tail for the far field beyond the
truncation radius T where u vanishes identically.

Powers |u_i - u_j|^m are always formed as exp(m * log|.|) with differences
below 1e-300 treated as zero summands; sums are accumulated with numpy's
pairwise summation and totals are carried in log space so that ratios of
huge m-th powers stay representable. Since u is identically zero on the
collar, interior-collar pairs collapse to one per-interior-node coefficient
(sum of kernel weights over collar neighbors), which the pair kernel caches
per (s, m); hot loops then touch only interior-interior pairs.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .domain import DIM, GridDomain, GridFunction
from .errors import CollarTooThin, DomainMismatch, NotInterior, Overflow

LOG_FLOOR = 1e-300  # differences below this are zero summands
MAX_LOG = 700.0  # exp beyond this is signaled as Overflow
_BLOCK = 256


def sphere_measure(n: int) -> float:
    """Surface measure of the unit sphere S^(n-1) in R^n (2*pi for n = 2)."""
    return float(2.0 * math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n)))


@dataclass(frozen=True)
class FracParams:
    """One seminorm's parameters: order s, exponent m, truncation, tail flag.

    T = None resolves to the domain's interior bounding-box diagonal at use
    time (the smallest radius that truncates no interior-interior pair).
    """

    s: float
    m: float
    T: float | None = None
    tail_correction: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"order s must lie in (0,1), got {self.s}")
        if not self.m > 1.0:
            raise ValueError(f"exponent m must exceed 1, got {self.m}")
        if self.T is not None and not self.T > 0:
            raise ValueError(f"truncation radius must be positive, got {self.T}")

    def resolve_T(self, domain: GridDomain) -> float:
        diam = max(domain.interior_bbox_diameter, domain.h)
        T = diam if self.T is None else float(self.T)
        if T < diam * (1.0 - 1e-12):
            raise ValueError(
                f"truncation radius T={T:.6g} below the interior bounding-box "
                f"diameter {diam:.6g}; interior pairs would be dropped"
            )
        if domain.collar_width * domain.h < T * (1.0 - 1e-12):
            raise CollarTooThin(
                f"collar {domain.collar_width} nodes * h covers "
                f"{domain.collar_width * domain.h:.6g} < T = {T:.6g}"
            )
        return T


class PairKernel:
    """Node-pair structure of one (domain, T): distances and collar weights.

    Stores the unordered interior-interior pairs with |x_a - x_b| <= T and,
    for each interior node, the log-distances to its collar neighbors within
    T. Per-(s, m) arrays (pair log-weights, combined collar+tail node
    coefficients) are cached on demand.
    """

    def __init__(self, domain: GridDomain, T: float):
        self.domain = domain
        self.T = float(T)
        self.h = domain.h
        self.n_interior = domain.n_interior
        self._sm_cache: dict[tuple, np.ndarray] = {}
        self._build_pairs()

    def _build_pairs(self) -> None:
        dom = self.domain
        xy_i = dom.interior_xy
        collar_flat = np.flatnonzero(~dom.interior_mask.ravel())
        xy_c = dom.all_xy[collar_flat]
        n = self.n_interior
        T = self.T

        aa, bb, dd = [], [], []
        for lo in range(0, n, _BLOCK):
            hi = min(lo + _BLOCK, n)
            d = np.hypot(
                xy_i[lo:hi, None, 0] - xy_i[None, :, 0],
                xy_i[lo:hi, None, 1] - xy_i[None, :, 1],
            )
            a_rel, b_idx = np.nonzero((d <= T) & (np.arange(n)[None, :] > np.arange(lo, hi)[:, None]))
            aa.append(a_rel + lo)
            bb.append(b_idx)
            dd.append(d[a_rel, b_idx])
        self.ii_a = np.concatenate(aa).astype(np.int32)
        self.ii_b = np.concatenate(bb).astype(np.int32)
        self.ii_logd = np.log(np.concatenate(dd))

        ca, cd = [], []
        for lo in range(0, n, _BLOCK):
            hi = min(lo + _BLOCK, n)
            d = np.hypot(
                xy_i[lo:hi, None, 0] - xy_c[None, :, 0],
                xy_i[lo:hi, None, 1] - xy_c[None, :, 1],
            )
            a_rel, c_idx = np.nonzero(d <= T)
            ca.append(a_rel + lo)
            cd.append(d[a_rel, c_idx])
        self.ic_a = np.concatenate(ca).astype(np.int32)
        self.ic_logd = np.log(np.concatenate(cd))

    def pair_log_weight(self, s: float, m: float) -> np.ndarray:
        """log(|x_a - x_b|^(-N-sm) * h^(2N)) for the interior-interior pairs."""
        key = ("w", s, m)
        if key not in self._sm_cache:
            self._sm_cache[key] = (
                -(DIM + s * m) * self.ii_logd + 2 * DIM * math.log(self.h)
            )
        return self._sm_cache[key]

    def log_node_coef(self, s: float, m: float, tail: bool) -> np.ndarray:
        """log c_i with sum_i |u_i|^m c_i the collar + tail part of [u]^m.

        c_i = 2 h^(2N) sum_{j collar, d<=T} d^(-N-sm)  [ordered pair doubling]
            + 2 omega_{N-1} T^(-sm)/(sm) h^N           [if tail enabled]
        """
        key = ("c", s, m, tail)
        if key not in self._sm_cache:
            k = np.bincount(
                self.ic_a,
                weights=np.exp(-(DIM + s * m) * self.ic_logd),
                minlength=self.n_interior,
            )
            coef = 2.0 * self.h ** (2 * DIM) * k
            if tail:
                coef = coef + (
                    2.0 * sphere_measure(DIM) * self.T ** (-s * m) / (s * m) * self.h**DIM
                )
            self._sm_cache[key] = np.log(coef)
        return self._sm_cache[key]


_kernel_cache: "weakref.WeakKeyDictionary[GridDomain, dict[float, PairKernel]]" = (
    weakref.WeakKeyDictionary()
)


def get_kernel(domain: GridDomain, T: float) -> PairKernel:
    per_domain = _kernel_cache.setdefault(domain, {})
    if T not in per_domain:
        per_domain[T] = PairKernel(domain, T)
    return per_domain[T]


def _kernel_for(u: GridFunction, fp: FracParams) -> PairKernel:
    return get_kernel(u.domain, fp.resolve_T(u.domain))


def _log_abs(x: np.ndarray) -> np.ndarray:
    """log|x| with the sub-floor values mapped to -inf (zero summands)."""
    ax = np.abs(x)
    with np.errstate(divide="ignore"):
        out = np.log(np.where(ax < LOG_FLOOR, 0.0, ax))
    return out


LOG2 = math.log(2.0)


def _log_pow_terms(
    u: GridFunction, fp: FracParams, kern: PairKernel
) -> tuple[np.ndarray, np.ndarray]:
    """Log summands of [u]_{s,m}^m: pair terms (unordered, doubled) + node terms."""
    s, m = fp.s, fp.m
    du = u.values[kern.ii_a] - u.values[kern.ii_b]
    pair_terms = m * _log_abs(du) + kern.pair_log_weight(s, m) + LOG2
    node_terms = m * _log_abs(u.values) + kern.log_node_coef(s, m, fp.tail_correction)
    return pair_terms, node_terms


def gagliardo_with_log(u: GridFunction, fp: FracParams) -> tuple[float, float]:
    """([u]_{s,m}, log [u]_{s,m}^m); the log is -inf for u == 0."""
    kern = _kernel_for(u, fp)
    pair_terms, node_terms = _log_pow_terms(u, fp, kern)
    log_pow = float(logsumexp(np.concatenate([pair_terms, node_terms])))
    return math.exp(log_pow / fp.m), log_pow


def gagliardo(u: GridFunction, fp: FracParams) -> float:
    return gagliardo_with_log(u, fp)[0]


def pairing(u: GridFunction, v: GridFunction, fp: FracParams) -> float:
    """Weak pairing <(-Delta_m)^s u, v>: the Gateaux derivative of (1/m)[.]^m at u."""
    if v.domain is not u.domain:
        raise DomainMismatch("pairing requires functions on the same domain")
    kern = _kernel_for(u, fp)
    s, m = fp.s, fp.m
    du = u.values[kern.ii_a] - u.values[kern.ii_b]
    dv = v.values[kern.ii_a] - v.values[kern.ii_b]
    pair_log = (m - 1.0) * _log_abs(du) + kern.pair_log_weight(s, m) + LOG2 + _log_abs(dv)
    pair_sign = np.sign(du) * np.sign(dv)
    node_log = (
        (m - 1.0) * _log_abs(u.values)
        + kern.log_node_coef(s, m, fp.tail_correction)
        + _log_abs(v.values)
    )
    node_sign = np.sign(u.values) * np.sign(v.values)
    logs = np.concatenate([pair_log, node_log])
    signs = np.concatenate([pair_sign, node_sign])
    return _signed_exp_sum(logs, signs)


def _signed_exp_sum(logs: np.ndarray, signs: np.ndarray) -> float:
    """sum_k signs_k * exp(logs_k) via one log-sum-exp per sign group."""
    total = 0.0
    for sign in (1.0, -1.0):
        grp = logs[signs == sign]
        if grp.size:
            lse = float(logsumexp(grp))
            if lse > MAX_LOG:
                raise Overflow(f"signed sum component exp({lse:.1f}) not representable")
            total += sign * math.exp(lse)
    return total


def seminorm_pow_and_grad(
    u: GridFunction, fp: FracParams
) -> tuple[float, np.ndarray]:
    """(log [u]_{s,m}^m, gradient of (1/m)[u]_{s,m}^m w.r.t. interior values).

    One shared exp pass: the magnitude exp((m-1)log|du| + logw) feeds both
    the value (times |du|) and the gradient (times sign(du)).
    """
    kern = _kernel_for(u, fp)
    s, m = fp.s, fp.m
    du = u.values[kern.ii_a] - u.values[kern.ii_b]
    logdu = _log_abs(du)
    t = (m - 1.0) * logdu + kern.pair_log_weight(s, m) + LOG2
    if t.size and t.max() > MAX_LOG:
        raise Overflow("pair kernel term not representable")
    mag = np.exp(t)  # 2 |du|^(m-1) w_ab
    signed = mag * np.sign(du)
    n = kern.n_interior
    grad = np.bincount(kern.ii_a, weights=signed, minlength=n) - np.bincount(
        kern.ii_b, weights=signed, minlength=n
    )
    logu = _log_abs(u.values)
    tn = (m - 1.0) * logu + kern.log_node_coef(s, m, fp.tail_correction)
    node_mag = np.exp(tn)
    grad += node_mag * np.sign(u.values)
    log_pow = float(
        logsumexp(np.concatenate([t + logdu, tn + logu]))
    )
    return log_pow, grad


def pointwise_Lsm(u: GridFunction, i: int, fp: FracParams) -> float:
    """Pointwise fractional m-Laplacian at interior node i.

    2 sum_{0<|x_j-x_i|<=T} |u_j-u_i|^(m-2)(u_j-u_i) |x_j-x_i|^(-N-sm) h^N
    minus the tail 2|u_i|^(m-2)u_i omega T^(-sm)/(sm) when enabled.
    """
    dom = u.domain
    if not dom.is_interior(int(i)):
        raise NotInterior(f"node {i} is not interior")
    T = fp.resolve_T(dom)
    s, m = fp.s, fp.m
    xi, yi = dom.node_xy(int(i))
    xy = dom.all_xy
    d = np.hypot(xy[:, 0] - xi, xy[:, 1] - yi)
    sel = (d > 0) & (d <= T)
    full = u.full().ravel()
    du = full[sel] - u.value_at(int(i))
    logs = (m - 1.0) * _log_abs(du) - (DIM + s * m) * np.log(d[sel]) + (
        math.log(2.0) + DIM * math.log(dom.h)
    )
    signs = np.sign(du)
    total = _signed_exp_sum(logs, signs)
    if fp.tail_correction:
        ui = u.value_at(int(i))
        if abs(ui) >= LOG_FLOOR:
            tail = 2.0 * sphere_measure(DIM) * T ** (-s * m) / (s * m)
            total -= tail * math.exp((m - 1.0) * math.log(abs(ui))) * np.sign(ui)
    return total


# ---------------------------------------------------------------------------
# Hoelder seminorm and slope operators (no kernel truncation: all pairs)


def holder_seminorm(u: GridFunction, s: float) -> tuple[float, tuple[int, int]]:
    """(max over node pairs of |u_i-u_j|/|x_i-x_j|^s, first attaining pair).

    Pairs run over interior union collar; both-collar pairs carry quotient 0,
    so scanning interior-vs-all covers every candidate. The attaining pair is
    reported as flat indices (i, j), i < j, lexicographically first among the
    exact maximizers.
    """
    if not 0.0 < s <= 1.0:
        raise ValueError(f"order s must lie in (0,1], got {s}")
    dom = u.domain
    full = u.full().ravel()
    xy = dom.all_xy
    int_idx = dom.interior_idx
    best = 0.0
    block_best = []
    for lo in range(0, int_idx.size, _BLOCK):
        sub = int_idx[lo : lo + _BLOCK]
        q = _quotient_block(full, xy, sub, s)
        block_best.append(q.max(initial=0.0))
        best = max(best, block_best[-1])
    if best == 0.0:
        return 0.0, (0, 1)
    pair = None
    for k, lo in enumerate(range(0, int_idx.size, _BLOCK)):
        if block_best[k] != best:
            continue
        sub = int_idx[lo : lo + _BLOCK]
        q = _quotient_block(full, xy, sub, s)
        rows, cols = np.nonzero(q == best)
        ii = sub[rows]
        jj = cols
        lohi = np.sort(np.column_stack([ii, jj]), axis=1)
        keys = lohi[:, 0] * dom.n_nodes + lohi[:, 1]
        cand = lohi[np.argmin(keys)]
        cand_pair = (int(cand[0]), int(cand[1]))
        if pair is None or cand_pair < pair:
            pair = cand_pair
    return float(best), pair


def _quotient_block(
    full: np.ndarray, xy: np.ndarray, sub: np.ndarray, s: float
) -> np.ndarray:
    d = np.hypot(
        xy[sub, None, 0] - xy[None, :, 0], xy[sub, None, 1] - xy[None, :, 1]
    )
    dv = np.abs(full[sub, None] - full[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        q = dv / d**s
    q[d == 0.0] = 0.0
    return q


def upper_lower_slope(u: GridFunction, i: int, s: float) -> tuple[float, float]:
    """(L_s^+ u, L_s^- u) at interior node i: max/min of (u_j-u_i)/|x_j-x_i|^s."""
    if not 0.0 < s <= 1.0:
        raise ValueError(f"order s must lie in (0,1], got {s}")
    dom = u.domain
    if not dom.is_interior(int(i)):
        raise NotInterior(f"node {i} is not interior")
    xi, yi = dom.node_xy(int(i))
    xy = dom.all_xy
    d = np.hypot(xy[:, 0] - xi, xy[:, 1] - yi)
    sel = d > 0
    full = u.full().ravel()
    q = (full[sel] - u.value_at(int(i))) / d[sel] ** s
    return float(q.max()), float(q.min())
