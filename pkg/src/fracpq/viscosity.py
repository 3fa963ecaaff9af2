"""Limit-equation diagnostics for computed solutions.

As p -> infinity the Euler-Lagrange structure degenerates into slope
operators: at a node i,

    L_s^+ u = max_j (u_j - u_i)/|x_j - x_i|^s,   L_s^- u = min_j (...),

and away from the max point a limit function should balance

    max{ L_alpha^+ u, (L_beta^+ u)^Q } = max{ -L_alpha^- u, (-L_beta^- u)^Q }.

The exact limit object is not computable in closed form, so nothing here
asserts residual zero; the report exists for trend comparisons across p.
The finite-m counterpart of the slope operators (the (m-1)-th root of the
one-sided kernel sums) is evaluated by slope_limit_check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from ._fmt import dump_json, g17
from .domain import DIM, GridDomain, GridFunction
from .energy import argmax_set
from .errors import DegenerateInput, NotInterior
from .seminorm import LOG_FLOOR, upper_lower_slope


@dataclass(frozen=True)
class ViscosityReport:
    """Per-node slope fields and the max-equals-max residual.

    Arrays are aligned with domain.interior_idx.  The residual is NaN at
    excluded nodes (argmax neighborhood plus nodes failing the positive-base
    precondition, the latter also listed in `flagged`); summary statistics
    run over the finite entries.
    """

    domain: GridDomain
    l_alpha_plus: np.ndarray
    l_alpha_minus: np.ndarray
    l_beta_plus: np.ndarray
    l_beta_minus: np.ndarray
    residual: np.ndarray
    excluded: tuple[int, ...]  # flat indices, ascending
    flagged: tuple[int, ...]
    median_abs: float
    max_abs: float

    def write_csv(self, path: str | Path) -> None:
        dom = self.domain
        xy = dom.interior_xy
        exc = np.isin(dom.interior_idx, np.asarray(self.excluded, dtype=np.int64))
        flg = np.isin(dom.interior_idx, np.asarray(self.flagged, dtype=np.int64))
        with open(path, "w") as f:
            f.write("node_index,x,y,l_alpha_plus,l_alpha_minus,l_beta_plus,"
                    "l_beta_minus,residual,excluded,flagged\n")
            for k, idx in enumerate(dom.interior_idx):
                res = "" if math.isnan(self.residual[k]) else g17(self.residual[k])
                f.write(
                    f"{idx},{g17(xy[k, 0])},{g17(xy[k, 1])},"
                    f"{g17(self.l_alpha_plus[k])},{g17(self.l_alpha_minus[k])},"
                    f"{g17(self.l_beta_plus[k])},{g17(self.l_beta_minus[k])},"
                    f"{res},{int(exc[k])},{int(flg[k])}\n"
                )

    def summary(self) -> dict:
        return {
            "n_interior": self.domain.n_interior,
            "n_excluded": len(self.excluded),
            "n_flagged": len(self.flagged),
            "median_abs_residual": self.median_abs,
            "max_abs_residual": self.max_abs,
        }

    def write_json(self, path: str | Path) -> None:
        dump_json(self.summary(), path)


def limit_residual(
    u: GridFunction,
    Q: float,
    alpha: float,
    beta: float,
    exclude_radius: float | None = None,
) -> ViscosityReport:
    """Evaluate the slope fields and the max-equals-max residual of u.

    Nodes within exclude_radius (default 3h) of the argmax set are excluded:
    the equation cannot hold at the sup-norm Dirac.  Off that neighborhood a
    nonnegative u with zero exterior has L_beta^+ u > 0 and -L_beta^- u > 0;
    nodes where the discretized field violates this are excluded too and
    reported as flagged, since (.)^Q is only taken on positive bases.
    """
    if not (Q > 0.0 and math.isfinite(Q)):
        raise ValueError(f"Q must be positive and finite, got {Q}")
    for name, s in (("alpha", alpha), ("beta", beta)):
        if not 0.0 < s < 1.0:
            raise ValueError(f"{name} must lie in (0,1), got {s}")
    dom = u.domain
    if exclude_radius is None:
        exclude_radius = 3.0 * dom.h
    if not (exclude_radius >= 0.0 and math.isfinite(exclude_radius)):
        raise ValueError(f"exclude_radius must be nonnegative, got {exclude_radius}")
    if float(u.values.max(initial=-math.inf)) <= 0.0:
        raise DegenerateInput("limit residual needs a function positive somewhere")

    gamma, _ = argmax_set(u)
    gamma_xy = np.array([dom.node_xy(i) for i in gamma])
    xy = dom.interior_xy
    near = np.zeros(dom.n_interior, dtype=bool)
    for gx, gy in gamma_xy:
        near |= np.hypot(xy[:, 0] - gx, xy[:, 1] - gy) <= exclude_radius + 1e-12 * dom.h

    full = u.full().ravel()
    all_xy = dom.all_xy
    n = dom.n_interior
    lap = np.empty(n)
    lam = np.empty(n)
    lbp = np.empty(n)
    lbm = np.empty(n)
    for k in range(n):
        xi, yi = xy[k]
        d = np.hypot(all_xy[:, 0] - xi, all_xy[:, 1] - yi)
        sel = d > 0
        du = full[sel] - u.values[k]
        ds = d[sel]
        qa = du / ds**alpha
        qb = du / ds**beta
        lap[k] = qa.max()
        lam[k] = qa.min()
        lbp[k] = qb.max()
        lbm[k] = qb.min()

    bad = ~near & ((lbp <= 0.0) | (-lbm <= 0.0))
    valid = ~near & ~bad
    res = np.full(n, math.nan)
    res[valid] = np.maximum(lap[valid], lbp[valid] ** Q) - np.maximum(
        -lam[valid], (-lbm[valid]) ** Q
    )
    finite = res[valid]
    excluded = np.union1d(dom.interior_idx[near | bad],
                          np.asarray(gamma, dtype=np.int64))
    return ViscosityReport(
        domain=dom,
        l_alpha_plus=lap,
        l_alpha_minus=lam,
        l_beta_plus=lbp,
        l_beta_minus=lbm,
        residual=res,
        excluded=tuple(int(i) for i in excluded),
        flagged=tuple(int(i) for i in dom.interior_idx[bad]),
        median_abs=float(np.median(np.abs(finite))) if finite.size else 0.0,
        max_abs=float(np.max(np.abs(finite))) if finite.size else 0.0,
    )


SLOPE_COLUMNS = ("m", "a_m", "b_m", "l_plus", "neg_l_minus", "err_plus", "err_minus")


@dataclass(frozen=True)
class SlopeRow:
    m: float
    a_m: float
    b_m: float
    l_plus: float
    neg_l_minus: float
    err_plus: float
    err_minus: float

    def cells(self) -> list[str]:
        return [g17(getattr(self, c)) for c in SLOPE_COLUMNS]


@dataclass(frozen=True)
class SlopeTable:
    x: int
    s: float
    rows: tuple[SlopeRow, ...]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w") as f:
            f.write(",".join(SLOPE_COLUMNS) + "\n")
            for row in self.rows:
                f.write(",".join(row.cells()) + "\n")


def _one_sided_sum(u: GridFunction, x: int, s: float, m: float, sign: int) -> float:
    """(2 sum_j [(u_j-u_i) of the given sign]^(m-1) d^(-N-sm) h^N)^(1/(m-1))."""
    dom = u.domain
    xi, yi = dom.node_xy(int(x))
    all_xy = dom.all_xy
    d = np.hypot(all_xy[:, 0] - xi, all_xy[:, 1] - yi)
    sel = d > 0
    du = sign * (u.full().ravel()[sel] - u.value_at(int(x)))
    keep = du > LOG_FLOOR
    if not keep.any():
        return 0.0
    logs = (
        (m - 1.0) * np.log(du[keep])
        - (DIM + s * m) * np.log(d[sel][keep])
        + math.log(2.0)
        + DIM * math.log(dom.h)
    )
    return math.exp(float(logsumexp(logs)) / (m - 1.0))


def slope_limit_check(
    u_family: list[tuple[float, GridFunction]], s: float, x: int
) -> SlopeTable:
    """Finite-m one-sided kernel sums at node x against the slope operators.

    For each (m, phi) the table reports A_m (positive part) and B_m (negative
    part) next to L_s^+ phi(x) and -L_s^- phi(x); the differences shrink as m
    grows when the family is held fixed.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"order s must lie in (0,1), got {s}")
    if not u_family:
        raise ValueError("u_family must be nonempty")
    ms = [m for m, _ in u_family]
    if ms != sorted(ms) or len(set(ms)) != len(ms):
        raise ValueError(f"m values must be strictly increasing, got {ms}")
    rows = []
    for m, phi in u_family:
        if not m > 1.0:
            raise ValueError(f"m must exceed 1, got {m}")
        if not phi.domain.is_interior(int(x)):
            raise NotInterior(f"node {x} is not interior")
        lp, lm = upper_lower_slope(phi, int(x), s)
        a_m = _one_sided_sum(phi, int(x), s, m, +1)
        b_m = _one_sided_sum(phi, int(x), s, m, -1)
        rows.append(SlopeRow(
            m=float(m),
            a_m=a_m,
            b_m=b_m,
            l_plus=lp,
            neg_l_minus=-lm,
            err_plus=a_m - lp,
            err_minus=b_m - (-lm),
        ))
    return SlopeTable(x=int(x), s=s, rows=tuple(rows))
