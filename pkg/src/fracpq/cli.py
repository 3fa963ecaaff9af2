"""Command-line front end.

One JSON config file per invocation; the subcommand picks which blocks are
read.  Every block is parsed strictly (unknown keys are errors) and fully
validated before any kernel is built, so a typo'd exponent name can never
burn minutes of compute.  All floating output goes through the 17-digit
formatter, making reruns byte-identical for a fixed config and seed.

Exit codes: 0 success, 2 bad configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from ._fmt import dump_json, g17
from .asymptotics import SweepConfig, run_sweep
from .domain import (
    GridDomain,
    GridFunction,
    ShapeSpec,
    build_domain,
    dump_domain_csv,
    dump_mask,
    shape_from_dict,
)
from .energy import EnergySpec, rayleigh_min
from .errors import ConfigError, FracpqError
from .seminorm import FracParams
from .solver import SolverOpts, solve_least_energy
from .viscosity import limit_residual

_SOLVER_KEYS = ("max_iters", "grad_tol", "ls_shrink", "ls_c1", "r_schedule", "init", "seed")


def _require(block: dict, ctx: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{ctx} must be a JSON object, got {type(block).__name__}")
    unknown = set(block) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{ctx}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(block)
    if missing:
        raise ConfigError(f"{ctx}: missing keys {sorted(missing)}")


def _number(block: dict, ctx: str, key: str) -> float:
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{ctx}.{key} must be a number, got {v!r}")
    return float(v)


def _parse_domain(block: dict) -> tuple[ShapeSpec, float | None, int | None]:
    _require(block, "domain", ("shape",), ("h", "collar_width"))
    try:
        shape = shape_from_dict(block["shape"])
    except (ValueError, FracpqError) as exc:
        raise ConfigError(f"domain.shape: {exc}") from exc
    h = _number(block, "domain", "h") if "h" in block else None
    collar = None
    if "collar_width" in block and block["collar_width"] is not None:
        collar = int(_number(block, "domain", "collar_width"))
    return shape, h, collar


def _parse_solver(block: dict, ctx: str, seed_override: int | None) -> SolverOpts:
    _require(block, ctx, (), _SOLVER_KEYS)
    kw = dict(block)
    if "r_schedule" in kw and kw["r_schedule"] is not None:
        kw["r_schedule"] = tuple(float(r) for r in kw["r_schedule"])
    if seed_override is not None:
        kw["seed"] = seed_override
    try:
        return SolverOpts(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{ctx}: {exc}") from exc


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def _write_solution_csv(u: GridFunction, path: Path) -> None:
    dom = u.domain
    xy = dom.interior_xy
    with open(path, "w") as f:
        f.write("node_index,x,y,value\n")
        for k, idx in enumerate(dom.interior_idx):
            f.write(f"{idx},{g17(xy[k, 0])},{g17(xy[k, 1])},{g17(u.values[k])}\n")


def _read_solution_csv(path: Path, dom: GridDomain) -> GridFunction:
    lines = path.read_text().splitlines()
    if not lines or lines[0] != "node_index,x,y,value":
        raise ConfigError(f"{path}: expected a solution CSV with header node_index,x,y,value")
    if len(lines) - 1 != dom.n_interior:
        raise ConfigError(
            f"{path}: {len(lines) - 1} rows do not match {dom.n_interior} interior nodes"
        )
    values = np.empty(dom.n_interior)
    for k, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != 4:
            raise ConfigError(f"{path}: malformed row {k + 2}")
        if int(cells[0]) != int(dom.interior_idx[k]):
            raise ConfigError(
                f"{path}: node {cells[0]} at row {k + 2} does not match the domain "
                f"(expected {int(dom.interior_idx[k])}); was it computed on the same grid?"
            )
        values[k] = float(cells[3])
    return GridFunction(dom, values)


# ---------------------------------------------------------------------------
# subcommands: each returns a validated plan closure, run after validation


def _cmd_domain(doc: dict, out: Path, _seed: int | None):
    _require(doc, "config", ("domain",))
    shape, h, collar = _parse_domain(doc["domain"])

    def run() -> None:
        dom = build_domain(shape, h, collar)
        print(f"R={g17(dom.inradius)}")
        for idx in dom.deepest:
            x, y = dom.node_xy(int(idx))
            print(f"deepest {int(idx)} {g17(x)} {g17(y)}")
        dump_domain_csv(dom, out / "domain.csv")
        dump_mask(dom, out / "domain_mask.txt")

    return run


def _cmd_eigen(doc: dict, out: Path, seed: int | None):
    _require(doc, "config", ("domain", "eigen"))
    shape, h, collar = _parse_domain(doc["domain"])
    block = doc["eigen"]
    _require(block, "eigen", ("s", "m_list"), ("solver",))
    s = _number(block, "eigen", "s")
    ms = block["m_list"]
    if not isinstance(ms, list) or not ms:
        raise ConfigError("eigen.m_list must be a nonempty list of exponents")
    ms = [float(m) for m in ms]
    opts = _parse_solver(block.get("solver", {}), "eigen.solver", seed)
    fps = [FracParams(s=s, m=m) for m in ms]  # validates s and every m up front

    def run() -> None:
        dom = build_domain(shape, h, collar)
        target = dom.inradius**-s
        with open(out / "eigen.csv", "w") as f:
            f.write("m,lambda_root,target\n")
            for m, fp in zip(ms, fps):
                lam, _ = rayleigh_min(fp, dom, opts)
                f.write(f"{g17(m)},{g17(lam ** (1.0 / m))},{g17(target)}\n")
        dump_json(
            {"s": s, "m_list": ms, "inradius": dom.inradius, "target": target},
            out / "eigen.json",
        )

    return run


def _cmd_solve(doc: dict, out: Path, seed: int | None):
    _require(doc, "config", ("domain", "energy"), ("solver",))
    shape, h, collar = _parse_domain(doc["domain"])
    block = doc["energy"]
    _require(block, "energy", ("alpha", "beta", "p", "q", "mu", "case"), ("r",))
    p = _number(block, "energy", "p")
    q = _number(block, "energy", "q")
    r = _number(block, "energy", "r") if "r" in block else 8.0 * max(p, q)
    case = block["case"]
    if not isinstance(case, str):
        raise ConfigError(f"energy.case must be a string, got {case!r}")
    try:
        es = EnergySpec(
            alpha=_number(block, "energy", "alpha"),
            beta=_number(block, "energy", "beta"),
            p=p, q=q, mu=_number(block, "energy", "mu"), r=r, case=case,
        )
    except ValueError as exc:
        raise ConfigError(f"energy: {exc}") from exc
    opts = _parse_solver(doc.get("solver", {}), "solver", seed)

    def run() -> None:
        dom = build_domain(shape, h, collar)
        res = solve_least_energy(es, dom, opts)
        record = {
            "case": es.case, "alpha": es.alpha, "beta": es.beta,
            "p": es.p, "q": es.q, "mu": es.mu, "r": es.r,
            **res.to_record(),
        }
        dump_json(record, out / "solve.json")
        _write_solution_csv(res.u, out / "u.csv")

    return run


def _cmd_sweep(doc: dict, out: Path, seed: int | None):
    _require(doc, "config", ("domain", "sweep"))
    shape, h, collar = _parse_domain(doc["domain"])
    block = doc["sweep"]
    _require(block, "sweep", ("Q", "Lambda", "p_schedule", "alpha", "beta"),
             ("r_multiplier", "solver"))
    ps = block["p_schedule"]
    if not isinstance(ps, list):
        raise ConfigError("sweep.p_schedule must be a list of exponents")
    opts = _parse_solver(block.get("solver", {}), "sweep.solver", seed)
    try:
        cfg = SweepConfig(
            Q=_number(block, "sweep", "Q"),
            Lambda=_number(block, "sweep", "Lambda"),
            p_schedule=tuple(float(p) for p in ps),
            alpha=_number(block, "sweep", "alpha"),
            beta=_number(block, "sweep", "beta"),
            shape=shape, h=h, collar_width=collar,
            r_multiplier=(_number(block, "sweep", "r_multiplier")
                          if "r_multiplier" in block else 8.0),
            solver=opts,
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc

    def run() -> None:
        table = run_sweep(cfg)
        table.write_csv(out / "sweep.csv")
        table.write_json(out / "predictions.json")

    return run


def _cmd_viscosity(doc: dict, out: Path, _seed: int | None):
    _require(doc, "config", ("domain", "viscosity"))
    shape, h, collar = _parse_domain(doc["domain"])
    block = doc["viscosity"]
    _require(block, "viscosity", ("input", "Q", "alpha", "beta"), ("exclude_radius",))
    input_path = Path(str(block["input"]))
    if not input_path.is_file():
        raise ConfigError(f"viscosity.input file {input_path} does not exist")
    Q = _number(block, "viscosity", "Q")
    alpha = _number(block, "viscosity", "alpha")
    beta = _number(block, "viscosity", "beta")
    radius = (_number(block, "viscosity", "exclude_radius")
              if "exclude_radius" in block else None)

    def run() -> None:
        dom = build_domain(shape, h, collar)
        u = _read_solution_csv(input_path, dom)
        rep = limit_residual(u, Q, alpha, beta, radius)
        rep.write_csv(out / "viscosity.csv")
        rep.write_json(out / "viscosity.json")

    return run


_COMMANDS = {
    "domain": _cmd_domain,
    "eigen": _cmd_eigen,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "viscosity": _cmd_viscosity,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fracpq",
        description="Least energy solutions of a fractional (p,q) problem "
                    "and their large-p asymptotics.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap for threaded numeric kernels")
    parser.add_argument("--seed", type=int, default=None,
                        help="overrides every solver seed in the config")
    args = parser.parse_args(argv)

    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        doc = _load_config(args.config)
        out = Path(args.out)
        plan = _COMMANDS[args.command](doc, out, args.seed)
    except (FracpqError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.threads is not None:
            with threadpool_limits(limits=args.threads):
                plan()
        else:
            plan()
    except (FracpqError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
