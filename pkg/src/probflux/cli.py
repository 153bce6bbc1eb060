"""Command-line front end.

Usage::

    probflux <command> [config.json | -] [--strict] [--seed N] [--output PATH]

Exit codes: 0 ok, 2 bad configuration, 3 stability failure (the report is
written to stderr as JSON).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import jsonschema
import numpy as np

from . import fnn, gds, limiters, markov, problems
from .errors import InconsistencyError, InvalidArgumentError, StabilityError, UnsupportedProblemError
from .grid import PeriodicGrid, build_cone, build_periodic
from .schema import COMMANDS, CONFIG_SCHEMA, OUTPUT_SCHEMAS
from .schemes import LimiterSet, Scheme, Velocity

EXIT_OK, EXIT_CONFIG, EXIT_STABILITY = 0, 2, 3
TABULAR = ("solve", "convergence", "gds")


class ConfigError(Exception):
    pass


# config ingestion ------------------------------------------------------------

def _key_line(text: str, path) -> int:
    """Best-effort line number of the JSON key at ``path``."""
    lines = text.splitlines()
    line = 0
    for part in path:
        if not isinstance(part, str):
            continue
        needle = json.dumps(part) + ":"
        needle_sp = json.dumps(part) + " :"
        for k in range(line, len(lines)):
            if needle in lines[k] or needle_sp in lines[k]:
                line = k
                break
    return line + 1


def load_config(text: str, source: str = "<config>") -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    # report the error that appears first in the document
    errors = sorted(validator.iter_errors(cfg), key=lambda e: (_key_line(text, e.path), len(e.path)))
    if errors:
        err = errors[0]
        where = "/".join(map(str, err.path)) or "<root>"
        raise ConfigError(f"{source}:{_key_line(text, err.path)}: {where}: {err.message}")
    return cfg


# builders --------------------------------------------------------------------

def build_law(cfg: dict):
    prob = cfg.get("problem", {})
    if prob.get("law", "advection") == "burgers":
        return problems.burgers()
    return problems.linear_advection(prob.get("a", cfg.get("scheme", {}).get("a", 1.0)))


def build_scheme(cfg: dict) -> Scheme:
    sc = cfg.get("scheme")
    if sc is None:
        raise ConfigError("a scheme block is required for this command")
    law = build_law(cfg)
    a = sc.get("a", cfg.get("problem", {}).get("a", 1.0))
    lim = LimiterSet(*sc.get("limiters", (0.0, 0.0, 0.0, 0.0)))
    speed = None if law.linear_speed is not None else law.speed
    return Scheme(sc["name"], float(a), lim, speed, sc.get("averaging", "mean"))


def build_grid(cfg: dict):
    g = cfg.get("grid")
    if g is None:
        raise ConfigError("a grid block is required for this command")
    if g["mode"] == "cone":
        return build_cone(g["n"], g["h"], g["tau"], g.get("x0", 0.0), g.get("t0", 0.0))
    return build_periodic(g["m"], g["h"], g["tau"], g.get("x0", 0.0))


def build_profile(block: dict | None, period: float):
    block = block or {"kind": "sine"}
    kind = block["kind"]
    if kind == "sine":
        return problems.sine_profile(block.get("period", period), block.get("amplitude", 1.0), block.get("offset", 0.0))
    if kind == "gauss":
        return problems.gauss_profile(block.get("center", 0.0), block.get("width", 0.1), block.get("amplitude", 1.0))
    if kind == "riemann":
        return problems.RiemannProblem(problems.burgers(), block.get("u_left", 1.0), block.get("u_right", 0.0),
                                       block.get("x_jump", 0.0)).u0
    value = float(block.get("value", 0.0))
    return lambda x: np.full(np.shape(x), value)


def initial_layer(cfg: dict, grid) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(grid, PeriodicGrid):
        x, period = grid.x, grid.period
    else:
        x, period = grid.layer_x(0), 1.0
    u0 = build_profile(cfg.get("problem", {}).get("u0"), period)
    return x, np.asarray(u0(x), dtype=float)


def default_steps(cfg: dict, grid) -> int:
    if "steps" in cfg:
        return int(cfg["steps"])
    if isinstance(grid, PeriodicGrid):
        raise ConfigError("periodic runs need 'steps'")
    return grid.n


# commands --------------------------------------------------------------------

def cmd_solve(cfg, args):
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    _, d0 = initial_layer(cfg, grid)
    steps = default_steps(cfg, grid)
    layers = markov.evolve_deterministic(d0, scheme, grid, steps, strict=args.strict)
    lam = grid.lam(0)
    rows = []
    for j, u in enumerate(layers):
        if isinstance(grid, PeriodicGrid):
            idx, xs, t = np.arange(grid.m), grid.x, j * grid.tau
        else:
            idx, xs, t = grid.layer_indices(j), grid.layer_x(j), grid.times[j]
        for i, x, val in zip(idx, xs, u):
            rows.append({"layer": j, "i": int(i), "x": float(x), "t": float(t), "u": float(val), "lambda": lam})
    return {"lambda": lam, "rows": rows}


def cmd_check(cfg, args):
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    tau = grid.tau if isinstance(grid, PeriodicGrid) else grid.tau_levels[0]
    summary = markov.stability_summary(scheme, tau, grid.h, scheme.a)
    status = EXIT_STABILITY if args.strict and not summary["probabilistic"] else EXIT_OK
    return summary, status


def cmd_mc(cfg, args):
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    _, d0 = initial_layer(cfg, grid)
    mc = cfg.get("mc")
    if mc is None:
        raise ConfigError("an mc block is required for the mc command")
    seed = args.seed if args.seed is not None else mc.get("seed")
    if seed is None:
        raise ConfigError("mc needs a seed (mc.seed or --seed)")
    periodic = isinstance(grid, PeriodicGrid)
    layer = mc.get("layer", cfg.get("steps", grid.n if not periodic else None))
    if layer is None:
        raise ConfigError("periodic mc runs need mc.layer or 'steps'")
    index = mc.get("index", grid.m // 2 if periodic else grid.n)
    det = markov.evolve_deterministic(d0, scheme, grid, layer, strict=args.strict)[layer]
    local = index if periodic else index - layer
    if not 0 <= local < det.size:
        raise ConfigError(f"mc.index {index} is not a point of layer {layer}")
    res = markov.simulate_mc((layer, index), d0, scheme, grid, mc["n_paths"], seed, mc.get("workers", 1))
    dv = float(det[local])
    gap = res.estimate - dv
    if res.std_error and math.isfinite(res.std_error):
        z = gap / res.std_error
    else:
        z = 0.0 if gap == 0 else None
    return {"estimate": res.estimate, "std_error": res.std_error, "deterministic_value": dv, "z_score": z,
            "n_paths": res.n_paths, "seed": int(seed), "layer": int(layer), "index": int(index),
            "lambda": grid.lam(0)}


def cmd_limiters(cfg, args):
    lc = cfg.get("limiters")
    if lc is None:
        raise ConfigError("a limiters block is required for the limiters command")
    v, g2, g3 = float(lc["v"]), float(lc.get("gamma2", 0.0)), float(lc.get("gamma3", 0.0))
    if v == 0:
        raise ConfigError("limiters.v must be nonzero")
    s1 = limiters.solve_gamma1(abs(v), g2)
    s4 = limiters.solve_gamma4(abs(v), g3)
    lim = limiters.equality_limiters(v, g2, g3)
    scheme = Scheme("limiter", v, lim)
    lam = lc.get("lambda")
    if lam is None and "grid" in cfg:
        lam = build_grid(cfg).lam(0)
    feasible = None if lam is None else markov.check_stability(scheme, lam).limiter_feasible
    return {"v": v, "gamma1": s1.gamma, "gamma2": g2, "gamma3": g3, "gamma4": s4.gamma,
            "residual_gamma1": s1.residual, "residual_gamma4": s4.residual,
            "equality_residual": limiters.stability_equality_residual(Velocity(v), lim),
            "cfl_bound": markov.cfl_bound(scheme), "limiter_feasible": feasible, "lambda": lam}


def convergence_rows(scheme: Scheme, law, profile_cfg, levels, horizon: float, lam: float,
                     length: float = 1.0) -> list[dict]:
    """L1 errors against the exact solution on a sequence of periodic grids."""
    rows = []
    for m in levels:
        h = length / m
        grid = build_periodic(m, h, lam * h)
        steps = max(1, int(round(horizon / grid.tau)))
        u0 = build_profile(profile_cfg, length)
        problem = problems.CauchyProblem(law, u0, (0.0, length), horizon)
        final = markov.evolve_deterministic(u0(grid.x), scheme, grid, steps)[-1]
        exact = problems.exact_solution(problem, grid.x, steps * grid.tau)
        rows.append({"m": int(m), "h": h, "steps": steps, "l1_error": problems.l1_error(final, exact, h),
                     "observed_order": None, "lambda": lam})
    orders = problems.observed_orders([r["h"] for r in rows], [r["l1_error"] for r in rows])
    for r, p in zip(rows[1:], orders):
        r["observed_order"] = float(p)
    return rows


def cmd_convergence(cfg, args):
    cc = cfg.get("convergence")
    if cc is None:
        raise ConfigError("a convergence block is required for the convergence command")
    scheme = build_scheme(cfg)
    rows = convergence_rows(scheme, build_law(cfg), cfg.get("problem", {}).get("u0"), cc["levels"],
                            cc["horizon"], cc["lambda"], cc.get("length", 1.0))
    return {"lambda": cc["lambda"], "rows": rows}


def cmd_gds(cfg, args):
    gc = cfg.get("gds")
    if gc is None:
        raise ConfigError("a gds block is required for the gds command")
    grid = build_grid(cfg)
    if not isinstance(grid, PeriodicGrid):
        raise ConfigError("gds runs on a periodic grid")
    scheme = build_scheme(cfg)
    _, mu0 = initial_layer(cfg, grid)
    c = float(gc.get("v0_value", 1.0))
    kind = gc["v0"]
    if kind == "zero":
        def v0(tau, h, m):
            return 0.0
    elif kind == "const":
        def v0(tau, h, m):
            return c
    else:
        def v0(tau, h, m):
            return c * m
    init = gds.TwoScaleState(float(gc.get("h0", 0.0)), mu0)
    traj = gds.evolve_two_scale(init, v0, scheme, grid, gc["slow_step"], gc["substeps"], gc["n_slow"],
                                strict=args.strict)
    lam = grid.lam(0)
    rows = [dict(r, **{"lambda": lam}) for r in gds.trajectory_rows(traj)]
    return {"lambda": lam, "rows": rows}


def _target(block: dict):
    kind = block["kind"]
    if kind == "constant":
        value = float(block.get("value", 0.0))
        return lambda pts: np.full(len(pts), value)
    if kind == "gaussian":
        amp, width = float(block.get("amplitude", 1.0)), float(block.get("width", 1.0))
        center = block.get("center")

        def gauss(pts):
            c = np.zeros(pts.shape[1]) if center is None else np.asarray(center, dtype=float)
            return amp * np.exp(-np.sum((pts - c) ** 2, axis=1) / width ** 2)
        return gauss
    if "network" not in block:
        raise ConfigError("target kind 'network' needs target.network")
    other = fnn.SigmoidalNetwork.from_json(block["network"])
    return lambda pts: fnn.eval_fnn(other, pts)


def cmd_fnn(cfg, args):
    fc = cfg.get("fnn")
    if fc is None:
        raise ConfigError("an fnn block is required for the fnn-approx command")
    seed = args.seed if args.seed is not None else fc.get("seed")
    if seed is None:
        raise ConfigError("fnn-approx needs a seed (fnn.seed or --seed)")
    net = fnn.SigmoidalNetwork.from_json(fc["network"])
    est, err = fnn.l1_distance(net, _target(fc["target"]), fc["box"], fc["n_samples"], seed, fc.get("workers", 1))
    return {"estimate": est, "std_error": err, "n_samples": int(fc["n_samples"]), "seed": int(seed),
            "lambda": None}


HANDLERS = {
    "solve": cmd_solve,
    "check": cmd_check,
    "mc": cmd_mc,
    "limiters": cmd_limiters,
    "convergence": cmd_convergence,
    "gds": cmd_gds,
    "fnn-approx": cmd_fnn,
}


# emission --------------------------------------------------------------------

def _clean(obj):
    """Make ``obj`` strict-JSON: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        cols = list(rows[0])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def render(command: str, result, fmt: str) -> str:
    if fmt == "csv":
        if command not in TABULAR:
            raise ConfigError(f"format 'csv' is not available for {command}; use json")
        return to_csv(result["rows"])
    return to_json(result)


# entry point -----------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="probflux", description="Explicit schemes read as Markov chains.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", nargs="?", default="-", help="JSON config file, or - for stdin")
    p.add_argument("--strict", action="store_true", help="fail with exit code 3 on non-probabilistic schemes")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p.add_argument("--output", default=None, help="write here instead of output.path / stdout")
    return p


def _read(path: str) -> tuple[str, str]:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    with open(path, encoding="utf-8") as fh:
        return fh.read(), path


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        text, source = _read(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(text, source)
        if cfg["command"] != args.command:
            raise ConfigError(f"{source}:{_key_line(text, ['command'])}: command: config says "
                              f"{cfg['command']!r} but {args.command!r} was requested")
        out_cfg = cfg.get("output", {})
        fmt = out_cfg.get("format", "csv" if args.command in TABULAR else "json")
        result = HANDLERS[args.command](cfg, args)
        status = EXIT_OK
        if isinstance(result, tuple):
            result, status = result
        payload = render(args.command, result, fmt)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidArgumentError, InconsistencyError, UnsupportedProblemError) as exc:
        print(f"error: {source}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            rep = exc.report
            print(to_json({"probabilistic": rep.probabilistic, "violated_entries": rep.violated_entries,
                           "cfl_bound": rep.cfl_bound, "limiter_feasible": rep.limiter_feasible,
                           "covariance_nonnegative": rep.covariance_nonnegative,
                           "covariance_bound": rep.covariance_bound, "lambda": rep.lam}),
                  end="", file=sys.stderr)
        return EXIT_STABILITY
    path = args.output or out_cfg.get("path")
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return status


if __name__ == "__main__":
    sys.exit(main())
