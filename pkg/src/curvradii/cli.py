"""Command-line entry point: curve lifting, frame flows, bracket reports,
geodesics, distance reconstruction, the similarity-group model, and the
full verification suite.

Configuration is layered: defaults, then an INI-style config file with one
section per subcommand plus a ``[common]`` section, then command-line
flags.  All randomness is driven by a single seed, so identical
configurations produce byte-identical reports.  Exit codes: 0 on success,
1 when a verification check fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import frames, lifts, reconstruct, sim2, srmetric, verification
from . import geometry as geo
from .errors import ConfigError, CurvradiiError

FLOAT_FMT = "%.12g"


@dataclass
class RunConfig:
    model: str = "euclidean:2"
    seed: int = 2024
    fd_step: float = 1e-5
    rk_step: float = 1e-3
    rank_tol: float = 1e-8
    constraint_tol: float = 1e-6
    output: str = "-"

    def __post_init__(self):
        for name in ("fd_step", "rk_step", "rank_tol", "constraint_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    def build_model(self) -> geo.MetricModel:
        return geo.parse_model(self.model, fd_step=self.fd_step)


_CONFIG_FIELDS = {f.name: f.type for f in fields(RunConfig)}


def load_config(path: Optional[str], section: str,
                overrides: dict) -> RunConfig:
    """Merge defaults, config-file values ([common] then [section]), and
    command-line overrides into a RunConfig."""
    values: dict = {}
    if path:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"bad config file {path}: {exc}") from exc
        for sec in ("common", section):
            if parser.has_section(sec):
                for key, raw in parser.items(sec):
                    values[key] = raw
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    kwargs = {}
    for key, raw in values.items():
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"unknown config field {key!r}")
        try:
            if key in ("model", "output"):
                kwargs[key] = str(raw)
            elif key == "seed":
                kwargs[key] = int(raw)
            else:
                kwargs[key] = float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return RunConfig(**kwargs)


def _open_output(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_rows(cfg: RunConfig, header: list[str], rows) -> None:
    fh, close = _open_output(cfg.output)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([FLOAT_FMT % v if isinstance(v, float) else v
                             for v in row])
    finally:
        if close:
            fh.close()


def _parse_floats(text: str, expected: Optional[int] = None) -> np.ndarray:
    try:
        vals = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc
    if expected is not None and len(vals) != expected:
        raise ConfigError(f"expected {expected} numbers, got {len(vals)}: {text!r}")
    return vals


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_lift(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    try:
        with open(args.input, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            data = np.array([[float(v) for v in row] for row in reader if row])
    except (OSError, ValueError, StopIteration) as exc:
        raise ConfigError(f"cannot read curve CSV {args.input}: {exc}") from exc
    if data.shape[1] != model.dim + 1:
        raise ConfigError(
            f"curve CSV has {data.shape[1] - 1} coordinate columns, "
            f"model '{model.name}' needs {model.dim}")
    curve = geo.SampledCurve(times=data[:, 0], points=data[:, 1:])
    lifted = lifts.lift(model, curve, sign=args.sign,
                        kappa_min=args.kappa_min)
    n = model.dim
    header = (["t"] + [f"x{i+1}" for i in range(n)]
              + [f"V{i+1}" for i in range(n)] + [f"R{i+1}" for i in range(n)]
              + ["Rnorm", "kappa"])
    rows = []
    for t, s in zip(lifted.times, lifted.states):
        rnorm = model.norm(s.x, s.R)
        rows.append([float(t), *map(float, s.x), *map(float, s.V),
                     *map(float, s.R), rnorm, 1.0 / rnorm])
    _write_rows(cfg, header, rows)
    return 0


def cmd_flow(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    n = model.dim
    q0 = lifts.RadiusPoint(x=_parse_floats(args.x, n),
                           V=_parse_floats(args.V, n),
                           R=_parse_floats(args.R, n))
    if not q0.is_valid(model, cfg.constraint_tol):
        raise ConfigError("initial state violates the radius-point constraints")
    times, states, diag = frames.flow_trajectory(
        model, args.field, q0, args.t, args.step or cfg.rk_step)
    header = (["t"] + [f"x{i+1}" for i in range(n)]
              + [f"R{i+1}" for i in range(n)] + [f"V{i+1}" for i in range(n)])
    every = max(1, len(times) // args.max_rows) if args.max_rows else 1
    rows = [[float(times[k]), *map(float, states[k])]
            for k in range(0, len(times), every)]
    _write_rows(cfg, header, rows)
    print(f"max constraint drift {diag.max_pre_projection_drift:.3e}, "
          f"max projection {diag.max_projection_distance:.3e}", file=sys.stderr)
    return 0


def cmd_brackets(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    rng = np.random.default_rng(cfg.seed)
    header = ["point", "bracket21_residual", "rank1", "rank2", "rank3",
              "depth4_residual", "leading_coefficient", "r2_times_sec"]
    rows = []
    for k in range(args.points):
        q = frames.random_radius_point(model, rng)
        z = frames.pack_state(q)
        num = frames.numeric_bracket(frames.frame_field(model, 2),
                                     frames.frame_field(model, 1), z)
        gam = geo.christoffel(model, q.x)
        ref = np.concatenate([q.V, -(gam @ q.R) @ q.V, -(gam @ q.V) @ q.V])
        res21 = float(np.max(np.abs(num - ref)))
        ranks = frames.growth_vector(model, q, cfg.rank_tol)
        res4 = frames.riemann_bracket_residual(model, q)
        c1 = frames.sectional_coefficient(model, q)
        sec = geo.sectional_curvature(model, q.x, q.R, q.V)
        expect = model.inner(q.x, q.R, q.R) * sec
        rows.append([k, res21, ranks[0], ranks[1], ranks[2], res4, c1, expect])
    _write_rows(cfg, header, rows)
    return 0


def cmd_geodesic(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    n = model.dim
    x = _parse_floats(args.x, n)
    v = _parse_floats(args.v, n)
    times, xs, vs = geo.geodesic_trajectory(
        model, geo.TangentPoint(x, v), args.t, args.step or cfg.rk_step)
    header = ["t"] + [f"x{i+1}" for i in range(n)] + ["speed"]
    every = max(1, len(times) // args.max_rows) if args.max_rows else 1
    rows = [[float(times[k]), *map(float, xs[k]), model.norm(xs[k], vs[k])]
            for k in range(0, len(times), every)]
    _write_rows(cfg, header, rows)
    return 0


def cmd_distance(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    n = model.dim
    x0 = _parse_floats(args.x0, n)
    x1 = _parse_floats(args.x1, n)
    profile = srmetric.parse_profile(args.profile)
    kappas = _parse_floats(args.kappas)
    if np.any(kappas <= 0) or np.any(np.diff(kappas) >= 0):
        raise ConfigError("kappa schedule must be positive and decreasing")
    rows_data = reconstruct.distance_report(model, profile, x0, x1, kappas,
                                            step=cfg.rk_step)
    header = ["kappa", "connector_length", "estimate", "lower_bound",
              "deviation_from_geodesic"]
    rows = [[r["kappa"], r["connector_length"], r["estimate"],
             r["lower_bound"], r["deviation"]] for r in rows_data]
    _write_rows(cfg, header, rows)
    return 0


def cmd_length(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    n = model.dim
    try:
        with open(args.input, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            data = np.array([[float(v) for v in row[:1 + 3 * n]]
                             for row in reader if row])
    except (OSError, ValueError, StopIteration) as exc:
        raise ConfigError(f"cannot read state CSV {args.input}: {exc}") from exc
    if data.shape[1] < 1 + 3 * n:
        raise ConfigError(
            f"state CSV needs columns t, x1..x{n}, V1..V{n}, R1..R{n}")
    states = [lifts.RadiusPoint(x=row[1:1 + n], V=row[1 + n:1 + 2 * n],
                                R=row[1 + 2 * n:1 + 3 * n]) for row in data]
    profile = srmetric.parse_profile(args.profile)
    traj = srmetric.controls_from_path(model, states, times=data[:, 0],
                                       tol=args.admissibility_tol)
    value = srmetric.length(model, profile, traj)
    _write_rows(cfg, ["length", "max_admissibility_defect"],
                [[value, float(np.max(traj.residuals))]])
    return 0


def cmd_sim2(cfg: RunConfig, args) -> int:
    y0 = _parse_floats(args.covector, 8)
    s0 = sim2.CovectorState.from_array(y0)
    traj = sim2.hamiltonian_flow(s0, args.T, args.step)
    try:
        eps, alpha = sim2.first_integrals(s0)
    except CurvradiiError:
        eps, alpha = 0.0, float("nan")
    H = traj.hamiltonians()
    try:
        kappa_fd, law = sim2.projection_curvatures(traj)
    except CurvradiiError:
        kappa_fd = np.full(len(traj), float("nan"))
        law = np.full(len(traj), float("nan"))
    header = ["t", "theta", "rho", "x1", "x2", "p_theta", "p_rho", "p_x1",
              "p_x2", "H", "eps", "alpha", "kappa_projection", "kappa_law"]
    every = max(1, len(traj) // args.max_rows) if args.max_rows else 1
    rows = []
    for k in range(0, len(traj), every):
        rows.append([float(traj.times[k]), *map(float, traj.states[k]),
                     float(H[k]), eps, alpha, float(kappa_fd[k]), float(law[k])])
    _write_rows(cfg, header, rows)
    if args.svg:
        _write_sim2_svg(args.svg, traj)
    return 0


def _svg_polyline(points: np.ndarray, width: float, height: float,
                  color: str) -> str:
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    scaled = (points - lo) / span * [width - 20, height - 20] + 10
    scaled[:, 1] = height - scaled[:, 1]
    coords = " ".join(f"{p[0]:.2f},{p[1]:.2f}" for p in scaled)
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1" '
            f'points="{coords}"/>')


def _write_sim2_svg(path: str, traj: sim2.SimTrajectory) -> None:
    width, height = 420, 420
    every = max(1, len(traj) // 4000)
    proj = traj.states[::every, [0, 1]]
    plane = traj.states[::every, [2, 3]]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * width}" '
        f'height="{height}">',
        _svg_polyline(proj, width, height, "#003366"),
        f'<g transform="translate({width},0)">',
        _svg_polyline(plane, width, height, "#663300"),
        "</g>",
        "</svg>",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_verify_all(cfg: RunConfig, args) -> int:
    vcfg = verification.VerifyConfig(
        seed=cfg.seed, rk_step=cfg.rk_step, fd_step=cfg.fd_step,
        rank_tol=cfg.rank_tol, constraint_tol=cfg.constraint_tol,
        bracket_points=args.bracket_points,
        growth_points=args.growth_points,
        curvature_points=args.curvature_points,
        factorization_points=args.factorization_points,
        sim2_trajectories=args.sim2_trajectories,
        sim2_duration=args.sim2_duration,
        sim2_step=args.sim2_step,
    )
    results = verification.run_all(vcfg)
    report = verification.format_report(results)
    fh, close = _open_output(cfg.output)
    try:
        fh.write(report)
    finally:
        if close:
            fh.close()
    if cfg.output != "-":
        sys.stdout.write(report)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvradii",
        description="curvature-radius lifts, frame brackets, and "
                    "sub-Riemannian length tools")
    parser.add_argument("--config", help="INI config file ([common] + per-command sections)")
    parser.add_argument("--model", help="model spec (euclidean:n | sphere2 | "
                                        "hyperbolic2 | diag:... | matrix:...)")
    parser.add_argument("--seed", type=int, help="seed for random sampling")
    parser.add_argument("--fd-step", type=float, dest="fd_step")
    parser.add_argument("--rk-step", type=float, dest="rk_step")
    parser.add_argument("--rank-tol", type=float, dest="rank_tol")
    parser.add_argument("--constraint-tol", type=float, dest="constraint_tol")
    parser.add_argument("--output", "-o", help="output path ('-' for stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", help="lift a curve CSV (t, x1..xn)")
    p.add_argument("--input", required=True)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--kappa-min", type=float, default=lifts.KAPPA_MIN)
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("flow", help="integrate a frame field")
    p.add_argument("--field", default="f1", help="f1, f2, f21, f121, f1121, ...")
    p.add_argument("--x", required=True, help="comma-separated chart point")
    p.add_argument("--R", required=True)
    p.add_argument("--V", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--step", type=float)
    p.add_argument("--max-rows", type=int, default=1000)
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("brackets", help="bracket residual/rank report at random states")
    p.add_argument("--points", type=int, default=10)
    p.set_defaults(fn=cmd_brackets)

    p = sub.add_parser("geodesic", help="integrate a geodesic")
    p.add_argument("--x", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--step", type=float)
    p.add_argument("--max-rows", type=int, default=1000)
    p.set_defaults(fn=cmd_geodesic)

    p = sub.add_parser("length", help="sub-Riemannian length of a state CSV "
                                      "(t, x.., V.., R..; lift output works)")
    p.add_argument("--input", required=True)
    p.add_argument("--profile", default="const:a=0,b=1")
    p.add_argument("--admissibility-tol", type=float,
                   default=srmetric.ADMISSIBILITY_TOL)
    p.set_defaults(fn=cmd_length)

    p = sub.add_parser("distance", help="distance reconstruction via connectors")
    p.add_argument("--x0", required=True)
    p.add_argument("--x1", required=True)
    p.add_argument("--profile", default="radial:a=0,b=1")
    p.add_argument("--kappas", default="0.1,0.01,0.001")
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("sim2", help="similarity-group Hamiltonian flow")
    p.add_argument("--covector", required=True,
                   help="theta,rho,x1,x2,p_theta,p_rho,p_x1,p_x2")
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--max-rows", type=int, default=1000)
    p.add_argument("--svg", help="write an SVG of the projections")
    p.set_defaults(fn=cmd_sim2)

    p = sub.add_parser("verify-all", help="run the acceptance checks")
    p.add_argument("--bracket-points", type=int, default=100)
    p.add_argument("--growth-points", type=int, default=50)
    p.add_argument("--curvature-points", type=int, default=20)
    p.add_argument("--factorization-points", type=int, default=2)
    p.add_argument("--sim2-trajectories", type=int, default=10)
    p.add_argument("--sim2-duration", type=float, default=10.0)
    p.add_argument("--sim2-step", type=float, default=1e-4)
    p.set_defaults(fn=cmd_verify_all)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {name: getattr(args, name, None) for name in _CONFIG_FIELDS}
    try:
        cfg = load_config(args.config, args.command, overrides)
        return args.fn(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CurvradiiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
