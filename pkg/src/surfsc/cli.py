"""Command-line front end.

One subcommand per operation family, each emitting a single machine-readable
table (CSV with a `#schema=1` comment line, or JSON mirroring the column
names) to stdout or a file.  Diagnostics go to stderr, never into the data
stream, and the same flags always produce byte-identical output.  Exit codes:
0 success, 1 solver non-convergence, 2 invalid parameters.

With `--plot-dir` the report path also renders matplotlib figures to files
alongside the delimited output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coefficients import (
    coefficient_row,
    limiting_check,
    perturbation_check,
    sign_scan,
    sweep,
)
from .disc2d import DiscParams, check_energy_identity, check_theorem, solve_disc
from .errors import InvalidParameterError, NonConvergenceError, SurfscError
from .geometry import (
    BoundarySegment,
    curve_from_descriptor,
    curvature_integral,
    parse_curve_descriptor,
    predict_density_per_arclength,
    predict_quartic_mass,
)
from .grid import make_grid
from .identities import correction_closed, correction_direct, verify_all
from .profile1d import (
    DEFAULT_GRID,
    ModelParams,
    curved_grid,
    optimize_alpha_halfplane,
    solve_curved,
)
from .spectral import compute_theta0, reference_theta0

SCHEMA = 1


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _emit(rows, columns, args, meta=None) -> None:
    """Write the table in the requested format to stdout or --output."""
    if args.format == "csv":
        lines = [f"#schema={SCHEMA}"]
        if args.meta and meta:
            for key in sorted(meta):
                lines.append(f"#meta {key}={_fmt(meta[key])}")
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(row[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    else:
        payload = {"schema": SCHEMA}
        if args.meta and meta:
            payload["meta"] = {k: meta[k] for k in sorted(meta)}
        payload["rows"] = [
            {c: (None if row[c] is None else row[c]) for c in columns} for row in rows
        ]
        text = json.dumps(payload, indent=2, default=_fmt) + "\n"
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _plot_dir(args) -> Path | None:
    if getattr(args, "plot_dir", None):
        return Path(args.plot_dir)
    return None


def _note_figure(path) -> None:
    print(f"figure: {path}", file=sys.stderr)


def _threads() -> int:
    raw = os.environ.get("SURFSC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _grid_from(args):
    return make_grid(args.grid_T, args.grid_cells)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"bad numeric list {text!r}") from exc


# ---------------------------------------------------------------- commands


def _cmd_theta0(args) -> None:
    grid = make_grid(args.grid_T, args.theta_cells)
    res = compute_theta0(grid, tol=args.tol)
    rows = [
        {
            "theta0": res.theta0,
            "alpha_opt": res.alpha_opt,
            "u0_at_0": res.u0_at_0,
            "u0_L4_pow4": res.u0_l4_pow4,
        }
    ]
    meta = {"grid_T": grid.T, "grid_cells": grid.n_cells, "tol": args.tol,
            "version": __version__}
    _emit(rows, ["theta0", "alpha_opt", "u0_at_0", "u0_L4_pow4"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_mode

        _note_figure(plot_mode(res.mode.grid.nodes, res.mode.u, out / "theta0_mode.png"))


def _cmd_halfplane(args) -> None:
    grid = _grid_from(args)
    sol = optimize_alpha_halfplane(args.b, grid)
    from .grid import integrate

    rows = [
        {
            "b": args.b,
            "alpha0": sol.alpha,
            "E0": sol.energy,
            "f0sq0": sol.boundary_density,
            "int_f0_4": integrate(sol.profile**4, grid),
            "residual": sol.residual_norm,
        }
    ]
    meta = {"grid_T": grid.T, "grid_cells": grid.n_cells, "version": __version__}
    _emit(rows, ["b", "alpha0", "E0", "f0sq0", "int_f0_4", "residual"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_profile

        _note_figure(plot_profile(grid.nodes, sol.profile, out / "halfplane_profile.png",
                                  label="f0(t)"))


def _cmd_curved(args) -> None:
    params = ModelParams(b=args.b, eps=args.eps, k=args.k, c0=args.c0)
    h = args.grid_T / args.grid_cells
    grid = curved_grid(args.eps, args.c0, h=h)
    sol = solve_curved(params, grid)
    rows = [
        {
            "b": args.b,
            "eps": args.eps,
            "k": args.k,
            "c0": args.c0,
            "alpha_k": sol.alpha,
            "E_star": sol.energy,
            "residual": sol.residual_norm,
        }
    ]
    meta = {"grid_T": grid.T, "grid_cells": grid.n_cells, "version": __version__}
    _emit(rows, ["b", "eps", "k", "c0", "alpha_k", "E_star", "residual"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_profile

        _note_figure(plot_profile(grid.nodes, sol.profile, out / "curved_profile.png",
                                  label="f_k(t)"))


def _cmd_identities(args) -> None:
    grid = _grid_from(args)
    sol = optimize_alpha_halfplane(args.b, grid)
    rep = verify_all(sol)
    corr = correction_closed(sol)
    rows = [
        {
            "b": args.b,
            "r_opt": rep.r_opt,
            "r_virial": rep.r_virial,
            "r_boundary": rep.r_boundary,
            "r_energy": rep.r_energy,
            "r_thirdmoment": rep.r_thirdmoment,
            "r_gradient": rep.r_gradient,
            "boundary_applicable": rep.boundary_applicable,
            "all_pass": rep.all_pass,
        }
    ]
    meta = {
        "grid_T": grid.T,
        "grid_cells": grid.n_cells,
        "E_corr_direct": correction_direct(sol),
        "E_corr_via_boundary": corr.via_boundary,
        "E_corr_via_f4": corr.via_f4,
        "version": __version__,
    }
    _emit(
        rows,
        [
            "b",
            "r_opt",
            "r_virial",
            "r_boundary",
            "r_energy",
            "r_thirdmoment",
            "r_gradient",
            "boundary_applicable",
            "all_pass",
        ],
        args,
        meta,
    )
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_identities

        _note_figure(plot_identities(rep, out / "identity_residuals.png"))


def _cmd_coeffs(args) -> None:
    grid = _grid_from(args)
    rows_data = sweep(
        args.b_min,
        args.b_max,
        args.steps,
        grid,
        cold_start=args.cold_start,
        max_workers=_threads(),
    )
    for row in rows_data:
        if row.near_critical:
            print(f"warning: b={row.b} is near-critical; row not trusted",
                  file=sys.stderr)
    rows = [
        {
            "b": r.b,
            "alpha0": r.alpha0,
            "E0": r.energy,
            "f0sq0": r.boundary_density,
            "Ecorr": r.correction,
            "C1": r.c1,
            "C2": r.c2,
        }
        for r in rows_data
    ]
    meta = {"grid_T": grid.T, "grid_cells": grid.n_cells, "version": __version__}
    _emit(rows, ["b", "alpha0", "E0", "f0sq0", "Ecorr", "C1", "C2"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_coeff_sweep

        _note_figure(plot_coeff_sweep(rows_data, out / "coefficients.png"))


def _cmd_perturb(args) -> None:
    grid = _grid_from(args)
    eps_list = _parse_floats(args.eps_list)
    diag = perturbation_check(args.b, args.k, eps_list, c0=args.c0, grid=grid)
    rows = [
        {
            "eps": e,
            "E_star": es,
            "expansion": diag.e0 - e * args.k * diag.e_corr,
            "deviation": d,
        }
        for e, es, d in zip(diag.eps_list, diag.e_star, diag.deviations)
    ]
    meta = {
        "E0": diag.e0,
        "E_corr": diag.e_corr,
        "slope": diag.slope,
        "slope_target": diag.slope_target,
        "slope_rel_err": diag.slope_rel_err,
        "curvature_term": diag.curvature,
        "version": __version__,
    }
    print(
        f"slope={diag.slope!r} target={diag.slope_target!r} "
        f"rel_err={diag.slope_rel_err:.3e}",
        file=sys.stderr,
    )
    _emit(rows, ["eps", "E_star", "expansion", "deviation"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_perturbation

        _note_figure(plot_perturbation(diag, out / "perturbation.png"))


def _cmd_sign_scan(args) -> None:
    grid = _grid_from(args)
    res = sign_scan((args.b_lo, args.b_hi), args.resolution, grid)
    rows = [
        {
            "b0_estimate": res.root,
            "bracket_lo": None if res.bracket is None else res.bracket[0],
            "bracket_hi": None if res.bracket is None else res.bracket[1],
            "found": res.root is not None,
        }
    ]
    meta = {
        "b_lo": args.b_lo,
        "b_hi": args.b_hi,
        "resolution": args.resolution,
        "points_scanned": len(res.b_scanned),
        "version": __version__,
    }
    _emit(rows, ["b0_estimate", "bracket_lo", "bracket_hi", "found"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_sign_scan

        _note_figure(plot_sign_scan(res, out / "sign_scan.png"))


def _cmd_limit_check(args) -> None:
    grid = _grid_from(args)
    theta = reference_theta0()
    if args.b_list:
        b_values = _parse_floats(args.b_list)
    else:
        deltas = _parse_floats(args.deltas)
        b_values = [(1.0 - d) / theta.theta0 for d in deltas]
    rows_data = limiting_check(b_values, theta, grid)
    rows = [
        {
            "b": r.b,
            "delta": r.delta,
            "rho1": r.rho1,
            "rho2": r.rho2,
            "alpha_gap": r.alpha_gap,
        }
        for r in rows_data
    ]
    meta = {"theta0": theta.theta0, "version": __version__}
    _emit(rows, ["b", "delta", "rho1", "rho2", "alpha_gap"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_limiting

        _note_figure(plot_limiting(rows_data, out / "limiting_ratios.png"))


def _cmd_predict(args) -> None:
    descriptor = parse_curve_descriptor(args.curve)
    curve = curve_from_descriptor(descriptor)
    s_a, s_b = _parse_floats(args.segment)
    segment = BoundarySegment(s_a, s_b)
    grid = _grid_from(args)
    coeff = coefficient_row(args.b, grid)
    pred = predict_quartic_mass(curve, segment, args.eps, coeff)
    rows = [
        {
            "leading": pred.leading,
            "correction": pred.correction,
            "total": pred.total,
        }
    ]
    meta = {
        "curve": args.curve,
        "s_a": s_a,
        "s_b": s_b,
        "eps": args.eps,
        "b": args.b,
        "C1": coeff.c1,
        "C2": coeff.c2,
        "curvature_integral": curvature_integral(curve, segment),
        "boundary_length": curve.length,
        "version": __version__,
    }
    _emit(rows, ["leading", "correction", "total"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_curve_density

        s_values = np.linspace(0.0, curve.length, 512)
        density = [
            predict_density_per_arclength(curve, float(s), args.eps, coeff)
            for s in s_values
        ]
        _note_figure(plot_curve_density(curve, s_values, density,
                                        out / "boundary_density.png"))


def _cmd_disc(args) -> None:
    params = DiscParams(eps=args.eps, b=args.b, R=args.R, winding=args.winding,
                        n_r=args.n_r)
    sol = solve_disc(params)
    rep = check_energy_identity(sol)
    rows = [
        {
            "b": args.b,
            "eps": args.eps,
            "R": args.R,
            "n_opt": sol.n_opt,
            "n_hat": sol.n_hat,
            "energy": sol.energy,
            "quartic_mass": sol.quartic_mass,
            "g_at_R": sol.boundary_value,
            "residual": sol.residual_norm,
        }
    ]
    meta = {
        "pointwise_identity_residual": rep.pointwise_residual,
        "integrated_identity_residual": rep.integrated_residual,
        "n_r": params.cells,
        "version": __version__,
    }
    _emit(
        rows,
        ["b", "eps", "R", "n_opt", "n_hat", "energy", "quartic_mass", "g_at_R",
         "residual"],
        args,
        meta,
    )
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_disc_profile

        _note_figure(plot_disc_profile(sol.r_nodes, sol.g, out / "disc_profile.png"))


def _cmd_disc_theorem(args) -> None:
    eps_list = _parse_floats(args.eps_list)
    grid = _grid_from(args)
    coeff = coefficient_row(args.b, grid)
    threads = _threads()
    params = [DiscParams(eps=e, b=args.b, R=args.R) for e in eps_list]
    if threads > 1:
        import concurrent.futures

        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            sols = list(pool.map(solve_disc, params))
    else:
        sols = [solve_disc(p) for p in params]
    rep = check_theorem(sols, coeff)
    rows = [
        {"eps": e, "quartic_mass": q, "c1_hat": c1h, "c2_hat": c2h}
        for e, q, c1h, c2h in zip(rep.eps, rep.quartic, rep.c1_hat, rep.c2_hat)
    ]
    meta = {
        "C1": rep.c1_ref,
        "C2": rep.c2_ref,
        "trend_monotone": rep.trend_monotone,
        "within_tolerance": rep.within_tolerance,
        "version": __version__,
    }
    _emit(rows, ["eps", "quartic_mass", "c1_hat", "c2_hat"], args, meta)
    if (out := _plot_dir(args)) is not None:
        from .plots import plot_disc_theorem

        _note_figure(plot_disc_theorem(rep, out / "disc_theorem.png"))


# ------------------------------------------------------------------ parser


def _add_common(parser: argparse.ArgumentParser, *, grid: bool = True) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output table format (default csv)")
    parser.add_argument("--output", default=None, metavar="PATH",
                        help="write the table to PATH instead of stdout")
    parser.add_argument("--meta", action="store_true",
                        help="include run metadata in the output")
    parser.add_argument("--plot-dir", default=None, metavar="DIR",
                        help="also render figures into DIR")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="key=value file providing flag defaults")
    if grid:
        parser.add_argument("--grid-T", type=float, default=DEFAULT_GRID.T,
                            help="half-line truncation (default %(default)s)")
        parser.add_argument("--grid-cells", type=int, default=DEFAULT_GRID.n_cells,
                            help="half-line cells (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfsc",
        description="surface superconductivity boundary-layer toolkit",
    )
    parser.add_argument("--version", action="version", version=f"surfsc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta0", help="de Gennes constant and ground mode")
    _add_common(p)
    p.add_argument("--theta-cells", type=int, default=25000,
                   help="cells for the spectral grid (default %(default)s)")
    p.add_argument("--tol", type=float, default=1e-7,
                   help="golden-section width in alpha (default %(default)s)")
    p.set_defaults(func=_cmd_theta0)

    p = sub.add_parser("halfplane", help="flat-boundary minimizer at one b")
    _add_common(p)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=_cmd_halfplane)

    p = sub.add_parser("curved", help="curvature-weighted minimizer")
    _add_common(p)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--c0", type=float, default=6.0)
    p.set_defaults(func=_cmd_curved)

    p = sub.add_parser("identities", help="integral-identity residuals at one b")
    _add_common(p)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("coeffs", help="C1/C2 coefficient sweep over b")
    _add_common(p)
    p.add_argument("--b-min", type=float, required=True)
    p.add_argument("--b-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--cold-start", action="store_true",
                   help="disable warm-start continuation (audit mode)")
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("perturb", help="first-order expansion check of E*(eps)")
    _add_common(p)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--eps-list", default="1e-2,3e-3,1e-3")
    p.add_argument("--c0", type=float, default=6.0)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("sign-scan", help="scan C2(b) for a sign change")
    _add_common(p)
    p.add_argument("--b-lo", type=float, required=True)
    p.add_argument("--b-hi", type=float, required=True)
    p.add_argument("--resolution", type=float, default=1e-3)
    p.set_defaults(func=_cmd_sign_scan)

    p = sub.add_parser("limit-check", help="near-critical scaling ratios")
    _add_common(p)
    p.add_argument("--deltas", default="0.04,0.02,0.01",
                   help="list of 1 - b*theta0 values")
    p.add_argument("--b-list", default=None, help="explicit b values (overrides)")
    p.set_defaults(func=_cmd_limit_check)

    p = sub.add_parser("predict", help="boundary quartic-mass prediction")
    _add_common(p)
    p.add_argument("--curve", required=True,
                   help="circle:R=1 | ellipse:a=2,b=1 | fourier:a2=0.05,a3=0.01")
    p.add_argument("--segment", required=True, metavar="S_A,S_B")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("disc", help="radial disc Ginzburg-Landau solve")
    _add_common(p, grid=False)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--winding", type=int, default=None)
    p.add_argument("--n-r", type=int, default=None)
    p.set_defaults(func=_cmd_disc)

    p = sub.add_parser("disc-theorem", help="curvature-coefficient trend on the disc")
    _add_common(p)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--eps-list", default="0.05,0.03,0.02")
    p.add_argument("--R", type=float, default=1.0)
    p.set_defaults(func=_cmd_disc_theorem)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Fold `key=value` config-file entries in as subcommand defaults."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise InvalidParameterError("--config needs a file path")
    path = Path(argv[idx + 1])
    if not path.exists():
        raise InvalidParameterError(f"config file {path} not found")
    overrides: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParameterError(f"{path}:{line_no}: expected key=value")
        overrides[key.strip().replace("-", "_")] = value.strip()
    if not overrides:
        return argv
    # locate the subcommand parser to validate and convert values
    sub_actions = [
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    ]
    command = next((a for a in argv if not a.startswith("-")), None)
    if not sub_actions or command not in sub_actions[0].choices:
        raise InvalidParameterError("config requires a valid subcommand")
    sub_parser = sub_actions[0].choices[command]
    dests = {a.dest: a for a in sub_parser._actions}
    defaults = {}
    for key, raw in overrides.items():
        if key not in dests:
            raise InvalidParameterError(f"unknown config key {key!r}")
        action = dests[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            defaults[key] = action.type(raw)
        else:
            defaults[key] = raw
    sub_parser.set_defaults(**defaults)
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        args.func(args)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SurfscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
