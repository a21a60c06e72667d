"""Command-line driver: solve, integrate, check, project.

Exit codes: 0 success (converged / all checks passed), 1 malformed
configuration or arguments, 2 budget exhausted or checks failed, 3
numerical breakdown (empty two-cut intersection, non-finite iterates).
Verbosity comes from the ``MFLOW_LOG`` environment variable
(DEBUG/INFO/WARNING/ERROR).
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, dynamics
from .config import ConfigError, load_json, resolve_instance
from .geometry import GEOM_TOL, EmptyIntersectionError, haugazeau_projection
from .problems import builtin_tags
from .space import as_vector

log = logging.getLogger("mflow")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INCOMPLETE = 2
EXIT_BREAKDOWN = 3


def _setup_logging():
    level = os.environ.get("MFLOW_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _out_dir(args):
    out = Path(args.out or "mflow-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _merge_config(args):
    """Overlay --config file values under explicit CLI flags."""
    if not args.config:
        return
    doc = load_json(args.config)
    for key, attr in [
        ("instance", "instance"),
        ("mode", "mode"),
        ("lambda", "lam"),
        ("max_iter", "max_iter"),
        ("tol_residual", "tol_residual"),
        ("tol_step", "tol_step"),
        ("seed", "seed"),
        ("out", "out"),
        ("samples", "samples"),
    ]:
        if key in doc and getattr(args, attr, None) is None:
            setattr(args, attr, doc[key])


def _resolve(args):
    if args.instance is None:
        raise ConfigError("no instance selected (use --instance or --config)")
    return resolve_instance(args.instance, path=args.config or "<cli>")


def _positive(name, value):
    if value is not None and value <= 0:
        raise ConfigError(f"{name} must be strictly positive, got {value}")


def cmd_solve(args):
    _merge_config(args)
    named = _resolve(args)
    if named.instance is None:
        raise ConfigError(f"instance {named.tag!r} is a raw field; use 'integrate'")
    mode = args.mode or "discrete"
    lam = args.lam
    if mode == "euler" and lam is None:
        raise ConfigError("euler mode requires --lambda")
    max_iter = int(args.max_iter if args.max_iter is not None else 100_000)
    tol_residual = args.tol_residual if args.tol_residual is not None else 1e-9
    tol_step = args.tol_step if args.tol_step is not None else 1e-12
    for name, val in [
        ("max-iter", max_iter),
        ("tol-residual", tol_residual),
        ("tol-step", tol_step),
    ]:
        _positive(name, val)

    lam_value = None
    if mode == "euler":
        lam_list = _parse_lambdas(lam)
        if len(lam_list) != 1:
            raise ConfigError("'solve' takes exactly one --lambda value")
        lam_value = lam_list[0]

    traj = dynamics.solve(
        named.instance,
        mode=mode,
        lam=lam_value,
        max_iter=max_iter,
        tol_residual=tol_residual,
        tol_step=tol_step,
        z=named.z,
        label=named.tag,
    )
    out = _out_dir(args)
    csv_path = out / f"{named.tag}_trajectory.csv"
    traj.write_csv(csv_path)
    summary = traj.summary()
    if named.z is not None:
        summary["final_error"] = float(np.linalg.norm(traj.final - named.z))
    summary_path = out / f"{named.tag}_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2))
    print(
        f"{named.tag}: {traj.termination} after {traj.iterations} iterations, "
        f"residual {traj.residual[-1]:.3e}"
    )
    log.info("wrote %s and %s", csv_path, summary_path)
    return EXIT_OK if traj.termination in ("residual", "step") else EXIT_INCOMPLETE


def _parse_lambdas(raw):
    if raw is None:
        raise ConfigError("missing --lambda list")
    if isinstance(raw, (int, float)):
        values = [float(raw)]
    elif isinstance(raw, (list, tuple)):
        values = [float(v) for v in raw]
    else:
        try:
            values = [float(tok) for tok in str(raw).split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --lambda list {raw!r}: {exc}") from exc
    if not values:
        raise ConfigError("empty --lambda list")
    for v in values:
        if not 0.0 < v <= 1.0:
            raise ConfigError(f"step sizes must lie in (0, 1], got {v}")
    return values


def cmd_integrate(args):
    _merge_config(args)
    named = _resolve(args)
    lams = _parse_lambdas(args.lam)
    t_final = args.t_final if args.t_final is not None else 1.0
    _positive("t-final", t_final)
    out = _out_dir(args)

    if named.kind == "field":
        fld = named.extended_field or named.field
        x0 = _integration_start(args, named)
        references = named.references
    else:
        fld = named.flow_field()
        x0 = named.instance.x0.flat
        references = ()

    rows = []
    sup_errors = []
    for lam in lams:
        traj = dynamics.integrate_field(
            fld, x0, lam, t_final, cap=named.cap, z=named.z, label=named.tag
        )
        csv_path = out / f"{named.tag}_lam{lam:g}.csv"
        traj.write_csv(csv_path)
        row = {"lambda": lam, "steps": traj.iterations, "csv": str(csv_path)}
        if references:
            # against the closest closed form (extensions may branch)
            tgrid = np.linspace(0.0, t_final, 1001)
            nodes = traj.points
            best_label, best_err = None, np.inf
            for label, reference in references:
                sup_err = max(
                    float(
                        np.linalg.norm(
                            dynamics.euler_eval(nodes, lam, t) - as_vector(reference(t))
                        )
                    )
                    for t in tgrid
                )
                if sup_err < best_err:
                    best_label, best_err = label, sup_err
            row["sup_error"] = best_err
            row["reference"] = best_label
            sup_errors.append(best_err)
        rows.append(row)

    for i in range(1, len(sup_errors)):
        rows[i]["error_ratio"] = sup_errors[i] / sup_errors[i - 1]

    table_path = out / f"{named.tag}_order_table.json"
    table_path.write_text(json.dumps(rows, indent=2))
    header = f"{'lambda':>10} {'steps':>8} {'sup_error':>14} {'ratio':>8}"
    print(header)
    for row in rows:
        print(
            f"{row['lambda']:>10g} {row['steps']:>8d} "
            f"{row.get('sup_error', float('nan')):>14.6e} "
            f"{row.get('error_ratio', float('nan')):>8.3f}"
        )
    log.info("wrote %s", table_path)
    return EXIT_OK


def _integration_start(args, named):
    if getattr(args, "x0", None):
        try:
            return as_vector(json.loads(args.x0))
        except (json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"bad --x0: {exc}") from exc
    if named.tag == "lens-drift":
        return np.array([0.0, -1.0])
    if named.tag == "box-flow":
        return np.array([0.0, 0.0])
    if named.cap is not None:
        return named.cap.z.copy()
    raise ConfigError(f"instance {named.tag!r} needs an explicit --x0")


def cmd_check(args):
    _merge_config(args)
    named = _resolve(args)
    if named.cap is None or named.z is None:
        raise ConfigError(
            f"instance {named.tag!r} has no solution/cap attached; checks need both"
        )
    n_samples = int(args.samples if args.samples is not None else 512)
    seed = int(args.seed if args.seed is not None else 0)
    tol = float(args.tol if args.tol is not None else GEOM_TOL)
    _positive("samples", n_samples)
    _positive("tol", tol)

    fld = named.flow_field()
    samples = diagnostics.sample_cap(named.cap, n_samples=n_samples, seed=seed)
    reports = [
        diagnostics.check_unique_zero(fld, named.cap, named.z, samples, tol=tol),
        diagnostics.check_cap_invariance(fld, named.cap, samples, tol=tol),
        diagnostics.check_outward_drift(fld, named.cap, samples, tol=tol),
    ]
    if named.instance is not None:
        from .splitting import fixed_point_operator

        T = fixed_point_operator("kuhn_tucker", instance=named.instance)
        builder = diagnostics.cut_pair_builder(T, named.cap.w)
        reports.extend(
            diagnostics.check_projection_conditions(builder, named.cap, samples, tol=tol)
        )

    out = _out_dir(args)
    report_path = out / f"{named.tag}_checks.json"
    report_path.write_text(
        json.dumps([rep.to_dict() for rep in reports], indent=2)
    )
    width = max(len(rep.name) for rep in reports)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(
            f"{rep.name:<{width}}  {status}  worst_violation={rep.worst_violation:.3e}"
            f"  samples={rep.sample_count}"
        )
    log.info("wrote %s", report_path)
    return EXIT_OK if all(rep.passed for rep in reports) else EXIT_INCOMPLETE


def cmd_project(args):
    try:
        w = as_vector(json.loads(args.w))
        b = as_vector(json.loads(args.b))
        c = as_vector(json.loads(args.c))
    except (json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"points must be JSON arrays of equal dimension: {exc}")
    point, case = haugazeau_projection(w, b, c, return_case=True)
    print(json.dumps({"projection": point.tolist(), "case": case}))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mflow",
        description="Best-approximation projection dynamics for coupled "
        "monotone inclusions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument(
            "--instance",
            help=f"built-in tag ({', '.join(builtin_tags())}) or instance JSON path",
        )
        p.add_argument("--config", help="run configuration JSON path")
        p.add_argument("--out", default=None, help="output directory (default mflow-out)")
        p.add_argument("--seed", type=int, default=None, help="sampling seed")

    p_solve = sub.add_parser("solve", help="run the discrete scheme (or its relaxation)")
    add_common(p_solve)
    p_solve.add_argument("--mode", choices=["discrete", "euler"], default=None)
    p_solve.add_argument("--lambda", dest="lam", default=None, help="euler step size")
    p_solve.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p_solve.add_argument("--tol-residual", dest="tol_residual", type=float, default=None)
    p_solve.add_argument("--tol-step", dest="tol_step", type=float, default=None)
    p_solve.set_defaults(fn=cmd_solve)

    p_int = sub.add_parser("integrate", help="Euler trajectories for a list of step sizes")
    add_common(p_int)
    p_int.add_argument(
        "--lambda", dest="lam", default=None, help="comma-separated step sizes in (0, 1]"
    )
    p_int.add_argument("--t-final", dest="t_final", type=float, default=None)
    p_int.add_argument("--x0", default=None, help="starting point as a JSON array")
    p_int.set_defaults(fn=cmd_integrate)

    p_check = sub.add_parser("check", help="run the sampled assumption checks")
    add_common(p_check)
    p_check.add_argument("--samples", type=int, default=None)
    p_check.add_argument(
        "--tol", type=float, default=None, help="geometric tolerance (default 1e-10)"
    )
    p_check.set_defaults(fn=cmd_check)

    p_proj = sub.add_parser("project", help="two-cut projection of an anchor point")
    p_proj.add_argument("w", help="anchor point as a JSON array")
    p_proj.add_argument("b", help="first cut point as a JSON array")
    p_proj.add_argument("c", help="second cut point as a JSON array")
    p_proj.set_defaults(fn=cmd_project)

    return parser


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EmptyIntersectionError as exc:
        print(f"empty intersection: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except dynamics.NonFiniteError as exc:
        print(f"breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
