"""Command-line front end.

Subcommands: dist, plan, map-check, geodesic {right-translation, dilation-ray,
linear-w1}, radon {project, reconstruct, sample}, lift certify, rigidity {step4,
splusminus}, and verify.  Exit status is 0 on success, 1 when a verification
property fails, and 2 on usage errors (bad arguments, malformed files, unknown
selectors).  The seed falls back to the HEISOT_SEED environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import jsonio
from .errors import (
    AmbiguousMatchingError,
    DimensionMismatchError,
    GenericLineError,
    MassMismatchError,
    NotInducedByMapError,
    OracleInconsistencyError,
)
from .geodesics import dilation_ray, linear_interpolation, right_translation_curve
from .geometry import HorizontalVector, right_translate_horizontal, horizontal_dilation
from .harness import SuiteConfig, export_curve, load_config, run_suite
from .lifting import certify_lift, plane_dilation, plane_map_from_pairs, plane_translation
from .radon import RecordingOracle, TableOracle, oracle_from_measure, project_measure, reconstruct
from .rigidity import s_plus_minus_sets, step4_certificate
from .transport import solve_wp, verify_map_optimality

USAGE_ERROR = 2
FAILURE = 1


def _parse_vector(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("HEISOT_SEED")
    if env is not None:
        return int(env)
    return 0


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text + ("\n" if not text.endswith("\n") else ""), encoding="utf-8")
    else:
        print(text)


def _cmd_dist(args) -> int:
    mu = jsonio.load_measure(args.measures[0])
    nu = jsonio.load_measure(args.measures[1])
    cost = "euclidean_plane" if args.plane else "heisenberg"
    result = solve_wp(mu, nu, args.p, cost=cost)
    _emit(args, jsonio.dumps({"p": result.p, "distance": result.distance, "cost_p": result.cost_p}))
    return 0


def _cmd_plan(args) -> int:
    mu = jsonio.load_measure(args.measures[0])
    nu = jsonio.load_measure(args.measures[1])
    cost = "euclidean_plane" if args.plane else "heisenberg"
    result = solve_wp(mu, nu, args.p, cost=cost)
    _emit(args, jsonio.dumps(jsonio.transport_result_to_obj(result)))
    return 0


def _point_map_from_args(args, dim: int):
    if args.map == "identity":
        return lambda q: q
    if args.map == "right-translation":
        if args.u is None or args.v is None:
            raise ValueError("right-translation needs --u and --v")
        direction = HorizontalVector(_parse_vector(args.u), _parse_vector(args.v))
        t = args.t if args.t is not None else 1.0
        return lambda q: right_translate_horizontal(q, direction, t)
    if args.map == "dilation":
        if args.lam is None:
            raise ValueError("dilation needs --lam")
        return lambda q: horizontal_dilation(q, args.lam)
    raise ValueError(f"unknown map kind {args.map!r}")


def _cmd_map_check(args) -> int:
    mu = jsonio.load_measure(args.measure)
    report = verify_map_optimality(mu, _point_map_from_args(args, mu.dim), args.p)
    _emit(
        args,
        jsonio.dumps(
            {"map_cost": report.map_cost, "lp_cost": report.lp_cost, "gap": report.gap}
        ),
    )
    return 0


def _cmd_geodesic(args) -> int:
    if args.kind == "right-translation":
        mu = jsonio.load_measure(args.measure)
        direction = HorizontalVector(_parse_vector(args.u), _parse_vector(args.v))
        curve = right_translation_curve(mu, direction, args.p)
        t0 = args.t0 if args.t0 is not None else 0.0
        t1 = args.t1 if args.t1 is not None else 1.0
    elif args.kind == "dilation-ray":
        mu = jsonio.load_measure(args.measure)
        curve = dilation_ray(mu, args.p)
        t0 = args.t0 if args.t0 is not None else 0.0
        t1 = args.t1 if args.t1 is not None else 1.0
    else:
        mu = jsonio.load_measure(args.mu)
        nu = jsonio.load_measure(args.nu)
        curve = linear_interpolation(mu, nu)
        t0 = args.t0 if args.t0 is not None else curve.t_min
        t1 = args.t1 if args.t1 is not None else curve.t_max
    _emit(args, export_curve(curve, t0, t1, args.steps, args.format))
    return 0


def _cmd_radon_project(args) -> int:
    mu = jsonio.load_measure(args.measure)
    line = jsonio.load_line(args.line)
    sample = project_measure(mu, line)
    _emit(args, jsonio.dumps(jsonio.measure_to_obj(sample.projected)))
    return 0


def _pair_paths(directory: str) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise ValueError(f"{directory} is not a directory")
    return sorted(root.glob("*.json"))


def _cmd_radon_sample(args) -> int:
    mu = jsonio.load_measure(args.measure)
    seed = _resolve_seed(args)
    recorder = RecordingOracle(oracle_from_measure(mu))
    reconstruct(recorder, mu.dim, args.max_atoms, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for idx, (line, projected) in enumerate(recorder.queries):
        payload = {
            "line": jsonio.line_to_obj(line),
            "projection": jsonio.measure_to_obj(projected),
        }
        (out / f"q{idx:04d}.json").write_text(jsonio.dumps(payload) + "\n", encoding="utf-8")
    print(f"recorded {len(recorder.queries)} projections in {out}")
    return 0


def _cmd_radon_reconstruct(args) -> int:
    pairs = []
    for path in _pair_paths(args.oracle):
        payload = json.loads(path.read_text(encoding="utf-8"))
        pairs.append(
            (
                jsonio.line_from_obj(payload["line"]),
                jsonio.measure_from_obj(payload["projection"]),
            )
        )
    if not pairs:
        raise ValueError(f"no (line, projection) pairs found in {args.oracle}")
    dim = pairs[0][0].dim
    seed = _resolve_seed(args)
    recovered = reconstruct(TableOracle(pairs), dim, args.max_atoms, seed)
    _emit(args, jsonio.dumps(jsonio.measure_to_obj(recovered)))
    return 0


def _plane_map_from_args(args):
    chosen = [kind for kind in ("translate", "dilate", "table") if getattr(args, kind)]
    if len(chosen) != 1:
        raise ValueError("specify exactly one of --translate, --dilate, --table")
    if args.translate:
        shift = _parse_vector(args.translate)
        if shift.size % 2 != 0:
            raise ValueError("--translate expects 2n comma-separated values")
        half = shift.size // 2
        return plane_translation(shift[:half], shift[half:])
    if args.dilate is not None and args.dilate != "":
        return plane_dilation(float(args.dilate))
    with open(args.table, "r", encoding="utf-8") as fh:
        return plane_map_from_pairs(jsonio.plane_map_pairs_from_obj(json.load(fh)))


def _cmd_lift_certify(args) -> int:
    nu = jsonio.load_measure(args.measure)
    report = certify_lift(nu, _plane_map_from_args(args), args.p)
    _emit(
        args,
        jsonio.dumps(
            {
                "plane_map_cost": report.plane_map_cost,
                "plane_lp_cost": report.plane_lp_cost,
                "plane_gap": report.plane_gap,
                "lifted_map_cost": report.lifted.map_cost,
                "lifted_lp_cost": report.lifted.lp_cost,
                "lifted_gap": report.lifted_gap,
            }
        ),
    )
    return 0


def _cmd_rigidity_step4(args) -> int:
    report = step4_certificate(args.alpha)
    payload = {
        "alpha": report.alpha,
        "cost_mu": report.cost_mu,
        "cost_image": report.cost_image,
        "candidate": jsonio.measure_to_obj(report.candidate),
        "projections": {k: jsonio.measure_to_obj(v) for k, v in report.projections.items()},
        "flipped": {k: jsonio.measure_to_obj(v) for k, v in report.flipped.items()},
    }
    _emit(args, jsonio.dumps(payload))
    return 0


def _cmd_rigidity_splusminus(args) -> int:
    sets = s_plus_minus_sets(args.r)
    payload = {
        "r": sets.r,
        "s_plus": [{"relation": "y1 = x1 + offset", "offset": o} for o in sets.s_plus],
        "s_minus": [{"relation": "y1 = x1 + offset", "offset": o} for o in sets.s_minus],
        "disjoint": sets.disjoint,
    }
    _emit(args, jsonio.dumps(payload))
    return 0


def _cmd_verify(args) -> int:
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    seed = _resolve_seed(args)
    if args.config:
        config = load_config(args.config, seed=seed, **overrides)
    else:
        config = SuiteConfig(seed=seed, **overrides)
    report = run_suite(config, args.suite, jobs=args.jobs)
    for line in report.summary_lines():
        print(line)
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    else:
        print(report.to_json())
    return 0 if report.passed else FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisot",
        description="Exact optimal transport on the Heisenberg group",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seeded=False):
        p.add_argument("--out", help="write the result to a file instead of stdout")
        if seeded:
            p.add_argument("--seed", type=int, default=None,
                           help="random seed (falls back to HEISOT_SEED, then 0)")

    p_dist = sub.add_parser("dist", help="p-Wasserstein distance between two measures")
    p_dist.add_argument("measures", nargs=2, metavar=("A.json", "B.json"))
    p_dist.add_argument("--p", type=float, default=2.0)
    p_dist.add_argument("--plane", action="store_true", help="use the Euclidean plane cost")
    add_common(p_dist)
    p_dist.set_defaults(func=_cmd_dist)

    p_plan = sub.add_parser("plan", help="optimal transport plan between two measures")
    p_plan.add_argument("measures", nargs=2, metavar=("A.json", "B.json"))
    p_plan.add_argument("--p", type=float, default=2.0)
    p_plan.add_argument("--plane", action="store_true")
    add_common(p_plan)
    p_plan.set_defaults(func=_cmd_plan)

    p_map = sub.add_parser("map-check", help="optimality gap of a transport map")
    p_map.add_argument("measure")
    p_map.add_argument("--p", type=float, default=2.0)
    p_map.add_argument("--map", required=True,
                       choices=("identity", "right-translation", "dilation"))
    p_map.add_argument("--u", help="comma-separated first horizontal block")
    p_map.add_argument("--v", help="comma-separated second horizontal block")
    p_map.add_argument("--t", type=float, default=None)
    p_map.add_argument("--lam", type=float, default=None)
    add_common(p_map)
    p_map.set_defaults(func=_cmd_map_check)

    p_geo = sub.add_parser("geodesic", help="export slices of a geodesic curve")
    geo_sub = p_geo.add_subparsers(dest="kind", required=True)
    for kind in ("right-translation", "dilation-ray", "linear-w1"):
        g = geo_sub.add_parser(kind)
        if kind == "linear-w1":
            g.add_argument("--mu", required=True)
            g.add_argument("--nu", required=True)
        else:
            g.add_argument("--measure", required=True)
            g.add_argument("--p", type=float, default=2.0)
        if kind == "right-translation":
            g.add_argument("--u", required=True)
            g.add_argument("--v", required=True)
        g.add_argument("--t0", type=float, default=None)
        g.add_argument("--t1", type=float, default=None)
        g.add_argument("--steps", type=int, default=5)
        g.add_argument("--format", choices=("csv", "json"), default="csv")
        add_common(g)
        g.set_defaults(func=_cmd_geodesic, kind=kind)

    p_radon = sub.add_parser("radon", help="vertical Radon transform tools")
    radon_sub = p_radon.add_subparsers(dest="radon_command", required=True)
    r_project = radon_sub.add_parser("project", help="project a measure onto a line")
    r_project.add_argument("--measure", required=True)
    r_project.add_argument("--line", required=True)
    add_common(r_project)
    r_project.set_defaults(func=_cmd_radon_project)
    r_sample = radon_sub.add_parser(
        "sample", help="record the (line, projection) pairs a reconstruction queries"
    )
    r_sample.add_argument("--measure", required=True)
    r_sample.add_argument("--max-atoms", type=int, required=True)
    r_sample.add_argument("--out", required=True, help="output directory")
    r_sample.add_argument("--seed", type=int, default=None)
    r_sample.set_defaults(func=_cmd_radon_sample)
    r_rec = radon_sub.add_parser("reconstruct", help="reconstruct from recorded pairs")
    r_rec.add_argument("--oracle", required=True, help="directory of (line, projection) JSON pairs")
    r_rec.add_argument("--max-atoms", type=int, required=True)
    add_common(r_rec, seeded=True)
    r_rec.set_defaults(func=_cmd_radon_reconstruct)

    p_lift = sub.add_parser("lift", help="plane-map lifting tools")
    lift_sub = p_lift.add_subparsers(dest="lift_command", required=True)
    l_cert = lift_sub.add_parser("certify", help="plane and lifted optimality gaps")
    l_cert.add_argument("--measure", required=True)
    l_cert.add_argument("--p", type=float, default=2.0)
    l_cert.add_argument("--translate", help="comma-separated 2n shift")
    l_cert.add_argument("--dilate", help="dilation factor")
    l_cert.add_argument("--table", help="plane map JSON lookup table")
    add_common(l_cert)
    l_cert.set_defaults(func=_cmd_lift_certify)

    p_rig = sub.add_parser("rigidity", help="rigidity certificates")
    rig_sub = p_rig.add_subparsers(dest="rigidity_command", required=True)
    r_step4 = rig_sub.add_parser("step4", help="shape-flip exclusion certificate")
    r_step4.add_argument("--alpha", type=float, required=True)
    add_common(r_step4)
    r_step4.set_defaults(func=_cmd_rigidity_step4)
    r_spm = rig_sub.add_parser("splusminus", help="constraint sets for the flow parameter")
    r_spm.add_argument("--r", type=float, required=True)
    add_common(r_spm)
    r_spm.set_defaults(func=_cmd_rigidity_splusminus)

    p_verify = sub.add_parser("verify", help="run seeded property suites")
    p_verify.add_argument("--suite", default="all",
                          help="selector: all, a module prefix, or a full property name")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.add_argument("--config", help="flat key=value configuration file")
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.add_argument("--out", help="write the JSON report to a file")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 for --help.
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (
        ValueError,
        DimensionMismatchError,
        MassMismatchError,
        NotInducedByMapError,
        OSError,
        json.JSONDecodeError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (AmbiguousMatchingError, OracleInconsistencyError, GenericLineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
