"""Batch command line: field/group inspection, audits, censuses, recipes.

Every command is replayable: the resolved parameters form a manifest
(JSON object) and ``--manifest FILE`` reruns one byte-identically.
Randomness comes from a 64-bit linear congruential generator,

    state' = (6364136223846793005 * state + 1442695040888963407) mod 2**64,
    draw below n = (state' >> 32) % n,

seeded per instance by folding (salt, q, instance index) into the run
seed, one LCG step per value.  Instance salts: 1 incidence corpus,
2 image corpus, 3 plane corpus, 4 space-incidence corpus, 5 distance,
6 triple correlation, 8 moment, 9 census, 10 line emission.

Exit status: 0 success, 1 frozen-ceiling regression or explicit-bound
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import calibrate as cal
from . import constructions, incidence, lineworld, simplex
from . import motions as mo
from .errors import TooLarge
from .ffield import (
    Field,
    field_for_order,
    load_point_file,
    make_field,
    format_point,
)
from .seeds import instance_rng, sample_points

SALT_DISTANCE = 5
SALT_TRIPLE = 6
SALT_MOMENT = 8
SALT_CENSUS = 9
SALT_LINES = 10


def _resolve_field(args) -> Field:
    if getattr(args, "q", None):
        return field_for_order(args.q, force=getattr(args, "force", False))
    return make_field(args.p, getattr(args, "r", 1) or 1, force=getattr(args, "force", False))


def _write_out(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_reports(args, reports) -> None:
    if getattr(args, "format", "json") == "csv":
        _write_out(args, incidence.reports_to_csv(reports))
    else:
        _write_out(args, "".join(r.to_json() + "\n" for r in reports))


def _emit_json(args, payloads) -> None:
    _write_out(args, "".join(json.dumps(p, sort_keys=True) + "\n" for p in payloads))


def _load_ceilings(args) -> dict:
    if getattr(args, "ceilings", None):
        return cal.load_ceilings(args.ceilings)
    try:
        return cal.packaged_ceilings()
    except FileNotFoundError:
        return {"entries": {}}


def _ceiling_exit(args, reports) -> int:
    regressions = cal.check_against_ceilings(reports, _load_ceilings(args))
    for theorem, c_star, hi in regressions:
        print(f"ceiling regression: {theorem} c*={c_star} > {hi}", file=sys.stderr)
    return 1 if regressions else 0


# -- commands --------------------------------------------------------------------------


def cmd_field(args) -> int:
    field = _resolve_field(args)
    _emit_json(
        args,
        [
            {
                "p": field.p,
                "r": field.r,
                "q": field.q,
                "modulus": list(field.modulus),
                "q_mod_4": field.q_mod_4,
                "nonzero_squares": sum(1 for a in range(1, field.q) if field.quad_char(a) == 1),
            }
        ],
    )
    return 0


def cmd_group(args) -> int:
    field = _resolve_field(args)
    mats = mo.special_orthogonal(field, args.d) if args.so2 else mo.enumerate_orthogonal(field, args.d)
    payload = {"q": field.q, "d": args.d, "size": len(mats), "special": bool(args.so2)}
    if args.list:
        payload["elements"] = [[list(row) for row in g] for g in mats]
    _emit_json(args, [payload])
    return 0


def cmd_audit_incidence(args) -> int:
    field = _resolve_field(args)
    if field.r != 1 or field.q not in cal.CORPUS_QS:
        print("incidence corpus runs at q in {3, 7, 11}", file=sys.stderr)
        return 2
    reports = []
    for i in range(args.trials):
        for rep in cal.incidence_instance_reports(field.q, args.seed, i, shapes=False):
            if args.theorem in (None, rep.theorem):
                reports.append(rep)
    _emit_reports(args, reports)
    return _ceiling_exit(args, reports)


def cmd_audit_distance(args) -> int:
    field = _resolve_field(args)
    reports = []
    failures = 0
    for i in range(args.trials):
        rng = instance_rng(args.seed, SALT_DISTANCE, field.q, i)
        A = sample_points(rng, field, 2, 1 + rng.below(field.q ** 2))
        B = sample_points(rng, field, 2, 1 + rng.below(field.q ** 2))
        lam = 1 + rng.below(field.q - 1)
        rep = simplex.distance_report(field, A, B, lam)
        reports.append(rep)
        if not all(c.ok for c in rep.side_conditions):
            failures += 1
    _emit_reports(args, reports)
    return 1 if failures else 0


def cmd_audit_moment(args) -> int:
    field = _resolve_field(args)
    reports = []
    for i in range(args.trials):
        rng = instance_rng(args.seed, SALT_MOMENT, field.q, i)
        U = sample_points(rng, field, 2, 1 + rng.below(min(field.q ** 2, cal.SHAPE_U_CAP)))
        P = incidence.PairSet(field, U, U)
        reports.append(incidence.moment_shape_report(P, args.t, "general", args.variant))
    _emit_reports(args, reports)
    return _ceiling_exit(args, reports)


def cmd_audit_triple(args) -> int:
    field = _resolve_field(args)
    payloads = []
    bad = 0
    for i in range(args.trials):
        rng = instance_rng(args.seed, SALT_TRIPLE, field.q, i)
        sets = [sample_points(rng, field, 2, 1 + rng.below(min(field.q ** 2, 20))) for _ in range(3)]
        tc = incidence.triple_correlation(field, *sets, universe="general")
        payloads.append(
            {
                "q": field.q,
                "instance": i,
                "exact": tc.exact,
                "bound_333": tc.bound_333,
                "bound_442": tc.bound_442,
                "holds_333": tc.holds_333,
                "holds_442": tc.holds_442,
            }
        )
        if not (tc.holds_333 and tc.holds_442):
            bad += 1
    _emit_json(args, payloads)
    return 1 if bad else 0


def cmd_audit_kollar(args) -> int:
    reports = [cal.kollar_instance_report(args.seed, i) for i in range(args.trials)]
    _emit_reports(args, reports)
    return _ceiling_exit(args, reports)


def cmd_audit_plane(args) -> int:
    payloads = []
    worst = 0.0
    for i in range(args.trials):
        field, U = cal.plane_instance(args.seed, i)
        audit = lineworld.plane_audit(field, U)
        ratio = audit.max_lines / len(set(U))
        worst = max(worst, ratio)
        payloads.append(
            {
                "q": field.q,
                "instance": i,
                "|U|": len(set(U)),
                "lines": audit.line_count,
                "collisions": audit.collisions,
                "max_lines_in_plane": audit.max_lines,
                "planes_scanned": audit.planes_scanned,
                "ratio": ratio,
            }
        )
    _emit_json(args, payloads)
    return 1 if worst > 4.0 else 0


def cmd_audit_fur(args) -> int:
    field = _resolve_field(args)
    if field.r != 1 or field.q not in cal.CORPUS_QS:
        print("image corpus runs at q in {3, 7, 11}", file=sys.stderr)
        return 2
    reports = []
    for i in range(args.trials):
        for rep in cal.fur_instance_reports(field.q, args.seed, i):
            if args.theorem in (None, rep.theorem):
                reports.append(rep)
    _emit_reports(args, reports)
    return _ceiling_exit(args, reports)


def cmd_census(args) -> int:
    field = _resolve_field(args)
    if args.set == "full-plane":
        from .ffield import all_points

        base = all_points(field, args.d)
    elif args.set == "random":
        rng = instance_rng(args.seed, SALT_CENSUS, field.q, 0)
        base = sample_points(rng, field, args.d, args.size)
    elif args.set == "file":
        base = load_point_file(field, args.set_file)
    else:
        raise ValueError(f"unknown set mode {args.set!r}")
    census = simplex.count_classes(field, [base] * (args.k + 1), args.k, workers=args.workers, force=args.force)
    if args.format == "csv":
        _write_out(args, simplex.census_csv(census))
    else:
        payload = {
            "q": census.q,
            "d": census.d,
            "k": census.k,
            "total": census.total,
            "classes": census.class_count,
            "degenerate_classes": census.degenerate_count,
            "pair_collisions": census.pair_collisions,
        }
        if args.unordered:
            payload["unordered_classes"] = len(simplex.unordered_census(census))
        _emit_json(args, [payload])
    return 0


def cmd_mu_table(args) -> int:
    field = _resolve_field(args)
    if args.verify:
        sweep = simplex.segment_sweep_audit(field)
        if sweep.mu_mismatches or sweep.cap_violations:
            print(f"sweep failures: {sweep.mu_mismatches[:3]} {sweep.cap_violations[:3]}", file=sys.stderr)
            return 1
    lines = ["l1,l2,l3,mu"]
    for l1 in range(1, field.q):
        for l2 in range(field.q):
            for l3 in range(field.q):
                lines.append(f"{l1},{l2},{l3},{simplex.mu_from_lambdas(field, l1, l2, l3)}")
    _write_out(args, "\n".join(lines) + "\n")
    return 0


def cmd_lines(args) -> int:
    field = _resolve_field(args)
    if args.u_file:
        U = load_point_file(field, args.u_file)
    else:
        rng = instance_rng(args.seed, SALT_LINES, field.q, 0)
        U = sample_points(rng, field, 2, args.u_size)
    seen = []
    for u in sorted(set(U)):
        for v in sorted(set(U)):
            line = lineworld.line_from_pair(field, u, v)
            if line not in seen:
                seen.append(line)
    _write_out(args, "".join(lineworld.format_line(line) + "\n" for line in sorted(seen)))
    return 0


def cmd_sharpness_sec3(args) -> int:
    field = make_field(args.p, 3, force=args.force)
    X = tuple(int(t) for t in args.x.split(",")) if args.x else ()
    audit = constructions.sec3_audit(field, args.k, X)
    audit["distance_set_sizes"] = {f"{s},{t}": v for (s, t), v in audit["distance_set_sizes"].items()}
    _emit_json(args, [audit])
    return 0


def cmd_sharpness_fur1(args) -> int:
    field = _resolve_field(args)
    if args.ap:
        start, step, length = (int(t) for t in args.ap.split(","))
        X = constructions.arithmetic_progression(field, start, step, length)
        audit = constructions.strip_audit(field, args.d, X, assume_ap=True)
    else:
        X = tuple(int(t) for t in args.x.split(","))
        audit = constructions.strip_audit(field, args.d, X)
    _emit_json(args, [audit])
    return 0 if audit["containment_exact"] and audit.get("image_at_most_2A", True) else 1


def cmd_sharpness_subfield(args) -> int:
    audit = constructions.subfield_audit(args.p, force=args.force)
    _emit_json(args, [audit])
    entries = _load_ceilings(args).get("entries", {})
    band = entries.get(f"SUBFIELD-p{args.p}")
    if band and not band["lo"] <= audit["ratio_vs_PR13"] <= band["hi"]:
        print(f"subfield ratio {audit['ratio_vs_PR13']} outside band {band}", file=sys.stderr)
        return 1
    return 0


def cmd_calibrate(args) -> int:
    data = cal.calibrate(seed=args.seed, trials=args.trials, workers=args.workers)
    text = cal.ceilings_to_json(data)
    _write_out(args, text)
    return 0


# -- parser ----------------------------------------------------------------------------


def _add_field_opts(p, default_q=None):
    p.add_argument("--q", type=int, default=default_q, help="field order p**r (r <= 3)")
    p.add_argument("--p", type=int, help="characteristic (odd prime)")
    p.add_argument("--r", type=int, default=1, help="extension degree (default 1)")
    p.add_argument("--force", action="store_true", help="override size guardrails")


def _add_io_opts(p):
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--ceilings", help="ceilings file (default: packaged)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fqgeom",
        description="Exhaustive rigid-motion incidence geometry over small finite fields.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--manifest", help="JSON manifest to replay (other flags override it)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("field", help="inspect a field")
    _add_field_opts(p)
    _add_io_opts(p)
    p.set_defaults(fn=cmd_field)

    p = sub.add_parser("group", help="enumerate an orthogonal group")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--so2", action="store_true", help="rotations only")
    p.add_argument("--list", action="store_true", help="include the matrices")
    p.set_defaults(fn=cmd_group)

    audit = sub.add_parser("audit", help="run seeded audit corpora")
    asub = audit.add_subparsers(dest="subcommand")

    p = asub.add_parser("incidence", help="incidence bound templates")
    _add_field_opts(p, default_q=None)
    _add_io_opts(p)
    p.add_argument("--theorem", choices=incidence.AUDIT_IDS + ("I3.1", "I3.3"))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_incidence)

    p = asub.add_parser("distance", help="distance count vs the explicit-constant bound")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_distance)

    p = asub.add_parser("moment", help="moment-sum shape audits")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--variant", choices=incidence.MOMENT_VARIANTS, default="M5.1")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_moment)

    p = asub.add_parser("triple", help="triple correlation vs split bounds")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_triple)

    p = asub.add_parser("kollar", help="space point-line incidence audit")
    _add_io_opts(p)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_kollar)

    p = asub.add_parser("plane", help="max pair lines in a plane")
    _add_io_opts(p)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_plane)

    p = asub.add_parser("fur", help="motion-image lower bound audits")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--theorem", choices=constructions.FUR_IDS)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.set_defaults(fn=cmd_audit_fur)

    p = sub.add_parser("census", help="congruence class census")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--set", choices=("full-plane", "random", "file"), default="full-plane")
    p.add_argument("--size", type=int, default=20, help="random set size")
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.add_argument("--set-file", help="point file for --set file")
    p.add_argument("--unordered", action="store_true", help="also report unordered classes")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("mu-table", help="triangle extension counts per radius pair")
    _add_field_opts(p)
    _add_io_opts(p)
    p.add_argument("--verify", action="store_true", help="exhaustively verify against brute force")
    p.set_defaults(fn=cmd_mu_table)

    p = sub.add_parser("lines", help="emit the pair lines of U x U")
    _add_field_opts(p, default_q=7)
    _add_io_opts(p)
    p.add_argument("--u-size", type=int, default=6)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.add_argument("--u-file")
    p.set_defaults(fn=cmd_lines)

    sharp = sub.add_parser("sharpness", help="replay extreme instances")
    ssub = sharp.add_subparsers(dest="subcommand")

    p = ssub.add_parser("sec3", help="scaled rotation orbits")
    _add_io_opts(p)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--x", help="comma-separated scale set")
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_sharpness_sec3)

    p = ssub.add_parser("fur1", help="strip plus translation set")
    _add_field_opts(p, default_q=7)
    _add_io_opts(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x", help="comma-separated last-coordinate set")
    p.add_argument("--ap", help="start,step,length arithmetic progression")
    p.set_defaults(fn=cmd_sharpness_fur1)

    p = ssub.add_parser("subfield", help="subfield plane inside the cubic extension")
    _add_io_opts(p)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_sharpness_subfield)

    p = sub.add_parser("calibrate", help="build the frozen ceilings file")
    _add_io_opts(p)
    p.add_argument("--seed", type=int, default=cal.DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=cal.DEFAULT_TRIALS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_calibrate)

    return parser


def _manifest_to_argv(manifest: dict) -> list:
    argv = []
    if "command" in manifest:
        argv.append(str(manifest["command"]))
    if "subcommand" in manifest:
        argv.append(str(manifest["subcommand"]))
    for key, value in manifest.items():
        if key in ("command", "subcommand"):
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif isinstance(value, (list, tuple)):
            argv.extend([flag, ",".join(str(v) for v in value)])
        else:
            argv.extend([flag, str(value)])
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--manifest" in argv:
        idx = argv.index("--manifest")
        path = argv[idx + 1]
        rest = argv[:idx] + argv[idx + 2:]
        with open(path) as fh:
            manifest = json.load(fh)
        argv = _manifest_to_argv(manifest) + rest
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "fn", None):
        parser.print_help()
        return 2
    if getattr(args, "q", None) is None and getattr(args, "p", None) is None and hasattr(args, "r"):
        args.q = 7  # a small default field for inspection commands
    try:
        return args.fn(args)
    except TooLarge as exc:
        print(f"guardrail: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
