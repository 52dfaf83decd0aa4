"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 solver non-convergence,
3 a verification subcommand found violations.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path


from . import probes, regions
from .entropy import RenyiOrder, check_reality, renyi_entropy
from .exceptions import NotConverged, QubitEntError
from .maxent import max_entropy
from .phase_space import SignedDistribution
from .regions import boundary_to_csv, fmt, num
from .representation import EmpiricalModel

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


@dataclass
class RunConfig:
    command: str
    out: str | None
    format: str
    seed: int
    jobs: int


def _floats(text: str, flag: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise InputError(f"{flag}: expected {count} numbers, got {len(vals)}")
    return vals


def _ints(text: str, flag: str) -> list[int]:
    vals = _floats(text, flag)
    if any(v != int(v) for v in vals):
        raise InputError(f"{flag}: expected integers, got {text!r}")
    return [int(v) for v in vals]


def _model(text: str) -> EmpiricalModel:
    try:
        return EmpiricalModel(*_floats(text, "--r", 3))
    except QubitEntError as exc:
        raise InputError(f"--r: {exc}") from None


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _note(msg: str):
    print(msg, file=sys.stderr)


def cmd_entropy(args, cfg):
    weights = _floats(args.q, "--q", 8)
    try:
        q = SignedDistribution(weights)
    except ValueError as exc:
        raise InputError(f"--q: {exc}") from None
    order = RenyiOrder(args.order)
    h = renyi_entropy(q, order)
    if cfg.format == "json":
        _emit(cfg, json.dumps({"q": weights, "order": order.alpha,
                               "entropy": num(h.value) if h.defined else None, "defined": h.defined}))
    else:
        _emit(cfg, fmt(h.value) if h.defined else "undefined")


def cmd_maxent(args, cfg):
    res = max_entropy(_model(args.r), args.k)
    d = res.to_dict()
    if cfg.format == "json":
        d["entropy"] = num(d["entropy"])
        d["q"] = [num(v) for v in d["q"]]
        d["gradient_norm"] = num(d["gradient_norm"])
        _emit(cfg, json.dumps(d))
    else:
        header = ["r_x", "r_y", "r_z", "k", "entropy", "iterations", "converged", "gradient_norm"]
        header += [f"q_{i >> 2}{(i >> 1) & 1}{i & 1}" for i in range(8)]
        row = [fmt(v) for v in d["r"]] + [d["k"], fmt(d["entropy"]), d["iterations"],
                                          int(d["converged"]), fmt(d["gradient_norm"])]
        row += [fmt(v) for v in d["q"]]
        _emit(cfg, _csv(header, [row]))


def _margin_text(margin: float) -> str:
    text = f"{margin:.6f}"
    return "0.000000" if text == "-0.000000" else text


def cmd_member(args, cfg):
    m = _model(args.r)
    v = regions.in_region(m, args.k)
    if cfg.format == "json":
        _emit(cfg, json.dumps({"r": list(m.r), "k": args.k, "inside": v.inside,
                               "margin": num(v.margin), "boundary": v.boundary}))
    else:
        _emit(cfg, f"{'inside' if v.inside else 'outside'} margin={_margin_text(v.margin)}")


def cmd_ball(args, cfg):
    m = _model(args.r)
    inside = regions.in_ball(m)
    if cfg.format == "json":
        _emit(cfg, json.dumps({"r": list(m.r), "in_ball": inside, "radius_squared": num(m.radius_squared)}))
    else:
        _emit(cfg, "true" if inside else "false")


def cmd_verify_ball(args, cfg):
    rep = regions.verify_ball_equals_R2(args.samples, cfg.seed, args.band, cfg.jobs)
    if cfg.format == "json":
        _emit(cfg, json.dumps(rep.to_dict()))
    else:
        _emit(cfg, _csv(["samples", "tested", "excluded", "mismatches"],
                        [[rep.samples, rep.tested, rep.excluded, len(rep.mismatches)]]))
    _note(f"verify-ball: {len(rep.mismatches)} mismatches on {rep.tested} points "
          f"({'PASS' if rep.ok else 'FAIL'})")
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_nest(args, cfg):
    rep = regions.verify_nesting(args.k_max, args.rays, cfg.seed, cfg.jobs)
    if cfg.format == "json":
        d = rep.to_dict()
        d["radii"] = [[num(v) for v in row] for row in d["radii"]]
        d["directions"] = [[num(v) for v in row] for row in d["directions"]]
        _emit(cfg, json.dumps(d))
    else:
        header = ["ray", "u_x", "u_y", "u_z"] + [f"radius_k{k}" for k in rep.k_values]
        rows = [[j] + [fmt(v) for v in rep.directions[j]] + [fmt(v) for v in rep.radii[:, j]]
                for j in range(len(rep.directions))]
        _emit(cfg, _csv(header, rows))
    _note(f"nest: k=1..{args.k_max - 1} against the next order on {args.rays} rays, "
          f"{len(rep.violations)} violations ({'PASS' if rep.ok else 'FAIL'})")
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _plane(text):
    try:
        return regions.Plane.parse(text)
    except ValueError as exc:
        raise InputError(f"--plane: {exc}") from None


def _check_res(res):
    if res < 16:
        raise InputError(f"--res: must be at least 16, got {res}")


def cmd_scan(args, cfg):
    _check_res(args.res)
    scan = regions.scan_slice(args.k, _plane(args.plane), args.res, cfg.jobs)
    if cfg.format == "json":
        _emit(cfg, scan.to_json())
    else:
        _emit(cfg, scan.boundary_csv())
        if args.grid:
            Path(args.grid).write_text(scan.grid_csv())
    _note(f"scan: k={args.k} plane {scan.plane} resolution {args.res}, "
          f"{len(scan.boundary) - 1} boundary points")


def cmd_figure3(args, cfg):
    _check_res(args.res)
    plane = _plane(args.plane)
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for k in range(1, args.k_max + 1):
        scan = regions.scan_slice(k, plane, args.res, cfg.jobs)
        if cfg.format == "json":
            path = outdir / f"boundary_k{k}.json"
            path.write_text(scan.to_json(include_grid=False) + "\n")
        else:
            path = outdir / f"boundary_k{k}.csv"
            path.write_text(boundary_to_csv(scan.boundary))
        print(f"k={k} {path} {len(scan.boundary) - 1} points")


def cmd_probe_beta(args, cfg):
    ks = _ints(args.k, "--k")
    eps = _floats(args.eps, "--eps")
    try:
        reports = [probes.probe_beta(k, eps, cfg.jobs) for k in ks]
    except ValueError as exc:
        raise InputError(f"--eps/--k: {exc}") from None
    if cfg.format == "json":
        dicts = [r.to_dict() for r in reports]
        _emit(cfg, json.dumps(dicts[0] if len(dicts) == 1 else dicts))
    else:
        rows = [[r.k, fmt(e), fmt(h), fmt(g)]
                for r in reports for e, h, g in zip(r.epsilons, r.sup_entropies, r.gaps)]
        rows += [[r.k, 0, fmt(r.pole_entropy), fmt(abs(r.pole_entropy - 2.0))] for r in reports]
        _emit(cfg, _csv(["k", "epsilon", "entropy", "gap"], rows))


def cmd_unbiasedness(args, cfg):
    rep = probes.check_unbiasedness_consistency(args.k_max, args.tol, cfg.jobs)
    if cfg.format == "json":
        _emit(cfg, json.dumps(rep.to_dict()))
    else:
        rows = [[k + 1, fmt(h), fmt(ey), fmt(ez)] for k, (h, ey, ez)
                in enumerate(zip(rep.pole_entropies, rep.extent_y, rep.extent_z))]
        _emit(cfg, _csv(["k", "pole_entropy", "extent_y", "extent_z"], rows))
    _note(f"unbiasedness: common extent {rep.intersection_extent:.3g} "
          f"({'PASS' if rep.consistent else 'FAIL'})")
    return EXIT_OK if rep.consistent else EXIT_VERIFY


def cmd_reality_check(args, cfg):
    v = check_reality(args.alpha, args.trials, cfg.seed)
    if cfg.format == "json":
        _emit(cfg, json.dumps({
            "alpha": v.alpha, "trials": int(v.trials), "always_real": v.always_real,
            "counterexample": None if v.counterexample is None else [num(x) for x in v.counterexample],
            "counterexample_power_sum": None if v.counterexample_power_sum is None
            else num(v.counterexample_power_sum),
            "lower_bound": v.lower_bound, "reason": v.reason}))
    elif v.always_real:
        bound = "" if v.lower_bound is None else f" lower_bound={fmt(v.lower_bound)}"
        _emit(cfg, f"always_real trials={int(v.trials)}{bound}")
    else:
        _emit(cfg, "counterexample q=" + ",".join(fmt(x) for x in v.counterexample))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes, 0 = all CPUs (default 1)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (directory for figure3); default stdout")

    parser = _Parser(prog="qubitent", description="Entropy-based reconstruction of the qubit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("entropy", cmd_entropy, "Rényi entropy of a signed distribution")
    p.add_argument("--q", required=True, help="8 comma-separated weights, index 4a+2b+c")
    p.add_argument("--order", type=float, required=True, help="Rényi order alpha")

    p = add("maxent", cmd_maxent, "maximal H_2k over the representations of a model")
    p.add_argument("--r", required=True, help="r_x,r_y,r_z")
    p.add_argument("--k", type=int, required=True)

    p = add("member", cmd_member, "membership of a model in R_2k")
    p.add_argument("--r", required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("ball", cmd_ball, "membership of a model in the unit ball")
    p.add_argument("--r", required=True)

    p = add("verify-ball", cmd_verify_ball, "compare R_2 with the unit ball on random points")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--band", type=float, default=1e-6, help="skip points this close to the sphere")

    p = add("nest", cmd_nest, "check R_2k inside R_2(k+1) along random rays")
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--rays", type=int, default=64)

    p = add("scan", cmd_scan, "margin grid and boundary of an R_2k slice")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--plane", default="z=0")
    p.add_argument("--res", type=int, default=regions.DEFAULT_RESOLUTION)
    p.add_argument("--grid", default=None, help="also write the margin grid CSV here")

    p = add("figure3", cmd_figure3, "boundary files for R_2 .. R_2k_max on a slice")
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--plane", default="z=0")
    p.add_argument("--res", type=int, default=regions.DEFAULT_RESOLUTION)

    p = add("probe-beta", cmd_probe_beta, "max H_2k at (1, eps, 0) for shrinking eps")
    p.add_argument("--k", default="1,2,3,4,5", help="comma-separated k values")
    p.add_argument("--eps", default=",".join(str(e) for e in probes.DEFAULT_EPSILONS))

    p = add("unbiasedness", cmd_unbiasedness, "which f_x = 1 models lie in every R_2k")
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--tol", type=float, default=0.0)

    p = add("reality-check", cmd_reality_check, "search for signed q with non-real H_alpha")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    return parser


_LIST_FLAGS = ("--q", "--r", "--eps", "--k")


def _glue_negative_lists(argv):
    # argparse reads "-0.5,0,0" as an option; bind it to its flag explicitly
    out, i = [], 0
    while i < len(argv):
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if argv[i] in _LIST_FLAGS and nxt[:1] == "-" and (nxt[1:2].isdigit() or nxt[1:2] == "."):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_lists(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(args.command, args.out, args.format, args.seed, args.jobs)
    if cfg.jobs < 0:
        _note("qubitent: error: --jobs must be >= 0")
        return EXIT_INPUT
    try:
        code = args.func(args, cfg)
    except NotConverged as exc:
        _note(f"qubitent: solver did not converge: {exc}")
        return EXIT_SOLVER
    except (InputError, QubitEntError, ValueError) as exc:
        _note(f"qubitent {cfg.command}: error: {exc}")
        return EXIT_INPUT
    return code or EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
