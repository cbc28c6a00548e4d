"""``osc-lab`` command line."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from ..bellman import BellmanParams, epsilon_tilde, simulate_induction, split_search
from ..classes import a2_report, norm_report, verify_rearrangement
from ..errors import DomainError, EvaluationError, PreconditionError
from ..functionals import DEFAULT_CONFIG, big_w, grid_oracle_w, minimize_c, v_c
from ..records import write_csv
from ..steps import Interval, StepFunction, from_json, to_json
from ..transforms import rearrange_decreasing, weight_from_phi
from ..weights import parse_weight
from .campaign import CampaignConfig, run_campaign


def _load(path: str) -> StepFunction:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return from_json(text)


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _cfg(args):
    return DEFAULT_CONFIG.with_grid(args.grid) if args.grid else DEFAULT_CONFIG


def _interval(args, phi):
    return Interval(*args.interval) if args.interval else phi.domain


def _iv(L):
    return [L.a, L.b]


def cmd_eval(args):
    phi = _load(args.input)
    Q = parse_weight(args.weight)
    J = _interval(args, phi)
    cfg = _cfg(args)
    if args.functional == "vc":
        if args.c is None:
            raise SystemExit("eval vc needs --c")
        res = {"value": v_c(phi, J, args.c, Q), "c_star": args.c, "witness": _iv(J)}
    elif args.functional == "v":
        r = minimize_c(phi, J, Q, cfg)
        res = {"value": r.value, "c_star": r.c_star, "witness": _iv(J)}
    else:
        r = big_w(phi, J, Q, cfg)
        c = minimize_c(phi, r.witness, Q, cfg).c_star
        res = {"value": r.value, "c_star": c, "witness": _iv(r.witness), "method": r.method}
    _emit(json.dumps(res), args.out)


def cmd_oracle(args):
    phi = _load(args.input)
    Q = parse_weight(args.weight)
    J = _interval(args, phi)
    cfg = _cfg(args)
    r = grid_oracle_w(phi, J, Q, cfg, resolution=args.grid or cfg.grid_resolution)
    c = minimize_c(phi, r.witness, Q, cfg).c_star
    _emit(json.dumps({"value": r.value, "c_star": c, "witness": _iv(r.witness),
                      "method": r.method}), args.out)


def cmd_norm(args):
    phi = _load(args.input)
    cfg = _cfg(args)
    out = {}
    if args.p is not None:
        rep = norm_report(phi, args.p, cfg)
        out["bmo"] = {"p": rep.p, "inf_variant": rep.norm_inf_variant,
                      "classic": rep.norm_classic_variant,
                      "inf_witness": _iv(rep.inf_witness),
                      "classic_witness": _iv(rep.classic_witness)}
    if args.a2 or args.p is None:
        # the input is read as log w
        rep = a2_report(weight_from_phi(phi), cfg)
        out["a2"] = {"inf_variant": rep.char_inf_variant, "classic": rep.char_classic,
                     "inf_witness": _iv(rep.inf_witness),
                     "classic_witness": _iv(rep.classic_witness)}
    _emit(json.dumps(out), args.out)


def cmd_rearrange(args):
    _emit(to_json(rearrange_decreasing(_load(args.input))), args.out)


def _params(args, phi, J, Q, cfg):
    eps = args.epsilon
    et = args.epsilon_tilde
    if et is None:
        et = epsilon_tilde(phi, J, eps, Q, cfg)
        if et is None:
            raise PreconditionError("W(phi, J) is not below Q(eps (1 - 2**-m)) for any m <= 40")
    if args.delta is None:
        return BellmanParams.choose(Q, eps, et)
    return BellmanParams(eps, et, args.delta).validate_for(Q)


def cmd_split(args):
    phi = _load(args.input)
    Q = parse_weight(args.weight)
    cfg = _cfg(args)
    J = _interval(args, phi)
    params = _params(args, phi, J, Q, cfg)
    sp = split_search(phi, J, params, Q, cfg)
    _emit(json.dumps({"t": sp.t, "c_used": sp.c_used, "psi_left": sp.psi_left,
                      "psi_right": sp.psi_right, "J_minus": _iv(sp.J_minus),
                      "J_plus": _iv(sp.J_plus), "iterations": sp.iterations,
                      "epsilon": params.epsilon, "epsilon_tilde": params.epsilon_tilde,
                      "delta": params.delta}), args.out)


def cmd_induct(args):
    phi = _load(args.input)
    Q = parse_weight(args.weight)
    cfg = _cfg(args)
    J = _interval(args, phi)
    params = _params(args, phi, J, Q, cfg)
    res = simulate_induction(phi, J, args.epsilon, Q, cfg, depth=args.depth, params=params)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            res.write_trace(fh)
    else:
        res.write_trace(sys.stdout)
    print(json.dumps({"sums": res.sums, "depth_reached": res.depth_reached,
                      "size_bounds_ok": res.size_bounds_ok,
                      "stopped_early": res.stopped_early}), file=sys.stderr)


def cmd_verify(args):
    phi = _load(args.input)
    cfg = _cfg(args)
    weights = args.weight.split(",")
    recs = [verify_rearrangement(phi, parse_weight(w), cfg) for w in weights]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        write_csv(recs, fh)
    finally:
        if args.out:
            fh.close()
    return 1 if any(r.status == "fail" for r in recs) else 0


def cmd_campaign(args):
    config = CampaignConfig.from_file(args.config) if args.config else CampaignConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.samples is not None:
        changes["samples"] = args.samples
    if args.checks:
        changes["checks"] = tuple(args.checks.split(","))
    if args.weight:
        changes["weights"] = tuple(args.weight.split(","))
    if args.max_segments is not None:
        changes["max_segments"] = args.max_segments
    if args.grid:
        changes["optimizer"] = config.optimizer.with_grid(args.grid)
    if args.oracle_mode:
        changes["oracle_mode"] = True
    if changes:
        config = replace(config, **changes)
    summary = run_campaign(config, out=args.out, workers=args.workers)
    print(summary.text(), file=sys.stderr)
    return summary.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osc-lab", description=(
        "Averaging functionals V_c, V, W of step functions on [0, 1], "
        "rearrangement checks and Bellman-function experiments."))
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weight="power:2", needs_input=True):
        if needs_input:
            sp.add_argument("input", help="step function JSON file, or - for stdin")
        sp.add_argument("--weight", default=weight,
                        help="power:P, exp, cosh or reg:BASE:N (default %(default)s)")
        sp.add_argument("--grid", type=int, default=None, help="grid resolution")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--config", default=None, help="JSON configuration file")
        sp.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"), default=None)

    sp = sub.add_parser("eval", help="V_c, V or W of one function")
    common(sp)
    sp.add_argument("--functional", choices=("vc", "v", "w"), default="w")
    sp.add_argument("--c", type=float, default=None)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("norm", help="BMO and A2 reports (input read as log w for A2)")
    common(sp)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--a2", action="store_true")
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("rearrange", help="decreasing rearrangement as JSON")
    common(sp)
    sp.set_defaults(func=cmd_rearrange)

    for name, fn, helptext in (("split", cmd_split, "splitting search on one function"),
                               ("induct", cmd_induct, "recursive splitting trace as CSV")):
        sp = sub.add_parser(name, help=helptext)
        common(sp, weight="power:2")
        sp.add_argument("--epsilon", type=float, default=1.0)
        sp.add_argument("--epsilon-tilde", type=float, default=None)
        sp.add_argument("--delta", type=float, default=None)
        if name == "induct":
            sp.add_argument("--depth", type=int, default=8)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("verify", help="rearrangement inequality for one function")
    common(sp, weight="power:1,power:1.5,power:2,exp,cosh")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("campaign", help="seeded property campaign, CSV report")
    common(sp, weight=None, needs_input=False)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--checks", default=None, help="comma separated check names or all")
    sp.add_argument("--max-segments", type=int, default=None)
    sp.add_argument("--oracle-mode", action="store_true")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("oracle", help="grid-only W")
    common(sp)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except (DomainError, EvaluationError, PreconditionError, ValueError, OSError) as exc:
        print(f"osc-lab: error: {exc}", file=sys.stderr)
        return 2
    return int(rc or 0)


if __name__ == "__main__":
    sys.exit(main())
