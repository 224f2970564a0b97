"""Command-line front end: solve, cutoff, simulate and oracle."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .blahut import InfeasibleBudget
from .continuous import bound_curve
from .curves import (SweepCurve, cutoff_point, default_grid, parse_grid, sweep,
                     upper_concave_envelope)
from .model import build_example1, build_example2, build_example3, joint_thm1
from .modelfile import ModelFileError, load_model
from .montecarlo import CodecConfig, empirical_cmi, rate_split_codec, sample_joint
from .noncausal import solve_thm2_lower
from .results import SolverOptions
from .strategies import solve_thm3, solve_thm4
from .thm1 import grid_oracle_thm1, solve_thm1

BUILTIN = {"ex1": build_example1, "ex2": build_example2, "ex3": build_example3}
CONTINUOUS = ("dpc", "fading")
SOLVERS = {1: solve_thm1, 2: solve_thm2_lower, 3: solve_thm3, 4: solve_thm4}
MAX_SAMPLES = 10**8


class CliError(Exception):
    """Reported on stderr with exit status 1."""


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", choices=sorted(BUILTIN) + list(CONTINUOUS))
    src.add_argument("--model", metavar="FILE", help="model file")
    common.add_argument("--theorem", type=int, choices=[1, 2, 3, 4])
    pts = common.add_mutually_exclusive_group()
    pts.add_argument("--gamma", type=float, help="single budget")
    pts.add_argument("--sweep", metavar="START:STOP:COUNT", help="budget grid")
    common.add_argument("--tol", type=float, default=None,
                        help="solver tolerance (cutoff: grid tolerance, default 1e-3)")
    common.add_argument("--multistarts", type=int, default=32)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--u-size", type=int, default=None, help="force |U| (theorems 2-3)")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    p = argparse.ArgumentParser(prog="probecap", description=__doc__)
    p.add_argument("--version", action="version", version=f"probecap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve one budget or a sweep")
    sub.add_parser("cutoff", parents=[common], help="smallest budget reaching the maximum")
    sim = sub.add_parser("simulate", parents=[common], help="Monte-Carlo checks (theorem 1)")
    sim.add_argument("--n", type=int, default=100000, help="samples for the CMI estimate")
    sim.add_argument("--bootstrap", type=int, default=100)
    sim.add_argument("--codec", action="store_true", help="run the rate-split codec instead")
    sim.add_argument("--blocklength", type=int, default=8)
    sim.add_argument("--rate-fraction", type=float, default=0.6)
    sim.add_argument("--trials", type=int, default=1000)
    sim.add_argument("--eps", type=float, default=1.5)
    orc = sub.add_parser("oracle", parents=[common], help="compare theorem 1 with the grid oracle")
    orc.add_argument("--resolution", type=float, default=0.01)
    return p


def _model(args):
    if args.model:
        try:
            return load_model(args.model)
        except ModelFileError as exc:
            raise CliError(f"{args.model}:{exc.line}:{exc.column}: {exc}") from None
        except OSError as exc:
            raise CliError(f"cannot read {args.model}: {exc.strerror}") from None
    return BUILTIN[args.example]()


def _opts(args) -> SolverOptions:
    kw = {"multistarts": args.multistarts, "seed": args.seed, "u_size": args.u_size}
    if args.tol is not None and args.command in ("solve", "oracle", "simulate"):
        kw["tol"] = args.tol
    if getattr(args, "resolution", None) is not None:
        kw["resolution"] = args.resolution
    return SolverOptions(**kw)


def _default_theorem(args, m) -> int:
    if args.theorem is not None:
        return args.theorem
    if not m.encoder_only:
        return 4
    # causal probing adds nothing on Example 2's channel; the noncausal bound does
    if args.example == "ex2":
        return 2
    return 1


def _grid(args, m, points=21):
    try:
        if args.sweep:
            return parse_grid(args.sweep)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.gamma is not None:
        return np.array([args.gamma])
    if m is None:
        return np.linspace(0.0, 1.0, points)
    return default_grid(m, points)


def _meta(args, extra=None) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    return {"tool": "probecap", "version": __version__, "seed": args.seed,
            "config": cfg, **(extra or {})}


def _write(path, fmt, curve: SweepCurve, meta):
    if fmt == "csv":
        curve.to_csv(path, meta)
        with open(str(path) + ".json", "w") as fh:
            json.dump(curve.to_json(meta), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(path, "w") as fh:
            json.dump(curve.to_json(meta), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _dump(path, report):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _report_failures(curve: SweepCurve) -> int:
    if not curve.errors:
        return 0
    for i, msg in sorted(curve.errors.items()):
        print(f"failed at gamma={curve.gammas[i]:.6g}: {msg}", file=sys.stderr)
    return 1


def cmd_solve(args) -> int:
    extra = {}
    if args.example in CONTINUOUS:
        if args.theorem is not None:
            raise CliError(f"--theorem does not apply to {args.example}")
        curve = bound_curve(args.example, _grid(args, None))
        extra["bound"] = "lower"
    else:
        m = _model(args)
        th = _default_theorem(args, m)
        gammas = _grid(args, m)
        curve = sweep(SOLVERS[th], m, gammas, _opts(args))
        extra.update(model=m.name, theorem=th)
        if th == 2:
            extra["bound"] = "lower"
            if len(gammas) > 1 and not curve.errors:
                # time sharing between solved points is achievable
                curve = upper_concave_envelope(curve)
                extra["envelope"] = True
    for i, (g, v, c, status) in enumerate(curve.rows()):
        if i not in curve.errors:
            print(f"Γ={g:.6f}  C(Γ)={v:.6f} @ cost {c:.6f}")
    extra.update(monotone=curve.monotone, concave=curve.concave)
    if args.out:
        _write(args.out, args.format, curve, _meta(args, extra))
    return _report_failures(curve)


def _cutoff_model(args):
    if args.example in CONTINUOUS:
        raise CliError("cutoff needs a discrete theorem-1 model")
    m = _model(args)
    if args.theorem not in (None, 1):
        raise CliError("cutoff is defined on theorem 1 curves")
    if not m.encoder_only:
        raise CliError("cutoff needs an encoder-only model")
    return m


def cmd_cutoff(args) -> int:
    m = _cutoff_model(args)
    tol = args.tol if args.tol is not None else 1e-3
    gammas = _grid(args, m, points=51) if args.gamma is None else None
    if gammas is None:
        raise CliError("cutoff takes --sweep, not --gamma")
    curve = sweep(solve_thm1, m, gammas, _opts(args))
    if _report_failures(curve):
        return 1
    refine_tol = min(1e-6, tol)
    try:
        g = cutoff_point(curve, tol=tol, refine_tol=refine_tol)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    r = solve_thm1(m, g, _opts(args))
    print(f"cutoff Γ*={g:.6f} (grid tol {tol:g}, refine tol {refine_tol:g}, "
          f"C={r.value:.6f})")
    report = _meta(args, {"model": m.name, "cutoff": g, "tol": tol, "refine_tol": refine_tol,
                          "value_bits": r.value, "max_value_bits": float(curve.values.max()),
                          "solution": r.to_json()})
    _dump(args.out, report)
    return 0


def cmd_simulate(args) -> int:
    if args.example in CONTINUOUS:
        raise CliError("simulate needs a discrete theorem-1 model")
    if args.theorem not in (None, 1):
        raise CliError("simulate supports theorem 1 only")
    m = _model(args)
    if args.sweep:
        raise CliError("simulate takes a single --gamma")
    gamma = args.gamma if args.gamma is not None else m.cost.max_cost
    opts = _opts(args)
    r = solve_thm1(m, gamma, opts)
    pa, px = r.argmax["pa"], r.argmax["px"]
    if args.codec:
        c1 = solve_thm1(m, m.cost.max_cost, opts).value
        rate = args.rate_fraction * c1
        # all of the rate rides on the input codebook; the action carries none
        cfg = CodecConfig(R1=0.0, R2=rate, n=args.blocklength, eps=args.eps, trials=args.trials)
        try:
            rep = rate_split_codec(m, pa, px, cfg, seed=args.seed)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        body = {"mode": "codec", "gamma": gamma, "rate_bits": rate, **asdict(rep)}
    else:
        if args.n > MAX_SAMPLES:
            raise CliError(f"--n {args.n} exceeds the cap {MAX_SAMPLES}")
        b = sample_joint(joint_thm1(m, pa, px), args.n, seed=args.seed)
        est = empirical_cmi(b, "X", "Y", ["S"], bootstrap=args.bootstrap, seed=args.seed)
        body = {"mode": "estimate", "gamma": gamma, "solver_value_bits": r.value, **est,
                "gap": est["estimate"] - r.value}
        print(f"I(X;Y|S) estimate {est['estimate']:.6f} ± {est['stderr']:.6f} "
              f"(solver {r.value:.6f})")
    text = _dump(args.out, _meta(args, {"model": m.name, "report": body}))
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    if args.example in CONTINUOUS:
        raise CliError("oracle needs a discrete theorem-1 model")
    m = _model(args)
    if args.sweep:
        raise CliError("oracle takes a single --gamma")
    gamma = args.gamma if args.gamma is not None else m.budget
    opts = _opts(args)
    try:
        r = solve_thm1(m, gamma, opts)
        o = grid_oracle_thm1(m, gamma, args.resolution, opts)
    except InfeasibleBudget:
        raise
    except ValueError as exc:
        raise CliError(str(exc)) from None
    gap = o.value - r.value
    print(f"solver {r.value:.6f}  oracle {o.value:.6f}  gap {gap:+.2e}  "
          f"(resolution {args.resolution:g})")
    _dump(args.out, _meta(args, {"model": m.name, "gamma": gamma, "solver_bits": r.value,
                                 "oracle_bits": o.value, "gap": gap,
                                 "resolution": args.resolution}))
    return 0


COMMANDS = {"solve": cmd_solve, "cutoff": cmd_cutoff, "simulate": cmd_simulate,
            "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not args.codec and args.n < 1:
        parser.error("--n must be a positive sample count")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleBudget as exc:
        print(f"error: infeasible budget: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
