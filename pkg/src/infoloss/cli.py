"""Command-line entry point.

Subcommands: info, coupling verify, bound eval|sweep, ib curve,
lab trial|tail|stability, verify all, fig toy|bound. Outputs land under
--out (the INFOLOSS_OUT env var overrides it). Exit codes: 0 ok,
1 check failure, 2 config error, 3 io error.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import os
import sys
from pathlib import Path

from . import bounds, figures, lab, oracles
from .coupling import build_coupling, verify_coupling
from .dists import load_model
from .errors import ConfigError, DomainError, InfoLossError
from .ib import ib_curve
from .info import model_info

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _out_dir(args) -> Path:
    out = os.environ.get("INFOLOSS_OUT") or args.out
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _parse_params(raw: str) -> dict:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--params is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("--params must be a JSON object")
    return doc


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_info(args) -> int:
    model = load_model(args.model)
    report = model_info(model)
    doc = dataclasses.asdict(report)
    if args.json:
        print(_dump(doc))
    else:
        for key, val in doc.items():
            print(f"{key:>14s} = {val:.12g}")
    return EXIT_OK


def _cmd_coupling_verify(args) -> int:
    truth = load_model(args.model)
    est = load_model(args.est)
    if est.p_y_given_x.rows.shape != truth.p_y_given_x.rows.shape:
        raise ConfigError("estimated model's conditional shape does not match the truth")
    c = build_coupling(truth.p_x, truth.p_y_given_x, est.p_y_given_x)
    report = verify_coupling(c, truth.p_x, truth.p_y_given_x, est.p_y_given_x)
    doc = report.to_dict()
    doc["rho"] = c.rho
    doc["degenerate"] = c.degenerate
    print(_dump(doc))
    return EXIT_OK if report.passed else EXIT_CHECK


_FORMULAS = {
    "thm1": (bounds.thm1_bound, ["delta_bar", "i_xz"], []),
    "cor1": (bounds.cor1_bound, ["delta_bar", "h_x"], []),
    "type2": (bounds.type2_bound, ["k_value", "eps"], []),
    "old": (bounds.old_bound, ["y_card", "m", "i_xz"], ["c"]),
    "pinsker": (bounds.pinsker_delta_bound, ["cross_entropy_nats"], []),
    "thm3": (bounds.thm3_exponent, ["zeta", "eps"], []),
    "thm4": (None, ["m", "y_card", "eps", "zeta", "k_c", "r"], ["m_prime_max"]),
    "insight": (None, ["m", "y_card", "nu", "zeta", "k_c", "r"], ["m_prime_max"]),
}

_INT_PARAMS = {"y_card", "m", "m_prime_max"}


def _eval_formula(formula: str, params: dict):
    func, required, optional = _FORMULAS[formula]
    unknown = set(params) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown parameter {sorted(unknown)[0]!r} for formula {formula!r}")
    missing = [k for k in required if k not in params]
    if missing:
        raise ConfigError(f"formula {formula!r} is missing parameter {missing[0]!r}")
    vals = {k: (int(v) if k in _INT_PARAMS else float(v)) for k, v in params.items()}
    if formula in ("thm4", "insight"):
        k_model = bounds.KModel(k_c=vals.pop("k_c"), r=vals.pop("r"))
        if formula == "thm4":
            bound, argmin = bounds.thm4_tail_bound(
                vals["m"], vals["y_card"], vals["eps"], vals["zeta"], k_model,
                vals.get("m_prime_max"),
            )
            return bound, {"argmin_m_prime": argmin}
        value = bounds.insight_delta_bound(
            vals["m"], vals["y_card"], vals["nu"], vals["zeta"], k_model,
            vals.get("m_prime_max"),
        )
        return value, {}
    args = [vals[k] for k in required] + [vals[k] for k in optional if k in vals]
    return func(*args), {}


def _cmd_bound_eval(args) -> int:
    params = _parse_params(args.params)
    if args.formula not in _FORMULAS:
        raise ConfigError(f"unknown formula {args.formula!r}")
    value, extra = _eval_formula(args.formula, params)
    doc = {"formula": args.formula, "inputs": params, "value": value}
    doc.update(extra)
    print(_dump(doc))
    return EXIT_OK


def _cmd_bound_sweep(args) -> int:
    params = _parse_params(args.params)
    if args.formula not in _FORMULAS:
        raise ConfigError(f"unknown formula {args.formula!r}")
    grid_keys = [k for k, v in params.items() if isinstance(v, list)]
    fixed = {k: v for k, v in params.items() if k not in grid_keys}
    grids = [params[k] for k in grid_keys]
    func, required, optional = _FORMULAS[args.formula]
    columns = [k for k in required + optional if k in params]

    out = _out_dir(args) / f"bound_sweep_{args.formula}.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        header = columns + ["value"]
        if args.formula == "thm4":
            header.append("argmin_m_prime")
        fh.write(",".join(header) + "\n")
        for combo in itertools.product(*grids) if grids else [()]:
            point = dict(fixed)
            point.update(dict(zip(grid_keys, combo)))
            value, extra = _eval_formula(args.formula, point)
            row = [f"{point[k]:.12g}" for k in columns] + [f"{value:.12g}"]
            if args.formula == "thm4":
                row.append(str(extra["argmin_m_prime"]))
            fh.write(",".join(row) + "\n")
    print(str(out))
    return EXIT_OK


def _cmd_ib_curve(args) -> int:
    model = load_model(args.model)
    betas = sorted(float(b) for b in args.betas.split(","))
    curve = ib_curve(model.joint_xy(), betas, args.z_card,
                     restarts=args.restarts, seed=args.seed)
    out = _out_dir(args) / "ib_curve.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("beta,i_xz_bits,i_yz_bits,converged,iterations,eps_subopt\n")
        for sol in curve:
            fh.write(f"{sol.beta:.12g},{sol.i_xz:.12g},{sol.i_yz:.12g},"
                     f"{int(sol.converged)},{sol.iterations},{sol.eps_subopt:.12g}\n")
    print(str(out))
    return EXIT_OK


def _cmd_lab_trial(args) -> int:
    cfg = lab.load_experiment(args.config)
    records = lab.run_grid(cfg["model"], cfg["learner"], cfg["m_grid"],
                           cfg["trials"], cfg["base_seed"])
    out = _out_dir(args) / "trials.csv"
    lab.write_trials_csv(out, records)
    print(str(out))
    return EXIT_OK


def _cmd_lab_tail(args) -> int:
    cfg = lab.load_experiment(args.config)
    records = lab.run_grid(cfg["model"], cfg["learner"], cfg["m_grid"],
                           cfg["trials"], cfg["base_seed"])
    estimates = lab.tail_estimates(records, cfg["eps"])
    outdir = _out_dir(args)
    lab.write_trials_csv(outdir / "trials.csv", records)
    hyp_rates = {
        str(m): sum(r.hyp_violation_rate for r in records if r.m == m)
        / max(1, sum(1 for r in records if r.m == m))
        for m in cfg["m_grid"]
    }
    lab.write_tail_json(outdir / "tail.json", estimates, meta={
        "learner": cfg["learner"].descriptor,
        "base_seed": cfg["base_seed"],
        "hypothesis_violation_rate": hyp_rates,
    })
    print(str(outdir / "tail.json"))
    return EXIT_OK


_STABILITY_KEYS = {"model", "learner", "m", "seed", "perturb_mass",
                   "ladder_steps", "probe_seed"}


def _cmd_lab_stability(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    unknown = set(doc) - _STABILITY_KEYS
    if unknown:
        raise ConfigError(f"unknown stability config key {sorted(unknown)[0]!r}")
    for key in ("model", "learner", "m", "seed"):
        if key not in doc:
            raise ConfigError(f"stability config is missing required key {key!r}")
    model = load_model(doc["model"])
    learner = lab.build_learner(doc["learner"])
    m = int(doc["m"])
    dataset = lab.sample_dataset(model, m, int(doc["seed"]))
    mass = float(doc.get("perturb_mass", 1.0 / m))
    steps = int(doc.get("ladder_steps", 6))
    ladder = lab.stability_ladder(learner, dataset, model.x_card, model.y_card,
                                  mass, steps, int(doc.get("probe_seed", 0)))
    out = _out_dir(args) / "stability.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("perturb_mass,delta_tv\n")
        for k, val in enumerate(ladder):
            fh.write(f"{mass * 0.5 ** k!r},{val!r}\n")
    print(str(out))
    return EXIT_OK


def _cmd_verify_all(args) -> int:
    reports, ok = oracles.verify_all(seeds=args.seeds, seed=args.seed)
    if args.json:
        print(_dump({"pass": ok, "reports": [r.to_dict() for r in reports]}))
    else:
        for r in reports:
            mark = "PASS" if r.passed else "FAIL"
            print(f"[{mark}] {r.name:<28s} gap={r.gap:.3e}  {r.instance}")
        print("overall:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_fig_toy(args) -> int:
    spec = figures.make_toy_spec(args.panel, step=args.step)
    points = figures.emit_toyfig(spec)
    out = _out_dir(args) / f"toyfig_{args.panel}.csv"
    figures.write_curves_csv(out, points)
    print(str(out))
    return EXIT_OK


def _cmd_fig_bound(args) -> int:
    params = _parse_params(args.params)
    points = figures.emit_bound_fig(params)
    out = _out_dir(args) / "bound_fig.csv"
    figures.write_curves_csv(out, points)
    print(str(out))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infoloss",
        description="Information-loss bounds on finite models: exact quantities, "
                    "couplings, bound formulas, IB curves, and a sampling lab.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=".", help="output directory (INFOLOSS_OUT overrides)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("info", help="exact information report of a model file")
    p.add_argument("--model", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("coupling", help="coupling construction checks")
    csub = p.add_subparsers(dest="subcommand", required=True)
    pv = csub.add_parser("verify", help="verify the coupling of truth vs estimate")
    pv.add_argument("--model", required=True, help="true model JSON")
    pv.add_argument("--est", required=True, help="estimated model JSON")
    add_common(pv)
    pv.set_defaults(func=_cmd_coupling_verify)

    p = sub.add_parser("bound", help="bound formula evaluation")
    bsub = p.add_subparsers(dest="subcommand", required=True)
    pe = bsub.add_parser("eval", help="evaluate one formula")
    pe.add_argument("--formula", required=True, choices=sorted(_FORMULAS))
    pe.add_argument("--params", required=True, help="JSON object of inputs")
    add_common(pe)
    pe.set_defaults(func=_cmd_bound_eval)
    ps = bsub.add_parser("sweep", help="grid sweep; list-valued params are crossed")
    ps.add_argument("--formula", required=True, choices=sorted(_FORMULAS))
    ps.add_argument("--params", required=True)
    add_common(ps)
    ps.set_defaults(func=_cmd_bound_sweep)

    p = sub.add_parser("ib", help="information bottleneck")
    isub = p.add_subparsers(dest="subcommand", required=True)
    pc = isub.add_parser("curve", help="frontier sweep over beta")
    pc.add_argument("--model", required=True)
    pc.add_argument("--z-card", type=int, required=True)
    pc.add_argument("--betas", required=True, help="comma-separated beta grid")
    pc.add_argument("--restarts", type=int, default=4)
    add_common(pc)
    pc.set_defaults(func=_cmd_ib_curve)

    p = sub.add_parser("lab", help="Monte Carlo sampling lab")
    lsub = p.add_subparsers(dest="subcommand", required=True)
    pt = lsub.add_parser("trial", help="per-trial CSV for an experiment config")
    pt.add_argument("--config", required=True)
    add_common(pt)
    pt.set_defaults(func=_cmd_lab_trial)
    pl = lsub.add_parser("tail", help="trials plus tail-frequency JSON")
    pl.add_argument("--config", required=True)
    add_common(pl)
    pl.set_defaults(func=_cmd_lab_tail)
    pst = lsub.add_parser("stability", help="halving-ladder stability probe")
    pst.add_argument("--config", required=True)
    add_common(pst)
    pst.set_defaults(func=_cmd_lab_stability)

    p = sub.add_parser("verify", help="numeric oracles")
    vsub = p.add_subparsers(dest="subcommand", required=True)
    pa = vsub.add_parser("all", help="run every oracle suite")
    pa.add_argument("--seeds", type=int, default=1000)
    add_common(pa)
    pa.set_defaults(func=_cmd_verify_all)

    p = sub.add_parser("fig", help="figure data emission")
    fsub = p.add_subparsers(dest="subcommand", required=True)
    pf = fsub.add_parser("toy", help="pinned closed-form panels")
    pf.add_argument("--panel", required=True,
                    choices=["low_entropy_new", "low_entropy_old", "high_entropy_new"])
    pf.add_argument("--step", type=float, default=0.25)
    add_common(pf)
    pf.set_defaults(func=_cmd_fig_toy)
    pb = fsub.add_parser("bound", help="formula-mode figure")
    pb.add_argument("--params", required=True)
    add_common(pb)
    pb.set_defaults(func=_cmd_fig_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON ({exc})", file=sys.stderr)
        return EXIT_CONFIG
    except InfoLossError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
