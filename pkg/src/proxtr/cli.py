"""Command-line front end.

Subcommands::

    proxtr verify   reproduce the exact iteration count on the slow instance
    proxtr solve    run the solver on a builtin problem
    proxtr emit     write CSV samples of the slow instance for plotting
    proxtr bounds   print the worst-case iteration bounds

Settings come from an optional JSON config (``--config``) and are overridden
by individual flags.  Exit codes: 0 success, 1 count mismatch or failure,
2 iteration limit reached, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import adversary
from .bounds import BoundInputs, delta_min, delta_succ, successful_bound, unsuccessful_bound
from .driver import HessianPolicy, SolveResult, Status, TRParams, run
from .problems import builtin

EXIT_OK, EXIT_MISMATCH, EXIT_MAXITER, EXIT_IO = 0, 1, 2, 3

LOG_HEADER = "outer    inner     f(x)     h(x) √ξcp/√ν      √ξ        ρ       Δ     ‖x‖     ‖s‖    ‖Bₖ‖"
# (width, attribute) per numeric column after outer/inner
_LOG_COLUMNS = [
    (9, "f_val"), (9, "h_val"), (8, "criticality"), (8, "sqrt_xi"), (9, "rho"),
    (8, "delta"), (8, "x_norm"), (8, "s_norm"), (8, "B_norm"),
]


_STATUS_TEXT = {
    Status.FIRST_ORDER_STATIONARY: "first-order stationary",
    Status.MAX_ITER: "maximum iterations reached",
    Status.ERROR: "error",
}


@dataclasses.dataclass
class ExperimentConfig:
    problem: dict
    params: dict = dataclasses.field(default_factory=dict)
    policy: dict | None = None
    subsolver: str | None = None
    out: str | None = None
    samples: int = 2000

    @property
    def is_adversarial(self) -> bool:
        return "adversarial" in self.problem

    def adversarial_instance(self) -> adversary.AdversarialInstance:
        adv = self.problem["adversarial"]
        kw = {k: self.params[k] for k in ("alpha", "beta", "gamma3", "delta_max") if k in self.params}
        return adversary.build_instance(float(adv["epsilon"]), float(adv.get("p", 0.1)), **kw)

    def hessian_policy(self, default: HessianPolicy) -> HessianPolicy:
        if not self.policy:
            return default
        return HessianPolicy(**self.policy)


def _color(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def format_log_row(rec) -> str:
    parts = [f"{rec.k + 1:5d}", f"{rec.inner:8d}"]
    for width, attr in _LOG_COLUMNS:
        val = getattr(rec, attr)
        parts.append(" " * width if math.isnan(val) else f"{val:{width}.1e}")
    return " ".join(parts[:2]) + "".join(parts[2:])


def format_log(result: SolveResult) -> str:
    lines = [LOG_HEADER] + [format_log_row(r) for r in result.history]
    lines.append(f"TR: terminating with √ξcp/√ν = {result.final_criticality!r}")
    lines.append(f'"Execution stats: {_STATUS_TEXT[result.status]}"')
    return "\n".join(lines)


def write_history(result: SolveResult, path) -> None:
    fields = [f.name for f in dataclasses.fields(result.history[0])] if result.history else []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for rec in result.history:
            row = []
            for name in fields:
                val = getattr(rec, name)
                row.append(val.value if hasattr(val, "value") else val)
            writer.writerow(row)


def _write_xy(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def adversarial_audits(inst: adversary.AdversarialInstance, result: SolveResult) -> list[str]:
    """Checks specific to the slow instance, on top of the driver's own audits."""
    problems = list(result.violations)
    for rec in result.history[:-1]:
        if rec.model_error > 0.5 * (1.0 + rec.B_norm) * rec.s_norm**2 + 1e-10:
            problems.append(f"k={rec.k}: model error bound with kappa_ubd = 1/2 failed")
        if abs(rec.rho - 2.0) > 1e-10:
            problems.append(f"k={rec.k}: rho = {rec.rho!r} differs from 2")
        if rec.s_norm > min(rec.delta, inst.beta * rec.s1_norm):
            problems.append(f"k={rec.k}: step exceeds min(delta, beta*|s1|)")
    if result.n_unsuccessful:
        problems.append(f"{result.n_unsuccessful} unsuccessful iterations")
    return problems


def cmd_verify(cfg: ExperimentConfig) -> int:
    if not cfg.is_adversarial:
        print("verify needs an adversarial problem", file=sys.stderr)
        return EXIT_MISMATCH
    inst = cfg.adversarial_instance()
    params = inst.params(max_iter=cfg.params.get("max_iter"))
    result = run(inst.problem(), params, inst.policy(), subsolver_mode="analytic")
    print(format_log(result))
    problems = adversarial_audits(inst, result)
    for msg in problems:
        print(f"audit: {msg}")
    ok = result.iterations == inst.k_eps and result.status is Status.FIRST_ORDER_STATIONARY and not problems
    verdict = _color("PASS", "32") if ok else _color("FAIL", "31")
    print(f"observed iterations = {result.iterations}, k_eps = {inst.k_eps}: {verdict}")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_solve(cfg: ExperimentConfig) -> int:
    if "builtin" not in cfg.problem:
        print("solve needs a builtin problem", file=sys.stderr)
        return EXIT_MISMATCH
    case = builtin(cfg.problem["builtin"])
    params = TRParams(**cfg.params)
    policy = cfg.hessian_policy(case.policy)
    result = run(case.problem, params, policy, subsolver_mode=cfg.subsolver or "iterative")
    print(format_log(result))
    print("x* =", np.array2string(result.final_x, precision=10))
    if result.message:
        print(result.message, file=sys.stderr)
    if cfg.out and result.history:
        try:
            write_history(result, cfg.out)
        except OSError as exc:
            print(f"cannot write {cfg.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    if result.status is Status.FIRST_ORDER_STATIONARY:
        return EXIT_OK
    return EXIT_MAXITER if result.status is Status.MAX_ITER else EXIT_MISMATCH


def emit_samples(inst: adversary.AdversarialInstance, samples: int = 2000) -> np.ndarray:
    """Uniform grid over [x_{-1}, x_{k_eps+1}] merged with the knots, plus one point on each plateau."""
    lo, hi = inst.x[0], inst.x[-1]
    grid = np.linspace(lo, hi, samples)
    return np.unique(np.concatenate([[lo - 0.5], grid, inst.x, [hi + 0.5]]))


def cmd_emit(cfg: ExperimentConfig) -> int:
    if not cfg.is_adversarial:
        print("emit needs an adversarial problem", file=sys.stderr)
        return EXIT_MISMATCH
    inst = cfg.adversarial_instance()
    out = Path(cfg.out or ".")
    xs = emit_samples(inst, cfg.samples)
    ks = range(inst.k_eps + 2)
    try:
        out.mkdir(parents=True, exist_ok=True)
        xs_list = xs.tolist()
        _write_xy(out / "f.csv", ["x", "f"], zip(map(repr, xs_list), map(repr, adversary.eval_f(inst, xs).tolist())))
        _write_xy(out / "fprime.csv", ["x", "fprime"],
                  zip(map(repr, xs_list), map(repr, adversary.eval_fprime(inst, xs).tolist())))
        _write_xy(out / "iterates.csv", ["k", "x_k"], ((k, repr(inst.at("x", k))) for k in ks))
        _write_xy(out / "steps.csv", ["k", "s_k"], ((k, repr(inst.at("s", k))) for k in ks))
        adversary.write_table(inst, out / "instance.csv")
    except OSError as exc:
        print(f"cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote f.csv, fprime.csv, iterates.csv, steps.csv, instance.csv to {out}")
    return EXIT_OK


def bound_report(cfg: ExperimentConfig) -> tuple[dict, SolveResult]:
    if cfg.is_adversarial:
        inst = cfg.adversarial_instance()
        params = inst.params(max_iter=cfg.params.get("max_iter"))
        policy = inst.policy()
        result = run(inst.problem(), params, policy, subsolver_mode="analytic")
    else:
        case = builtin(cfg.problem["builtin"])
        params = TRParams(**cfg.params)
        policy = cfg.hessian_policy(case.policy)
        result = run(case.problem, params, policy, subsolver_mode=cfg.subsolver or "iterative")
    mu1, mu2, p = policy.growth_constants()
    inputs = BoundInputs.from_run(result, params, mu1, mu2, p)
    sb = successful_bound(inputs)
    report = {
        "delta_succ": delta_succ(inputs),
        "delta_min": delta_min(inputs),
        "kappa_mdc": inputs.kappa_mdc,
        "regime": sb.regime,
        "successful_bound": sb.bound,
        "bounded_regime_value": sb.bounded_value,
        "growth_regime_value": sb.growth_value,
        "unsuccessful_bound": unsuccessful_bound(result.n_successful, inputs),
        "observed_successful": result.n_successful,
        "observed_unsuccessful": result.n_unsuccessful,
    }
    if cfg.is_adversarial:
        report["k_eps"] = inst.k_eps
    return report, result


def cmd_bounds(cfg: ExperimentConfig) -> int:
    report, _ = bound_report(cfg)
    for key, val in report.items():
        print(f"{key:>22} = {val:.6e}" if isinstance(val, float) else f"{key:>22} = {val}")
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "emit": cmd_emit, "bounds": cmd_bounds}


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
    cfg = ExperimentConfig(
        problem=dict(raw.get("problem") or {}),
        params=dict(raw.get("params") or {}),
        policy=raw.get("policy"),
        subsolver=raw.get("subsolver"),
        out=raw.get("out"),
        samples=int(raw.get("samples", 2000)),
    )
    if args.builtin:
        cfg.problem = {"builtin": args.builtin}
    if not cfg.problem:
        cfg.problem = {"builtin": "quadratic"} if args.command == "solve" else {"adversarial": {}}
    if cfg.is_adversarial:
        adv = cfg.problem["adversarial"] = dict(cfg.problem["adversarial"])
        adv.setdefault("epsilon", 0.1)
        adv.setdefault("p", 0.1)
        if args.epsilon is not None:
            adv["epsilon"] = args.epsilon
        if args.p is not None:
            adv["p"] = args.p
    elif args.epsilon is not None:
        cfg.params["epsilon"] = args.epsilon
    for flag, key in (("alpha", "alpha"), ("beta", "beta"), ("gamma3", "gamma3"),
                      ("delta_max", "delta_max"), ("max_iter", "max_iter")):
        val = getattr(args, flag)
        if val is not None:
            cfg.params[key] = val
    if args.subsolver:
        cfg.subsolver = args.subsolver
    if args.out:
        cfg.out = args.out
    if args.samples:
        cfg.samples = args.samples
    return cfg


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxtr", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--builtin", help="builtin problem name (solve, bounds)")
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--p", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--gamma3", type=float)
    parser.add_argument("--delta-max", type=float)
    parser.add_argument("--max-iter", type=int)
    parser.add_argument("--subsolver", choices=["iterative", "analytic"])
    parser.add_argument("--samples", type=int, help="number of uniform samples for emit")
    parser.add_argument("--out", help="output CSV path (solve) or directory (emit)")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    try:
        return COMMANDS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
