"""Command-line interface: simulate, classify and theory subcommands."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import __version__
from .errors import CurveClassError, ZeroTau
from .io import atomic_write_text, ingest_csv, write_json_report
from .numerics import FunctionOnGrid, Grid, SymmetricMatrix
from .simulation import SimulationSpec, bandwidth_sweep, run_experiment
from .theory import (
    BUILTIN_SCENARIOS,
    TheoryInputs,
    builtin_scenario,
    compute_constants,
    second_derivative,
)

_KIND_ALIASES = {
    "cent": "centroid",
    "centsc": "scaled-centroid",
    "qda": "qda",
}


def _threads(value: Optional[int]) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("FDA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CurveClassError(f"FDA_THREADS must be an integer, got {env!r}")
    return 1


def _parse_kinds(text: str) -> List[str]:
    kinds = []
    for token in text.split(","):
        token = token.strip()
        if token not in _KIND_ALIASES:
            raise CurveClassError(
                f"unknown classifier {token!r}; choose from cent, centsc, qda"
            )
        kinds.append(_KIND_ALIASES[token])
    return kinds


def _parse_strategies(text: str) -> List[str]:
    out = []
    for token in text.split(","):
        token = token.strip()
        if token not in ("cv", "pi", "ns"):
            raise CurveClassError(
                f"unknown strategy {token!r}; choose from cv, pi, ns"
            )
        out.append(token)
    return out


def cmd_simulate(args) -> int:
    spec = SimulationSpec(
        model=args.model,
        noise_version=args.noise,
        n_tr=args.ntr,
        n_test=args.ntest,
        B=args.B,
        seed=args.seed,
    )
    report = run_experiment(
        spec,
        strategies=_parse_strategies(args.strategies),
        classifiers=_parse_kinds(args.classifiers),
        workers=_threads(args.threads),
    )
    os.makedirs(args.out, exist_ok=True)
    atomic_write_text(os.path.join(args.out, "report.tsv"), report.to_tsv())
    write_json_report(os.path.join(args.out, "report.json"), report.to_json_dict())
    print(f"wrote {args.out}/report.tsv and {args.out}/report.json")
    return 0


def cmd_classify(args) -> int:
    from .estimators import CurveClassifier

    if args.strategy == "cv" and (
        args.gamma is not None or args.gamma1 is not None or args.p is not None
    ):
        raise CurveClassError(
            "--gamma/--gamma1/--p conflict with --strategy cv (CV chooses them)"
        )
    training = ingest_csv(args.train)
    for c in training:
        if c.label is None:
            raise CurveClassError(f"training curve {c.id!r} is unlabeled")
    new_curves = ingest_csv(args.predict)
    clf = CurveClassifier(
        kind=_KIND_ALIASES[args.classifier],
        strategy=args.strategy,
        gamma=args.gamma,
        gamma1=args.gamma1,
        p=args.p,
    )
    clf.fit(training)
    scores = clf.decision_function(new_curves)
    labels = clf.predict(new_curves)
    lines = ["curve_id,label,score"]
    for c, lbl, sc in zip(new_curves, labels, scores):
        lines.append(f"{c.id},{int(lbl)},{float(sc)!r}")
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.out}")
    return 0


def _inputs_from_json(path) -> TheoryInputs:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CurveClassError(f"{path}: invalid JSON: {exc}") from exc

    def need(key, parent=raw, where=""):
        if key not in parent:
            raise CurveClassError(f"{path}: missing key {where}{key!r}")
        return parent[key]

    g = need("grid")
    try:
        grid = Grid(float(need("lower", g, "grid.")),
                    float(need("upper", g, "grid.")),
                    int(need("n_points", g, "grid.")))
        mu0 = FunctionOnGrid(grid, need("mu0"))
        mu1 = FunctionOnGrid(grid, need("mu1"))
        mu0_dd = (
            FunctionOnGrid(grid, raw["mu0_dd"])
            if "mu0_dd" in raw
            else second_derivative(mu0)
        )
        mu1_dd = (
            FunctionOnGrid(grid, raw["mu1_dd"])
            if "mu1_dd" in raw
            else second_derivative(mu1)
        )
        uniform = bool(raw.get("uniform_design", True))
        f_x = FunctionOnGrid(grid, raw["f_x"]) if "f_x" in raw else None
        return TheoryInputs(
            mu0=mu0,
            mu1=mu1,
            mu0_dd=mu0_dd,
            mu1_dd=mu1_dd,
            cov0=SymmetricMatrix(need("cov0")),
            cov1=SymmetricMatrix(need("cov1")),
            sigma_eps0_sq=float(need("sigma_eps0_sq")),
            sigma_eps1_sq=float(need("sigma_eps1_sq")),
            pi0=float(need("pi0")),
            nu0=float(need("nu0")),
            nu1=float(need("nu1")),
            uniform_design=uniform,
            f_x=f_x,
        )
    except (TypeError, ValueError) as exc:
        raise CurveClassError(f"{path}: bad value: {exc}") from exc


def cmd_theory(args) -> int:
    scenario = None
    if args.scenario is not None:
        inputs, scenario = builtin_scenario(args.scenario)
    else:
        inputs = _inputs_from_json(args.inputs)
    try:
        constants = compute_constants(inputs)
    except ZeroTau as exc:
        raise CurveClassError(
            f"tau constants vanish ({exc}); the populations are "
            "indistinguishable at first order"
        ) from exc
    d = constants.to_json_dict()
    for key in (
        "b00", "b10", "tau0_sq", "tau1_sq", "alpha0", "alpha1",
        "c0", "c1", "c01", "c11", "d00", "d01", "d10", "d11",
        "c_agg", "c1_agg", "d_agg",
    ):
        print(f"{key:8s} = {d[key]:.6g}")
    if constants.regime == "Degenerate-d0":
        print("d0 = 0 (Degenerate-d0)")
    else:
        print(f"regime {constants.regime}: h1 ~ {d['h1_order']}")

    wrote = []
    outdir = args.out
    if args.sweep is not None:
        if scenario is None:
            raise CurveClassError("--sweep requires a builtin --scenario")
        h1_values = [float(v) for v in args.sweep.split(",") if v.strip()]
        if not h1_values:
            raise CurveClassError("--sweep needs a comma-separated h1 grid")
        rows = bandwidth_sweep(
            scenario,
            h_grid=[args.sweep_h],
            h1_grid=h1_values,
            B=args.sweep_B,
            n0=args.sweep_n0,
            n1=args.sweep_n1,
            n_test_per_class=args.sweep_ntest,
            seed=args.seed,
        )
        os.makedirs(outdir, exist_ok=True)
        lines = ["h\th1\terr\tse"]
        for row in rows:
            lines.append(
                f"{row['h']!r}\t{row['h1']!r}\t{row['err']!r}\t{row['se']!r}"
            )
        path = os.path.join(outdir, "err_surface.tsv")
        atomic_write_text(path, "\n".join(lines) + "\n")
        wrote.append(path)
    if args.json_out:
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, "theory.json")
        write_json_report(path, {"schema": 1, "theory": d})
        wrote.append(path)
    for path in wrote:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveclass",
        description="Classification of discretely sampled noisy curves",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo benchmark")
    sim.add_argument("--model", required=True, choices=list("ABCDEF"))
    sim.add_argument("--noise", required=True, type=int, choices=(1, 2, 3))
    sim.add_argument("--ntr", required=True, type=int)
    sim.add_argument("--ntest", type=int, default=100)
    sim.add_argument("--B", required=True, type=int)
    sim.add_argument("--seed", required=True, type=int)
    sim.add_argument("--classifiers", default="cent,centsc,qda")
    sim.add_argument("--strategies", default="cv,pi,ns")
    sim.add_argument("--out", default=".")
    sim.add_argument("--threads", type=int, default=None)
    sim.set_defaults(func=cmd_simulate)

    cls = sub.add_parser("classify", help="train on a CSV, label new curves")
    cls.add_argument("--train", required=True)
    cls.add_argument("--predict", required=True)
    cls.add_argument("--classifier", required=True, choices=("cent", "centsc", "qda"))
    cls.add_argument("--strategy", default="pi", choices=("cv", "pi", "ns"))
    cls.add_argument("--gamma", type=float, default=None)
    cls.add_argument("--gamma1", type=float, default=None)
    cls.add_argument("--p", type=int, default=None)
    cls.add_argument("--out", default="labels.csv")
    cls.set_defaults(func=cmd_classify)

    th = sub.add_parser("theory", help="error-expansion constants and regime")
    group = th.add_mutually_exclusive_group(required=True)
    group.add_argument("--scenario", choices=BUILTIN_SCENARIOS)
    group.add_argument("--inputs")
    th.add_argument("--sweep", default=None, help="comma-separated h1 grid")
    th.add_argument("--sweep-h", type=float, default=0.1)
    th.add_argument("--sweep-B", type=int, default=20)
    th.add_argument("--sweep-n0", type=int, default=20)
    th.add_argument("--sweep-n1", type=int, default=20)
    th.add_argument("--sweep-ntest", type=int, default=100)
    th.add_argument("--seed", type=int, default=1)
    th.add_argument("--out", default=".")
    th.add_argument("--json-out", action="store_true")
    th.set_defaults(func=cmd_theory)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CurveClassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
