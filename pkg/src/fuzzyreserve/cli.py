"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 computation error.  Set
``RESERVE_LOG=error|info|debug`` to control log output on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import glm as glm_mod
from . import hybrid as hybrid_mod
from . import report
from .bootstrap import BootstrapConfig, bootstrap_reserve
from .errors import ComputationError, InputError, ReservingError
from .triangle import read_triangle

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3

logger = logging.getLogger("fuzzyreserve")


def _configure_logging() -> None:
    level = os.environ.get("RESERVE_LOG", "error").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _hybrid_config(args) -> hybrid_mod.HybridConfig:
    if args.convention == "standard":
        return hybrid_mod.HybridConfig.standard()
    return hybrid_mod.HybridConfig()


def _provenance(args, **config) -> dict:
    return {"input": str(args.path), "config": config}


def _fit_report(t, model: str, hcfg, provenance) -> report.ReserveReport:
    if model == "classical":
        return report.classical_report(t, glm_mod.fit_poisson(t), provenance)
    return report.hybrid_report(t, hybrid_mod.fit_hybrid(t, hcfg), provenance)


def _emit(doc: dict, fmt: str) -> None:
    sys.stdout.write(report.dumps(doc) if fmt == "json" else report.render_table(doc))


def cmd_validate(args) -> int:
    t = read_triangle(args.path)
    print(f"valid: k={t.k}, {len(t)} observed cells")
    return EXIT_OK


def cmd_fit(args) -> int:
    t = read_triangle(args.path)
    hcfg = _hybrid_config(args)
    prov = _provenance(args, command="fit", model=args.model, convention=hcfg.convention,
                       latest_diagonal=hcfg.latest_diagonal)
    rep = _fit_report(t, args.model, hcfg, prov)
    _emit(rep.to_dict(), args.format)
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    t = read_triangle(args.path)
    hcfg = _hybrid_config(args)
    cfg = BootstrapConfig(args.reps, args.seed, args.model, hcfg, args.workers)
    # worker count is deliberately left out so output is identical across it
    prov = _provenance(args, command="bootstrap", model=args.model, reps=args.reps, seed=args.seed,
                       convention=hcfg.convention, latest_diagonal=hcfg.latest_diagonal)
    rep = _fit_report(t, args.model, hcfg, prov)
    rep.variability = report.variability(bootstrap_reserve(t, cfg), args.reps, args.seed)
    _emit(rep.to_dict(), args.format)
    return EXIT_OK


def cmd_compare(args) -> int:
    t = read_triangle(args.path)
    hcfg = _hybrid_config(args)
    prov = _provenance(args, command="compare", reps=args.reps, seed=args.seed,
                       convention=hcfg.convention, latest_diagonal=hcfg.latest_diagonal)
    reps = {}
    for model in ("classical", "hybrid"):
        rep = _fit_report(t, model, hcfg, prov)
        cfg = BootstrapConfig(args.reps, args.seed, model, hcfg, args.workers)
        rep.variability = report.variability(bootstrap_reserve(t, cfg), args.reps, args.seed)
        reps[model] = rep
    _emit(report.comparison(reps["classical"], reps["hybrid"], prov), args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzyreserve", description="Classical and hybrid fuzzy loss reserving.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a triangle CSV")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    def common(p, with_model=True):
        p.add_argument("path")
        if with_model:
            p.add_argument("--model", choices=["classical", "hybrid"], default="classical")
        p.add_argument("--format", choices=["json", "table"], default="table")
        p.add_argument("--convention", choices=list(hybrid_mod.CONVENTIONS), default="reference",
                       help="h-level convention for the hybrid model")

    p = sub.add_parser("fit", help="fit a model and report reserves")
    common(p)
    p.set_defaults(func=cmd_fit)

    for name, func, with_model in (("bootstrap", cmd_bootstrap, True), ("compare", cmd_compare, False)):
        p = sub.add_parser(name, help=f"{name} reserve variability")
        common(p, with_model)
        p.add_argument("--reps", type=int, default=1000)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--workers", type=int, default=1, help="worker processes for replications")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ComputationError, ReservingError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
