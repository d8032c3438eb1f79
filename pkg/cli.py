"""
Command-line front end.

    python cli.py verify cocycle --name TFdag --algebra h1dag --k -1
    python cli.py pages --algebra h1 --weight 1 --pbw-cap 3 --format json
    python cli.py eval --algebra h1 "X*Y"

Every command produces a list of report dicts. In json mode each report is
printed as one line; in text mode a summary banner follows the reports.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import yaml

from bicocyclic import check_bicocyclic, setting_for
from cohomology import BICROSSED_NAMES, cotor_pages, spectral_pages, transfer_class, weight1_pages
from cyclic import verify_cocycle
from errors import ConfigError, TransverseError
from exact_kernel import TruncationSpec
from expressions import format_tensor, parse
from h1_family import get_algebra, modular_pair
from homotopy import verify_homotopy_formula
from hopf import check_hopf_axioms, check_mpi
from trees import size_histogram

logger = logging.getLogger(__name__)

DEFAULTS = {
    "pbw_cap": 4,
    "tree_cap": 4,
    "delta_cap": 4,
    "max_tensor_degree": 3,
    "sigma_range": [-2, 2],
    "samples": 30,
    "seed": 0,
    "terms": 3,
    "max_level": 2,
    "format": "text",
}

BANNER = "=" * 50


def _load_config(config_path: Optional[str]) -> dict:
    """Load configuration from YAML file."""
    if config_path is None:
        config_path = Path(__file__).parent / "config.yaml"

    if Path(config_path).exists():
        with open(config_path) as f:
            return yaml.safe_load(f) or {}
    return {}


def _flatten(config: dict) -> dict:
    """Merge the truncation/sampling/homotopy/output sections into one namespace."""
    flat = {}
    for section in ("truncation", "sampling", "homotopy", "output"):
        values = config.get(section) or {}
        if not isinstance(values, dict):
            raise ConfigError(f"config section {section!r} must be a mapping")
        flat.update(values)
    unknown = set(flat) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return flat


def resolve_settings(args: argparse.Namespace, config: dict) -> dict:
    """CLI flag > config file > built-in default."""
    settings = dict(DEFAULTS)
    settings.update(_flatten(config))
    flags = {
        "pbw_cap": args.pbw_cap,
        "tree_cap": args.tree_cap,
        "samples": args.samples,
        "seed": args.seed,
        "max_level": getattr(args, "n", None),
        "format": args.format,
    }
    settings.update({key: value for key, value in flags.items() if value is not None})
    for key in ("pbw_cap", "tree_cap", "delta_cap", "max_tensor_degree", "samples", "terms", "max_level"):
        if not isinstance(settings[key], int) or settings[key] < 0:
            raise ConfigError(f"{key} must be a non-negative integer, got {settings[key]!r}")
    sigma_range = settings["sigma_range"]
    if not (isinstance(sigma_range, (list, tuple)) and len(sigma_range) == 2
            and all(isinstance(v, int) for v in sigma_range)):
        raise ConfigError(f"sigma_range must be a pair of integers, got {sigma_range!r}")
    if settings["format"] not in ("json", "text"):
        raise ConfigError(f"unknown output format {settings['format']!r}")
    return settings


def truncation_for(settings: dict, modulus: Optional[int] = None) -> TruncationSpec:
    low, high = settings["sigma_range"]
    return TruncationSpec(
        max_tensor_degree=settings["max_tensor_degree"],
        pbw_cap=settings["pbw_cap"],
        delta_cap=settings["delta_cap"],
        sigma_range=(low, high),
        modulus=modulus,
        tree_cap=settings["tree_cap"],
    )


def algebra_name_for(name: str, modulus: Optional[int]) -> str:
    """Apply --N to a cover name: h1dag → h1dagN:N, hckdag → hckdagN:N."""
    if modulus is None:
        return name
    if modulus < 2:
        raise ConfigError("--N must be at least 2")
    if name in ("h1dag", "hckdag"):
        return f"{name}N:{modulus}"
    if name == "K":
        return f"KmodN:{modulus}"
    raise ConfigError(f"--N does not apply to {name!r}")


# commands


def run_verify(args, settings, trunc) -> List[dict]:
    name = args.algebra
    if args.target == "hopf":
        return [check_hopf_axioms(get_algebra(name), trunc)]
    if args.target == "mpi":
        H = get_algebra(name)
        return [check_mpi(H, modular_pair(H, args.k or 0), trunc)]
    if args.target == "cocycle":
        if not args.name:
            raise ConfigError("verify cocycle needs --name")
        return [verify_cocycle(args.name, name if args.algebra_given else None, args.k)]
    if args.target == "bicocyclic":
        setting = setting_for(name, args.k or 0)
        return check_bicocyclic(setting.bicomplex, args.pmax, args.qmax, settings["samples"], settings["seed"],
                                trunc, setting=setting, terms=settings["terms"])
    return verify_homotopy_formula(name, args.Z, settings["max_level"], settings["samples"], settings["seed"],
                                   trunc, terms=settings["terms"])


def run_pages(args, settings, trunc) -> List[dict]:
    if args.weight == 1 and args.algebra in BICROSSED_NAMES:
        return weight1_pages(args.algebra, trunc)
    return spectral_pages(args.algebra, args.weight, trunc, args.k or 0)


def run_cotor(args, settings, trunc) -> List[dict]:
    return [cotor_pages(args.algebra, args.k or 0, trunc)]


def run_transfer(args, settings, trunc) -> List[dict]:
    if not args.name:
        raise ConfigError("transfer needs --name")
    return [transfer_class(args.name, args.algebra, args.k or 0, trunc)]


def run_trees(args, settings, trunc) -> List[dict]:
    histogram = size_histogram(args.max)
    return [{"check": "trees", "max": args.max, "histogram": histogram, "total": sum(histogram),
             "status": "pass", "witness": None}]


def run_eval(args, settings, trunc) -> List[dict]:
    H = get_algebra(args.algebra, trunc)
    value = parse(args.expression, H)
    return [{"check": "eval", "algebra": H.tag, "input": args.expression,
             "result": format_tensor(H, value), "status": "pass", "witness": None}]


COMMANDS = {
    "verify": run_verify,
    "pages": run_pages,
    "cotor": run_cotor,
    "transfer": run_transfer,
    "trees": run_trees,
    "eval": run_eval,
}


# output


def _text_line(report: dict) -> str:
    skip = {"check", "status", "entries"}
    details = ", ".join(f"{key}={value}" for key, value in report.items() if key not in skip and value is not None)
    line = f"[{report.get('status', '?')}] {report.get('check', '?')}: {details}"
    for entry in report.get("entries") or []:
        reps = "; ".join(entry.get("representatives", []))
        rank = f" d_rank={entry['d_rank']}" if "d_rank" in entry else ""
        line += f"\n    ({entry['p']},{entry['q']}) dim={entry['dim']}{rank}" + (f"  {reps}" if reps else "")
    return line


def emit(reports: List[dict], fmt: str, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        for report in reports:
            stream.write(json.dumps(report, sort_keys=True, default=str) + "\n")
        return
    for report in reports:
        stream.write(_text_line(report) + "\n")
    passed = sum(1 for r in reports if r.get("status") == "pass")
    failed = sum(1 for r in reports if r.get("status") in ("fail", "error"))
    stream.write(f"\n{BANNER}\n")
    stream.write(f"Total reports: {len(reports)}\n")
    stream.write(f"Passed: {passed}\n")
    stream.write(f"Failed: {failed}\n")
    stream.write(f"Other: {len(reports) - passed - failed}\n")
    stream.write(f"{BANNER}\n")


def exit_code(reports: List[dict]) -> int:
    return 1 if any(r.get("status") in ("fail", "error") for r in reports) else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="Registered algebra name (h1, h1s, h1dag, hck, ...)")
    common.add_argument("--k", type=int, help="Exponent of sigma in the modular pair")
    common.add_argument("--N", type=int, help="Modulus of the sigma-cover")
    common.add_argument("--weight", type=int, default=1, help="Weight of the computed component")
    common.add_argument("--pbw-cap", type=int, help="Cap on the number of X/Y letters")
    common.add_argument("--tree-cap", type=int, help="Cap on tree sizes")
    common.add_argument("--samples", type=int, help="Random samples per level")
    common.add_argument("--seed", type=int, help="Seed of the sample generator")
    common.add_argument("--format", choices=["json", "text"], help="Output format")
    common.add_argument("--config", help="Path to config.yaml")
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    noise.add_argument("--quiet", action="store_true", help="Log warnings and errors only")

    parser = argparse.ArgumentParser(description="Hopf cyclic cohomology of transverse symmetry algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("target", choices=["hopf", "mpi", "cocycle", "bicocyclic", "homotopy"])
    verify.add_argument("--name", help="Named cocycle or expression")
    verify.add_argument("--pmax", type=int, default=2, help="Largest horizontal degree")
    verify.add_argument("--qmax", type=int, default=2, help="Largest vertical degree")
    verify.add_argument("--Z", default="Y", help="Primitive Z of the coderivation D(h) = hZ, or 0")
    verify.add_argument("--n", type=int, help="Largest level of the homotopy check")

    sub.add_parser("pages", parents=[common], help="Spectral pages 1 to 3")
    sub.add_parser("cotor", parents=[common], help="Cotor complexes of a sigma-cover")
    transfer = sub.add_parser("transfer", parents=[common], help="Transfer a page class to a Hopf cocycle")
    transfer.add_argument("--name", help="Class name (XwedgeY, delta1, TF)")
    trees = sub.add_parser("trees", parents=[common], help="Rooted tree counts by size")
    trees.add_argument("--max", type=int, default=5, help="Largest tree size")
    evaluate = sub.add_parser("eval", parents=[common], help="Normal form of an expression")
    evaluate.add_argument("expression")
    return parser


_DEFAULT_ALGEBRA = {"verify": "h1", "pages": "h1", "cotor": "h1dag", "transfer": "h1", "trees": "hrt",
                    "eval": "h1"}


def run(argv: Optional[List[str]] = None, stream=None) -> int:
    """Parse arguments, execute one command, print reports; returns the exit code."""
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    fmt = args.format or "text"
    try:
        config = _load_config(args.config)
        settings = resolve_settings(args, config)
        fmt = settings["format"]
        args.algebra_given = args.algebra is not None
        args.algebra = algebra_name_for(args.algebra or _DEFAULT_ALGEBRA[args.command], args.N)
        trunc = truncation_for(settings, args.N)
        reports = COMMANDS[args.command](args, settings, trunc)
    except TransverseError as e:
        logger.error(f"{args.command} failed: {e}")
        reports = [{"check": args.command, "status": "error", "witness": str(e)}]
        emit(reports, fmt, stream)
        return 2

    emit(reports, fmt, stream)
    return exit_code(reports)


def main():
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
