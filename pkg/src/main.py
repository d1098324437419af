"""multlab command line: generate point sets, analyze spectra, verify claims."""

import argparse
import inspect
import json
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

import claims
import constructions
import geometry
import layers
import pointfile
import reports
import sum2squares
from config import DEFAULT_SEED, LOG_LEVEL
from errors import InputError, MultlabError
from geometry import Mode

FORMATS = ("text", "json", "csv")
GENERATOR_OPTIONS = ("n", "m", "w", "h", "k", "rounds", "arc_degrees", "angle_degrees", "denominator")


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integer, got: {value!r}") from exc
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got: {n}")
    return n


def _nonnegative(value: str) -> int:
    try:
        n = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integer, got: {value!r}") from exc
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got: {n}")
    return n


def _param(value: str) -> tuple[str, object]:
    key, sep, raw = value.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got: {value!r}")
    try:
        parsed = json.loads(raw)
    except json.JSONDecodeError:
        parsed = raw
    return key.strip().replace("-", "_"), parsed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--json", dest="format", action="store_const", const="json")
    common.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--seed", type=_nonnegative, default=DEFAULT_SEED)
    common.add_argument("--out", type=Path, help="write the output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="multlab",
        description="Distance multiplicities of planar point sets.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", parents=[common], help="build a construction")
    generate.add_argument("name", choices=sorted(constructions.GENERATORS))
    for option in ("n", "m", "w", "h", "k"):
        generate.add_argument(f"--{option}", type=_positive)
    generate.add_argument("--rounds", type=_nonnegative)
    generate.add_argument("--arc", dest="arc_degrees", type=float)
    generate.add_argument("--angle", dest="angle_degrees", type=float)
    generate.add_argument("--denominator", type=_positive)
    generate.add_argument("--distances", type=float, nargs="+")

    for name, summary in (("spectrum", "distance multiplicity spectrum"), ("layers", "convex layers and dense bound")):
        analyzer = commands.add_parser(name, parents=[common], help=summary)
        analyzer.add_argument("--in", dest="input", type=Path, required=True)
        analyzer.add_argument("--mode", choices=[m.value for m in Mode])

    r2 = commands.add_parser("r2", parents=[common], help="representations as a sum of two squares")
    r2.add_argument("number", type=_nonnegative)
    r2.add_argument("--brute", action="store_true", help="use exhaustive enumeration")

    lemma = commands.add_parser("lemma-many", parents=[common], help="products of primes 1 mod 4")
    lemma.add_argument("k", type=_positive)

    rich = commands.add_parser("grid-rich", parents=[common], help="rich distances of the s x s grid")
    rich.add_argument("side", type=_positive)
    rich.add_argument("threshold", type=_positive)

    ratios = commands.add_parser("grid-ratios", parents=[common], help="grid section classes reaching c*n")
    ratios.add_argument("side", type=_positive)
    ratios.add_argument("divisor", type=int, choices=sorted(sum2squares.SECTION_THRESHOLDS))

    verify = commands.add_parser("verify", parents=[common], help="run claim verifiers")
    verify.add_argument("claim", nargs="*", default=["all"], help="claim ids or 'all'")
    verify.add_argument("--k", type=_positive)
    verify.add_argument("-p", "--param", dest="params", type=_param, action="append", default=[])
    return parser


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out.write_text(text if text.endswith("\n") else text + "\n")
    logger.info(f"Wrote report to {out}")


def _read_input(args) -> geometry.PointSet:
    mode = Mode(args.mode) if args.mode else None
    return pointfile.read(args.input, mode_override=mode)


def _command_generate(args) -> int:
    generator = constructions.GENERATORS[args.name]
    accepted = inspect.signature(generator).parameters
    kwargs = {
        option: getattr(args, option)
        for option in GENERATOR_OPTIONS + ("distances",)
        if getattr(args, option) is not None and option in accepted
    }
    if "seed" in accepted:
        kwargs["seed"] = args.seed
    missing = [
        name for name, p in accepted.items()
        if p.default is inspect.Parameter.empty and name not in kwargs
    ]
    if missing:
        raise InputError(f"{args.name} needs --{' --'.join(missing)}")
    result = generator(**kwargs)
    facts = reports.to_json([f.to_dict(encode_json=False) for f in result.expected_facts])
    if args.out is None:
        _emit(pointfile.encode(result.point_set), None)
        return 0
    pointfile.write(result.point_set, args.out)
    expected = args.out.with_name(f"{args.out.stem}.expected.json")
    expected.write_text(facts + "\n")
    logger.info(f"Wrote {len(result.expected_facts)} expected facts to {expected}")
    return 0


def _command_spectrum(args) -> int:
    X = _read_input(args)
    S = geometry.distance_spectrum(X)
    if args.format == "json":
        text = reports.spectrum_json(S, X.label)
    elif args.format == "csv":
        text = reports.to_csv(reports.spectrum_rows(S))
    else:
        text = reports.spectrum_text(S, X.label)
    _emit(text, args.out)
    return 0


def _command_layers(args) -> int:
    X = _read_input(args)
    decomposition = layers.onion_layers(X)
    payload = dict(label=X.label, n=X.n, sizes=decomposition.sizes, layers=decomposition.layers)
    if X.n >= 2 and geometry.distance_spectrum(X).m >= 2:
        payload["dense"] = layers.check_dense_theorem(X)
        payload["corollary"] = layers.check_diameter_ratio_corollary(X)
    _emit(reports.render(payload, args.format), args.out)
    return 0


def _command_r2(args) -> int:
    if args.brute:
        report = sum2squares.brute_force_representations(args.number)
    else:
        report = sum2squares.count_representations(args.number)
    _emit(reports.render(report, args.format), args.out)
    return 0


def _command_lemma_many(args) -> int:
    construction = sum2squares.lemma_many_construct(args.k)
    if args.format == "csv":
        rows = [s.to_dict(encode_json=False) for s in construction.subsets]
        _emit(reports.render(rows, "csv"), args.out)
        return 0
    payload = construction.to_dict(encode_json=False)
    payload.update(
        certified=construction.certified,
        subset_count=construction.subset_count,
        expected_subset_count=construction.expected_subset_count,
        flagged=construction.flagged,
    )
    _emit(reports.render(payload, args.format), args.out)
    return 0


def _command_grid_rich(args) -> int:
    report = sum2squares.grid_rich_distances(args.side, args.threshold)
    _emit(reports.render(report, args.format), args.out)
    return 0


def _command_grid_ratios(args) -> int:
    report = sum2squares.grid_section_ratios(args.side, args.divisor)
    payload = report.to_dict(encode_json=False)
    payload["all_qualifying_meet"] = report.all_qualifying_meet
    _emit(reports.render(payload, args.format), args.out)
    return 0


def _verdict_lines(results: list) -> str:
    lines = [
        f"{r.claim_id:<20} {r.verdict.value:<9} {json.dumps(reports.jsonable(r.inputs))}"
        for r in results
    ]
    counts = {v: sum(r.verdict == v for r in results) for v in constructions.Verdict}
    lines.append(", ".join(f"{counts[v]} {v.value}" for v in constructions.Verdict))
    return "\n".join(lines)


def _command_verify(args) -> int:
    params = dict(args.params)
    if args.k is not None:
        params["k"] = args.k
    selection = args.claim
    if params:
        if len(selection) != 1 or selection[0] == "all":
            raise InputError("Parameters need exactly one claim id")
        results = claims.run_claim(selection[0], args.seed, **params)
    else:
        results = claims.verify_all(selection, args.seed)
    if args.format == "text":
        text = _verdict_lines(results)
    else:
        text = reports.render([r.to_dict(encode_json=False) for r in results], args.format)
    _emit(text, args.out)
    return 1 if any(r.failed for r in results) else 0


def _configure_logging(verbose: bool):
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else LOG_LEVEL)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    _configure_logging(args.verbose)
    handler = getattr(sys.modules[__name__], f"_command_{args.command.replace('-', '_')}")
    try:
        return handler(args)
    except MultlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
