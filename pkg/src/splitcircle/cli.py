"""
Command-line interface for the splitting-circle polynomial factoriser.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, TextIO

import mpmath
from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .config import DEFAULT_BITS, MIN_BITS, SETTINGS_ENV_VAR, SolverConfig, load_config
from .errors import PolynomialParseError, SplitCircleError
from .factorizer import fact
from .graeffe import mod_k, mod_max, mod_min, nrd
from .numeric import Poly, Precision, tolerance

# Console for diagnostics and the info panel.
console = Console(stderr=True)

# Commands that read a polynomial and produce a report.
JOB_COMMANDS = ("factor", "roots", "count", "modmax", "modmin", "mod")
# Default tolerance for the factor and roots commands.
DEFAULT_EPS = "1e-20"
# Default slack for count/mod/modmax/modmin.
DEFAULT_TAU = "0.01"
# Default disk radius for count.
DEFAULT_RADIUS = "1"
# Width of text reports written to files or pipes.
OUTPUT_WIDTH = 200
# Significant digits shown for residuals.
RESIDUAL_DIGITS = 6


class UsageError(Exception):
    """Bad command-line usage; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


@dataclass(frozen=True)
class JobConfig:
    """
    One CLI invocation. Numeric options stay decimal strings until the job runs.
    """

    command: str
    input_path: str = "-"
    eps: str = DEFAULT_EPS
    precision_bits: int = DEFAULT_BITS
    disk_radius: str = DEFAULT_RADIUS
    k_index: Optional[int] = None
    tau: str = DEFAULT_TAU
    output_path: Optional[str] = None
    format: str = "text"
    settings_path: Optional[str] = None

    def validate(self) -> None:
        if self.command not in JOB_COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("text", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.precision_bits < MIN_BITS:
            raise UsageError(f"--bits must be at least {MIN_BITS}")
        _positive("--eps", self.eps, below_one=True)
        _positive("--tau", self.tau)
        _positive("--radius", self.disk_radius)
        if self.command == "mod" and self.k_index is None:
            raise UsageError("mod needs --k")


@dataclass
class Report:
    """
    Command result: ``payload`` is the JSON document, ``lines``/``table`` the text form.
    """

    payload: dict
    lines: list = field(default_factory=list)
    table: Optional[Table] = None


def _positive(flag: str, text: str, below_one: bool = False) -> Any:
    try:
        value = tolerance(text)
    except (ValueError, TypeError):
        raise UsageError(f"{flag} expects a decimal number, got {text!r}") from None
    if not value > 0 or (below_one and not value < 1):
        bound = "in (0, 1)" if below_one else "positive"
        raise UsageError(f"{flag} must be {bound}, got {text}")
    return value


# ═══════════════════════════════════════════════════════════════════════════════
# INPUT AND FORMATTING
# ═══════════════════════════════════════════════════════════════════════════════


def parse_poly(text: str, prec: Optional[Precision] = None) -> Poly:
    """
    Parse one "re im" coefficient per line, ascending degree. Text after '#' is
    ignored, as are blank lines. Decimals are rounded to nearest at ``prec``.
    """
    prec = prec or Precision()
    ctx = prec.context
    values = []
    last_line = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PolynomialParseError(f"expected 're im', got {line!r}", line=number)
        try:
            re_part, im_part = (ctx.mpf(p) for p in parts)
        except (ValueError, TypeError):
            raise PolynomialParseError(f"not a decimal number in {line!r}", line=number) from None
        if not (ctx.isfinite(re_part) and ctx.isfinite(im_part)):
            raise PolynomialParseError(f"non-finite coefficient in {line!r}", line=number)
        values.append(ctx.mpc(re_part, im_part))
        last_line = number
    if not values:
        raise PolynomialParseError("no coefficients found")
    if values[-1] == 0:
        raise PolynomialParseError("leading coefficient is zero", line=last_line)
    return Poly(tuple(values), prec.bits)


def _digits(bits: int) -> int:
    return int(bits * math.log10(2)) + 2


def _decimal(value: Any, digits: int) -> str:
    return mpmath.nstr(value, digits)


def _complex_fields(value: Any, digits: int) -> dict:
    return {"re": _decimal(value.real, digits), "im": _decimal(value.imag, digits)}


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


# ═══════════════════════════════════════════════════════════════════════════════
# COMMANDS
# ═══════════════════════════════════════════════════════════════════════════════


def _factor_report(poly: Poly, job: JobConfig, config: SolverConfig, with_roots: bool) -> Report:
    result = fact(poly, job.eps, config)
    digits = _digits(job.precision_bits)
    residual = _decimal(result.residual, RESIDUAL_DIGITS)
    payload: dict[str, Any] = {"degree": poly.degree, "eps": job.eps}
    if with_roots:
        roots = list(result.roots)
        payload["roots"] = [_complex_fields(r, digits) for r in roots]
        payload["leading"] = _complex_fields(result.leading, digits)
        table = Table(box=box.SIMPLE)
        table.add_column("#", justify="right")
        table.add_column("re", no_wrap=True)
        table.add_column("im", no_wrap=True)
        for index, root in enumerate(roots, start=1):
            table.add_row(str(index), _decimal(root.real, digits), _decimal(root.imag, digits))
    else:
        payload["factors"] = [
            [_complex_fields(c, digits) for c in factor.coeffs] for factor in result.factors
        ]
        table = Table(box=box.SIMPLE)
        table.add_column("#", justify="right")
        table.add_column("x^0", no_wrap=True)
        table.add_column("x^1", no_wrap=True)
        for index, factor in enumerate(result.factors, start=1):
            c0, c1 = factor.coeffs
            table.add_row(str(index), _decimal(c0, digits), _decimal(c1, digits))
    payload["residual"] = residual
    payload["precision_bits"] = job.precision_bits
    lines = [f"degree {poly.degree}, eps {job.eps}", f"residual {residual}"]
    return Report(payload, lines, table)


def _count_report(poly: Poly, job: JobConfig, config: SolverConfig) -> Report:
    count = nrd(poly, job.disk_radius, job.tau, config)
    payload = {"degree": poly.degree, "radius": job.disk_radius, "tau": job.tau, "count": count}
    return Report(payload, [str(count)])


def _modulus_report(poly: Poly, job: JobConfig, config: SolverConfig) -> Report:
    if job.command == "modmax":
        estimate = mod_max(poly, job.tau, config)
    elif job.command == "modmin":
        estimate = mod_min(poly, job.tau, config)
    else:
        estimate = mod_k(poly, job.k_index, job.tau, config)
    value = _decimal(estimate.value, 20)
    payload: dict[str, Any] = {"degree": poly.degree, "tau": job.tau}
    if job.command == "mod":
        payload["k"] = job.k_index
    payload.update(
        value=value,
        lower=_decimal(estimate.lower, 20),
        upper=_decimal(estimate.upper, 20),
    )
    return Report(payload, [value])


REPORTS: dict[str, Callable[[Poly, JobConfig, SolverConfig], Report]] = {
    "factor": lambda poly, job, config: _factor_report(poly, job, config, with_roots=False),
    "roots": lambda poly, job, config: _factor_report(poly, job, config, with_roots=True),
    "count": _count_report,
    "modmax": _modulus_report,
    "modmin": _modulus_report,
    "mod": _modulus_report,
}


def _emit(report: Report, job: JobConfig, stream: TextIO) -> None:
    if job.format == "json":
        stream.write(json.dumps(report.payload, indent=2) + "\n")
        return
    interactive = job.output_path is None and stream.isatty()
    out = Console(
        file=stream,
        width=None if interactive else OUTPUT_WIDTH,
        color_system="auto" if interactive else None,
        highlight=False,
    )
    if report.table is not None:
        out.print(report.table)
    for line in report.lines:
        out.print(line, markup=False)


def run(job: JobConfig) -> int:
    """
    Execute one job. Returns 0 on success, 1 on usage or input errors and 2 on
    numerical failure.
    """
    try:
        job.validate()
        config = load_config(job.settings_path, precision_bits=job.precision_bits)
        poly = parse_poly(_read_input(job.input_path), Precision(job.precision_bits))
        if poly.degree < 1:
            raise PolynomialParseError("polynomial must have degree at least 1")
    except (UsageError, PolynomialParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        report = REPORTS[job.command](poly, job, config)
    except SplitCircleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if job.output_path:
        with open(job.output_path, "w") as handle:
            _emit(report, job, handle)
    else:
        _emit(report, job, sys.stdout)
    return 0


# ═══════════════════════════════════════════════════════════════════════════════
# HANDLERS AND PARSER
# ═══════════════════════════════════════════════════════════════════════════════


def handle_job(args: argparse.Namespace) -> int:
    job = JobConfig(
        command=args.command,
        input_path=args.input,
        eps=args.eps,
        precision_bits=args.bits,
        disk_radius=args.radius,
        k_index=args.k,
        tau=args.tau,
        output_path=args.output,
        format=args.format,
        settings_path=args.settings,
    )
    return run(job)


def handle_info(args: argparse.Namespace) -> int:
    """
    Display version, arithmetic backend and solver defaults.
    """
    config = load_config(getattr(args, "settings", None))
    console.print(Panel(f"splitcircle v{__version__}", title="System Info", border_style="blue"))

    table = Table(box=box.SIMPLE)
    table.add_column("Key", style="cyan")
    table.add_column("Value", style="white")
    table.add_row("Python", sys.version.split()[0])
    table.add_row("Platform", platform.platform())
    table.add_row("mpmath", f"{mpmath.__version__} ({mpmath.libmp.BACKEND} backend)")
    table.add_row("Working bits", str(config.precision_bits))
    table.add_row("Ceiling (degree 16)", str(config.precision_ceiling(16)))
    table.add_row("Sample ceiling", f"{config.sample_ceiling} * L")
    table.add_row("Guard bits", str(config.guard_bits))
    table.add_row("Settings file", os.environ.get(SETTINGS_ENV_VAR, "-"))
    console.print(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with subcommands.
    """
    parser = _Parser(
        prog="splitcircle",
        description="Certified polynomial factorisation by the splitting-circle method.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log solver progress.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting a -v given before it.
    common.add_argument(
        "-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="Log solver progress."
    )
    common.add_argument(
        "input",
        nargs="?",
        default="-",
        help="Coefficient file, one 're im' pair per line in ascending degree ('-' for stdin).",
    )
    common.add_argument("--eps", default=DEFAULT_EPS, help="Relative residual bound for factor/roots.")
    common.add_argument("--bits", type=int, default=DEFAULT_BITS, help="Working precision in bits.")
    common.add_argument("--radius", default=DEFAULT_RADIUS, help="Disk radius for count.")
    common.add_argument("--k", type=int, help="Root index for mod (1 = smallest modulus).")
    common.add_argument("--tau", default=DEFAULT_TAU, help="Relative slack e^tau for count and modulus estimates.")
    common.add_argument("--format", choices=["text", "json"], default="text", help="Output format.")
    common.add_argument("--output", help="Write the report to this file instead of stdout.")
    common.add_argument("--settings", help=f"JSON settings file (default: ${SETTINGS_ENV_VAR}).")

    helps = {
        "factor": "Factor into linear factors.",
        "roots": "Print all roots.",
        "count": "Count roots in the disk |z| < radius.",
        "modmax": "Estimate the largest root modulus.",
        "modmin": "Estimate the smallest root modulus.",
        "mod": "Estimate the k-th smallest root modulus.",
    }
    for name in JOB_COMMANDS:
        job_parser = subparsers.add_parser(name, parents=[common], help=helps[name])
        job_parser.set_defaults(func=handle_job)

    info_parser = subparsers.add_parser("info", help="Show environment details.")
    info_parser.add_argument("--settings", help="JSON settings file.")
    info_parser.add_argument(
        "-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="Log solver progress."
    )
    info_parser.set_defaults(func=handle_info)
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def main(argv: Optional[Iterable[str]] = None) -> int:
    """
    Entry point for the CLI. Accepts an argv iterable to aid testing.
    """
    parser = build_parser()
    try:
        parsed_args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _configure_logging(parsed_args.verbose)
    try:
        result = parsed_args.func(parsed_args)
        return int(result) if isinstance(result, int) else 0
    except KeyboardInterrupt:
        console.print("[yellow]Interrupted by user. Exiting.[/yellow]")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
