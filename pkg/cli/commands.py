"""Argument parsing and dispatch for the cellprep command line."""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, TextIO

from sympy import isprime

from config import DEFAULT_DOMAIN, DEFAULT_OUTPUT_FORMAT, DEFAULT_PRECISION, ORACLE_VALUATION_WINDOW
from henselian.cells import Cell, cell_measure, refine_by_coset
from henselian.constructible import Mode, igusa_zeta, integrand, integrate
from henselian.errors import HenselianError
from henselian.hensel_power import (
    coset_reps,
    hensel_lift,
    is_nth_power,
    laurent_is_nth_power,
    laurent_power_index,
    power_index,
)
from henselian.prepare import SplitPoly, as_split, decompose, prepare
from henselian.valued_core import LaurentField, PAdicField, ValuedField, ac, residue, restricted_div, valuation
from utils.oracle import (
    SampleGrid,
    default_depth,
    evaluate_split,
    oracle_abs,
    oracle_formula_holds,
    oracle_integrate,
    oracle_measure,
    oracle_nth_power_classes,
    oracle_partition_check,
    resolving_depth,
    vp,
)
from .parser import ParseError, parse_cell, parse_element, parse_formula, parse_poly, parse_rational
from .render import (
    render_cells,
    render_hensel,
    render_integral,
    render_list,
    render_measure,
    render_prepared,
    render_report,
    render_value,
    render_zeta,
)

logger = logging.getLogger(__name__)

# Commands that work over any field; everything else lives over Q_p.
FIELD_COMMANDS = {"valuation", "ac", "residue", "div", "power", "index"}


class UsageError(Exception):
    """Bad command-line arguments (exit code 2)."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="residue characteristic p")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="target precision for hensel, coefficient cap for Laurent fields")
    common.add_argument("--format", choices=["text", "json"], default=DEFAULT_OUTPUT_FORMAT)
    common.add_argument("--paper-convention-ilz", action="store_true",
                        help="render NON_INTEGRABLE as 0")
    common.add_argument("--field", choices=["qp", "fp-laurent", "q-laurent"], default="qp")

    parser = _ArgumentParser(prog="cellprep",
                             description="Exact computation in p-adic and Laurent series fields")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("valuation", "ac", "residue"):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument("x")
    cmd = sub.add_parser("div", parents=[common], help="restricted division D(x, y)")
    cmd.add_argument("x")
    cmd.add_argument("y")
    cmd = sub.add_parser("power", parents=[common], help="is x an n-th power?")
    cmd.add_argument("--n", type=int, required=True)
    cmd.add_argument("x")
    for name in ("cosets", "index"):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument("--n", type=int, required=True)
    cmd = sub.add_parser("hensel", parents=[common], help="lift a simple root of f")
    cmd.add_argument("--root", required=True)
    cmd.add_argument("poly")
    cmd = sub.add_parser("measure", parents=[common], help="Haar measure of a cell (JSON)")
    cmd.add_argument("cell")
    cmd = sub.add_parser("refine", parents=[common])
    cmd.add_argument("--m", type=int, required=True)
    cmd.add_argument("cell")
    cmd = sub.add_parser("prepare", parents=[common])
    cmd.add_argument("--modulus", type=int, default=1)
    cmd.add_argument("polys", nargs="+")
    cmd = sub.add_parser("decompose", parents=[common])
    cmd.add_argument("formula")
    cmd = sub.add_parser("integrate", parents=[common], help="integral of |f|^s or v(f)^s")
    _add_integrand_arguments(cmd)
    cmd = sub.add_parser("zeta", parents=[common], help="Igusa zeta function of f")
    cmd.add_argument("--domain", default=None)
    cmd.add_argument("poly")

    oracle = sub.add_parser("oracle", help="brute-force checks over residue classes")
    oracle_sub = oracle.add_subparsers(dest="oracle_command", required=True)
    cmd = oracle_sub.add_parser("powers", parents=[common])
    cmd.add_argument("--n", type=int, required=True)
    cmd.add_argument("--depth", type=int, default=None)
    cmd = oracle_sub.add_parser("measure", parents=[common])
    cmd.add_argument("--depth", type=int, default=None)
    cmd.add_argument("cell")
    cmd = oracle_sub.add_parser("integrate", parents=[common])
    cmd.add_argument("--depth", type=int, default=None)
    _add_integrand_arguments(cmd)
    for name, operand in (("partition", "cells"), ("decompose", "formula")):
        cmd = oracle_sub.add_parser(name, parents=[common])
        cmd.add_argument("--v-lo", type=int, default=ORACLE_VALUATION_WINDOW[0])
        cmd.add_argument("--v-hi", type=int, default=ORACLE_VALUATION_WINDOW[1])
        cmd.add_argument("--depth", type=int, default=None)
        cmd.add_argument(operand)
    return parser


def _add_integrand_arguments(cmd: argparse.ArgumentParser):
    cmd.add_argument("--mode", choices=["abs", "v"], default="abs")
    cmd.add_argument("--exponent", type=int, default=1)
    cmd.add_argument("--domain", default=None, help="cell JSON, default R minus {0}")
    cmd.add_argument("poly")


class CommandProcessor:
    def __init__(self, argv: List[str], stdin: Optional[TextIO] = None):
        self.argv = list(argv)
        self.stdin = stdin if stdin is not None else sys.stdin
        self.parser = build_parser()
        self._stdin_text: Optional[str] = None

    def run(self) -> Dict[str, Any]:
        """Parse, validate and run one command"""
        try:
            args = self.parser.parse_args(self.argv)
            self._validate(args)
            handler = self._handler(args)
            logger.info(f"Running {args.command}")
            output = handler(args)
            return {'success': True, 'output': output, 'error': None, 'exit_code': 0}
        except (ParseError, UsageError) as e:
            return {'success': False, 'output': '', 'error': str(e), 'exit_code': 2}
        except HenselianError as e:
            message = str(e)
            error = message if message == e.kind else f"{e.kind}: {message}"
            return {'success': False, 'output': '', 'error': error, 'exit_code': 1}
        except (ValueError, ArithmeticError, TypeError) as e:
            return {'success': False, 'output': '', 'error': str(e), 'exit_code': 1}

    def _handler(self, args) -> Callable:
        if args.command == "oracle":
            return getattr(self, f"_oracle_{args.oracle_command}")
        return getattr(self, f"_cmd_{args.command}")

    def _validate(self, args):
        needs_prime = args.command not in FIELD_COMMANDS or args.field != "q-laurent"
        if needs_prime and args.prime is None:
            raise UsageError(f"--prime is required for {args.command}")
        if args.prime is not None and not isprime(args.prime):
            raise UsageError(f"--prime must be a prime, got {args.prime}")
        if args.precision < 1:
            raise UsageError(f"--precision must be >= 1, got {args.precision}")
        if args.command not in FIELD_COMMANDS and args.field != "qp":
            raise UsageError(f"{args.command} works over Q_p only")
        if args.command in ("cosets", "index") and args.field == "q-laurent":
            raise UsageError("Q((t)) has infinite power indices")
        for name in ("n", "m", "modulus"):
            value = getattr(args, name, None)
            if value is not None and value < 1:
                raise UsageError(f"--{name} must be >= 1, got {value}")
        depth = getattr(args, "depth", None)
        if depth is not None and depth < 1:
            raise UsageError(f"--depth must be >= 1, got {depth}")
        if getattr(args, "v_lo", 0) > getattr(args, "v_hi", 0):
            raise UsageError("--v-lo must not exceed --v-hi")

    def _read(self, value: str) -> str:
        """'-' stands for standard input"""
        if value != "-":
            return value
        if self._stdin_text is None:
            self._stdin_text = self.stdin.read().strip()
        return self._stdin_text

    def _field(self, args) -> ValuedField:
        if args.field == "qp":
            return PAdicField(args.prime)
        if args.field == "fp-laurent":
            return LaurentField(args.prime, precision_cap=args.precision)
        return LaurentField(None, precision_cap=args.precision)

    def _element(self, args, text: str):
        return parse_element(self._read(text), self._field(args))

    def _split(self, text: str) -> SplitPoly:
        return as_split(parse_poly(self._read(text)))

    def _cell(self, args, text: str) -> Cell:
        return parse_cell(self._read(text), args.prime)

    def _domain(self, args) -> Cell:
        if args.domain is None:
            return parse_cell(dict(DEFAULT_DOMAIN), args.prime)
        return self._cell(args, args.domain)

    # Valued-field commands

    def _cmd_valuation(self, args) -> str:
        return render_value(valuation(self._element(args, args.x)), "valuation", args.format)

    def _cmd_ac(self, args) -> str:
        return render_value(ac(self._element(args, args.x)), "ac", args.format)

    def _cmd_residue(self, args) -> str:
        return render_value(residue(self._element(args, args.x)), "residue", args.format)

    def _cmd_div(self, args) -> str:
        x, y = self._element(args, args.x), self._element(args, args.y)
        return render_value(restricted_div(x, y), "quotient", args.format)

    def _cmd_power(self, args) -> str:
        if args.field == "qp":
            holds = is_nth_power(parse_rational(self._read(args.x)), args.n, args.prime)
        else:
            holds = laurent_is_nth_power(self._element(args, args.x), args.n)
        return render_value(holds, "is_power", args.format)

    def _cmd_cosets(self, args) -> str:
        reps = [rep.representative for rep in coset_reps(args.prime, args.n)]
        return render_list(reps, "representatives", args.format)

    def _cmd_index(self, args) -> str:
        if args.field == "qp":
            value = power_index(args.prime, args.n)
        else:
            value = laurent_power_index(args.prime, args.n)
        return render_value(value, "index", args.format)

    def _cmd_hensel(self, args) -> str:
        poly = parse_poly(self._read(args.poly))
        poly = poly.to_poly(args.prime) if isinstance(poly, SplitPoly) else poly.with_prime(args.prime)
        root = hensel_lift(poly, parse_rational(args.root), args.precision)
        return render_hensel(root.to_fraction(), args.prime, args.precision, args.format)

    # Cells and decomposition

    def _cmd_measure(self, args) -> str:
        return render_measure(cell_measure(self._cell(args, args.cell)), args.format)

    def _cmd_refine(self, args) -> str:
        return render_cells(refine_by_coset(self._cell(args, args.cell), args.m), args.format)

    def _cmd_prepare(self, args) -> str:
        fs = [self._split(text) for text in args.polys]
        return render_prepared(prepare(fs, args.prime, args.modulus), args.format)

    def _cmd_decompose(self, args) -> str:
        phi = parse_formula(self._read(args.formula))
        return render_cells(decompose(phi, args.prime), args.format)

    # Integration

    def _cmd_integrate(self, args) -> str:
        f = integrand(self._split(args.poly), args.prime, self._domain(args),
                      Mode(args.mode), args.exponent)
        return render_integral(integrate(f), args.format, args.paper_convention_ilz)

    def _cmd_zeta(self, args) -> str:
        z = igusa_zeta(self._split(args.poly), args.prime, self._domain(args))
        return render_zeta(z, args.format)

    # Oracle

    def _oracle_powers(self, args) -> str:
        k = args.depth or default_depth(args.prime)
        classes = sorted(oracle_nth_power_classes(args.prime, args.n, k))
        return render_list(classes, "classes", args.format)

    def _oracle_measure(self, args) -> str:
        cell = self._cell(args, args.cell)
        k = args.depth
        if k is None:
            bounded = cell.is_point or (cell.hi is not None and cell.lo is not None)
            k = resolving_depth(cell) if bounded else default_depth(args.prime)
        return render_measure(oracle_measure(cell, k), args.format)

    def _oracle_integrate(self, args) -> str:
        f = self._split(args.poly)
        p, s = args.prime, args.exponent
        if args.mode == "abs":
            value = oracle_abs(lambda t: evaluate_split(f, t), p, s)
        else:
            def value(t):
                v = vp(evaluate_split(f, t), p)
                return Fraction(0) if v is None else Fraction(v) ** s
        k = args.depth or default_depth(p)
        total = oracle_integrate(value, self._domain(args), k)
        return render_value(total, "integral", args.format)

    def _oracle_partition(self, args) -> str:
        cells = _cells_from_json(self._read(args.cells), args.prime)
        grid = SampleGrid(args.prime, args.v_lo, args.v_hi, args.depth)
        grid = grid.with_points(c.center for c in cells)
        return render_report(oracle_partition_check(cells, grid), args.format)

    def _oracle_decompose(self, args) -> str:
        phi = parse_formula(self._read(args.formula))
        cells = decompose(phi, args.prime)
        roots = [root for f in phi.polynomials() for root in f.roots()]
        grid = SampleGrid(args.prime, args.v_lo, args.v_hi, args.depth).with_points(roots)
        report = oracle_partition_check(cells, grid, lambda t: oracle_formula_holds(phi, t, args.prime))
        return render_report(report, args.format)


def _cells_from_json(text: str, prime: int) -> List[Cell]:
    """A JSON list of cells, or of prepared cells as printed by prepare"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.colno) from e
    if not isinstance(data, list):
        raise ParseError("expected a JSON list of cells", 1)
    return [parse_cell(item["cell"] if isinstance(item, dict) and "cell" in item else item, prime)
            for item in data]
