"""Text and JSON output for command results.

Every renderer takes the output format ("text" or "json") and returns the
string written to stdout. JSON is dumped with a fixed key order and indent,
so repeated runs are byte-identical.
"""

import json
from fractions import Fraction
from typing import Any, Dict, List, Sequence

from henselian.cells import Cell, Measure
from henselian.constructible import NON_INTEGRABLE, Integral
from henselian.prepare import PreparedCell
from henselian.rational_function import RationalFunctionT


def fmt_rational(q) -> str:
    """a/b in lowest terms, b omitted when 1"""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dump(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def cell_to_json(cell: Cell) -> Dict[str, Any]:
    return {
        "center": fmt_rational(cell.center),
        "lo": cell.lo,
        "hi": cell.hi,
        "lambda": fmt_rational(cell.lam),
        "n": cell.n,
    }


def prepared_to_json(pc: PreparedCell) -> Dict[str, Any]:
    return {
        "cell": cell_to_json(pc.cell),
        "functions": [
            {"h": fmt_rational(item.h), "a": item.a, "unit": fmt_rational(item.unit)}
            for item in pc.data
        ],
        "certificate_modulus": pc.certificate_modulus,
    }


def render_value(value: Any, key: str, fmt: str) -> str:
    """A single scalar result: the value itself, or {key: value} in JSON"""
    if isinstance(value, Fraction):
        value = fmt_rational(value)
    elif isinstance(value, bool):
        value = "true" if value else "false"
    else:
        value = str(value)
    if fmt == "json":
        return dump({key: value})
    return value


def render_measure(measure: Measure, fmt: str) -> str:
    text = fmt_rational(measure) if isinstance(measure, Fraction) else str(measure)
    return dump({"measure": text}) if fmt == "json" else text


def render_integral(value: Integral, fmt: str, paper_convention: bool = False) -> str:
    """NON_INTEGRABLE is shown as 0 under the absolutely-integrable convention"""
    if value is NON_INTEGRABLE:
        text = "0" if paper_convention else str(NON_INTEGRABLE)
    else:
        text = fmt_rational(value)
    return dump({"integral": text}) if fmt == "json" else text


def render_cells(cells: Sequence[Cell], fmt: str) -> str:
    if fmt == "json":
        return dump([cell_to_json(c) for c in cells])
    return "\n".join(str(c) for c in cells)


def render_prepared(cells: Sequence[PreparedCell], fmt: str) -> str:
    if fmt == "json":
        return dump([prepared_to_json(pc) for pc in cells])
    lines = []
    for pc in cells:
        data = "; ".join(
            f"f{j}: h={fmt_rational(item.h)}, a={item.a}"
            + ("" if item.unit == 1 else f", u={fmt_rational(item.unit)}")
            for j, item in enumerate(pc.data)
        )
        lines.append(f"{pc.cell}  [{data}]")
    return "\n".join(lines)


def render_zeta(z: RationalFunctionT, fmt: str) -> str:
    if fmt == "json":
        return dump(z.to_json())
    return f"Z(T) = {z.render()}"


def render_list(values: List[Any], key: str, fmt: str) -> str:
    items = [fmt_rational(v) if isinstance(v, (int, Fraction)) else str(v) for v in values]
    if fmt == "json":
        return dump({key: items})
    return ", ".join(items)


def render_hensel(root: Fraction, p: int, precision: int, fmt: str) -> str:
    text = fmt_rational(root)
    if fmt == "json":
        return dump({"root": text, "prime": p, "precision": precision})
    return f"{text} mod {p}^{precision}"


def render_report(report: Dict[str, Any], fmt: str) -> str:
    """Oracle partition report; points are rendered as rationals"""
    violations = [
        {"point": fmt_rational(v["point"]), "count": v["count"], "expected": v["expected"]}
        for v in report["violations"]
    ]
    if fmt == "json":
        return dump({
            "ok": report["ok"],
            "points_checked": report["points_checked"],
            "violations": violations,
        })
    if report["ok"]:
        return f"✅ ok: {report['points_checked']} points checked"
    lines = [f"❌ {len(violations)} violations among {report['points_checked']} points"]
    for v in violations:
        lines.append(f"   t = {v['point']}: in {v['count']} cells, expected {v['expected']}")
    return "\n".join(lines)
