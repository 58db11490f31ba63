"""Report documents: schema-versioned JSON, CSV tables and plain text renderings."""

import csv
import io
import json
import logging

from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .common import SCHEMA_VERSION, format_rational, format_vector
from .feasibility import AmpleAngleBody, FeasibilityCertificate, HomogeneousSystem
from .lattice import DivisorClass, SurfaceModel
from .logpair import BoundaryChain, ChainKind, adjunction_ledger, incidence, verify_chain
from .tailblowup import TailReport, budget

log = logging.getLogger(__name__)


class ReportDocument:
    __slots__ = ("kind", "payload", "lines", "table")

    def __init__(
        self,
        kind: str,
        payload: Dict[str, Any],
        lines: Sequence[str] = (),
        table: Optional[Tuple[Sequence[str], Sequence[Dict[str, Any]]]] = None,
    ) -> None:
        self.kind = kind
        self.payload = payload
        self.lines = list(lines)
        self.table = table

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.payload, schema=SCHEMA_VERSION, kind=self.kind)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def to_csv(self) -> str:
        if self.table is None:
            raise ValueError("%s reports have no tabular form" % self.kind)
        columns, rows = self.table
        return write_csv(columns, rows)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        return self.to_text()


def write_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: "" if value is None else value for key, value in row.items()})
    return buffer.getvalue()


def format_class(S: SurfaceModel, D: DivisorClass) -> str:
    """``2Z+3F-E1`` style rendering over the generators of S."""
    terms = []
    for name, value in zip(S.generators, D.coords):
        if not value:
            continue
        magnitude = abs(value)
        coefficient = "" if magnitude == 1 else format_rational(magnitude)
        prefix = "-" if value < 0 else ("+" if terms else "")
        terms.append("%s%s%s" % (prefix, coefficient, name))
    return "".join(terms) or "0"


def describe_report(S: SurfaceModel, C: Optional[BoundaryChain] = None) -> ReportDocument:
    anti_canonical = -S.canonical_class()
    payload: Dict[str, Any] = {
        "surface": S.serialize(),
        "rank": S.rank,
        "generators": list(S.generators),
        "intersection_matrix": [format_vector(row) for row in S.gram()],
        "anticanonical": format_class(S, anti_canonical),
        "K_squared": format_rational(S.intersect(anti_canonical, anti_canonical)),
        "curves": {label: format_class(S, S.curve(label)) for label in S.labels},
    }
    lines = [
        "surface: %s (rank %d)" % (S, S.rank),
        "generators: %s" % " ".join(S.generators),
        "intersection matrix:",
    ]
    lines += ["  " + " ".join(value.rjust(3) for value in format_vector(row)) for row in S.gram()]
    lines.append("-K = %s, K^2 = %s" % (payload["anticanonical"], payload["K_squared"]))
    if C is not None:
        kind = verify_chain(S, C)
        payload["chain"] = C.serialize()
        payload["classification"] = kind.value
        payload["incidence"] = [format_vector(row) for row in incidence(S, C)]
        lines.append("boundary: %s (%s)" % (" + ".join(C.labels), kind.value))
        if kind is ChainKind.CYCLE:
            payload["note"] = "no tails"
            lines.append("note: no tails")
        if kind is not ChainKind.INVALID:
            value = budget(S, C)
            payload["budget"] = format_rational(value)
            payload["adjunction"] = format_vector(adjunction_ledger(S, C))
            lines.append("(K + C)^2 = %s" % payload["budget"])
            lines.append("c_i.(K + C): %s" % " ".join(payload["adjunction"]))
    return ReportDocument("describe", payload, lines)


def body_report(body: AmpleAngleBody, sign: int = 1) -> ReportDocument:
    payload = body.serialize()
    payload["sign"] = sign
    names = body.system.names
    lines = ["angles: %s" % " ".join(names)]
    lines.append("body: %s" % ("nonempty" if body.nonempty else "empty"))
    for row in body.system.linear:
        lines.append("  %s > 0  [%s %s]" % (row.form.to_str(names), row.provenance, row.label))
    if body.system.quadratic is not None:
        lines.append("  %s > 0  [square]" % body.system.quadratic.to_str(names))
    if body.nonempty and body.dim == 1:
        low, high = body.interval()
        lines.append("interval: (%s, %s)" % (low, "inf" if high is None else high))
    for point, s in body.vertices:
        lines.append("vertex (%s) square sign %+d" % (", ".join(format_vector(point)), s))
    if body.samples:
        lines.append("%d sample points" % len(body.samples))
    origin = body.origin
    lines.append(
        "0 in closure: %s%s" % (origin.contains, " (%s)" % origin.note if origin.note else "")
    )
    lines.append("strongly asymptotic: %s" % payload["strongly_asymptotic"])
    lines.append("log positive: %s" % payload["log_positive"])
    if payload["nef_at_corner"] is not None:
        lines.append("corner (1,...,1) in closure: %s" % payload["nef_at_corner"])
    columns = ["kind"] + list(names) + ["quadratic_sign"]
    rows = [
        dict({"kind": kind, "quadratic_sign": s}, **dict(zip(names, format_vector(point))))
        for kind, points in (("vertex", body.vertices), ("sample", body.samples))
        for point, s in points
    ]
    return ReportDocument("aa", payload, lines, (columns, rows))


def tail_report(report: TailReport) -> ReportDocument:
    payload = report.serialize()
    spec = report.spec
    lines = [
        "base: %s, chain %s" % (spec.surface, " + ".join(spec.chain.labels)),
        "tail blow-ups: h=%d v=%d (order %s)" % (spec.h, spec.v, spec.word or "-"),
        "budget (K_s + c)^2 = %s, x = %d" % (format_rational(report.budget), spec.x),
        "verdict: %s" % report.verdict.value,
    ]
    if report.quadratic is not None:
        lines.append("square: %s" % report.quadratic.value)
    if report.origin is not None and report.origin.note:
        lines.append("origin: %s" % report.origin.note)
    if report.block is not None:
        lines.append("block matrix feasible: %s" % report.block["feasible"])
    if report.curves:
        lines.append("curves: %s" % ", ".join(report.curves))
    lines += ["note: %s" % note for note in report.notes or []]
    return ReportDocument("tail", payload, lines)


def checks_report(results) -> ReportDocument:
    payload = {
        "passed": all(result.passed for result in results),
        "checks": [result.serialize() for result in results],
    }
    lines = [
        "%s %s: %s (%s)" % ("PASS" if r.passed else "FAIL", r.name, r.anchor, r.detail)
        for r in results
    ]
    return ReportDocument("verify", payload, lines)


def iter_bundles(data: Any, path: str = "$") -> Iterator[Tuple[str, Dict[str, Any]]]:
    """Every embedded {"system", "certificate"} pair, depth first."""
    if isinstance(data, dict):
        if "system" in data and "certificate" in data:
            yield path, data
        for key in sorted(data):
            yield from iter_bundles(data[key], "%s.%s" % (path, key))
    elif isinstance(data, list):
        for index, item in enumerate(data):
            yield from iter_bundles(item, "%s[%d]" % (path, index))


def check_report(data: Any) -> List[Tuple[str, bool]]:
    """Re-verify every certificate embedded in a report with plain rational arithmetic."""
    results = []
    for path, bundle in iter_bundles(data):
        try:
            system = HomogeneousSystem.deserialize(bundle["system"])
            certificate = FeasibilityCertificate.deserialize(bundle["certificate"])
            ok = certificate.verify(system)
        except (KeyError, TypeError, ValueError, HomogeneousSystem.Error) as e:
            log.warning("malformed certificate at %s: %s", path, e)
            ok = False
        results.append((path, ok))
    return results
