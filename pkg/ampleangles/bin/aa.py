import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from ampleangles.checks import CHECKS, run_checks
from ampleangles.common import ClassExpression, to_rational
from ampleangles.constraints import build_system
from ampleangles.feasibility import ample_angle_body
from ampleangles.lattice import BaseSurface, SurfaceModel, parse_center
from ampleangles.listeners import CsvListener, SummaryListener, SweepListener
from ampleangles.logpair import BoundaryChain, resolve_chain
from ampleangles.reports import (
    ReportDocument,
    body_report,
    check_report,
    checks_report,
    describe_report,
    tail_report,
)
from ampleangles.sweep import CellResult, iter_cells, run_sweep
from ampleangles.tailblowup import TailSequenceSpec, classify_tail

import click

FORMATS = ("text", "json", "csv")

# config file keys that differ from the click parameter names
CONFIG_ALIASES = {"format": "fmt", "blow_up": "blowups", "r": "r_values"}


class PrintingListener(SweepListener):
    def publish_cell(self, result):
        click.echo(
            "n=%d r=%d h=%d v=%d x=%d budget=%s verdict=%s quadratic=%s tilde_lp=%s"
            % (
                result.n,
                result.r,
                result.h,
                result.v,
                result.x,
                result.budget,
                result.verdict,
                result.quadratic or "-",
                result.tilde_lp,
            )
        )


class BaseParam(click.ParamType):
    name = "base"

    def convert(self, value, param, ctx):
        if isinstance(value, BaseSurface):
            return value
        try:
            return BaseSurface.parse(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class RationalParam(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if value is None or isinstance(value, Fraction):
            return value
        if isinstance(value, str) and value.strip().lower() == "none":
            return None
        try:
            return to_rational(value if isinstance(value, (int, str)) else str(value))
        except (ValueError, ZeroDivisionError):
            self.fail("%r is not a rational number" % (value,), param, ctx)


class CenterParam(click.ParamType):
    name = "center"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_center(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


@dataclass(frozen=True)
class JobConfig:
    command: str
    base: BaseSurface = BaseSurface.hirzebruch(1)
    blowups: Tuple = ()
    chain: Optional[str] = None
    line_bundle: Optional[str] = None
    anti: bool = False
    curves: Optional[str] = None
    curves_complete: bool = False
    box: Optional[Fraction] = Fraction(1)
    h: int = 0
    v: int = 0
    order: Optional[str] = None
    fmt: str = "text"
    out: Optional[str] = None
    jobs: int = 1
    n_min: int = 0
    n_max: int = 3
    r_values: Tuple[int, ...] = (2,)
    max_x: int = 6

    class InvalidConfig(Exception):
        pass

    def validate(self) -> "JobConfig":
        if self.fmt not in FORMATS:
            raise self.InvalidConfig("Unknown format %r" % self.fmt)
        if self.h < 0 or self.v < 0:
            raise self.InvalidConfig("--h and --v must be nonnegative")
        if self.jobs < 1:
            raise self.InvalidConfig("--jobs must be at least 1")
        if self.box is not None and self.box <= 0:
            raise self.InvalidConfig("--box must be positive or none")
        if self.n_min < 0 or self.n_max < self.n_min - 1:
            raise self.InvalidConfig("Bad n range %d..%d" % (self.n_min, self.n_max))
        if self.max_x < 0 or any(r < 1 or r > 4 for r in self.r_values):
            raise self.InvalidConfig("Sweeps need max-x >= 0 and chain lengths 1..4")
        if self.command in ("aa", "tail") and not self.chain:
            raise self.InvalidConfig("%s needs --chain" % self.command)
        if self.curves is not None and not os.path.isfile(self.curves):
            raise self.InvalidConfig("Curve file %r does not exist" % self.curves)
        if self.order is not None and (
            set(self.order) - {"R", "L"}
            or self.order.count("R") != self.h
            or self.order.count("L") != self.v
        ):
            raise self.InvalidConfig("--order must use R exactly h times and L exactly v times")
        return self


def load_config(path: str, commands) -> dict:
    """Flat keys apply to every command; a key naming a command holds that command's section."""
    with open(path) as fp:
        data = json.load(fp)
    if not isinstance(data, dict):
        raise click.UsageError("Config file %s must hold a JSON object" % path)

    def normalize(section):
        keys = ((key, key.replace("-", "_")) for key in section)
        return {CONFIG_ALIASES.get(name, name): section[key] for key, name in keys}

    flat = normalize({k: v for k, v in data.items() if not (k in commands and isinstance(v, dict))})
    default_map = {}
    for command in commands:
        section = dict(flat)
        if isinstance(data.get(command), dict):
            section.update(normalize(data[command]))
        default_map[command] = section
    return default_map


def build_surface(config: JobConfig) -> SurfaceModel:
    S = SurfaceModel(config.base)
    for center in config.blowups:
        S = S.blow_up(center)
    return S


def build_pair(config: JobConfig) -> Tuple[SurfaceModel, Optional[BoundaryChain]]:
    S = build_surface(config)
    if not config.chain:
        return S, None
    return resolve_chain(S, [item for item in config.chain.split(",") if item.strip()])


def load_curves(path: Optional[str]):
    if path is None:
        return []
    with open(path) as fp:
        data = json.load(fp)
    try:
        return [(item["label"], item["class"]) for item in data]
    except (KeyError, TypeError):
        raise JobConfig.InvalidConfig(
            'Curve file %s must be a list of {"label": ..., "class": ...}' % path
        )


def prepare(ctx, command: str, **kw) -> JobConfig:
    try:
        return JobConfig(command=command, **kw).validate()
    except JobConfig.InvalidConfig as e:
        raise click.UsageError(str(e), ctx)


def usage_errors():
    return (
        SurfaceModel.Error,
        BoundaryChain.Error,
        ClassExpression.Error,
        TailSequenceSpec.Error,
        JobConfig.InvalidConfig,
        ValueError,
    )


def emit(config: JobConfig, document: ReportDocument) -> None:
    try:
        text = document.render(config.fmt)
    except ValueError as e:
        raise click.UsageError(str(e))
    if config.out is None:
        click.echo(text, nl=False)
        return
    os.makedirs(config.out, exist_ok=True)
    extension = "txt" if config.fmt == "text" else config.fmt
    path = os.path.join(config.out, "%s.%s" % (document.kind, extension))
    with open(path, "w") as fp:
        fp.write(text)
    logging.getLogger(__name__).info("wrote %s", path)


def surface_options(function):
    function = click.option(
        "--blow-up",
        "blowups",
        type=CenterParam(),
        multiple=True,
        help="Blow up a point: Z, Z&F, - (off every curve), Z:2 for multiplicity 2.",
    )(function)
    function = click.option("--base", type=BaseParam(), default="F1", show_default=True)(function)
    return function


def output_options(function):
    function = click.option("--out", type=click.Path(file_okay=False), default=None)(function)
    function = click.option(
        "--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True
    )(function)
    return function


@click.group()
@click.option("-v", "--verbose", count=True)
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def cli(ctx, verbose, config):
    logging.basicConfig(
        level=logging.WARNING - 10 * min(verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if config is not None:
        ctx.default_map = load_config(config, list(cli.commands))
    ctx.ensure_object(dict)


@cli.command()
@surface_options
@click.option("--chain", default=None, help="Comma-separated boundary components.")
@output_options
@click.pass_context
def describe(ctx, base, blowups, chain, fmt, out):
    config = prepare(ctx, "describe", base=base, blowups=blowups, chain=chain, fmt=fmt, out=out)
    try:
        S, C = build_pair(config)
        document = describe_report(S, C)
    except usage_errors() as e:
        raise click.UsageError(str(e), ctx)
    emit(config, document)


@cli.command()
@surface_options
@click.option("--chain", default=None, help="Comma-separated boundary components.")
@click.option("--line-bundle", default=None, help="Class L; defaults to -K.")
@click.option("--anti", is_flag=True, help="Body of anti-ample angles.")
@click.option("--curves", type=click.Path(dir_okay=False), default=None)
@click.option("--box", type=RationalParam(), default="1", show_default=True)
@output_options
@click.pass_context
def aa(ctx, base, blowups, chain, line_bundle, anti, curves, box, fmt, out):
    config = prepare(
        ctx,
        "aa",
        base=base,
        blowups=blowups,
        chain=chain,
        line_bundle=line_bundle,
        anti=anti,
        curves=curves,
        box=box,
        fmt=fmt,
        out=out,
    )
    sign = -1 if config.anti else 1
    try:
        S, C = build_pair(config)
        L = S.evaluate(config.line_bundle) if config.line_bundle else None
        extra = [(label, S.evaluate(value)) for label, value in load_curves(config.curves)]
        system = build_system(S, C, curves=extra, L=L, sign=sign, box=config.box)
    except usage_errors() as e:
        raise click.UsageError(str(e), ctx)
    emit(config, body_report(ample_angle_body(system), sign))


@cli.command()
@surface_options
@click.option("--chain", default="Z,F", show_default=True)
@click.option("--h", "h", type=int, default=0, show_default=True)
@click.option("--v", "v", type=int, default=0, show_default=True)
@click.option("--order", default=None, help="Word in R and L fixing the blow-up order.")
@click.option("--curves", type=click.Path(dir_okay=False), default=None)
@click.option("--curves-complete", is_flag=True, help="Assert the curve list is complete.")
@click.option("--box", type=RationalParam(), default="1", show_default=True)
@output_options
@click.pass_context
def tail(ctx, base, blowups, chain, h, v, order, curves, curves_complete, box, fmt, out):
    config = prepare(
        ctx,
        "tail",
        base=base,
        blowups=blowups,
        chain=chain,
        h=h,
        v=v,
        order=order,
        curves=curves,
        curves_complete=curves_complete,
        box=box,
        fmt=fmt,
        out=out,
    )
    try:
        S, C = build_pair(config)
        spec = TailSequenceSpec(S, C, config.h, config.v, config.order)
        report = classify_tail(spec, load_curves(config.curves), config.curves_complete, config.box)
    except usage_errors() as e:
        raise click.UsageError(str(e), ctx)
    emit(config, tail_report(report))


@cli.command()
@click.option("--n-min", type=int, default=0, show_default=True)
@click.option("--n-max", type=int, default=3, show_default=True)
@click.option("--r", "r_values", type=int, multiple=True, default=(2,), show_default=True)
@click.option("--max-x", type=int, default=6, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@output_options
@click.pass_context
def sweep(ctx, n_min, n_max, r_values, max_x, jobs, fmt, out):
    config = prepare(
        ctx,
        "sweep",
        n_min=n_min,
        n_max=n_max,
        r_values=tuple(r_values),
        max_x=max_x,
        jobs=jobs,
        fmt=fmt,
        out=out,
    )
    cells = iter_cells(range(config.n_min, config.n_max + 1), config.r_values, config.max_x)
    table = CsvListener()
    listeners = [table, SummaryListener()]
    if config.fmt == "text" and config.out is None:
        listeners.append(PrintingListener())
    run_sweep(cells, config.jobs, listeners)
    rows = table.rows
    lines = [
        " ".join("%s=%s" % (column, row[column]) for column in CellResult.COLUMNS) for row in rows
    ]
    document = ReportDocument("sweep", {"cells": rows}, lines, (CellResult.COLUMNS, rows))
    if config.fmt == "text" and config.out is None:
        return
    emit(config, document)


@cli.command()
@click.option("--only", type=click.Choice(list(CHECKS)), multiple=True)
@click.option("--quick", is_flag=True, help="Smaller grids.")
@output_options
@click.pass_context
def verify(ctx, only, quick, fmt, out):
    config = prepare(ctx, "verify", fmt=fmt, out=out)
    results = run_checks(only, quick)
    document = checks_report(results)
    if config.fmt == "csv":
        columns = ("name", "anchor", "passed", "detail")
        document.table = (columns, [result.serialize() for result in results])
    emit(config, document)
    if not all(result.passed for result in results):
        ctx.exit(1)


@cli.command()
@click.argument("report", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def check(ctx, report):
    with open(report) as fp:
        try:
            data = json.load(fp)
        except ValueError as e:
            raise click.UsageError("%s is not JSON: %s" % (report, e), ctx)
    results = check_report(data)
    for path, ok in results:
        click.echo("%s %s" % ("ok" if ok else "FAILED", path))
    if not results:
        click.echo("no certificates found")
    if not all(ok for _, ok in results):
        ctx.exit(1)


if __name__ == "__main__":
    cli()
