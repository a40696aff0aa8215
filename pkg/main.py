import logging

import click
from pydantic import ValidationError

from commands import Session, linear_from
from commands import density, limit, linear, staircase, terms
from config import settings
from digits import parse_system, validation_message
from errors import CantorError, ValidationFailure
from models import Precision
from schemas import RunConfig


class CantorGroup(click.Group):
    """Maps module errors to exit codes: 2 for validation, 3 for budgets"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except CantorError as e:
            click.echo(f"ERROR: {e.detail}", err=True)
            ctx.exit(e.exit_code)
        except ValidationError as e:
            click.echo(f"ERROR: {validation_message(e)}", err=True)
            ctx.exit(ValidationFailure.exit_code)


@click.group(cls=CantorGroup)
@click.option("--sys", "system_text", default=None, help="System spec, e.g. 'p=3;A=0,2'")
@click.option("--q", "q", type=int, default=None, help="Modulus of a linear system h(i) = q i + r")
@click.option("--r", "r", type=int, default=None, help="Remainder of a linear system")
@click.option("--p", "p", type=int, default=None, help="Radix of a linear system")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted)")
@click.option("--precision", "precision", type=click.Choice([p.value for p in Precision]),
              default=settings.PRECISION, show_default=True)
@click.option("--cap-atoms", "cap_atoms", type=int, default=settings.ATOM_CAP, show_default=True)
@click.option("--cap-scan", "cap_scan", type=int, default=settings.SCAN_CAP, show_default=True)
@click.option("--verbose", is_flag=True, help="Log scans and precision escalations")
@click.pass_context
def cli(ctx, system_text, q, r, p, fmt, out, precision, cap_atoms, cap_scan, verbose):
    """Cantor integers, their normalized sequence and its distribution"""
    logging.basicConfig(
        level=logging.INFO if verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    cfg = RunConfig(
        system=parse_system(system_text) if system_text else None,
        linear=linear_from(q, r, p),
        fmt=fmt,
        out=out,
        precision=Precision(precision),
        cap_atoms=cap_atoms,
        cap_scan=cap_scan,
    )
    # budgets and precision apply to this invocation
    settings.PRECISION = cfg.precision.value
    settings.ATOM_CAP = cfg.cap_atoms
    settings.SCAN_CAP = cfg.cap_scan
    ctx.obj = Session(cfg, ctx)


# Sequence
cli.add_command(terms.seq_cmd)
cli.add_command(terms.extrema_cmd)
cli.add_command(terms.descent_cmd)
cli.add_command(terms.dense_cmd)
# Limit function
cli.add_command(limit.lambda_cmd)
cli.add_command(limit.continuity_cmd)
cli.add_command(limit.grid_cmd)
# Measure
cli.add_command(staircase.measure_cmd)
cli.add_command(staircase.ifs_cmd)
cli.add_command(staircase.accpoint_cmd)
# Distribution
cli.add_command(density.cdf_cmd)
cli.add_command(density.ldf_cmd)
cli.add_command(density.levelset_cmd)
# Linear digit maps
cli.add_command(linear.bounds_cmd)
cli.add_command(linear.envelope_cmd)


if __name__ == "__main__":
    cli()
