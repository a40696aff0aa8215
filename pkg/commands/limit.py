import click

import limitfn
from commands import pass_session, system_options
from models import Side


@click.command("lambda")
@system_options
@click.option("--x", "x", required=True, help="Base-s literal such as 0.11 or 0.1(01), or num/den")
@click.option("--tol", "tol", type=float, default=None, help="Absolute error target")
@click.option("--k", "k", type=click.IntRange(min=1), default=None,
              help="Also report the finite-stage value at depth k and its bound")
@pass_session
def lambda_cmd(session, system_text, q, r, p, x, tol, k):
    """Get lambda(x) as `value ± bound`"""
    sys = session.system(system_text, q, r, p)
    point = limitfn.parse_sary(x, sys.s)
    if k is not None:
        session.writer.write_record(limitfn.lambda_truncation_error(sys, point, k))
        return
    session.writer.write_value(limitfn.lambda_value(sys, point, tol, session.precision))


@click.command("continuity")
@system_options
@click.option("--x", "x", required=True, help="Point of [1/s, 1) as a base-s literal or num/den")
@click.option("--side", "side", type=click.Choice([s.value for s in Side]), default=Side.LEFT.value,
              show_default=True)
@click.option("--depth", "depth", type=click.IntRange(min=1), default=30, show_default=True)
@pass_session
def continuity_cmd(session, system_text, q, r, p, x, side, depth):
    """Probe one-sided continuity of lambda at x"""
    sys = session.system(system_text, q, r, p)
    point = limitfn.parse_sary(x, sys.s)
    session.writer.write_record(limitfn.continuity_probe(sys, point, Side(side), depth, session.precision))


@click.command("grid")
@system_options
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Grid depth")
@pass_session
def grid_cmd(session, system_text, q, r, p, k):
    """Stream lambda(n / s^k) for n in [s^(k-1), s^k)"""
    sys = session.system(system_text, q, r, p)
    batch = limitfn.grid_batch(sys, k)
    session.writer.write_table(["n", "lambda", "lambda_err"], zip(batch.n, batch.value, batch.error))
