import click

import linearcase
from commands import pass_session, system_options


@click.command("bounds")
@system_options
@pass_session
def bounds_cmd(session, system_text, q, r, p):
    """Get the exact m and M of a linear system"""
    ls = session.linear(system_text, q, r, p)
    session.writer.write_record(linearcase.bounds_response(ls))


@click.command("envelope")
@system_options
@click.option("--kmax", "kmax", type=click.IntRange(min=0), default=6, show_default=True)
@pass_session
def envelope_cmd(session, system_text, q, r, p, kmax):
    """Check b_{s^(k+1)-1} <= b_n <= b_{s^k} block by block, k = 0..kmax"""
    ls = session.linear(system_text, q, r, p)
    rows = linearcase.envelope_rows(ls, kmax, session.precision)
    if session.cfg.fmt == "json":
        session.writer.write_record(rows)
        return
    session.writer.write_models(rows)
