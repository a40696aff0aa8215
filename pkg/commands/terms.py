import click

import sequence
from commands import RATIONAL, pass_session, system_options


@click.command("seq")
@system_options
@click.option("--count", "count", type=click.IntRange(min=0), default=10, show_default=True,
              help="Number of terms")
@pass_session
def seq_cmd(session, system_text, q, r, p, count):
    """Stream (n, a_n, b_n) for n = 1..count"""
    sys = session.system(system_text, q, r, p)
    terms = sequence.iter_terms(sys, 1, count + 1, session.precision)
    rows = ((t.n, t.a_n, t.b_n.value, t.b_n.abs_error) for t in terms)
    session.writer.write_table(["n", "a_n", "b_n", "err_bound"], rows)


@click.command("extrema")
@system_options
@click.option("--count", "count", type=click.IntRange(min=1), required=True, help="Scan n = 1..count")
@pass_session
def extrema_cmd(session, system_text, q, r, p, count):
    """Get the observed min and max of b_n with attaining indices"""
    sys = session.system(system_text, q, r, p)
    session.writer.write_record(sequence.scan_extrema(sys, count, session.precision))


@click.command("descent")
@system_options
@click.option("--count", "count", type=click.IntRange(min=0), default=20, show_default=True,
              help="Rows n = 1..count")
@click.option("--limit", "limit", type=click.IntRange(min=1), default=None,
              help="Range scanned for the descent threshold")
@pass_session
def descent_cmd(session, system_text, q, r, p, count, limit):
    """Check b_{sn+s-1} < ... < b_{sn+1} < b_n <= b_{sn} row by row"""
    sys = session.system(system_text, q, r, p)
    report = sequence.descent_report(sys, count, limit)
    if session.cfg.fmt == "json":
        session.writer.write_record(report)
        return
    session.writer.write_models(report.rows, header=["n", "verdict"])
    click.echo(f"N0 = {report.threshold} (scanned to {report.limit})", err=True)


@click.command("dense")
@system_options
@click.option("--gamma", "gamma", type=RATIONAL, required=True, help="Target value in (m, M)")
@click.option("--K", "K", type=click.IntRange(min=1), default=30, show_default=True, help="Steps")
@pass_session
def dense_cmd(session, system_text, q, r, p, gamma, K):
    """Build the subsequence b_{n_k} -> gamma"""
    sys = session.system(system_text, q, r, p)
    report = sequence.density_subsequence(sys, gamma, K, session.precision)
    if session.cfg.fmt == "json":
        session.writer.write_record(report)
        return
    session.writer.write_models(report.steps)
