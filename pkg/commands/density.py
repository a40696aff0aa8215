import click

import distribution
from commands import RATIONAL, pass_session, system_options
from limitfn import parse_sary


@click.command("cdf")
@system_options
@click.option("--alpha", "threshold", type=RATIONAL, required=True, help="Threshold on b_n")
@click.option("--x1", "x1", required=True, help="Centre of the window where lambda < alpha")
@click.option("--eta1", "eta1", type=RATIONAL, required=True, help="Half-width of that window")
@click.option("--x2", "x2", required=True, help="Left end of the window where lambda > alpha")
@click.option("--eta2", "eta2", type=RATIONAL, required=True, help="Width of that window")
@click.option("--kmin", "kmin", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--kmax", "kmax", type=click.IntRange(min=1), required=True)
@pass_session
def cdf_cmd(session, system_text, q, r, p, threshold, x1, eta1, x2, eta2, kmin, kmax):
    """Compare D(x, alpha)/x along the scales of two validated windows"""
    sys = session.system(system_text, q, r, p)
    report = distribution.cdf_oscillation(sys, threshold, parse_sary(x1, sys.s), eta1,
                                          parse_sary(x2, sys.s), eta2, kmax, kmin)
    if session.cfg.fmt == "json":
        session.writer.write_record(report)
        return
    session.writer.write_models(report.rows)
    click.echo(f"window sup {report.window_sup:.6f} < {float(threshold)} < window inf {report.window_inf:.6f}",
               err=True)


@click.command("ldf")
@system_options
@click.option("--alpha", "threshold", type=RATIONAL, required=True, help="Threshold on b_n")
@click.option("--kmin", "kmin", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--kmax", "kmax", type=click.IntRange(min=2), required=True)
@pass_session
def ldf_cmd(session, system_text, q, r, p, threshold, kmin, kmax):
    """Empirical D and L at x = s^k next to the grid estimate of L(alpha)"""
    sys = session.system(system_text, q, r, p)
    report = distribution.distribution_report(sys, threshold, kmax, kmin)
    if session.cfg.fmt == "json":
        session.writer.write_record(report)
        return
    session.writer.write_models(report.rows)


@click.command("levelset")
@system_options
@click.option("--alpha", "threshold", type=RATIONAL, required=True, help="Level of lambda")
@click.option("--k", "k", type=click.IntRange(min=2), default=14, show_default=True, help="Grid depth")
@click.option("--eps", "eps", type=float, multiple=True, required=True, help="Band half-width (repeatable)")
@pass_session
def levelset_cmd(session, system_text, q, r, p, threshold, k, eps):
    """Measure of {x in [1/s, 1) : |lambda(x) - alpha| < eps} on the depth-k grid"""
    sys = session.system(system_text, q, r, p)
    rows = ((e, distribution.level_set_probe(sys, threshold, k, e)) for e in eps)
    session.writer.write_table(["eps", "estimate"], rows)
