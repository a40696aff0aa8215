from fractions import Fraction

import click

import measure
from commands import RATIONAL, pass_session, system_options
from errors import ValidationFailure


@click.command("measure")
@system_options
@click.option("--x", "x", type=RATIONAL, default=None, help="Point of [0, 1], e.g. 2/3")
@click.option("--tol", "tol", type=float, default=None, help="Truncation tolerance")
@click.option("--points", "points", type=click.IntRange(min=1), default=None,
              help="Emit the staircase on x = j/points instead")
@pass_session
def measure_cmd(session, system_text, q, r, p, x, tol, points):
    """Get mu_C([0, x])"""
    sys = session.system(system_text, q, r, p)
    if points is not None:
        rows = ((x, value.value, value.abs_error) for x, value in measure.staircase(sys, points, tol))
        session.writer.write_table(["x", "mu_cdf", "err"], rows)
        return
    if x is None:
        raise ValidationFailure("give --x or --points")
    session.writer.write_value(measure.mu_cdf(sys, x, tol))


@click.command("ifs")
@system_options
@click.option("--k", "k", type=click.IntRange(min=0), required=True, help="Number of IFS steps")
@click.option("--x", "x", type=RATIONAL, default=None, help="Only report F^k(delta_0)([0, x])")
@pass_session
def ifs_cmd(session, system_text, q, r, p, k, x):
    """Stream the atoms of F^k(delta_0)"""
    sys = session.system(system_text, q, r, p)
    if x is not None:
        atoms = measure.ifs_iterate(sys, k)
        session.writer.write_table(["k", "x", "cdf"], [(k, x, measure.empirical_cdf(atoms, x))])
        return
    weight = Fraction(1, sys.s ** k)
    session.writer.write_table(["location", "weight"], ((a, weight) for a in measure.iter_atoms(sys, k)))


@click.command("accpoint")
@system_options
@click.option("--digits", "digits", required=True, help="Point of C as p-ary digits, e.g. 0.22 or p-ary:0.2(02)")
@pass_session
def accpoint_cmd(session, system_text, q, r, p, digits):
    """Get x / mu_C([0, x])^alpha, the limit of b along the truncations of x"""
    sys = session.system(system_text, q, r, p)
    point = measure.parse_cantor_point(sys, digits)
    session.writer.write_value(measure.accumulation_map(sys, point, session.precision))
