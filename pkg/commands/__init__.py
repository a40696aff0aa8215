from fractions import Fraction
from typing import Optional

import click

from digits import parse_system
from errors import ValidationFailure
from linearcase import linear_system_of
from models import CantorSystem, LinearSystem
from schemas import RunConfig
from table_service import TableWriter, get_writer


class RationalType(click.ParamType):
    """Exact rationals from `3/2`, `1.5` or `2`"""
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number", param, ctx)


RATIONAL = RationalType()


def linear_from(q: Optional[int], r: Optional[int], p: Optional[int]) -> Optional[LinearSystem]:
    given = [v is not None for v in (q, r, p)]
    if not any(given):
        return None
    if not all(given):
        raise ValidationFailure("--q, --r and --p must be given together")
    return LinearSystem(q=q, r=r, p=p)


class Session:
    """Run configuration plus the single output writer of one invocation"""

    def __init__(self, cfg: RunConfig, ctx: click.Context):
        self.cfg = cfg
        self._ctx = ctx
        self._writer = None

    def config_for(self, system_text: str = None, q: int = None, r: int = None, p: int = None) -> RunConfig:
        """The run configuration with a system given after the subcommand taking precedence"""
        linear = linear_from(q, r, p)
        if system_text is None and linear is None:
            return self.cfg
        system = parse_system(system_text) if system_text else None
        return RunConfig(system=system, linear=linear, fmt=self.cfg.fmt, out=self.cfg.out,
                         precision=self.cfg.precision, cap_atoms=self.cfg.cap_atoms,
                         cap_scan=self.cfg.cap_scan)

    def system(self, system_text: str = None, q: int = None, r: int = None, p: int = None) -> CantorSystem:
        cfg = self.config_for(system_text, q, r, p)
        try:
            return cfg.resolved_system()
        except ValueError as e:
            raise ValidationFailure(str(e))

    def linear(self, system_text: str = None, q: int = None, r: int = None, p: int = None) -> LinearSystem:
        cfg = self.config_for(system_text, q, r, p)
        if cfg.linear is not None:
            return cfg.linear
        return linear_system_of(self.system(system_text, q, r, p))

    @property
    def precision(self):
        return self.cfg.precision

    @property
    def writer(self) -> TableWriter:
        if self._writer is None:
            stream = self._ctx.with_resource(click.open_file(self.cfg.out or "-", "w"))
            self._writer = get_writer(self.cfg.fmt, stream)
        return self._writer


pass_session = click.make_pass_decorator(Session)


def system_options(f):
    """--sys / --q / --r / --p accepted after the subcommand as well"""
    f = click.option("--p", "p", type=int, default=None, help="Radix of a linear system")(f)
    f = click.option("--r", "r", type=int, default=None, help="Remainder of a linear system")(f)
    f = click.option("--q", "q", type=int, default=None, help="Modulus of a linear system")(f)
    f = click.option("--sys", "system_text", default=None, help="System spec, e.g. 'p=3;A=0,2'")(f)
    return f
