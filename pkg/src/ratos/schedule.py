"""Control-schedule expression language.

A schedule is a sum of primitive power waveforms::

    expr   := term {'+' term}
    term   := ident '(' args ')'
    args   := number {',' number}
    number := decimal with optional sign and exponent

Surface units are microseconds and milliwatts.  Primitives (P in mW,
times in us):

    const(P)                     constant power P
    ramp_on(t0, rise, P)         P*(1+tanh(4*(t-t0)/rise))/2, half power at t0
    ramp_off(t0, fall, P)        -P*(1+tanh(4*(t-t0)/fall))/2  (subtracts a
                                 step; pair with const/ramp_on to gate a
                                 field off at t0)
    pulse(t_on, t_off, rise, P)  flat-top gate P*(tanh(4(t-t_on)/rise)
                                 - tanh(4(t-t_off)/rise))/2
    gauss(center, fwhm, P)       Gaussian power bump

``rise``/``fall`` are the 12%-88% widths of the tanh edge, close to the
usual 10-90% time.  A well-formed expression must evaluate to a nonnegative
power everywhere; :meth:`ScheduleExpr.validate` enforces this, since a lone
``ramp_off`` term is negative on its own.

Parsing is total: any input string either yields an AST or raises
:class:`ScheduleSyntaxError` with a 1-based line/column position.
Pretty-printing and parsing are mutually inverse (identity on ASTs, and on
normalized source text).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ScheduleSyntaxError
from .model import ControlSchedule, PowerMap

__all__ = [
    "ConstTerm",
    "RampOnTerm",
    "RampOffTerm",
    "PulseTerm",
    "GaussTerm",
    "ScheduleExpr",
    "parse_schedule",
    "pretty_print",
    "build_control_schedule",
]

_US = 1e-6  # surface times are microseconds


@dataclass(frozen=True)
class ConstTerm:
    power: float

    def power_mw(self, t_us):
        return np.full_like(t_us, self.power, dtype=float)

    def tail_values(self):
        return (self.power, self.power)

    def knots(self):
        return ()


@dataclass(frozen=True)
class RampOnTerm:
    t0: float
    rise: float
    power: float

    def power_mw(self, t_us):
        return self.power * 0.5 * (1.0 + np.tanh(4.0 * (t_us - self.t0) / self.rise))

    def tail_values(self):
        return (0.0, self.power)

    def knots(self):
        return (self.t0 - self.rise, self.t0, self.t0 + self.rise)


@dataclass(frozen=True)
class RampOffTerm:
    t0: float
    fall: float
    power: float

    def power_mw(self, t_us):
        return -self.power * 0.5 * (1.0 + np.tanh(4.0 * (t_us - self.t0) / self.fall))

    def tail_values(self):
        return (0.0, -self.power)

    def knots(self):
        return (self.t0 - self.fall, self.t0, self.t0 + self.fall)


@dataclass(frozen=True)
class PulseTerm:
    t_on: float
    t_off: float
    rise: float
    power: float

    def power_mw(self, t_us):
        edge_on = np.tanh(4.0 * (t_us - self.t_on) / self.rise)
        edge_off = np.tanh(4.0 * (t_us - self.t_off) / self.rise)
        return self.power * 0.5 * (edge_on - edge_off)

    def tail_values(self):
        return (0.0, 0.0)

    def knots(self):
        return (self.t_on - self.rise, self.t_on, self.t_off, self.t_off + self.rise)


@dataclass(frozen=True)
class GaussTerm:
    center: float
    fwhm: float
    power: float

    def power_mw(self, t_us):
        return self.power * np.exp(-4.0 * np.log(2.0) * ((t_us - self.center) / self.fwhm) ** 2)

    def tail_values(self):
        return (0.0, 0.0)

    def knots(self):
        return (self.center - self.fwhm, self.center, self.center + self.fwhm)


Term = Union[ConstTerm, RampOnTerm, RampOffTerm, PulseTerm, GaussTerm]

_PRIMITIVES = {
    "const": (ConstTerm, ("P",)),
    "ramp_on": (RampOnTerm, ("t0", "rise", "P")),
    "ramp_off": (RampOffTerm, ("t0", "fall", "P")),
    "pulse": (PulseTerm, ("t_on", "t_off", "rise", "P")),
    "gauss": (GaussTerm, ("center", "fwhm", "P")),
}


@dataclass(frozen=True)
class ScheduleExpr:
    """Sum of primitive terms; times in us, powers in mW."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise DomainError("schedule expression needs at least one term")

    def power_mw(self, t_us):
        """Total power (mW) at surface times ``t_us`` (microseconds)."""
        t_us = np.asarray(t_us, dtype=float)
        total = np.zeros_like(t_us)
        for term in self.terms:
            total = total + term.power_mw(t_us)
        return total

    def power_fn(self):
        """Vectorized power function of time in *seconds* (unit boundary)."""

        def power(t_s):
            return self.power_mw(np.asarray(t_s, dtype=float) / _US)

        return power

    def validate(self, probe_points: int = 4096):
        """Reject expressions whose total power goes negative.

        Samples a dense probe grid spanning every term's active region plus
        the asymptotic tails.  Raises :class:`DomainError` at the first
        offending time.
        """
        knots = [k for term in self.terms for k in term.knots()]
        scale = max(abs(term.power) for term in self.terms)
        tol = -1e-9 * max(scale, 1.0)
        lo_tail = sum(term.tail_values()[0] for term in self.terms)
        hi_tail = sum(term.tail_values()[1] for term in self.terms)
        if lo_tail < tol or hi_tail < tol:
            raise DomainError("schedule power is negative in the asymptotic tail")
        if knots:
            span = max(knots) - min(knots)
            pad = max(span, 1.0)
            t = np.linspace(min(knots) - pad, max(knots) + pad, probe_points)
            p = self.power_mw(t)
            i = int(np.argmin(p))
            if p[i] < tol:
                raise DomainError(f"schedule power is negative at t={t[i]:.6g} us")
        return self


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<plus>\+)
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ScheduleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append((kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, what):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            got = tok[1] if tok[0] != "end" else "end of input"
            raise ScheduleSyntaxError(f"expected {what}, got {got!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def parse_expr(self):
        terms = [self.parse_term()]
        while self.peek()[0] == "plus":
            self.i += 1
            terms.append(self.parse_term())
        tok = self.peek()
        if tok[0] != "end":
            raise ScheduleSyntaxError(f"unexpected token {tok[1]!r}", tok[2], tok[3])
        return ScheduleExpr(tuple(terms))

    def parse_term(self):
        name_tok = self.take("ident", "a primitive name")
        name = name_tok[1]
        if name not in _PRIMITIVES:
            raise ScheduleSyntaxError(
                f"unknown primitive {name!r} (expected one of {', '.join(sorted(_PRIMITIVES))})",
                name_tok[2],
                name_tok[3],
            )
        cls, argnames = _PRIMITIVES[name]
        self.take("lparen", "'('")
        args = []
        arg_positions = []
        tok = self.peek()
        if tok[0] != "rparen":
            while True:
                num_tok = self.take("number", "a number")
                args.append(float(num_tok[1]))
                arg_positions.append((num_tok[2], num_tok[3]))
                if self.peek()[0] == "comma":
                    self.i += 1
                    continue
                break
        close = self.take("rparen", "')'")
        if len(args) != len(argnames):
            raise ScheduleSyntaxError(
                f"{name} expects {len(argnames)} arguments ({', '.join(argnames)}), got {len(args)}",
                name_tok[2],
                name_tok[3],
            )
        first_pos = arg_positions[0] if arg_positions else (close[2], close[3])
        _check_term_args(name, args, first_pos)
        return cls(*args)


def _check_term_args(name, args, pos):
    line, col = pos
    power = args[-1]
    if power < 0:
        raise ScheduleSyntaxError(f"negative power in {name}", line, col)
    if name in ("ramp_on", "ramp_off") and args[1] <= 0:
        raise ScheduleSyntaxError(f"{name} edge width must be > 0", line, col)
    if name == "pulse":
        t_on, t_off, rise = args[0], args[1], args[2]
        if rise <= 0:
            raise ScheduleSyntaxError("pulse edge width must be > 0", line, col)
        if t_off <= t_on:
            raise ScheduleSyntaxError("t_off <= t_on", line, col)
    if name == "gauss" and args[1] <= 0:
        raise ScheduleSyntaxError("gauss fwhm must be > 0", line, col)


def parse_schedule(text: str) -> ScheduleExpr:
    """Parse a schedule expression; see the module docstring for the grammar.

    Any input either parses or raises :class:`ScheduleSyntaxError` carrying
    the 1-based line/column of the offending token.
    """
    if not isinstance(text, str):
        raise ScheduleSyntaxError("schedule source must be text")
    if not text.strip():
        raise ScheduleSyntaxError("empty schedule expression")
    return _Parser(_tokenize(text)).parse_expr()


def _fmt(x: float) -> str:
    # repr round-trips floats exactly, keeping print/parse mutually inverse
    return repr(float(x))


def pretty_print(expr: ScheduleExpr) -> str:
    """Canonical source text; ``parse_schedule(pretty_print(e)) == e``."""
    parts = []
    for term in expr.terms:
        for name, (cls, argnames) in _PRIMITIVES.items():
            if type(term) is cls:
                args = [getattr(term, f.name) for f in term.__dataclass_fields__.values()]
                parts.append(f"{name}({', '.join(_fmt(a) for a in args)})")
                break
        else:
            raise DomainError(f"unknown term type {type(term).__name__}")
    return " + ".join(parts)


def build_control_schedule(
    pump: ScheduleExpr, retrieve: ScheduleExpr, pmap: PowerMap
) -> ControlSchedule:
    """Turn two power schedules into control Rabi waveforms.

    Validates nonnegativity of both expressions, then maps power to Rabi
    frequency through the channel coefficients, Omega_j(t) = k_j*sqrt(P_j(t)).
    """
    pump.validate()
    retrieve.validate()
    pump_p = pump.power_fn()
    ret_p = retrieve.power_fn()

    def omega_1(t_s):
        return pmap.k_pump * np.sqrt(np.maximum(pump_p(t_s), 0.0))

    def omega_2(t_s):
        return pmap.k_retrieve * np.sqrt(np.maximum(ret_p(t_s), 0.0))

    return ControlSchedule(omega_1=omega_1, omega_2=omega_2)
