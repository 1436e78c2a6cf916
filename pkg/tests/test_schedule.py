import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ratos.errors import DomainError, ScheduleSyntaxError
from ratos.model import PowerMap, TimeGrid
from ratos.schedule import (
    ConstTerm,
    GaussTerm,
    PulseTerm,
    RampOffTerm,
    RampOnTerm,
    ScheduleExpr,
    build_control_schedule,
    parse_schedule,
    pretty_print,
)


class TestParseExamples:
    def test_constant_pump(self):
        expr = parse_schedule("const(4)")
        assert expr.terms == (ConstTerm(4.0),)
        assert np.all(expr.power_mw(np.linspace(-10, 10, 7)) == 4.0)

    def test_gate_from_ramp_pair(self):
        # 10 mW gate from t~5 to t~9 us with 200 ns tanh edges
        expr = parse_schedule("ramp_on(5, 0.2, 10) + ramp_off(9, 0.2, 10)")
        p = expr.power_mw(np.array([0.0, 7.0, 12.0]))
        assert p[0] == pytest.approx(0.0, abs=1e-6)
        assert p[1] == pytest.approx(10.0, abs=1e-6)
        assert p[2] == pytest.approx(0.0, abs=1e-6)
        expr.validate()

    def test_pulse_order_error_at_column_seven(self):
        with pytest.raises(ScheduleSyntaxError) as err:
            parse_schedule("pulse(2, 1, 0.2, 3)")
        assert "t_off <= t_on" in str(err.value)
        assert err.value.column == 7
        assert err.value.line == 1

    def test_unknown_primitive(self):
        with pytest.raises(ScheduleSyntaxError) as err:
            parse_schedule("const(1) + step(2, 3)")
        assert "unknown primitive" in str(err.value)
        assert err.value.column == 12

    def test_arity_mismatch(self):
        with pytest.raises(ScheduleSyntaxError) as err:
            parse_schedule("ramp_on(1, 2)")
        assert "expects 3 arguments" in str(err.value)

    def test_negative_power(self):
        with pytest.raises(ScheduleSyntaxError) as err:
            parse_schedule("const(-4)")
        assert "negative power" in str(err.value)

    def test_line_column_tracking(self):
        with pytest.raises(ScheduleSyntaxError) as err:
            parse_schedule("const(1) +\n    bogus(2)")
        assert err.value.line == 2
        assert err.value.column == 5

    def test_empty_and_trailing_junk(self):
        with pytest.raises(ScheduleSyntaxError):
            parse_schedule("   ")
        with pytest.raises(ScheduleSyntaxError):
            parse_schedule("const(1) const(2)")
        with pytest.raises(ScheduleSyntaxError):
            parse_schedule("const(1,)")


class TestSemantics:
    def test_ramp_edge_convention(self):
        # power reaches 12% / 88% of P at t0 -/+ rise/... per tanh(4x) shape
        expr = parse_schedule("ramp_on(5, 0.4, 8)")
        t0, rise, p = 5.0, 0.4, 8.0
        lo = expr.power_mw(np.array([t0 - rise / 4]))[0]
        hi = expr.power_mw(np.array([t0 + rise / 4]))[0]
        assert lo == pytest.approx(p * 0.5 * (1 + np.tanh(-1.0)), rel=1e-12)
        assert hi == pytest.approx(p * 0.5 * (1 + np.tanh(1.0)), rel=1e-12)

    def test_gauss_fwhm_in_power(self):
        expr = parse_schedule("gauss(3, 0.5, 6)")
        half = expr.power_mw(np.array([3 - 0.25, 3 + 0.25]))
        assert np.allclose(half, 3.0, rtol=1e-12)

    def test_lone_ramp_off_rejected_as_negative(self):
        expr = parse_schedule("ramp_off(5, 0.2, 10)")
        with pytest.raises(DomainError):
            expr.validate()

    def test_negative_dip_rejected(self):
        expr = parse_schedule("const(1) + ramp_off(5, 0.2, 10)")
        with pytest.raises(DomainError):
            expr.validate()

    def test_build_control_schedule_rabi_units(self):
        pmap = PowerMap(k_pump=1e6, k_retrieve=2e6)
        sched = build_control_schedule(
            parse_schedule("const(4)"), parse_schedule("const(9)"), pmap
        )
        grid = TimeGrid(0.0, 1e-6, 16)
        om1, om2 = sched.sample(grid)
        assert np.allclose(om1, 2e6)
        assert np.allclose(om2, 6e6)


def _term_strategy():
    power = st.floats(min_value=0.0, max_value=100.0, allow_nan=False)
    t = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
    width = st.floats(min_value=0.01, max_value=20.0, allow_nan=False)
    return st.one_of(
        st.builds(ConstTerm, power),
        st.builds(RampOnTerm, t, width, power),
        st.builds(RampOffTerm, t, width, power),
        st.builds(
            PulseTerm,
            t,
            t.map(lambda x: x + 120.0),  # t_off strictly beyond any t_on
            width,
            power,
        ),
        st.builds(GaussTerm, t, width, power),
    )


@st.composite
def _expr_strategy(draw):
    terms = draw(st.lists(_term_strategy(), min_size=1, max_size=5))
    return ScheduleExpr(tuple(terms))


class TestRoundTrip:
    @settings(max_examples=300, deadline=None)
    @given(_expr_strategy())
    def test_print_parse_identity_on_asts(self, expr):
        assert parse_schedule(pretty_print(expr)) == expr

    @settings(max_examples=300, deadline=None)
    @given(_expr_strategy())
    def test_parse_print_identity_on_normalized_source(self, expr):
        source = pretty_print(expr)
        assert pretty_print(parse_schedule(source)) == source


class TestFuzz:
    @settings(max_examples=400, deadline=None)
    @given(st.text(max_size=60))
    def test_parser_total_on_text(self, text):
        try:
            expr = parse_schedule(text)
        except ScheduleSyntaxError:
            return
        assert isinstance(expr, ScheduleExpr)

    @settings(max_examples=200, deadline=None)
    @given(st.binary(max_size=40))
    def test_parser_total_on_bytes(self, blob):
        text = blob.decode("utf-8", errors="replace")
        try:
            parse_schedule(text)
        except ScheduleSyntaxError:
            pass
