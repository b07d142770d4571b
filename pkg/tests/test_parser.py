"""The line-oriented protocol file format."""

import numpy as np
import pytest

from quditsim import (
    Correct,
    GateCZ,
    GateHdag,
    GateX,
    ProtocolParseError,
    builtin,
    equiv_global_phase,
    parse_protocol,
    run,
)
from quditsim.parser import parse_correction_expression

FIVE_CYCLE = """\
# five-cycle from one emitter
dim 3
emitters e1
H e1
PUMP e1 p1
H e1
PUMP e1 p2
H e1
PUMP e1 p3
H e1
PUMP e1 p4
H e1
CZ p1 e1 1
PUMP e1 p5
H e1
MEAS e1 o1
CORR p5 Z (q-1)*o1
ORDER p1 p2 p3 p4 p5
"""


class TestParsing:
    def test_full_protocol(self):
        proto = parse_protocol(FIVE_CYCLE)
        assert proto.q == 3
        assert proto.emitters == ("e1",)
        assert proto.photon_order == ("p1", "p2", "p3", "p4", "p5")
        corr = [i for i in proto.instructions if isinstance(i, Correct)][0]
        assert corr.terms == ((2, "o1"),)
        # identical physics to the builtin transcription
        ours = run(proto, forced=[0]).state
        reference = run(builtin("ame5-one-emitter", q=3), forced=[0]).state
        assert equiv_global_phase(ours, reference)

    def test_default_order_is_pump_order(self):
        text = "dim 2\nemitters e\nPUMP e b\nPUMP e a\nMEAS e o1\n"
        assert parse_protocol(text).photon_order == ("b", "a")

    def test_comments_and_blank_lines(self):
        text = "\n# header\ndim 2\n\nemitters e  # trailing\nPUMP e p\nMEAS e o1\n"
        proto = parse_protocol(text)
        assert proto.q == 2

    def test_all_instruction_forms(self):
        text = (
            "dim 5\n"
            "emitters a b\n"
            "H a\nHDAG b\nX a 3\nZ b 4\nCZ a b 2\n"
            "PUMP a p1\nCZ p1 b 1\n"
            "MEAS a o1\nMEAS b o2\n"
            "CORR p1 Z 2*o1 + o2 - 1\n"
        )
        proto = parse_protocol(text)
        kinds = [type(i).__name__ for i in proto.instructions]
        assert kinds == [
            "GateH", "GateHdag", "GateX", "GateZ", "GateCZ",
            "Pump", "GateCZ", "MeasureZ", "MeasureZ", "Correct",
        ]
        assert proto.instructions[2] == GateX("a", 3)
        assert proto.instructions[6] == GateCZ("p1", "b", 1)
        corr = proto.instructions[-1]
        assert corr.terms == ((2, "o1"), (1, "o2"))
        assert corr.constant == -1


class TestParseErrors:
    def expect(self, text, line, fragment):
        with pytest.raises(ProtocolParseError) as err:
            parse_protocol(text)
        assert err.value.line == line
        assert fragment in str(err.value)

    def test_unknown_directive(self):
        self.expect("dim 2\nemitters e\nWOBBLE e\n", 3, "unknown directive")

    def test_dim_must_come_first(self):
        self.expect("emitters e\n", 1, "dim")

    def test_dim_value_checked(self):
        self.expect("dim x\n", 1, "integer")
        self.expect("dim 1\n", 1, ">= 2")

    def test_duplicate_directives(self):
        self.expect("dim 2\ndim 3\n", 2, "duplicate dim")
        self.expect("dim 2\nemitters e\nemitters f\n", 3, "duplicate emitters")

    def test_arity_errors(self):
        self.expect("dim 2\nemitters e\nH e extra\n", 3, "one target")
        self.expect("dim 2\nemitters e\nX e\n", 3, "exponent")
        self.expect("dim 2\nemitters e\nCZ e e\n", 3, "two targets")

    def test_unknown_site(self):
        self.expect("dim 2\nemitters e\nH ghost\n", 3, "unknown site")

    def test_pump_rules(self):
        self.expect("dim 2\nemitters e\nPUMP e e\n", 3, "already in use")
        self.expect("dim 2\nemitters e\nPUMP e p\nPUMP e p\n", 4, "already in use")
        self.expect("dim 2\nemitters e\nPUMP e p\nPUMP p p2\n", 4, "not an emitter")

    def test_measurement_rules(self):
        self.expect("dim 2\nemitters e\nMEAS e o1\nMEAS e o2\n", 4, "already measured")
        self.expect(
            "dim 2\nemitters e f\nMEAS e o1\nMEAS f o1\n", 4, "bound twice"
        )
        self.expect("dim 2\nemitters e\nPUMP e p\nMEAS p o1\n", 4, "not an emitter")

    def test_gate_after_measurement(self):
        self.expect("dim 2\nemitters e\nMEAS e o1\nH e\n", 4, "already measured")

    def test_correction_rules(self):
        self.expect("dim 2\nemitters e\nPUMP e p\nCORR p X o1\nMEAS e o1\n", 4, "Z powers")
        self.expect(
            "dim 2\nemitters e\nPUMP e p\nMEAS e o1\nCORR p Z o9\n", 5, "unknown outcome"
        )
        self.expect(
            "dim 2\nemitters e f\nPUMP e p\nMEAS e o1\nMEAS f o2\nCORR p Z o1*o2\n",
            6,
            "linear",
        )

    def test_order_rules(self):
        self.expect(
            "dim 2\nemitters e\nPUMP e p\nMEAS e o1\nORDER p p\n", 5, "exactly once"
        )
        self.expect(
            "dim 2\nemitters e\nPUMP e p\nMEAS e o1\nORDER q1\n", 5, "exactly once"
        )

    def test_structural_backstop_without_line(self):
        with pytest.raises(ProtocolParseError, match="never measured") as err:
            parse_protocol("dim 2\nemitters e\nPUMP e p\n")
        assert err.value.line is None

    def test_empty_input(self):
        with pytest.raises(ProtocolParseError, match="missing dim"):
            parse_protocol("  \n# nothing here\n")


class TestCorrectionExpressions:
    def test_linear_forms(self):
        assert parse_correction_expression("(q-1)*o1", 3) == (((2, "o1"),), 0)
        assert parse_correction_expression("q*o1", 5) == (((5, "o1"),), 0)
        assert parse_correction_expression("-o1 + 2", 3) == (((-1, "o1"),), 2)
        assert parse_correction_expression("2*(o1 + o2) - o2", 3) == (
            ((2, "o1"), (1, "o2")),
            0,
        )
        assert parse_correction_expression("7", 3) == ((), 7)
        assert parse_correction_expression("o1 - o1", 3) == ((), 0)

    def test_rejects_garbage(self):
        for bad in ("o1 *", "* o1", "(o1", "o1 o2", "o1 @ 2", ""):
            with pytest.raises(ProtocolParseError):
                parse_correction_expression(bad, 3)

    def test_rejects_nonlinear(self):
        with pytest.raises(ProtocolParseError, match="linear"):
            parse_correction_expression("o1*o2", 3)


class TestParsedExecution:
    def test_inverse_chain_source_matches_builtin(self):
        text = (
            "dim 3\nemitters e1\nH e1\n"
            "PUMP e1 p1\nHDAG e1\nPUMP e1 p2\nHDAG e1\n"
            "MEAS e1 o1\nCORR p2 Z o1\n"
        )
        for o in range(3):
            ours = run(parse_protocol(text), forced=[o]).state
            reference = run(builtin("linear-cz2", q=3, n=2), forced=[o]).state
            assert np.max(np.abs(ours.amps - reference.amps)) < 1e-12

    def test_correction_constant_applies(self):
        # a constant exponent acts as a plain Z power
        base = run(
            parse_protocol("dim 3\nemitters e\nH e\nPUMP e p\nZ p 2\nMEAS e o1\n"),
            forced=[0],
        ).state
        corrected = run(
            parse_protocol("dim 3\nemitters e\nH e\nPUMP e p\nCORR p Z 2\nMEAS e o1\n"),
            forced=[0],
        ).state
        assert np.max(np.abs(base.amps - corrected.amps)) < 1e-12
