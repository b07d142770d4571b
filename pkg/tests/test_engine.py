"""Protocol execution: pump, measurement, corrections, full runs."""

from itertools import product

import numpy as np
import pytest

from quditsim import (
    Correct,
    GateCZ,
    GateH,
    MeasureZ,
    Protocol,
    ProtocolExecutionError,
    ProtocolValidationError,
    Pump,
    RegisterState,
    apply_hadamard,
    apply_z,
    build_graph_state,
    builtin,
    builtin_names,
    builtin_target_graph,
    emitter_site,
    equiv_global_phase,
    measure_z,
    photon_site,
    pump,
    run,
    zero_state,
)
from oracles import oracle_phase, oracle_pump, random_state_vector


class TestPump:
    def test_copies_uniform_emitter(self):
        # H|0> then pump: digits pair up, (|00> + |11> + |22>) / sqrt(3)
        state = pump(apply_hadamard(zero_state(3, [emitter_site("e")]), 0), "e", "p")
        expected = np.zeros(9, dtype=complex)
        expected[[0, 4, 8]] = 1 / np.sqrt(3)
        assert np.max(np.abs(state.amps - expected)) < 1e-12
        assert state.sites[1].kind == "photon"
        assert state.labels == ("e", "p")

    def test_ground_state_pumps_to_ground(self):
        state = pump(zero_state(2, [emitter_site("e")]), "e", "p")
        assert abs(state.amps[0] - 1.0) < 1e-15

    @pytest.mark.parametrize("q,n", [(2, 3), (3, 2), (5, 2)])
    def test_matches_oracle_on_random_states(self, q, n):
        rng = np.random.default_rng(q * 7 + n)
        for _ in range(5):
            vec = random_state_vector(q, n, rng)
            sites = [emitter_site(f"e{i}") for i in range(n)]
            state = RegisterState(q, sites, vec)
            src = int(rng.integers(n))
            out = pump(state, f"e{src}", "p")
            assert np.max(np.abs(out.amps - oracle_pump(vec, q, n, src))) < 1e-12

    def test_label_and_kind_errors(self):
        state = zero_state(2, [emitter_site("e"), photon_site("p")])
        with pytest.raises(ValueError):
            pump(state, "e", "p")  # label taken
        with pytest.raises(ValueError):
            pump(state, "p", "p2")  # photons cannot pump
        with pytest.raises(KeyError):
            pump(state, "ghost", "p2")


class TestMeasureZ:
    def test_forced_uniform_qutrit(self):
        state = apply_hadamard(zero_state(3, [emitter_site("e")]), 0)
        outcome, post, p = measure_z(state, "e", forced=1)
        assert outcome == 1
        assert abs(p - 1 / 3) < 1e-12
        # the register is now empty: a scalar state
        assert post.n == 0
        assert abs(post.amps[0]) == pytest.approx(1.0, abs=1e-12)

    def test_branch_probabilities_sum_to_one(self):
        rng = np.random.default_rng(15)
        state = RegisterState(
            3, [emitter_site("e"), photon_site("p")], random_state_vector(3, 2, rng)
        )
        probs = [measure_z(state, "e", forced=o)[2] for o in range(3)]
        assert abs(sum(probs) - 1.0) < 1e-12

    def test_collapse_renormalizes(self):
        vec = np.zeros(4, dtype=complex)
        vec[0], vec[3] = np.sqrt(0.25), np.sqrt(0.75)
        state = RegisterState(2, [emitter_site("e"), photon_site("p")], vec)
        outcome, post, p = measure_z(state, "e", forced=1)
        assert abs(p - 0.75) < 1e-12
        assert abs(post.amps[1] - 1.0) < 1e-12

    def test_impossible_outcome_rejected(self):
        state = pump(zero_state(2, [emitter_site("e")]), "e", "p")
        with pytest.raises(ProtocolExecutionError):
            measure_z(state, "e", forced=1)

    def test_sampling_is_deterministic(self):
        state = apply_hadamard(zero_state(5, [emitter_site("e")]), 0)
        a = measure_z(state, "e", rng=np.random.default_rng(42))
        b = measure_z(state, "e", rng=np.random.default_rng(42))
        assert a[0] == b[0]

    def test_mode_and_target_errors(self):
        state = zero_state(3, [emitter_site("e"), photon_site("p")])
        with pytest.raises(ValueError):
            measure_z(state, "e")  # no mode
        with pytest.raises(ValueError):
            measure_z(state, "e", forced=0, rng=np.random.default_rng(0))
        with pytest.raises(ValueError):
            measure_z(state, "e", forced=3)
        with pytest.raises(ValueError):
            measure_z(state, "p", forced=0)  # photons stay


def two_photon_chain(q):
    return builtin("linear-cz", q=q, n=2)


class TestRun:
    def test_correction_aligns_branches(self):
        # Without feed-forward the branches differ; the final Z power
        # (q-1)*outcome brings every branch back to the outcome-0 state.
        q = 3
        proto = builtin("linear-cz", q=q, n=3)
        reference = run(proto, forced=[0]).state
        for o in (1, 2):
            record = run(proto, forced=[o])
            assert equiv_global_phase(record.state, reference)
            # replaying by hand: same protocol minus its correction, then
            # an explicit Z^(2 * outcome) on the last photon
            bare = Protocol(
                proto.q,
                proto.emitters,
                tuple(i for i in proto.instructions if not isinstance(i, Correct)),
                proto.photon_order,
            )
            raw = run(bare, forced=[o]).state
            fixed = apply_z(raw, raw.site_index("p3"), (q - 1) * o)
            assert equiv_global_phase(fixed, reference)

    def test_branch_probability_and_outcomes(self):
        record = run(builtin("ame43-a"), forced=[1, 2])
        assert record.outcomes == {"o1": 1, "o2": 2}
        assert abs(record.probability - 1 / 9) < 1e-12
        assert record.photon_order == ("p1", "p2", "p3", "p4")
        assert [s.kind for s in record.state.sites] == ["photon"] * 4

    def test_presentation_order(self):
        # qecc312 protocols present photons newest first
        record = run(builtin("qecc312-psi0"), forced=[0])
        assert record.state.labels == ("p3", "p2", "p1")

    def test_sampled_runs_reproducible(self):
        proto = builtin("ame5-two-emitter", q=3)
        a = run(proto, seed=11)
        b = run(proto, seed=11)
        assert a.outcomes == b.outcomes
        assert np.array_equal(a.state.amps, b.state.amps)
        assert a.probability == b.probability

    def test_sampled_branches_match_forced(self):
        proto = builtin("ame43-b")
        sampled = run(proto, seed=3)
        forced = run(proto, forced=[sampled.outcomes["o1"], sampled.outcomes["o2"]])
        assert np.max(np.abs(sampled.state.amps - forced.state.amps)) < 1e-12

    def test_mode_errors(self):
        proto = two_photon_chain(2)
        with pytest.raises(ProtocolExecutionError):
            run(proto)
        with pytest.raises(ProtocolExecutionError):
            run(proto, forced=[0], seed=1)
        with pytest.raises(ProtocolExecutionError):
            run(proto, forced=[0, 0])  # one measurement only

    def test_two_qubit_chain_is_bell_up_to_local_fourier(self):
        record = run(two_photon_chain(2), forced=[0])
        bell = np.zeros(4, dtype=complex)
        bell[[0, 3]] = 1 / np.sqrt(2)
        bell_state = RegisterState(2, record.state.sites, bell)
        assert equiv_global_phase(apply_hadamard(bell_state, 1), record.state)

    def test_four_photon_state_explicit_phases(self):
        # Forced-zero output of the first four-photon builtin: flat
        # amplitudes with exponent d1 d2 + d1 d3 + 2 d2 d4 + d3 d4.
        record = run(builtin("ame43-a"), forced=[0, 0])
        amps = record.state.amps
        for idx in range(81):
            d = [(idx // 27) % 3, (idx // 9) % 3, (idx // 3) % 3, idx % 3]
            expected = oracle_phase(3, d[0] * d[1] + d[0] * d[2] + 2 * d[1] * d[3] + d[2] * d[3]) / 9
            assert abs(amps[idx] - expected) < 1e-9


class TestBuiltinCatalog:
    def test_names_cover_catalog(self):
        assert len(builtin_names()) == 12
        assert "ame7-3" in builtin_names()

    def test_structure_claims(self):
        # three emitters, no photon ever touched by a CZ
        b = builtin("ame6-b", q=3)
        assert len(b.emitters) == 3
        photons = set(b.photons())
        for ins in b.instructions:
            if isinstance(ins, GateCZ):
                assert ins.target_a not in photons
                assert ins.target_b not in photons
        # single emitter, exactly one photon-target CZ
        a = builtin("ame5-one-emitter", q=4)
        assert len(a.emitters) == 1
        photon_czs = [
            ins
            for ins in a.instructions
            if isinstance(ins, GateCZ)
            and (ins.target_a in set(a.photons()) or ins.target_b in set(a.photons()))
        ]
        assert len(photon_czs) == 1

    def test_defaults_are_smallest_dims(self):
        assert builtin("ame5-two-emitter").q == 2
        assert builtin("ame43-a").q == 3
        assert builtin("qecc312-psi1").q == 3

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            builtin("no-such-protocol")
        with pytest.raises(ValueError):
            builtin("ame7-3", q=4)
        with pytest.raises(ValueError):
            builtin("ame43-a", q=2)
        with pytest.raises(ValueError):
            builtin("linear-cz")  # n missing
        with pytest.raises(ValueError):
            builtin("linear-cz", q=3, n=0)
        with pytest.raises(ValueError):
            builtin("ame5-one-emitter", q=3, n=4)  # n not accepted

    def test_single_photon_chain(self):
        record = run(builtin("linear-cz", q=2, n=1), forced=[0])
        assert np.allclose(record.state.amps, np.full(2, 1 / np.sqrt(2)), atol=1e-12)

    @pytest.mark.parametrize("name", builtin_names())
    def test_every_builtin_runs_and_matches_its_target(self, name):
        n = 3 if name.startswith("linear") else None
        proto = builtin(name, n=n)
        record = run(proto, forced=[0] * proto.measurement_count())
        assert record.state.n == len(proto.photon_order)
        if name.startswith("linear"):
            target = build_graph_state(builtin_target_graph(name, proto.q, n))
            assert equiv_global_phase(record.state, target)
        elif name.startswith("ame"):
            gname = "ame5" if name.startswith("ame5") else name
            target = build_graph_state(builtin_target_graph(gname, proto.q))
            assert equiv_global_phase(record.state, target)


class TestProtocolValidation:
    def q2(self, *instructions, emitters=("e",), order=None):
        photons = [i.photon for i in instructions if isinstance(i, Pump)]
        return Protocol(2, emitters, tuple(instructions), tuple(order or photons))

    def test_duplicate_photon_label(self):
        proto = self.q2(
            Pump("e", "p"), Pump("e", "p"), MeasureZ("e", "o1")
        )
        with pytest.raises(ProtocolValidationError, match="already in use"):
            proto.validate()

    def test_gate_after_measurement(self):
        proto = self.q2(
            Pump("e", "p"), MeasureZ("e", "o1"), GateH("e")
        )
        with pytest.raises(ProtocolValidationError, match="after its measurement"):
            proto.validate()

    def test_unknown_target(self):
        proto = self.q2(GateH("x"), Pump("e", "p"), MeasureZ("e", "o1"))
        with pytest.raises(ProtocolValidationError, match="unknown site"):
            proto.validate()

    def test_unbound_outcome_variable(self):
        proto = self.q2(
            Pump("e", "p"), Correct("p", ((1, "o1"),)), MeasureZ("e", "o1")
        )
        with pytest.raises(ProtocolValidationError, match="unbound outcome"):
            proto.validate()

    def test_unmeasured_emitter(self):
        proto = self.q2(Pump("e", "p"))
        with pytest.raises(ProtocolValidationError, match="never measured"):
            proto.validate()

    def test_photon_order_mismatch(self):
        proto = self.q2(Pump("e", "p"), MeasureZ("e", "o1"), order=("p", "q"))
        with pytest.raises(ProtocolValidationError, match="photon order"):
            proto.validate()

    def test_measure_twice(self):
        proto = Protocol(
            2,
            ("e",),
            (Pump("e", "p"), MeasureZ("e", "o1"), MeasureZ("e", "o2")),
            ("p",),
        )
        with pytest.raises(ProtocolValidationError):
            proto.validate()


class TestBranchExhaustion:
    """Outputs must not depend on measurement outcomes, and branches
    must be uniformly likely."""

    @pytest.mark.parametrize(
        "name,q",
        [("linear-cz", 3), ("linear-cz2", 3), ("ame5-two-emitter", 3), ("ame6-b", 2)],
    )
    def test_outcome_independence(self, name, q):
        n = 3 if name.startswith("linear") else None
        proto = builtin(name, q=q, n=n)
        m = proto.measurement_count()
        reference = None
        for outs in product(range(q), repeat=m):
            record = run(proto, forced=list(outs))
            assert abs(record.probability - q ** (-m)) < 1e-9
            if reference is None:
                reference = record.state
            else:
                assert equiv_global_phase(record.state, reference)
