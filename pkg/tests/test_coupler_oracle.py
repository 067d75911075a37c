import math

import numpy as np
import pytest

from imextinction.coupler_oracle import (
    Convention,
    CouplerScenario,
    DiscrepancyReport,
    EncodedState,
    TruncatedFockState,
    TwoModeAmplitude,
    beam_splitter_transfer,
    compare_to_closed_form,
    fock_brute_force,
    oracle_agreement,
    phase_averaged_state,
    propagate_coherent,
    reports_to_csv,
    single_photon_component,
)
from imextinction.errors import CutoffTooSmallError, DomainError
from imextinction.qmath import PolarizationDensityMatrix as DM
from imextinction.qmath import trace_distance
from imextinction.state_model import ExtinctionModel, PulseParams

ROOT2 = math.sqrt(2.0)
X = np.array([[0, 1], [1, 0]], dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / ROOT2


def scenario(r=500.0, mu=0.2, convention="paper", **kw):
    pulse = PulseParams.from_extinction(ExtinctionModel(r), mu)
    return CouplerScenario(pulse, convention=convention, **kw)


def no_leak(convention="paper", **kw):
    return CouplerScenario(PulseParams(0.2, 0.1, 0.0), convention=convention, **kw)


def balanced(convention="strict", **kw):
    return CouplerScenario(PulseParams(0.2, 0.1, 0.1), convention=convention, **kw)


class TestScenario:
    def test_grid_minimum(self):
        with pytest.raises(DomainError):
            scenario(phase_grid_points=3)

    def test_string_enums(self):
        sc = scenario(convention="strict", encoded_state="PLUS")
        assert sc.convention is Convention.STRICT
        assert sc.encoded_state is EncodedState.PLUS


class TestPropagateCoherent:
    def test_no_leak(self):
        amp = propagate_coherent(no_leak(), (0.0, 1.0, 2.0, 3.0))
        assert amp.h == pytest.approx(0.1 / ROOT2)
        assert amp.v == 0

    def test_zero_phases_strict(self):
        sc = scenario(convention="strict")
        a, b = sc.pulse.alpha, sc.pulse.beta
        amp = propagate_coherent(sc, (0.0, 0.0, 0.0, 0.0))
        assert amp.h == pytest.approx((a + b) / ROOT2, abs=1e-15)
        assert amp.v == pytest.approx(b / ROOT2, abs=1e-15)

    def test_zero_phases_balanced(self):
        amp = propagate_coherent(balanced(), (0.0, 0.0, 0.0, 0.0))
        assert amp.h == pytest.approx(0.2 / ROOT2, abs=1e-15)
        assert amp.v == pytest.approx(0.1 / ROOT2, abs=1e-15)

    def test_paper_phases_unit_modulus(self):
        sc = scenario(convention="paper")
        b = sc.pulse.beta
        amp = propagate_coherent(sc, (0.0, 0.0, math.pi / 2, math.pi))
        assert amp.h == pytest.approx((sc.pulse.alpha + 1j * b) / ROOT2, abs=1e-15)
        assert amp.v == pytest.approx((b - b) / ROOT2, abs=1e-15)


class TestSinglePhotonComponent:
    def test_single_mode(self):
        a = 0.1
        w, rho = single_photon_component(TwoModeAmplitude(a / ROOT2, 0.0))
        assert rho.allclose(DM.pure("H"), atol=1e-15)
        assert w == pytest.approx(math.exp(-a * a / 2) * a * a / 2, rel=1e-14)

    def test_balanced(self):
        _, rho = single_photon_component(TwoModeAmplitude(0.3, 0.3))
        assert rho.allclose(DM.pure("PLUS"), atol=1e-15)

    def test_direct_formula(self):
        w, rho = single_photon_component(TwoModeAmplitude(1.0, 0.1))
        expected = np.array([[1.0, 0.1], [0.1, 0.01]]) / 1.01
        assert np.allclose(rho.entries, expected, atol=1e-15)
        assert w == pytest.approx(math.exp(-1.01) * 1.01, rel=1e-14)

    def test_vacuum(self):
        assert single_photon_component(TwoModeAmplitude(0.0, 0.0)) == (0.0, None)

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            TwoModeAmplitude(complex("nan"), 0.0)


class TestPhaseAverage:
    @pytest.mark.parametrize("conv", ["strict", "paper"])
    def test_no_leak_is_pure(self, conv):
        rho, _ = phase_averaged_state(no_leak(conv))
        assert rho.allclose(DM.pure("H"), atol=1e-15)

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    def test_balanced_is_white(self, conv):
        rho, _ = phase_averaged_state(balanced(conv))
        assert rho.allclose(DM.maximally_mixed(), atol=1e-9)

    def test_paper_matches_mixture(self):
        sc = scenario(convention="paper")
        rho, _ = phase_averaged_state(sc)
        a2, b2 = sc.pulse.alpha**2, sc.pulse.beta**2
        closed = DM(np.diag([(a2 + b2) / (a2 + 3 * b2), 2 * b2 / (a2 + 3 * b2)]))
        # Neglected higher orders in the photon number are O(mu^2) relative to the noise weight.
        assert trace_distance(rho, closed) <= sc.pulse.mu**2 * 4 / 503

    def test_strict_leading_order(self):
        sc = scenario(convention="strict")
        rho, _ = phase_averaged_state(sc)
        a2, b2 = sc.pulse.alpha**2, sc.pulse.beta**2
        # With <|phi|^2> = 1/2 on path B the V population is (3/4) b2 / ((a2 + b2/2)/2 + 3 b2/4).
        leading = 3 * b2 / (a2 + 2 * b2)
        assert 2 * rho[1, 1].real == pytest.approx(leading, rel=sc.pulse.mu**2)

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    def test_grid_converged(self, conv):
        coarse, w8 = phase_averaged_state(scenario(convention=conv, phase_grid_points=8))
        fine, w16 = phase_averaged_state(scenario(convention=conv, phase_grid_points=16))
        assert trace_distance(coarse, fine) < 1e-13
        assert w8 == pytest.approx(w16, rel=1e-13)

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    @pytest.mark.parametrize("r", [1.5, 20.0, 500.0])
    def test_no_coherence(self, conv, r):
        rho, _ = phase_averaged_state(scenario(r=r, convention=conv))
        assert abs(rho[0, 1]) < 1e-10

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    def test_h_weight_monotone_in_r(self, conv):
        pops = [phase_averaged_state(scenario(r=r, convention=conv))[0][0, 0].real for r in (1e6, 1000, 500, 100, 10, 2, 1.01)]
        assert all(b <= a + 1e-15 for a, b in zip(pops, pops[1:]))

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    def test_encoding_symmetry(self, conv):
        rho_h, w_h = phase_averaged_state(scenario(r=50, convention=conv, encoded_state="H"))
        targets = {
            "V": X @ rho_h.entries @ X,
            "PLUS": HAD @ rho_h.entries @ HAD,
            "MINUS": HAD @ X @ rho_h.entries @ X @ HAD,
        }
        for label, expected in targets.items():
            rho, w = phase_averaged_state(scenario(r=50, convention=conv, encoded_state=label))
            assert np.allclose(rho.entries, expected, atol=1e-12), label
            assert w == pytest.approx(w_h, rel=1e-12)


class TestBeamSplitterTransfer:
    def test_unitary_columns(self):
        t = beam_splitter_transfer(6)
        for na in range(7):
            for nb in range(7):
                assert np.sum(t[na, nb] ** 2) == pytest.approx(1.0, abs=1e-12)
                # Photon number is conserved.
                nc, nd = np.nonzero(t[na, nb])
                assert np.all(nc + nd == na + nb)

    def test_orthogonal_inputs(self):
        t = beam_splitter_transfer(4)
        for total in range(5):
            inputs = [(k, total - k) for k in range(total + 1)]
            for i, (a, b) in enumerate(inputs):
                for c, d in inputs[i + 1:]:
                    assert abs(np.sum(t[a, b] * t[c, d])) < 1e-12

    def test_hong_ou_mandel(self):
        t = beam_splitter_transfer(2)
        assert abs(t[1, 1, 1, 1]) < 1e-15
        assert t[1, 1, 2, 0] ** 2 == pytest.approx(0.5)


class TestTruncatedFock:
    def test_norm_converges(self):
        st = TruncatedFockState.coherent(0.3 + 0.1j, 0.2, 12)
        assert st.norm() == pytest.approx(1.0, abs=1e-12)
        assert st.norm() <= 1.0 + 1e-12

    def test_truncation_loses_weight(self):
        st = TruncatedFockState.coherent(0.9, 0.5, 2)
        assert st.norm() < 1.0

    def test_rejects_overnormalized(self):
        with pytest.raises(DomainError):
            TruncatedFockState(np.ones((3, 3)))


class TestFockBruteForce:
    def test_no_leak_matches_shortcut(self):
        sc = no_leak()
        phases = (0.3, 1.1, 2.0, 5.0)
        w_f, rho_f = fock_brute_force(sc, phases)
        w_c, rho_c = single_photon_component(propagate_coherent(sc, phases))
        assert trace_distance(rho_f, rho_c) <= 1e-12
        assert w_f == pytest.approx(w_c, rel=1e-12)

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    @pytest.mark.parametrize("label", ["H", "V", "PLUS", "MINUS"])
    def test_random_tuples(self, conv, label):
        rng = np.random.default_rng(2024)
        tuples = rng.uniform(0.0, 2 * math.pi, size=(20, 4))
        td, rel = oracle_agreement(scenario(convention=conv, encoded_state=label), tuples)
        assert td <= 1e-8 and rel <= 1e-8

    def test_brighter_pulse(self):
        # Larger mu exercises multi-photon terms of the expansion.
        rng = np.random.default_rng(5)
        sc = scenario(r=3.0, mu=1.0, convention="strict", fock_cutoff=14)
        td, rel = oracle_agreement(sc, rng.uniform(0, 2 * math.pi, size=(10, 4)))
        assert td <= 1e-8 and rel <= 1e-8

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffTooSmallError):
            fock_brute_force(scenario(fock_cutoff=1), (0, 0, 0, 0))

    def test_cutoff_increase_bounded_by_tail(self):
        phases = (0.4, 2.2, 4.1, 0.9)
        base = scenario(fock_cutoff=8)
        w8, rho8 = fock_brute_force(base, phases)
        w10, rho10 = fock_brute_force(scenario(fock_cutoff=10), phases)
        tail = base.tail_probability()
        assert abs(w10 - w8) <= tail
        assert trace_distance(rho8, rho10) <= max(tail, 1e-15)


class TestCompareToClosedForm:
    def test_paper_convention(self):
        rep = compare_to_closed_form(scenario(convention="paper"))
        assert rep.ideal_weight_paper == pytest.approx(499 / 503)
        assert rep.noise_weight_paper == pytest.approx(4 / 503)
        assert abs(rep.ideal_weight_fit - 499 / 503) <= 2e-3
        assert rep.max_coherence < 1e-10

    def test_strict_convention(self):
        rep = compare_to_closed_form(scenario(convention="strict"))
        assert rep.noise_weight_fit == pytest.approx(3 / 502, rel=1e-3)
        assert abs(rep.noise_weight_fit - 4 / 503) <= 2 / 500
        assert rep.trace_distance == pytest.approx(abs(rep.noise_weight_fit - 4 / 503) / 2, rel=1e-9)

    @pytest.mark.parametrize("conv", ["strict", "paper"])
    def test_no_leak_zero_discrepancy(self, conv):
        rep = compare_to_closed_form(no_leak(conv))
        assert rep.trace_distance < 1e-15
        assert rep.ideal_weight_fit == pytest.approx(1.0)
        assert rep.noise_weight_paper == 0.0

    @pytest.mark.parametrize("label", ["V", "PLUS", "MINUS"])
    def test_other_encodings(self, label):
        rep = compare_to_closed_form(scenario(convention="paper", encoded_state=label))
        assert abs(rep.ideal_weight_fit - 499 / 503) <= 2e-3
        assert rep.max_coherence < 1e-10

    def test_rejects_small_cutoff(self):
        with pytest.raises(CutoffTooSmallError):
            compare_to_closed_form(scenario(fock_cutoff=1))

    def test_csv(self):
        reps = [compare_to_closed_form(scenario(convention=c)) for c in ("strict", "paper")]
        text = reports_to_csv(reps)
        lines = text.split("\n")
        assert lines[0] == ",".join(DiscrepancyReport.CSV_COLUMNS)
        assert lines[0] == (
            "convention,r,mu,cutoff,grid,ideal_weight_fit,ideal_weight_paper,"
            "noise_weight_fit,noise_weight_paper,trace_distance"
        )
        assert lines[1].startswith("strict,500,0.2,8,8,")
        assert text.endswith("\n") and "\r" not in text
