"""
Unit tests for the multiplexed source rates and the repeater model.
"""
import math

import numpy as np
import pytest

from components import multiplex
from components.multiplex import RepeaterParams, SourceParams
from utils.config import RATE_ETA_R_A, RATE_ETA_W, RATE_MODES, RATE_P
from utils.errors import DomainError

RATE_SOURCE = SourceParams(RATE_P, RATE_ETA_W, RATE_ETA_R_A, RATE_MODES)


class TestTail:

    @pytest.mark.parametrize("modes", [100, 4000])
    @pytest.mark.parametrize("l", range(0, 11))
    def test_beta_function_matches_log_sum(self, modes, l):
        s = SourceParams(0.01, 0.2, 1.0, modes)
        assert multiplex.p_at_least_l(s, l) == pytest.approx(multiplex.p_at_least_l_logsum(s, l), abs=1e-10)

    def test_exact_probabilities_sum_to_one(self):
        s = SourceParams(0.05, 0.3, 1.0, 100)
        assert sum(multiplex.p_exactly_l(s, l) for l in range(101)) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_in_mode_count(self):
        s = SourceParams(0.01, 0.2, 1.0, 10)
        tails = [multiplex.p_at_least_l(s.with_modes(m), 3) for m in (10, 100, 1000, 4000)]
        assert all(b >= a for a, b in zip(tails, tails[1:]))

    def test_too_many_photons(self):
        with pytest.raises(DomainError):
            multiplex.p_at_least_l(SourceParams(0.01, 0.2, 1.0, 5), 6)


class TestModeGuideline:

    @pytest.mark.parametrize("l, expected", [(1, 2000), (4, 5000)])
    def test_reference_points(self, l, expected):
        assert multiplex.mode_guideline(l, 0.01, 0.2) == expected

    @pytest.mark.parametrize("l", range(1, 11))
    def test_guideline_reaches_high_tail(self, l):
        modes = multiplex.mode_guideline(l, 0.01, 0.2)
        assert multiplex.p_at_least_l(SourceParams(0.01, 0.2, 1.0, modes), l) > 0.98

    def test_invalid(self):
        with pytest.raises(DomainError):
            multiplex.mode_guideline(0, 0.01, 0.2)
        with pytest.raises(DomainError):
            multiplex.mode_guideline(1, 0.0, 0.2)


class TestRates:

    def test_memory_never_loses(self):
        for row in multiplex.rate_table(RATE_SOURCE, 10):
            assert row.p_qm >= row.p_us
            if row.l >= 3:
                assert row.ratio > 10

    def test_equality_without_multiplexing(self):
        s = SourceParams(0.3, 0.5, 0.8, 2)
        result = multiplex.rates(s, 2)
        assert result.p_qm == pytest.approx(result.p_us, rel=1e-12)

    def test_table_rows(self):
        table = multiplex.rate_table(RATE_SOURCE, 10)
        assert [r.l for r in table] == list(range(1, 11))
        row = table[0].to_row()
        assert len(row) == 6
        assert row[3] == pytest.approx(row[1] * RATE_SOURCE.rep_rate)

    def test_splitter_switch_penalty(self):
        plain = multiplex.rates(RATE_SOURCE, 3)
        split = multiplex.rates(RATE_SOURCE, 3, splitter_switch=True)
        assert split.p_qm == pytest.approx(plain.p_qm / 27, rel=1e-12)
        assert split.p_us == plain.p_us

    def test_validation(self):
        with pytest.raises(DomainError):
            SourceParams(1.5, 0.2, 1.0, 10)
        with pytest.raises(DomainError):
            SourceParams(0.1, 0.2, 1.0, 0)
        with pytest.raises(DomainError):
            multiplex.rate_table(RATE_SOURCE, 0)


def test_heralded_single_autocorrelation():
    assert multiplex.g2_heralded_single(0.0) == 0.0
    assert multiplex.g2_heralded_single(0.05) == pytest.approx(2 * 0.05 * 2.05 / 1.05 ** 2)
    with pytest.raises(DomainError):
        multiplex.g2_heralded_single(-0.1)


class TestConnectionOracle:

    @pytest.mark.parametrize("phi", [0.0, 0.9, math.pi / 2])
    def test_connection_patterns(self, phi):
        report = multiplex.enc_outcomes(phi)
        assert [o.name for o in report.patterns] == ['D1D2', 'D1D3', 'D4D2', 'D4D3']
        for outcome in report.patterns:
            assert outcome.probability == pytest.approx(1 / 32, abs=1e-12)
            assert outcome.fidelity == pytest.approx(1.0, abs=1e-9)
        assert report.total_probability == pytest.approx(1 / 8, abs=1e-12)

    def test_purification_patterns(self):
        report = multiplex.purification_outcomes()
        assert len(report.patterns) == 4
        for outcome in report.patterns:
            assert outcome.probability == pytest.approx(1 / 8, abs=1e-12)
            assert outcome.fidelity == pytest.approx(1.0, abs=1e-9)
        assert report.min_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_input_pairs_are_normalised(self):
        assert multiplex.eng_pair_state(0.4).norm() == pytest.approx(1.0, abs=1e-12)
        assert multiplex.connected_pairs_state().norm() == pytest.approx(1.0, abs=1e-12)


class TestRepeaterMonteCarlo:

    def test_link_efficiency(self):
        assert RepeaterParams().eta_w == pytest.approx(0.3174, abs=1e-4)

    def test_generation_matches_analytic_tail(self):
        report = multiplex.repeater_monte_carlo(RepeaterParams(), 100_000, seed=17)
        assert report.p_at_least_two == pytest.approx(0.362, abs=1e-3)
        eng = report.tally['eng']
        assert eng.attempts == 200_000
        assert eng.deviation() < 4
        assert report.tally['enc'].expected == pytest.approx(1 / 8)

    def test_selected_modes_are_distinct(self):
        report = multiplex.repeater_monte_carlo(RepeaterParams(), 5000, seed=3)
        pairs = report.mode_pairs
        assert len(pairs) > 0
        assert np.all(pairs[:, 0] != pairs[:, 1])
        assert pairs.min() >= 0 and pairs.max() < RepeaterParams().modes
        assert report.to_dict()['heralded_links'] == len(pairs)

    def test_worker_count_does_not_change_counts(self):
        r = RepeaterParams()
        one = multiplex.repeater_monte_carlo(r, 5000, seed=8, workers=1, block_trials=700)
        four = multiplex.repeater_monte_carlo(r, 5000, seed=8, workers=4, block_trials=700)
        assert one.tally.to_dict() == four.tally.to_dict()
        assert np.array_equal(one.mode_pairs, four.mode_pairs)

    def test_validation(self):
        with pytest.raises(DomainError):
            RepeaterParams(modes=1)
        with pytest.raises(DomainError):
            multiplex.repeater_monte_carlo(RepeaterParams(), 0, seed=1)
        with pytest.raises(DomainError):
            multiplex.repeater_monte_carlo(RepeaterParams(), 10, seed=1, workers=0)
