"""
Unit tests for the transverse mode functions.
"""
import math

import numpy as np
import pytest

from components.networks import tau_from_shift
from components.wavespace import (GaussianMode, TransverseWavevector, WavevectorGrid, make_mode_pair, overlap,
                                  overlap_quadrature)
from utils.errors import DomainError

SIGMA = 10.3
SHIFTS = [0.0, 5.0, 17.0, 40.0]


def mode(kx=0.0, ky=0.0, sigma=SIGMA):
    return GaussianMode(TransverseWavevector(kx, ky), sigma)


class TestOverlap:

    def test_self_overlap_is_one(self):
        assert overlap(mode(), mode()) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("dk", SHIFTS)
    def test_closed_form(self, dk):
        tau = overlap(mode(), mode(dk, 0.0))
        assert tau.imag == 0
        assert tau.real == pytest.approx(math.exp(-dk ** 2 / (8 * SIGMA ** 2)), rel=1e-14)

    def test_depends_on_distance_only(self):
        a = overlap(mode(), mode(30.0, 0.0))
        b = overlap(mode(), mode(0.0, -30.0))
        c = overlap(mode(12.0, 4.0), mode(12.0 + 18.0, 4.0 + 24.0))
        assert a == pytest.approx(b, abs=1e-15)
        assert a == pytest.approx(c, abs=1e-15)

    @pytest.mark.parametrize("dk", SHIFTS)
    def test_quadrature_matches_closed_form(self, dk):
        a, b = mode(), mode(dk, 3.0)
        assert overlap_quadrature(a, b).real == pytest.approx(overlap(a, b).real, abs=1e-9)

    @pytest.mark.parametrize("dk", SHIFTS)
    def test_hermitian_symmetry(self, dk):
        a, b = mode(4.0, -2.0), mode(4.0 + dk, 1.0)
        assert overlap(a, b) == pytest.approx(overlap(b, a).conjugate(), abs=1e-15)
        assert overlap_quadrature(a, b) == pytest.approx(overlap_quadrature(b, a).conjugate(), abs=1e-12)

    def test_unequal_radii_rejected(self):
        with pytest.raises(DomainError):
            overlap(mode(), mode(sigma=2 * SIGMA))

    def test_invalid_modes_rejected(self):
        with pytest.raises(DomainError):
            mode(sigma=0.0)
        with pytest.raises(DomainError):
            TransverseWavevector(float('nan'), 0.0)


class TestModePair:

    @pytest.mark.parametrize("dk", [0.0, 8.0, 25.0])
    def test_sampled_decomposition(self, dk):
        pair = make_mode_pair(mode(), TransverseWavevector(dk, 0.0))
        grid = WavevectorGrid.around(pair.proper, pair.shifted)
        sampled = pair.sample(grid)

        assert sampled.tau.real == pytest.approx(pair.tau, abs=1e-9)
        assert abs(grid.inner(sampled.orthogonal, sampled.orthogonal)) == pytest.approx(1.0, abs=1e-9)
        assert abs(grid.inner(sampled.proper, sampled.orthogonal)) < 1e-9
        rebuilt = pair.tau * sampled.proper + pair.orthogonal_weight * sampled.orthogonal
        if dk > 0:
            assert np.max(np.abs(rebuilt - sampled.shifted)) < 1e-9 * np.max(np.abs(sampled.shifted))

    def test_zero_shift_uses_hermite_gauss_complement(self):
        pair = make_mode_pair(mode(), TransverseWavevector())
        assert pair.tau == 1.0
        assert pair.orthogonal_weight == 0.0
        grid = WavevectorGrid.around(pair.proper, pair.shifted)
        kx, ky = grid.mesh()
        hg = pair.orthogonal(kx, ky)
        assert abs(grid.inner(pair.proper.amplitude(kx, ky), hg)) < 1e-9

    def test_tau_from_shift_decreases(self):
        taus = [tau_from_shift(dk, SIGMA) for dk in np.linspace(0, 60, 13)]
        assert taus[0] == 1.0
        assert all(b < a for a, b in zip(taus, taus[1:]))
