from ReducedSpectrum import (
    Provenance,
    SectorSpec,
    Spectrum,
    WeightVector,
    WeightVectorError,
    equal_weight_spectrum,
    gaussian_eigenvalues,
    ingest_weights,
    mixed_spectrum,
    sector_spectrum,
    thermodynamic_spectrum,
)
from LogCombinatorics import DomainError
from dataclasses import FrozenInstanceError
from hypothesis import given, settings, strategies as st
import math
import numpy as np
import pytest


class TestSectorSpec:

    def test_sector_spec_accessors(self):
        """
        Test filling, magnetization and the trivial/degenerate flags.
        """
        spec = SectorSpec(10, 3, 4)
        assert spec.p == pytest.approx(0.3)
        assert spec.q == pytest.approx(0.7)
        assert spec.magnetization == pytest.approx(-0.2)
        assert not spec.trivial_block
        assert not spec.degenerate_filling
        assert SectorSpec(10, 0, 4).degenerate_filling
        assert SectorSpec(10, 3, 10).trivial_block

    @pytest.mark.parametrize("L,N,n", [(0, 0, 0), (10, 11, 3), (10, -1, 3), (10, 3, 11), (10, 3, -1)])
    def test_sector_spec_rejects_out_of_range(self, L, N, n):
        """
        Test that construction validates the sector coordinates.
        """
        with pytest.raises(DomainError):
            SectorSpec(L, N, n)

    def test_sector_spec_is_frozen(self):
        """
        Test that SectorSpec cannot be mutated.
        """
        spec = SectorSpec(10, 3, 4)
        with pytest.raises(FrozenInstanceError):
            spec.N = 5


class TestSectorSpectrum:

    def test_sector_spectrum_small_chain(self):
        """
        Test the L=4, N=2, n=2 spectrum and its provenance.
        """
        s = sector_spectrum(SectorSpec(4, 2, 2))
        np.testing.assert_allclose(s.values(), [1 / 6, 2 / 3, 1 / 6], atol=1e-15)
        assert s.provenance is Provenance.SECTOR
        assert len(s) == 3
        assert s.block_size == 2
        assert s.nonzero_count() == 3

    def test_single_up_spin(self):
        """
        Test that N = 1 gives eigenvalues (L - n) / L and n / L.
        """
        s = sector_spectrum(SectorSpec(10, 1, 3))
        np.testing.assert_allclose(s.values(), [0.7, 0.3, 0.0, 0.0], atol=1e-15)
        assert s.nonzero_count() == 2

    def test_trivial_and_polarized_cases(self):
        """
        Test that empty blocks and polarized sectors give a single unit eigenvalue.
        """
        assert sector_spectrum(SectorSpec(10, 4, 0)).values().tolist() == [1.0]
        polarized = sector_spectrum(SectorSpec(10, 0, 4))
        assert polarized.values()[0] == pytest.approx(1.0, abs=1e-15)
        assert polarized.nonzero_count() == 1

    def test_spectrum_is_read_only(self):
        """
        Test that spectra cannot be modified in place.
        """
        s = sector_spectrum(SectorSpec(10, 5, 3))
        with pytest.raises(ValueError):
            s.log_values[0] = 0.0
        with pytest.raises(FrozenInstanceError):
            s.provenance = Provenance.MIXED

    def test_complementary_blocks_share_nonzero_spectrum(self):
        """
        Test that blocks of size n and L - n have the same sorted nonzero eigenvalues.
        """
        for L, N, n in [(12, 5, 3), (50, 20, 10), (200, 100, 37)]:
            small = sector_spectrum(SectorSpec(L, N, n))
            large = sector_spectrum(SectorSpec(L, N, L - n))
            np.testing.assert_allclose(
                small.sorted_descending(pad_to=len(large)),
                large.sorted_descending(),
                rtol=1e-11,
                atol=1e-15,
            )

    def test_up_down_reflection(self):
        """
        Test that N and L - N give mirrored spectra.
        """
        lhs = sector_spectrum(SectorSpec(40, 8, 15)).values()
        rhs = sector_spectrum(SectorSpec(40, 32, 15)).values()[::-1]
        np.testing.assert_allclose(lhs, rhs, rtol=1e-11, atol=1e-300)

    def test_sorted_descending_padding(self):
        """
        Test zero padding and refusal to drop nonzero eigenvalues.
        """
        s = sector_spectrum(SectorSpec(4, 2, 2))
        padded = s.sorted_descending(pad_to=5)
        np.testing.assert_allclose(padded, [2 / 3, 1 / 6, 1 / 6, 0.0, 0.0], atol=1e-15)
        with pytest.raises(DomainError):
            s.sorted_descending(pad_to=2)

    def test_thermodynamic_limit(self):
        """
        Test that a half-filled chain of 10^5 sites approaches the binomial spectrum for n = 20.
        """
        L = 100_000
        finite = sector_spectrum(SectorSpec(L, L // 2, 20)).values()
        infinite = thermodynamic_spectrum(20, 0.5).values()
        assert np.max(np.abs(finite - infinite)) < 1e-3

    def test_gaussian_approximation_near_peak(self):
        """
        Test the normal approximation for n p q well above 1.
        """
        spec = SectorSpec(10_000, 5_000, 1_000)
        exact = sector_spectrum(spec).values()
        approx = gaussian_eigenvalues(spec)
        peak = np.argmax(exact)
        assert abs(peak - 500) <= 1
        window = slice(peak - 20, peak + 21)
        np.testing.assert_allclose(approx[window], exact[window], rtol=1e-2)

    def test_gaussian_approximation_rejects_trivial_input(self):
        """
        Test that the normal approximation refuses trivial blocks and polarized sectors.
        """
        with pytest.raises(DomainError):
            gaussian_eigenvalues(SectorSpec(10, 0, 3))
        with pytest.raises(DomainError):
            gaussian_eigenvalues(SectorSpec(10, 5, 10))

    @settings(max_examples=150, deadline=None)
    @given(st.data())
    def test_sector_normalization_property(self, data):
        """
        Property: sector spectra have total 1 within 1e-12 and at most n + 1 nonzero entries.
        """
        L = data.draw(st.integers(min_value=1, max_value=2000), label="L")
        N = data.draw(st.integers(min_value=0, max_value=L), label="N")
        n = data.draw(st.integers(min_value=0, max_value=min(L, 600)), label="n")
        s = sector_spectrum(SectorSpec(L, N, n))
        assert abs(s.total() - 1.0) <= 1e-12
        assert s.nonzero_count() <= n + 1
        assert s.nonzero_count() == min(n, N) - max(0, n + N - L) + 1


class TestWeightVector:

    def test_delta_and_uniform(self):
        """
        Test the pure-sector and equal-weight constructors.
        """
        delta = WeightVector.delta(6, 2)
        assert delta.L == 6
        assert delta.alphas.tolist() == [0, 0, 1, 0, 0, 0, 0]
        uniform = WeightVector.uniform(6)
        np.testing.assert_allclose(uniform.alphas, np.full(7, 1 / 7))

    def test_invalid_weights(self):
        """
        Test rejection of negative entries, bad sums and out-of-range sectors.
        """
        with pytest.raises(WeightVectorError):
            WeightVector.from_values([0.5, 0.6, -0.1])
        with pytest.raises(WeightVectorError):
            WeightVector.from_values([0.5, 0.6])
        with pytest.raises(WeightVectorError):
            WeightVector.from_values([])
        with pytest.raises(WeightVectorError):
            WeightVector.delta(4, 5)

    def test_weight_vector_error_is_a_domain_error(self):
        """
        Test that weight failures can be caught as DomainError.
        """
        with pytest.raises(DomainError):
            WeightVector.from_values([2.0])

    def test_dirichlet_weights(self):
        """
        Test that random weights are normalized and reproducible under a fixed seed.
        """
        first = WeightVector.dirichlet(20, np.random.default_rng(5))
        second = WeightVector.dirichlet(20, np.random.default_rng(5))
        assert first.L == 20
        assert math.fsum(first.alphas) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_array_equal(first.alphas, second.alphas)

    def test_mix(self):
        """
        Test affine mixing of two weight vectors and its argument checks.
        """
        mixed = WeightVector.delta(4, 0).mix(WeightVector.delta(4, 4), 0.25)
        np.testing.assert_allclose(mixed.alphas, [0.25, 0, 0, 0, 0.75])
        with pytest.raises(WeightVectorError):
            WeightVector.delta(4, 0).mix(WeightVector.delta(5, 0), 0.5)
        with pytest.raises(WeightVectorError):
            WeightVector.delta(4, 0).mix(WeightVector.delta(4, 1), 1.5)


class TestMixedSpectrum:

    def test_delta_weights_reproduce_sector(self):
        """
        Test that a single-sector mixture equals the sector spectrum.
        """
        for L, N, n in [(10, 4, 3), (100, 50, 50), (1000, 7, 400)]:
            mixed = mixed_spectrum(L, n, WeightVector.delta(L, N))
            sector = sector_spectrum(SectorSpec(L, N, n))
            np.testing.assert_allclose(mixed.values(), sector.values(), rtol=1e-14, atol=0)
            assert mixed.provenance is Provenance.MIXED

    @pytest.mark.parametrize("L", [5, 20, 73, 200])
    def test_uniform_weights_flatten_spectrum(self, L):
        """
        Test that equal weights over all sectors give n + 1 eigenvalues 1 / (n + 1).
        """
        uniform = WeightVector.uniform(L)
        for n in sorted({1, L // 3, L // 2, L - 1}):
            s = mixed_spectrum(L, n, uniform)
            np.testing.assert_allclose(s.values(), np.full(n + 1, 1.0 / (n + 1)), rtol=0, atol=1e-12)

    def test_affinity_in_weights(self):
        """
        Test that the spectrum is affine in the weights.
        """
        rng = np.random.default_rng(11)
        L, n, c = 60, 17, 0.3
        first = WeightVector.dirichlet(L, rng)
        second = WeightVector.dirichlet(L, rng)
        combined = mixed_spectrum(L, n, first.mix(second, c)).values()
        separate = c * mixed_spectrum(L, n, first).values() + (1 - c) * mixed_spectrum(L, n, second).values()
        np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("L", [10, 40, 120])
    def test_mixture_bounded_by_sector_maximum(self, L):
        """
        Test that each mixed eigenvalue is at most the largest sector eigenvalue with the same index.
        """
        w = WeightVector.dirichlet(L, np.random.default_rng(L))
        for n in sorted({1, L // 4, L // 2, L - 1}):
            sectors = np.array([sector_spectrum(SectorSpec(L, N, n)).values() for N in range(L + 1)])
            bound = sectors.max(axis=0)
            mixed = mixed_spectrum(L, n, w).values()
            assert np.all(mixed <= bound * (1 + 1e-12) + 1e-15), f"bound violated at n={n}"

    def test_mixed_normalization(self):
        """
        Test normalization of a random mixture on a long chain.
        """
        w = WeightVector.dirichlet(3000, np.random.default_rng(3))
        s = mixed_spectrum(3000, 1200, w)
        assert abs(s.total() - 1.0) <= 1e-12

    def test_weight_length_mismatch(self):
        """
        Test that a weight vector of the wrong length is rejected.
        """
        with pytest.raises(WeightVectorError):
            mixed_spectrum(10, 3, WeightVector.uniform(9))


class TestClosedFormSpectra:

    def test_equal_weight_spectrum(self):
        """
        Test the flat closed-form spectrum.
        """
        s = equal_weight_spectrum(3)
        np.testing.assert_allclose(s.values(), [0.25] * 4)
        assert s.provenance is Provenance.EQUAL_WEIGHT
        assert equal_weight_spectrum(0).values().tolist() == [1.0]
        with pytest.raises(DomainError):
            equal_weight_spectrum(-1)

    def test_thermodynamic_spectrum(self):
        """
        Test the binomial spectrum values and normalization.
        """
        s = thermodynamic_spectrum(2, 0.5)
        np.testing.assert_allclose(s.values(), [0.25, 0.5, 0.25], atol=1e-15)
        assert s.provenance is Provenance.THERMODYNAMIC
        assert abs(thermodynamic_spectrum(10_000, 0.01).total() - 1.0) <= 1e-12
        with pytest.raises(DomainError):
            thermodynamic_spectrum(10, 1.0)

    def test_spectrum_accepts_provenance_strings(self):
        """
        Test that Spectrum coerces provenance names to the enum.
        """
        s = Spectrum(np.log([0.5, 0.5]), "oracle")
        assert s.provenance is Provenance.ORACLE


class TestIngestWeights:

    def _write(self, path, values):
        path.write_text("\n".join(repr(v) for v in values) + "\n")
        return str(path)

    def test_ingest_exact_weights(self, tmp_path):
        """
        Test loading a normalized weight file.
        """
        path = self._write(tmp_path / "w.txt", [0.0, 0.25, 0.5, 0.25, 0.0])
        w = ingest_weights(path, 4)
        np.testing.assert_array_equal(w.alphas, [0.0, 0.25, 0.5, 0.25, 0.0])

    def test_ingest_renormalizes_small_drift(self, tmp_path):
        """
        Test that a sum within 1e-6 of 1 is renormalized.
        """
        path = self._write(tmp_path / "w.txt", [0.5000004, 0.5])
        w = ingest_weights(path, 1)
        assert math.fsum(w.alphas) == pytest.approx(1.0, abs=1e-15)
        assert w.alphas[0] > w.alphas[1]

    def test_ingest_rejects_large_drift(self, tmp_path):
        """
        Test that a sum off by more than 1e-6 is rejected.
        """
        path = self._write(tmp_path / "w.txt", [0.51, 0.5])
        with pytest.raises(WeightVectorError):
            ingest_weights(path, 1)

    def test_ingest_rejects_wrong_count_and_negatives(self, tmp_path):
        """
        Test rejection of a wrong number of lines and of negative entries.
        """
        path = self._write(tmp_path / "w.txt", [0.5, 0.5])
        with pytest.raises(WeightVectorError):
            ingest_weights(path, 2)
        path = self._write(tmp_path / "neg.txt", [1.5, -0.5])
        with pytest.raises(WeightVectorError):
            ingest_weights(path, 1)

    def test_ingest_rejects_non_numeric(self, tmp_path):
        """
        Test that a non-numeric line is reported as a weight error.
        """
        path = tmp_path / "bad.txt"
        path.write_text("0.5\nhalf\n")
        with pytest.raises(WeightVectorError):
            ingest_weights(str(path), 1)
