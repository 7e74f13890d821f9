import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klbridge import KernelSpec, cached_spectrum, compute_constants
from klbridge.errors import BracketError, PoleError, SizeError, TruncationWarning
from klbridge.transfer import (NONE, SecularFunction, bridge_root, bridge_roots, rank_one_critical,
                               rank_one_root, rank_one_secular, secular_eval, synthesis_endpoint_tail,
                               synthesize_bridge_eigenfunction, transfer_spectrum)


class TestBrownianSecular:
    def test_roots_are_integers(self):
        sf = SecularFunction.brownian(400)
        roots = bridge_roots(sf, 40)
        assert np.max(np.abs(roots - np.arange(1, 41))) <= 1e-9

    @given(st.integers(1, 30), st.floats(min_value=0.01, max_value=0.2))
    def test_sign_near_poles(self, n, eps):
        sf = SecularFunction.brownian(200)
        assert secular_eval(sf, n - 0.5 + eps) < 0.0
        assert secular_eval(sf, n + 0.5 - eps) > 0.0

    def test_pole_error(self):
        with pytest.raises(PoleError):
            secular_eval(SecularFunction.brownian(100), 2.5)

    def test_tail_beats_no_tail(self):
        ref = bridge_roots(SecularFunction.brownian(20000), 5)
        with_tail = bridge_roots(SecularFunction.brownian(100), 5)
        without = bridge_roots(SecularFunction.brownian(100, tail_mode=NONE), 5)
        assert np.max(np.abs(with_tail - ref)) < 0.01 * np.max(np.abs(without - ref))


class TestOracleTransfer:
    def test_root_residual(self, fbm_spectrum):
        sf = SecularFunction.from_spectrum(fbm_spectrum(0.75), 300)
        for n in (1, 7, 30):
            assert abs(secular_eval(sf, bridge_root(sf, n))) < 1e-8

    @pytest.mark.parametrize("h", [0.3, 0.75])
    def test_matches_oracle_bridge(self, fbm_spectrum, bridge_spectrum, h):
        tr = transfer_spectrum(fbm_spectrum(h), 20).values
        ref = bridge_spectrum(h).values[:20]
        assert np.max(np.abs(tr / ref - 1.0)) < 1e-3

    def test_size_error(self, fbm_spectrum):
        sf = SecularFunction.from_spectrum(fbm_spectrum(0.75), 60)
        with pytest.raises(SizeError):
            bridge_root(sf, 20)

    def test_bracket_error(self):
        # a bracket containing two roots has no sign change in g
        sf = SecularFunction.brownian(100)
        from klbridge.transfer import _bisect
        with pytest.raises(BracketError):
            _bisect(lambda m: secular_eval(sf, m), 1.2, 1.4, 1e-12)


class TestSynthesis:
    def test_brownian_sines(self, brownian_spectrum):
        t = np.linspace(0.0, 1.0, 101)
        for n in (1, 3):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                phi = synthesize_bridge_eigenfunction(brownian_spectrum, 1.0 / (n * math.pi) ** 2, t, 500)
            exact = math.sqrt(2.0) * np.sin(n * math.pi * t)
            inner = t[(t > 0.05) & (t < 0.95)]
            mask = np.isin(t, inner)
            assert np.max(np.abs(phi[mask] - exact[mask])) <= 5e-3

    def test_against_oracle_bridge(self, fbm_spectrum, bridge_spectrum):
        base, br = fbm_spectrum(0.75), bridge_spectrum(0.75)
        n = 3
        lam = transfer_spectrum(base, n).values[n - 1]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            phi = synthesize_bridge_eigenfunction(base, lam, base.grid.nodes, 200)
        ref = br.fn_samples[n - 1]
        assert math.sqrt(base.grid.integrate((phi - ref) ** 2)) < 0.02

    @pytest.mark.parametrize("h,n", [(0.3, 5), (0.7, 20)])
    def test_endpoint_value_is_the_tail(self, fbm_spectrum, h, n):
        base = fbm_spectrum(h)
        lam = transfer_spectrum(base, n).values[n - 1]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            end = synthesize_bridge_eigenfunction(base, lam, [1.0], 300)[0]
        assert abs(end) == pytest.approx(synthesis_endpoint_tail(base, lam, 300), rel=1e-3, abs=1e-9)

    def test_coefficients_and_pole(self, brownian_spectrum):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            _, co = synthesize_bridge_eigenfunction(brownian_spectrum, 0.1, [0.5], 50, return_coefficients=True)
        assert co.coeffs.shape == (50,) and co.c != 0.0
        with pytest.raises(PoleError):
            synthesize_bridge_eigenfunction(brownian_spectrum, brownian_spectrum.values[2], [0.5])

    def test_truncation_warning(self, brownian_spectrum):
        with pytest.warns(TruncationWarning):
            synthesize_bridge_eigenfunction(brownian_spectrum, 0.02, [0.5], 20)


class TestRankOne:
    def test_zero_q(self, fbm_spectrum):
        assert rank_one_secular(fbm_spectrum(0.3), 0.0, 0.01, 100) == 1.0

    def test_critical_q_roots_are_bridge_roots(self, fbm_spectrum):
        sf = SecularFunction.from_spectrum(fbm_spectrum(0.75), 300)
        for n in (1, 5, 12):
            mu_b = bridge_root(sf, n)
            # the F_q tail adds a trace term estimated without the endpoint correction
            assert rank_one_root(sf, -1.0, n) == pytest.approx(mu_b, rel=1e-7)
            assert abs(rank_one_secular(sf, -1.0, float(sf.eigenvalue(mu_b)))) < 1e-8

    def test_brownian_half_against_oracle(self, brownian_spectrum):
        q = -0.5
        oracle = cached_spectrum(KernelSpec.rank_one(KernelSpec.brownian(), q), 2000).values
        sf = SecularFunction.from_spectrum(brownian_spectrum, 400)
        for n in (1, 2, 10, 30):
            lam = float(sf.eigenvalue(rank_one_root(sf, q, n)))
            assert lam == pytest.approx(oracle[n - 1], rel=1e-3)

    @pytest.mark.parametrize("q", [-0.5, 0.5])
    def test_interlacing(self, fbm_spectrum, q):
        sf = SecularFunction.from_spectrum(fbm_spectrum(0.3), 300)
        for n in range(2, 30):
            mu = rank_one_root(sf, q, n)
            if q < 0:
                assert sf.mu[n - 1] < mu < sf.mu[n]
            else:
                assert sf.mu[n - 2] < mu < sf.mu[n - 1]

    def test_positive_q_top_eigenvalue(self, fbm_spectrum):
        q = 0.5
        sf = SecularFunction.from_spectrum(fbm_spectrum(0.7), 300)
        oracle = cached_spectrum(KernelSpec.rank_one(KernelSpec.fbm(0.7), q), 2000).values[0]
        assert float(sf.eigenvalue(rank_one_root(sf, q, 1))) == pytest.approx(oracle, rel=1e-3)

    def test_critical_value(self):
        assert rank_one_critical(KernelSpec.fbm(0.4)) == -1.0
