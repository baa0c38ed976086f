import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodge_ntk import ActivationKind, CovarianceView, phi, phi_dot
from hodge_ntk.errors import NegativeVariance, ZeroVarianceDerivative
from hodge_ntk.rng import substream


def _view(cross, dx, dy):
    return CovarianceView(np.atleast_2d(np.asarray(cross, dtype=float)),
                          np.asarray(dx, dtype=float), np.asarray(dy, dtype=float))


def _scalar_view(c, vx=1.0, vy=1.0):
    return _view([[c]], [vx], [vy])


class TestKnownValues:
    def test_relu_perfect_correlation(self):
        assert np.isclose(phi(ActivationKind.RELU, _scalar_view(1.0))[0, 0], 0.5)

    def test_relu_independent(self):
        val = phi(ActivationKind.RELU, _scalar_view(0.0))[0, 0]
        assert np.isclose(val, 1.0 / (2.0 * np.pi))

    def test_relu_dot_values(self):
        assert np.isclose(phi_dot(ActivationKind.RELU, _scalar_view(1.0))[0, 0], 0.5)
        assert np.isclose(phi_dot(ActivationKind.RELU, _scalar_view(0.0))[0, 0], 0.25)
        assert np.isclose(phi_dot(ActivationKind.RELU, _scalar_view(-1.0))[0, 0], 0.0)

    def test_linear_is_identity(self):
        rng = substream(0, "linear")
        cross = rng.standard_normal((3, 4))
        view = _view(cross, np.ones(3), np.ones(4))
        assert np.array_equal(phi(ActivationKind.LINEAR, view), cross)
        assert np.array_equal(phi_dot(ActivationKind.LINEAR, view), np.ones((3, 4)))

    def test_zero_variance_gives_zero_phi(self):
        view = _view([[0.0]], [0.0], [1.0])
        assert phi(ActivationKind.RELU, view)[0, 0] == 0.0

    def test_scaling_homogeneity(self):
        # ReLU is 1-homogeneous: scaling both variances by s^2 scales phi by s^2
        base = phi(ActivationKind.RELU, _scalar_view(0.3))[0, 0]
        scaled = phi(ActivationKind.RELU, _scalar_view(4 * 0.3, 4.0, 4.0))[0, 0]
        assert np.isclose(scaled, 4 * base)


class TestErrors:
    def test_negative_variance(self):
        with pytest.raises(NegativeVariance):
            phi(ActivationKind.RELU, _view([[0.0]], [-1e-3], [1.0]))

    def test_zero_variance_derivative(self):
        with pytest.raises(ZeroVarianceDerivative):
            phi_dot(ActivationKind.RELU, _view([[0.0]], [0.0], [1.0]))

    def test_tiny_negative_drift_tolerated(self):
        out = phi(ActivationKind.RELU, _view([[0.0]], [-1e-12], [1.0]))
        assert out[0, 0] == 0.0


def _mc_moments(vx, vy, rho, n, rng):
    """Monte Carlo E[relu(x)relu(y)] and E[1(x>0)1(y>0)] with standard errors."""
    x = rng.standard_normal(n)
    z = rng.standard_normal(n)
    y = rho * x + np.sqrt(max(1 - rho * rho, 0.0)) * z
    x = x * np.sqrt(vx)
    y = y * np.sqrt(vy)
    prod = np.maximum(x, 0) * np.maximum(y, 0)
    ind = ((x > 0) & (y > 0)).astype(float)
    return (
        (prod.mean(), prod.std(ddof=1) / np.sqrt(n)),
        (ind.mean(), ind.std(ddof=1) / np.sqrt(n)),
    )


class TestMonteCarloOracle:
    def test_matches_gaussian_expectations(self):
        # trimmed version of the acceptance sweep: 20 triples, 2e5 samples
        rng = substream(42, "mc-activations")
        for _ in range(20):
            vx, vy = rng.uniform(0.2, 3.0, size=2)
            rho = rng.uniform(-0.95, 0.95)
            cross = rho * np.sqrt(vx * vy)
            (m_phi, se_phi), (m_dot, se_dot) = _mc_moments(vx, vy, rho, 200_000, rng)
            a_phi = phi(ActivationKind.RELU, _scalar_view(cross, vx, vy))[0, 0]
            a_dot = phi_dot(ActivationKind.RELU, _scalar_view(cross, vx, vy))[0, 0]
            assert abs(a_phi - m_phi) < 4 * se_phi
            assert abs(a_dot - m_dot) < 4 * se_dot


class TestStructure:
    def test_psd_preserved(self):
        rng = substream(7, "psd")
        for _ in range(10):
            g = rng.standard_normal((6, 6))
            cov = g @ g.T / 6
            view = CovarianceView(cov, np.diag(cov), np.diag(cov))
            out = phi(ActivationKind.RELU, view)
            assert np.linalg.eigvalsh((out + out.T) / 2)[0] >= -1e-8

    @given(st.floats(-0.99, 0.98), st.floats(1e-3, 0.02))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_cross(self, rho, delta):
        lo = phi(ActivationKind.RELU, _scalar_view(rho))[0, 0]
        hi = phi(ActivationKind.RELU, _scalar_view(rho + delta))[0, 0]
        assert hi >= lo - 1e-12
        lo_d = phi_dot(ActivationKind.RELU, _scalar_view(rho))[0, 0]
        hi_d = phi_dot(ActivationKind.RELU, _scalar_view(rho + delta))[0, 0]
        assert hi_d >= lo_d - 1e-12

    def test_cauchy_schwarz_preserved(self):
        rng = substream(3, "cs")
        for _ in range(10):
            g = rng.standard_normal((5, 8))
            cov = g @ g.T / 8
            out = phi(ActivationKind.RELU, CovarianceView(cov, np.diag(cov), np.diag(cov)))
            d = np.diag(out)
            bound = np.sqrt(np.outer(d, d))
            assert np.all(np.abs(out) <= bound + 1e-8)

    def test_batched_matches_loop(self):
        rng = substream(9, "batch")
        cross = rng.standard_normal((4, 3, 3))
        dx = rng.uniform(0.5, 2.0, size=(4, 3))
        dy = rng.uniform(0.5, 2.0, size=(4, 3))
        batched = phi(ActivationKind.RELU, CovarianceView(cross, dx, dy))
        for b in range(4):
            single = phi(ActivationKind.RELU, CovarianceView(cross[b], dx[b], dy[b]))
            assert np.array_equal(batched[b], single)
