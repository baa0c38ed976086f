import numpy as np
import pytest

from hodge_ntk import (
    boundary_matrices,
    er_clique_complex,
    hodge_basis,
    new_complex,
)


@pytest.fixture
def filled_triangle():
    return new_complex(3, [(0, 1), (0, 2), (1, 2)], [(0, 1, 2)])


@pytest.fixture
def hollow_triangle():
    return new_complex(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def random_complexes():
    """A small zoo of ER-clique complexes with nonempty edge sets."""
    out = []
    seed = 0
    while len(out) < 12:
        sc = er_clique_complex(8, 0.6, 0.5, seed)
        seed += 1
        if sc.n_edges:
            out.append(sc)
    return out


@pytest.fixture
def full_decomposition_complex():
    """One complex whose exact/harmonic/coexact spaces are all nonempty."""
    seed = 0
    while True:
        sc = er_clique_complex(12, 0.4, 0.4, seed)
        basis = hodge_basis(boundary_matrices(sc))
        if all(d >= 1 for d in basis.dims):
            return sc, basis
        seed += 1


def assert_psd(matrix, rel_tol=1e-8):
    w = np.linalg.eigvalsh((matrix + matrix.T) / 2.0)
    scale = max(abs(w[-1]), 1e-300)
    assert w[0] >= -rel_tol * scale, f"min eigenvalue {w[0]} vs scale {scale}"
