import numpy as np
import pytest

from noisypair import qmath


def _random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def _charpoly_roots(a, n_probe=2001):
    """Eigenvalues located as sign changes of det(a - x I), then bisected.

    Fully independent of the Jacobi route: only determinants are evaluated.
    Gershgorin discs bound the search window, so no root can escape it.
    """
    n = a.shape[0]
    eye = np.eye(n)
    radii = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
    lo = float(np.min(np.diag(a).real - radii)) - 1.0
    hi = float(np.max(np.diag(a).real + radii)) + 1.0

    def p(x):
        return float(np.linalg.det(a - x * eye).real)

    xs = np.linspace(lo, hi, n_probe)
    vals = np.array([p(x) for x in xs])
    roots = []
    for k in range(n_probe - 1):
        if vals[k] == 0.0:
            roots.append(float(xs[k]))
            continue
        if vals[k] * vals[k + 1] >= 0.0:
            continue
        x0, x1, f0 = float(xs[k]), float(xs[k + 1]), float(vals[k])
        while x1 - x0 > 1e-14:
            xm = 0.5 * (x0 + x1)
            fm = p(xm)
            if fm == 0.0:
                x0 = x1 = xm
                break
            if f0 * fm < 0.0:
                x1 = xm
            else:
                x0, f0 = xm, fm
        roots.append(0.5 * (x0 + x1))
    return np.array(sorted(roots, reverse=True))


def test_eig_matches_charpoly_bisection_oracle():
    rng = np.random.default_rng(3)
    for dim in (2, 4):
        for _ in range(10):
            a = _random_hermitian(rng, dim)
            w, _ = qmath.eig_hermitian(a)
            roots = _charpoly_roots(a)
            assert roots.size == dim  # distinct roots, or the probe was too coarse
            assert np.max(np.abs(w - roots)) < 1e-10


def test_eig_reconstruction_unitarity_and_order():
    rng = np.random.default_rng(4)
    for dim in (2, 4):
        for _ in range(50):
            a = _random_hermitian(rng, dim)
            w, v = qmath.eig_hermitian(a)
            assert np.all(np.diff(w) <= 0.0)
            assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - a)) < 1e-12
            assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-12
            # each column actually solves the eigenproblem
            assert np.max(np.abs(a @ v - v * w)) < 1e-12


def test_eig_known_matrices():
    w, _ = qmath.eig_hermitian([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(w, [3.0, 1.0], atol=1e-14)
    w, _ = qmath.eig_hermitian([[1.0, 1.0j], [-1.0j, 1.0]])
    assert np.allclose(w, [2.0, 0.0], atol=1e-14)
    w, v = qmath.eig_hermitian(np.diag([4.0, 3.0, 2.0, 1.0]))
    assert np.array_equal(w, [4.0, 3.0, 2.0, 1.0])
    assert np.array_equal(v, np.eye(4))


def test_eig_input_validation():
    with pytest.raises(ValueError, match="square"):
        qmath.eig_hermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="dimensions"):
        qmath.eig_hermitian(np.eye(3))
    with pytest.raises(ValueError, match="finite"):
        qmath.eig_hermitian([[np.inf, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        qmath.eig_hermitian([[0.0, 1.0], [0.0, 0.0]])


def test_hermiticity_defect_and_ensure():
    assert qmath.hermiticity_defect(np.eye(4)) == 0.0
    a = np.array([[1.0, 0.5 + 2e-3], [0.5, 2.0]], dtype=complex)
    assert abs(qmath.hermiticity_defect(a) - 2e-3) < 1e-15
    with pytest.raises(ValueError, match="not Hermitian"):
        qmath.ensure_hermitian(a)
    sym = qmath.ensure_hermitian(a, tol=1e-2)
    assert qmath.hermiticity_defect(sym) == 0.0
    assert abs(sym[0, 1] - (0.5 + 1e-3)) < 1e-15


def test_sqrt_psd_squares_back():
    rng = np.random.default_rng(5)
    for dim in (2, 4):
        for _ in range(30):
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            a = g @ g.conj().T
            s = qmath.sqrt_psd(a)
            assert qmath.hermiticity_defect(s) == 0.0
            assert np.max(np.abs(s @ s - a)) < 1e-10 * max(1.0, np.linalg.norm(a))


def test_sqrt_psd_projector_fixed_point():
    # a rank-1 projector is its own square root
    psi = np.array([0.6, 0.0, 0.0, 0.8j])
    proj = np.outer(psi, psi.conj())
    assert np.max(np.abs(qmath.sqrt_psd(proj) - proj)) < 1e-12


def test_sqrt_psd_rejects_indefinite():
    with pytest.raises(ValueError, match="not positive semidefinite"):
        qmath.sqrt_psd(np.diag([1.0, 1.0, 1.0, -1e-6]))
    # within the clamp band the negative part is treated as roundoff
    s = qmath.sqrt_psd(np.diag([1.0, 1.0, 1.0, -1e-11]))
    assert s[3, 3] == 0.0


def test_trace_norm_values_and_oracle():
    assert abs(qmath.trace_norm(np.diag([3.0, -2.0])) - 5.0) < 1e-14
    assert abs(qmath.trace_norm([[0.0, 1.0], [1.0, 0.0]]) - 2.0) < 1e-14
    rng = np.random.default_rng(6)
    for _ in range(30):
        a = _random_hermitian(rng, 4)
        expected = float(np.sum(np.abs(np.linalg.eigvalsh(a))))
        assert abs(qmath.trace_norm(a) - expected) < 1e-12
