"""Dense Hermitian numerics for the 2x2 and 4x4 matrices used everywhere else.

Eigendecomposition is done by cyclic complex Jacobi rotations.  At dimension
<= 4 a handful of sweeps reaches machine precision and every rotation is
unconditionally stable, so robustness wins over asymptotic cleverness.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_CLAMP = 1e-10

_SUPPORTED_DIMS = (2, 4)
_MAX_SWEEPS = 60


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in _SUPPORTED_DIMS:
        raise ValueError(
            f"supported dimensions are {_SUPPORTED_DIMS}, got {a.shape[0]}"
        )
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermiticity_defect(m) -> float:
    """Largest absolute element of m - m^H; zero for exactly Hermitian input."""
    a = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T)))


def ensure_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity within tol and return the symmetrized matrix."""
    a = _as_square(m)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise ValueError(
            f"matrix is not Hermitian: max |m - m^H| element is {defect:.3e}"
            f" (tolerance {tol:.1e})"
        )
    return 0.5 * (a + a.conj().T)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a Hermitian matrix via Jacobi sweeps.

    Parameters
    ----------
    m : array_like
        Hermitian matrix, dimension 2 or 4.
    tol : float
        Allowed Hermiticity defect of the input.

    Returns
    -------
    w : ndarray
        Real eigenvalues in descending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors,
        so m == v @ diag(w) @ v^H up to roundoff.
    """
    a = ensure_hermitian(m, tol)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    # threshold is scaled with the matrix so large-norm input still terminates
    target = 1e-14 * max(1.0, float(np.linalg.norm(a)))
    for _ in range(_MAX_SWEEPS):
        if _offdiag_norm(a) < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                ph = apq / r
                diff = a[p, p].real - a[q, q].real
                if diff == 0.0:
                    t = 1.0
                else:
                    tau = diff / (2.0 * r)
                    t = np.sign(tau) / (abs(tau) + np.hypot(tau, 1.0))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # a <- U^H a U with U the rotation in the (p, q) plane
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp + (s * np.conj(ph)) * cq
                a[:, q] = -(s * ph) * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp + (s * ph) * rq
                a[q, :] = -(s * np.conj(ph)) * rp + c * rq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + (s * np.conj(ph)) * vq
                v[:, q] = -(s * ph) * vp + c * vq
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def sqrt_psd(m, tol: float = HERMITIAN_TOL, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-clamp, 0) are treated as roundoff and clamped to zero;
    anything below -clamp signals a non-physical state and raises.
    """
    w, v = eig_hermitian(m, tol)
    if w[-1] < -clamp:
        raise ValueError(
            f"matrix is not positive semidefinite: min eigenvalue {w[-1]:.3e}"
            f" is below -{clamp:.1e}"
        )
    # eigenvalues at roundoff scale are noise on a rank-deficient input, and
    # the square root would amplify them to sqrt(eps); zero them instead
    w = np.where(w < 1e-14 * max(float(w[0]), 0.0), 0.0, np.clip(w, 0.0, None))
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def trace_norm(m, tol: float = HERMITIAN_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = eig_hermitian(m, tol)
    return float(np.sum(np.abs(w)))
