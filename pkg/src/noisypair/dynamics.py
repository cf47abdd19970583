"""Two-qubit dynamics under independent local vacuum decay channels.

Basis ordering throughout: |ee>, |eg>, |ge>, |gg> (first letter: qubit A).
Each channel is fully described by its complex decay amplitude h at the time
of interest, so states are propagated by closed-form element maps instead of
time stepping.  ``kraus_oracle`` rebuilds the same map from an explicit Kraus
decomposition and exists as an independent cross-check; it must never replace
``evolve`` in library code.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import qmath

AMPLITUDE_TOL = 1e-9  # slack on |h| <= 1 for roundoff from upstream solvers
NORM_TOL = 1e-12

# test hook: when set, evolve() perturbs one output element so that the
# verification suite can prove it catches a corrupted map
_FAULT: tuple[int, int, complex] | None = None


@dataclass(frozen=True)
class ChannelPair:
    """Decay amplitudes of the two local channels at a common time."""

    h_a: complex
    h_b: complex = 1.0 + 0.0j

    def __post_init__(self):
        for name, h in (("h_a", self.h_a), ("h_b", self.h_b)):
            hc = complex(h)
            if not (math.isfinite(hc.real) and math.isfinite(hc.imag)):
                raise ValueError(f"{name} must be finite")
            if abs(hc) > 1.0 + AMPLITUDE_TOL:
                raise ValueError(f"{name} has modulus {abs(hc):.6f} > 1")

    @classmethod
    def one_sided(cls, h_a: complex) -> "ChannelPair":
        """Channel acting on qubit A only; B evolves trivially."""
        return cls(h_a, 1.0 + 0.0j)


def bell_psi() -> np.ndarray:
    """(|eg> + |ge>)/sqrt(2), one shared excitation."""
    return np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2.0)


def bell_phi() -> np.ndarray:
    """(|ee> + |gg>)/sqrt(2), double excitation component."""
    return np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def phi_asym(p: float) -> np.ndarray:
    """sqrt(p)|ee> + sqrt(1-p)|gg>."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"weight must be in [0, 1], got {p}")
    return np.array([np.sqrt(p), 0.0, 0.0, np.sqrt(1.0 - p)], dtype=complex)


def pure_to_state(psi) -> np.ndarray:
    """Density matrix |psi><psi| of a normalized four-amplitude vector."""
    c = np.asarray(psi, dtype=complex).reshape(-1)
    if c.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {c.shape}")
    norm = float(np.sum(np.abs(c) ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized: sum |c_i|^2 = {norm:.12f}")
    return np.outer(c, c.conj())


def assert_density_matrix(rho, psd: bool = True, label: str = "state") -> np.ndarray:
    """Validate Hermiticity, unit trace and (optionally) positivity."""
    r = qmath.ensure_hermitian(rho)
    tr = float(np.trace(r).real)
    if abs(tr - 1.0) > NORM_TOL:
        raise ValueError(f"{label} has trace {tr:.12f}, expected 1")
    if psd:
        w, _ = qmath.eig_hermitian(r)
        if w[-1] < -qmath.PSD_CLAMP:
            raise ValueError(f"{label} has negative eigenvalue {w[-1]:.3e}")
    return r


def _check_input(rho: np.ndarray):
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got {rho.shape}")
    defect = qmath.hermiticity_defect(rho)
    if defect > qmath.HERMITIAN_TOL:
        raise ValueError(f"input state not Hermitian, defect {defect:.3e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > NORM_TOL:
        raise ValueError(f"input state has trace {tr:.12f}, expected 1")
    dmin = float(np.min(np.diag(rho).real))
    if dmin < -qmath.PSD_CLAMP:
        raise ValueError(f"input state has negative population {dmin:.3e}")


def evolve(rho0, ch: ChannelPair, check: bool = True) -> np.ndarray:
    """Propagate a two-qubit state to the time where the channels have
    amplitudes ``ch``.

    The map factorizes over the qubits, so every output element is a closed
    expression in the inputs; populations leak down the excitation ladder
    while coherences pick up channel amplitudes.  Output invariants
    (Hermiticity, unit trace, nonnegative populations) are enforced with
    ``check=True``; full positivity is an eigenvalue statement and is
    exercised by the verification suites instead of on every call.
    """
    r = np.asarray(rho0, dtype=complex)
    if check:
        _check_input(r)
    ha, hb = complex(ch.h_a), complex(ch.h_b)
    pa = min(abs(ha) ** 2, 1.0)
    pb = min(abs(hb) ** 2, 1.0)
    out = np.empty((4, 4), dtype=complex)
    out[0, 0] = r[0, 0] * pa * pb
    out[1, 1] = pa * (r[1, 1] + r[0, 0] * (1.0 - pb))
    out[2, 2] = pb * (r[2, 2] + r[0, 0] * (1.0 - pa))
    out[3, 3] = 1.0 - out[0, 0] - out[1, 1] - out[2, 2]
    out[0, 1] = r[0, 1] * pa * hb
    out[0, 2] = r[0, 2] * ha * pb
    out[0, 3] = r[0, 3] * ha * hb
    # the (eg)(ge) coherence carries the B amplitude through the bra side,
    # hence the conjugate; pinned against the Kraus oracle
    out[1, 2] = r[1, 2] * ha * np.conj(hb)
    out[1, 3] = ha * (r[1, 3] + r[0, 2] * (1.0 - pb))
    out[2, 3] = hb * (r[2, 3] + r[0, 1] * (1.0 - pa))
    for i in range(4):
        out[i, i] = out[i, i].real
        for j in range(i + 1, 4):
            out[j, i] = np.conj(out[i, j])
    if _FAULT is not None:
        i, j, delta = _FAULT
        out[i, j] += delta
    if check:
        tr = float(np.trace(out).real)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"evolved state trace drifted to {tr:.12f}")
        dmin = float(np.min(np.diag(out).real))
        if dmin < -qmath.PSD_CLAMP:
            raise ValueError(f"evolved state population went negative: {dmin:.3e}")
    return out


def _kraus_ops(h: complex) -> tuple[np.ndarray, np.ndarray]:
    # K0 keeps the excitation with amplitude h (phase included),
    # K1 drops it with the leftover weight
    k0 = np.array([[h, 0.0], [0.0, 1.0]], dtype=complex)
    k1 = np.array(
        [[0.0, 0.0], [np.sqrt(max(0.0, 1.0 - abs(h) ** 2)), 0.0]], dtype=complex
    )
    return k0, k1


def kraus_oracle(rho0, ch: ChannelPair) -> np.ndarray:
    """Same channel action built from an explicit Kraus decomposition.

    Test oracle only: kept deliberately independent of evolve() so the two
    routes can be compared element by element.
    """
    r = np.asarray(rho0, dtype=complex)
    if r.shape != (4, 4):
        raise ValueError(f"expected a 4x4 state, got {r.shape}")
    out = np.zeros((4, 4), dtype=complex)
    for ka in _kraus_ops(complex(ch.h_a)):
        for kb in _kraus_ops(complex(ch.h_b)):
            k = np.kron(ka, kb)
            out += k @ r @ k.conj().T
    return out


@contextmanager
def fault_injection(element: tuple[int, int] = (0, 3), delta: complex = 1e-3):
    """Corrupt one element of every evolved state while the context is open.

    Exists so the verification suite can demonstrate that a broken map is
    reported rather than silently accepted.
    """
    global _FAULT
    if _FAULT is not None:
        raise RuntimeError("fault injection already active")
    _FAULT = (element[0], element[1], complex(delta))
    try:
        yield
    finally:
        _FAULT = None
