"""Concurrence, its factorized evolution laws, and sudden-death detection.

The direct route is always Wootters' formula evaluated through Hermitian
eigenproblems.  The laws predict the same number from initial data and the
channel amplitudes alone; every law here is checked against the direct route
in the test suite, and trajectory reports carry both so a disagreement is
visible rather than averaged away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, qmath

ZERO_CONCURRENCE = 1e-12  # below this a sampled concurrence counts as zero

# sigma_y (x) sigma_y is real in this basis: antidiagonal (-1, 1, 1, -1)
_SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def spin_flipped(rho) -> np.ndarray:
    """(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)."""
    r = np.asarray(rho, dtype=complex)
    return _SPIN_FLIP @ r.conj() @ _SPIN_FLIP


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    Uses the Hermitian form R = sqrt(sqrt(rho) rho~ sqrt(rho)): the
    eigenvalues of R are real by construction, so no complex eigenproblem of
    a non-normal product is ever needed.
    """
    r = dynamics.assert_density_matrix(rho, psd=False, label="concurrence input")
    s = qmath.sqrt_psd(r)  # rejects states that are non-PSD beyond tolerance
    m = s @ spin_flipped(r) @ s
    w, _ = qmath.eig_hermitian(0.5 * (m + m.conj().T))
    # rank-deficient states put exact zeros here; without a floor the square
    # root would turn eigenvalue noise into sqrt-of-noise errors.  The floor
    # is absolute because the input has unit trace, so the construction
    # noise is a fixed eps-level quantity, not one relative to the largest
    # eigenvalue
    w = np.where(w < 1e-14, 0.0, w)
    lam = np.sqrt(np.clip(w, 0.0, None))  # descending
    c = float(lam[0] - lam[1] - lam[2] - lam[3])
    return min(max(c, 0.0), 1.0)


def concurrence_pure(psi) -> float:
    """Closed form 2|c1*c4 - c2*c3| for a normalized pure state."""
    c = np.asarray(psi, dtype=complex).reshape(-1)
    if c.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {c.shape}")
    return float(min(2.0 * abs(c[0] * c[3] - c[1] * c[2]), 1.0))


def law_one_sided(c0: float, h: complex) -> float:
    """Concurrence after one local channel: initial value times |h|."""
    if not 0.0 <= c0 <= 1.0 + 1e-12:
        raise ValueError(f"initial concurrence must be in [0, 1], got {c0}")
    return min(c0, 1.0) * abs(complex(h))


@dataclass(frozen=True)
class LawReport:
    """Direct concurrence next to its law prediction at one time point.

    ``q`` is the pre-clamp law value and ``x`` the channel-loss correction
    factor; both are nan when the law does not apply (vanishing initial
    concurrence makes the correction undefined).
    """

    t: float
    c_direct: float
    c_law: float
    q: float
    x: float
    residual: float
    law_applicable: bool = True


def pure_law_terms(psi, ch: dynamics.ChannelPair) -> tuple[float, float, bool]:
    """(q, x, applicable) of the two-sided pure-state law, without evolving.

    q is the pre-clamp law value C(0) |h_A| |h_B| x and
    x = 1 - (|c1|^2 / |c2 c3 - c1 c4|) sqrt((1 - |h_A|^2)(1 - |h_B|^2)).
    x < 0 is exactly the sudden-death region.  When the initial concurrence
    vanishes the correction is undefined and applicable comes back False.
    """
    c = np.asarray(psi, dtype=complex).reshape(-1)
    if c.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {c.shape}")
    det = c[1] * c[2] - c[0] * c[3]
    c0 = 2.0 * abs(det)
    if c0 < ZERO_CONCURRENCE:
        return math.nan, math.nan, False
    ha, hb = abs(complex(ch.h_a)), abs(complex(ch.h_b))
    xi = (1.0 - min(ha * ha, 1.0)) * (1.0 - min(hb * hb, 1.0))
    x = 1.0 - (abs(c[0]) ** 2 / abs(det)) * math.sqrt(max(xi, 0.0))
    return c0 * ha * hb * x, x, True


def law_two_sided_pure(psi, ch: dynamics.ChannelPair, t: float = 0.0) -> LawReport:
    """Factorized concurrence law for a pure initial state under both channels,
    reported next to the direct Wootters value of the evolved state."""
    c = np.asarray(psi, dtype=complex).reshape(-1)
    rho_t = dynamics.evolve(dynamics.pure_to_state(c), ch)
    c_direct = concurrence(rho_t)
    q, x, applicable = pure_law_terms(c, ch)
    if not applicable:
        # local channels cannot create entanglement, so falling back to the
        # direct value is exact here
        return LawReport(t, c_direct, c_direct, q, x, 0.0, False)
    c_law = max(0.0, q)
    return LawReport(t, c_direct, c_law, q, x, abs(c_direct - c_law))


@dataclass(frozen=True)
class NOEMixedState:
    """Mixed state with at most one excitation shared between the qubits.

    The double-excitation row and column vanish; populations b (A excited),
    c (B excited), d (ground) sum to one, with coherences z between the
    single-excitation levels and e, f against the ground state.
    """

    b: float
    c: float
    d: float
    z: complex = 0.0 + 0.0j
    e: complex = 0.0 + 0.0j
    f: complex = 0.0 + 0.0j

    def __post_init__(self):
        for name, p in (("b", self.b), ("c", self.c), ("d", self.d)):
            if not (np.isfinite(p) and p >= -1e-12):
                raise ValueError(f"population {name} must be nonnegative, got {p}")
        if abs(self.b + self.c + self.d - 1.0) > dynamics.NORM_TOL:
            raise ValueError(
                f"populations must sum to 1, got {self.b + self.c + self.d:.12f}"
            )
        w, _ = qmath.eig_hermitian(self.embed())
        if w[-1] < -qmath.PSD_CLAMP:
            raise ValueError(f"coherences violate positivity: min eig {w[-1]:.3e}")

    def embed(self) -> np.ndarray:
        """The full 4x4 density matrix."""
        z, e, f = complex(self.z), complex(self.e), complex(self.f)
        return np.array(
            [
                [0.0, 0.0, 0.0, 0.0],
                [0.0, self.b, z, e],
                [0.0, np.conj(z), self.c, f],
                [0.0, np.conj(e), np.conj(f), self.d],
            ],
            dtype=complex,
        )

    def initial_concurrence(self) -> float:
        """Closed form; equals 2|z| on any valid state of this family."""
        root = math.sqrt(max(self.b * self.c, 0.0))
        return max(0.0, root + abs(self.z) - abs(root - abs(self.z)))


def law_two_sided_noe(state: NOEMixedState, ch: dynamics.ChannelPair) -> float:
    """For single-excitation states the concurrence just scales by |h_A h_B|."""
    return state.initial_concurrence() * abs(complex(ch.h_a)) * abs(complex(ch.h_b))


@dataclass(frozen=True)
class ZeroInterval:
    """Maximal run of (numerically) vanishing concurrence spanning > 2 steps."""

    t_start: float
    t_end: float
    revives: bool
    revival_time: float | None = None


@dataclass(frozen=True)
class EsdReport:
    intervals: list[ZeroInterval] = field(default_factory=list)
    discrete_zeros: list[float] = field(default_factory=list)

    @property
    def revival_times(self) -> list[float]:
        return [iv.revival_time for iv in self.intervals if iv.revives]


def detect_esd(
    c_series, dt: float, threshold: float = ZERO_CONCURRENCE
) -> EsdReport:
    """Classify the zeros of a uniformly sampled concurrence trajectory.

    Runs of samples below threshold that span more than two grid steps count
    as sudden-death intervals; shorter runs are discrete touch points (the
    kind a transversal zero of the amplitude produces).  An interval that
    ends before the trajectory does is tagged with its revival time.
    """
    c = np.asarray(c_series, dtype=float)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("need a 1-d series with at least two samples")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    dead = c < threshold
    intervals: list[ZeroInterval] = []
    discrete: list[float] = []
    i = 0
    n = c.size
    while i < n:
        if not dead[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and dead[j + 1]:
            j += 1
        if j - i > 2:
            revives = j + 1 < n
            intervals.append(
                ZeroInterval(
                    t_start=i * dt,
                    t_end=j * dt,
                    revives=revives,
                    revival_time=(j + 1) * dt if revives else None,
                )
            )
        else:
            k = i + int(np.argmin(c[i : j + 1]))
            discrete.append(k * dt)
        i = j + 1
    return EsdReport(intervals=intervals, discrete_zeros=discrete)
