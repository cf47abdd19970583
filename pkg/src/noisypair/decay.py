"""Excited-state decay amplitude h(t) for a qubit coupled to a structured
vacuum reservoir.

Two independent routes are provided on purpose and must never be merged:

* ``h_analytic`` evaluates the closed form valid for the Lorentzian reservoir
  (spectral width ``lam``, peak detuning ``delta``, Markovian rate ``gamma0``),
* ``h_volterra`` integrates the memory-kernel equation of motion

      dh/dt = -\\int_0^t f(t - t1) h(t1) dt1,    h(0) = 1

  by trapezoidal quadrature of the memory integral and a Heun
  predictor-corrector step, for any stationary kernel family.

All rates and times are expressed in units of gamma0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# below this value of |d|*t the closed form switches to its small-d Taylor
# branch; the two branches agree to ~1e-12 in the overlap
_SMALL_ROOT_CUTOFF = 1e-6


class ConvergenceWarning(UserWarning):
    """Raised as a warning when halving the step changes the solution too much."""


@dataclass(frozen=True)
class ReservoirParams:
    """Lorentzian reservoir: width lam, detuning delta, Markovian rate gamma0."""

    lam: float
    delta: float = 0.0
    gamma0: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0.0):
            raise ValueError(f"spectral width must be positive, got {self.lam}")
        if not np.isfinite(self.delta):
            raise ValueError("detuning must be finite")
        if not (np.isfinite(self.gamma0) and self.gamma0 > 0.0):
            raise ValueError(f"gamma0 must be positive, got {self.gamma0}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, t_max] with n_steps intervals (n_steps + 1 samples)."""

    t_max: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.n_steps < 2:
            raise ValueError(f"n_steps must be at least 2, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


@dataclass(frozen=True)
class CorrelationKernel:
    """Stationary reservoir correlation function f(tau) for tau >= 0.

    Families:
      "lorentzian": (gamma0 * lam / 2) * exp(-(lam - i*delta) * tau)
      "zero":       identically zero (decoupled reservoir)

    New families plug in here; the Volterra solver only ever needs f sampled
    at the grid offsets.
    """

    family: str
    params: ReservoirParams | None = None

    def __post_init__(self):
        if self.family not in ("lorentzian", "zero"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "lorentzian" and self.params is None:
            raise ValueError("lorentzian kernel needs reservoir parameters")

    def evaluate(self, tau) -> np.ndarray:
        """Kernel values at offsets tau >= 0."""
        t = np.asarray(tau, dtype=float)
        if np.any(t < 0.0):
            raise ValueError("kernel offsets must be nonnegative")
        if self.family == "zero":
            return np.zeros(t.shape, dtype=complex)
        p = self.params
        return 0.5 * p.gamma0 * p.lam * np.exp(-(p.lam - 1j * p.delta) * t)


def correlation_lorentzian(params: ReservoirParams) -> CorrelationKernel:
    return CorrelationKernel("lorentzian", params)


def correlation_zero() -> CorrelationKernel:
    return CorrelationKernel("zero")


def _complex_root(params: ReservoirParams) -> tuple[complex, complex]:
    lam_c = params.lam - 1j * params.delta
    # principal square root; the closed form is even in d so the branch
    # choice cannot matter
    d = np.sqrt(complex(lam_c * lam_c - 2.0 * params.gamma0 * params.lam))
    return lam_c, d


def h_analytic(params: ReservoirParams, t):
    """Closed-form decay amplitude at time(s) t >= 0.

    Scalar t gives a complex scalar, array t a complex array.  The amplitude
    satisfies h(0) = 1 and |h(t)| <= 1 for all physical parameters.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0):
        raise ValueError("time must be nonnegative")
    scalar = tt.ndim == 0
    tt = np.atleast_1d(tt)
    lam_c, d = _complex_root(params)
    z = 0.5 * d * tt
    h = np.empty(tt.shape, dtype=complex)

    small = np.abs(d) * tt < _SMALL_ROOT_CUTOFF
    if np.any(small):
        # quadratic Taylor branch, exact at d = 0:
        # h -> e^{-lam_c t/2} (1 + lam_c t / 2)
        ts, zs = tt[small], z[small]
        h[small] = np.exp(-0.5 * lam_c * ts) * (
            1.0 + 0.5 * zs * zs + 0.5 * lam_c * ts * (1.0 + zs * zs / 6.0)
        )
    mid = ~small & (np.abs(z) < 0.1)
    if np.any(mid):
        ts, zs = tt[mid], z[mid]
        h[mid] = np.exp(-0.5 * lam_c * ts) * (
            np.cosh(zs) + 0.5 * lam_c * ts * (np.sinh(zs) / zs)
        )
    big = ~small & ~mid
    if np.any(big):
        # sum-of-exponentials form; both rates have nonpositive real part so
        # nothing overflows at large t
        ts = tt[big]
        ratio = lam_c / d
        h[big] = 0.5 * (1.0 + ratio) * np.exp(0.5 * (d - lam_c) * ts) + 0.5 * (
            1.0 - ratio
        ) * np.exp(-0.5 * (d + lam_c) * ts)
    return complex(h[0]) if scalar else h


def _volterra_solve(kernel: CorrelationKernel, grid: TimeGrid) -> np.ndarray:
    n = grid.n_steps
    dt = grid.dt
    f = kernel.evaluate(dt * np.arange(n + 1))
    frev = f[::-1].copy()  # frev[n - k + j] == f[k - j], keeps the dot contiguous
    h = np.empty(n + 1, dtype=complex)
    h[0] = 1.0
    for k in range(n):
        if k == 0:
            gk = 0.0j
        else:
            s = np.dot(frev[n - k :], h[: k + 1])
            gk = -dt * (s - 0.5 * (f[k] * h[0] + f[0] * h[k]))
        hp = h[k] + dt * gk  # Heun predictor
        h[k + 1] = hp
        s = np.dot(frev[n - k - 1 :], h[: k + 2])
        gk1 = -dt * (s - 0.5 * (f[k + 1] * h[0] + f[0] * hp))
        h[k + 1] = h[k] + 0.5 * dt * (gk + gk1)
    return h


def h_volterra(
    kernel: CorrelationKernel,
    grid: TimeGrid,
    convergence_tol: float | None = None,
) -> np.ndarray:
    """Decay amplitude sampled on the grid by direct integration.

    With ``convergence_tol`` set, the equation is re-solved at half the step
    and a ConvergenceWarning is emitted if the solutions differ by more than
    the tolerance at any shared node.
    """
    h = _volterra_solve(kernel, grid)
    if convergence_tol is not None:
        fine = _volterra_solve(kernel, TimeGrid(grid.t_max, 2 * grid.n_steps))
        err = float(np.max(np.abs(h - fine[::2])))
        if err > convergence_tol:
            warnings.warn(
                f"step {grid.dt:.3e} looks too coarse: halving it moves the"
                f" solution by {err:.3e} (tolerance {convergence_tol:.1e})",
                ConvergenceWarning,
                stacklevel=2,
            )
    return h
