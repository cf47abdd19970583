"""End-to-end acceptance checks, one criterion per test.

Every test prints a single verdict line and carries its measured numbers in
the assert message, so the transcript documents each guarantee on its own.
Two criteria state requirements the modeled dynamics cannot meet at the
requested parameters; those tests verify everything attainable first and
then fail honestly with the blocking numbers.
"""

import hashlib

import numpy as np

from noisypair import cli, decay, dynamics, entanglement, nonmarkov, qmath

from conftest import (
    random_channel_pair,
    random_density_matrix,
    random_noe_state,
    random_pure_state,
)


def _report(num: int, slug: str, ok: bool, detail: str = ""):
    line = f"criterion {num:02d} {slug}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _concurrence_series(psi, h_values, one_sided=False):
    rho0 = dynamics.pure_to_state(psi)
    out = np.empty(len(h_values))
    for i, h in enumerate(h_values):
        ch = (
            dynamics.ChannelPair.one_sided(h)
            if one_sided
            else dynamics.ChannelPair(h, h)
        )
        out[i] = entanglement.concurrence(dynamics.evolve(rho0, ch))
    return out


def test_c01_solver_cross_check():
    grid = decay.TimeGrid(10.0, 10000)
    t = grid.times()
    worst = 0.0
    for lam in (0.01, 0.1, 1.0, 5.0):
        for delta in (0.0, 0.5, 2.0):
            params = decay.ReservoirParams(lam=lam, delta=delta)
            hv = decay.h_volterra(decay.correlation_lorentzian(params), grid)
            worst = max(worst, float(np.max(np.abs(hv - decay.h_analytic(params, t)))))
    _report(
        1,
        "solver_cross_check",
        worst < 1e-6,
        f"max |h_volterra - h_analytic| = {worst:.3e} over 12 parameter sets, tol 1e-6",
    )


def test_c02_map_matches_kraus_oracle():
    rng = np.random.default_rng(24001)
    worst = worst_trace = worst_neg = 0.0
    for _ in range(1000):
        rho = random_density_matrix(rng)
        pair = random_channel_pair(rng)
        out = dynamics.evolve(rho, pair)
        worst = max(
            worst, float(np.max(np.abs(out - dynamics.kraus_oracle(rho, pair))))
        )
        worst_trace = max(worst_trace, abs(float(np.trace(out).real) - 1.0))
        w, _ = qmath.eig_hermitian(out)
        worst_neg = max(worst_neg, max(0.0, -float(w[-1])))
    ok = worst < 1e-12 and worst_trace < 1e-12 and worst_neg < 1e-10
    _report(
        2,
        "map_matches_kraus_oracle",
        ok,
        f"1000 states: map gap {worst:.3e} (tol 1e-12), "
        f"trace drift {worst_trace:.3e}, negativity {worst_neg:.3e}",
    )


def test_c03_one_sided_factorization():
    rng = np.random.default_rng(24003)
    worst = 0.0
    moduli = np.linspace(0.0, 1.0, 11)
    for _ in range(1000):
        psi = random_pure_state(rng)
        c0 = entanglement.concurrence_pure(psi)
        rho0 = dynamics.pure_to_state(psi)
        for m in moduli:
            h = complex(m * np.exp(2j * np.pi * rng.uniform()))
            c = entanglement.concurrence(
                dynamics.evolve(rho0, dynamics.ChannelPair.one_sided(h))
            )
            worst = max(worst, abs(c - entanglement.law_one_sided(c0, h)))
    _report(
        3,
        "one_sided_factorization",
        worst < 1e-9,
        f"1000 states x 11 moduli: worst residual {worst:.3e}, tol 1e-9",
    )


def test_c04_two_sided_pure_law():
    rng = np.random.default_rng(24004)
    worst = 0.0
    moduli = (0.1, 0.3, 0.5, 0.7, 0.9)
    checked = 0
    while checked < 40:
        psi = random_pure_state(rng)
        if entanglement.concurrence_pure(psi) <= 1e-6:
            continue
        checked += 1
        for ma in moduli:
            for mb in moduli:
                pair = dynamics.ChannelPair(
                    complex(ma * np.exp(2j * np.pi * rng.uniform())),
                    complex(mb * np.exp(2j * np.pi * rng.uniform())),
                )
                worst = max(worst, entanglement.law_two_sided_pure(psi, pair).residual)
    _report(
        4,
        "two_sided_pure_law",
        worst < 1e-8,
        f"40 states x 5x5 amplitude grid: worst residual {worst:.3e}, tol 1e-8",
    )


def test_c05_noe_product_law():
    rng = np.random.default_rng(24005)
    worst = worst_formula = 0.0
    for _ in range(1000):
        state = random_noe_state(rng)
        pair = random_channel_pair(rng)
        c = entanglement.concurrence(dynamics.evolve(state.embed(), pair))
        worst = max(worst, abs(c - entanglement.law_two_sided_noe(state, pair)))
        worst_formula = max(
            worst_formula, abs(state.initial_concurrence() - 2.0 * abs(state.z))
        )
    ok = worst < 1e-9 and worst_formula < 1e-12
    _report(
        5,
        "noe_product_law",
        ok,
        f"1000 states: worst law residual {worst:.3e} (tol 1e-9), "
        f"closed form vs 2|z| {worst_formula:.3e} (tol 1e-12)",
    )


def test_c06_sudden_death_and_revival():
    grid = decay.TimeGrid(50.0, 10000)
    h = decay.h_analytic(decay.ReservoirParams(lam=0.01), grid.times())

    lopsided = entanglement.detect_esd(
        _concurrence_series(dynamics.phi_asym(0.9), h), grid.dt
    )
    assert len(lopsided.intervals) == 1, lopsided
    death = lopsided.intervals[0]
    assert 8.8 < death.t_start < 8.9, death

    balanced = entanglement.detect_esd(
        _concurrence_series(dynamics.bell_psi(), h), grid.dt
    )
    assert balanced.intervals == [], balanced

    revived = any(iv.revives for iv in lopsided.intervals)
    _report(
        6,
        "sudden_death_and_revival",
        revived,
        f"sudden death at t = {death.t_start:.3f} and the balanced state shows "
        "only discrete zeros, but no revival follows: it would need the "
        "envelope to recross sqrt(2/3) = 0.81650, and after collapse |h| "
        "only reaches 0.80035 near t = 44.5",
    )


def test_c07_backflow_measure():
    wide = nonmarkov.measure_backflow(
        decay.ReservoirParams(lam=5.0), decay.TimeGrid(10.0, 10000)
    )
    assert abs(wide.n) < 1e-9, wide.n
    assert abs(wide.n - wide.n_trapezoid) < 1e-6

    narrow = nonmarkov.measure_backflow(
        decay.ReservoirParams(lam=0.01), decay.TimeGrid(10.0, 10000)
    )
    assert abs(narrow.n - narrow.n_trapezoid) < 1e-6
    # frozen value at this exact grid; both estimator routes agree it is zero
    assert abs(narrow.n - 0.0) < 1e-12

    _report(
        7,
        "backflow_measure",
        narrow.n > 0.1,
        f"wide reservoir gives {wide.n!r} and both estimators agree, but the "
        f"narrow-reservoir measure over [0, 10] is {narrow.n!r}, not > 0.1: "
        "the first distinguishability rise starts near t = 23.27, outside "
        "the window (over [0, 100] the measure reaches 1.44088)",
    )


def test_c08_trace_distance_anchor():
    pair = (nonmarkov.qubit_plus(), nonmarkov.qubit_minus())
    grid = decay.TimeGrid(10.0, 2000)
    worst = 0.0
    for lam, delta in [(0.1, 0.0), (0.1, 2.0), (1.0, 0.5), (5.0, 0.0), (0.01, 0.0)]:
        h = decay.h_analytic(decay.ReservoirParams(lam=lam, delta=delta), grid.times())
        d = nonmarkov.distance_series(pair, h)
        worst = max(worst, float(np.max(np.abs(d - np.abs(h)))))
    _report(
        8,
        "trace_distance_anchor",
        worst < 1e-10,
        f"max |D - |h|| = {worst:.3e} over 5 parameter sets, tol 1e-10",
    )


def test_c09_entanglement_preservation():
    grid = decay.TimeGrid(10.0, 10000)
    h = decay.h_analytic(decay.ReservoirParams(lam=0.01, delta=0.5), grid.times())
    c = _concurrence_series(dynamics.bell_psi(), h, one_sided=True)
    min_c = float(np.min(c))
    min_h = float(np.min(np.abs(h)))
    gap = abs(min_c - min_h)
    floor = 0.96224413  # frozen: the interior minimum of the detuned envelope
    ok = gap < 1e-9 and min_c > floor and min_h > floor
    _report(
        9,
        "entanglement_preservation",
        ok,
        f"min concurrence {min_c:.12f} vs min |h| {min_h:.12f} "
        f"(gap {gap:.3e}, tol 1e-9), both above frozen floor {floor}",
    )


def test_c10_deterministic_output(tmp_path):
    grid = decay.TimeGrid(10.0, 500)
    first = cli.run_figure1(grid, tmp_path / "one")
    second = cli.run_figure1(grid, tmp_path / "two")
    digests = []
    identical = True
    for a, b in zip(first, second):
        da = hashlib.sha256(a.read_bytes()).hexdigest()
        db = hashlib.sha256(b.read_bytes()).hexdigest()
        identical = identical and da == db
        digests.append(da[:8])
    _report(
        10,
        "deterministic_output",
        identical and len(first) == 4,
        f"4 trajectory files, repeated run byte-identical, digests {digests}",
    )
