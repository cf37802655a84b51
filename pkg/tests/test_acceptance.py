"""Release gate: ten numbered criteria, one test and one verdict line each.

Every tolerance here is pinned. A red criterion means the library regressed
(or never met the bar), not that a tolerance needs adjusting. The regression
set covers the free Robin family, the Dirichlet square well, a hidden n=2
block mixture, and a dense non-diagonal n=2 potential.
"""

import numpy as np
import pytest

from conftest import (rand_unitary, random_valid_pair, scalar_well,
                      shooting_well_kappas, two_channel_mixture)
from halfscat import (asymptotic_model, conjugate_potential,
                      derivative_identity_check, detJ_smallk_order,
                      dirichlet_pair, find_bound_states, jost_matrix,
                      jost_solution_on, levinson_dirichlet_convention,
                      levinson_verify, mu_from_s_zero, neumann_pair,
                      pair_from_angles, physical_solution, piecewise_constant,
                      regular_solution, s_matrix, transform_pair,
                      validate_pair, zero_potential)
from halfscat import dagger_wronskian
from halfscat.matkernel import row_sum_norm

WELL = scalar_well(4.0)
ROBIN_WELL_BP = pair_from_angles([np.pi / 4])


def _verdict(num, ok, detail):
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {num:02d}: {detail}"


def _dense_coupled():
    rng = np.random.default_rng(31)
    w = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    v = (w + w.conj().T) / 2.0 - 2.0 * np.eye(2)
    pot = piecewise_constant([0.0, 1.0], [v])
    return pot, random_valid_pair(rng, 2)


@pytest.fixture(scope="module")
def regression_set():
    probs = []
    for theta in (np.pi / 6, np.pi / 4, np.pi / 3, 2 * np.pi / 3, 3 * np.pi / 4):
        probs.append((f"robin_free_{theta:.4f}",
                      zero_potential(1), pair_from_angles([theta])))
    probs.append(("dirichlet_well", WELL, dirichlet_pair(1)))
    pot2, bp2, _ = two_channel_mixture()
    probs.append(("block_mixture", pot2, bp2))
    pot3, bp3 = _dense_coupled()
    probs.append(("dense_coupled", pot3, bp3))
    return probs


def test_criterion_01_zero_potential_exactness():
    rng = np.random.default_rng(101)
    worst = 0.0
    for trial in range(20):
        n = trial % 4 + 1
        bp = random_valid_pair(rng, n)
        pot = zero_potential(n)
        for k in (0.1, 1.0, 10.0, 1j, 2j):
            got = jost_matrix(pot, bp, k).J
            worst = max(worst, np.linalg.norm(got - (bp.B - 1j * k * bp.A)))
    _verdict(1, worst <= 1e-9,
             f"free Jost matrix vs B - ikA, worst {worst:.3e} (tol 1e-9)")


def test_criterion_02_unitarity_and_symmetry(regression_set):
    ks = np.geomspace(0.05, 50.0, 50)
    worst_u = worst_s = 0.0
    for name, pot, bp in regression_set:
        eye = np.eye(pot.n)
        for k in ks:
            sp = s_matrix(pot, bp, float(k)).S
            sm = s_matrix(pot, bp, -float(k)).S
            worst_u = max(worst_u, row_sum_norm(sp @ sp.conj().T - eye))
            worst_s = max(worst_s, row_sum_norm(sm - sp.conj().T))
    ok = worst_u <= 1e-8 and worst_s <= 1e-8
    _verdict(2, ok, f"unitarity {worst_u:.3e}, S(-k) vs S(k)^H {worst_s:.3e} "
                    "(tol 1e-8, 50-point grid in [0.05, 50])")


def test_criterion_03_robin_free_bound_state():
    worst = 0.0
    clean = True
    for theta in (np.pi / 6, np.pi / 4, np.pi / 3):
        states = find_bound_states(zero_potential(1), pair_from_angles([theta]))
        clean &= (len(states) == 1 and states[0].multiplicity == 1
                  and states[0].winding == 1)
        if states:
            worst = max(worst, abs(states[0].kappa - 1.0 / np.tan(theta)))
    for theta in (2 * np.pi / 3, 3 * np.pi / 4):
        clean &= find_bound_states(zero_potential(1),
                                   pair_from_angles([theta])) == []
    _verdict(3, clean and worst <= 1e-8,
             f"kappa = cot(theta) worst error {worst:.3e} (tol 1e-8), "
             "counts/multiplicities/windings exact")


def test_criterion_04_square_well_dirichlet_count():
    oracle = sorted(shooting_well_kappas())
    states = find_bound_states(WELL, dirichlet_pair(1))
    ok = len(states) == len(oracle) == 2
    worst = 0.0
    if ok:
        worst = max(abs(s.kappa - w) for s, w in zip(states, oracle))
        ok = worst <= 1e-6 and all(s.multiplicity == 1 for s in states)
    _verdict(4, ok, f"2 levels vs shooting oracle, worst {worst:.3e} (tol 1e-6)")


def test_criterion_05_levinson_integer_identity(regression_set):
    worst = 0.0
    for name, pot, bp in regression_set:
        rep = levinson_verify(pot, bp)
        worst = max(worst, abs(rep.identity_residual) / np.pi)
    rep = levinson_verify(WELL, dirichlet_pair(1))
    delta = levinson_dirichlet_convention(rep)
    dres = abs(delta - np.pi * (rep.N_total + rep.mu / 2.0)) / np.pi
    ok = worst <= 1e-3 and dres <= 1e-3
    _verdict(5, ok, f"identity residual/pi worst {worst:.3e}, Dirichlet "
                    f"phase form {dres:.3e} (tol 1e-3)")


def test_criterion_06_high_energy_order():
    ks = 2.0 ** np.arange(4, 9)
    worst_model = np.inf
    worst_first = np.inf
    for pot, bp in ((WELL, dirichlet_pair(1)),
                    (WELL, ROBIN_WELL_BP),
                    _dense_coupled()):
        mod = asymptotic_model(pot, bp)
        r_model, r_first = [], []
        for k in ks:
            s = s_matrix(pot, bp, float(k)).S
            r_model.append(row_sum_norm(s - mod.S_inf - mod.G(k) / (1j * k)))
            r_first.append(row_sum_norm(s - mod.S_inf))
        worst_model = min(worst_model,
                          -np.polyfit(np.log(ks), np.log(r_model), 1)[0])
        worst_first = min(worst_first,
                          -np.polyfit(np.log(ks), np.log(r_first), 1)[0])
    ok = worst_model >= 1.9 and worst_first >= 0.9
    _verdict(6, ok, f"residual slopes over k = 2^4..2^8: model {worst_model:.3f} "
                    f"(>= 1.9), first-order {worst_first:.3f} (>= 0.9)")


def test_criterion_07_detJ_orders():
    # large k: |det J| grows like k^(n_M + n_N); fit above the oscillatory
    # transient so the 1/k tails stay inside the 0.05 budget
    ks = 2.0 ** np.arange(7, 11)
    worst_hi = 0.0
    for pot, bp, order in ((zero_potential(4),
                            pair_from_angles([np.pi / 4, 2.0, np.pi / 2, np.pi]), 3),
                           (WELL, dirichlet_pair(1), 0),
                           (WELL, ROBIN_WELL_BP, 1)):
        mags = [abs(np.linalg.det(jost_matrix(pot, bp, float(k)).J)) for k in ks]
        slope = np.polyfit(np.log(ks), np.log(mags), 1)[0]
        worst_hi = max(worst_hi, abs(slope - order))
    # small k: |det J| vanishes like k^mu; mu also counts +1 eigenvalues of S(0)
    worst_lo = 0.0
    mu_ok = True
    for pot, bp, mu in ((zero_potential(1), neumann_pair(1), 1),
                        (WELL, dirichlet_pair(1), 0),
                        (scalar_well(0.25), dirichlet_pair(1), 1),
                        (scalar_well(2.25), dirichlet_pair(1), 1)):
        worst_lo = max(worst_lo, abs(detJ_smallk_order(pot, bp) - mu))
        mu_ok &= mu_from_s_zero(pot, bp) == mu
    ok = worst_hi <= 0.05 and worst_lo <= 0.05 and mu_ok
    _verdict(7, ok, f"log|det J| slope errors: large-k {worst_hi:.3f}, "
                    f"small-k {worst_lo:.3f} (tol 0.05), S(0) counts match")


def test_criterion_08_derivative_identity(regression_set):
    worst = 0.0
    checked = 0
    for name, pot, bp in regression_set:
        for st in find_bound_states(pot, bp):
            worst = max(worst, derivative_identity_check(pot, bp, st))
            checked += 1
    ok = checked >= 8 and worst <= 1e-4
    _verdict(8, ok, f"normalization identity at {checked} bound states, "
                    f"worst relative discrepancy {worst:.3e} (tol 1e-4)")


def test_criterion_09_covariance_and_equivalence():
    pot, bp = _dense_coupled()
    rng = np.random.default_rng(202)
    k_probe = (0.3, 1.7, 6.0)

    t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) + 3.0 * np.eye(2)
    bp_t = transform_pair(bp, right=t)
    worst_r = max(row_sum_norm(s_matrix(pot, bp_t, k).S - s_matrix(pot, bp, k).S)
                  for k in k_probe)
    st0 = find_bound_states(pot, bp)
    st1 = find_bound_states(pot, bp_t)
    spec_ok = (len(st0) == len(st1)
               and all(abs(a.kappa - b.kappa) <= 1e-9
                       and a.multiplicity == b.multiplicity
                       for a, b in zip(st0, st1)))
    rep0 = levinson_verify(pot, bp)
    rep1 = levinson_verify(pot, bp_t)
    rep_ok = (rep0.N_total == rep1.N_total and rep0.mu == rep1.mu
              and (rep0.n_M, rep0.n_D, rep0.n_N) == (rep1.n_M, rep1.n_D, rep1.n_N)
              and abs(rep0.phase_at_zero - rep1.phase_at_zero) <= 1e-9
              and abs(rep0.phase_at_infinity - rep1.phase_at_infinity) <= 1e-9)

    m0 = rand_unitary(rng, 2)
    bp_c = transform_pair(bp, unitary=m0)
    pot_c = conjugate_potential(pot, m0)
    worst_c = max(row_sum_norm(s_matrix(pot_c, bp_c, k).S
                               - m0.conj().T @ s_matrix(pot, bp, k).S @ m0)
                  for k in k_probe)

    # direct sum of a Dirichlet well channel and a free Robin channel
    vals = np.zeros((1, 2, 2), dtype=complex)
    vals[0, 0, 0] = -4.0
    pot_blk = piecewise_constant([0.0, np.pi], vals)
    bp_blk = validate_pair(np.diag([0.0, -np.sin(np.pi / 4)]).astype(complex),
                           np.diag([1.0, np.cos(np.pi / 4)]).astype(complex))
    worst_b = 0.0
    for k in k_probe:
        s_blk = s_matrix(pot_blk, bp_blk, k).S
        s_a = s_matrix(WELL, dirichlet_pair(1), k).S
        s_b = s_matrix(zero_potential(1), ROBIN_WELL_BP, k).S
        want = np.zeros((2, 2), dtype=complex)
        want[0, 0] = s_a[0, 0]
        want[1, 1] = s_b[0, 0]
        worst_b = max(worst_b, row_sum_norm(s_blk - want))

    ok = (worst_r <= 1e-9 and spec_ok and rep_ok
          and worst_c <= 1e-9 and worst_b <= 1e-9)
    _verdict(9, ok, f"right factor {worst_r:.3e}, unitary conjugation "
                    f"{worst_c:.3e}, block decoupling {worst_b:.3e} (tol 1e-9), "
                    "spectrum and phase report invariant")


def test_criterion_10_internal_consistency():
    worst_rep = worst_phys = worst_wron = 0.0
    for pot, bp in ((WELL, ROBIN_WELL_BP), _dense_coupled()):
        b = pot.support_end
        xs = np.array([0.0, 0.4 * b, 1.1 * b])
        for k in (0.6, 2.3):
            fp, fpp, err_p = jost_solution_on(pot, k, xs)
            fm, fmp, err_m = jost_solution_on(pot, -k, xs)
            jp = jost_matrix(pot, bp, k).J
            jm = jost_matrix(pot, bp, -k).J
            tr = regular_solution(pot, bp, k, xs)
            for j in range(xs.size):
                rebuilt = (fp[j] @ jm - fm[j] @ jp) / (2j * k)
                worst_rep = max(worst_rep, row_sum_norm(rebuilt - tr.phi[j]))
                w_same = dagger_wronskian(fp[j], fpp[j], fp[j], fpp[j])
                w_cross = dagger_wronskian(fm[j], fmp[j], fp[j], fpp[j])
                budget = 100.0 * (err_p + err_m) + 1e-13
                worst_wron = max(worst_wron,
                                 row_sum_norm(w_same - 2j * k * np.eye(pot.n))
                                 / budget,
                                 row_sum_norm(w_cross) / budget)
            for x in (0.0, 0.4 * b, 1.1 * b):
                a = physical_solution(pot, bp, k, x, via="jost")
                c = physical_solution(pot, bp, k, x, via="regular")
                worst_phys = max(worst_phys, row_sum_norm(a - c))
    ok = worst_rep <= 1e-7 and worst_phys <= 1e-7 and worst_wron <= 1.0
    _verdict(10, ok, f"regular-solution rebuild {worst_rep:.3e}, physical "
                     f"paths {worst_phys:.3e} (tol 1e-7), Wronskians at "
                     f"{worst_wron:.2f}x the 100x error budget")
