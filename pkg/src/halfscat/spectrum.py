"""Bound states on the positive imaginary axis and Levinson's theorem.

Bound states of the half-line problem sit at k = i kappa where det J(i kappa)
vanishes; the multiplicity is the kernel dimension of J(i kappa), which also
equals the order of the determinant zero. The search scans |det J| on a kappa
grid, refines local minima by golden section, and accepts a candidate only
when the argument-principle winding of det J around the refined point is
nonzero. That gate is what separates a true zero from a near-miss (for
example a resonance drifting toward the origin).

Levinson's identity is verified as stated: the continuously unwrapped
arg det S(k), read at its two ends, must satisfy

    arg det S(0+) - arg det S(inf) = pi (2 N + mu - n_M - n_N)

with N the total bound-state multiplicity and mu the number of +1
eigenvalues of S(0). The infinite-k end is anchored to the exact branch
(n_D odd/even decides between pi and 0 mod 2pi); the k -> 0 end is a short
linear extrapolation from the two smallest trace points.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._integrator import DEFAULT_ATOL, DEFAULT_RTOL
from .boundary import canonicalize
from .errors import (BetaMatchFailure, EigenvalueNotPlusMinusOne,
                     MultiplicityMismatch, NotDirichlet, PhaseStepTooLarge,
                     RefinementStall, UnsettledTail, ValidationFailure)
from .jost import jost_matrix, regular_column
from .matkernel import KernelBasis, kernel, row_sum_norm
from .scattering import asymptotic_model, s_at_zero, s_matrix

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundState:
    kappa: float
    multiplicity: int
    kernel_J: KernelBasis
    kernel_Jdag: KernelBasis
    winding: int
    det_residual: float


@dataclass(frozen=True)
class Contour:
    """Realized Levinson contour: a real-axis trace bracketed by [epsilon, R]
    on the imaginary axis. The large and small arcs of the textbook contour
    are replaced by proven endpoint orders, so no arc samples exist."""

    epsilon: float
    R: float
    n_real_samples: int
    n_arc_samples: int


@dataclass(frozen=True)
class LevinsonReport:
    bound_states: list
    N_total: int
    mu: int
    n_M: int
    n_D: int
    n_N: int
    phase_at_zero: float
    phase_at_infinity: float
    identity_residual: float
    contour: Contour


def detJ_imag_axis(pot, bp, kappa, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """det J(i kappa); the reflected evaluation point is i kappa itself."""
    ev = jost_matrix(pot, bp, 1j * float(kappa), rtol=rtol, atol=atol)
    return complex(np.linalg.det(ev.J))


def winding_number(pot, bp, center_kappa, radius, samples=64, *,
                   rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, max_doublings=6):
    """Argument-principle count of det J zeros inside the circle of the given
    radius around i*center_kappa. Every phase step must stay below pi/2; the
    sampling doubles until that holds."""
    if radius <= 0 or center_kappa <= radius:
        raise ValidationFailure("circle must be contained in the open upper half plane")
    n_s = int(samples)
    for _ in range(max_doublings + 1):
        angles = 2 * np.pi * np.arange(n_s + 1) / n_s
        total = 0.0
        ok = True
        det_prev = None
        for ang in angles:
            k = 1j * center_kappa + radius * np.exp(1j * ang)
            d = complex(np.linalg.det(jost_matrix(pot, bp, k, rtol=rtol, atol=atol).J))
            if d == 0:
                raise PhaseStepTooLarge(
                    f"det J vanishes on the winding circle around kappa = {center_kappa}")
            if det_prev is not None:
                step = np.angle(d / det_prev)
                if abs(step) >= np.pi / 2:
                    ok = False
                    break
                total += step
            det_prev = d
        if ok:
            return int(round(total / (2 * np.pi)))
        n_s *= 2
    raise PhaseStepTooLarge(
        f"phase steps stayed >= pi/2 after {max_doublings} doublings "
        f"(zero on or near the contour around kappa = {center_kappa})")


def default_kappa_max(pot, bp, *, class_tol=1e-9):
    """Search ceiling: 1 + the L1 norm of V + the largest free-problem
    bound-state location |cot theta| over mixed channels. Heuristic; the
    finiteness theorem gives no constructive bound."""
    cb = canonicalize(bp, class_tol=class_tol)
    cot_max = 0.0
    for t in cb.theta[:cb.n_mixed]:
        cot_max = max(cot_max, abs(np.cos(t) / np.sin(t)))
    return 1.0 + pot.l1_norm + cot_max


def _golden_minimize(fun, a, b, tol, max_iter=200):
    """Golden-section minimum of a scalar function on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    it = 0
    while b - a > tol:
        it += 1
        if it > max_iter:
            raise RefinementStall(f"bracket stuck at width {b - a:.3e} after {max_iter} iterations")
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
    return 0.5 * (a + b)


def find_bound_states(pot, bp, *, kappa_min=1e-4, kappa_max=None,
                      grid_points=240, refine_tol=1e-9, kernel_tol=1e-8,
                      rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Scan, refine, and gate bound-state candidates. Returns BoundStates in
    ascending kappa order.

    A coarse grid can swallow two nearby zeros in a single dip (a split
    multiplet leaves minima closer than the grid step), so after a zero is
    accepted the rest of its bracket is rescanned at fine resolution and any
    interior dip re-enters the work list. Spurious dips cost one refinement
    and die at the winding gate."""
    if kappa_max is None:
        kappa_max = default_kappa_max(pot, bp)
    if not (0 < kappa_min < kappa_max):
        raise ValidationFailure("need 0 < kappa_min < kappa_max")

    def det_at(x):
        return abs(detJ_imag_axis(pot, bp, x, rtol=rtol, atol=atol))

    grid = np.linspace(kappa_min, kappa_max, int(grid_points))
    dets = np.array([det_at(x) for x in grid])

    work = []
    for i in range(len(grid)):
        left_up = i == 0 or dets[i] < dets[i - 1]
        right_up = i == len(grid) - 1 or dets[i] < dets[i + 1]
        if left_up and right_up:
            lo = grid[max(i - 1, 0)]
            hi = grid[min(i + 1, len(grid) - 1)]
            work.append((lo, hi, 0))

    states = []
    seen = []
    while work:
        lo, hi, depth = work.pop()
        kappa = _golden_minimize(det_at, lo, hi, refine_tol)
        duplicate = any(abs(kappa - s) <= 10 * refine_tol * max(1.0, kappa)
                        for s in seen)
        accepted = duplicate
        if not duplicate:
            radius = 10 * refine_tol
            w = winding_number(pot, bp, kappa, radius, rtol=rtol, atol=atol)
            if w >= 1:
                accepted = True
                seen.append(kappa)
                ev = jost_matrix(pot, bp, 1j * kappa, rtol=rtol, atol=atol)
                j_scale = max(row_sum_norm(ev.J),
                              row_sum_norm(bp.A) + row_sum_norm(bp.B))
                ker = kernel(ev.J, tol=kernel_tol, scale=j_scale)
                ker_dag = kernel(ev.J.conj().T, tol=kernel_tol, scale=j_scale)
                if ker.dim != w or ker_dag.dim != w:
                    warnings.warn(MultiplicityMismatch(
                        f"kappa = {kappa:.12g}: kernel dims ({ker.dim}, {ker_dag.dim}) "
                        f"vs winding {w}; trusting the winding"))
                states.append(BoundState(
                    kappa=float(kappa), multiplicity=w, kernel_J=ker,
                    kernel_Jdag=ker_dag, winding=w,
                    det_residual=det_at(kappa)))
        if accepted and depth < 3:
            # a companion zero can hide in the monotone run leading into the
            # dip, outside the +-1-node bracket, so the window spans a bit
            # more than the bracket on both sides of the accepted zero
            margin = 50 * refine_tol * max(1.0, kappa)
            half = 1.25 * (hi - lo)
            win_lo = max(kappa_min, kappa - half)
            win_hi = min(kappa_max, kappa + half)
            for a, b in ((win_lo, kappa - margin), (kappa + margin, win_hi)):
                if b - a <= 4 * margin:
                    continue
                xs = np.linspace(a, b, 33)
                ds = np.array([det_at(x) for x in xs])
                for i in range(1, len(xs) - 1):
                    if ds[i] < ds[i - 1] and ds[i] < ds[i + 1]:
                        work.append((xs[i - 1], xs[i + 1], depth + 1))
    states.sort(key=lambda s: s.kappa)
    return states


def mu_from_s_zero(pot, bp, *, tol=1e-3, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """mu = number of +1 eigenvalues of S(0); the rest must sit at -1."""
    s0 = s_at_zero(pot, bp, rtol=rtol, atol=atol)
    eigs = np.linalg.eigvals(s0)
    mu = 0
    for lam in eigs:
        if abs(lam - 1.0) <= tol:
            mu += 1
        elif abs(lam + 1.0) > tol:
            raise EigenvalueNotPlusMinusOne(
                f"S(0) eigenvalue {lam} is neither +1 nor -1 within {tol}")
    return mu


def detJ_smallk_order(pot, bp, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Least-squares slope of log |det J(k)| over k in {1e-2, ..., 1.25e-3};
    matches the S(0) eigenvalue count mu when the potential is in class."""
    ks = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
    dets = [abs(np.linalg.det(jost_matrix(pot, bp, k, rtol=rtol, atol=atol).J))
            for k in ks]
    return float(np.polyfit(np.log(ks), np.log(dets), 1)[0])


def derivative_identity_check(pot, bp, bs, h=1e-5, *,
                              rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Relative discrepancy in the bound-state normalization identity

        i beta^dagger dJ/dk (i kappa) alpha = 2 kappa int_0^inf ||phi alpha||^2

    alpha is the first kernel vector of J(i kappa); beta is its partner fixed
    by matching phi(i kappa, .) alpha onto the decaying Jost column at the
    support edge. The integral is the accumulated quadrature over the support
    plus the exact exponential tail."""
    kappa = bs.kappa
    alpha = bs.kernel_J.basis[:, 0]
    b = pot.support_end
    psi_b, psip_b, norm_in, _ = regular_column(pot, bp, 1j * kappa, alpha, b,
                                               rtol=rtol, atol=atol)
    col = np.linalg.norm(psi_b)
    resid = np.linalg.norm(psip_b + kappa * psi_b)
    if resid > 1e-6 * max((1.0 + kappa) * col, 1e-300):
        raise BetaMatchFailure(
            f"phi' + kappa phi residual {resid:.3e} at the support edge "
            f"(kappa = {kappa:.12g}); the candidate does not decay")
    beta = np.exp(kappa * b) * psi_b.ravel()
    tail = col * col / (2 * kappa)
    rhs = 2 * kappa * (norm_in + tail)

    j_up = jost_matrix(pot, bp, 1j * (kappa + h), rtol=rtol, atol=atol).J
    j_dn = jost_matrix(pot, bp, 1j * (kappa - h), rtol=rtol, atol=atol).J
    j_dot = (j_up - j_dn) / (2j * h)
    lhs = 1j * (beta.conj() @ j_dot @ alpha)
    return abs(lhs - rhs) / abs(rhs)


def _phase_trace(pot, bp, k_lo, k_hi, initial_points, max_samples,
                 rtol, atol):
    """Descending-k samples of det S with every adjacent principal-value
    phase step below pi/4; midpoints are inserted geometrically."""
    ks = list(np.geomspace(k_hi, k_lo, int(initial_points)))
    if k_hi / 2 > k_lo:
        ks.append(k_hi / 2)
    ks = sorted(set(float(k) for k in ks), reverse=True)
    dets = {k: complex(np.linalg.det(s_matrix(pot, bp, k, rtol=rtol, atol=atol).S))
            for k in ks}
    while True:
        inserts = []
        for a, b in zip(ks[:-1], ks[1:]):
            if abs(np.angle(dets[b] / dets[a])) >= np.pi / 4:
                inserts.append(float(np.sqrt(a * b)))
        if not inserts:
            break
        if len(ks) + len(inserts) > max_samples:
            raise PhaseStepTooLarge(
                f"phase trace needs more than {max_samples} samples")
        for k in inserts:
            dets[k] = complex(np.linalg.det(s_matrix(pot, bp, k, rtol=rtol, atol=atol).S))
        ks = sorted(dets.keys(), reverse=True)
    phases = np.empty(len(ks))
    phases[0] = np.angle(dets[ks[0]])
    for i in range(1, len(ks)):
        phases[i] = phases[i - 1] + np.angle(dets[ks[i]] / dets[ks[i - 1]])
    return np.array(ks), phases


def levinson_verify(pot, bp, *, k_min=1e-3, k_max=None, initial_points=64,
                    tail_tol=0.05, max_samples=2 ** 20,
                    kappa_min=1e-4, kappa_max=None, grid_points=240,
                    refine_tol=1e-9, kernel_tol=1e-8,
                    rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Assemble and check Levinson's identity. See the module docstring."""
    cb = canonicalize(bp)
    am = asymptotic_model(pot, bp)
    n_m, n_d, n_n = cb.n_mixed, cb.n_dirichlet, cb.n_neumann

    k_hi = float(k_max) if k_max is not None else 8.0
    grew = 0
    while True:
        s_hi = s_matrix(pot, bp, k_hi, rtol=rtol, atol=atol).S
        if row_sum_norm(s_hi - am.S_inf) <= tail_tol:
            break
        grew += 1
        if grew > 16:
            raise UnsettledTail(
                f"S(k) still {row_sum_norm(s_hi - am.S_inf):.3g} away from its "
                f"limit at k = {k_hi:.3g}")
        k_hi *= 2.0

    ks, phases = _phase_trace(pot, bp, k_min, k_hi, initial_points,
                              max_samples, rtol, atol)

    # infinite-k end: kill the O(1/k) tail by two-point extrapolation, then
    # snap to the exact branch fixed by the Dirichlet channel parity
    idx_half = int(np.argmin(np.abs(ks - k_hi / 2)))
    phi_inf_est = 2 * phases[0] - phases[idx_half]
    target = (n_d % 2) * np.pi
    snapped = target + 2 * np.pi * round((phi_inf_est - target) / (2 * np.pi))
    if abs(phi_inf_est - snapped) > 0.5:
        raise UnsettledTail(
            f"extrapolated tail phase {phi_inf_est:.6f} is {abs(phi_inf_est - snapped):.3f} "
            f"rad from the nearest exact branch")
    phase_at_infinity = float(snapped)

    # k -> 0 end: linear extrapolation from the two smallest samples
    k1, k2 = ks[-1], ks[-2]
    p1, p2 = phases[-1], phases[-2]
    phase_at_zero = float(p1 - k1 * (p2 - p1) / (k2 - k1))

    states = find_bound_states(pot, bp, kappa_min=kappa_min,
                               kappa_max=kappa_max, grid_points=grid_points,
                               refine_tol=refine_tol, kernel_tol=kernel_tol,
                               rtol=rtol, atol=atol)
    n_total = sum(s.multiplicity for s in states)
    mu = mu_from_s_zero(pot, bp, rtol=rtol, atol=atol)

    residual = (phase_at_zero - phase_at_infinity
                - np.pi * (2 * n_total + mu - n_m - n_n))
    contour = Contour(
        epsilon=0.5 * states[0].kappa if states else 0.5 * kappa_min,
        R=2.0 * states[-1].kappa if states else default_kappa_max(pot, bp),
        n_real_samples=len(ks), n_arc_samples=0)
    return LevinsonReport(
        bound_states=states, N_total=n_total, mu=mu,
        n_M=n_m, n_D=n_d, n_N=n_n,
        phase_at_zero=phase_at_zero, phase_at_infinity=phase_at_infinity,
        identity_residual=float(residual), contour=contour)


def levinson_dirichlet_convention(report):
    """Phase shift at threshold under the Dirichlet convention
    delta(inf) = 0, det S = e^{2 i delta}; equals pi (N + mu/2)."""
    if report.n_M or report.n_N:
        raise NotDirichlet("the convention is defined for purely Dirichlet boundaries")
    return 0.5 * (report.phase_at_zero - report.phase_at_infinity)
