"""Pointwise spectral classification of the 2D pencil.

Off the exceptional set the whole spectrum is essential: the union (not
disjoint) of the open-ray sets M_pm and the interface-guided set N, whose
membership reduces to a closed-form witness a = W_+ W_-/(W_+ + W_-) that must
be a nonnegative real with both W_pm outside [a, inf). On the exceptional set
everything is essential of every kind; only the infinite-multiplicity point
spectrum needs a sub-test. Point spectrum off Omega_0 is empty in 2D.
"""

from __future__ import annotations

from dataclasses import replace

from .complex_numerics import (
    DEFAULT_TOL,
    Tolerances,
    in_open_positive_ray,
    in_ray,
)
from .classify1d import OUTSIDE, SpectrumClass, _check_reduced_point, _w_values
from .dielectric import InterfaceProblem, near_omega0, which_pole_side, wtilde


def in_M2(side: str, omega: complex, problem: InterfaceProblem,
          tol: Tolerances = DEFAULT_TOL) -> bool:
    """Membership of omega in the 2D bulk set M_side: W_side(omega) in (0, inf)."""
    omega = complex(omega)
    _check_reduced_point(problem, omega, tol, "in_M2")
    wv = omega * omega * wtilde(problem.side(side), omega, tol)
    return in_open_positive_ray(wv, tol)


def in_N2(omega: complex, problem: InterfaceProblem,
          tol: Tolerances = DEFAULT_TOL):
    """(membership, witness a) for the 2D interface set N.

    The witness solves a(W_+ + W_-) = W_+ W_- in closed form. Near-cancelling
    W_+ + W_- is treated as the excluded limit-point case (a diverges there).
    """
    omega = complex(omega)
    _check_reduced_point(problem, omega, tol, "in_N2")
    wt_p, wt_m, w_p, w_m = _w_values(problem, omega, tol)
    s = w_p + w_m
    if abs(s) <= tol.equality_tol * (abs(w_p) + abs(w_m)):
        return False, None
    a = w_p * w_m / s
    if abs(a.imag) > tol.ray_imag_tol or a.real < -tol.ray_real_tol:
        return False, None
    ar = a.real
    if in_ray(w_p, ar, tol) or in_ray(w_m, ar, tol):
        return False, None
    # the unsquared matching identity with mu_pm = sqrt(a - W_pm) holds
    # automatically here (same argument as the 1D set with a = k^2)
    return True, ar


def classify2(omega: complex, problem: InterfaceProblem,
              tol: Tolerances = DEFAULT_TOL) -> SpectrumClass:
    """Classify omega for the 2D pencil. Total: never raises."""
    omega = complex(omega)
    hit = which_pole_side(problem, omega, tol)
    if hit is not None:
        pole, side = hit
        return replace(OUTSIDE, branch_note=f"2D-S/{side}-pole@{pole:.6g}")

    pt = near_omega0(problem, omega, tol)
    if pt is not None:
        wt_p, wt_m, _, _ = _w_values(problem, omega, tol)
        m = max(abs(wt_p), abs(wt_m), 1.0)
        point_infinite = (
            pt.wtilde_plus_zero or pt.wtilde_minus_zero
            or abs(wt_p + wt_m) <= tol.equality_tol * m
        )
        suffix = "" if omega == pt.omega else ";near-Omega0"
        return SpectrumClass(
            True, True, resolvent=False, point_finite=False,
            point_infinite=point_infinite, discrete=False, weyl=True,
            e1=True, e2=True, e3=True, e4=True, e5=True,
            branch_note=f"2D-exceptional/{'pt-infinite' if point_infinite else 'essential'}{suffix}",
        )

    wt_p, wt_m, w_p, w_m = _w_values(problem, omega, tol)
    mp = in_open_positive_ray(w_p, tol)
    mm = in_open_positive_ray(w_m, tol)
    s = w_p + w_m
    nn = False
    if abs(s) > tol.equality_tol * (abs(w_p) + abs(w_m)):
        a = w_p * w_m / s
        if abs(a.imag) <= tol.ray_imag_tol and a.real >= -tol.ray_real_tol:
            ar = a.real
            nn = not (in_ray(w_p, ar, tol) or in_ray(w_m, ar, tol))

    if mp or mm or nn:
        members = [name for name, flag in (("M+", mp), ("M-", mm), ("N", nn)) if flag]
        return SpectrumClass(
            True, False, resolvent=False, point_finite=False, point_infinite=False,
            discrete=False, weyl=True, e1=True, e2=True, e3=True, e4=True, e5=True,
            branch_note="2D-reduced/" + "&".join(members),
        )
    return SpectrumClass(
        True, False, resolvent=True, point_finite=False, point_infinite=False,
        discrete=False, weyl=False, e1=False, e2=False, e3=False, e4=False, e5=False,
        branch_note="2D-reduced/resolvent",
    )
