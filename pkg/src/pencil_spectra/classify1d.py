"""Pointwise spectral classification of the 1D pencil at fixed wavenumber k.

The decision procedure is driven entirely by the values W_pm(omega) and
W-tilde_pm(omega):

* off the exceptional set, the spectrum is the disjoint union of the
  essential rays M_+ u M_- (Weyl spectrum, all five essential spectra) and
  the finite plasmon set N (point and discrete spectrum);
* on the exceptional set a case table on (W-tilde_+, W-tilde_-, W_+, W_-)
  applies, which for k != 0 can split the essential spectra three ways.

classify() is total: domain or singularity issues are encoded in the record,
never thrown, so grid tracing cannot abort. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .complex_numerics import (
    DEFAULT_TOL,
    Tolerances,
    in_open_positive_ray,
    in_ray,
    principal_sqrt,
)
from .dielectric import (
    InterfaceProblem,
    Omega0Point,
    near_omega0,
    which_pole_side,
    wtilde,
)
from .errors import PreconditionError


@dataclass(frozen=True)
class SpectrumClass:
    """Full classification record for one omega.

    Flag semantics: resolvent and spectrum membership are mutually exclusive
    for in-domain points; e1 => e2 => e3 => e4 => e5; weyl <=> e2; discrete
    and e5 are never both true. branch_note names the classification branch
    that produced the record.
    """

    in_domain: bool
    in_omega0: bool
    resolvent: bool
    point_finite: bool
    point_infinite: bool
    discrete: bool
    weyl: bool
    e1: bool
    e2: bool
    e3: bool
    e4: bool
    e5: bool
    branch_note: str

    @property
    def in_spectrum(self) -> bool:
        return self.weyl or self.point_finite or self.point_infinite or self.e5 or self.discrete

    def flags(self) -> tuple:
        return (self.resolvent, self.point_finite, self.point_infinite, self.discrete,
                self.weyl, self.e1, self.e2, self.e3, self.e4, self.e5)

    def memberships(self) -> tuple:
        """Set labels encoded in the branch note of reduced-branch records."""
        tail = self.branch_note.rsplit("/", 1)[-1]
        return tuple(part for part in tail.split("&") if part in ("M+", "M-", "N", "M+-"))

    def raster_class(self) -> str:
        """Coarse display class: one of S, Omega0, N, M+, M-, resolvent."""
        if not self.in_domain:
            return "S"
        if self.in_omega0:
            return "Omega0"
        if self.point_finite:
            return "N"
        members = self.memberships()
        if "M+" in members or "M+-" in members:
            return "M+"
        if "M-" in members:
            return "M-"
        if "N" in members:
            return "N"
        return "resolvent" if self.resolvent else "M-"


OUTSIDE = SpectrumClass(
    in_domain=False, in_omega0=False, resolvent=False, point_finite=False,
    point_infinite=False, discrete=False, weyl=False,
    e1=False, e2=False, e3=False, e4=False, e5=False, branch_note="S",
)


def _w_values(problem: InterfaceProblem, omega: complex, tol: Tolerances):
    wt_p = wtilde(problem.plus, omega, tol)
    wt_m = wtilde(problem.minus, omega, tol)
    return wt_p, wt_m, omega * omega * wt_p, omega * omega * wt_m


def _check_reduced_point(problem, omega, tol, op_name):
    hit = which_pole_side(problem, omega, tol)
    if hit is not None:
        pole, side = hit
        raise PreconditionError(f"{op_name}: omega={omega} is a pole of the {side} side ({pole})")
    if near_omega0(problem, omega, tol) is not None:
        raise PreconditionError(f"{op_name}: omega={omega} lies in the exceptional set Omega_0")


def in_M(side: str, omega: complex, k: float, problem: InterfaceProblem,
         tol: Tolerances = DEFAULT_TOL) -> bool:
    """Membership of omega in the essential ray set M_side^(k).

    k != 0 tests W_side(omega) in [k^2, inf); k == 0 tests the open ray
    (0, inf). The open/closed distinction at the k = 0 endpoint is moot off
    the exceptional set: W_side(omega) = 0 is exactly membership in Omega_0,
    which this operation rejects. Raises PreconditionError on S or Omega_0.
    """
    omega = complex(omega)
    _check_reduced_point(problem, omega, tol, "in_M")
    wv = omega * omega * wtilde(problem.side(side), omega, tol)
    if k != 0.0:
        return in_ray(wv, k * k, tol)
    return in_open_positive_ray(wv, tol)


def _n_identity_holds(wt_p, wt_m, w_p, w_m, k, tol):
    mu_p = principal_sqrt(k * k - w_p)
    mu_m = principal_sqrt(k * k - w_m)
    a = wt_p * mu_m
    b = wt_m * mu_p
    return abs(a + b) <= tol.equality_tol * (abs(a) + abs(b))


def in_N(omega: complex, k: float, problem: InterfaceProblem,
         tol: Tolerances = DEFAULT_TOL) -> bool:
    """Membership of omega in the plasmon set N^(k).

    Requires the two ray exclusions W_pm(omega) not in [k^2, inf) and the
    unsquared matching identity W-tilde_+ mu_- + W-tilde_- mu_+ = 0 with
    mu_pm = principal_sqrt(k^2 - W_pm). N^(0) is empty.
    """
    omega = complex(omega)
    _check_reduced_point(problem, omega, tol, "in_N")
    wt_p, wt_m, w_p, w_m = _w_values(problem, omega, tol)
    if in_ray(w_p, k * k, tol) or in_ray(w_m, k * k, tol):
        return False
    return _n_identity_holds(wt_p, wt_m, w_p, w_m, k, tol)


def _classify_omega0(problem, omega, k, pt: Omega0Point, tol, exact_hit: bool,
                     note_prefix: str = "") -> SpectrumClass:
    wt_p, wt_m, w_p, w_m = _w_values(problem, omega, tol)
    m = max(abs(wt_p), abs(wt_m), 1.0)
    wtp_zero = pt.wtilde_plus_zero or abs(wt_p) <= tol.equality_tol * m
    wtm_zero = pt.wtilde_minus_zero or abs(wt_m) <= tol.equality_tol * m
    sum_zero = abs(wt_p + wt_m) <= tol.equality_tol * m
    suffix = "" if exact_hit else ";near-Omega0"

    if k != 0.0:
        point_infinite = wtp_zero or wtm_zero
        if not point_infinite:
            # only possible at omega = 0 with W_+ = W_- = 0 and both responses nonzero
            if sum_zero:
                return SpectrumClass(
                    True, True, resolvent=False, point_finite=True, point_infinite=False,
                    discrete=False, weyl=False, e1=False, e2=False, e3=False, e4=False,
                    e5=True, branch_note=f"{note_prefix}exceptional/pt-finite{suffix}",
                )
            return SpectrumClass(
                True, True, resolvent=True, point_finite=False, point_infinite=False,
                discrete=False, weyl=False, e1=False, e2=False, e3=False, e4=False,
                e5=False, branch_note=f"{note_prefix}exceptional/resolvent{suffix}",
            )
        e1 = (wtp_zero and in_ray(w_m, k * k, tol)) or (wtm_zero and in_ray(w_p, k * k, tol))
        return SpectrumClass(
            True, True, resolvent=False, point_finite=False, point_infinite=True,
            discrete=False, weyl=True, e1=e1, e2=True, e3=True, e4=True, e5=True,
            branch_note=f"{note_prefix}exceptional/pt-infinite{'+e1' if e1 else ''}{suffix}",
        )

    # k == 0: everything on Omega_0 is essential spectrum of every kind
    point_infinite = wtp_zero or wtm_zero
    return SpectrumClass(
        True, True, resolvent=False, point_finite=False, point_infinite=point_infinite,
        discrete=False, weyl=True, e1=True, e2=True, e3=True, e4=True, e5=True,
        branch_note=f"{note_prefix}exceptional-k0/{'pt-infinite' if point_infinite else 'essential'}{suffix}",
    )


def classify(omega: complex, k: float, problem: InterfaceProblem,
             tol: Tolerances = DEFAULT_TOL) -> SpectrumClass:
    """Classify omega for the 1D pencil at wavenumber k. Total: never raises."""
    omega = complex(omega)
    hit = which_pole_side(problem, omega, tol)
    if hit is not None:
        pole, side = hit
        return replace(OUTSIDE, branch_note=f"S/{side}-pole@{pole:.6g}")

    pt = near_omega0(problem, omega, tol)
    if pt is not None:
        exact = (omega == pt.omega)
        return _classify_omega0(problem, omega, k, pt, tol, exact)

    wt_p, wt_m, w_p, w_m = _w_values(problem, omega, tol)
    if k != 0.0:
        mp = in_ray(w_p, k * k, tol)
        mm = in_ray(w_m, k * k, tol)
    else:
        mp = in_open_positive_ray(w_p, tol)
        mm = in_open_positive_ray(w_m, tol)
    essential = mp or mm
    nn = False
    if not essential and not (in_ray(w_p, k * k, tol) or in_ray(w_m, k * k, tol)):
        nn = _n_identity_holds(wt_p, wt_m, w_p, w_m, k, tol)

    if essential:
        which = "M+-" if (mp and mm) else ("M+" if mp else "M-")
        return SpectrumClass(
            True, False, resolvent=False, point_finite=False, point_infinite=False,
            discrete=False, weyl=True, e1=True, e2=True, e3=True, e4=True, e5=True,
            branch_note=f"reduced/{which}",
        )
    if nn:
        return SpectrumClass(
            True, False, resolvent=False, point_finite=True, point_infinite=False,
            discrete=True, weyl=False, e1=False, e2=False, e3=False, e4=False, e5=False,
            branch_note="reduced/N",
        )
    return SpectrumClass(
        True, False, resolvent=True, point_finite=False, point_infinite=False,
        discrete=False, weyl=False, e1=False, e2=False, e3=False, e4=False, e5=False,
        branch_note="reduced/resolvent",
    )
