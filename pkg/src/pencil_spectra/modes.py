"""Plasmon modes and Weyl sequences.

Eigenvalues are the zeros of k^2 (W_+ + W_-) - W_+ W_- surviving a filter
chain (poles, exceptional set, essential rays, unsquared matching identity);
for rational media the zeros come from one cleared-denominator polynomial, so
the search is exact. Eigenfunctions are the explicit two-sided exponentials
with decay rates mu_pm = sqrt(k^2 - W_pm), Re mu_pm > 0.

Weyl-sequence residual norms are evaluated from closed-form integrands on
quadrature grids, never by numerically differentiating samples: the decay
rates under test sit far below finite-difference noise floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .complex_numerics import DEFAULT_TOL, Tolerances, in_ray, poly_roots, principal_sqrt
from .classify1d import _n_identity_holds
from .dielectric import (
    InterfaceProblem,
    near_omega0,
    singular_points,
    wtilde,
)
from .errors import DegenerateDispersionError, PreconditionError, UnsupportedModelError


# ---------------------------------------------------------------------------
# the fixed C-infinity cutoff bump, exp(1/(x^2-1)) normalized on [-1, 1]
# ---------------------------------------------------------------------------

_GL_N = 400


@lru_cache(maxsize=1)
def _gl_nodes():
    x, w = np.polynomial.legendre.leggauss(_GL_N)
    return x, w


def _bump_raw(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    yi = y[inside]
    out[inside] = np.exp(1.0 / (yi * yi - 1.0))
    return out


@lru_cache(maxsize=1)
def _bump_constants():
    """(c, ||phi'||, ||phi''||) for phi = c*exp(1/(y^2-1)) with ||phi|| = 1."""
    x, w = _gl_nodes()
    raw = _bump_raw(x)
    c = 1.0 / math.sqrt(float(np.sum(w * raw**2)))
    g = -2.0 * x / (x * x - 1.0) ** 2
    gp = (6.0 * x * x + 2.0) / (x * x - 1.0) ** 3
    dphi = c * raw * g
    d2phi = c * raw * (g * g + gp)
    n1 = math.sqrt(float(np.sum(w * dphi**2)))
    n2 = math.sqrt(float(np.sum(w * d2phi**2)))
    return c, n1, n2


def bump(y):
    """The unit-norm cutoff profile on [-1, 1]."""
    c, _, _ = _bump_constants()
    return c * _bump_raw(y)


@lru_cache(maxsize=1)
def _bump_fourier_table():
    """kappa grid and hat-phi(kappa) = sqrt(2/pi) * int_0^1 phi cos(kappa y) dy."""
    x, w = _gl_nodes()
    half = x > 0  # phi is even; integrate on (0, 1)
    y = x[half]
    wy = w[half]
    phi = bump(y)
    kap_max = 240.0
    kappa = np.linspace(0.0, kap_max, 4801)
    table = math.sqrt(2.0 / math.pi) * (np.cos(np.outer(kappa, y)) @ (wy * phi))
    return kappa, table


def bump_fourier(kappa):
    """hat-phi on an arbitrary grid (even extension of the tabulated half-line)."""
    grid, table = _bump_fourier_table()
    return np.interp(np.abs(kappa), grid, table, right=0.0)


# ---------------------------------------------------------------------------
# dispersion relation and eigenvalues
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlasmonMode:
    """Interface-localized TM eigenmode: (psi1, psi2) = v_pm e^(-+ mu_pm x1), psi3 = 0."""

    omega: complex
    k: float
    mu_plus: complex
    mu_minus: complex
    v_plus: tuple
    v_minus: tuple
    normalization: str = "v-minus=(-ik,mu-)"


@dataclass(frozen=True)
class WeylSample:
    """One member of a Weyl sequence with its exactly-evaluated residual."""

    n: int
    construction: str   # 1D-right | 1D-left | 1D-k0-W0 | 2D-bulk | 2D-interface
    residual_norm: float
    norm: float
    support_center: float


def dispersion_k2(omega: complex, problem: InterfaceProblem,
                  tol: Tolerances = DEFAULT_TOL) -> complex:
    """k^2 = omega^2 Wt_+ Wt_- / (Wt_+ + Wt_-); the caller judges admissibility."""
    omega = complex(omega)
    wt_p = wtilde(problem.plus, omega, tol)
    wt_m = wtilde(problem.minus, omega, tol)
    s = wt_p + wt_m
    if abs(s) <= tol.equality_tol * max(abs(wt_p), abs(wt_m), 1.0):
        raise DegenerateDispersionError(
            f"Wt_+ + Wt_- cancels at omega={omega}; k^2 diverges there")
    return omega * omega * wt_p * wt_m / s


def _polymul(a, b):
    return tuple(np.convolve(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))


def _polyadd(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[n - len(a):] += a
    out[n - len(b):] += b
    return tuple(out)


def eigenvalue_polynomial(k: float, problem: InterfaceProblem) -> tuple:
    """Cleared-denominator polynomial whose roots contain N^(k).

    With Wt_pm = s n_pm/d_pm, the eigenvalue condition
    k^2 (W_+ + W_-) = W_+ W_- becomes (after dropping the omega^2 s/(d_+ d_-)
    prefactor, whose zeros land in Omega_0 or S and are filtered out)
    Q(omega) = k^2 (n_+ d_- + n_- d_+) - s omega^2 n_+ n_-.
    """
    if not problem.is_rational:
        raise UnsupportedModelError("eigenvalue search needs rational models")
    np_, dp = problem.plus.numerator, problem.plus.denominator
    nm, dm = problem.minus.numerator, problem.minus.denominator
    s = problem.plus.scale
    cross = _polyadd(_polymul(np_, dm), _polymul(nm, dp))
    qa = tuple(k * k * c for c in cross)
    qb = _polymul((s, 0.0, 0.0), _polymul(np_, nm))
    return _polyadd(qa, tuple(-c for c in qb))


def _make_mode(omega, k, w_p, w_m):
    mu_p = principal_sqrt(k * k - w_p)
    mu_m = principal_sqrt(k * k - w_m)
    v_plus = ((mu_m / mu_p) * (1j * k), mu_m)
    v_minus = (-1j * k, mu_m)
    return PlasmonMode(omega=omega, k=k, mu_plus=mu_p, mu_minus=mu_m,
                       v_plus=v_plus, v_minus=v_minus)


def eigen_omegas(k: float, problem: InterfaceProblem,
                 tol: Tolerances = DEFAULT_TOL) -> list:
    """All plasmon eigenvalues omega in N^(k), as PlasmonMode records.

    Filter order matters: discard poles, then the exceptional set, then the
    essential rays, and only then apply the unsquared matching identity
    (squaring is what produced the polynomial's spurious roots).
    """
    if not problem.is_rational:
        raise UnsupportedModelError("eigen_omegas needs rational models on both sides")
    if k == 0.0:
        return []  # N^(0) is empty: 0 = W_+ W_- cannot hold off Omega_0
    q = eigenvalue_polynomial(k, problem)
    if len(q) <= 1:
        return []
    poles = singular_points(problem, tol)
    modes = []
    for z, _ in poly_roots(q, tol):
        if any(abs(z - p) <= max(tol.ray_imag_tol, 1e-9) * (1.0 + abs(p)) for p in poles):
            continue
        if near_omega0(problem, z, tol) is not None:
            continue
        wt_p = wtilde(problem.plus, z, tol)
        wt_m = wtilde(problem.minus, z, tol)
        w_p = z * z * wt_p
        w_m = z * z * wt_m
        if in_ray(w_p, k * k, tol) or in_ray(w_m, k * k, tol):
            continue
        if not _n_identity_holds(wt_p, wt_m, w_p, w_m, k, tol):
            continue
        modes.append(_make_mode(z, k, w_p, w_m))
    modes.sort(key=lambda md: (md.omega.real, md.omega.imag))
    return modes


def eigenfunction_eval(mode: PlasmonMode, x1):
    """(psi1, psi2, psi3)(x1); the interface value is the limit from the right."""
    x = np.asarray(x1, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros((3, x.size), dtype=complex)
    right = x >= 0.0
    ep = np.exp(-mode.mu_plus * x[right])
    out[0, right] = mode.v_plus[0] * ep
    out[1, right] = mode.v_plus[1] * ep
    em = np.exp(mode.mu_minus * x[~right])
    out[0, ~right] = mode.v_minus[0] * em
    out[1, ~right] = mode.v_minus[1] * em
    return out[:, 0] if scalar else out


def _mode_w_values(mode: PlasmonMode):
    w_p = mode.k**2 - mode.mu_plus**2
    w_m = mode.k**2 - mode.mu_minus**2
    return w_p, w_m


def mode_residual(mode: PlasmonMode, grid, problem: InterfaceProblem,
                  tol: Tolerances = DEFAULT_TOL) -> float:
    """max |T_k psi - W psi| over the grid plus the three interface jumps.

    Derivatives of the exponential closed form are exact; no finite
    differences enter. The grid must avoid x1 = 0.
    """
    x = np.asarray(grid, dtype=float)
    if np.any(x == 0.0):
        raise PreconditionError("mode_residual grid must avoid x1 = 0")
    k = mode.k
    worst = 0.0
    for sign in (1.0, -1.0):
        sel = x > 0 if sign > 0 else x < 0
        if not np.any(sel):
            continue
        mu = mode.mu_plus if sign > 0 else mode.mu_minus
        v = mode.v_plus if sign > 0 else mode.v_minus
        m = -mu if sign > 0 else mu  # psi = v e^(m x1)
        w_side = mode.k**2 - mu**2
        r1 = (k * k - w_side) * v[0] + 1j * k * m * v[1]
        r2 = 1j * k * m * v[0] - m * m * v[1] - w_side * v[1]
        env = np.abs(np.exp(m * x[sel]))
        res = math.hypot(abs(r1), abs(r2)) * env
        worst = max(worst, float(res.max()))

    wt_p = wtilde(problem.plus, mode.omega, tol)
    wt_m = wtilde(problem.minus, mode.omega, tol)
    psi_p = np.array(mode.v_plus)
    psi_m = np.array(mode.v_minus)
    jump_wu1 = abs(wt_p * psi_p[0] - wt_m * psi_m[0])
    jump_u2 = abs(psi_p[1] - psi_m[1])
    dpsi2_p = -mode.mu_plus * psi_p[1]
    dpsi2_m = mode.mu_minus * psi_m[1]
    jump_comb = abs((dpsi2_p - 1j * k * psi_p[0]) - (dpsi2_m - 1j * k * psi_m[0]))
    return max(worst, float(jump_wu1), float(jump_u2), float(jump_comb))


# ---------------------------------------------------------------------------
# 1D Weyl sequences
# ---------------------------------------------------------------------------


def weyl_sequence_1d(omega: complex, k: float, n: int, side: str,
                     variant: str, problem: InterfaceProblem,
                     tol: Tolerances = DEFAULT_TOL) -> WeylSample:
    """One member of a 1D Weyl sequence.

    variant == "plane_wave": u^(n) = n^(-1/2) e^(i l x1) phi((x1 -+ n^2)/n) e3
    with l = sqrt(W_side - k^2) real; needs W_side(omega) in [k^2, inf).
    variant == "k0_w0": k = 0 with W_side(omega) = 0; compactly supported
    profile in the first component, residual exactly zero.
    """
    omega = complex(omega)
    sgn = 1.0 if side in ("+", "plus") else -1.0
    model = problem.side(side)
    w_side = omega * omega * wtilde(model, omega, tol)
    center = sgn * n * n
    _, nphi1, nphi2 = _bump_constants()

    if variant == "plane_wave":
        if k != 0.0:
            ok = in_ray(w_side, k * k, tol)
            cond = f"W_{side}(omega) in [k^2, inf)"
        else:
            ok = in_ray(w_side, 0.0, tol) and abs(w_side) > tol.ray_real_tol
            cond = f"W_{side}(omega) in (0, inf)"
        if not ok:
            raise PreconditionError(
                f"plane-wave Weyl sample needs {cond}; got W={w_side}")
        ell = math.sqrt(max(w_side.real - k * k, 0.0))
        resid = (1.0 / n) * math.sqrt(4.0 * ell * ell * nphi1**2 + (nphi2 / n) ** 2)
        return WeylSample(n=n, construction="1D-right" if sgn > 0 else "1D-left",
                          residual_norm=resid, norm=1.0, support_center=center)

    if variant == "k0_w0":
        if k != 0.0:
            raise PreconditionError("k0_w0 variant requires k = 0")
        zz = max(abs(omega) ** 2, 1.0)
        if abs(w_side) > tol.equality_tol * zz:
            raise PreconditionError(
                f"k0_w0 variant needs W_{side}(omega) = 0; got {w_side}")
        # L_0 u = (-W_side f, 0, 0): the residual is |W_side| exactly
        return WeylSample(n=n, construction="1D-k0-W0",
                          residual_norm=float(abs(w_side)), norm=1.0,
                          support_center=center)

    raise ValueError(f"unknown variant {variant!r}")


def weyl_field_1d(omega: complex, k: float, n: int, side: str, variant: str,
                  problem: InterfaceProblem, x1, tol: Tolerances = DEFAULT_TOL):
    """Sample the Weyl member on points x1; used for overlap/weak-limit checks."""
    omega = complex(omega)
    sgn = 1.0 if side in ("+", "plus") else -1.0
    x = np.asarray(x1, dtype=float)
    out = np.zeros((3, x.size), dtype=complex)
    center = sgn * n * n
    if variant == "plane_wave":
        w_side = omega * omega * wtilde(problem.side(side), omega, tol)
        ell = math.sqrt(max(w_side.real - k * k, 0.0))
        out[2] = np.exp(1j * ell * x) * bump((x - center) / n) / math.sqrt(n)
    elif variant == "k0_w0":
        out[0] = bump(x - center)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return out


def weyl_sequence_2d_bulk(omega: complex, side: str, n: int,
                          problem: InterfaceProblem,
                          tol: Tolerances = DEFAULT_TOL) -> WeylSample:
    """2D plane-wave Weyl member in the third component; W_side(omega) in [0, inf)."""
    omega = complex(omega)
    sgn = 1.0 if side in ("+", "plus") else -1.0
    w_side = omega * omega * wtilde(problem.side(side), omega, tol)
    if not in_ray(w_side, 0.0, tol):
        raise PreconditionError(
            f"2D bulk Weyl sample needs W_{side}(omega) in [0, inf); got {w_side}")
    _, nphi1, nphi2 = _bump_constants()
    wr = max(w_side.real, 0.0)
    # product bump phi(y1) phi(y2): ||beta . grad||^2 = |beta|^2 ||phi'||^2,
    # ||Laplacian||^2 = 2 ||phi''||^2 + 2 ||phi'||^4
    lap2 = 2.0 * nphi2**2 + 2.0 * nphi1**4
    resid = (1.0 / n) * math.sqrt(4.0 * wr * nphi1**2 + lap2 / (n * n))
    return WeylSample(n=n, construction="2D-bulk", residual_norm=resid,
                      norm=1.0, support_center=sgn * n * n)


# ---------------------------------------------------------------------------
# 2D interface-guided Weyl sequence (Fourier-fiber residual)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Weyl2DInterfaceReport:
    n: int
    k0: float
    residual_norm: float
    normalization: float      # c_n
    correction_norm: float    # ||r_n||
    leading_norm: float       # ||v^(n)||


def _interface_profile(omega, a, problem, tol):
    """psi, its coefficient data, and exponents for the guided construction."""
    k0 = math.sqrt(a)
    wt_p = wtilde(problem.plus, omega, tol)
    wt_m = wtilde(problem.minus, omega, tol)
    w_p = omega * omega * wt_p
    w_m = omega * omega * wt_m
    if in_ray(w_p, a, tol) or in_ray(w_m, a, tol):
        raise PreconditionError("(omega, a) violates the ray exclusions of N")
    mu_p = principal_sqrt(a - w_p)
    mu_m = principal_sqrt(a - w_m)
    lhs = wt_p * mu_m
    rhs = wt_m * mu_p
    if abs(lhs + rhs) > 10 * tol.equality_tol * (abs(lhs) + abs(rhs)):
        raise PreconditionError(
            f"(omega, a) does not satisfy the N-membership identity: "
            f"|Wt+ mu- + Wt- mu+| = {abs(lhs + rhs):.3e}")
    v_p = np.array([1j * k0, mu_p], dtype=complex)
    v_m = (mu_p / mu_m) * np.array([-1j * k0, mu_m], dtype=complex)
    return k0, w_p, w_m, mu_p, mu_m, v_p, v_m


def _half_norm2(coef, alpha):
    """||c e^(-alpha x)||^2 on a half-line = |c|^2/(2 alpha)."""
    return abs(coef) ** 2 / (2.0 * alpha)


def weyl_2d_interface_report(omega: complex, a: float, n: int,
                             problem: InterfaceProblem,
                             tol: Tolerances = DEFAULT_TOL) -> Weyl2DInterfaceReport:
    """Residual of the interface-guided 2D Weyl member, via kappa quadrature.

    The construction is the 1D eigenprofile psi at wavenumber k0 = sqrt(a),
    modulated by a moving cutoff in x2 and corrected by r_n to stay
    divergence free. In the Fourier fiber the full residual collapses to
      R(x1, k) ~ kappa k hat-phi(kappa) [ (k + k0) psi1, i psi1' + (k0^2/k) psi2, 0 ]
    with kappa = n (k - k0); the x1-norms are exact exponential integrals and
    only the kappa integral is quadrature.
    """
    omega = complex(omega)
    k0, w_p, w_m, mu_p, mu_m, v_p, v_m = _interface_profile(omega, a, problem, tol)
    ap, am = mu_p.real, mu_m.real

    kappa, phat = _bump_fourier_table()
    kap = np.concatenate([-kappa[:0:-1], kappa])
    ph2 = np.interp(np.abs(kap), kappa, phat) ** 2
    dk = kap[1] - kap[0]

    kk = k0 + kap / n
    # guard the 1/k factor in the correction: hat-phi is negligible there anyway
    kk_safe = np.where(np.abs(kk) < 1e-12, 1e-12, kk)

    # x1-norms of the two nonzero residual components
    n1 = _half_norm2(v_p[0], ap) + _half_norm2(v_m[0], am)
    comp1 = (kk + k0) ** 2 * n1
    c_over = k0 * k0 / kk_safe
    cp = np.abs(-1j * mu_p * v_p[0] + c_over * v_p[1]) ** 2 / (2 * ap)
    cm = np.abs(1j * mu_m * v_m[0] + c_over * v_m[1]) ** 2 / (2 * am)
    comp2 = cp + cm

    integrand_R = kap**2 * kk**2 * ph2 * (comp1 + comp2)
    int_R = float(np.sum(integrand_R) * dk)

    # normalization pieces
    psi_norm2 = sum(_half_norm2(v_p[j], ap) + _half_norm2(v_m[j], am) for j in range(2))
    psi2_norm2 = _half_norm2(v_p[1], ap) + _half_norm2(v_m[1], am)
    lead2 = psi_norm2 * float(np.sum(kk**2 * ph2) * dk)
    corr2 = psi2_norm2 * float(np.sum(kap**2 * ph2) * dk) / (n * n)
    cross = -psi2_norm2 * float(np.sum(kk * kap * ph2) * dk) / n
    total2 = lead2 + 2.0 * cross + corr2
    c_n = 1.0 / math.sqrt(total2)

    resid = c_n * math.sqrt(int_R) / n
    return Weyl2DInterfaceReport(
        n=n, k0=k0, residual_norm=resid, normalization=c_n,
        correction_norm=c_n * math.sqrt(corr2), leading_norm=c_n * math.sqrt(lead2),
    )


def weyl_residual_2d_interface(omega: complex, a: float, n: int,
                               problem: InterfaceProblem,
                               tol: Tolerances = DEFAULT_TOL) -> float:
    """||L(omega) u^(n)|| for the interface-guided 2D Weyl sequence."""
    return weyl_2d_interface_report(omega, a, n, problem, tol).residual_norm


def fit_loglog_slope(ns, values) -> float:
    """Least-squares slope of log(value) against log(n)."""
    ln = np.log(np.asarray(ns, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(ln, lv, 1)[0])
