"""Frequency response of the two half-space media.

Each built-in model reduces to scale * num(omega)/den(omega) with complex
polynomial coefficients in descending powers. That turns every global set
computation - the pole set S, the exceptional set Omega_0, eigenvalue
polynomials - into finite polynomial problems. A black-box callable model is
accepted for pointwise evaluation only; global set operations reject it.

Models and problems are immutable after construction; evaluation is pure, so
everything here may be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .complex_numerics import (
    DEFAULT_TOL,
    Tolerances,
    poly_eval_scale,
    poly_roots,
    polyval,
)
from .errors import DegenerateInputError, SingularityError, UnsupportedModelError

TWO_PI = 2.0 * np.pi


def _as_coeff_tuple(coeffs) -> tuple:
    cs = tuple(complex(c) for c in coeffs)
    i = 0
    while i < len(cs) and cs[i] == 0:
        i += 1
    return cs[i:]


def _deflate_once(coeffs, root):
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(out[-1] * root + c)
    return tuple(out)


@dataclass(frozen=True)
class DielectricModel:
    """One half-space's response W-tilde(omega), with W(omega) = omega^2 W-tilde(omega).

    kind is one of "constant", "drude", "rational", "callable". For the first
    three the reduced rational form scale*num/den is stored; "callable" keeps
    only the function plus a user-declared pole list.
    """

    kind: str
    numerator: Optional[tuple] = None
    denominator: Optional[tuple] = None
    scale: float = 1.0
    omega_p: Optional[float] = None
    gamma: Optional[float] = None
    background: Optional[float] = None
    func: Optional[Callable] = None
    declared_poles: tuple = ()

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be a positive real, got {self.scale!r}")
        if self.kind != "callable":
            if not self.denominator:
                raise ValueError("rational model needs a nonzero denominator")
            if not self.numerator:
                raise ValueError("numerator must not be identically zero")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value, scale: float = 1.0) -> "DielectricModel":
        c = complex(value)
        if c == 0:
            raise DegenerateInputError(
                "Constant(0) would make W vanish identically; the exceptional set "
                "would be the whole plane"
            )
        return DielectricModel(kind="constant", numerator=(c,), denominator=(1 + 0j,), scale=scale)

    @staticmethod
    def drude(omega_p: float, gamma: float, background: float = 1.0, scale: float = 1.0) -> "DielectricModel":
        """Metal response W-tilde = scale*(background - 2 pi omega_p^2/(omega^2 + i gamma omega)).

        gamma = 0 (the lossless limit) is accepted; the two poles then merge at 0.
        """
        if not (omega_p > 0):
            raise ValueError("omega_p must be > 0")
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        b = float(background)
        num = (b + 0j, 1j * gamma * b, complex(-TWO_PI * omega_p**2))
        den = (1 + 0j, 1j * gamma, 0j)
        return DielectricModel(
            kind="drude", numerator=_as_coeff_tuple(num), denominator=den,
            scale=scale, omega_p=float(omega_p), gamma=float(gamma), background=b,
        )

    @staticmethod
    def rational(numerator, denominator, scale: float = 1.0,
                 tol: Tolerances = DEFAULT_TOL) -> "DielectricModel":
        """W-tilde = scale*num/den; common roots (within equality_tol) are cancelled."""
        num = _as_coeff_tuple(numerator)
        den = _as_coeff_tuple(denominator)
        if not den:
            raise ValueError("denominator is identically zero")
        if not num:
            raise ValueError("numerator is identically zero")
        # cancel removable singularities up front so S never contains them
        changed = True
        while changed and len(den) > 1 and len(num) > 1:
            changed = False
            for r, _ in poly_roots(den, tol):
                if abs(polyval(num, r)) <= tol.equality_tol * poly_eval_scale(num, r):
                    num = _deflate_once(num, r)
                    den = _deflate_once(den, r)
                    changed = True
                    break
        return DielectricModel(kind="rational", numerator=num, denominator=den, scale=scale)

    @staticmethod
    def from_callable(func: Callable, poles=(), scale: float = 1.0) -> "DielectricModel":
        """Black-box W-tilde(omega). Pointwise classification only; set tracing rejects it."""
        return DielectricModel(
            kind="callable", func=func, scale=scale,
            declared_poles=tuple(complex(p) for p in poles),
        )

    # -- queries -----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.kind != "callable"


@lru_cache(maxsize=256)
def singular_set(model: DielectricModel, tol: Tolerances = DEFAULT_TOL) -> tuple:
    """Finite pole set S of the model, sorted by (Re, Im)."""
    if model.kind == "callable":
        poles = list(model.declared_poles)
    elif len(model.denominator) == 1:
        poles = []
    else:
        poles = [z for z, _ in poly_roots(model.denominator, tol)]
    poles.sort(key=lambda z: (z.real, z.imag))
    return tuple(poles)


def _near(z: complex, points, dist: float):
    for p in points:
        if abs(z - p) <= dist:
            return p
    return None


def wtilde(model: DielectricModel, omega: complex, tol: Tolerances = DEFAULT_TOL) -> complex:
    """W-tilde(omega). Raises SingularityError at (or within ray_imag_tol of) a pole."""
    omega = complex(omega)
    pole = _near(omega, singular_set(model, tol), tol.ray_imag_tol)
    if pole is not None:
        raise SingularityError(omega, pole)
    if model.kind == "callable":
        # the callable supplies the full W-tilde, scale included
        return complex(model.func(omega))
    return model.scale * polyval(model.numerator, omega) / polyval(model.denominator, omega)


def w(model: DielectricModel, omega: complex, tol: Tolerances = DEFAULT_TOL) -> complex:
    """W(omega) = omega^2 W-tilde(omega); same domain and errors as wtilde."""
    omega = complex(omega)
    return omega * omega * wtilde(model, omega, tol)


@dataclass(frozen=True)
class InterfaceProblem:
    """The (plus-model, minus-model) pair defining the pencil; plus lives on x1 > 0."""

    plus: DielectricModel
    minus: DielectricModel
    k: Optional[float] = None  # convenience slot for CLI plumbing; ops take k explicitly

    def __post_init__(self):
        if abs(self.plus.scale - self.minus.scale) > 1e-15 * max(self.plus.scale, self.minus.scale):
            raise ValueError("both sides must share the same scale convention")

    @property
    def is_rational(self) -> bool:
        return self.plus.is_rational and self.minus.is_rational

    def side(self, which: str) -> DielectricModel:
        if which in ("+", "plus"):
            return self.plus
        if which in ("-", "minus"):
            return self.minus
        raise ValueError(f"side must be '+' or '-', got {which!r}")


@lru_cache(maxsize=256)
def singular_points(problem: InterfaceProblem, tol: Tolerances = DEFAULT_TOL) -> tuple:
    """S for the interface problem: union of both sides' poles."""
    pts = list(singular_set(problem.plus, tol))
    for q in singular_set(problem.minus, tol):
        if _near(q, pts, tol.ray_imag_tol * (1.0 + abs(q))) is None:
            pts.append(q)
    pts.sort(key=lambda z: (z.real, z.imag))
    return tuple(pts)


def which_pole_side(problem: InterfaceProblem, omega: complex, tol: Tolerances = DEFAULT_TOL):
    """(pole, side-label) if omega sits on S, else None."""
    for side, model in (("plus", problem.plus), ("minus", problem.minus)):
        p = _near(complex(omega), singular_set(model, tol), tol.ray_imag_tol)
        if p is not None:
            return p, side
    return None


@dataclass(frozen=True)
class Omega0Point:
    """One element of the exceptional set, tagged with what vanishes there."""

    omega: complex
    plus_vanishes: bool          # W_+(omega) = 0
    minus_vanishes: bool         # W_-(omega) = 0
    wtilde_plus_zero: bool       # W-tilde_+(omega) = 0 (not just the omega^2 factor)
    wtilde_minus_zero: bool


def _w_zero_candidates(model: DielectricModel, tol: Tolerances):
    """Zeros of W_side = omega^2 * scale * num/den before domain filtering."""
    cands = [0j]
    if len(model.numerator) > 1:
        cands.extend(z for z, _ in poly_roots(model.numerator, tol))
    return cands


@lru_cache(maxsize=256)
def omega0_set(problem: InterfaceProblem, tol: Tolerances = DEFAULT_TOL) -> tuple:
    """The exceptional set Omega_0 = {omega in D(W-tilde): W_+ = 0 or W_- = 0}.

    Only rational models are supported: denominators are cleared so the set is
    an exact polynomial problem. Each returned point carries side tags.
    """
    if not problem.is_rational:
        raise UnsupportedModelError("omega0_set needs rational models on both sides")
    poles = singular_points(problem, tol)

    pts: list[complex] = []
    for model in (problem.plus, problem.minus):
        for z in _w_zero_candidates(model, tol):
            if _near(z, poles, tol.ray_imag_tol * (1.0 + abs(z))) is not None:
                continue  # not in D(W-tilde)
            if _near(z, pts, 10 * tol.ray_imag_tol * (1.0 + abs(z))) is None:
                pts.append(z)

    out = []
    for z in pts:
        wt_p = wtilde(problem.plus, z, tol)
        wt_m = wtilde(problem.minus, z, tol)
        m = max(abs(wt_p), abs(wt_m), 1.0)
        zz = max(abs(z) ** 2, 1.0)
        w_p = z * z * wt_p
        w_m = z * z * wt_m
        plus_v = abs(w_p) <= tol.equality_tol * m * zz
        minus_v = abs(w_m) <= tol.equality_tol * m * zz
        if not (plus_v or minus_v):
            continue  # spurious candidate (e.g. clustered duplicate)
        out.append(Omega0Point(
            omega=z,
            plus_vanishes=plus_v,
            minus_vanishes=minus_v,
            wtilde_plus_zero=abs(wt_p) <= tol.equality_tol * m,
            wtilde_minus_zero=abs(wt_m) <= tol.equality_tol * m,
        ))
    out.sort(key=lambda p: (p.omega.real, p.omega.imag))
    return tuple(out)


def near_omega0(problem: InterfaceProblem, omega: complex, tol: Tolerances = DEFAULT_TOL):
    """The Omega0Point within ray_imag_tol of omega, or None.

    For black-box models, falls back to the pointwise test |W_pm| <= tol*scale.
    """
    omega = complex(omega)
    if problem.is_rational:
        for p in omega0_set(problem, tol):
            if abs(omega - p.omega) <= tol.ray_imag_tol:
                return p
        return None
    wt_p = wtilde(problem.plus, omega, tol)
    wt_m = wtilde(problem.minus, omega, tol)
    m = max(abs(wt_p), abs(wt_m), 1.0)
    zz = max(abs(omega) ** 2, 1.0)
    plus_v = abs(omega * omega * wt_p) <= tol.equality_tol * m * zz
    minus_v = abs(omega * omega * wt_m) <= tol.equality_tol * m * zz
    if plus_v or minus_v:
        return Omega0Point(
            omega=omega, plus_vanishes=plus_v, minus_vanishes=minus_v,
            wtilde_plus_zero=abs(wt_p) <= tol.equality_tol * m,
            wtilde_minus_zero=abs(wt_m) <= tol.equality_tol * m,
        )
    return None
