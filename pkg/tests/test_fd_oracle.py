import math

import numpy as np
import pytest

from pencil_spectra import (
    DielectricModel,
    InterfaceProblem,
    direct_solve,
    eigen_omegas,
    lambda_isolation_probe,
    shoot_determinant,
    solve,
)
from pencil_spectra.errors import PreconditionError
from pencil_spectra.fd_oracle import discretize, shoot_refine, smallest_singular_value
from pencil_spectra.modes import bump
from pencil_spectra.resolvent import RhsField, make_grid
from tests.conftest import PLASMON, QUARTIC_HI
import scipy.sparse as sp


def _bump_rhs(grid, k):
    r2 = lambda x: bump((np.asarray(x, dtype=float) - 1.5) / 0.5)
    return RhsField.from_callables(grid, k, r2_fn=r2, r3_fn=r2, support=(1.0, 2.0))


def test_direct_solve_zero_rhs(drude_problem):
    grid = make_grid(6.0, 1 / 50)
    disc = discretize(0.5j, 3.0, drude_problem, grid=grid)
    r = RhsField.from_callables(grid, 3.0)
    u = direct_solve(0.5j, 3.0, r, disc)
    assert np.allclose(u, 0.0)


def test_direct_vs_closed_form_convergence(drude_problem):
    k, omega = 3.0, 0.5j
    errs = {}
    for h in (1 / 50, 1 / 100, 1 / 200):
        grid = make_grid(8.0, h)
        r = _bump_rhs(grid, k)
        sol = solve(omega, k, r, drude_problem)
        disc = discretize(omega, k, drude_problem, grid=grid)
        u_fd = direct_solve(omega, k, r, disc)
        num = math.sqrt(sum(float(np.sum(np.abs(sol.u[j] - u_fd[j]) ** 2)) for j in range(3)))
        den = math.sqrt(sum(float(np.sum(np.abs(sol.u[j]) ** 2)) for j in range(3)))
        errs[h] = num / den
    assert errs[1 / 200] <= 1e-3
    order1 = math.log2(errs[1 / 50] / errs[1 / 100])
    order2 = math.log2(errs[1 / 100] / errs[1 / 200])
    assert order1 >= 1.9 and order2 >= 1.9


def test_direct_solve_k0(equal_problem):
    # cross-check the k = 0 scalar path against the closed form
    k, omega = 0.0, 3j
    grid = make_grid(8.0, 1 / 100)
    r = _bump_rhs(grid, k)
    sol = solve(omega, k, r, equal_problem)
    disc = discretize(omega, k, equal_problem, grid=grid)
    u_fd = direct_solve(omega, k, r, disc)
    den = np.abs(sol.u[1]).max()
    assert np.abs(sol.u[1] - u_fd[1]).max() <= 2e-4 * den
    assert np.abs(sol.u[2] - u_fd[2]).max() <= 2e-4 * den


def test_u3_block_bitwise_consistency(drude_problem):
    import scipy.sparse.linalg as spla

    grid = make_grid(6.0, 1 / 50)
    disc = discretize(0.5j, 3.0, drude_problem, grid=grid)
    r = _bump_rhs(grid, 3.0)
    u_full = direct_solve(0.5j, 3.0, r, disc)
    b3 = np.zeros(grid.x.size, dtype=complex)
    b3[disc.eq_rows_3] = r.r3[disc.rhs_node_3[disc.eq_rows_3]]
    u3_alone = spla.splu(disc.block3).solve(b3)
    assert np.array_equal(u3_alone, u_full[2])


def test_shoot_determinant_at_modes(lossless_problem):
    modes = eigen_omegas(3.0, lossless_problem)
    for m in modes:
        assert abs(shoot_determinant(m.omega, 3.0, lossless_problem)) < 1e-9
    # sweep near the positive root: the (purely imaginary) determinant flips
    om_grid = np.linspace(PLASMON - 0.05, PLASMON + 0.05, 11)
    vals = [shoot_determinant(float(om), 3.0, lossless_problem) for om in om_grid]
    signs = [v.imag for v in vals]
    assert signs[0] * signs[-1] < 0


def test_shoot_refine_matches_polynomial(lossless_problem):
    root = shoot_refine(PLASMON + 1e-3, 3.0, lossless_problem)
    assert abs(root - PLASMON) < 1e-6


def test_shoot_zeros_bijective_on_window(lossless_problem):
    # on (0, 2] the determinant vanishes exactly once, at the single mode there
    oms = np.linspace(0.2, 2.0, 91)
    vals = np.array([shoot_determinant(complex(om), 3.0, lossless_problem).imag
                     for om in oms])
    crossings = np.where(np.diff(np.sign(vals)) != 0)[0]
    assert len(crossings) == 1
    lo, hi = oms[crossings[0]], oms[crossings[0] + 1]
    assert lo <= PLASMON <= hi
    refined = shoot_refine(0.5 * (lo + hi), 3.0, lossless_problem)
    modes_in_window = [m for m in eigen_omegas(3.0, lossless_problem)
                       if 0.2 <= m.omega.real <= 2.0]
    assert len(modes_in_window) == 1
    assert abs(refined - modes_in_window[0].omega) < 1e-6


def test_shoot_no_modes_equal_media(equal_problem):
    vals = []
    for om in np.linspace(0.2, 2.5, 12):
        try:
            vals.append(abs(shoot_determinant(complex(om), 3.0, equal_problem)))
        except PreconditionError:
            continue
    assert vals and min(vals) > 1e-3


def test_shoot_rejected_root(lossless_problem):
    # the rejected biquadratic root sits inside M+: no decaying solution there,
    # and just off the ray no eigenvalue exists either
    with pytest.raises(PreconditionError):
        shoot_determinant(QUARTIC_HI, 3.0, lossless_problem)
    assert abs(shoot_determinant(QUARTIC_HI + 0.05j, 3.0, lossless_problem)) > 1e-3


def test_shoot_k0_rejected(equal_problem):
    with pytest.raises(PreconditionError):
        shoot_determinant(0.5j, 0.0, equal_problem)


def test_lambda_probe_isolation(lossless_problem):
    mode = [m for m in eigen_omegas(3.0, lossless_problem)
            if abs(m.omega - PLASMON) < 1e-9][0]
    grid = make_grid(12.0, 1 / 200)
    rep = lambda_isolation_probe(mode.omega, 3.0, lossless_problem, grid=grid)
    assert rep.separation_factor >= 100.0
    assert rep.isolated
    rep_ess = lambda_isolation_probe(3.0, 3.0, lossless_problem, grid=grid)
    assert rep_ess.separation_factor < 100.0
    rep_rho = lambda_isolation_probe(0.5j, 3.0, lossless_problem, grid=grid)
    assert rep_rho.separation_factor < 10.0
    assert rep_rho.sigma_at_one > 0.5 * min(rep_rho.ring_minima)


def test_smallest_singular_value_agrees_dense():
    rng = np.random.default_rng(42)
    n = 600
    d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    A = sp.diags(d, format="csc") + sp.random(n, n, density=0.01, random_state=1,
                                              dtype=float, format="csc") * (0.1 + 0j)
    dense = np.linalg.svd(A.toarray(), compute_uv=False)[-1]
    fast = smallest_singular_value(A.tocsc())
    assert abs(fast - dense) <= 1e-6 * dense


def test_discretize_grid_mismatch(drude_problem):
    g1 = make_grid(6.0, 1 / 50)
    g2 = make_grid(6.0, 1 / 40)
    disc = discretize(0.5j, 3.0, drude_problem, grid=g1)
    r = _bump_rhs(g2, 3.0)
    with pytest.raises(PreconditionError):
        direct_solve(0.5j, 3.0, r, disc)
