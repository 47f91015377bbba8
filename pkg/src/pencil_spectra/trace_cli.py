"""Command-line front end: classify points, trace portraits, find modes,
solve resolvent problems, and run the oracle cross-check suites.

Subcommands: classify, trace, eigen, resolve, check. Outputs are plain CSV
(byte-deterministic for fixed inputs) and a minimal hand-written SVG raster
with overlay markers; no timestamps are emitted. The environment variable
PENCIL_SPECTRA_TOL ("name=value,name=value") overrides default tolerances.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classify1d import SpectrumClass, classify
from .classify2d import classify2, in_N2
from .complex_numerics import Tolerances, poly_roots
from .config import load_problem
from .dielectric import InterfaceProblem, omega0_set, singular_points, wtilde
from .errors import PencilSpectraError, PreconditionError
from .fd_oracle import (
    default_grid,
    direct_solve,
    discretize,
    lambda_isolation_probe,
    shoot_determinant,
    shoot_refine,
)
from .modes import (
    bump,
    eigen_omegas,
    eigenvalue_polynomial,
    fit_loglog_slope,
    mode_residual,
    weyl_2d_interface_report,
    weyl_sequence_1d,
)
from .resolvent import RhsField, make_grid, save_field_csv, solve, verify

_COLORS = {
    "resolvent": "#ffffff",
    "M+": "#3465a4",
    "M-": "#cc0000",
    "N": "#000000",
    "Omega0": "#4e9a06",
    "S": "#555753",
}


@dataclass
class PortraitGrid:
    """Classified omega-grid plus overlay geometry for one portrait."""

    re_axis: np.ndarray
    im_axis: np.ndarray
    cells: list            # row-major SpectrumClass records
    classes: list          # display class per cell (after marker stamping)
    overlays: dict         # name -> list of complex points (or curves)
    k: float | None        # None for the 2D portrait
    dim: int


def _classify_chunk(args):
    points, k, problem, dim, tol = args
    if dim == 1:
        return [classify(om, k, problem, tol) for om in points]
    return [classify2(om, problem, tol) for om in points]


def trace_portrait(problem: InterfaceProblem, grid_spec, k: float | None,
                   dim: int, tol: Tolerances, workers: int = 1,
                   overlays: bool = True) -> PortraitGrid:
    (re0, re1, nx), (im0, im1, ny) = grid_spec
    re_axis = np.linspace(re0, re1, nx)
    im_axis = np.linspace(im0, im1, ny)
    points = [complex(re, im) for im in im_axis for re in re_axis]

    if workers > 1:
        chunks = np.array_split(np.asarray(points, dtype=complex), workers * 4)
        jobs = [(list(map(complex, c)), k, problem, dim, tol) for c in chunks if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = [rec for part in pool.map(_classify_chunk, jobs) for rec in part]
    else:
        cells = _classify_chunk((points, k, problem, dim, tol))

    classes = [rec.raster_class() for rec in cells]

    ov: dict = {}
    if overlays and problem.is_rational:
        ov["S"] = list(singular_points(problem, tol))
        ov["Omega0"] = [p.omega for p in omega0_set(problem, tol)]
        if dim == 1 and k is not None:
            ov["N"] = [m.omega for m in eigen_omegas(k, problem, tol)]
            curve = _m_minus_boundary(problem, k)
            if curve:
                ov["M-boundary"] = curve
            rays = _m_plus_rays(problem, k, re0, re1)
            if rays:
                ov["M+rays"] = rays
        elif dim == 2:
            ov["N"] = _n_points_2d(problem, tol)
            rays = _m_plus_rays(problem, 0.0, re0, re1)
            if rays:
                ov["M+rays"] = rays

    pg = PortraitGrid(re_axis=re_axis, im_axis=im_axis, cells=cells,
                      classes=classes, overlays=ov, k=k, dim=dim)
    _stamp_markers(pg)
    return pg


def _stamp_markers(pg: PortraitGrid) -> None:
    """Mark the cells containing overlay points so the CSV mirrors the marker layer."""
    nx = pg.re_axis.size
    for name in ("N", "Omega0", "S"):
        for z in pg.overlays.get(name, []):
            i = int(np.argmin(np.abs(pg.re_axis - z.real)))
            j = int(np.argmin(np.abs(pg.im_axis - z.imag)))
            dre = abs(pg.re_axis[i] - z.real)
            dim_ = abs(pg.im_axis[j] - z.imag)
            step_re = pg.re_axis[1] - pg.re_axis[0] if nx > 1 else math.inf
            step_im = pg.im_axis[1] - pg.im_axis[0] if pg.im_axis.size > 1 else math.inf
            if dre <= step_re and dim_ <= step_im:
                pg.classes[j * nx + i] = name


def _m_plus_rays(problem: InterfaceProblem, k: float, re0: float, re1: float):
    """Closed-form real rays of M_+ when the plus side is a positive constant.

    c omega^2 in [k^2, inf) on the real axis: |omega| >= sqrt(k^2/c); the 2D
    case is k = 0 with the origin excluded. Returned as segment endpoint
    pairs clipped to [re0, re1].
    """
    p = problem.plus
    if p.kind != "constant" or len(p.numerator) != 1:
        return None
    c = p.numerator[0] * p.scale
    if abs(c.imag) > 0 or c.real <= 0:
        return None
    edge = math.sqrt(k * k / c.real)
    segs = []
    if re1 > edge:
        segs.append((max(re0, edge), re1))
    if re0 < -edge:
        segs.append((re0, min(re1, -edge)))
    return segs or None


def _m_minus_boundary(problem: InterfaceProblem, k: float):
    """Closed-form M- lobe boundary for the Drude metal example (background 1)."""
    m = problem.minus
    if m.kind != "drude" or m.background != 1.0 or m.scale != 1.0 or not m.gamma:
        return None
    wp, g = m.omega_p, m.gamma
    pts = []
    for s in np.linspace(-g / 2 + 1e-9, -1e-9, 4001):
        rad = -math.pi * wp**2 * g / s - (s + g) ** 2
        cond = (math.pi * wp**2 / s) * (2 * s + g) + (2 * s + g) ** 2
        if rad >= 0.0 and cond <= -k * k:
            r = math.sqrt(rad)
            pts.append(complex(r, s))
            pts.append(complex(-r, s))
    return pts


def _n_points_2d(problem: InterfaceProblem, tol: Tolerances, n_a: int = 160):
    """Sample the 2D interface set N by sweeping the witness a over a log grid."""
    pts = []
    for a in np.geomspace(1e-3, 1e3, n_a):
        try:
            q = eigenvalue_polynomial(math.sqrt(a), problem)
            roots = [z for z, _ in poly_roots(q, tol)]
        except PencilSpectraError:
            continue
        for z in roots:
            try:
                ok, _ = in_N2(z, problem, tol)
            except PencilSpectraError:
                continue
            if ok:
                pts.append(z)
    return pts


def write_portrait_csv(path, pg: PortraitGrid) -> None:
    nx = pg.re_axis.size
    with open(path, "w", newline="") as fh:
        fh.write("re,im,class,branch_note\n")
        for j, im in enumerate(pg.im_axis):
            for i, re in enumerate(pg.re_axis):
                cell = pg.cells[j * nx + i]
                fh.write(f"{re:.12g},{im:.12g},{pg.classes[j * nx + i]},{cell.branch_note}\n")


def write_portrait_svg(path, pg: PortraitGrid, width: int = 720) -> None:
    nx, ny = pg.re_axis.size, pg.im_axis.size
    re0, re1 = float(pg.re_axis[0]), float(pg.re_axis[-1])
    im0, im1 = float(pg.im_axis[0]), float(pg.im_axis[-1])
    sx = width / max(re1 - re0, 1e-12)
    height = int(round((im1 - im0) * sx)) or 1
    sy = height / max(im1 - im0, 1e-12)

    def px(z):
        return ((z.real - re0) * sx, (im1 - z.imag) * sy)

    cw = width / nx
    ch = height / ny
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for j in range(ny):
        i = 0
        while i < nx:
            cls = pg.classes[j * nx + i]
            i2 = i
            while i2 + 1 < nx and pg.classes[j * nx + i2 + 1] == cls:
                i2 += 1
            if cls != "resolvent":
                x0 = i * cw
                y0 = (ny - 1 - j) * ch
                parts.append(
                    f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{(i2 - i + 1) * cw:.2f}" '
                    f'height="{ch:.2f}" fill="{_COLORS.get(cls, "#888888")}"/>')
            i = i2 + 1
    for a, b in pg.overlays.get("M+rays", []):
        xa, ya = px(complex(a, 0.0))
        xb, _ = px(complex(b, 0.0))
        parts.append(f'<line x1="{xa:.2f}" y1="{ya:.2f}" x2="{xb:.2f}" y2="{ya:.2f}" '
                     f'stroke="{_COLORS["M+"]}" stroke-width="3"/>')
    for z in pg.overlays.get("M-boundary", []):
        xpix, ypix = px(z)
        parts.append(f'<circle cx="{xpix:.2f}" cy="{ypix:.2f}" r="0.8" fill="#cc0000"/>')
    for z in pg.overlays.get("N", []):
        xpix, ypix = px(z)
        parts.append(f'<circle cx="{xpix:.2f}" cy="{ypix:.2f}" r="4" fill="#000000"/>')
    for z in pg.overlays.get("Omega0", []):
        xpix, ypix = px(z)
        parts.append(f'<circle cx="{xpix:.2f}" cy="{ypix:.2f}" r="4" fill="none" '
                     f'stroke="#4e9a06" stroke-width="2"/>')
    for z in pg.overlays.get("S", []):
        xpix, ypix = px(z)
        parts.append(f'<path d="M {xpix - 4:.2f} {ypix - 4:.2f} L {xpix + 4:.2f} {ypix + 4:.2f} '
                     f'M {xpix - 4:.2f} {ypix + 4:.2f} L {xpix + 4:.2f} {ypix - 4:.2f}" '
                     f'stroke="#555753" stroke-width="2"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _parse_omega(text: str) -> complex:
    re_s, _, im_s = text.partition(",")
    return complex(float(re_s), float(im_s or 0.0))


def _parse_grid(text: str):
    re_part, _, im_part = text.partition(",")
    def axis(part):
        a, b, n = part.split(":")
        return float(a), float(b), int(n)
    return axis(re_part), axis(im_part)


def _describe(record: SpectrumClass) -> str:
    if not record.in_domain:
        return f"outside D(W~): {record.branch_note}"
    if record.resolvent:
        return "resolvent"
    bits = []
    if record.point_finite:
        bits.append("point (finite multiplicity)")
    if record.point_infinite:
        bits.append("point (infinite multiplicity)")
    if record.discrete:
        bits.append("discrete")
    if record.weyl:
        ess = "e1-e5" if record.e1 else ("e2-e5" if record.e2 else "e5")
        bits.append(f"essential (Weyl, {ess})")
    elif record.e5:
        bits.append("e5 only")
    return ", ".join(bits) + f"  [{record.branch_note}]"


def cmd_classify(args, tol) -> int:
    problem = load_problem(args.config)
    omega = _parse_omega(args.omega)
    if args.dim == 2:
        rec = classify2(omega, problem, tol)
    else:
        rec = classify(omega, float(args.k), problem, tol)
    print(f"omega = {omega}  ->  {_describe(rec)}")
    flags = [int(b) for b in (rec.in_domain, rec.in_omega0) + rec.flags()]
    print("csv:", ",".join(
        [f"{omega.real:.12g}", f"{omega.imag:.12g}", rec.raster_class(), rec.branch_note]
        + [str(b) for b in flags]))
    return 0


def cmd_trace(args, tol) -> int:
    problem = load_problem(args.config)
    grid_spec = _parse_grid(args.grid)
    k = float(args.k) if args.k is not None else None
    dim = 2 if args.dim == 2 else 1
    if dim == 1 and k is None:
        raise PencilSpectraError("1D trace needs --k (or pass --dim 2)")
    pg = trace_portrait(problem, grid_spec, k, dim, tol,
                        workers=args.workers, overlays=not args.no_overlays)
    import os
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "portrait.csv")
    svg_path = os.path.join(args.out, "portrait.svg")
    write_portrait_csv(csv_path, pg)
    write_portrait_svg(svg_path, pg)
    counts = {}
    for c in pg.classes:
        counts[c] = counts.get(c, 0) + 1
    print(f"wrote {csv_path} and {svg_path}; cell counts: "
          + ", ".join(f"{k_}={v}" for k_, v in sorted(counts.items())))
    return 0


def _parse_k_range(text: str):
    if ":" in text:
        a, b, n = text.split(":")
        return list(np.linspace(float(a), float(b), int(n)))
    return [float(text)]


def eigen_table(problem: InterfaceProblem, ks, tol):
    """Mode rows over a k sweep with greedy branch-continuity tracking."""
    rows = []
    last: dict = {}
    next_id = 0
    for k in ks:
        modes = eigen_omegas(float(k), problem, tol)
        current: dict = {}
        for m in modes:
            best = None
            for bid, om in last.items():
                if bid in current:
                    continue
                d = abs(m.omega - om)
                if best is None or d < best[1]:
                    best = (bid, d)
            if best is not None and best[1] <= 0.5 * (1.0 + abs(m.omega)):
                bid = best[0]
            else:
                bid = next_id
                next_id += 1
            current[bid] = m.omega
            rows.append((float(k), bid, m))
        last = current or last
    return rows


def cmd_eigen(args, tol) -> int:
    problem = load_problem(args.config)
    ks = _parse_k_range(args.k)
    rows = eigen_table(problem, ks, tol)
    header = ("k,branch,re_omega,im_omega,re_mu_plus,im_mu_plus,"
              "re_mu_minus,im_mu_minus,residual")
    lines = [header]
    for k, bid, m in rows:
        grid = np.linspace(-8.0, 8.0, 257)
        grid = grid[grid != 0.0]
        res = mode_residual(m, grid, problem, tol)
        lines.append(
            f"{k:.12g},{bid},{m.omega.real:.12g},{m.omega.imag:.12g},"
            f"{m.mu_plus.real:.12g},{m.mu_plus.imag:.12g},"
            f"{m.mu_minus.real:.12g},{m.mu_minus.imag:.12g},{res:.6g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        import os
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "modes.csv")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path} ({len(rows)} modes)")
    else:
        sys.stdout.write(text)
    if not rows:
        if all(k == 0.0 for k in ks):
            print("note: N^(0) is empty; there are no plasmon modes at k = 0")
        else:
            print("note: no plasmon modes found for the given media and k values")
    return 0


def cmd_resolve(args, tol) -> int:
    problem = load_problem(args.config)
    omega = _parse_omega(args.omega)
    k = float(args.k)
    lo, hi = (float(v) for v in args.support.split(":"))
    h = float(args.h)
    from .resolvent import suggest_half_length
    L = suggest_half_length(omega, k, problem, max(abs(lo), abs(hi)), h, tol)
    grid = make_grid(L, h)
    center, width = 0.5 * (lo + hi), 0.5 * (hi - lo)
    r2 = lambda x: bump((np.asarray(x) - center) / width)
    r = RhsField.from_callables(grid, k, r2_fn=r2, r3_fn=r2, support=(lo, hi))
    sol = solve(omega, k, r, problem, tol)
    rep = verify(sol, r, omega, k, problem, tol)
    import os
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "resolvent.csv")
    save_field_csv(path, grid.x, sol.u)
    print(f"wrote {path} (L={L:g}, h={h:g}, N={grid.x.size})")
    print(f"C2 = {sol.C2:.9g}  C3 = {sol.C3:.9g}")
    print(f"ode residual (rel) = {rep.ode_residual_max:.3e}")
    print(f"interface jumps (rel) = " + ", ".join(f"{j:.3e}" for j in rep.jumps))
    print(f"norm ratio ||u||/||r|| = {rep.norm_ratio:.6g}")
    return 0


# ---------------------------------------------------------------------------
# check suites
# ---------------------------------------------------------------------------


def _find_resolvent_point(problem, k, tol):
    for om in (0.5j, 0.3 + 0.4j, 0.2j, 1e-2 + 0.7j, -0.6 + 0.25j):
        if classify(om, k, problem, tol).resolvent:
            return om
    raise PencilSpectraError("no trial resolvent point found for this configuration")


def _suite_shoot(problem, k, tol):
    modes = eigen_omegas(k, problem, tol)
    if not modes:
        dets = []
        for om in np.linspace(0.1, 4.0, 9):
            try:
                dets.append(abs(shoot_determinant(complex(om), k, problem, tol)))
            except PreconditionError:
                continue
        if dets and min(dets) < 1e-6:
            return False, f"no modes expected but |det| dips to {min(dets):.2e}"
        if dets:
            return True, f"no modes; determinant stays >= {min(dets):.2e}"
        return True, "no modes; no admissible shooting points on the sample"
    worst = 0.0
    for m in modes:
        root = shoot_refine(m.omega * (1 + 1e-5) + 1e-7, k, problem, tol)
        worst = max(worst, abs(root - m.omega))
    ok = worst <= 1e-6
    return ok, f"{len(modes)} mode(s); max |shoot_root - polynomial_root| = {worst:.2e}"


def _suite_lambda(problem, k, tol):
    modes = eigen_omegas(k, problem, tol)
    if not modes:
        return True, "no modes; isolation probe skipped"
    # probe the best-localized mode: weak decay rates force very long domains
    mode = max(modes, key=lambda m: min(m.mu_plus.real, m.mu_minus.real))
    rep = lambda_isolation_probe(mode.omega, k, problem, tol=tol)
    ok = rep.separation_factor >= 100.0
    return ok, (f"sigma(lambda=1) = {rep.sigma_at_one:.3e}, ring min = "
                f"{min(rep.ring_minima):.3e}, factor = {rep.separation_factor:.1f}")


def _suite_resolvent(problem, k, tol):
    omega = _find_resolvent_point(problem, k, tol)
    errs = {}
    for h in (1 / 50, 1 / 100, 1 / 200):
        grid = make_grid(8.0, h)
        width = 0.5
        r2 = lambda x: bump((np.asarray(x) - 1.5) / width)
        r = RhsField.from_callables(grid, k, r2_fn=r2, r3_fn=r2, support=(1.0, 2.0))
        sol = solve(omega, k, r, problem, tol)
        disc = discretize(omega, k, problem, grid=grid, tol=tol)
        u_fd = direct_solve(omega, k, r, disc)
        num = np.sqrt(sum(np.sum(np.abs(sol.u[j] - u_fd[j]) ** 2) for j in range(3)))
        den = np.sqrt(sum(np.sum(np.abs(sol.u[j]) ** 2) for j in range(3)))
        errs[h] = float(num / den)
    order1 = math.log2(errs[1 / 50] / errs[1 / 100])
    order2 = math.log2(errs[1 / 100] / errs[1 / 200])
    ok = errs[1 / 200] <= 1e-3 and min(order1, order2) >= 1.9
    return ok, (f"rel err(h=1/200) = {errs[1/200]:.2e}; orders = "
                f"{order1:.2f}, {order2:.2f}")


def _suite_weyl(problem, k, tol):
    ns = [8, 16, 32, 64]
    details = []
    ok = True
    ess = None
    for om in (3.0, 4.0, 6.0, 2.0, 9.0):
        try:
            s = weyl_sequence_1d(complex(om), k, 8, "+", "plane_wave", problem, tol)
            ess = complex(om)
            break
        except PreconditionError:
            continue
    if ess is None:
        details.append("no 1D plane-wave point found")
    else:
        res = [weyl_sequence_1d(ess, k, n, "+", "plane_wave", problem, tol).residual_norm
               for n in ns]
        slope = fit_loglog_slope(ns, res)
        details.append(f"1D slope = {slope:.3f}")
        ok = ok and -1.15 <= slope <= -0.85
    found = None
    for t in np.linspace(0.05, 3.0, 60):
        try:
            hit, a = in_N2(-1j * t, problem, tol)
        except PencilSpectraError:
            continue
        if hit:
            found = (-1j * t, a)
            break
    if found is None:
        details.append("no interface-guided 2D point; skipped")
    else:
        om2, a = found
        res2 = [weyl_2d_interface_report(om2, a, n, problem, tol).residual_norm for n in ns]
        slope2 = fit_loglog_slope(ns, res2)
        details.append(f"2D slope = {slope2:.3f}")
        ok = ok and -1.15 <= slope2 <= -0.85
    return ok, "; ".join(details)


def cmd_check(args, tol) -> int:
    problem = load_problem(args.config)
    k = float(args.k)
    suites = [
        ("shoot-vs-polynomial", _suite_shoot),
        ("lambda-isolation", _suite_lambda),
        ("resolvent-convergence", _suite_resolvent),
        ("weyl-slopes", _suite_weyl),
    ]
    all_ok = True
    for name, fn in suites:
        t0 = time.perf_counter()
        try:
            ok, detail = fn(problem, k, tol)
        except PencilSpectraError as exc:
            ok, detail = False, f"error: {exc}"
        dt = time.perf_counter() - t0
        all_ok = all_ok and ok
        print(f"{'PASS' if ok else 'FAIL'} {name} ({dt:.1f}s): {detail}")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pencil-spectra",
        description="Spectral classification of the Maxwell interface pencil")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="material config file")

    sp = sub.add_parser("classify", help="classify one omega")
    common(sp)
    sp.add_argument("--omega", required=True, help="re,im")
    sp.add_argument("--k", default="0.0", help="1D wavenumber")
    sp.add_argument("--dim", type=int, choices=(1, 2), default=1)

    sp = sub.add_parser("trace", help="classify an omega grid; write CSV + SVG")
    common(sp)
    sp.add_argument("--grid", required=True, help="re0:re1:nx,im0:im1:ny")
    sp.add_argument("--k", default=None, help="1D wavenumber")
    sp.add_argument("--dim", type=int, choices=(1, 2), default=1)
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-overlays", action="store_true")

    sp = sub.add_parser("eigen", help="plasmon mode table over k or a k range")
    common(sp)
    sp.add_argument("--k", required=True, help="k or k0:k1:n")
    sp.add_argument("--out", default=None, help="output directory (default: stdout)")

    sp = sub.add_parser("resolve", help="solve (T_k - W) u = r for a bump rhs")
    common(sp)
    sp.add_argument("--omega", required=True, help="re,im")
    sp.add_argument("--k", default="0.0")
    sp.add_argument("--support", default="1:2", help="rhs support lo:hi")
    sp.add_argument("--h", default="0.005", help="grid spacing")
    sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("check", help="run the oracle cross-check suites")
    common(sp)
    sp.add_argument("--k", default="3.0")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances.from_env()
    except ValueError as exc:
        print(f"FAIL configuration: {exc}", file=sys.stderr)
        return 2
    try:
        handler = {
            "classify": cmd_classify,
            "trace": cmd_trace,
            "eigen": cmd_eigen,
            "resolve": cmd_resolve,
            "check": cmd_check,
        }[args.command]
        return handler(args, tol)
    except PencilSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
