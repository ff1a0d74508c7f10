"""Superlevel sets of solved fields and the radial facts they should obey.

A slice at height t carries the contour polylines of {u = t}, the area and
perimeter of {u > t}, and per-core-ray thickness samples d_t found by
bisecting the field along each normal ray.  On top of slices this module
checks the thickness rate equation, the ray reconstruction of the profile,
contour curvature in two discretizations, first-order boundary detachment,
coarea identities, the per-slice flux balance, and star-shapedness.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .errors import (DegenerateSlice, LevelOutOfRange, RayMisses,
                     VanishingGradient)
from .solver import ScalarField, GradientField, gradient, boundary_gradient_magnitude

EPS_CRIT = 0.02
GRAD_FLOOR_FRAC = 1e-6
RAY_TOL_FRAC = 0.1          # default bisection tolerance, fraction of h
TIGHT_TOL = 1e-12


# ---------------------------------------------------------------------------
# marching squares

# case -> list of (entry edge, exit edge), region {u > t} on the left
_CASES = {
    0: [], 15: [],
    1: [("S", "W")], 2: [("E", "S")], 3: [("E", "W")],
    4: [("N", "E")], 6: [("N", "S")], 7: [("N", "W")],
    8: [("W", "N")], 9: [("S", "N")], 11: [("E", "N")],
    12: [("W", "E")], 13: [("S", "E")], 14: [("W", "S")],
}
_SADDLE_HI = {5: [("S", "E"), ("N", "W")], 10: [("E", "N"), ("W", "S")]}
_SADDLE_LO = {5: [("S", "W"), ("N", "E")], 10: [("E", "S"), ("W", "N")]}


def _edge_key(edge, i, j):
    if edge == "S":
        return ("h", i, j)
    if edge == "N":
        return ("h", i, j + 1)
    if edge == "W":
        return ("v", i, j)
    return ("v", i + 1, j)


def _march(values, t, origin, h):
    """Contours of {values = t} with {values > t} kept on the left.

    Returns (closed loops, open chains, area of {values > t}).
    """
    b = values > t
    ny, nx = values.shape
    inner = b[:-1, :-1]
    full = inner & b[:-1, 1:] & b[1:, :-1] & b[1:, 1:]
    anyc = inner | b[:-1, 1:] | b[1:, :-1] | b[1:, 1:]
    mixed = anyc & ~full
    area = float(full.sum()) * h * h

    x0, y0 = origin
    pts = {}
    segs = []
    for j, i in np.argwhere(mixed):
        v00 = values[j, i]
        v10 = values[j, i + 1]
        v01 = values[j + 1, i]
        v11 = values[j + 1, i + 1]
        case = (int(v00 > t) + 2 * int(v10 > t)
                + 4 * int(v11 > t) + 8 * int(v01 > t))
        xi = x0 + i * h
        yj = y0 + j * h

        def cross(key, va, vb):
            if key not in pts:
                f = (t - va) / (vb - va)
                f = min(max(f, 0.0), 1.0)
                e, ii, jj = key
                if e == "h":
                    pts[key] = (x0 + (ii + f) * h, y0 + jj * h)
                else:
                    pts[key] = (x0 + ii * h, y0 + (jj + f) * h)
            return pts[key]

        local = {}
        if (v00 > t) != (v10 > t):
            local["S"] = cross(_edge_key("S", i, j), v00, v10)
        if (v10 > t) != (v11 > t):
            local["E"] = cross(_edge_key("E", i, j), v10, v11)
        if (v01 > t) != (v11 > t):
            local["N"] = cross(_edge_key("N", i, j), v01, v11)
        if (v00 > t) != (v01 > t):
            local["W"] = cross(_edge_key("W", i, j), v00, v01)

        if case in (5, 10):
            hi = 0.25 * (v00 + v10 + v01 + v11) > t
            table = _SADDLE_HI[case] if hi else _SADDLE_LO[case]
        else:
            table = _CASES[case]
        for a, bb in table:
            segs.append((_edge_key(a, i, j), _edge_key(bb, i, j)))

        # fractional area of {values > t} inside this cell
        corners = [((xi, yj), v00 > t), ((xi + h, yj), v10 > t),
                   ((xi + h, yj + h), v11 > t), ((xi, yj + h), v01 > t)]
        ring = []
        order = ["S", "E", "N", "W"]
        for k in range(4):
            ring.append(corners[k])
            e = order[k]
            if e in local:
                ring.append((local[e], None))
        if case in (5, 10):
            hi = 0.25 * (v00 + v10 + v01 + v11) > t
            if hi:
                poly = [p for p, flag in ring if flag is None or flag]
                area += _shoelace(poly)
            else:
                # two corner triangles, each bounded by the flanking cuts
                start = 0 if case == 5 else 1
                for k in (start, start + 2):
                    c, _flag = corners[k]
                    tri = [local[order[(k - 1) % 4]], c, local[order[k]]]
                    area += _shoelace(tri)
        else:
            poly = [p for p, flag in ring if flag is None or flag]
            if len(poly) >= 3:
                area += _shoelace(poly)

    succ = {}
    for a, bb in segs:
        succ[a] = bb
    pred = {bb: a for a, bb in segs}

    loops = []
    chains = []
    used = set()
    for start in list(succ.keys()):
        if start in used:
            continue
        path = [start]
        used.add(start)
        cur = start
        closed = False
        while succ.get(cur) is not None:
            cur = succ[cur]
            if cur == start:
                closed = True
                break
            if cur in used:
                break
            path.append(cur)
            used.add(cur)
        if not closed:
            cur = start
            while pred.get(cur) is not None and pred[cur] not in used:
                cur = pred[cur]
                path.insert(0, cur)
                used.add(cur)
        arr = np.array([pts[k] for k in path])
        (loops if closed else chains).append(arr)
    return loops, chains, area


def _shoelace(poly):
    n = len(poly)
    s = 0.0
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _polyline_length(arr, closed):
    if len(arr) < 2:
        return 0.0
    d = np.diff(arr, axis=0)
    length = float(np.hypot(d[:, 0], d[:, 1]).sum())
    if closed:
        length += float(np.hypot(*(arr[0] - arr[-1])))
    return length


def _loop_integral(arr, vals, weights_ok=None, closed=True):
    """Line integral of nodal values over a polyline, trapezoid weights."""
    n = len(arr)
    if n < 2:
        return 0.0
    nxt = np.roll(arr, -1, axis=0) - arr
    seg = np.hypot(nxt[:, 0], nxt[:, 1])
    if not closed:
        seg[-1] = 0.0
    prv = np.roll(seg, 1)
    if not closed:
        prv[0] = 0.0
    w = 0.5 * (seg + prv)
    if weights_ok is not None:
        w = np.where(weights_ok, w, 0.0)
    return float(np.sum(w * vals))


# ---------------------------------------------------------------------------
# slices

@dataclass
class LevelSetSlice:
    t: float
    contours: list                  # closed polylines, first point not repeated
    open_contours: list
    area: float
    perimeter: float
    thickness: np.ndarray           # d_t per core sample, NaN where undefined
    thickness_defined: np.ndarray
    grad_on_contour: list           # |grad| per contour node, aligned with contours
    meta: dict = dfield(default_factory=dict)

    @property
    def n_components(self):
        return len(self.contours)


def grad_floor(grad: GradientField) -> float:
    m = grad.magnitude()[grad.valid]
    return GRAD_FLOOR_FRAC * (float(m.max()) if len(m) else 1.0)


def mask_at_level(fld: ScalarField, t: float):
    return fld.values > t


def _ray_thickness(fld: ScalarField, domain, t: float, tol: float,
                   idx=None):
    """Bisect u(c + r nu) = t along core rays; NaN where the ray misses."""
    core = domain.core
    if idx is None:
        idx = np.arange(len(core.points))
    idx = np.atleast_1d(idx)
    c = core.points[idx]
    nu = core.normals[idx]
    dmax = domain.profile.values[idx]
    u_c = fld.sample(c)
    defined = u_c > t
    lo = np.zeros(len(idx))
    hi = dmax.astype(float).copy()
    span = float(hi.max(initial=0.0))
    if span <= 0:
        return np.where(defined, 0.0, np.nan), defined
    n_iter = max(8, int(np.ceil(np.log2(span / max(tol, 1e-15)))))
    for _ in range(min(n_iter, 64)):
        mid = 0.5 * (lo + hi)
        above = fld.sample(c + mid[:, None] * nu) > t
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    d = 0.5 * (lo + hi)
    return np.where(defined, d, np.nan), defined


def extract_slice(fld: ScalarField, domain, t: float, *,
                  grad: GradientField | None = None,
                  eps_crit: float = EPS_CRIT,
                  enforce_crit: bool = True,
                  with_thickness: bool = True) -> LevelSetSlice:
    """Slice {u > t} with contours, area, perimeter and ray thickness."""
    top = fld.max()
    if t < 0 or t >= top:
        raise LevelOutOfRange(f"level {t} outside [0, {top:.6g})")
    if enforce_crit and t > (1.0 - eps_crit) * top:
        raise LevelOutOfRange(
            f"level {t} within the critical guard band of the peak {top:.6g}")

    if t == 0.0:
        boundary = domain.boundary
        nrm, _ = domain.boundary_normals()
        gmag = boundary_gradient_magnitude(fld, boundary, nrm)
        return LevelSetSlice(
            t=0.0, contours=[boundary.copy()], open_contours=[],
            area=domain.area, perimeter=domain.perimeter,
            thickness=domain.profile.values.copy(),
            thickness_defined=np.ones(len(boundary), dtype=bool),
            grad_on_contour=[gmag], meta={"geometric": True})

    if grad is None:
        grad = gradient(fld)
    h = fld.grid.h
    loops, chains, area = _march(fld.values, t, fld.grid.origin, h)
    if area < 4.0 * h * h:
        raise DegenerateSlice(f"slice at t={t} has area {area:.3g} < 4 cells")
    perimeter = sum(_polyline_length(a, True) for a in loops) + \
        sum(_polyline_length(a, False) for a in chains)

    if with_thickness:
        thick, defined = _ray_thickness(fld, domain, t, RAY_TOL_FRAC * h)
    else:
        n = len(domain.core.points)
        thick = np.full(n, np.nan)
        defined = np.zeros(n, dtype=bool)

    gmags = []
    for arr in loops + chains:
        m, _ = grad.sample_magnitude(arr)
        gmags.append(m)
    return LevelSetSlice(t=float(t), contours=loops, open_contours=chains,
                         area=float(area), perimeter=float(perimeter),
                         thickness=thick, thickness_defined=defined,
                         grad_on_contour=gmags,
                         meta={"n_open": len(chains)})


def thickness_curve(fld: ScalarField, domain, c_index: int, t_list):
    """d_t at one core sample for ascending levels; tight bisection."""
    t_list = np.asarray(t_list, dtype=float)
    if np.any(np.diff(t_list) < 0):
        raise ValueError("levels must be ascending")
    c = domain.core.points[c_index]
    u_c = float(fld.sample(c[None, :])[0])
    out = np.empty(len(t_list))
    for k, t in enumerate(t_list):
        if t == 0.0:
            out[k] = domain.profile.values[c_index]
            continue
        if u_c <= t:
            raise RayMisses(
                f"u(c)={u_c:.6g} <= t={t:.6g} at core sample {c_index}")
        d, _ = _ray_thickness(fld, domain, float(t), TIGHT_TOL,
                              idx=np.array([c_index]))
        out[k] = d[0]
    return out


def check_strict_inclusion(fld: ScalarField, domain, t: float) -> bool:
    """t below the minimum of u on the core boundary, cross-checked
    against pointwise membership of every core sample in {u > t}."""
    u_core = fld.sample(domain.core.points)
    by_min = bool(t < float(u_core.min()))
    by_membership = bool(np.all(u_core > t))
    if by_min != by_membership:
        raise AssertionError("inconsistent strict-inclusion evaluations")
    return by_min


def check_thickness_ode(fld: ScalarField, domain, c_index: int,
                        t: float, dt: float):
    """Forward-difference thickness rate against -1/|grad u| at the
    level-line foot of the ray."""
    d_t, d_t2 = thickness_curve(fld, domain, c_index, [t, t + dt])
    lhs = (d_t2 - d_t) / dt
    core = domain.core
    foot = core.points[c_index] + d_t * core.normals[c_index]
    grad = gradient(fld)
    gmag, ok = grad.sample_magnitude(foot[None, :])
    if not ok[0] or gmag[0] < grad_floor(grad):
        raise VanishingGradient(f"|grad u| too small at ray {c_index}, t={t}")
    rhs = -1.0 / float(gmag[0])
    rel = abs(lhs - rhs) / abs(rhs)
    return float(lhs), float(rhs), float(rel)


def check_estimate_d(fld: ScalarField, domain, c_index: int,
                     n_steps: int = 200):
    """Rebuild the profile value at one ray by integrating ds/|grad u|
    over levels from 0 to u(c), trapezoid rule."""
    core = domain.core
    c = core.points[c_index]
    nu = core.normals[c_index]
    u_c = float(fld.sample(c[None, :])[0])
    levels = np.linspace(0.0, u_c, n_steps + 1)
    grad = gradient(fld)
    floor = grad_floor(grad)

    pts = np.empty((n_steps + 1, 2))
    pts[0] = c + domain.profile.values[c_index] * nu
    for k in range(1, n_steps + 1):
        s = levels[k]
        if s >= u_c:
            d_s = 0.0
        else:
            d_s, _ = _ray_thickness(fld, domain, float(s), TIGHT_TOL,
                                    idx=np.array([c_index]))
            d_s = float(d_s[0])
        pts[k] = c + d_s * nu

    gvals = np.empty(n_steps + 1)
    nrm, _ = domain.boundary_normals()
    gvals[0] = boundary_gradient_magnitude(fld, pts[0][None, :],
                                           nrm[c_index][None, :])[0]
    inner, ok = grad.sample_magnitude(pts[1:])
    if np.any(~ok) or np.any(inner < floor):
        raise VanishingGradient("gradient degenerate along the ray")
    gvals[1:] = inner

    w = np.full(n_steps + 1, u_c / n_steps)
    w[0] *= 0.5
    w[-1] *= 0.5
    d_rec = float(np.sum(w / gvals))
    d_geo = float(domain.profile.values[c_index])
    return d_rec, d_geo, abs(d_rec - d_geo) / d_geo


def check_first_order_detachment(fld: ScalarField, domain, c_index: int,
                                 t_small: float):
    """Relative error of d - d_t against t/|grad u| at the boundary foot."""
    if t_small <= 0 or t_small > 0.1 * fld.max():
        raise LevelOutOfRange("detachment check expects 0 < t <= 0.1 max u")
    core = domain.core
    d = float(domain.profile.values[c_index])
    foot = core.points[c_index] + d * core.normals[c_index]
    nrm, kink = domain.boundary_normals()
    if kink[c_index]:
        raise VanishingGradient(f"boundary normal undefined at ray {c_index}")
    gmag = float(boundary_gradient_magnitude(
        fld, foot[None, :], nrm[c_index][None, :])[0])
    grad = gradient(fld)
    if gmag < grad_floor(grad):
        raise VanishingGradient("boundary gradient below floor")
    d_t = thickness_curve(fld, domain, c_index, [t_small])[0]
    lhs = d - d_t
    rhs = t_small / gmag
    return float(abs(lhs - rhs) / abs(rhs))


# ---------------------------------------------------------------------------
# curvature

@dataclass
class CurvatureSample:
    point: tuple
    kappa: float
    components: tuple


@dataclass
class CurvatureSet:
    points: np.ndarray
    kappa: np.ndarray           # divergence form
    kappa_split: np.ndarray     # sum of the two reported components
    term1: np.ndarray
    term2: np.ndarray
    which: str
    meta: dict = dfield(default_factory=dict)

    def samples(self):
        return [CurvatureSample(point=tuple(p), kappa=float(k),
                                components=(float(a), float(b)))
                for p, k, a, b in zip(self.points, self.kappa,
                                      self.term1, self.term2)]


def _central(arr, axis, h, valid):
    """Central difference where both neighbors are valid, else NaN."""
    out = np.full_like(arr, np.nan)
    if axis == 0:
        num = arr[2:, :] - arr[:-2, :]
        ok = valid[2:, :] & valid[:-2, :] & valid[1:-1, :]
        out[1:-1, :] = np.where(ok, num / (2 * h), np.nan)
    else:
        num = arr[:, 2:] - arr[:, :-2]
        ok = valid[:, 2:] & valid[:, :-2] & valid[:, 1:-1]
        out[:, 1:-1] = np.where(ok, num / (2 * h), np.nan)
    return out


def curvature_on_slice(fld: ScalarField, sl: LevelSetSlice, which: str = "u",
                       companion: ScalarField | None = None) -> CurvatureSet:
    """Contour curvature in divergence form plus the split form.

    Sign convention: positive for level lines curving around the core
    (circles of radius r give 1/r).  term1 is the Laplacian part, taken
    from the field equation (-f for u, -companion for v); term2 is the
    normal derivative of 1/|grad|, scaled by |grad|.
    """
    grad = gradient(fld)
    g = fld.grid
    h = g.h
    mag = grad.magnitude()
    floor = grad_floor(grad)
    ok_n = grad.valid & (mag > floor)
    nx = np.where(ok_n, grad.gx / np.where(ok_n, mag, 1.0), np.nan)
    ny = np.where(ok_n, grad.gy / np.where(ok_n, mag, 1.0), np.nan)

    div = _central(nx, 1, h, ok_n) + _central(ny, 0, h, ok_n)
    dmx = _central(mag, 1, h, ok_n)
    dmy = _central(mag, 0, h, ok_n)
    t2 = (nx * dmx + ny * dmy) / mag
    smooth = np.isfinite(div) & np.isfinite(t2) & (fld.mask == 1)

    kdiv_grid = np.where(smooth, -div, 0.0)
    t2_grid = np.where(smooth, t2, 0.0)
    carrier = GradientField(grid=g, gx=kdiv_grid, gy=t2_grid,
                            valid=smooth, mask=fld.mask)

    pts = np.vstack(sl.contours + sl.open_contours) if (sl.contours or sl.open_contours) \
        else np.empty((0, 2))
    if len(pts) == 0:
        raise VanishingGradient("slice has no contour to sample")
    kdiv, ok1 = carrier._corner_interp(kdiv_grid, pts)
    t2_s, ok2 = carrier._corner_interp(t2_grid, pts)
    gmag_s, okg = grad.sample_magnitude(pts)
    keep = ok1 & ok2 & okg & (gmag_s > floor)
    if not keep.any():
        raise VanishingGradient("no contour samples with usable gradient")

    if which == "u":
        f_grid = fld.meta.get("f_grid")
        if f_grid is None:
            lap_src = np.zeros(len(pts))
        else:
            f_carrier = ScalarField(grid=g, mask=fld.mask, values=f_grid,
                                    thetas=fld.thetas, residual=0.0, iterations=0)
            lap_src = f_carrier.sample(pts)
    elif which == "v":
        if companion is None:
            raise ValueError("v-curvature needs the companion u field")
        lap_src = companion.sample(pts)
    else:
        raise ValueError("which must be 'u' or 'v'")
    term1 = lap_src / gmag_s

    return CurvatureSet(points=pts[keep], kappa=kdiv[keep],
                        kappa_split=(term1 + t2_s)[keep],
                        term1=term1[keep], term2=t2_s[keep], which=which,
                        meta={"dropped": int((~keep).sum()), "t": sl.t})


# ---------------------------------------------------------------------------
# integral identities

@dataclass
class CoareaCheck:
    name: str
    lhs: float
    rhs: float
    rel_err: float
    skipped_levels: int = 0
    skipped_mass: float = 0.0


def _slice_line_integrals(fld, domain, grad, levels, integrand=None):
    """Per level: (perimeter, line integral of integrand / |grad|).

    integrand(points) -> values; None means skip the second integral.
    Degenerate slices are skipped and their count returned.
    """
    floor = grad_floor(grad)
    perims = np.zeros(len(levels))
    line = np.zeros(len(levels))
    skipped = 0
    last_perim = 0.0
    skipped_mass = 0.0
    for k, t in enumerate(levels):
        try:
            sl = extract_slice(fld, domain, float(t), grad=grad,
                               enforce_crit=False, with_thickness=False)
        except DegenerateSlice:
            skipped += 1
            skipped_mass += last_perim
            perims[k] = np.nan
            line[k] = np.nan
            continue
        perims[k] = sl.perimeter
        last_perim = sl.perimeter
        if integrand is None:
            continue
        total = 0.0
        for arr, gm in zip(sl.contours + sl.open_contours,
                           sl.grad_on_contour):
            vals = integrand(arr)
            ok = gm > floor
            total += _loop_integral(arr, np.where(ok, vals / np.where(ok, gm, 1.0), 0.0),
                                    weights_ok=ok,
                                    closed=True)
        line[k] = total
    return perims, line, skipped, skipped_mass


def check_coarea(fld: ScalarField, domain, source, n_levels: int = 100,
                 companion: ScalarField | None = None):
    """Three coarea identities on midpoint level grids.

    (i)   integral of |grad u| = integral over t of |contour at t|
    (ii)  integral of f       = integral over t of contour f/|grad u|
    (iii) integral of u       = integral over s of contour u/|grad v|
          (needs the companion field v)
    """
    h = fld.grid.h
    grad = gradient(fld)
    top = fld.max()
    dt = top / n_levels
    levels = (np.arange(n_levels) + 0.5) * dt

    core = domain.core
    f_pts = lambda pts: source.values_at(pts, core=core)
    perims, f_line, skipped, sk_perim = _slice_line_integrals(
        fld, domain, grad, levels, integrand=f_pts)

    reports = []
    lhs_i = float(np.sum(grad.magnitude()[fld.inside]) * h * h)
    rhs_i = float(np.nansum(perims) * dt)
    reports.append(CoareaCheck("grad_u_vs_contour_length", lhs_i, rhs_i,
                               abs(lhs_i - rhs_i) / max(abs(lhs_i), 1e-300),
                               skipped, sk_perim * dt))

    if source.kind == "constant_on_C":
        lhs_ii = source.f0 * core.area
    else:
        lhs_ii = float(fld.meta.get("f_mass", np.nan))
    rhs_ii = float(np.nansum(f_line) * dt)
    reports.append(CoareaCheck("source_mass_vs_slices", lhs_ii, rhs_ii,
                               abs(lhs_ii - rhs_ii) / max(abs(lhs_ii), 1e-300),
                               skipped, 0.0))

    if companion is not None:
        v = companion
        gv = gradient(v)
        tops = v.max()
        ds = tops / n_levels
        s_levels = (np.arange(n_levels) + 0.5) * ds
        u_pts = lambda pts: fld.sample(pts)
        _, u_line, vskip, _ = _slice_line_integrals(
            v, domain, gv, s_levels, integrand=u_pts)
        lhs_iii = fld.integral()
        rhs_iii = float(np.nansum(u_line) * ds)
        reports.append(CoareaCheck("u_mass_vs_v_slices", lhs_iii, rhs_iii,
                                   abs(lhs_iii - rhs_iii) / max(abs(lhs_iii), 1e-300),
                                   vskip, 0.0))
    return reports


@dataclass
class GreenSliceReport:
    t: float
    flux: float
    source_mass: float
    rel_err: float
    perimeter: float
    perimeter_bound: float
    inequality_ok: bool


def check_green_per_slice(fld: ScalarField, domain, source, t: float,
                          grad: GradientField | None = None) -> GreenSliceReport:
    """Contour flux of |grad u| vs the source mass inside the slice, and
    the contour-length lower bound mass / max |grad u|."""
    if grad is None:
        grad = gradient(fld)
    sl = extract_slice(fld, domain, t, grad=grad, with_thickness=False,
                       enforce_crit=False)
    floor = grad_floor(grad)
    flux = 0.0
    gmax = 0.0
    for arr, gm in zip(sl.contours + sl.open_contours, sl.grad_on_contour):
        ok = gm > floor
        flux += _loop_integral(arr, np.where(ok, gm, 0.0), weights_ok=ok,
                               closed=True)
        if ok.any():
            gmax = max(gmax, float(gm[ok].max()))
    f_grid = fld.meta.get("f_grid")
    if f_grid is None:
        f_grid = source.values_on_grid(fld.grid, core=domain.core)
    inside_t = fld.values > t
    mass = float(f_grid[inside_t].sum()) * fld.grid.h ** 2
    rel = abs(flux - mass) / max(abs(mass), 1e-300)
    bound = mass / gmax if gmax > 0 else np.inf
    return GreenSliceReport(t=float(t), flux=float(flux), source_mass=mass,
                            rel_err=float(rel), perimeter=sl.perimeter,
                            perimeter_bound=float(bound),
                            inequality_ok=bool(sl.perimeter >= bound - 1e-12))


def slice_star_shaped(fld: ScalarField, domain, t: float,
                      grad: GradientField | None = None,
                      n_x: int = 48, seg_points: int = 48,
                      eps: float | None = None) -> bool:
    """Segments from core points to slice points stay in {u > t - eps}."""
    if eps is None:
        eps = 1e-3 * fld.max()
    sl = extract_slice(fld, domain, t, grad=grad, with_thickness=False,
                       enforce_crit=False)
    pts = np.vstack(sl.contours + sl.open_contours)
    stride = max(1, len(pts) // n_x)
    # pull contour targets slightly inward so interpolation at the rim
    # does not produce spurious sub-level values
    centroid = domain.core.centroid
    xs = centroid + 0.995 * (pts[::stride] - centroid)
    core_pts = domain.core.points[::max(1, len(domain.core.points) // 8)]
    cs = centroid + 0.98 * (core_pts - centroid)
    cs = np.vstack([cs, centroid])
    lam = np.linspace(0.0, 1.0, seg_points)[None, :, None]
    for c in cs:
        seg = c[None, None, :] * (1 - lam) + xs[:, None, :] * lam
        vals = fld.sample(seg.reshape(-1, 2))
        if np.any(vals <= t - eps):
            return False
    return True


def boundary_coupling(u: ScalarField, v: ScalarField, domain):
    """Product |grad u| |grad v| at outer-boundary samples (kinks skipped).

    Returns (products, defined mask, spread max/min over defined samples).
    """
    nrm, kink = domain.boundary_normals()
    pts = domain.boundary
    gu = boundary_gradient_magnitude(u, pts, nrm)
    gv = boundary_gradient_magnitude(v, pts, nrm)
    prod = gu * gv
    defined = ~kink & (gu > 0) & (gv > 0)
    if defined.any():
        spread = float(prod[defined].max() / prod[defined].min())
    else:
        spread = np.inf
    return prod, defined, spread
