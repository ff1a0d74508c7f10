"""Convex cores, thickness profiles, and normal-ray swept plane domains.

A domain here is a convex core C together with a nonnegative thickness
profile d sampled on the boundary of C.  The domain is the union of the
core interior with the shell swept by outward normal rays,

    Omega = int(C)  u  { c + r nu(c) : 0 <= r < d(c) }.

Boundary sampling walks the edges of C by arc length and sweeps a fan of
normals at every corner (and at segment endpoints), so the ray sweep
covers the whole shell even when the normal direction is set-valued.
Fan samples carry zero arc-length weight; weights add up to the
perimeter, with a degenerate two-sided perimeter for segment cores.

Membership tests reduce to a convex projection: for any point p outside
C the nearest-point foot c on C satisfies p = c + r nu with nu in the
normal cone at c, so p lies in Omega exactly when r < d at that sample
of the traversal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from shapely.geometry import LinearRing

from .errors import DegenerateProfile, NonSimpleBoundary, SampleMismatch

TWO_PI = 2.0 * np.pi
DEFAULT_SAMPLES = 512
CONTACT_TOL = 1e-12
KINK_ANGLE_DEG = 60.0


def _unit(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n > 0, n, 1.0)


def _rot_cw(v):
    """Rotate by -90 degrees; outward normal of a CCW edge direction."""
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


@dataclass
class ConvexBody:
    """Sampled boundary of a convex core.

    points, normals and weights all have one row per traversal sample;
    coords holds the extended-traversal coordinate (arc length on edges,
    turning angle on fans) used for profile interpolation.
    """

    kind: str
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    coords: np.ndarray
    ext_length: float
    perimeter: float
    area: float
    centroid: np.ndarray
    params: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = len(self.points)
        if not (len(self.normals) == len(self.weights) == len(self.coords) == n):
            raise SampleMismatch("inconsistent sample arrays")
        mags = np.linalg.norm(self.normals, axis=1)
        if np.any(np.abs(mags - 1.0) > 1e-9):
            raise ValueError("normals must be unit vectors")

    @property
    def n_samples(self) -> int:
        return len(self.points)

    def normal_angles(self):
        a = np.arctan2(self.normals[:, 1], self.normals[:, 0])
        return np.mod(a, TWO_PI)

    # -- profile interpolation over the periodic traversal ----------------

    def interp_values(self, values, coords_q):
        """Periodic linear interpolation of per-sample values at coords_q."""
        xp = self.coords
        L = self.ext_length
        xq = np.mod(np.asarray(coords_q, dtype=float), L)
        xp_ext = np.concatenate(([xp[-1] - L], xp, [xp[0] + L]))
        fp_ext = np.concatenate(([values[-1]], values, [values[0]]))
        return np.interp(xq, xp_ext, fp_ext)

    # -- convex projection -------------------------------------------------

    def project(self, pts):
        """Project points onto the core.

        Returns (coord, nu, rho, inside): traversal coordinate and unit
        direction of the covering normal ray, distance to the core set
        (zero inside), and the interior-membership flags.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "disc":
            return self._project_disc(pts)
        return self._project_polyline(pts)

    def _project_disc(self, pts):
        c = self.params["center"]
        a = self.params["radius"]
        v = pts - c
        r = np.linalg.norm(v, axis=1)
        safe = np.where(r > 0, r, 1.0)
        nu = v / safe[:, None]
        nu[r == 0] = (1.0, 0.0)
        theta = np.mod(np.arctan2(nu[:, 1], nu[:, 0]), TWO_PI)
        coord = a * theta
        rho = np.maximum(r - a, 0.0)
        inside = r <= a
        return coord, nu, rho, inside

    def _project_polyline(self, pts):
        V = self.params["vertices"]
        D = self.params["edge_dirs"]
        lens = self.params["edge_lens"]
        e_coord = self.params["edge_coords"]
        f_coord = self.params["fan_coords"]
        f_phi0 = self.params["fan_phi0"]
        f_turn = self.params["fan_turns"]
        m = len(V)

        rel = pts[:, None, :] - V[None, :, :]
        tt = np.einsum("pmk,mk->pm", rel, D) / lens[None, :]
        tt = np.clip(tt, 0.0, 1.0)
        foot = V[None, :, :] + tt[:, :, None] * (D * lens[:, None])[None, :, :]
        d2 = np.sum((pts[:, None, :] - foot) ** 2, axis=2)
        # Coincident edges (the 2-gon) tie in distance; only the edge whose
        # outward normal faces the point covers it, so demote the others.
        side = np.einsum("pmk,mk->pm", pts[:, None, :] - foot,
                         self.params["edge_normals"])
        k = np.argmin(d2 + np.where(side < -1e-12, 1e9 * (1.0 + d2), 0.0),
                      axis=1)
        ar = np.arange(len(pts))
        tbest = tt[ar, k]
        fbest = foot[ar, k]
        rho = np.sqrt(d2[ar, k])

        coord = e_coord[k] + tbest * lens[k]
        nu = self.params["edge_normals"][k].copy()

        # Vertex region: the clipped parameter pinned at an endpoint means
        # the nearest point is a corner and the direction selects a fan ray.
        at_end = tbest >= 1.0 - 1e-12
        at_start = tbest <= 1e-12
        vert_idx = np.where(at_end, (k + 1) % m, k)
        on_vertex = (at_end | at_start) & (rho > 0)
        if np.any(on_vertex):
            vi = vert_idx[on_vertex]
            fi = (vi - 1) % m  # fan k ends at vertex k+1
            dirs = _unit(pts[on_vertex] - V[vi])
            phi = np.arctan2(dirs[:, 1], dirs[:, 0])
            relphi = np.mod(phi - f_phi0[fi], TWO_PI)
            over = relphi > f_turn[fi]
            near_hi = relphi - f_turn[fi] < TWO_PI - relphi
            relphi = np.where(over, np.where(near_hi, f_turn[fi], 0.0), relphi)
            coord[on_vertex] = f_coord[fi] + relphi
            nu[on_vertex] = dirs

        if m >= 3:
            # interior lies left of every CCW edge
            cross = (D[None, :, 0] * rel[:, :, 1] - D[None, :, 1] * rel[:, :, 0])
            inside = np.all(cross >= -1e-12, axis=1)
        else:
            inside = np.zeros(len(pts), dtype=bool)
        rho = np.where(inside, 0.0, rho)
        return coord, nu, rho, inside

    def contains_core(self, pts):
        _, _, rho, inside = self.project(pts)
        return inside

    def distance_to_core(self, pts):
        _, _, rho, _ = self.project(pts)
        return rho


# -- traversal construction --------------------------------------------


def _traversal(vertices):
    """Edge/fan piece table for a convex CCW vertex list (2 = segment)."""
    V = np.asarray(vertices, dtype=float)
    m = len(V)
    starts = V
    ends = V[(np.arange(m) + 1) % m]
    evec = ends - starts
    lens = np.linalg.norm(evec, axis=1)
    if np.any(lens <= 0):
        raise ValueError("degenerate edge in vertex list")
    dirs = evec / lens[:, None]
    normals = _rot_cw(dirs)
    ang = np.arctan2(normals[:, 1], normals[:, 0])
    # Fan k sits at the end vertex of edge k and turns CCW onto edge k+1.
    turns = np.mod(ang[(np.arange(m) + 1) % m] - ang, TWO_PI)
    turns = np.where(turns < 1e-12, 0.0, turns)
    if m == 2:
        turns = np.full(2, np.pi)
    if np.any(turns > np.pi + 1e-9):
        raise ValueError("vertex list is not convex CCW")

    edge_coords = np.zeros(m)
    fan_coords = np.zeros(m)
    s = 0.0
    for kk in range(m):
        edge_coords[kk] = s
        s += lens[kk]
        fan_coords[kk] = s
        s += turns[kk]
    ext_length = s
    return {
        "vertices": V,
        "edge_dirs": dirs,
        "edge_normals": normals,
        "edge_lens": lens,
        "edge_coords": edge_coords,
        "fan_coords": fan_coords,
        "fan_phi0": ang,
        "fan_turns": turns,
        "ext_length": ext_length,
    }


def _sample_traversal(tr, n):
    """Points/normals/weights at n midpoint samples of the traversal."""
    L = tr["ext_length"]
    m = len(tr["vertices"])
    coords = (np.arange(n) + 0.5) * (L / n)

    # Breakpoints and foot arc length for the weight map.
    brk = [0.0]
    footlen = [0.0]
    for kk in range(m):
        brk.append(tr["edge_coords"][kk] + tr["edge_lens"][kk])
        footlen.append(footlen[-1] + tr["edge_lens"][kk])
        brk.append(tr["fan_coords"][kk] + tr["fan_turns"][kk])
        footlen.append(footlen[-1])
    brk = np.array(brk)
    footlen = np.array(footlen)
    cell_edges = np.arange(n + 1) * (L / n)
    w = np.diff(np.interp(cell_edges, brk, footlen))

    pts = np.empty((n, 2))
    nus = np.empty((n, 2))
    for kk in range(m):
        s0 = tr["edge_coords"][kk]
        sel = (coords >= s0) & (coords < s0 + tr["edge_lens"][kk])
        local = coords[sel] - s0
        pts[sel] = tr["vertices"][kk] + local[:, None] * tr["edge_dirs"][kk]
        nus[sel] = tr["edge_normals"][kk]
        f0 = tr["fan_coords"][kk]
        sel = (coords >= f0) & (coords < f0 + tr["fan_turns"][kk])
        phi = tr["fan_phi0"][kk] + (coords[sel] - f0)
        vtx = tr["vertices"][(kk + 1) % m]
        pts[sel] = vtx
        nus[sel] = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    return coords, pts, nus, w


def disc_body(center, radius: float, samples: int = DEFAULT_SAMPLES) -> ConvexBody:
    center = np.asarray(center, dtype=float)
    if radius <= 0:
        raise ValueError("radius must be positive")
    L = TWO_PI * radius
    coords = (np.arange(samples) + 0.5) * (L / samples)
    theta = coords / radius
    normals = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    pts = center + radius * normals
    w = np.full(samples, L / samples)
    return ConvexBody(
        kind="disc", points=pts, normals=normals, weights=w, coords=coords,
        ext_length=L, perimeter=L, area=np.pi * radius * radius,
        centroid=center.copy(), params={"center": center, "radius": float(radius)},
    )


def polygon_body(vertices, samples: int = DEFAULT_SAMPLES) -> ConvexBody:
    V = np.asarray(vertices, dtype=float)
    if len(V) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    x, y = V[:, 0], V[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    signed = 0.5 * np.sum(x * ys - xs * y)
    if signed <= 0:
        raise ValueError("vertices must be in CCW order")
    tr = _traversal(V)
    coords, pts, nus, w = _sample_traversal(tr, samples)
    cx = np.sum((x + xs) * (x * ys - xs * y)) / (6.0 * signed)
    cy = np.sum((y + ys) * (x * ys - xs * y)) / (6.0 * signed)
    return ConvexBody(
        kind="polygon", points=pts, normals=nus, weights=w, coords=coords,
        ext_length=tr["ext_length"], perimeter=float(np.sum(tr["edge_lens"])),
        area=float(signed), centroid=np.array([cx, cy]), params=tr,
    )


def segment_body(p0, p1, samples: int = DEFAULT_SAMPLES) -> ConvexBody:
    """Degenerate core: a segment traversed on both sides with endpoint fans."""
    V = np.asarray([p0, p1], dtype=float)
    if np.linalg.norm(V[1] - V[0]) <= 0:
        raise ValueError("segment endpoints coincide")
    tr = _traversal(V)
    coords, pts, nus, w = _sample_traversal(tr, samples)
    return ConvexBody(
        kind="segment", points=pts, normals=nus, weights=w, coords=coords,
        ext_length=tr["ext_length"], perimeter=float(np.sum(tr["edge_lens"])),
        area=0.0, centroid=0.5 * (V[0] + V[1]), params=tr,
    )


# -- thickness profiles -------------------------------------------------


@dataclass
class ThicknessProfile:
    kind: str
    values: np.ndarray
    params: dict = field(default_factory=dict, repr=False)


def constant_profile(body: ConvexBody, value: float) -> ThicknessProfile:
    return ThicknessProfile("constant", np.full(body.n_samples, float(value)),
                            {"value": float(value)})


def fourier_profile(body: ConvexBody, base: float, modes) -> ThicknessProfile:
    """base + sum of amp*cos(k*theta + phase) evaluated at the normal angle."""
    theta = body.normal_angles()
    vals = np.full(body.n_samples, float(base))
    for k, amp, phase in modes:
        vals = vals + amp * np.cos(k * theta + phase)
    return ThicknessProfile("fourier", vals,
                            {"base": float(base), "modes": [tuple(m) for m in modes]})


def table_profile(body: ConvexBody, values) -> ThicknessProfile:
    """Explicit per-sample values; resampled over the traversal if needed."""
    vals = np.asarray(values, dtype=float)
    if len(vals) != body.n_samples:
        frac_src = np.linspace(0.0, 1.0, len(vals), endpoint=False)
        frac_dst = body.coords / body.ext_length
        vals = np.interp(frac_dst, np.concatenate((frac_src, [1.0])),
                         np.concatenate((vals, [vals[0]])))
    return ThicknessProfile("table", vals, {})


def example_profile(body: ConvexBody, x_max: float = 20.0) -> ThicknessProfile:
    """Showcase profile over the unit segment: semicircular roof between the
    endpoints and hyperbolic tails y = 1/(1+|x|) beyond them, truncated at
    |x| = x_max.  Zero below the axis."""
    if body.kind != "segment":
        raise ValueError("showcase profile needs a segment core")
    V = body.params["vertices"]
    want = np.array([[-1.0, 0.0], [1.0, 0.0]])
    if not np.allclose(V, want, atol=1e-12):
        raise ValueError("showcase profile expects the segment (-1,0)-(1,0)")
    if x_max <= 1.0:
        raise ValueError("x_max must exceed 1")

    nx, ny = body.normals[:, 0], body.normals[:, 1]
    px = body.points[:, 0]
    vals = np.zeros(body.n_samples)

    # Classify samples by traversal piece: edge samples sit on the two
    # sides, fan samples at the endpoints.
    ec = body.params["edge_coords"]
    el = body.params["edge_lens"]
    on_edge = np.zeros(body.n_samples, dtype=bool)
    for kk in range(2):
        on_edge |= (body.coords >= ec[kk]) & (body.coords < ec[kk] + el[kk])

    top = on_edge & (ny > 0)
    vals[top] = np.sqrt(np.maximum(1.0 - px[top] ** 2, 0.0))

    fan = ~on_edge & (ny > 1e-15)
    if np.any(fan):
        # Same formula on both endpoint fans by mirror symmetry: alpha is
        # the angle from the outward axis direction, in (0, pi/2).
        s = ny[fan]
        c = np.abs(nx[fan])
        r_hyp = 1.0 / (s + np.sqrt(s * s + s * c))
        with np.errstate(divide="ignore"):
            r_cut = np.where(c > 0, (x_max - 1.0) / np.maximum(c, 1e-300), np.inf)
        vals[fan] = np.minimum(r_hyp, r_cut)
    return ThicknessProfile("example_10_3", vals, {"x_max": float(x_max)})


# -- swept domains -------------------------------------------------------


def _polyline_length(pts, closed=True):
    d = np.diff(pts, axis=0)
    total = float(np.sum(np.linalg.norm(d, axis=1)))
    if closed:
        total += float(np.linalg.norm(pts[0] - pts[-1]))
    return total


def _shoelace(pts):
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass
class GnpDomain:
    """Plane domain swept by outward normal rays from a convex core."""

    core: ConvexBody
    profile: ThicknessProfile
    boundary: np.ndarray
    bounding_box: np.ndarray
    area: float
    perimeter: float
    has_contact: bool

    @property
    def n_samples(self) -> int:
        return self.core.n_samples

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        coord, _, rho, inside = self.core.project(pts)
        d_here = self.core.interp_values(self.profile.values, coord)
        out = inside | (rho < d_here)
        return out

    def ray_points(self, idx, r):
        """Points c_i + r nu_i for sample indices idx and radii r."""
        idx = np.asarray(idx)
        r = np.asarray(r, dtype=float)
        return self.core.points[idx] + r[..., None] * self.core.normals[idx]

    def boundary_normals(self):
        """Outward vertex normals of the induced polyline by edge averaging.

        Returns (normals, kink): kink flags vertices whose adjacent edge
        normals differ by more than the kink angle, and vertices buried in
        zero-length contact stretches.
        """
        pts = self.boundary
        n = len(pts)
        nxt = np.roll(pts, -1, axis=0) - pts
        lens = np.linalg.norm(nxt, axis=1)
        ok = lens > 1e-14
        edge_n = np.zeros_like(pts)
        edge_n[ok] = _rot_cw(nxt[ok] / lens[ok, None])
        # Propagate the nearest defined edge normal through collapsed runs.
        if not ok.all():
            idx_ok = np.where(ok)[0]
            if len(idx_ok) == 0:
                raise DegenerateProfile("boundary polyline has no extent")
            pos = np.arange(n)
            edge_n[~ok] = edge_n[idx_ok[np.searchsorted(idx_ok, pos[~ok]) % len(idx_ok)]]
        prev_n = np.roll(edge_n, 1, axis=0)
        avg = _unit(prev_n + edge_n)
        dots = np.sum(prev_n * edge_n, axis=1)
        kink = dots < np.cos(np.deg2rad(KINK_ANGLE_DEG))
        kink |= ~ok | ~np.roll(ok, 1)
        return avg, kink


def make_domain(core: ConvexBody, profile: ThicknessProfile,
                check_simple: bool = True) -> GnpDomain:
    """Validate a core/profile pair and build the swept domain."""
    vals = profile.values
    if len(vals) != core.n_samples:
        raise SampleMismatch("profile sample count differs from the core")
    if np.any(vals < 0):
        raise DegenerateProfile("thickness must be nonnegative")
    if not np.any(vals > CONTACT_TOL):
        raise DegenerateProfile("thickness vanishes everywhere")

    boundary = core.points + vals[:, None] * core.normals
    has_contact = bool(np.any(vals <= CONTACT_TOL))

    if check_simple:
        keep = [0]
        for i in range(1, len(boundary)):
            if np.linalg.norm(boundary[i] - boundary[keep[-1]]) > 1e-12:
                keep.append(i)
        dedup = boundary[keep]
        if len(dedup) >= 4:
            ring = LinearRing(dedup)
            if not ring.is_simple:
                raise NonSimpleBoundary("induced boundary self-intersects")

    lo = boundary.min(axis=0)
    hi = boundary.max(axis=0)
    return GnpDomain(
        core=core, profile=profile, boundary=boundary,
        bounding_box=np.array([lo, hi]),
        area=abs(_shoelace(boundary)),
        perimeter=_polyline_length(boundary, closed=True),
        has_contact=has_contact,
    )


def is_star_shaped(domain: GnpDomain, samples: int = 200,
                   seg_points: int = 48) -> bool:
    """Empirical star-shapedness with respect to the core.

    Tests segments from core points to points just inside the outer
    boundary plus a coarse interior lattice; True when every sampled
    segment stays inside the domain.
    """
    if samples < 4:
        raise ValueError("samples too small")
    n = domain.n_samples
    stride = max(1, n // samples)
    idx = np.arange(0, n, stride)
    d = domain.profile.values[idx]
    live = d > 10 * CONTACT_TOL
    xs = domain.ray_points(idx[live], 0.995 * d[live])

    lo, hi = domain.bounding_box
    span = (hi - lo).max()
    g = np.linspace(0.05, 0.95, 12)
    gx, gy = np.meshgrid(lo[0] + g * (hi[0] - lo[0]), lo[1] + g * (hi[1] - lo[1]))
    lattice = np.stack([gx.ravel(), gy.ravel()], axis=1)
    lattice = lattice[domain.contains(lattice)]
    xs = np.concatenate([xs, lattice], axis=0)

    cstride = max(1, n // 12)
    cs = np.concatenate([domain.core.points[::cstride],
                         domain.core.centroid[None, :]], axis=0)

    frac = np.linspace(0.0, 1.0, seg_points + 2)[1:-1]
    for c in cs:
        segs = c[None, None, :] + frac[None, :, None] * (xs[:, None, :] - c[None, None, :])
        flat = segs.reshape(-1, 2)
        if not domain.contains(flat).all():
            return False
    return True
