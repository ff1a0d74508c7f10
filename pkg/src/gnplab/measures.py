"""Boundary-thickness and convexity-gap measures for swept domains.

tau measures, at each outer-boundary sample, how far the inward normal
travels through the shell before leaving it (by reaching the core or by
exiting the domain).  gamma compares each boundary sample's distance to
the convex hull against its distance to the core.  Both are sampled
quantities; kinked vertices of the outer polyline are flagged and left
out of norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptySetError, GridMismatch
from .geometry import CONTACT_TOL, GnpDomain

_BISECT_STEPS = 48


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, CCW without the closing repeat."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) == 0:
        raise EmptySetError("hull of an empty point set")
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _point_segment_distance(pts, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0) if denom > 0 else np.zeros(len(pts))
    foot = a + t[:, None] * ab
    return np.linalg.norm(pts - foot, axis=1)


def distance_to_hull(pts: np.ndarray, hull: np.ndarray) -> np.ndarray:
    """Euclidean distance to the boundary polyline of a convex polygon.

    Interior points get their depth below the hull boundary, not zero;
    the gap functional needs how far a boundary sample has receded
    inside the hull.
    """
    pts = np.atleast_2d(pts)
    m = len(hull)
    if m == 1:
        return np.linalg.norm(pts - hull[0], axis=1)
    if m == 2:
        return _point_segment_distance(pts, hull[0], hull[1])
    d = np.full(len(pts), np.inf)
    for k in range(m):
        a, b = hull[k], hull[(k + 1) % m]
        d = np.minimum(d, _point_segment_distance(pts, a, b))
    return d


def hausdorff_distance(A: np.ndarray, B: np.ndarray) -> float:
    """max of the two directed sup-min distances between finite point sets."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if len(A) == 0 or len(B) == 0:
        raise EmptySetError("hausdorff distance of an empty set")
    dab = cKDTree(B).query(A)[0].max()
    dba = cKDTree(A).query(B)[0].max()
    return float(max(dab, dba))


def rasterize(domain: GnpDomain, h: float, bbox=None) -> tuple[np.ndarray, np.ndarray]:
    """Lattice-aligned boolean mask of a domain; returns (mask, origin)."""
    if bbox is None:
        bbox = domain.bounding_box
    lo = np.floor(bbox[0] / h).astype(int) - 1
    hi = np.ceil(bbox[1] / h).astype(int) + 1
    xs = np.arange(lo[0], hi[0] + 1) * h
    ys = np.arange(lo[1], hi[1] + 1) * h
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    mask = domain.contains(pts).reshape(len(ys), len(xs))
    return mask, np.array([xs[0], ys[0]])


def symmetric_difference_area(a, b, h: float | None = None) -> float:
    """Cell-count area of the symmetric difference of two masks or domains."""
    if isinstance(a, GnpDomain) and isinstance(b, GnpDomain):
        if h is None:
            raise ValueError("domain inputs need a grid spacing h")
        lo = np.minimum(a.bounding_box[0], b.bounding_box[0])
        hi = np.maximum(a.bounding_box[1], b.bounding_box[1])
        bbox = np.array([lo, hi])
        ma, _ = rasterize(a, h, bbox)
        mb, _ = rasterize(b, h, bbox)
    else:
        ma, mb = np.asarray(a, dtype=bool), np.asarray(b, dtype=bool)
        if ma.shape != mb.shape:
            raise GridMismatch("masks have different shapes")
        if h is None:
            raise ValueError("mask inputs need the grid spacing h")
    return float(np.count_nonzero(ma ^ mb)) * h * h


# -- tau ------------------------------------------------------------------


@dataclass
class MeasureReport:
    points: np.ndarray
    tau: np.ndarray
    defined: np.ndarray
    kink: np.ndarray
    arc_weights: np.ndarray
    gamma: float
    gamma_argmax: np.ndarray | None
    hull: np.ndarray
    notes: dict = field(default_factory=dict)


def _in_shell(domain: GnpDomain, pts):
    coord, _, rho, inside = domain.core.project(pts)
    d_here = domain.core.interp_values(domain.profile.values, coord)
    return (~inside) & (rho > 0) & (rho < d_here)


def thickness_tau(domain: GnpDomain, coarse_steps: int = 256):
    """tau at every outer-boundary sample.

    Returns (points, tau, defined, kink): tau is the length of the maximal
    inward-normal interval inside the shell; contact samples get tau = 0;
    kinked vertices are flagged undefined.
    """
    pts = domain.boundary
    n = len(pts)
    normals, kink = domain.boundary_normals()
    inward = -normals
    d = domain.profile.values

    lo, hi = domain.bounding_box
    t_max = float(np.linalg.norm(hi - lo)) + 1e-9
    tgrid = np.linspace(0.0, t_max, coarse_steps + 1)[1:]

    tau = np.zeros(n)
    defined = np.ones(n, dtype=bool)
    contact = d <= 10 * CONTACT_TOL
    live = ~contact & ~kink
    defined[kink & ~contact] = False

    idx = np.where(live)[0]
    if len(idx):
        probe = pts[idx, None, :] + tgrid[None, :, None] * inward[idx, None, :]
        ok = _in_shell(domain, probe.reshape(-1, 2)).reshape(len(idx), -1)
        first_out = np.argmin(ok, axis=1)  # first False; 0 when ok[0] is False
        all_in = ok.all(axis=1)
        first_out[all_in] = len(tgrid) - 1

        lo_t = np.where(first_out > 0, tgrid[np.maximum(first_out - 1, 0)], 0.0)
        hi_t = tgrid[first_out]
        # Rays that exit before the first probe point: short or misdirected.
        immediate = (first_out == 0)
        lo_t[immediate] = 0.0
        hi_t[immediate] = tgrid[0]
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo_t + hi_t)
            p = pts[idx] + mid[:, None] * inward[idx]
            inside_mid = _in_shell(domain, p)
            lo_t = np.where(inside_mid, mid, lo_t)
            hi_t = np.where(inside_mid, hi_t, mid)
        tau_idx = 0.5 * (lo_t + hi_t)
        tau_idx[all_in] = t_max
        tau[idx] = tau_idx
        # An instant exit means the averaged normal was not an interior
        # direction; treat like a kink.
        bad = immediate & (tau_idx < 1e-7 * t_max)
        defined[idx[bad]] = False
        tau[idx[bad]] = 0.0

    tau[contact] = 0.0
    return pts, tau, defined, kink


def convexity_gap(domain: GnpDomain, half_space=None) -> float:
    """sup over boundary samples of dist(x, conv Omega) / (1 + dist(x, C)).

    half_space, when given, is a pair (point, direction): only samples with
    (x - point) . direction > 0 enter the sup.
    """
    return gap_details(domain, half_space=half_space)[0]


def gap_details(domain: GnpDomain, half_space=None):
    """convexity_gap plus the hull polygon and the argmax sample."""
    pts = domain.boundary
    hull = convex_hull(np.concatenate([pts, domain.core.points], axis=0))
    d_hull = distance_to_hull(pts, hull)
    d_core = domain.core.distance_to_core(pts)
    sel = np.ones(len(pts), dtype=bool)
    if half_space is not None:
        p0, direction = (np.asarray(half_space[0], dtype=float),
                         np.asarray(half_space[1], dtype=float))
        sel = (pts - p0) @ direction > 0
    quot = np.where(sel, d_hull / (1.0 + d_core), -np.inf)
    k = int(np.argmax(quot))
    gamma = float(max(quot[k], 0.0))
    if gamma < 1e-12:
        gamma = 0.0
    argmax = pts[k] if np.isfinite(quot[k]) else None
    return gamma, hull, argmax


def lipschitz_constant_tau(domain: GnpDomain, collar_frac: float = 0.05,
                           tau_data=None) -> float:
    """Finite-difference Lipschitz estimate of tau along the outer boundary,
    skipping undefined samples and a collar around core contact points."""
    if tau_data is None:
        tau_data = thickness_tau(domain)
    pts, tau, defined, _ = tau_data
    n = len(pts)
    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    s = np.concatenate(([0.0], np.cumsum(seg)))[:-1]
    per = domain.perimeter

    contact = domain.profile.values <= 10 * CONTACT_TOL
    collar = np.zeros(n, dtype=bool)
    if contact.any() and collar_frac > 0:
        sc = s[contact]
        ds = np.abs(s[:, None] - sc[None, :])
        ds = np.minimum(ds, per - ds)
        collar = ds.min(axis=1) < collar_frac * per

    good = defined & ~collar
    best = 0.0
    j = np.arange(n)
    jn = (j + 1) % n
    pair_ok = good[j] & good[jn] & (seg > 1e-14)
    if pair_ok.any():
        slopes = np.abs(tau[jn][pair_ok] - tau[j][pair_ok]) / seg[pair_ok]
        best = float(slopes.max())
    return best


def measure_report(domain: GnpDomain, half_space=None,
                   collar_frac: float = 0.05) -> MeasureReport:
    pts, tau, defined, kink = thickness_tau(domain)
    gamma, hull, argmax = gap_details(domain, half_space=half_space)
    lip = lipschitz_constant_tau(domain, collar_frac=collar_frac,
                                 tau_data=(pts, tau, defined, kink))
    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    w = 0.5 * (seg + np.roll(seg, 1))
    notes = {"lipschitz_tau": lip,
             "n_undefined": int(np.count_nonzero(~defined)),
             "n_kink": int(np.count_nonzero(kink))}
    if domain.profile.kind == "example_10_3":
        notes["x_max"] = domain.profile.params.get("x_max")
    return MeasureReport(points=pts, tau=tau, defined=defined, kink=kink,
                         arc_weights=w, gamma=gamma, gamma_argmax=argmax,
                         hull=hull, notes=notes)


def tau_norm(report: MeasureReport, p) -> float:
    """L^p norm of tau over the outer boundary arc length (p may be inf)."""
    sel = report.defined
    if not sel.any():
        raise EmptySetError("no defined tau samples")
    tau = report.tau[sel]
    w = report.arc_weights[sel]
    if p == np.inf or p == "inf":
        return float(np.abs(tau).max())
    p = float(p)
    return float((np.sum(np.abs(tau) ** p * w)) ** (1.0 / p))
