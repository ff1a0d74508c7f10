"""Cores, profiles, domains, and the projection that ties them together."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gnplab.errors import DegenerateProfile, SampleMismatch
from gnplab.geometry import (ConvexBody, constant_profile, disc_body,
                             example_profile, fourier_profile, is_star_shaped,
                             make_domain, polygon_body, segment_body,
                             table_profile)

SQ = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


# -- body construction ----------------------------------------------------


def test_disc_body_weights_sum_to_perimeter():
    b = disc_body((0, 0), 0.5, 512)
    assert abs(b.weights.sum() - math.pi) < 1e-12
    assert abs(b.perimeter - math.pi) < 1e-12
    assert np.allclose(np.linalg.norm(b.points, axis=1), 0.5)
    assert np.allclose(b.centroid, (0.0, 0.0), atol=1e-12)


def test_polygon_body_weights_sum_to_perimeter():
    b = polygon_body(SQ, 512)
    # corner fans carry zero weight, so the sum is the exact perimeter
    assert abs(b.weights.sum() - 4.0) < 1e-12
    assert abs(b.area - 1.0) < 1e-12
    fans = b.weights == 0.0
    assert fans.any() and (~fans).any()


def test_segment_body_is_two_sided():
    b = segment_body((-1, 0), (1, 0), 512)
    assert abs(b.weights.sum() - 4.0) < 1e-12
    assert abs(b.area) < 1e-12
    # normals cover both half-planes
    assert (b.normals[:, 1] > 0.5).any() and (b.normals[:, 1] < -0.5).any()


def test_polygon_rejects_nonconvex():
    with pytest.raises(ValueError):
        polygon_body([(0, 0), (2, 0), (2, 2), (1, 0.5), (0, 2)], 128)


# -- profiles -------------------------------------------------------------


def test_constant_profile_values():
    b = disc_body((0, 0), 0.5, 128)
    p = constant_profile(b, 0.5)
    assert p.values.shape == (128,)
    assert np.all(p.values == 0.5)


def test_fourier_profile_mean_is_base():
    b = disc_body((0, 0), 0.5, 256)
    p = fourier_profile(b, 0.5, [(2, 0.1, 0.3), (3, 0.05, 1.0)])
    assert abs(p.values.mean() - 0.5) < 1e-3
    assert np.all(p.values > 0)


def test_table_profile_resamples_other_lengths():
    b = disc_body((0, 0), 0.5, 64)
    p = table_profile(b, np.ones(65) * 0.3)
    assert p.values.shape == (64,)
    assert np.allclose(p.values, 0.3)


def test_make_domain_rejects_count_mismatch():
    b = disc_body((0, 0), 0.5, 64)
    bad = constant_profile(disc_body((0, 0), 0.5, 32), 0.5)
    with pytest.raises(SampleMismatch):
        make_domain(b, bad)


def test_make_domain_rejects_bad_thickness():
    b = disc_body((0, 0), 0.5, 64)
    with pytest.raises(DegenerateProfile):
        make_domain(b, constant_profile(b, -0.1))
    with pytest.raises(DegenerateProfile):
        make_domain(b, fourier_profile(b, 0.1, [(1, 0.5, 0.0)]))
    with pytest.raises(DegenerateProfile):
        make_domain(b, constant_profile(b, 0.0))


# -- projection -----------------------------------------------------------


@pytest.mark.parametrize("make", [
    lambda: disc_body((0.2, -0.1), 0.5, 256),
    lambda: polygon_body(SQ, 256),
    lambda: segment_body((-1, 0), (1, 0), 256),
])
def test_projection_roundtrip_on_offset_boundary(make):
    # push each sample out along its own normal; project must recover the
    # sample coordinate and the offset distance.
    body = make()
    d = 0.3
    pts = body.points + d * body.normals
    coord, nu, rho, inside = body.project(pts)
    assert not inside.any()
    assert np.allclose(rho, d, atol=1e-9)
    assert np.allclose(nu, body.normals, atol=1e-9)
    # traversal coordinate is periodic; compare via circular distance
    dc = np.abs(coord - body.coords)
    dc = np.minimum(dc, body.ext_length - dc)
    assert dc.max() < 1e-9


def test_projection_separates_coincident_segment_sides():
    body = segment_body((-1, 0), (1, 0), 256)
    above = np.array([[0.3, 0.4]])
    below = np.array([[0.3, -0.4]])
    ca, na, _, _ = body.project(above)
    cb, nb, _, _ = body.project(below)
    assert na[0, 1] > 0.99 and nb[0, 1] < -0.99
    assert abs(ca[0] - cb[0]) > 1.0  # distinct traversal pieces


def test_projection_interior_flag_polygon():
    body = polygon_body(SQ, 128)
    pts = np.array([[0.5, 0.5], [0.01, 0.99], [1.2, 0.5], [-0.01, 0.5]])
    _, _, rho, inside = body.project(pts)
    assert list(inside) == [True, True, False, False]
    assert rho[0] == 0.0 and rho[2] > 0


def test_interp_values_on_fan():
    # fan coordinate must pick up fan samples, not an adjacent edge
    body = polygon_body(SQ, 512)
    prof = table_profile(body, np.where(body.weights == 0.0, 2.0, 1.0))
    probe = np.array([[1.3, -0.3]])  # diagonal off the (1,0) corner
    coord, _, _, _ = body.project(probe)
    val = body.interp_values(prof.values, coord)
    assert val[0] > 1.5


# -- domains --------------------------------------------------------------


def test_disc_domain_area_perimeter():
    b = disc_body((0, 0), 0.5, 1024)
    dom = make_domain(b, constant_profile(b, 0.5))
    assert abs(dom.area - math.pi) < 2e-4
    assert abs(dom.perimeter - 2 * math.pi) < 2e-4
    assert not dom.has_contact


def test_stadium_domain_exact_area():
    b = segment_body((-1, 0), (1, 0), 2048)
    dom = make_domain(b, constant_profile(b, 0.6))
    exact = 4 * 0.6 + math.pi * 0.36
    assert abs(dom.area - exact) < 5e-5


def test_offset_square_area():
    b = polygon_body(SQ, 2048)
    dom = make_domain(b, constant_profile(b, 0.3))
    exact = 1.0 + 4 * 0.3 + math.pi * 0.09
    assert abs(dom.area - exact) < 5e-5


def test_domain_contains_core_interior_and_shell():
    b = polygon_body([(0, 0), (2, 0), (1, 1.5)], 512)
    dom = make_domain(b, constant_profile(b, 0.4))
    probe = np.array([
        [1.0, 0.5],    # deep in the core
        [1.0, 0.1],
        [2.2, -0.2],   # corner fan, r = 0.283 < 0.4
        [2.38, -0.25], # past the fan radius
        [1.0, 1.85],   # apex fan, r = 0.35
        [1.0, 1.95],
    ])
    assert list(dom.contains(probe)) == [True, True, True, False, True, False]


def test_contact_flag():
    b = disc_body((0, 0), 0.5, 256)
    vals = np.full(256, 0.5)
    vals[:8] = 0.0
    dom = make_domain(b, table_profile(b, vals))
    assert dom.has_contact


def test_radial_domain_star_shaped(radial_domain):
    assert is_star_shaped(radial_domain)


def test_example_domain_fails_all_pairs_star_test():
    # segments from the left half of the core into the tail bulge cross
    # the notch above the semicircular roof near x = 1
    core = segment_body((-1, 0), (1, 0), 384)
    dom = make_domain(core, example_profile(core, x_max=8.0))
    assert not is_star_shaped(dom)
    assert not dom.contains(np.array([[0.96, 0.29]]))[0]
    assert dom.contains(np.array([[1.6, 0.38]]))[0]


def test_notched_profile_not_star_shaped():
    b = disc_body((0, 0), 0.5, 512)
    th = np.arctan2(b.points[:, 1], b.points[:, 0])
    vals = np.where(np.abs(th - 0.3) < 0.05, 0.02, 0.5)
    dom = make_domain(b, table_profile(b, vals))
    assert not is_star_shaped(dom)


def test_example_profile_matches_analytic_pieces():
    body = segment_body((-1, 0), (1, 0), 1024)
    prof = example_profile(body)
    ec, el = body.params["edge_coords"], body.params["edge_lens"]
    on_edge = np.zeros(body.n_samples, dtype=bool)
    for k in range(2):
        on_edge |= (body.coords >= ec[k]) & (body.coords < ec[k] + el[k])
    top = on_edge & (body.normals[:, 1] > 0.5)
    x = body.points[top, 0]
    assert np.allclose(prof.values[top], np.sqrt(1 - x**2), atol=1e-12)
    # fan values satisfy r^2 sc + 2 r s - 1 = 0 where untruncated
    fan = ~on_edge & (body.normals[:, 1] > 1e-3)
    s = body.normals[fan, 1]
    c = np.abs(body.normals[fan, 0])
    r = prof.values[fan]
    untrunc = r * c < 19.0 - 1e-9
    resid = r[untrunc] ** 2 * s[untrunc] * c[untrunc] + 2 * r[untrunc] * s[untrunc] - 1.0
    assert np.abs(resid).max() < 1e-9


def test_example_profile_boundary_on_curve():
    body = segment_body((-1, 0), (1, 0), 1024)
    dom = make_domain(body, example_profile(body))
    pts = dom.boundary
    tail = (pts[:, 0] > 1.5) & (pts[:, 1] > 1e-6)
    assert tail.any()
    assert np.allclose(pts[tail, 1], 1.0 / (1.0 + pts[tail, 0]), atol=1e-9)


def test_example_profile_requires_unit_segment():
    with pytest.raises(ValueError):
        example_profile(disc_body((0, 0), 1.0, 64))
    with pytest.raises(ValueError):
        example_profile(segment_body((-2, 0), (2, 0), 64))


# -- properties -----------------------------------------------------------


@given(st.floats(0.05, 0.45), st.floats(0.0, 2 * math.pi),
       st.integers(1, 5))
@settings(max_examples=25, deadline=None)
def test_fourier_profile_positive_when_amp_below_base(amp, phase, k):
    b = disc_body((0, 0), 0.5, 128)
    p = fourier_profile(b, 0.5, [(k, amp, phase)])
    assert np.all(p.values > 0)
    dom = make_domain(b, p)
    assert dom.area > b.area


@given(st.lists(st.floats(0.1, 2.0), min_size=3, max_size=8),
       st.floats(0.05, 0.5))
@settings(max_examples=25, deadline=None)
def test_random_convex_polygon_projection_roundtrip(radii, d):
    ang = np.linspace(0, 2 * math.pi, len(radii), endpoint=False)
    verts = np.stack([np.cos(ang), np.sin(ang)], axis=1) * np.asarray(radii)[:, None]
    try:
        body = polygon_body([tuple(v) for v in verts], 128)
    except ValueError:
        return  # radii produced a nonconvex chain; not this test's concern
    pts = body.points + d * body.normals
    _, nu, rho, inside = body.project(pts)
    assert not inside.any()
    assert np.allclose(rho, d, atol=1e-9)
    assert np.allclose(nu, body.normals, atol=1e-9)


@given(st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=50, deadline=None)
def test_segment_membership_matches_stadium_formula(x, y):
    body = segment_body((-1, 0), (1, 0), 4096)
    dom = make_domain(body, constant_profile(body, 0.6))
    px = min(max(x, -1.0), 1.0)
    exact = math.hypot(x - px, y) < 0.6
    near_edge = abs(math.hypot(x - px, y) - 0.6) < 5e-3
    if not near_edge:
        assert bool(dom.contains(np.array([[x, y]]))[0]) == exact
