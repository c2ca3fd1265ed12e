"""Distance fields: brute-force oracle, periodic wrap, accuracy contract."""

import math

import numpy as np
import pytest

from nodalab.distance import distance_field
from nodalab.errors import ResourceGuardError
from nodalab.grid import ResolutionRule, sample_grid
from nodalab.nodal import NodalApprox, extract_nodal
from nodalab.spectrum import COS, SIN, DomainSpec, EigenMode, nodal_distance_exact


def brute_force_distance(vertices, sample):
    """Min distance from every grid point to the rasterized vertex set."""
    h = np.asarray(sample.h)
    seeds = np.round(vertices / h).astype(int)
    if sample.periodic:
        seeds %= np.asarray(sample.shape)
    else:
        seeds = np.clip(seeds, 0, np.asarray(sample.shape) - 1)
    seed_xy = seeds * h
    grids = np.meshgrid(*sample.axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    diff = pts[:, None, :] - seed_xy[None, :, :]
    if sample.periodic:
        L = np.asarray(sample.mode.domain.lengths)
        diff = np.abs(diff)
        diff = np.minimum(diff, L - diff)
    d = np.sqrt((diff**2).sum(axis=2)).min(axis=1)
    return d.reshape(sample.shape)


def test_matches_brute_force_box():
    mode = EigenMode(DomainSpec.box((1.0, 1.0)), (2, 1))
    s = sample_grid(mode, ResolutionRule(points_per_wavelength=8.0))
    nod = extract_nodal(s)
    f = distance_field(nod)
    expect = brute_force_distance(nod.vertices, s)
    np.testing.assert_allclose(f.dist, expect, atol=1e-12)


def test_matches_brute_force_torus():
    mode = EigenMode(DomainSpec.torus((1.0, 1.0)), (2, 3), (COS, SIN))
    s = sample_grid(mode, ResolutionRule(points_per_wavelength=6.0))
    nod = extract_nodal(s)
    f = distance_field(nod)
    expect = brute_force_distance(nod.vertices, s)
    np.testing.assert_allclose(f.dist, expect, atol=1e-12)


def test_periodic_wrap_single_line():
    # a single seeded column at x=0 must be seen from both sides of the torus
    mode = EigenMode(DomainSpec.torus((1.0, 1.0)), (1, 1))
    s = sample_grid(mode, ResolutionRule(points_per_wavelength=4.0, h_max=2 * math.pi / 40))
    n0, n1 = s.shape
    vertices = np.stack([np.zeros(n1), np.arange(n1) * s.h[1]], axis=1)
    nod = NodalApprox(s, np.empty((0, 2), dtype=int), vertices)
    f = distance_field(nod)
    x = np.arange(n0) * s.h[0]
    expect = np.minimum(x, 2 * math.pi - x)
    np.testing.assert_allclose(f.dist, expect[:, None] * np.ones((1, n1)), atol=1e-9)


def test_empty_nodal_set_gives_inf_field():
    mode = EigenMode(DomainSpec.torus((1.0, 1.0)), (1, 1))
    s = sample_grid(mode, ResolutionRule(points_per_wavelength=4.0))
    nod = NodalApprox(s, np.empty((0, 2), dtype=int), np.empty((0, 2)))
    f = distance_field(nod)
    assert f.empty
    assert np.all(np.isinf(f.dist))


def test_field_tracks_closed_form_distance():
    mode = EigenMode(DomainSpec.torus((1.0, 1.0)), (3, 4))
    s = sample_grid(mode, ResolutionRule(points_per_wavelength=32.0))
    f = distance_field(extract_nodal(s))
    grids = np.meshgrid(*s.axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    exact = nodal_distance_exact(mode, pts).reshape(s.shape)
    err = np.abs(f.dist - exact).max()
    assert err <= 1.5 * f.raster_error


def test_padded_cap_guard():
    mode = EigenMode(DomainSpec.torus((1.0, 1.0)), (3, 4))
    s = sample_grid(mode, ResolutionRule(points_per_wavelength=32.0))
    nod = extract_nodal(s)
    with pytest.raises(ResourceGuardError):
        distance_field(nod, cap=1000)
