import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedy_inverse.fourier import (
    FrequencyGrid,
    ImageGrid,
    grid_adjoint,
    grid_forward,
    ndft_forward,
    operator_norm_sq,
)
from greedy_inverse.simulation import GaussianComponent, SourceConfig, render_source


def brute_ndft(pixels, dx, freqs):
    """Straight double loop over pixels."""
    m = pixels.shape[0]
    out = []
    for u, v in freqs:
        s = 0j
        for r in range(m):
            for c in range(m):
                x, y = (c - m // 2) * dx, (r - m // 2) * dx
                s += pixels[r, c] * np.exp(-2j * np.pi * (u * x + v * y))
        out.append(s * dx * dx)
    return np.array(out)


def dense_real_operator(grid):
    """Real matrix of x -> (Re A x, Im A x) over unmasked lattice points."""
    m, dx = grid.size, grid.pixel_size
    coords = (np.arange(m) - m // 2) * dx
    xs, ys = np.meshgrid(coords, coords)
    pts = grid.points()
    a = dx * dx * np.exp(-2j * np.pi * (np.outer(pts[:, 0], xs.ravel()) + np.outer(pts[:, 1], ys.ravel())))
    return np.vstack([a.real, a.imag])


def test_ndft_zero_image():
    assert not ndft_forward(ImageGrid.zeros(16, 2.0), [[0.01, 0.02], [-0.1, 0.3]]).any()


def test_center_delta_has_flat_transform():
    px = np.zeros((16, 16))
    px[8, 8] = 1.0
    img = ImageGrid(px, 1.5)
    vals = ndft_forward(img, np.random.default_rng(0).uniform(-0.3, 0.3, (20, 2)))
    assert np.allclose(vals, 1.5**2, rtol=0, atol=1e-12)


def test_ndft_matches_brute_force():
    rng = np.random.default_rng(1)
    px = rng.random((8, 8))
    freqs = rng.uniform(-0.4, 0.4, (6, 2))
    assert np.allclose(ndft_forward(ImageGrid(px, 0.7), freqs), brute_ndft(px, 0.7, freqs), rtol=1e-12)


def test_gaussian_source_analytic_transform():
    w = 10.0
    s = w / (2 * math.sqrt(2 * math.log(2)))
    img = render_source(SourceConfig("single", (GaussianComponent(0, 0, 1.0, w),)), 128, 1.0)
    radii = np.linspace(0, 0.08, 9)
    freqs = np.column_stack([radii, np.zeros_like(radii)])
    exact = np.exp(-2 * np.pi**2 * s**2 * radii**2)
    got = ndft_forward(img, freqs)
    assert np.max(np.abs(got - exact) / exact) <= 1e-3
    got_v = ndft_forward(img, freqs[:, ::-1])
    assert np.max(np.abs(got_v - exact) / exact) <= 1e-3


def test_ndft_hermitian_for_real_images():
    rng = np.random.default_rng(2)
    img = ImageGrid(rng.random((16, 16)))
    f = rng.uniform(-0.4, 0.4, (30, 2))
    assert np.allclose(ndft_forward(img, -f), np.conj(ndft_forward(img, f)), rtol=0, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.integers(0, 2**31 - 1))
def test_ndft_linearity(alpha, seed):
    rng = np.random.default_rng(seed)
    x1, x2 = rng.standard_normal((2, 16, 16))
    f = rng.uniform(-0.5, 0.5, (12, 2))
    lhs = ndft_forward(ImageGrid(alpha * x1 + x2), f)
    rhs = alpha * ndft_forward(ImageGrid(x1), f) + ndft_forward(ImageGrid(x2), f)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(np.linalg.norm(rhs), 1.0)


# ---- lattice operators

def test_grid_zero_and_empty_mask():
    grid = FrequencyGrid(16, 1.0, r_max=0.3)
    assert not grid_forward(ImageGrid.zeros(16), grid).any()
    empty = FrequencyGrid(16, 1.0, mask=np.zeros((16, 16), bool))
    assert not grid_forward(ImageGrid(np.random.default_rng(0).random((16, 16))), empty).any()


def test_grid_agrees_with_ndft():
    rng = np.random.default_rng(3)
    grid = FrequencyGrid(16, 2.0, r_max=0.2)
    img = ImageGrid(rng.random((16, 16)), 2.0)
    g = grid_forward(img, grid)
    direct = ndft_forward(img, grid.points())
    assert np.max(np.abs(grid.gather(g) - direct)) / np.max(np.abs(direct)) <= 1e-10
    assert not g[~grid.mask].any()


def test_grid_mask_symmetric_and_hermitian_exact():
    grid = FrequencyGrid(32, 1.0, r_max=0.35)
    mir = np.roll(grid.mask[::-1, ::-1], 1, axis=(0, 1))
    assert np.array_equal(grid.mask, mir)
    g = grid_forward(ImageGrid(np.random.default_rng(4).random((32, 32))), grid)
    assert np.array_equal(np.roll(g[::-1, ::-1], 1, axis=(0, 1)), np.conj(g))


def test_grid_spacing():
    grid = FrequencyGrid(64, 0.5)
    assert grid.spacing == pytest.approx(1 / 32)
    assert grid.u[0, 33] - grid.u[0, 32] == pytest.approx(1 / 32)


def _adjoint_gap(seed):
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid(16, 1.3, r_max=0.3)
    x = rng.standard_normal((16, 16))
    v = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    lhs = np.real(np.vdot(v, grid_forward(ImageGrid(x, 1.3), grid)))
    rhs = np.vdot(x, grid_adjoint(v, grid).pixels)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def test_adjoint_identity_100_pairs():
    assert max(_adjoint_gap(s) for s in range(100)) <= 1e-10


def test_adjoint_of_zero_or_masked_out():
    grid = FrequencyGrid(16, 1.0, r_max=0.2)
    assert not grid_adjoint(np.zeros((16, 16)), grid).pixels.any()
    v = np.zeros((16, 16), complex)
    v[0, 0] = 1 + 2j
    assert not grid.mask[0, 0]
    assert not grid_adjoint(v, grid).pixels.any()


def test_operator_norm_full_mask_unitary():
    grid = FrequencyGrid(8, 1 / math.sqrt(8))  # r_max=None: full lattice
    assert operator_norm_sq(grid) == pytest.approx(1.0, rel=1e-8)
    s = np.linalg.svd(dense_real_operator(grid), compute_uv=False)
    assert s[0] ** 2 == pytest.approx(1.0, rel=1e-10)


def test_operator_norm_empty_mask():
    assert operator_norm_sq(FrequencyGrid(8, 1.0, mask=np.zeros((8, 8), bool))) == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_operator_norm_random_mask_vs_svd(seed):
    mask = np.random.default_rng(seed).random((8, 8)) < 0.3
    grid = FrequencyGrid(8, 1.0, mask=mask)
    s = np.linalg.svd(dense_real_operator(grid), compute_uv=False)
    assert operator_norm_sq(grid) == pytest.approx(s[0] ** 2, rel=1e-2)
