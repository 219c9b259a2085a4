"""Fourier forward operator on images: scattered frequencies and a masked uniform lattice.

Conventions
-----------
Pixel ``(r, c)`` of an ``M x M`` image sits at ``x = (c - M/2) * dx``,
``y = (r - M/2) * dx`` (arcsec), so the field-of-view center is pixel
``(M/2, M/2)``.  A frequency ``(u, v)`` (1/arcsec) is paired with ``x`` and
``y`` respectively and the transform is

    F(u, v) = dx**2 * sum_p image[p] * exp(-2j*pi*(u*x_p + v*y_p)).

The lattice conjugate to the image has spacing ``1 / (M * dx)`` and the same
index-centering as the image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoConvergence, ValidationError


@dataclass(frozen=True)
class ImageGrid:
    pixels: np.ndarray
    pixel_size: float = 1.0

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        object.__setattr__(self, "pixels", px)
        m = px.shape[0]
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise ValidationError(f"image must be square, got shape {px.shape}")
        if m % 2 or m < 2:
            raise ValidationError(f"image size must be even, got {m}")
        if not np.all(np.isfinite(px)):
            raise ValidationError("image contains non-finite values")
        if not self.pixel_size > 0:
            raise ValidationError("pixel_size must be positive")

    @property
    def size(self) -> int:
        return self.pixels.shape[0]

    @property
    def pixel_area(self) -> float:
        return self.pixel_size**2

    def coordinates(self) -> np.ndarray:
        """1-D pixel-center coordinates (arcsec), shared by both axes."""
        return (np.arange(self.size) - self.size // 2) * self.pixel_size

    def flux(self) -> float:
        return float(self.pixels.sum() * self.pixel_area)

    @classmethod
    def zeros(cls, size: int = 128, pixel_size: float = 1.0) -> "ImageGrid":
        return cls(np.zeros((size, size)), pixel_size)


class FrequencyGrid:
    """Uniform ``(u, v)`` lattice conjugate to an image, restricted by a mask.

    By default the mask is the disk ``|xi| <= r_max``, excluding the first
    row and column whose mirrored frequencies fall off the lattice.
    """

    def __init__(self, size: int = 128, pixel_size: float = 1.0, r_max: Optional[float] = None,
                 mask: Optional[np.ndarray] = None):
        if size % 2 or size < 2:
            raise ValidationError(f"grid size must be even, got {size}")
        self.size = int(size)
        self.pixel_size = float(pixel_size)
        self.r_max = r_max
        self.spacing = 1.0 / (self.size * self.pixel_size)
        f = (np.arange(self.size) - self.size // 2) * self.spacing
        self.u, self.v = np.meshgrid(f, f)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != (self.size, self.size):
                raise ValidationError("mask shape does not match grid")
        elif r_max is None:
            mask = np.ones((self.size, self.size), dtype=bool)
        else:
            mask = np.hypot(self.u, self.v) <= r_max * (1 + 1e-12)
            mask[0, :] = False
            mask[:, 0] = False
        self.mask = mask
        self._rows, self._cols = np.nonzero(mask)

    @property
    def shape(self):
        return (self.size, self.size)

    def __len__(self):
        return len(self._rows)

    def points(self) -> np.ndarray:
        """Unmasked lattice frequencies as ``(m, 2)`` rows of ``(u, v)``, in mask order."""
        return np.column_stack([self.u[self._rows, self._cols], self.v[self._rows, self._cols]])

    def scatter(self, values) -> np.ndarray:
        """Place ``m`` values (one per unmasked point) into a zero-filled complex grid."""
        out = np.zeros(self.shape, dtype=complex)
        out[self._rows, self._cols] = values
        return out

    def gather(self, grid_values) -> np.ndarray:
        return np.asarray(grid_values)[self._rows, self._cols]

    def image_grid(self) -> ImageGrid:
        return ImageGrid.zeros(self.size, self.pixel_size)


def _image(image) -> ImageGrid:
    return image if isinstance(image, ImageGrid) else ImageGrid(image)


def ndft_forward(image, freqs) -> np.ndarray:
    """Direct (non-uniform) Fourier sum of an image at arbitrary frequencies.

    The 2-D exponential factorizes, so the sum is carried out as two small
    matrix products instead of one ``n x M**2`` kernel.
    """
    img = _image(image)
    xi = np.asarray(freqs, dtype=float).reshape(-1, 2)
    x = img.coordinates()
    eu = np.exp(-2j * np.pi * np.outer(xi[:, 0], x))
    ev = np.exp(-2j * np.pi * np.outer(xi[:, 1], x))
    return np.einsum("ir,ir->i", ev @ img.pixels, eu) * img.pixel_area


def _check_conjugate(img: ImageGrid, grid: FrequencyGrid):
    if img.size != grid.size or not np.isclose(img.pixel_size, grid.pixel_size):
        raise ValidationError("image and frequency grid are not conjugate")


def _mirror(a: np.ndarray) -> np.ndarray:
    """``out[k] = a[-k mod M]`` along both axes."""
    return np.roll(a[::-1, ::-1], 1, axis=(0, 1))


def grid_forward(image, grid: FrequencyGrid) -> np.ndarray:
    """Fourier transform of an image on the masked lattice (zeros outside the mask)."""
    img = _image(image)
    _check_conjugate(img, grid)
    f = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(img.pixels))) * img.pixel_area
    # exact Hermitian symmetry for real images
    f = 0.5 * (f + np.conj(_mirror(f)))
    f[~grid.mask] = 0.0
    return f


def grid_adjoint(vis: np.ndarray, grid: FrequencyGrid) -> ImageGrid:
    """Adjoint of :func:`grid_forward` for the real inner product ``Re <a, b>``."""
    v = np.where(grid.mask, np.asarray(vis, dtype=complex), 0.0)
    x = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(v))).real
    return ImageGrid(x * (grid.size**2 * grid.pixel_size**2), grid.pixel_size)


def power_iteration(apply, x0: np.ndarray, max_iter: int = 500, rtol: float = 1e-10) -> float:
    """Largest eigenvalue of a symmetric positive semi-definite map."""
    x = x0 / np.linalg.norm(x0)
    lam = 0.0
    for _ in range(max_iter):
        y = apply(x)
        lam_new = float(np.real(np.vdot(x, y)))
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(lam_new - lam) <= rtol * abs(lam_new):
            return lam_new
        lam = lam_new
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")


def operator_norm_sq(grid: FrequencyGrid, image_shape=None, seed: int = 0) -> float:
    """``||A||^2`` of the masked lattice transform, by power iteration on ``A* A``."""
    if not grid.mask.any():
        return 0.0
    shape = grid.shape if image_shape is None else tuple(image_shape)
    if shape != grid.shape:
        raise ValidationError("image shape does not match grid")
    x0 = np.random.default_rng(seed).standard_normal(shape) + 1.0
    return power_iteration(lambda x: grid_adjoint(grid_forward(ImageGrid(x, grid.pixel_size), grid), grid).pixels, x0)
