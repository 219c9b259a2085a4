"""Synthetic flare images, Fibonacci frequency nodes and noisy visibilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import SourceOutOfField, ValidationError
from .fourier import ImageGrid, ndft_forward
from .kernels import NodeSet

GOLDEN_RATIO = (1 + np.sqrt(5)) / 2
FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))
SIGMA_FLOOR = 1e-6
SHAPES = ("single", "double", "loop")


def fibonacci_nodes(n: int, r_max: float = 1.0) -> NodeSet:
    """Golden-angle spiral of ``n`` points filling the disk of radius ``r_max``."""
    if n < 1:
        raise ValidationError("need at least one node")
    if not r_max > 0:
        raise ValidationError("r_max must be positive")
    k = np.arange(n)
    radius = np.sqrt((k + 0.5) / n) * r_max
    angle = 2 * np.pi * k / GOLDEN_RATIO**2
    return NodeSet(np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]), k)


@dataclass(frozen=True)
class GaussianComponent:
    """2-D Gaussian of total ``flux``; ``fwhm_major`` (defaults to ``fwhm``) runs along ``angle`` (degrees)."""

    x: float = 0.0
    y: float = 0.0
    flux: float = 1.0
    fwhm: float = 10.0
    fwhm_major: Optional[float] = None
    angle: float = 0.0

    def __post_init__(self):
        if not self.flux > 0:
            raise ValidationError(f"component flux must be positive, got {self.flux}")
        if not self.fwhm > 0 or (self.fwhm_major is not None and not self.fwhm_major > 0):
            raise ValidationError("FWHM must be positive")

    @property
    def sigma_minor(self) -> float:
        return self.fwhm * FWHM_TO_SIGMA

    @property
    def sigma_major(self) -> float:
        return (self.fwhm if self.fwhm_major is None else self.fwhm_major) * FWHM_TO_SIGMA


@dataclass(frozen=True)
class SourceConfig:
    """Single and loop use one component, double uses two.

    A loop bends its component along a circular arc of the given
    ``curvature`` (1/arcsec); the arc runs along the major axis and bows
    towards the left-hand normal.  ``curvature=0`` reproduces the unbent
    component.
    """

    shape: str = "single"
    components: tuple = (GaussianComponent(),)
    curvature: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValidationError(f"unknown source shape {self.shape!r}")
        object.__setattr__(self, "components", tuple(self.components))
        want = 2 if self.shape == "double" else 1
        if len(self.components) != want:
            raise ValidationError(f"{self.shape} source needs {want} component(s)")
        if self.curvature < 0:
            raise ValidationError("loop curvature must be non-negative")

    @property
    def total_flux(self) -> float:
        return float(sum(c.flux for c in self.components))


FIXTURES = {
    "single": SourceConfig("single", (GaussianComponent(x=6.0, y=-4.0, flux=1.0, fwhm=10.0),)),
    "double": SourceConfig("double", (
        GaussianComponent(x=-12.0, y=6.0, flux=0.6, fwhm=8.0),
        GaussianComponent(x=10.0, y=-6.0, flux=0.4, fwhm=7.0),
    )),
    "loop": SourceConfig("loop", (GaussianComponent(x=0.0, y=0.0, flux=1.0, fwhm=6.0, fwhm_major=26.0, angle=30.0),),
                         curvature=1.0 / 14.0),
}


def fixture(name: str) -> SourceConfig:
    try:
        return FIXTURES[name]
    except KeyError:
        raise ValidationError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def _local_coords(comp: GaussianComponent, x, y):
    t = np.deg2rad(comp.angle)
    dx, dy = x - comp.x, y - comp.y
    along = dx * np.cos(t) + dy * np.sin(t)
    across = -dx * np.sin(t) + dy * np.cos(t)
    return along, across


def _gaussian(comp: GaussianComponent, x, y):
    a, c = _local_coords(comp, x, y)
    sa, sc = comp.sigma_major, comp.sigma_minor
    return comp.flux / (2 * np.pi * sa * sc) * np.exp(-0.5 * ((a / sa) ** 2 + (c / sc) ** 2))


def _bent_gaussian(comp: GaussianComponent, curvature: float, x, y):
    a, c = _local_coords(comp, x, y)
    rho0 = 1.0 / curvature
    # circle center on the across-axis; arc-length and radial offset replace (along, across)
    dc = c - rho0
    rho = np.hypot(a, dc)
    arc = rho0 * np.arctan2(a, -dc)
    offset = rho0 - rho
    sa, sc = comp.sigma_major, comp.sigma_minor
    return np.exp(-0.5 * ((arc / sa) ** 2 + (offset / sc) ** 2))


def render_source(cfg: SourceConfig, size: int = 128, pixel_size: float = 1.0) -> ImageGrid:
    """Sample the source at pixel centers; pixel values are flux densities (flux / arcsec^2)."""
    x1 = (np.arange(size) - size // 2) * pixel_size
    x, y = np.meshgrid(x1, x1)
    lo, hi = x1[0], x1[-1]
    img = np.zeros((size, size))
    for comp in cfg.components:
        reach = 3.0 * comp.sigma_major + (comp.fwhm_major or comp.fwhm)
        if not (lo + reach <= comp.x <= hi - reach and lo + reach <= comp.y <= hi - reach):
            raise SourceOutOfField(f"component at ({comp.x}, {comp.y}) does not fit in the field of view")
        if cfg.shape == "loop" and cfg.curvature > 0:
            prof = _bent_gaussian(comp, cfg.curvature, x, y)
            img += comp.flux * prof / (prof.sum() * pixel_size**2)
        else:
            img += _gaussian(comp, x, y)
    return ImageGrid(img, pixel_size)


@dataclass(frozen=True)
class FrequencySample:
    xi: tuple
    value: complex
    sigma: float


@dataclass(frozen=True)
class Visibilities:
    """Columnar set of visibility samples: frequencies ``xi`` (N, 2), complex ``values``, ``sigma``."""

    xi: np.ndarray
    values: np.ndarray
    sigma: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float).reshape(-1, 2)
        vals = np.asarray(self.values, dtype=complex).ravel()
        sig = np.broadcast_to(np.asarray(self.sigma, dtype=float), vals.shape).copy()
        if len(xi) != len(vals):
            raise ValidationError("frequency and value counts differ")
        if np.any(sig <= 0):
            raise ValidationError("sigma must be positive")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "sigma", sig)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i) -> FrequencySample:
        return FrequencySample(tuple(self.xi[i]), complex(self.values[i]), float(self.sigma[i]))

    def __iter__(self) -> Iterator[FrequencySample]:
        return (self[i] for i in range(len(self)))

    def subset(self, indices) -> "Visibilities":
        idx = np.asarray(indices, dtype=int)
        return Visibilities(self.xi[idx], self.values[idx], self.sigma[idx], self.meta)

    def nodes(self) -> NodeSet:
        return NodeSet(self.xi.copy(), np.arange(len(self)))


def simulate_visibilities(image: ImageGrid, nodes, noise_level: float = 0.01, seed=0,
                          sigma_floor: float = SIGMA_FLOOR) -> Visibilities:
    """Visibilities of ``image`` plus complex Gaussian noise.

    Each real/imaginary component gets standard deviation
    ``noise_level * max|clean|``; with zero noise ``sigma`` is ``sigma_floor``.
    """
    if noise_level < 0:
        raise ValidationError("noise_level must be non-negative")
    xi = nodes.points if isinstance(nodes, NodeSet) else np.asarray(nodes, dtype=float)
    clean = ndft_forward(image, xi)
    sigma = noise_level * float(np.max(np.abs(clean))) if len(clean) else 0.0
    if sigma <= 0:
        return Visibilities(xi, clean, sigma_floor, {"seed": seed, "noise_level": noise_level})
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=(len(clean), 2))
    return Visibilities(xi, clean + noise[:, 0] + 1j * noise[:, 1], sigma,
                        {"seed": seed, "noise_level": noise_level})
