"""Projected Landweber iteration and the operator norm of the truncated (linear) scheme."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DivergenceDetected, ValidationError
from .fourier import FrequencyGrid, ImageGrid, grid_adjoint, grid_forward, operator_norm_sq, power_iteration

DIVERGENCE_WINDOW = 50
DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class LandweberConfig:
    """``step=None`` means ``1 / ||A||^2``; ``max_iters`` plays the role of the regularization parameter."""

    step: Optional[float] = None
    max_iters: int = 200
    positivity: bool = True
    stop_rtol: float = 1e-6

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValidationError("Landweber step must be positive")
        if self.max_iters < 0:
            raise ValidationError("max_iters must be non-negative")
        if self.stop_rtol < 0:
            raise ValidationError("stop_rtol must be non-negative")

    def to_dict(self) -> dict:
        return {"step": self.step, "max_iters": self.max_iters, "positivity": self.positivity,
                "stop_rtol": self.stop_rtol}


@dataclass
class LandweberResult:
    solution: np.ndarray
    iterations: int
    residual_norms: list = field(default_factory=list)


def landweber_solve(forward: Callable, adjoint: Callable, y, x0, step: float, max_iters: int,
                    positivity: bool = False, stop_rtol: float = 0.0) -> LandweberResult:
    """``x <- P(x + step * A*(y - A x))`` with ``P`` the clamp at zero when ``positivity``.

    Stops after ``max_iters`` or once ``||x_new - x|| < stop_rtol * ||x_new||``.
    ``residual_norms[k]`` is ``||y - A x_k||``.
    """
    x = np.array(x0, copy=True)
    r = y - forward(x)
    res = [float(np.linalg.norm(r))]
    k = 0
    while k < max_iters:
        x_new = x + step * adjoint(r)
        if positivity:
            x_new = np.maximum(x_new.real, 0.0)
        dx = np.linalg.norm(x_new - x)
        nx = np.linalg.norm(x_new)
        x = x_new
        k += 1
        r = y - forward(x)
        res.append(float(np.linalg.norm(r)))
        if k >= DIVERGENCE_WINDOW and res[k] > DIVERGENCE_FACTOR * res[k - DIVERGENCE_WINDOW]:
            raise DivergenceDetected(f"residual grew from {res[k - DIVERGENCE_WINDOW]:.3e} to {res[k]:.3e}")
        if not np.isfinite(res[-1]):
            raise DivergenceDetected("residual is not finite")
        if dx < stop_rtol * nx:
            break
    return LandweberResult(x, k, res)


def resolve_step(grid: FrequencyGrid, cfg: LandweberConfig, norm_sq: Optional[float] = None) -> float:
    """Step size for ``cfg`` on ``grid``; explicit steps must satisfy ``step < 2 / ||A||^2``."""
    if norm_sq is None:
        norm_sq = operator_norm_sq(grid)
    if norm_sq == 0.0:
        return cfg.step if cfg.step is not None else 0.0
    if cfg.step is None:
        return 1.0 / norm_sq
    if cfg.step >= 2.0 / norm_sq * (1 - 1e-12):
        raise ValidationError(f"step {cfg.step} violates step < 2/||A||^2 = {2.0 / norm_sq}")
    return cfg.step


def landweber(vis_grid, grid: FrequencyGrid, cfg: LandweberConfig = LandweberConfig(),
              step: Optional[float] = None) -> tuple[ImageGrid, LandweberResult]:
    """Reconstruct an image from masked lattice visibilities, starting from zero.

    ``step`` overrides the configured step without validating it.
    """
    if step is None:
        step = resolve_step(grid, cfg)
    px = grid.pixel_size
    y = np.where(grid.mask, np.asarray(vis_grid, dtype=complex), 0.0)
    result = landweber_solve(
        lambda x: grid_forward(ImageGrid(x, px), grid),
        lambda r: grid_adjoint(r, grid).pixels,
        y, np.zeros(grid.shape), step, cfg.max_iters, cfg.positivity, cfg.stop_rtol,
    )
    return ImageGrid(result.solution, px), result


def linear_landweber_map(grid: FrequencyGrid, step: float, iters: int, vis_grid) -> np.ndarray:
    """``iters`` unconstrained steps from zero, without early stopping (a linear map of the data)."""
    y = np.where(grid.mask, vis_grid, 0.0)
    x = np.zeros(grid.shape)
    for _ in range(iters):
        x = x + step * grid_adjoint(y - grid_forward(ImageGrid(x, grid.pixel_size), grid), grid).pixels
    return x


def _linear_landweber_transpose(grid: FrequencyGrid, step: float, iters: int, image) -> np.ndarray:
    """Transpose of :func:`linear_landweber_map` with respect to ``Re <., .>`` on the data."""
    # R = step * sum_j (I - step A*A)^j A*, so R^T = step * A sum_j (I - step A*A)^j
    px = grid.pixel_size
    acc = np.zeros(grid.shape)
    term = np.array(image, dtype=float)
    for _ in range(iters):
        acc = acc + term
        term = term - step * grid_adjoint(grid_forward(ImageGrid(term, px), grid), grid).pixels
    return step * grid_forward(ImageGrid(acc, px), grid)


def regularizer_norm(grid: FrequencyGrid, cfg: LandweberConfig, seed: int = 0) -> float:
    """Euclidean operator norm of the unconstrained ``max_iters``-step Landweber map.

    The map acts on the complex unmasked lattice entries and returns a real image.
    """
    if cfg.positivity:
        raise ValidationError("regularizer_norm is defined for the linear (positivity=False) scheme")
    if cfg.max_iters == 0 or not grid.mask.any():
        return 0.0
    step = resolve_step(grid, cfg)
    rng = np.random.default_rng(seed)
    v0 = grid.scatter(rng.standard_normal(len(grid)) + 1j * rng.standard_normal(len(grid)))

    def normal(v):
        return _linear_landweber_transpose(grid, step, cfg.max_iters, linear_landweber_map(grid, step, cfg.max_iters, v))

    return float(np.sqrt(power_iteration(normal, v0)))
