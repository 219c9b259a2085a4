"""Select, interpolate onto the frequency lattice, invert with projected Landweber; score the result."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DivisionByZero, GreedyInverseError, ValidationError
from .fourier import FrequencyGrid, ImageGrid, ndft_forward, operator_norm_sq
from .greedy import GreedyConfig, SelectionResult, select_error_based, select_residual
from .kernels import KernelConfig, NodeSet, default_shape, eval_interpolant, fit_interpolant
from .landweber import LandweberConfig, landweber, resolve_step
from .simulation import SourceConfig, Visibilities, fibonacci_nodes, fixture, render_source, simulate_visibilities

log = logging.getLogger(__name__)


@contextmanager
def stage(name: str):
    """Tag package errors raised inside the block with the pipeline stage (``exc.stage``)."""
    try:
        yield
    except GreedyInverseError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
        raise

ALL_POINTS = "all"
SAMPLING_MODES = (ALL_POINTS, "error", "residual")


# ---------------------------------------------------------------- metrics

def _residuals(samples, predicted):
    y = np.asarray(samples.values if hasattr(samples, "values") else samples, dtype=complex).ravel()
    p = np.asarray(predicted, dtype=complex).ravel()
    if len(y) != len(p) or len(y) == 0:
        raise ValidationError(f"need matching non-empty data, got {len(y)} samples and {len(p)} predictions")
    return y, np.abs(y - p)


def chi2(samples: Visibilities, predicted) -> float:
    """``mean(|y - p| / sigma**2)`` -- first power of the residual."""
    _, r = _residuals(samples, predicted)
    return float(np.mean(r / samples.sigma**2))


def chi2_sq(samples: Visibilities, predicted) -> float:
    """Conventional ``mean(|y - p|**2 / sigma**2)``."""
    _, r = _residuals(samples, predicted)
    return float(np.mean(r**2 / samples.sigma**2))


def rmse(samples, predicted) -> float:
    _, r = _residuals(samples, predicted)
    return float(np.sqrt(np.mean(r**2)))


def mre(samples, predicted) -> float:
    y, r = _residuals(samples, predicted)
    ay = np.abs(y)
    if np.any(ay == 0):
        raise DivisionByZero("MRE undefined: some measured visibilities are zero")
    return float(np.mean(r / ay))


# ---------------------------------------------------------------- configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``kernel_shape=None`` selects ``1 / (2 h)`` with ``h`` the fill distance
    of whichever samples are being interpolated (the full set for P-greedy).
    ``residual_forward`` is ``"full"`` (data predicted from the reconstructed
    image) or ``"proxy"`` (the interpolant itself).
    """

    source: SourceConfig = field(default_factory=lambda: fixture("single"))
    source_name: str = "single"
    n_frequencies: int = 400
    r_max: float = 0.1
    noise_level: float = 0.01
    seed: int = 0
    kernel_family: str = "matern52"
    kernel_shape: Optional[float] = None
    n_select: Optional[int] = 80
    tau: Optional[float] = None
    initial_index: Optional[int] = None
    residual_forward: str = "full"
    landweber: LandweberConfig = LandweberConfig()
    image_size: int = 128
    pixel_size: float = 1.0

    def __post_init__(self):
        if self.n_frequencies < 1:
            raise ValidationError("n_frequencies must be positive")
        if not self.r_max > 0:
            raise ValidationError("r_max must be positive")
        if self.r_max >= 0.5 / self.pixel_size:
            raise ValidationError("r_max must stay below the lattice Nyquist frequency 0.5/pixel_size")
        if self.residual_forward not in ("full", "proxy"):
            raise ValidationError("residual_forward must be 'full' or 'proxy'")
        if self.image_size % 2 or self.image_size < 16:
            raise ValidationError("image_size must be even and at least 16")

    def greedy(self, mode: str) -> GreedyConfig:
        return GreedyConfig(mode, self.n_select, self.tau, self.initial_index)


@dataclass(frozen=True)
class ReconstructionReport:
    sampling_mode: str
    chi2: float
    chi2_sq: float
    rmse: float
    mre: float
    n_used: int
    iterations_used: int
    method: str = "uv_smooth"
    artifacts: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"mode": self.sampling_mode, "method": self.method, "chi2": self.chi2, "chi2_sq": self.chi2_sq,
                "rmse": self.rmse, "mre": self.mre, "n_used": self.n_used}


# ---------------------------------------------------------------- setup

class Experiment:
    """Ground truth, frequency set, data and operators for one configuration."""

    def __init__(self, cfg: ExperimentConfig, visibilities: Optional[Visibilities] = None):
        self.cfg = cfg
        self.nodes = fibonacci_nodes(cfg.n_frequencies, cfg.r_max)
        self.truth = render_source(cfg.source, cfg.image_size, cfg.pixel_size)
        if visibilities is None:
            visibilities = simulate_visibilities(self.truth, self.nodes, cfg.noise_level, cfg.seed)
        self.vis = visibilities
        r_max = float(np.max(np.hypot(self.vis.xi[:, 0], self.vis.xi[:, 1])))
        if not r_max > 0:
            raise ValidationError("visibility frequencies must not all sit at the origin")
        self.grid = FrequencyGrid(cfg.image_size, cfg.pixel_size, r_max=r_max)
        self.r_max = r_max
        # P-greedy and the all-points fit use the full-set kernel
        self.kernel = self.kernel_for(np.arange(len(self.vis)))
        self.step = resolve_step(self.grid, cfg.landweber, operator_norm_sq(self.grid))
        self._grid_points = self.grid.points()

    def kernel_for(self, indices) -> KernelConfig:
        """Kernel used to interpolate the samples at ``indices``.

        Without a fixed shape, the shape is ``1 / (2 h)`` with ``h`` the fill
        distance of those samples in the sampled disk.
        """
        shape = self.cfg.kernel_shape
        if shape is None:
            shape = default_shape(self.vis.xi[np.asarray(indices, dtype=int)], self.r_max)
        return KernelConfig(self.cfg.kernel_family, shape)

    def interpolant(self, indices):
        idx = np.asarray(indices, dtype=int)
        return fit_interpolant(self.kernel_for(idx), NodeSet(self.vis.xi[idx], idx), self.vis.values[idx])

    def image_from(self, indices) -> tuple[ImageGrid, int]:
        """Interpolate the chosen samples onto the lattice and run Landweber."""
        with stage("interpolate"):
            model = self.interpolant(indices)
            vis_grid = self.grid.scatter(eval_interpolant(model, self._grid_points))
        with stage("landweber"):
            image, result = landweber(vis_grid, self.grid, self.cfg.landweber, step=self.step)
        return image, result.iterations

    def select(self, mode: str) -> SelectionResult:
        gcfg = self.cfg.greedy(mode)
        if mode == "error":
            return select_error_based(self.vis.xi, self.kernel, gcfg)
        if self.cfg.residual_forward == "proxy":
            recon = self.interpolant

            def fwd(model, xi):
                return eval_interpolant(model, xi)
        else:
            def recon(idx):
                return self.image_from(idx)[0]

            def fwd(image, xi):
                return ndft_forward(image, xi)
        sel = select_residual(self.vis, recon, fwd, gcfg)
        sel.kernel = self.kernel.to_dict()
        return sel


def reconstruct(exp: Experiment, selection: Union[SelectionResult, str, None] = ALL_POINTS
                ) -> tuple[ImageGrid, ReconstructionReport]:
    """Reconstruct from a selection (or all points) and score against every sample."""
    if selection is None or selection == ALL_POINTS:
        indices, mode = np.arange(len(exp.vis)), ALL_POINTS
    else:
        indices, mode = np.asarray(selection.order, dtype=int), selection.mode
        if len(indices) == 0 or indices.min() < 0 or indices.max() >= len(exp.vis):
            raise ValidationError("selection indices out of range")
    image, iters = exp.image_from(indices)
    with stage("metrics"):
        pred = ndft_forward(image, exp.vis.xi)
        report = ReconstructionReport(mode, chi2(exp.vis, pred), chi2_sq(exp.vis, pred), rmse(exp.vis, pred),
                                      mre(exp.vis, pred), len(indices), iters)
    return image, report


@dataclass
class ExperimentResult:
    experiment: Experiment
    selections: dict
    images: dict
    reports: dict

    def table(self) -> list:
        return [self.reports[m].row() for m in SAMPLING_MODES if m in self.reports]


def run_experiment(cfg: ExperimentConfig, visibilities: Optional[Visibilities] = None) -> ExperimentResult:
    """All-points, error-based and residual-based reconstructions of one configuration.

    On failure the exception carries ``stage`` and ``result``, the
    :class:`ExperimentResult` of the modes that did finish.
    """
    with stage("setup"):
        exp = Experiment(cfg, visibilities)
    result = ExperimentResult(exp, {}, {}, {})
    try:
        result.images[ALL_POINTS], result.reports[ALL_POINTS] = reconstruct(exp, ALL_POINTS)
        for mode in ("error", "residual"):
            with stage("select"):
                sel = exp.select(mode)
            result.selections[mode] = sel
            result.images[mode], result.reports[mode] = reconstruct(exp, sel)
            log.info("%s: n=%d rmse=%.4g", mode, len(sel), result.reports[mode].rmse)
    except GreedyInverseError as exc:
        exc.result = result
        raise
    return result
