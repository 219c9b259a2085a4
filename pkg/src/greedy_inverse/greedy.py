"""Greedy selection of measurement subsets.

Two selection rules are provided:

* residual-based: add the sample whose datum is worst reproduced by the
  current reconstruction pushed through the forward operator;
* error-based (P-greedy): add the sample where the kernel power function of
  the current node set is largest.  This never looks at the measured values.

Ties in every argmax go to the lowest sample index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NumericalBreakdown, ReconstructorFailure, ValidationError
from .kernels import KernelConfig, NodeSet

MODES = ("residual", "error")
PIVOT_MIN = 1e-20


@dataclass(frozen=True)
class GreedyConfig:
    """Stopping rule: stop once ``n`` points are chosen or the indicator drops to ``tau``.

    With neither set, every sample is ranked.  ``initial_index=None`` picks
    the sample closest to the origin.
    """

    mode: str = "error"
    n: Optional[int] = None
    tau: Optional[float] = None
    initial_index: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown greedy mode {self.mode!r}; choose from {MODES}")
        if self.n is not None and self.n < 1:
            raise ValidationError("n must be a positive integer")
        if self.tau is not None and not self.tau > 0:
            raise ValidationError("tau must be positive")

    def limit(self, total: int) -> int:
        if self.n is not None and self.n > total:
            raise ValidationError(f"cannot select n={self.n} out of {total} samples")
        return total if self.n is None else self.n

    def start(self, points: np.ndarray) -> int:
        if self.initial_index is None:
            return int(np.argmin(np.hypot(points[:, 0], points[:, 1])))
        if not 0 <= self.initial_index < len(points):
            raise ValidationError(f"initial_index {self.initial_index} out of range")
        return int(self.initial_index)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "n": self.n, "tau": self.tau, "initial_index": self.initial_index}


@dataclass
class SelectionResult:
    """Selected sample indices in selection order.

    ``indicator_trace[k]`` is the criterion value that selected ``order[k]``;
    for the initial sample it is the value against an empty model (1 for
    the power function, ``|y|`` for the residual).  ``final_indicator`` is
    the maximum over the remaining samples when the loop stopped on ``tau``
    (``None`` otherwise).
    """

    order: list
    indicator_trace: list
    mode: str
    kernel: Optional[dict] = None
    final_indicator: Optional[float] = None
    config: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.order)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "kernel": self.kernel,
            "order": [int(i) for i in self.order],
            "indicator_trace": [float(v) for v in self.indicator_trace],
            "final_indicator": None if self.final_indicator is None else float(self.final_indicator),
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionResult":
        return cls(list(d["order"]), list(d["indicator_trace"]), d["mode"], d.get("kernel"),
                   d.get("final_indicator"), d.get("config", {}))

    @classmethod
    def from_json(cls, text: str) -> "SelectionResult":
        return cls.from_dict(json.loads(text))


class PowerState:
    """Squared power function on a fixed candidate set, updated one node at a time.

    Keeps the Newton basis evaluated at all candidates, so adding a node
    costs one kernel column and O(N n) work.
    """

    def __init__(self, kernel: KernelConfig, points, capacity: Optional[int] = None):
        self.kernel = kernel
        self.points = np.asarray(points.points if isinstance(points, NodeSet) else points, dtype=float)
        n_pts = len(self.points)
        self.lifted = kernel.lift(self.points)
        self._basis = np.zeros((n_pts, capacity or min(n_pts, 64)))
        self.selected: list = []
        self.p2 = np.ones(n_pts)

    @property
    def basis(self) -> np.ndarray:
        return self._basis[:, : len(self.selected)]

    def power(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.p2, 0.0))

    def add(self, j: int) -> "PowerState":
        pivot = self.p2[j]
        if pivot < PIVOT_MIN:
            raise NumericalBreakdown(f"power function pivot {pivot:.3e} at candidate {j}: nearly duplicate node")
        k = len(self.selected)
        if k == self._basis.shape[1]:
            grown = np.zeros((len(self.points), max(2 * k, 1)))
            grown[:, :k] = self._basis[:, :k]
            self._basis = grown
        diff = self.lifted - self.lifted[j]
        col = self.kernel.radial(np.sqrt(np.einsum("ij,ij->i", diff, diff)))
        v = (col - self._basis[:, :k] @ self._basis[j, :k]) / np.sqrt(pivot)
        self._basis[:, k] = v
        self.p2 = self.p2 - v * v
        self.selected.append(int(j))
        # exactly zero at nodes; the update leaves O(eps) roundoff there
        self.p2[self.selected] = 0.0
        return self


def update_power_cheap(state: PowerState, new_node: int) -> PowerState:
    return state.add(new_node)


def _argmax_unselected(values: np.ndarray, selected) -> int:
    masked = np.array(values, dtype=float, copy=True)
    masked[list(selected)] = -np.inf
    return int(np.argmax(masked))


def select_error_based(points, kernel: KernelConfig, cfg: GreedyConfig) -> SelectionResult:
    """P-greedy selection on the candidate set ``points``."""
    if cfg.mode != "error":
        raise ValidationError("select_error_based requires mode='error'")
    pts = np.asarray(points.points if isinstance(points, NodeSet) else points, dtype=float)
    limit = cfg.limit(len(pts))
    first = cfg.start(pts)
    state = PowerState(kernel, pts, capacity=limit)
    order, trace = [first], [float(state.power()[first])]
    state.add(first)
    final = None
    while len(order) < limit:
        p = state.power()
        j = _argmax_unselected(p, order)
        if cfg.tau is not None and p[j] <= cfg.tau:
            final = float(p[j])
            break
        order.append(j)
        trace.append(float(p[j]))
        state.add(j)
    return SelectionResult(order, trace, "error", kernel.to_dict(), final, cfg.to_dict())


def select_residual(samples, reconstructor: Callable[[Sequence[int]], object],
                    forward: Callable[[object, np.ndarray], np.ndarray], cfg: GreedyConfig) -> SelectionResult:
    """Residual-based selection.

    ``reconstructor(indices)`` builds a model from the samples at ``indices``;
    ``forward(model, xi)`` predicts the data at frequencies ``xi``.  The
    sample with the largest ``|y - forward(model, xi)|`` among those not yet
    chosen is added and the model rebuilt.
    """
    if cfg.mode != "residual":
        raise ValidationError("select_residual requires mode='residual'")
    xi, y = _columns(samples)
    limit = cfg.limit(len(y))
    first = cfg.start(xi)
    order, trace = [first], [float(abs(y[first]))]
    chosen = np.zeros(len(y), dtype=bool)
    chosen[first] = True

    def partial(final=None):
        return SelectionResult(list(order), list(trace), "residual", None, final, cfg.to_dict())

    def rebuild():
        try:
            return reconstructor(list(order))
        except Exception as exc:
            raise ReconstructorFailure(f"reconstructor failed on {len(order)} samples: {exc}", partial()) from exc

    model = rebuild()
    final = None
    while len(order) < limit:
        rest = np.flatnonzero(~chosen)
        try:
            res = np.abs(y[rest] - np.asarray(forward(model, xi[rest])))
        except Exception as exc:
            raise ReconstructorFailure(f"forward evaluation failed: {exc}", partial()) from exc
        k = int(np.argmax(res))
        if cfg.tau is not None and res[k] <= cfg.tau:
            final = float(res[k])
            break
        order.append(int(rest[k]))
        trace.append(float(res[k]))
        chosen[rest[k]] = True
        model = rebuild()
    return partial(final)


def _columns(samples):
    if hasattr(samples, "xi") and hasattr(samples, "values"):
        xi = np.asarray(samples.xi, dtype=float).reshape(-1, 2)
        return xi, np.asarray(samples.values, dtype=complex).ravel()
    rows = list(samples)
    xi = np.array([s.xi for s in rows], dtype=float).reshape(-1, 2)
    return xi, np.array([s.value for s in rows], dtype=complex)
