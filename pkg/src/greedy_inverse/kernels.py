"""Positive-definite radial kernels and kernel interpolation on scattered 2-D nodes.

All kernels are normalized so that ``k(x, x) = 1``.  Complex data are
interpolated component-wise with a single Cholesky factorization of the
kernel matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import DuplicateNodes, NumericalBreakdown, SingularMatrix, ValidationError

FAMILIES = ("gaussian", "matern12", "matern32", "matern52")

JITTER = 1e-12
MAX_JITTER = 1e-6
MIN_SEPARATION = 1e-12
# power function values squared in [-NEG_TOL, 0) are treated as round-off
NEG_TOL = 1e-10
REFINE_STEPS = 2

_SQRT3 = np.sqrt(3.0)
_SQRT5 = np.sqrt(5.0)


def _as_points(x) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError(f"expected points of shape (n, 2), got {np.shape(x)}")
    return pts


@dataclass(frozen=True)
class KernelConfig:
    """Radial kernel ``phi(shape * ||T(a) - T(b)||)``.

    ``vsk_scale``, when given, maps an ``(n, 2)`` array of points to ``n``
    scalars; points are then lifted to 3-D as ``(x, y, vsk_scale(x, y))``
    before distances are taken (variably scaled kernel).
    """

    family: str = "gaussian"
    shape: float = 1.0
    vsk_scale: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if not (np.isfinite(self.shape) and self.shape > 0):
            raise ValidationError(f"kernel shape must be positive, got {self.shape}")

    def radial(self, r: np.ndarray) -> np.ndarray:
        er = self.shape * np.asarray(r, dtype=float)
        if self.family == "gaussian":
            return np.exp(-(er**2))
        if self.family == "matern12":
            return np.exp(-er)
        if self.family == "matern32":
            return (1.0 + _SQRT3 * er) * np.exp(-_SQRT3 * er)
        return (1.0 + _SQRT5 * er + 5.0 * er**2 / 3.0) * np.exp(-_SQRT5 * er)

    def lift(self, points: np.ndarray) -> np.ndarray:
        pts = _as_points(points)
        if self.vsk_scale is None:
            return pts
        s = np.asarray(self.vsk_scale(pts), dtype=float).reshape(-1, 1)
        return np.hstack([pts, s])

    def matrix(self, a, b) -> np.ndarray:
        """Kernel matrix ``K[i, j] = k(a_i, b_j)``."""
        return self.radial(cdist(self.lift(a), self.lift(b)))

    def to_dict(self) -> dict:
        return {"family": self.family, "shape": float(self.shape), "vsk": self.vsk_scale is not None}


@dataclass(frozen=True)
class NodeSet:
    """Ordered 2-D points, each tagged with its index in the parent sample set."""

    points: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_points(cls, points, indices=None) -> "NodeSet":
        pts = _as_points(points) if len(np.asarray(points)) else np.empty((0, 2))
        idx = np.arange(len(pts)) if indices is None else np.asarray(indices, dtype=int)
        if len(idx) != len(pts):
            raise ValidationError("indices and points differ in length")
        return cls(pts, idx)

    def subset(self, positions) -> "NodeSet":
        positions = np.asarray(positions, dtype=int)
        return NodeSet(self.points[positions], self.indices[positions])

    def __len__(self):
        return len(self.points)

    def min_separation(self) -> float:
        if len(self) < 2:
            return np.inf
        return float(pdist(self.points).min())


def _nodes(nodes) -> NodeSet:
    return nodes if isinstance(nodes, NodeSet) else NodeSet.from_points(nodes)


def kernel_eval(cfg: KernelConfig, a, b) -> float:
    return float(cfg.matrix(a, b)[0, 0])


def assemble_kernel_matrix(cfg: KernelConfig, nodes, jitter: float = JITTER) -> np.ndarray:
    """Symmetric kernel matrix of ``nodes`` with ``jitter`` added to the diagonal."""
    nodes = _nodes(nodes)
    if nodes.min_separation() < MIN_SEPARATION:
        raise DuplicateNodes("node set contains (nearly) coincident points")
    if len(nodes) == 0:
        return np.zeros((0, 0))
    # pdist/squareform keeps the matrix exactly symmetric
    phi = squareform(cfg.radial(pdist(cfg.lift(nodes.points))))
    phi[np.diag_indices_from(phi)] = 1.0 + jitter
    return phi


class KernelSystem:
    """Cholesky-factored kernel matrix of a node set.

    Jitter starts at 1e-12 and is escalated tenfold up to 1e-6 before
    giving up with :class:`SingularMatrix`.
    """

    def __init__(self, cfg: KernelConfig, nodes):
        self.cfg = cfg
        self.nodes = _nodes(nodes)
        base = assemble_kernel_matrix(cfg, self.nodes, jitter=0.0)
        jitter = JITTER
        while True:
            phi = base + jitter * np.eye(len(base))
            try:
                self.factor = cho_factor(phi, lower=True, check_finite=False) if len(base) else None
                break
            except np.linalg.LinAlgError:
                jitter *= 10.0
                if jitter > MAX_JITTER * (1 + 1e-9):
                    raise SingularMatrix("kernel matrix not positive definite even with jitter 1e-6")
        self.jitter = jitter
        self.matrix = phi
        self.kernel_matrix = base

    def __len__(self):
        return len(self.nodes)

    def solve(self, rhs: np.ndarray, refine: bool = True) -> np.ndarray:
        """``Phi^-1 rhs`` through the jittered factor.

        With ``refine``, a few steps of iterative refinement against the
        jitter-free matrix remove the ``jitter * x`` bias of the plain solve.
        """
        if len(self) == 0:
            return np.zeros_like(rhs, dtype=float)
        x = cho_solve(self.factor, rhs, check_finite=False)
        if refine:
            for _ in range(REFINE_STEPS):
                x = x + cho_solve(self.factor, rhs - self.kernel_matrix @ x, check_finite=False)
        return x

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(len(self)))

    def basis(self, query) -> np.ndarray:
        """``b(x) = (k(x, x_1), ..., k(x, x_n))`` for each query row, shape (m, n)."""
        return self.cfg.matrix(_as_points(query), self.nodes.points) if len(self) else np.zeros((len(_as_points(query)), 0))

    def cardinal(self, query) -> np.ndarray:
        """Cardinal functions at each query, shape (m, n)."""
        return self.solve(self.basis(query).T).T

    def lebesgue(self, query) -> np.ndarray:
        return np.abs(self.cardinal(query)).sum(axis=1)

    def power_squared(self, query) -> np.ndarray:
        """``||k(., x) - sum_i u_i(x) k(., x_i)||^2`` in the native space of the kernel.

        ``u`` are the cardinal values of the (jittered) system, so this is the
        worst-case squared error of the interpolant actually applied; without
        jitter it reduces to ``k(x, x) - b(x)^T Phi^-1 b(x)``.
        """
        q = _as_points(query)
        diag = np.ones(len(q))
        if len(self) == 0:
            return diag
        b = self.basis(q)
        u = self.solve(b.T, refine=False)
        return diag - 2.0 * np.einsum("ij,ij->j", b.T, u) + np.einsum("ij,ij->j", u, self.kernel_matrix @ u)

    def power(self, query) -> np.ndarray:
        p2 = self.power_squared(query)
        if np.any(p2 < -NEG_TOL):
            raise NumericalBreakdown(f"power function squared is {p2.min():.3e} < 0")
        return np.sqrt(np.maximum(p2, 0.0))


class NativeNorm(NamedTuple):
    re: float
    im: float

    @property
    def total(self) -> float:
        return float(np.hypot(self.re, self.im))


@dataclass(frozen=True)
class InterpolationModel:
    kernel: KernelConfig
    nodes: NodeSet
    coeffs_re: np.ndarray
    coeffs_im: np.ndarray
    values: np.ndarray
    system: KernelSystem = field(repr=False, compare=False)

    @property
    def coeffs(self) -> np.ndarray:
        return self.coeffs_re + 1j * self.coeffs_im

    def __call__(self, query) -> np.ndarray:
        return eval_interpolant(self, query)


def factorize(cfg: KernelConfig, nodes) -> KernelSystem:
    return KernelSystem(cfg, nodes)


def _system(cfg_or_model, nodes=None) -> KernelSystem:
    if isinstance(cfg_or_model, InterpolationModel):
        return cfg_or_model.system
    if isinstance(cfg_or_model, KernelSystem):
        return cfg_or_model
    return KernelSystem(cfg_or_model, nodes)


def fit_interpolant(cfg: KernelConfig, nodes, values) -> InterpolationModel:
    """Solve ``Phi c = y`` for the real and imaginary parts of ``values``."""
    system = nodes if isinstance(nodes, KernelSystem) else KernelSystem(cfg, nodes)
    y = np.asarray(values, dtype=complex).ravel()
    if len(y) != len(system):
        raise ValidationError(f"{len(y)} values for {len(system)} nodes")
    c = system.solve(np.column_stack([y.real, y.imag])) if len(y) else np.zeros((0, 2))
    return InterpolationModel(cfg, system.nodes, c[:, 0].copy(), c[:, 1].copy(), y, system)


def eval_interpolant(model: InterpolationModel, query) -> np.ndarray:
    b = model.system.basis(query)
    return b @ model.coeffs_re + 1j * (b @ model.coeffs_im)


def cardinal_values(cfg_or_model, nodes=None, query=None) -> np.ndarray:
    """Cardinal (Lagrange) basis values; a single point gives a vector of length n."""
    if query is None:
        nodes, query = None, nodes
    system = _system(cfg_or_model, nodes)
    out = system.cardinal(query)
    return out[0] if np.ndim(query) == 1 else out


def lebesgue_function(cfg_or_model, nodes=None, query=None):
    if query is None:
        nodes, query = None, nodes
    out = _system(cfg_or_model, nodes).lebesgue(query)
    return float(out[0]) if np.ndim(query) == 1 else out


def power_function(cfg_or_model, nodes=None, query=None):
    if query is None:
        nodes, query = None, nodes
    out = _system(cfg_or_model, nodes).power(query)
    return float(out[0]) if np.ndim(query) == 1 else out


@dataclass(frozen=True)
class LebesgueEstimate:
    lambda_max: float
    eval_points: np.ndarray
    argmax: int


def lebesgue_constant(cfg_or_model, nodes=None, candidates=None) -> LebesgueEstimate:
    """Maximum of the Lebesgue function over a finite candidate set."""
    if candidates is None:
        nodes, candidates = None, nodes
    cand = _as_points(candidates)
    lam = _system(cfg_or_model, nodes).lebesgue(cand)
    k = int(np.argmax(lam))
    return LebesgueEstimate(float(lam[k]), cand, k)


def lebesgue_upper_bound(cfg_or_model, nodes=None) -> float:
    """``||Phi^-1||_inf * n * max_l ||b_l||_inf``; normalized kernels have ``||b_l||_inf = 1``."""
    system = _system(cfg_or_model, nodes)
    n = len(system)
    if n == 0:
        return 0.0
    return float(np.abs(system.inverse()).sum(axis=1).max() * n * 1.0)


def native_norm(model: InterpolationModel) -> NativeNorm:
    """Native-space norm ``sqrt(y^T Phi^-1 y)`` of the real and imaginary parts."""
    y = model.values
    re = float(np.dot(y.real, model.coeffs_re))
    im = float(np.dot(y.imag, model.coeffs_im))
    return NativeNorm(np.sqrt(max(re, 0.0)), np.sqrt(max(im, 0.0)))


def fill_distance(nodes, candidates) -> float:
    """Largest distance from a candidate point to its nearest node."""
    pts = nodes.points if isinstance(nodes, NodeSet) else _as_points(nodes)
    d, _ = cKDTree(pts).query(_as_points(candidates))
    return float(np.max(d))


def disk_candidates(radius: float, n: int = 101) -> np.ndarray:
    """Uniform ``n x n`` lattice points inside the disk of the given radius."""
    t = np.linspace(-radius, radius, n)
    g = np.stack(np.meshgrid(t, t), axis=-1).reshape(-1, 2)
    return g[np.hypot(g[:, 0], g[:, 1]) <= radius * (1 + 1e-12)]


def default_shape(nodes, radius: Optional[float] = None) -> float:
    """Gaussian shape ``1 / (2 h)`` with ``h`` the fill distance of ``nodes`` in its disk."""
    pts = nodes.points if isinstance(nodes, NodeSet) else _as_points(nodes)
    if radius is None:
        radius = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
    if not radius > 0:
        raise ValidationError("default shape needs nodes spanning a disk of positive radius")
    return 1.0 / (2.0 * fill_distance(pts, disk_candidates(radius)))
