"""Cell-centred discretization of Omega plus a truncated exterior collar.

Pair tables are dense ``(N, N)`` arrays over all nodes with zero diagonal;
the diagonal is excluded from every pair sum (principal value).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count

import numpy as np

INTERIOR, EXTERIOR = 0, 1

_ids = count()


class BadGeometry(ValueError):
    pass


class DiagonalPair(ValueError):
    pass


class DomainMismatch(ValueError):
    pass


def _normalize_omega(omega):
    arr = np.asarray(omega, dtype=float)
    if arr.shape == (2,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] not in (1, 2):
        raise BadGeometry(f"omega must be an interval or an axis-aligned box, got {omega!r}")
    if np.any(arr[:, 1] <= arr[:, 0]):
        raise BadGeometry("empty omega")
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteDomain:
    dim: int
    omega: np.ndarray          # (dim, 2) bounds
    h: float
    collar_R: float
    s: float
    nodes: np.ndarray          # (N, dim) cell centres
    region: np.ndarray         # (N,) INTERIOR / EXTERIOR
    dist: np.ndarray = field(repr=False)
    kernel_s: np.ndarray = field(repr=False)
    kernel_mu: np.ndarray = field(repr=False)
    tail_estimate: float = 0.0
    uid: int = field(default_factory=lambda: next(_ids))

    @property
    def cell_weight(self) -> float:
        return self.h ** self.dim

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def interior(self) -> np.ndarray:
        return self.region == INTERIOR

    @property
    def exterior(self) -> np.ndarray:
        return self.region == EXTERIOR

    @property
    def n_interior(self) -> int:
        return int(self.interior.sum())

    @property
    def n_exterior(self) -> int:
        return int(self.exterior.sum())

    @property
    def volume(self) -> float:
        return float(np.prod(self.omega[:, 1] - self.omega[:, 0]))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.omega[:, 1] - self.omega[:, 0]))

    @property
    def kernel_op(self) -> np.ndarray:
        """cell_weight / |x_i - x_j|^(n+s), zero on the diagonal."""
        return self.kernel_mu * self.kernel_s / self.cell_weight

    def zeros(self) -> "GridFunction":
        return GridFunction(np.zeros(self.n_nodes), self)

    def function(self, fn) -> "GridFunction":
        """Sample ``fn`` (taking an ``(N, dim)`` coordinate array, or ``(N,)`` in 1D)."""
        x = self.nodes[:, 0] if self.dim == 1 else self.nodes
        return GridFunction(np.asarray(fn(x), dtype=float) * np.ones(self.n_nodes), self)

    def refine(self) -> "DiscreteDomain":
        return build_grid(self.omega, self.h / 2, self.collar_R, self.s)


def _axis_cells(lo, hi, h, collar):
    width = hi - lo
    n_in = width / h
    if abs(n_in - round(n_in)) > 1e-9 * max(1.0, n_in):
        raise BadGeometry(f"h={h} does not divide the side length {width}")
    n_in = int(round(n_in))
    n_out = int(round(collar / h))
    if n_out < 1:
        raise BadGeometry(f"collar_R={collar} is thinner than one cell (h={h})")
    k = np.arange(-n_out, n_in + n_out)
    centres = lo + (k + 0.5) * h
    inside = (k >= 0) & (k < n_in)
    return centres, inside


def _tail_bound(omega, collar_R, s):
    """Integral over Omega x (R^n minus the collar box) of |x-y|^-(n+s) (1D exact,
    2D an upper bound using the distance R to the truncation boundary)."""
    dim = omega.shape[0]
    if dim == 1:
        L = omega[0, 1] - omega[0, 0]
        R = collar_R
        return 2 * ((R + L) ** (1 - s) - R ** (1 - s)) / (s * (1 - s))
    area = float(np.prod(omega[:, 1] - omega[:, 0]))
    return area * 2 * np.pi * collar_R ** (-s) / s


def build_grid(omega, h: float, collar_R: float, s: float) -> DiscreteDomain:
    """Uniform cell-centred nodes on Omega and on the collar Omega_R minus Omega.

    >>> d = build_grid((0, 1), 0.1, 1.0, 0.3)
    >>> d.n_interior, d.n_exterior
    (10, 20)
    """
    omega = _normalize_omega(omega)
    if not 0 < s < 1:
        raise BadGeometry(f"s must lie in (0,1), got {s}")
    if h <= 0 or collar_R <= 0:
        raise BadGeometry("h and collar_R must be positive")
    if h >= np.min(omega[:, 1] - omega[:, 0]):
        raise BadGeometry(f"h={h} is not smaller than the domain width")
    axes = [_axis_cells(lo, hi, h, collar_R) for lo, hi in omega]
    if len(axes) == 1:
        nodes = axes[0][0][:, None]
        inside = axes[0][1]
    else:
        (cx, ix), (cy, iy) = axes
        X, Y = np.meshgrid(cx, cy, indexing="ij")
        IX, IY = np.meshgrid(ix, iy, indexing="ij")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        inside = (IX & IY).ravel()
    region = np.where(inside, INTERIOR, EXTERIOR)

    # exact symmetry: fill the upper triangle and mirror it
    iu = np.triu_indices(len(nodes), 1)
    dist = np.zeros((len(nodes), len(nodes)))
    dist[iu] = np.sqrt(np.sum((nodes[iu[0]] - nodes[iu[1]]) ** 2, axis=-1))
    dist = dist + dist.T
    n = nodes.shape[1]
    off = dist > 0
    kernel_s = np.zeros_like(dist)
    kernel_mu = np.zeros_like(dist)
    kernel_s[off] = dist[off] ** (-s)
    kernel_mu[off] = h ** (2 * n) / dist[off] ** n
    return DiscreteDomain(n, omega, float(h), float(collar_R), float(s), nodes, region,
                          dist, kernel_s, kernel_mu, _tail_bound(omega, collar_R, s))


@dataclass(eq=False)
class GridFunction:
    values: np.ndarray
    domain: DiscreteDomain

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.n_nodes,):
            raise DomainMismatch(
                f"expected {self.domain.n_nodes} values, got {self.values.shape}")

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.domain is not self.domain:
                raise DomainMismatch("grid functions live on different domains")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.values + self._other(other), self.domain)

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.values - self._other(other), self.domain)

    def __rsub__(self, other):
        return GridFunction(self._other(other) - self.values, self.domain)

    def __mul__(self, other):
        return GridFunction(self.values * self._other(other), self.domain)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.values / self._other(other), self.domain)

    def __neg__(self):
        return GridFunction(-self.values, self.domain)

    @property
    def interior_values(self):
        return self.values[self.domain.interior]

    @property
    def exterior_values(self):
        return self.values[self.domain.exterior]

    def restrict_interior(self) -> "GridFunction":
        """Zero extension of the interior values (Dirichlet-admissible)."""
        return GridFunction(np.where(self.domain.interior, self.values, 0.0), self.domain)

    def copy(self):
        return GridFunction(self.values.copy(), self.domain)


def holder_quotient(u: GridFunction, i: int, j: int) -> float:
    """(u_i - u_j) / |x_i - x_j|^s."""
    if i == j:
        raise DiagonalPair(f"pair ({i}, {i}) lies on the excluded diagonal")
    return float((u.values[i] - u.values[j]) * u.domain.kernel_s[i, j])


def holder_matrix(u: GridFunction) -> np.ndarray:
    """All s-Holder quotients D_s u(x_i, x_j) as a dense antisymmetric array."""
    v = u.values
    return (v[:, None] - v[None, :]) * u.domain.kernel_s
