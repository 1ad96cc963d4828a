"""Hole shapes and masked uniform grids for the perforated cell and strip."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TORUS_CELL = "torus-cell"
DIRICHLET_STRIP = "dirichlet-strip"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class HoleShape:
    """A convex hole centred at the cell origin.

    ``kind`` is one of ``"none"``, ``"disk"`` (uses ``a`` as the radius) or
    ``"ellipse"`` (semi-axes ``a`` along x and ``b`` along y). All lengths
    are in cell units.
    """

    kind: str = "none"
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind == "none":
            return
        if self.kind == "disk":
            object.__setattr__(self, "b", self.a)
        elif self.kind != "ellipse":
            raise GeometryError(f"unknown hole kind {self.kind!r}")
        for name in ("a", "b"):
            v = getattr(self, name)
            if not (0.0 < v < 0.5):
                raise GeometryError(
                    f"hole semi-axis {name}={v} must lie in (0, 1/2)")

    @classmethod
    def disk(cls, r: float) -> "HoleShape":
        return cls("disk", r, r)

    @classmethod
    def ellipse(cls, a: float, b: float) -> "HoleShape":
        return cls("ellipse", a, b)

    @property
    def x_extent(self) -> float:
        """Largest x-coordinate reached by the hole (0 without a hole)."""
        return 0.0 if self.kind == "none" else self.a

    @property
    def max_extent(self) -> float:
        return 0.0 if self.kind == "none" else max(self.a, self.b)


def signed_distance(shape: HoleShape, point) -> float:
    """Negative inside the hole, zero on its boundary, positive outside.

    Exact for a disk; for an ellipse only the sign is meaningful (implicit
    function ``(x/a)^2 + (y/b)^2 - 1``). Without a hole every point is
    outside and ``+inf`` is returned.
    """
    x, y = float(point[0]), float(point[1])
    if shape.kind == "none":
        return math.inf
    if shape.kind == "disk":
        return math.hypot(x, y) - shape.a
    return (x / shape.a) ** 2 + (y / shape.b) ** 2 - 1.0


def _signed_distance_array(shape: HoleShape, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if shape.kind == "none":
        return np.full(np.broadcast(x, y).shape, np.inf)
    if shape.kind == "disk":
        return np.hypot(x, y) - shape.a
    return (x / shape.a) ** 2 + (y / shape.b) ** 2 - 1.0


def _centered(n: int, total: int) -> np.ndarray:
    # (2j + 1 - total) / (2N) is exact-symmetric about 0
    j = np.arange(total)
    return (2 * j + 1 - total) / (2.0 * n)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CellGrid:
    """Masked cell-centred grid.

    Arrays are indexed ``[j, l]`` with ``j`` along x and ``l`` along y and
    flattened row-major. ``active_index[j, l]`` is the degree-of-freedom
    number of an unmasked point and ``-1`` for a masked one.
    """

    N: int
    topology: str
    shape: HoleShape
    L: int
    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray
    active_index: np.ndarray
    active_flat: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return 1.0 / self.N

    @property
    def nx(self) -> int:
        return self.mask.shape[0]

    @property
    def ny(self) -> int:
        return self.mask.shape[1]

    @property
    def n_active(self) -> int:
        return int(self.active_flat.size)

    @property
    def n_masked(self) -> int:
        return int(self.mask.sum())

    @property
    def n_total(self) -> int:
        return int(self.mask.size)

    @property
    def active_jl(self) -> tuple[np.ndarray, np.ndarray]:
        """Grid indices ``(j, l)`` of every degree of freedom, in DOF order."""
        return np.divmod(self.active_flat, self.ny)

    @property
    def dof_x(self) -> np.ndarray:
        j, _ = self.active_jl
        return self.x[j]

    @property
    def dof_y(self) -> np.ndarray:
        _, l = self.active_jl
        return self.y[l]

    def dof_of(self, j: int, l: int) -> int:
        return int(self.active_index[j, l])

    def point_of(self, dof: int) -> tuple[int, int]:
        j, l = divmod(int(self.active_flat[dof]), self.ny)
        return j, l

    def scatter(self, values: np.ndarray, fill=0.0) -> np.ndarray:
        """Place DOF values on the full ``(nx, ny)`` grid; masked points get ``fill``."""
        out = np.full(self.mask.shape, fill, dtype=np.result_type(values, type(fill)))
        out.reshape(-1)[self.active_flat] = values
        return out


def _cell_mask(N: int, shape: HoleShape) -> np.ndarray:
    c = _centered(N, N)
    X, Y = np.meshgrid(c, c, indexing="ij")
    # boundary points (distance exactly 0) are masked
    return _signed_distance_array(shape, X, Y) <= 0.0


def _check_resolution(N: int, shape: HoleShape, mask: np.ndarray) -> None:
    if N < 2:
        raise GeometryError(f"N={N} must be at least 2")
    if shape.kind == "none":
        return
    # the channel between neighbouring holes must hold two grid points
    gap = 1.0 - 2.0 * shape.max_extent
    if N * gap < 2.0 - 1e-12:
        raise GeometryError(
            f"N={N} too small: the {gap:g}-wide channel between holes needs "
            f"N >= {math.ceil(2.0 / gap - 1e-12)}")
    if mask.all(axis=0).any() or mask.all(axis=1).any():
        raise GeometryError(f"N={N}: a full grid row is masked")


def _finish(N, topology, shape, L, x, y, mask) -> CellGrid:
    active = ~mask
    flat = np.flatnonzero(active.reshape(-1))
    index = np.full(mask.shape, -1, dtype=np.int64)
    index.reshape(-1)[flat] = np.arange(flat.size)
    return CellGrid(N=N, topology=topology, shape=shape, L=L,
                    x=_frozen(x), y=_frozen(y), mask=_frozen(mask),
                    active_index=_frozen(index), active_flat=_frozen(flat))


def build_cell_grid(N: int, shape: HoleShape) -> CellGrid:
    """Torus-cell grid on (-1/2, 1/2)^2, periodic in both directions."""
    if N < 2:
        raise GeometryError(f"N={N} must be at least 2")
    mask = _cell_mask(N, shape)
    _check_resolution(N, shape, mask)
    c = _centered(N, N)
    return _finish(N, TORUS_CELL, shape, 0, c, c.copy(), mask)


def build_strip_grid(N: int, L: int, shape: HoleShape) -> CellGrid:
    """Strip of ``2L+1`` cells, Dirichlet at the x-ends and periodic in y.

    Cell ``n`` (``-L <= n <= L``) is centred at ``x = n`` and carries the
    cell-0 mask translated by ``n``.
    """
    if N < 2:
        raise GeometryError(f"N={N} must be at least 2")
    if L < 0:
        raise GeometryError(f"L={L} must be non-negative")
    cell = _cell_mask(N, shape)
    _check_resolution(N, shape, cell)
    mask = np.tile(cell, (2 * L + 1, 1))
    x = _centered(N, (2 * L + 1) * N)
    return _finish(N, DIRICHLET_STRIP, shape, L, x, _centered(N, N), mask)
