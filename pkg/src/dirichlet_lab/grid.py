"""Lattice-clipped bounded domains, grid functions and discrete L^p norms.

Only interior lattice nodes carry unknowns.  Every grid function is understood
to vanish at the remaining lattice points, which is how the homogeneous
Dirichlet condition enters all operators built on top of a :class:`Grid`.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

KINDS = ("rectangle", "disk", "l_shape")


@dataclass(frozen=True, eq=False)
class Grid:
    """Interior nodes of a bounded domain sampled on the lattice ``origin + h Z^d``.

    ``lattice`` holds the integer lattice coordinates of the nodes, ``nodes``
    the physical coordinates.  Nodes are ordered lexicographically in the
    lattice coordinates (first axis slowest).  Grids compare and hash by
    identity so they can key operator caches.
    """

    kind: str
    d: int
    n: int
    h: float
    lattice: np.ndarray
    origin: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lattice.setflags(write=False)
        self.origin.setflags(write=False)
        nodes = self.origin + self.h * self.lattice
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        index_map = {tuple(int(v) for v in row): i for i, row in enumerate(self.lattice)}
        object.__setattr__(self, "index_map", index_map)

    @property
    def size(self) -> int:
        return self.lattice.shape[0]

    @property
    def weight(self) -> float:
        """Quadrature weight carried by every node."""
        return self.h**self.d

    def coordinate(self, j: int) -> np.ndarray:
        return self.nodes[:, j]

    def neighbor(self, i: int, axis: int, step: int) -> int:
        """Index of the lattice neighbor ``step`` cells along ``axis``, or -1."""
        key = list(int(v) for v in self.lattice[i])
        key[axis] += step
        return self.index_map.get(tuple(key), -1)

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Vectorised open-domain membership test for points ``x`` of shape (m, d)."""
        return _inside(self.kind, self.params, np.atleast_2d(x))

    def function(self, values) -> "GridFunction":
        return GridFunction(self, values)

    def sample(self, fn) -> "GridFunction":
        """Sample ``fn(*coords)`` at the interior nodes."""
        coords = [self.nodes[:, j] for j in range(self.d)]
        return GridFunction(self, np.broadcast_to(fn(*coords), (self.size,)))

    def describe(self) -> dict:
        return {"kind": self.kind, "d": self.d, "n": self.n, "h": self.h,
                "nodes": self.size, **{k: _jsonable(v) for k, v in self.params.items()}}


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the interior nodes of ``grid``; zero elsewhere on the lattice."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.ndim != 1 or values.shape[0] != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} values, got array of shape {values.shape}")
        if not (np.isrealobj(values) or np.iscomplexobj(values)) or values.dtype == object:
            raise TypeError("grid function values must be numeric")
        if not np.iscomplexobj(values):
            values = values.astype(float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c) -> "GridFunction":
        if isinstance(c, GridFunction):
            self._check_same_grid(c)
            return GridFunction(self.grid, self.values * c.values)
        return GridFunction(self.grid, c * self.values)

    __rmul__ = __mul__

    def __abs__(self) -> "GridFunction":
        return GridFunction(self.grid, np.abs(self.values))

    def _check_same_grid(self, other):
        if other.grid is not self.grid:
            raise ValueError("grid functions live on different grids")

    def to_csv(self, path) -> None:
        """Write columns ``x, y, value`` (``x, value`` in 1-D)."""
        names = ["x", "y"][: self.grid.d]
        complex_values = np.iscomplexobj(self.values)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names + (["value_re", "value_im"] if complex_values else ["value"]))
            for xy, v in zip(self.grid.nodes, self.values):
                vals = [repr(float(v.real)), repr(float(v.imag))] if complex_values else [repr(float(v))]
                w.writerow([repr(float(c)) for c in xy] + vals)

    def to_json(self) -> str:
        payload = {"grid": self.grid.describe(), "nodes": self.grid.nodes.tolist()}
        if np.iscomplexobj(self.values):
            payload["values_re"] = self.values.real.tolist()
            payload["values_im"] = self.values.imag.tolist()
        else:
            payload["values"] = self.values.tolist()
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str, grid: Grid | None = None) -> "GridFunction":
        """Rebuild from :meth:`to_json`; the grid is rebuilt from its description if not given."""
        payload = json.loads(text)
        if grid is None:
            desc = dict(payload["grid"])
            kind, n = desc.pop("kind"), desc.pop("n")
            for key in ("d", "h", "nodes"):
                desc.pop(key, None)
            grid = build_grid(kind, n, **desc)
        if "values" in payload:
            values = np.asarray(payload["values"], dtype=float)
        else:
            values = np.asarray(payload["values_re"]) + 1j * np.asarray(payload["values_im"])
        return cls(grid, values)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    return v


def _inside(kind: str, params: dict, x: np.ndarray) -> np.ndarray:
    if kind == "rectangle":
        sides = np.asarray(params["sides"], dtype=float)
        return np.all((x > 0) & (x < sides), axis=1)
    if kind == "disk":
        center = np.asarray(params["center"], dtype=float)
        return np.sum((x - center) ** 2, axis=1) < params["radius"] ** 2
    if kind == "l_shape":
        side, width = params["side"], params["width"]
        box = np.all((x > 0) & (x < side), axis=1)
        notch = np.all(x >= width, axis=1)
        return box & ~notch
    raise ValueError(f"unknown domain kind {kind!r}")


def build_grid(kind: str, n: int, **geometry) -> Grid:
    """Build the interior-node grid of a bounded domain.

    Parameters
    ----------
    kind : {"rectangle", "disk", "l_shape"}
    n : int
        Number of mesh cells across the domain's first axis (``n >= 4``).
    **geometry
        ``rectangle``: ``sides`` (default ``(1.0, 1.0)``; a 1-tuple gives an
        interval in d = 1).  Every side must be an integer multiple of
        ``h = sides[0] / n``.
        ``disk``: ``radius`` (default 1) and ``center`` (default
        ``(radius, radius)``); ``h = 2 radius / n``.
        ``l_shape``: ``side`` (default 1) and arm ``width`` (default
        ``side / 2``); the square ``(0, side)^2`` minus ``[width, side)^2``,
        ``h = side / n``.

    Examples
    --------
    >>> build_grid("rectangle", 4).size
    9
    """
    if kind not in KINDS:
        raise ValueError(f"unknown domain kind {kind!r}; expected one of {KINDS}")
    if int(n) != n or n < 4:
        raise ValueError(f"n must be an integer >= 4, got {n}")
    n = int(n)

    if kind == "rectangle":
        sides = tuple(float(s) for s in geometry.pop("sides", (1.0, 1.0)))
        _reject_extra(geometry)
        if len(sides) not in (1, 2) or min(sides) <= 0:
            raise ValueError(f"rectangle sides must be 1 or 2 positive lengths, got {sides}")
        h = sides[0] / n
        counts = []
        for s in sides:
            m = s / h
            if abs(m - round(m)) > 1e-9 * max(1.0, m):
                raise ValueError(f"side {s} is not a multiple of h = {h}")
            counts.append(int(round(m)))
        lattice = np.array(list(itertools.product(*(range(1, m) for m in counts))), dtype=int)
        if lattice.size == 0:
            raise ValueError("grid has no interior nodes")
        return Grid(kind, len(sides), n, h, lattice.reshape(-1, len(sides)),
                    np.zeros(len(sides)), {"sides": sides})

    if kind == "disk":
        radius = float(geometry.pop("radius", 1.0))
        if radius <= 0:
            raise ValueError("disk radius must be positive")
        center = np.asarray(geometry.pop("center", (radius, radius)), dtype=float)
        _reject_extra(geometry)
        h = 2 * radius / n
        params = {"radius": radius, "center": tuple(center.tolist())}
        # lattice anchored at the disk center
        half = n // 2 + 1
        cand = np.array(list(itertools.product(range(-half, half + 1), repeat=2)), dtype=int)
        keep = _inside(kind, params, center + h * cand)
        return Grid(kind, 2, n, h, cand[keep], center.copy(), params)

    side = float(geometry.pop("side", 1.0))
    width = float(geometry.pop("width", side / 2))
    _reject_extra(geometry)
    if side <= 0 or width <= 0 or width >= side:
        raise ValueError("l_shape needs 0 < width < side")
    h = side / n
    params = {"side": side, "width": width}
    cand = np.array(list(itertools.product(range(1, n), repeat=2)), dtype=int)
    keep = _inside(kind, params, h * cand)
    return Grid(kind, 2, n, h, cand[keep], np.zeros(2), params)


def _reject_extra(geometry: dict) -> None:
    if geometry:
        raise TypeError(f"unexpected geometry parameters: {sorted(geometry)}")


def multi_indices(d: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices gamma in N^d with |gamma| = order, lexicographically descending."""
    if order < 0:
        raise ValueError("order must be non-negative")
    out = [g for g in itertools.product(range(order, -1, -1), repeat=d) if sum(g) == order]
    return out


def check_multi_index(gamma: Sequence[int], d: int) -> tuple[int, ...]:
    gamma = tuple(int(g) for g in gamma)
    if len(gamma) != d:
        raise ValueError(f"multi-index {gamma} has wrong length for d = {d}")
    if any(g < 0 for g in gamma):
        raise ValueError(f"multi-index entries must be >= 0, got {gamma}")
    return gamma


def multinomial(gamma: Iterable[int]) -> int:
    gamma = list(gamma)
    out = math.factorial(sum(gamma))
    for g in gamma:
        out //= math.factorial(g)
    return out


def _as_values(f) -> tuple[np.ndarray, float]:
    if isinstance(f, GridFunction):
        return f.values, f.grid.weight
    raise TypeError("expected a GridFunction")


def lp_norm(f: GridFunction, p: float) -> float:
    """Discrete L^p norm ``(sum_i h^d |f_i|^p)^(1/p)``; ``p = inf`` gives ``max |f_i|``."""
    values, w = _as_values(f)
    return weighted_lp(values, w, p)


def weighted_lp(values: np.ndarray, weight: float, p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    a = np.abs(values)
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(weight * a.sum())
    if p == 2:
        return float(math.sqrt(weight) * np.linalg.norm(a))
    scale = a.max()
    if scale == 0:
        return 0.0
    return float(scale * (weight * np.sum((a / scale) ** p)) ** (1 / p))


def bump(r2: np.ndarray) -> np.ndarray:
    """``exp(-1/(1 - r2))`` for ``r2 < 1``, zero otherwise (``r2`` is squared radius)."""
    r2 = np.asarray(r2, dtype=float)
    out = np.zeros_like(r2)
    inside = r2 < 1
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def bump_initial_data(grid: Grid, center: Sequence[float], radius: float) -> GridFunction:
    """Smooth compactly supported bump of height ``e^-1`` centred at ``center``.

    Raises ``ValueError`` unless the closed ball ``B(center, radius)`` lies
    strictly inside the domain.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.d,):
        raise ValueError(f"center must have {grid.d} coordinates")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if not _ball_inside(grid, center, radius):
        raise ValueError("bump support touches or crosses the domain boundary")
    r2 = np.sum((grid.nodes - center) ** 2, axis=1) / radius**2
    return GridFunction(grid, bump(r2))


def _ball_inside(grid: Grid, center: np.ndarray, radius: float) -> bool:
    p = grid.params
    if grid.kind == "rectangle":
        sides = np.asarray(p["sides"])
        return bool(np.all(center - radius > 0) and np.all(center + radius < sides))
    if grid.kind == "disk":
        return float(np.linalg.norm(center - np.asarray(p["center"]))) + radius < p["radius"]
    # l_shape: the box test plus distance to the notch [width, side)^2
    side, width = p["side"], p["width"]
    if not (np.all(center - radius > 0) and np.all(center + radius < side)):
        return False
    gap = np.maximum(width - center, 0.0)
    return float(np.linalg.norm(gap)) > radius
