"""Grid discretization of planar domains.

A shape is sampled on the square lattice h*Z^2: a node is interior iff its
center lies strictly inside the shape. The retained grid is the tight
bounding box of the interior nodes plus a collar of exterior nodes wide
enough that every nonlocal kernel ball of radius T stays covered (grid
functions vanish identically outside the interior, so the collar carries
explicit zeros for the kernel sums).

Distances are Euclidean, measured to the true continuum boundary for the
analytic shapes (disk, rectangle, L-shape) and to the nearest non-interior
node center for mask-file domains. Flat node indices are C-order over
(ix, iy); all tie-breaks use this lexicographic order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import (
    BadMaskFile,
    CenterTooShallow,
    DomainMismatch,
    EmptyDomain,
)

DIM = 2


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Disk:
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def bbox(self) -> tuple[float, float, float, float]:
        r = self.radius
        return (-r, r, -r, r)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x * x + y * y < self.radius**2

    def boundary_distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.radius - np.hypot(x, y)


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"rectangle sides must be positive, got {self.a}, {self.b}")

    def bbox(self) -> tuple[float, float, float, float]:
        return (0.0, self.a, 0.0, self.b)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x > 0) & (x < self.a) & (y > 0) & (y < self.b)

    def boundary_distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.minimum(np.minimum(x, self.a - x), np.minimum(y, self.b - y))


@dataclass(frozen=True)
class LShape:
    """[0,a] x [0,b] with the closed notch [a-notch_a, a] x [b-notch_b, b] removed."""

    a: float
    b: float
    notch_a: float
    notch_b: float

    def __post_init__(self) -> None:
        ok = 0 < self.notch_a < self.a and 0 < self.notch_b < self.b
        if not ok:
            raise ValueError(
                f"notch {self.notch_a}x{self.notch_b} must fit strictly inside "
                f"rectangle {self.a}x{self.b}"
            )

    def bbox(self) -> tuple[float, float, float, float]:
        return (0.0, self.a, 0.0, self.b)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        outer = (x > 0) & (x < self.a) & (y > 0) & (y < self.b)
        notch = (x >= self.a - self.notch_a) & (y >= self.b - self.notch_b)
        return outer & ~notch

    def edges(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        a, b, na, nb = self.a, self.b, self.notch_a, self.notch_b
        ring = [(0.0, 0.0), (a, 0.0), (a, b - nb), (a - na, b - nb), (a - na, b), (0.0, b)]
        return [(ring[k], ring[(k + 1) % len(ring)]) for k in range(len(ring))]

    def boundary_distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        d = np.full(np.shape(x), np.inf)
        for (x0, y0), (x1, y1) in self.edges():
            ex, ey = x1 - x0, y1 - y0
            t = np.clip(((x - x0) * ex + (y - y0) * ey) / (ex * ex + ey * ey), 0.0, 1.0)
            d = np.minimum(d, np.hypot(x - (x0 + t * ex), y - (y0 + t * ey)))
        return d


@dataclass(frozen=True, eq=False)
class MaskShape:
    """Interior membership given row-wise by a 0/1 text file (row 0 = top = max y)."""

    file_mask: np.ndarray  # bool, shape (rows, cols), file order
    h: float
    path: str = ""

    def lattice_mask(self) -> np.ndarray:
        # (ix, iy) indexing with iy increasing upward: flip the file rows.
        return self.file_mask[::-1, :].T.copy()


ShapeSpec = Disk | Rectangle | LShape | MaskShape


def load_mask(path: str | Path) -> MaskShape:
    """Parse a mask file: header "rows cols h", then rows of 0/1 characters."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BadMaskFile(f"cannot read mask file {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise BadMaskFile(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 3:
        raise BadMaskFile(f"{path}: header must be 'rows cols h', got {lines[0]!r}")
    try:
        rows, cols, h = int(header[0]), int(header[1]), float(header[2])
    except ValueError as exc:
        raise BadMaskFile(f"{path}: bad header {lines[0]!r}") from exc
    if rows <= 0 or cols <= 0 or not (h > 0 and math.isfinite(h)):
        raise BadMaskFile(f"{path}: nonpositive dimensions or spacing in header")
    body = [ln for ln in lines[1:] if ln.strip() != ""]
    if len(body) != rows:
        raise BadMaskFile(f"{path}: expected {rows} mask rows, found {len(body)}")
    mask = np.zeros((rows, cols), dtype=bool)
    for k, ln in enumerate(body):
        row = ln.strip()
        if len(row) != cols or set(row) - {"0", "1"}:
            raise BadMaskFile(f"{path}: row {k + 1} must be {cols} chars of 0/1, got {row!r}")
        mask[k] = np.frombuffer(row.encode(), dtype=np.uint8) == ord("1")
    return MaskShape(file_mask=mask, h=h, path=str(path))


# ---------------------------------------------------------------------------
# domain


@dataclass(frozen=True, eq=False)
class GridDomain:
    h: float
    origin: tuple[float, float]  # coordinates of node (ix=0, iy=0)
    extent: tuple[int, int]  # node counts (nx, ny) of the retained grid
    interior_mask: np.ndarray  # bool (nx, ny)
    collar_width: int
    distance: np.ndarray  # float (nx, ny); 0 at non-interior nodes
    inradius: float
    deepest: np.ndarray  # flat indices attaining inradius, ascending
    shape: ShapeSpec

    @property
    def dim(self) -> int:
        return DIM

    @property
    def n_nodes(self) -> int:
        return self.extent[0] * self.extent[1]

    @cached_property
    def all_xy(self) -> np.ndarray:
        """(n_nodes, 2) node coordinates, C-order over (ix, iy)."""
        nx, ny = self.extent
        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        xs = self.origin[0] + ix.ravel() * self.h
        ys = self.origin[1] + iy.ravel() * self.h
        return np.column_stack([xs, ys])

    @cached_property
    def interior_idx(self) -> np.ndarray:
        return np.flatnonzero(self.interior_mask.ravel())

    @property
    def n_interior(self) -> int:
        return int(self.interior_idx.size)

    @cached_property
    def interior_xy(self) -> np.ndarray:
        return self.all_xy[self.interior_idx]

    @cached_property
    def interior_distance(self) -> np.ndarray:
        return self.distance.ravel()[self.interior_idx]

    @cached_property
    def interior_bbox_diameter(self) -> float:
        xy = self.interior_xy
        span = xy.max(axis=0) - xy.min(axis=0)
        return float(np.hypot(span[0], span[1]))

    def node_xy(self, flat_idx: int) -> tuple[float, float]:
        nx, ny = self.extent
        ix, iy = divmod(int(flat_idx), ny)
        return (self.origin[0] + ix * self.h, self.origin[1] + iy * self.h)

    def is_interior(self, flat_idx: int) -> bool:
        return bool(self.interior_mask.ravel()[int(flat_idx)])


def build_domain(
    shape: ShapeSpec, h: float | None = None, collar_width: int | None = None
) -> GridDomain:
    """Discretize a shape at spacing h with a zero collar.

    For mask shapes, h is taken from the file; passing a conflicting h is an
    error. collar_width defaults to ceil(diam/h) + 1 where diam is the
    interior bounding-box diagonal, so the default kernel truncation radius
    T = diam always fits inside the collar.
    """
    if isinstance(shape, MaskShape):
        if h is not None and not math.isclose(h, shape.h, rel_tol=1e-12):
            raise BadMaskFile(
                f"spacing {h} conflicts with mask file header h={shape.h}"
            )
        h = shape.h
        lattice = shape.lattice_mask()
        if not lattice.any():
            raise EmptyDomain("mask contains no interior node")
        ix0 = iy0 = 0
    else:
        if h is None or not (h > 0 and math.isfinite(h)):
            raise ValueError(f"spacing h must be positive and finite, got {h}")
        xmin, xmax, ymin, ymax = shape.bbox()
        ixs = np.arange(math.floor(xmin / h) - 1, math.ceil(xmax / h) + 2)
        iys = np.arange(math.floor(ymin / h) - 1, math.ceil(ymax / h) + 2)
        gx, gy = np.meshgrid(ixs * h, iys * h, indexing="ij")
        lattice = shape.contains(gx, gy)
        if not lattice.any():
            raise EmptyDomain(f"{shape} contains no lattice node at h={h}")
        ix0, iy0 = int(ixs[0]), int(iys[0])

    # crop to the tight bounding box of interior nodes
    occ_x = np.flatnonzero(lattice.any(axis=1))
    occ_y = np.flatnonzero(lattice.any(axis=0))
    core = lattice[occ_x[0] : occ_x[-1] + 1, occ_y[0] : occ_y[-1] + 1]
    ix0 += int(occ_x[0])
    iy0 += int(occ_y[0])

    diam = h * math.hypot(core.shape[0] - 1, core.shape[1] - 1)
    if collar_width is None:
        collar_width = math.ceil(max(diam, h) / h - 1e-12) + 1
    collar_width = int(collar_width)
    if collar_width < 1:
        raise ValueError(f"collar_width must be >= 1, got {collar_width}")

    nx = core.shape[0] + 2 * collar_width
    ny = core.shape[1] + 2 * collar_width
    interior = np.zeros((nx, ny), dtype=bool)
    interior[collar_width : collar_width + core.shape[0],
             collar_width : collar_width + core.shape[1]] = core
    origin = ((ix0 - collar_width) * h, (iy0 - collar_width) * h)

    dist = _distance_field(shape, h, origin, interior)
    flat_dist = dist.ravel()
    interior_flat = np.flatnonzero(interior.ravel())
    inradius = float(flat_dist[interior_flat].max())
    deepest = interior_flat[flat_dist[interior_flat] == inradius]

    return GridDomain(
        h=h,
        origin=origin,
        extent=(nx, ny),
        interior_mask=interior,
        collar_width=collar_width,
        distance=dist,
        inradius=inradius,
        deepest=deepest,
        shape=shape,
    )


def _distance_field(
    shape: ShapeSpec, h: float, origin: tuple[float, float], interior: np.ndarray
) -> np.ndarray:
    if isinstance(shape, MaskShape):
        dist = ndimage.distance_transform_edt(interior, sampling=h)
        return np.asarray(dist, dtype=float)
    nx, ny = interior.shape
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    x = origin[0] + ix * h
    y = origin[1] + iy * h
    dist = np.where(interior, shape.boundary_distance(x, y), 0.0)
    return dist


def distance_transform(domain: GridDomain) -> np.ndarray:
    """Recompute the per-node distance field of a built domain."""
    return _distance_field(domain.shape, domain.h, domain.origin, domain.interior_mask)


# ---------------------------------------------------------------------------
# grid functions


@dataclass(eq=False)
class GridFunction:
    """Real values on the interior nodes; identically 0 everywhere else."""

    domain: GridDomain
    values: np.ndarray  # (n_interior,), aligned with domain.interior_idx

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.domain.n_interior,):
            raise ValueError(
                f"values shape {v.shape} does not match {self.domain.n_interior} interior nodes"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        self.values = v.copy()

    @classmethod
    def from_full(cls, domain: GridDomain, full: np.ndarray) -> "GridFunction":
        return cls(domain, np.asarray(full, dtype=float).ravel()[domain.interior_idx])

    def full(self) -> np.ndarray:
        out = np.zeros(self.domain.n_nodes)
        out[self.domain.interior_idx] = self.values
        return out.reshape(self.domain.extent)

    def value_at(self, flat_idx: int) -> float:
        pos = np.searchsorted(self.domain.interior_idx, int(flat_idx))
        if pos < self.domain.n_interior and self.domain.interior_idx[pos] == int(flat_idx):
            return float(self.values[pos])
        return 0.0

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max(initial=0.0))

    def _check_same_domain(self, other: "GridFunction") -> None:
        if other.domain is not self.domain:
            raise DomainMismatch("grid functions live on different domains")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_domain(other)
        return GridFunction(self.domain, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_domain(other)
        return GridFunction(self.domain, self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.domain, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.domain, -self.values)


def cone_function(
    domain: GridDomain, x0: int | None = None, radius: float | None = None
) -> GridFunction:
    """Distance cone max(R - |x - x0|, 0), the extremal competitor function.

    x0 defaults to the first deepest node, radius to the inradius. The center
    must be essentially deepest: requesting radius beyond d(x0) + h fails.
    """
    if x0 is None:
        x0 = int(domain.deepest[0])
    r = domain.inradius if radius is None else float(radius)
    d0 = float(domain.distance.ravel()[int(x0)])
    if d0 < r - domain.h:
        raise CenterTooShallow(
            f"cone center has depth {d0:.6g} < R - h = {r - domain.h:.6g}"
        )
    cx, cy = domain.node_xy(int(x0))
    xy = domain.interior_xy
    values = np.maximum(r - np.hypot(xy[:, 0] - cx, xy[:, 1] - cy), 0.0)
    return GridFunction(domain, values)


def eight_neighborhood(domain: GridDomain, flat_indices) -> np.ndarray:
    """Flat indices of the given nodes plus their 8 surrounding nodes."""
    nx, ny = domain.extent
    idx = np.atleast_1d(np.asarray(flat_indices, dtype=np.int64))
    ix, iy = np.divmod(idx, ny)
    out = []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            jx, jy = ix + dx, iy + dy
            ok = (jx >= 0) & (jx < nx) & (jy >= 0) & (jy < ny)
            out.append(jx[ok] * ny + jy[ok])
    return np.unique(np.concatenate(out))


def shape_to_dict(shape: ShapeSpec) -> dict:
    """JSON-ready description of a shape (the config-file vocabulary)."""
    if isinstance(shape, Disk):
        return {"kind": "disk", "radius": shape.radius}
    if isinstance(shape, Rectangle):
        return {"kind": "rectangle", "a": shape.a, "b": shape.b}
    if isinstance(shape, LShape):
        return {"kind": "lshape", "a": shape.a, "b": shape.b,
                "notch_a": shape.notch_a, "notch_b": shape.notch_b}
    return {"kind": "mask", "path": shape.path}


def shape_from_dict(d: dict) -> ShapeSpec:
    """Inverse of shape_to_dict; unknown kinds or keys are errors."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"shape spec must be an object with a 'kind' key, got {d!r}")
    kind = d["kind"]
    rest = {k: v for k, v in d.items() if k != "kind"}
    fields = {
        "disk": ("radius",),
        "rectangle": ("a", "b"),
        "lshape": ("a", "b", "notch_a", "notch_b"),
        "mask": ("path",),
    }
    if kind not in fields:
        raise ValueError(f"unknown shape kind {kind!r}")
    if set(rest) != set(fields[kind]):
        raise ValueError(
            f"shape kind {kind!r} takes exactly keys {sorted(fields[kind])}, "
            f"got {sorted(rest)}"
        )
    if kind == "disk":
        return Disk(float(rest["radius"]))
    if kind == "rectangle":
        return Rectangle(float(rest["a"]), float(rest["b"]))
    if kind == "lshape":
        return LShape(float(rest["a"]), float(rest["b"]),
                      float(rest["notch_a"]), float(rest["notch_b"]))
    return load_mask(rest["path"])


# ---------------------------------------------------------------------------
# dumps


def dump_domain_csv(domain: GridDomain, path: str | Path) -> None:
    """Write node_index,x,y,interior,distance for every retained node."""
    xy = domain.all_xy
    interior = domain.interior_mask.ravel()
    dist = domain.distance.ravel()
    with open(path, "w") as f:
        f.write("node_index,x,y,interior,distance\n")
        for i in range(domain.n_nodes):
            f.write(
                f"{i},{xy[i, 0]:.17g},{xy[i, 1]:.17g},{int(interior[i])},{dist[i]:.17g}\n"
            )


def dump_mask(domain: GridDomain, path: str | Path) -> None:
    """Write the interior mask (tight bounding box) in the mask file format."""
    mask = domain.interior_mask
    occ_x = np.flatnonzero(mask.any(axis=1))
    occ_y = np.flatnonzero(mask.any(axis=0))
    core = mask[occ_x[0] : occ_x[-1] + 1, occ_y[0] : occ_y[-1] + 1]
    rows, cols = core.shape[1], core.shape[0]
    with open(path, "w") as f:
        f.write(f"{rows} {cols} {domain.h:.17g}\n")
        for iy in range(core.shape[1] - 1, -1, -1):  # top row first
            f.write("".join("1" if v else "0" for v in core[:, iy]) + "\n")
