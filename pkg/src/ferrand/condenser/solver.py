"""Grid estimate of condenser capacity by discrete Dirichlet energy.

The potential is 1 on plate E and 0 on plate F.  On a tensor-product grid
the discrete energy is sum_w w_e (u_a - u_b)^2 over grid edges, with
w_e = (dual edge length) / (edge length); on a uniform grid w_e = 1 and this
is the 5-point Laplacian.  The minimiser solves a symmetric positive
definite system, solved by conjugate gradients preconditioned with a sparse
LU factorization, and the capacity is the energy of the minimiser.

Plates enter the grid in one of two ways.  By default every grid edge that
crosses a plate is cut at the crossing: the free end node is tied to the
plate potential through the shortened edge, which places the boundary
exactly instead of on the nearest nodes.  Alternatively, nodes within h/2 of
a plate are simply clamped to its potential.  The grid has a uniform core of
spacing h around the plates and, by default, a geometrically stretched far
field reaching far past the plates with an insulating outer edge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, cg, splu

from .geometry import plate_bbox, plate_distance
from .spec import CondenserSpec, separation


class OracleError(RuntimeError):
    """The grid problem is ill-posed at this resolution or did not solve."""


@dataclass(frozen=True)
class SolverConfig:
    residual_tol: float = 1e-10
    max_iter: int = 50
    # h = separation / cells_per_gap unless h is given
    cells_per_gap: int = 16
    min_gap_cells: float = 4.0
    min_plate_nodes: int = 3
    # "cut": edges crossing a plate are shortened to the crossing point and
    # nodes within snap * h of a plate become plate nodes;
    # "nodes": nodes within h/2 of a plate are plate nodes
    boundary: str = "cut"
    snap: float = 0.01
    # uniform core margin around the plates, in units of the plate gap
    core_margin: float = 1.0
    # far field: reach (multiple of the core size) and growth ratio
    far_reach: float = 100.0
    far_ratio: float = 1.25
    levels: int = 3


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class SolveReport:
    capacity: float
    h: float
    iterations: int
    residual: float
    nodes: int = 0
    extrapolated: float | None = None
    order: float | None = None
    extrapolation_refused: bool = False
    sequence: tuple[float, ...] = ()
    residual_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def best(self) -> float:
        """Extrapolated value when available, otherwise the raw capacity."""
        return self.extrapolated if self.extrapolated is not None else self.capacity

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "h": self.h,
            "iterations": self.iterations,
            "residual": self.residual,
            "nodes": self.nodes,
            "extrapolated": self.extrapolated,
            "order": self.order,
            "extrapolation_refused": self.extrapolation_refused,
            "sequence": list(self.sequence),
        }


@dataclass(frozen=True)
class Richardson:
    value: float
    order: float | None
    refused: bool


def richardson_extrapolate(c_h: float, c_h2: float, c_h4: float) -> Richardson:
    """Extrapolate values at spacings h, h/2, h/4 assuming error ~ C h^q.

    The order q is fitted from the three values.  A sequence whose successive
    differences change sign, or do not shrink, is refused: the finest value
    is returned with ``refused`` set.
    """
    d1 = c_h - c_h2
    d2 = c_h2 - c_h4
    if d1 == 0 and d2 == 0:
        return Richardson(c_h4, None, False)
    if d1 * d2 <= 0 or abs(d2) >= abs(d1):
        return Richardson(c_h4, None, True)
    q = math.log2(d1 / d2)
    # c = C + a h^q gives d2 = a (h/4)^q (2^q - 1)
    return Richardson(c_h4 - d2 / (2.0**q - 1.0), q, False)


# ---------------------------------------------------------------------------
# grid construction


def _axis(lo: float, hi: float, h: float, far: float, ratio: float, stretched: bool):
    """Coarse node coordinates: uniform on [lo, hi], stretched beyond."""
    n = int(round((hi - lo) / h))
    core = lo + h * np.arange(n + 1)
    if not stretched:
        return core
    right, left = [], []
    step, pos = h, hi
    while pos < hi + far:
        step *= ratio
        pos += step
        right.append(pos)
    step, pos = h, lo
    while pos > lo - far:
        step *= ratio
        pos -= step
        left.append(pos)
    return np.concatenate([left[::-1], core, right])


def _refine(nodes: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        out = np.empty(2 * len(nodes) - 1)
        out[0::2] = nodes
        out[1::2] = mid
        nodes = out
    return nodes


def _dual_lengths(nodes: np.ndarray) -> np.ndarray:
    d = np.diff(nodes)
    dual = np.empty(len(nodes))
    dual[0] = 0.5 * d[0]
    dual[-1] = 0.5 * d[-1]
    dual[1:-1] = 0.5 * (d[:-1] + d[1:])
    return dual


@dataclass
class Grid:
    x: np.ndarray
    y: np.ndarray
    h: float

    @property
    def shape(self):
        return len(self.x), len(self.y)

    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return (X + 1j * Y).ravel()

    def edges(self):
        """(a, b, weight) arrays over all grid edges; node id = i * ny + j."""
        nx, ny = self.shape
        ids = np.arange(nx * ny).reshape(nx, ny)
        dx = np.diff(self.x)
        dy = np.diff(self.y)
        lx = _dual_lengths(self.x)
        ly = _dual_lengths(self.y)
        wx = ly[None, :] / dx[:, None]
        wy = lx[:, None] / dy[None, :]
        a = np.concatenate([ids[:-1, :].ravel(), ids[:, :-1].ravel()])
        b = np.concatenate([ids[1:, :].ravel(), ids[:, 1:].ravel()])
        w = np.concatenate([wx.ravel(), wy.ravel()])
        return a, b, w


def _core_box(plates, sep: float, h: float, config: SolverConfig, box):
    if box is None:
        x0, x1, y0, y1 = plate_bbox(plates)
        m = config.core_margin * sep
        x0, x1, y0, y1 = x0 - m, x1 + m, y0 - m, y1 + m
    else:
        x0, x1, y0, y1 = box
    # align the core to multiples of h so refinements stay nested
    return (math.floor(x0 / h) * h, math.ceil(x1 / h) * h,
            math.floor(y0 / h) * h, math.ceil(y1 / h) * h)


def build_grid(spec: CondenserSpec, h: float, level: int = 0,
               config: SolverConfig = DEFAULT_CONFIG) -> Grid:
    """Grid for refinement ``level`` (spacing h / 2^level) of the coarse grid h."""
    e, f = spec.solve_plane()
    sep = separation(e, f)
    x0, x1, y0, y1 = _core_box(e + f, sep, h, config, spec.box)
    stretched = spec.far_field == "stretched"
    far = config.far_reach * max(x1 - x0, y1 - y0)
    x = _axis(x0, x1, h, far, config.far_ratio, stretched)
    y = _axis(y0, y1, h, far, config.far_ratio, stretched)
    return Grid(_refine(x, level), _refine(y, level), h / 2**level)


# ---------------------------------------------------------------------------
# discretization


@dataclass
class Discretization:
    """Discrete energy sum w (u_a - u_b)^2 + sum w (u_c - v_c)^2.

    ``pairs`` are grid edges between nodes; ``anchors`` tie a node to a plate
    of potential v through a shortened edge.  ``fixed`` holds the potential
    of plate nodes and NaN elsewhere.
    """

    n: int
    fixed: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray
    pair_w: np.ndarray
    anchor_node: np.ndarray
    anchor_value: np.ndarray
    anchor_w: np.ndarray
    plate_nodes: tuple[int, int]

    def energy(self, u: np.ndarray) -> float:
        return float(np.sum(self.pair_w * (u[self.pair_a] - u[self.pair_b]) ** 2)
                     + np.sum(self.anchor_w * (u[self.anchor_node] - self.anchor_value) ** 2))


def _near_mask(plate, pts: np.ndarray, radius: float, pad: float) -> np.ndarray:
    x0, x1, y0, y1 = plate_bbox(plate)
    near = ((pts.real >= x0 - pad) & (pts.real <= x1 + pad)
            & (pts.imag >= y0 - pad) & (pts.imag <= y1 + pad))
    mask = np.zeros(pts.shape, dtype=bool)
    idx = np.flatnonzero(near)
    # a hair of slack keeps nodes exactly at the threshold on the plate side
    mask[idx] = plate_distance(plate, pts[idx]) <= radius * (1 + 1e-12)
    return mask


def rasterize(plate, grid: Grid, pts: np.ndarray) -> np.ndarray:
    """Nodes within h/2 of the plate."""
    return _near_mask(plate, pts, 0.5 * grid.h, grid.h)


def _edge_contacts(plates, values, x0, y0, length, swap: bool):
    """First and last plate contact along each edge, with plate potentials."""
    first = np.full(x0.shape, np.inf)
    last = np.full(x0.shape, -np.inf)
    v_first = np.zeros(x0.shape)
    v_last = np.zeros(x0.shape)
    for plate, v in zip(plates, values):
        for prim in plate:
            g = prim.swapped() if swap else prim
            bx0, bx1, by0, by1 = g.bbox()
            cand = np.flatnonzero((x0 + length >= bx0) & (x0 <= bx1)
                                  & (y0 >= by0) & (y0 <= by1))
            if cand.size == 0:
                continue
            lo, hi = g.hits(x0[cand], y0[cand], length[cand])
            better = lo < first[cand]
            first[cand[better]] = lo[better]
            v_first[cand[better]] = v
            later = hi > last[cand]
            last[cand[later]] = hi[later]
            v_last[cand[later]] = v
    return first, v_first, last, v_last


def discretize(spec: CondenserSpec, grid: Grid, config: SolverConfig) -> Discretization:
    e, f = spec.solve_plane()
    pts = grid.points()
    n = pts.size
    nx, ny = grid.shape
    if config.boundary == "nodes":
        mask_e = rasterize(e, grid, pts)
        mask_f = rasterize(f, grid, pts)
    else:
        snap = config.snap * grid.h
        mask_e = _near_mask(e, pts, snap, grid.h)
        mask_f = _near_mask(f, pts, snap, grid.h)
    if np.any(mask_e & mask_f):
        raise OracleError("plates intersect after rasterization")
    fixed = np.full(n, np.nan)
    fixed[mask_f] = 0.0
    fixed[mask_e] = 1.0

    ids = np.arange(n).reshape(nx, ny)
    lx = _dual_lengths(grid.x)
    ly = _dual_lengths(grid.y)
    dx = np.diff(grid.x)
    dy = np.diff(grid.y)
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    # horizontal edges (i, j) - (i+1, j) and vertical edges (i, j) - (i, j+1)
    families = [
        (ids[:-1, :].ravel(), ids[1:, :].ravel(), (ly[None, :] / dx[:, None]).ravel(),
         X[:-1, :].ravel(), Y[:-1, :].ravel(), np.broadcast_to(dx[:, None], (nx - 1, ny)).ravel(),
         False),
        (ids[:, :-1].ravel(), ids[:, 1:].ravel(), (lx[:, None] / dy[None, :]).ravel(),
         Y[:, :-1].ravel(), X[:, :-1].ravel(), np.broadcast_to(dy[None, :], (nx, ny - 1)).ravel(),
         True),
    ]
    pa, pb, pw, an, av, aw = [], [], [], [], [], []
    anchored_e = np.zeros(n, dtype=bool)
    anchored_f = np.zeros(n, dtype=bool)
    for a, b, w, ex, ey, el, swap in families:
        if config.boundary == "nodes":
            pa.append(a)
            pb.append(b)
            pw.append(w)
            continue
        first, v_first, last, v_last = _edge_contacts((e, f), (1.0, 0.0), ex, ey, el, swap)
        cut = np.isfinite(first)
        pa.append(a[~cut])
        pb.append(b[~cut])
        pw.append(w[~cut])
        free_a = cut & np.isnan(fixed[a])
        free_b = cut & np.isnan(fixed[b])
        ta = np.maximum(first[free_a], config.snap)
        tb = np.maximum(1.0 - last[free_b], config.snap)
        an.extend([a[free_a], b[free_b]])
        av.extend([v_first[free_a], v_last[free_b]])
        aw.extend([w[free_a] / ta, w[free_b] / tb])
        anchored_e[a[free_a][v_first[free_a] == 1.0]] = True
        anchored_e[b[free_b][v_last[free_b] == 1.0]] = True
        anchored_f[a[free_a][v_first[free_a] == 0.0]] = True
        anchored_f[b[free_b][v_last[free_b] == 0.0]] = True
    cat = lambda parts, dt=float: np.concatenate(parts) if parts else np.zeros(0, dt)
    return Discretization(
        n, fixed, cat(pa, int), cat(pb, int), cat(pw),
        cat(an, int), cat(av), cat(aw),
        (int(mask_e.sum() + anchored_e.sum()), int(mask_f.sum() + anchored_f.sum())),
    )


def _check_resolution(spec: CondenserSpec, grid: Grid, disc: Discretization,
                      config: SolverConfig):
    e, f = spec.solve_plane()
    if min(disc.plate_nodes) < config.min_plate_nodes:
        raise OracleError(
            f"h = {grid.h:g} too coarse: a plate touches fewer than "
            f"{config.min_plate_nodes} nodes"
        )
    sep = separation(e, f)
    if sep < config.min_gap_cells * grid.h:
        raise OracleError(
            f"plate separation {sep:g} is below {config.min_gap_cells:g} h (h = {grid.h:g})"
        )
    x0, x1, y0, y1 = plate_bbox(e + f)
    inside = grid.x[0] < x0 and x1 < grid.x[-1] and grid.y[0] < y0 and y1 < grid.y[-1]
    if not inside:
        raise OracleError("plates extend beyond the grid box")


# ---------------------------------------------------------------------------
# solve


def _solve_spd(A, rhs: np.ndarray, config: SolverConfig):
    """Conjugate gradients preconditioned by a sparse LU factorization of A.

    Returns the solution and the relative residual after each iteration.
    The stretched far field makes the system too anisotropic for multigrid
    preconditioning to be reliable, while factoring a planar grid stays
    cheap; with an exact preconditioner CG finishes in a few steps and only
    polishes away the rounding of the factorization.
    """
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0:
        return np.zeros_like(rhs), [0.0]
    M = LinearOperator(A.shape, matvec=splu(A.tocsc()).solve, dtype=float)
    history = [1.0]

    def record(xk):
        history.append(float(np.linalg.norm(rhs - A @ xk) / bnorm))

    x, _ = cg(A, rhs, rtol=0.01 * config.residual_tol, atol=0.0, M=M,
              maxiter=config.max_iter, callback=record)
    history.append(float(np.linalg.norm(rhs - A @ x) / bnorm))
    return x, history


def solve_on_grid(spec: CondenserSpec, grid: Grid,
                  config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    disc = discretize(spec, grid, config)
    _check_resolution(spec, grid, disc, config)
    n = disc.n
    free = np.isnan(disc.fixed)
    index = np.full(n, -1)
    index[free] = np.arange(free.sum())
    m = int(free.sum())

    diag = np.zeros(m)
    rhs = np.zeros(m)
    a, b, w = disc.pair_a, disc.pair_b, disc.pair_w
    fa, fb = free[a], free[b]
    both = fa & fb
    ia, ib = index[a[both]], index[b[both]]
    np.add.at(diag, ia, w[both])
    np.add.at(diag, ib, w[both])
    # free node facing a plate node
    for this, other, sel in ((a, b, fa & ~fb), (b, a, fb & ~fa)):
        np.add.at(diag, index[this[sel]], w[sel])
        np.add.at(rhs, index[this[sel]], w[sel] * disc.fixed[other[sel]])
    np.add.at(diag, index[disc.anchor_node], disc.anchor_w)
    np.add.at(rhs, index[disc.anchor_node], disc.anchor_w * disc.anchor_value)
    off = sp.coo_matrix((-w[both], (ia, ib)), shape=(m, m))
    A = (off + off.T + sp.diags(diag)).tocsr()

    u = np.where(free, 0.0, disc.fixed)
    keep = np.ones(m, dtype=bool)
    # free regions with no path to a plate carry no energy; drop them
    ncomp, labels = connected_components(off, directed=False)
    if ncomp > 1:
        tied = diag - np.asarray(-(off + off.T).sum(axis=1)).ravel()
        anchored = np.bincount(labels, np.abs(tied) > 0, ncomp) > 0
        keep = anchored[labels]
        A = A[keep][:, keep].tocsr()
        rhs = rhs[keep]

    sol, history = _solve_spd(A, rhs, config)
    res = history[-1] if history else 0.0
    if not res <= config.residual_tol:
        raise OracleError(f"solver stagnated at relative residual {res:.3e}")
    free_ids = np.flatnonzero(free)
    u[free_ids[keep]] = sol
    u[free_ids[~keep]] = 0.0
    return SolveReport(disc.energy(u), grid.h, len(history) - 2, res,
                       nodes=int(n), residual_history=tuple(history))


def default_spacing(spec: CondenserSpec, config: SolverConfig = DEFAULT_CONFIG) -> float:
    e, f = spec.solve_plane()
    return separation(e, f) / config.cells_per_gap


def solve_capacity(spec: CondenserSpec, h: float | None = None,
                   config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Single-grid capacity estimate at spacing h."""
    if h is None:
        h = default_spacing(spec, config)
    return solve_on_grid(spec, build_grid(spec, h, 0, config), config)


def estimate_capacity(spec: CondenserSpec, h: float | None = None,
                      config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Solve on nested grids h, h/2, h/4 and Richardson-extrapolate.

    Returns the finest report with ``extrapolated``, ``order`` and
    ``sequence`` filled in.  With ``config.levels`` other than 3 no
    extrapolation is attempted.
    """
    if h is None:
        h = default_spacing(spec, config)
    reports = [solve_on_grid(spec, build_grid(spec, h, k, config), config)
               for k in range(config.levels)]
    seq = tuple(r.capacity for r in reports)
    fine = reports[-1]
    if len(reports) != 3:
        return SolveReport(fine.capacity, fine.h, fine.iterations, fine.residual,
                           fine.nodes, sequence=seq, residual_history=fine.residual_history)
    rich = richardson_extrapolate(*seq)
    if rich.refused:
        warnings.warn("grid sequence is not monotone; Richardson extrapolation refused",
                      RuntimeWarning, stacklevel=2)
    return SolveReport(fine.capacity, fine.h, fine.iterations, fine.residual, fine.nodes,
                       extrapolated=None if rich.refused else rich.value,
                       order=rich.order, extrapolation_refused=rich.refused,
                       sequence=seq, residual_history=fine.residual_history)
