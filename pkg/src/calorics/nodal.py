"""Nodal domain counting for parabolically homogeneous polynomials.

Counting reduces to a compact cross-section: every parabolic ray
{(lambda x, lambda^2 t) : lambda > 0} through a nonzero point crosses the
cube boundary of [-1, 1]^{n+1} exactly once (max(lambda |x_i|, lambda^2 |t|)
is strictly increasing in lambda), and sign(p) is constant along rays, so
nodal domains of p biject with sign components on the cube surface.  Unlike
the unit sphere, the cube has cell centers with exact rational coordinates,
so every sampled sign is exact and only the connectivity (grid resolution)
is heuristic.  Counts are therefore reported as HEURISTIC-STABILIZED: a
count is `stable` when the last three resolutions of a schedule agree on the
(positive, negative) split, never certified.

Sign evaluation clears denominators and works on integers.  A vectorized
float pass computes each cell value together with a rigorous rounding-error
bound; cells whose |value| falls under the bound (in particular all exact
zeros) are re-evaluated with exact integer arithmetic, so no sign is ever
trusted to floating point.  Exact zeros are excluded from every component;
if more than 0.1% of cells are zero the grid is jittered by 1/(6r) and
resampled once.

Adjacency is conservative: two same-sign cells sharing a facet merge only
when the exact signs at the seven interior eighth-points of the segment
joining their centers agree as well (for cross-face stitching, along the
bent path through the shared cube edge).  Plain same-sign adjacency would
weld distinct nodal domains across the thin wedges where nodal sheets cross
-- e.g. the two positive domains of (2t + x^2)(2t + y^2) -- and no amount of
refinement repairs that; the probes detect any wedge wider than an eighth
of a cell, while the under-merging they can introduce is exactly what the
multi-resolution stability gate corrects.  Tangencies of higher order stay
below any fixed probe density, so counts remain estimates guarded by the
proven bounds, never certificates.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _graph_components

from .polyring import Polynomial, parabolic_degree

DEFAULT_SCHEDULES: Dict[int, Tuple[int, ...]] = {
    2: (128, 256, 512),
    3: (64, 128, 256),
    4: (24, 48, 96),
}
MAX_COUNT_DEGREE = 64
_JITTER_ZERO_FRACTION = 1e-3
_FLOAT_EPS = float(np.finfo(np.float64).eps)


class NodalError(Exception):
    """Base class for counting-layer errors."""


class BoundViolation(NodalError):
    """A counted value escaped a proven bound; signals a counting bug."""


class UnresolvedSign(NodalError):
    """A guarded float evaluation could not be refined to a definite sign."""


# ---------------------------------------------------------------------------
# Exact sign evaluation on integer-numerator meshes
# ---------------------------------------------------------------------------


def _integer_scaled_terms(p: Polynomial, denominator: int):
    """Rewrite p(m/denominator) as an integer form sum C_T * prod m^e.

    Returns (exponent tuples, exact int coefficients, float coefficients);
    exponents are ordered (x_1, ..., x_n, t).  The rewrite multiplies by the
    positive constant lcm(denominators) * denominator^degree, so signs match.
    """
    degree = p.algebraic_degree()
    lcm = 1
    for coeff in p.terms.values():
        lcm = lcm * coeff.denominator // math.gcd(lcm, coeff.denominator)
    exps: List[Tuple[int, ...]] = []
    ints: List[int] = []
    for ev, coeff in p.terms.items():
        e = ev.space_exps + (ev.t_exp,)
        scaled = coeff.numerator * (lcm // coeff.denominator) * denominator ** (degree - sum(e))
        exps.append(e)
        ints.append(scaled)
    floats = [float(c) for c in ints]
    return exps, ints, floats


AxisValues = Union[int, np.ndarray]


def _sign_mesh(p: Polynomial, axis_values: Sequence[AxisValues], denominator: int) -> np.ndarray:
    """Exact signs of p on the mesh spanned by the varying axes.

    axis_values has one entry per coordinate (x_1..x_n, t): either a scalar
    integer numerator or a 1-D integer array of numerators; every coordinate
    equals numerator / denominator.  The result is an int8 array shaped by
    the varying axes in coordinate order, with values in {-1, 0, +1}.
    """
    ambient = p.spatial_dim + 1
    if len(axis_values) != ambient:
        raise ValueError(f"need {ambient} axis value specs, got {len(axis_values)}")
    varying = [i for i, v in enumerate(axis_values) if isinstance(v, np.ndarray)]
    shape = tuple(len(axis_values[i]) for i in varying)
    if p.is_zero:
        return np.zeros(shape, dtype=np.int8)

    exps, ints, floats = _integer_scaled_terms(p, denominator)
    pow_cache: Dict[Tuple[int, int], np.ndarray] = {}

    def axis_pow(axis: int, e: int) -> np.ndarray:
        key = (axis, e)
        if key not in pow_cache:
            base = axis_values[axis].astype(np.float64)
            arr = base ** e
            slot = varying.index(axis)
            view_shape = [1] * len(varying)
            view_shape[slot] = len(base)
            pow_cache[key] = arr.reshape(view_shape)
        return pow_cache[key]

    vals = np.zeros(shape, dtype=np.float64)
    mags = np.zeros(shape, dtype=np.float64)
    for e, fc in zip(exps, floats):
        contrib = np.float64(fc)
        for axis in range(ambient):
            exp = e[axis]
            if exp == 0:
                continue
            v = axis_values[axis]
            if isinstance(v, np.ndarray):
                contrib = contrib * axis_pow(axis, exp)
            else:
                contrib = contrib * float(v) ** exp
        vals = vals + contrib
        mags = mags + np.abs(contrib)

    # conservative forward-error certificate for the float accumulation
    kappa = 8.0 * (p.algebraic_degree() + len(exps) + ambient + 4)
    bound = kappa * _FLOAT_EPS * mags
    signs = np.sign(vals).astype(np.int8)
    uncertain = np.abs(vals) <= bound
    if uncertain.any():
        for multi in np.argwhere(uncertain):
            coords = []
            for axis in range(ambient):
                v = axis_values[axis]
                if isinstance(v, np.ndarray):
                    coords.append(int(v[multi[varying.index(axis)]]))
                else:
                    coords.append(int(v))
            total = 0
            for e, c in zip(exps, ints):
                term = c
                for m, exp in zip(coords, e):
                    if exp:
                        term *= m ** exp
                total += term
            signs[tuple(multi)] = np.int8((total > 0) - (total < 0))
    return signs


# ---------------------------------------------------------------------------
# Cube cross-section sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossSectionGrid:
    """Cell-center layout on the boundary surface of [-1, 1]^ambient.

    Face f = 2*axis + (1 if the positive side) is the facet {v_axis = +-1};
    its cells are indexed by the remaining coordinates in ascending axis
    order, with exact centers numerators[i] / denominator.
    """

    ambient: int
    resolution: int
    jittered: bool

    @property
    def denominator(self) -> int:
        return 6 * self.resolution if self.jittered else self.resolution

    @property
    def numerators(self) -> np.ndarray:
        base = 2 * np.arange(self.resolution, dtype=np.int64) + 1 - self.resolution
        if self.jittered:
            return 6 * base + 1
        return base

    @property
    def face_count(self) -> int:
        return 2 * self.ambient

    def face_axis_sign(self, face: int) -> Tuple[int, int]:
        return face // 2, (1 if face % 2 else -1)


@dataclass(frozen=True)
class SignField:
    """Exact signs of one polynomial at every cell center of a cube grid."""

    grid: CrossSectionGrid
    face_signs: Tuple[np.ndarray, ...]
    zero_cells: int
    polynomial: Polynomial

    @property
    def zero_cell_fraction(self) -> float:
        total = self.grid.face_count * self.grid.resolution ** (self.grid.ambient - 1)
        return self.zero_cells / total


@dataclass(frozen=True)
class ComponentReport:
    """Nodal-domain count with its positive/negative split and stability flag."""

    total: int
    positive: int
    negative: int
    resolutions_used: Tuple[int, ...]
    stable: bool
    zero_cell_fraction: float
    method: str = "cube-exact"

    def to_json_dict(self) -> dict:
        return {
            "total": self.total,
            "pos": self.positive,
            "neg": self.negative,
            "resolutions": list(self.resolutions_used),
            "stable": self.stable,
            "zero_frac": self.zero_cell_fraction,
            "method": self.method,
        }


def _worker_count() -> int:
    raw = os.environ.get("CALORICS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _sample_faces(p: Polynomial, grid: CrossSectionGrid) -> Tuple[np.ndarray, ...]:
    ambient = grid.ambient
    nums = grid.numerators
    den = grid.denominator

    def one_face(face: int) -> np.ndarray:
        axis, sign = grid.face_axis_sign(face)
        axis_values: List[AxisValues] = [nums] * ambient
        axis_values[axis] = sign * den
        return _sign_mesh(p, axis_values, den)

    faces = range(grid.face_count)
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return tuple(pool.map(one_face, faces))
    return tuple(one_face(face) for face in faces)


def cube_section_sample(p: Polynomial, resolution: int) -> SignField:
    """Exact signs of p at all cell centers on the cube cross-section.

    Requires a parabolically homogeneous p of degree >= 1 in ambient
    dimension 2..4.  If sampled zeros exceed 0.1% of cells the grid is
    jittered once by the fixed rational offset 1/(6*resolution).
    """
    degree = parabolic_degree(p)  # raises NotHomogeneous / ZeroPolynomialError
    if degree < 1:
        raise NodalError("constant polynomials have no cross-section sign structure")
    if degree > MAX_COUNT_DEGREE:
        raise NodalError(f"degree {degree} exceeds the counting cap {MAX_COUNT_DEGREE}")
    ambient = p.spatial_dim + 1
    if not 2 <= ambient <= 4:
        raise NodalError(f"counting supports ambient dimension 2..4, got {ambient}")
    if resolution < 2:
        raise NodalError("resolution must be >= 2")

    grid = CrossSectionGrid(ambient, resolution, jittered=False)
    signs = _sample_faces(p, grid)
    zeros = int(sum(int((face == 0).sum()) for face in signs))
    field = SignField(grid, signs, zeros, p)
    if field.zero_cell_fraction > _JITTER_ZERO_FRACTION:
        grid = CrossSectionGrid(ambient, resolution, jittered=True)
        signs = _sample_faces(p, grid)
        zeros = int(sum(int((face == 0).sum()) for face in signs))
        field = SignField(grid, signs, zeros, p)
    return field


# ---------------------------------------------------------------------------
# Component labeling with probed adjacency
# ---------------------------------------------------------------------------


class _DisjointSet:
    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def add(self, x: int) -> None:
        self.parent.setdefault(x, x)

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _take(arr: np.ndarray, index: int, axis: int) -> np.ndarray:
    return np.take(arr, index, axis=axis)


_PROBE_STEPS = (1, 2, 3, 4, 5, 6, 7)  # eighth-points of the segment between centers


def _face_probe_signs(
    p: Polynomial, grid: CrossSectionGrid, face: int, slot_axis: int, eighth: int
) -> np.ndarray:
    """Signs at one eighth-point between adjacent centers along one face axis.

    eighth in 1..7 selects the interior probe position; the returned array
    matches the face shape with the probed axis shortened by one.
    """
    axis, sign = grid.face_axis_sign(face)
    ambient = grid.ambient
    den8 = 8 * grid.denominator
    nums8 = 8 * grid.numerators
    spacing = int(nums8[1] - nums8[0]) if len(nums8) > 1 else 16
    probe = nums8[:-1] + eighth * spacing // 8
    axis_values: List[AxisValues] = [nums8] * ambient
    axis_values[axis] = sign * den8
    axis_values[slot_axis] = probe
    return _sign_mesh(p, axis_values, den8)


def _mesh_axes(grid: CrossSectionGrid, face: int) -> List[int]:
    axis, _ = grid.face_axis_sign(face)
    return [ax for ax in range(grid.ambient) if ax != axis]


def _label_one_face(field: SignField, face: int):
    """Connected labels of nonzero cells on one face with probed edges.

    Returns (labels array over all cells, set-of-label -> sign mapping keyed
    locally from 0..count-1); zero cells keep label -1.
    """
    grid = field.grid
    signs = field.face_signs[face]
    shape = signs.shape
    size = signs.size
    idx = np.arange(size, dtype=np.int64).reshape(shape)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    mesh_axes = _mesh_axes(grid, face)
    for slot, ambient_axis in enumerate(mesh_axes):
        lo = [slice(None)] * len(shape)
        hi = [slice(None)] * len(shape)
        lo[slot] = slice(None, -1)
        hi[slot] = slice(1, None)
        s_lo, s_hi = signs[tuple(lo)], signs[tuple(hi)]
        mask = (s_lo == s_hi) & (s_lo != 0)
        if mask.any():
            for eighth in _PROBE_STEPS:
                probe = _face_probe_signs(field.polynomial, grid, face, ambient_axis, eighth)
                mask = mask & (probe == s_lo)
                if not mask.any():
                    break
        if mask.any():
            rows.append(idx[tuple(lo)][mask].ravel())
            cols.append(idx[tuple(hi)][mask].ravel())
    if rows:
        row = np.concatenate(rows)
        col = np.concatenate(cols)
        graph = coo_matrix(
            (np.ones(len(row), dtype=np.int8), (row, col)), shape=(size, size)
        )
        _, labels = _graph_components(graph, directed=False)
    else:
        labels = np.arange(size, dtype=np.int64)
    labels = labels.reshape(shape)
    return np.where(signs != 0, labels, -1)


def _label_faces(field: SignField):
    """Per-face probed labeling with globally unique ids and their signs."""
    global_labels: List[np.ndarray] = []
    label_sign: Dict[int, int] = {}
    offset = 0
    for face in range(field.grid.face_count):
        local = _label_one_face(field, face)
        signs = field.face_signs[face]
        nonzero = signs != 0
        out = np.full(local.shape, -1, dtype=np.int64)
        if nonzero.any():
            used = np.unique(local[nonzero])
            remap = {int(u): offset + i for i, u in enumerate(used)}
            lookup = np.full(int(local.max()) + 2, -1, dtype=np.int64)
            for u, g in remap.items():
                lookup[u] = g
            out[nonzero] = lookup[local[nonzero]]
            for u, g in remap.items():
                member = np.argwhere(local == u)[0]
                label_sign[g] = int(signs[tuple(member)])
            offset += len(used)
        global_labels.append(out)
    return global_labels, label_sign


_STITCH_STEPS = tuple(range(7))  # three probes per leg plus the cube-edge point


def _stitch_probe_signs(
    p: Polynomial,
    grid: CrossSectionGrid,
    axis_a: int,
    sign_a: int,
    axis_b: int,
    sign_b: int,
    which: int,
) -> np.ndarray:
    """Signs along the bent path between edge-adjacent cells of two faces.

    The path runs from the face-(axis_a, sign_a) cell center to the shared
    cube edge and on to the face-(axis_b, sign_b) center; which = 0..2 are
    the quarter-points of the first leg, 3 the cube-edge point, and 4..6 the
    quarter-points of the second leg.  Mesh runs over the common axes.
    """
    den8 = 8 * grid.denominator
    nums8 = 8 * grid.numerators
    edge_a = sign_a * den8
    edge_b = sign_b * den8
    last_b = int(nums8[-1]) if sign_b > 0 else int(nums8[0])
    last_a = int(nums8[-1]) if sign_a > 0 else int(nums8[0])
    axis_values: List[AxisValues] = [nums8] * grid.ambient
    if which < 3:
        j = which + 1  # leg on face (axis_a, sign_a): advance toward the edge
        axis_values[axis_a] = edge_a
        axis_values[axis_b] = ((4 - j) * last_b + j * edge_b) // 4
    elif which == 3:
        axis_values[axis_a] = edge_a
        axis_values[axis_b] = edge_b
    else:
        j = which - 3  # leg on face (axis_b, sign_b): retreat from the edge
        axis_values[axis_b] = edge_b
        axis_values[axis_a] = ((4 - j) * edge_a + j * last_a) // 4
    return _sign_mesh(p, axis_values, den8)


def _edge_stitches(field: SignField, labels: List[np.ndarray]):
    """Yield label pairs to merge across each shared cube edge of two faces."""
    grid = field.grid
    res = grid.resolution
    for fa in range(grid.face_count):
        a, sa = grid.face_axis_sign(fa)
        axes_a = _mesh_axes(grid, fa)
        for fb in range(fa + 1, grid.face_count):
            b, sb = grid.face_axis_sign(fb)
            if b == a:
                continue
            axes_b = _mesh_axes(grid, fb)
            slot_b_in_a = axes_a.index(b)
            slot_a_in_b = axes_b.index(a)
            idx_b = res - 1 if sb > 0 else 0
            idx_a = res - 1 if sa > 0 else 0
            sign_a = _take(field.face_signs[fa], idx_b, slot_b_in_a)
            sign_b = _take(field.face_signs[fb], idx_a, slot_a_in_b)
            mask = (sign_a == sign_b) & (sign_a != 0)
            if not np.any(mask):
                continue
            for which in _STITCH_STEPS:
                probe = _stitch_probe_signs(field.polynomial, grid, a, sa, b, sb, which)
                mask = mask & (probe == sign_a)
                if not np.any(mask):
                    break
            if not np.any(mask):
                continue
            lab_a = _take(labels[fa], idx_b, slot_b_in_a)
            lab_b = _take(labels[fb], idx_a, slot_a_in_b)
            pairs = np.stack(
                [np.atleast_1d(lab_a[mask]), np.atleast_1d(lab_b[mask])], axis=1
            )
            for pa, pb in np.unique(pairs, axis=0):
                yield int(pa), int(pb)


def count_components(field: SignField) -> ComponentReport:
    """Union-find count of same-sign components on a sampled cross-section.

    Single-resolution result: the stability flag is left False because
    stabilization is only meaningful across a schedule (see nodal_count).
    """
    labels, label_sign = _label_faces(field)
    dsu = _DisjointSet()
    for label in label_sign:
        dsu.add(label)
    for pa, pb in _edge_stitches(field, labels):
        dsu.union(pa, pb)
    roots_by_sign = {1: set(), -1: set()}
    for label, sign_value in label_sign.items():
        roots_by_sign[sign_value].add(dsu.find(label))
    positive, negative = len(roots_by_sign[1]), len(roots_by_sign[-1])
    return ComponentReport(
        total=positive + negative,
        positive=positive,
        negative=negative,
        resolutions_used=(field.grid.resolution,),
        stable=False,
        zero_cell_fraction=field.zero_cell_fraction,
    )


def nodal_count(p: Polynomial, schedule: Optional[Sequence[int]] = None) -> ComponentReport:
    """Multi-resolution nodal-domain count on the cube cross-section.

    Runs count_components at each resolution of the schedule (default per
    ambient dimension); the reported counts come from the finest level and
    `stable` records whether the last three levels agree on the
    (positive, negative) split.  Instability is reported, never raised.
    """
    ambient = p.spatial_dim + 1
    if schedule is None:
        if ambient not in DEFAULT_SCHEDULES:
            raise NodalError(f"no default schedule for ambient dimension {ambient}")
        schedule = DEFAULT_SCHEDULES[ambient]
    schedule = [int(r) for r in schedule]
    if len(schedule) < 3:
        raise NodalError("schedule needs at least three resolutions")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise NodalError("schedule must be strictly increasing")
    reports = [count_components(cube_section_sample(p, res)) for res in schedule]
    tail = [(r.positive, r.negative) for r in reports[-3:]]
    last = reports[-1]
    return ComponentReport(
        total=last.total,
        positive=last.positive,
        negative=last.negative,
        resolutions_used=tuple(schedule),
        stable=len(set(tail)) == 1,
        zero_cell_fraction=last.zero_cell_fraction,
    )


# ---------------------------------------------------------------------------
# Negative-time slice diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SliceReport:
    """Components of {x in [-R, R]^n : p(x, -1) != 0} with a trust flag.

    caveat = True means the count may misrepresent the plane: either distinct
    same-sign components touch the box boundary (they could merge outside) or,
    for n = 1, the exact root isolation shows roots beyond the box.  The
    nodal-count comparison N <= slice total is only meaningful when clear.
    """

    total: int
    positive: int
    negative: int
    caveat: bool
    half_width: Fraction
    resolution: int


def _univariate_coeffs(v: Polynomial) -> List[Fraction]:
    degree = max((ev.space_exps[0] for ev in v.terms), default=0)
    coeffs = [Fraction(0)] * (degree + 1)
    for ev, c in v.terms.items():
        coeffs[ev.space_exps[0]] = c
    return coeffs


def _poly_trim(c: List[Fraction]) -> List[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_derivative(c: Sequence[Fraction]) -> List[Fraction]:
    return _poly_trim([c[i] * i for i in range(1, len(c))])


def _poly_rem(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] -= factor * bc
        a = _poly_trim(a)
        if not a:
            break
    return a


def _poly_gcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a, b = b, _poly_rem(a, b)
    return a


def _squarefree(coeffs: List[Fraction]) -> List[Fraction]:
    gcd = _poly_gcd(list(coeffs), _poly_derivative(coeffs))
    if len(gcd) <= 1:
        return list(coeffs)
    quotient: List[Fraction] = []
    rem = list(coeffs)
    while len(rem) >= len(gcd) and rem:
        factor = rem[-1] / gcd[-1]
        quotient.insert(0, factor)
        deg = len(rem) - len(gcd)
        for i, gc in enumerate(gcd):
            rem[deg + i] -= factor * gc
        rem = _poly_trim(rem)
    return _poly_trim(quotient)


def _sturm_chain(coeffs: List[Fraction]) -> List[List[Fraction]]:
    coeffs = _squarefree(coeffs)  # chain stays valid for multiple roots
    chain = [list(coeffs), _poly_derivative(coeffs)]
    while chain[-1]:
        nxt = [-c for c in _poly_rem(chain[-2], chain[-1])]
        if not nxt:
            break
        chain.append(nxt)
    return [c for c in chain if c]


def _poly_eval(c: Sequence[Fraction], x: Fraction) -> Fraction:
    total = Fraction(0)
    for coeff in reversed(c):
        total = total * x + coeff
    return total


def _variations(signs: List[int]) -> int:
    cleaned = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(cleaned, cleaned[1:]) if a * b < 0)


def _sturm_count(coeffs: List[Fraction], a: Optional[Fraction], b: Optional[Fraction]) -> int:
    """Distinct real roots in (a, b]; None endpoints mean -/+ infinity."""
    if len(_poly_trim(list(coeffs))) <= 1:
        return 0
    chain = _sturm_chain(coeffs)

    def signs_at(x: Optional[Fraction], positive_end: bool) -> List[int]:
        out = []
        for c in chain:
            if x is None:
                lead = c[-1]
                degree = len(c) - 1
                value = lead if positive_end or degree % 2 == 0 else -lead
            else:
                value = _poly_eval(c, x)
            out.append(1 if value > 0 else (-1 if value < 0 else 0))
        return out

    va = _variations(signs_at(a, positive_end=a is not None))
    vb = _variations(signs_at(b, positive_end=True))
    return va - vb


def _label_box_mesh(p: Polynomial, signs: np.ndarray, nums: np.ndarray, den: int) -> Tuple[np.ndarray, int]:
    """Probed connected labeling of a full n-dimensional box mesh.

    Same adjacency rule as the cross-section: same sign plus three agreeing
    quarter-point probes.  Returns (labels with -1 on zero cells, count).
    """
    n = signs.ndim
    shape = signs.shape
    size = signs.size
    idx = np.arange(size, dtype=np.int64).reshape(shape)
    nums8 = 8 * nums
    spacing = int(nums8[1] - nums8[0]) if len(nums8) > 1 else 16
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    for slot in range(n):
        lo = [slice(None)] * n
        hi = [slice(None)] * n
        lo[slot] = slice(None, -1)
        hi[slot] = slice(1, None)
        s_lo, s_hi = signs[tuple(lo)], signs[tuple(hi)]
        mask = (s_lo == s_hi) & (s_lo != 0)
        if mask.any():
            for eighth in _PROBE_STEPS:
                axis_values: List[AxisValues] = [nums8] * n + [0]
                axis_values[slot] = nums8[:-1] + eighth * spacing // 8
                probe = _sign_mesh(p, axis_values, 8 * den)
                mask = mask & (probe == s_lo)
                if not mask.any():
                    break
        if mask.any():
            rows.append(idx[tuple(lo)][mask].ravel())
            cols.append(idx[tuple(hi)][mask].ravel())
    if rows:
        row = np.concatenate(rows)
        col = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(row), dtype=np.int8), (row, col)), shape=(size, size))
        _, labels = _graph_components(graph, directed=False)
    else:
        labels = np.arange(size, dtype=np.int64)
    labels = labels.reshape(shape)
    labels = np.where(signs != 0, labels, -1)
    used = np.unique(labels[labels >= 0])
    return labels, len(used)


def slice_count(
    p: Polynomial,
    box_half_width: Optional[Union[Fraction, int, str]] = None,
    resolution: int = 512,
) -> SliceReport:
    """Count components of the t = -1 slice inside the box [-R, R]^n.

    The default R is the exact Cauchy root bound for n = 1, which certifies
    that no slice structure lies outside the box (the caveat flag is then
    settled by exact Sturm root counting), and 4 otherwise.  Labeling uses
    the same exact-sign probed adjacency as the cross-section counter.
    """
    n = p.spatial_dim
    v = p.substitute_t(-1)
    if box_half_width is None:
        if n == 1 and not v.is_zero:
            coeffs = _univariate_coeffs(v)
            lead = coeffs[-1]
            box_half_width = Fraction(1) + max(
                (abs(c / lead) for c in coeffs[:-1]), default=Fraction(0)
            )
        else:
            box_half_width = Fraction(4)
    radius = Fraction(box_half_width)
    if radius <= 0:
        raise NodalError("box half-width must be positive")
    if resolution < 2:
        raise NodalError("resolution must be >= 2")

    nums = radius.numerator * (2 * np.arange(resolution, dtype=np.int64) + 1 - resolution)
    den = radius.denominator * resolution
    axis_values: List[AxisValues] = [nums] * n + [0]
    signs = _sign_mesh(v, axis_values, den)

    if v.is_zero or not (signs != 0).any():
        return SliceReport(0, 0, 0, True, radius, resolution)

    labels, _ = _label_box_mesh(v, signs, nums, den)
    totals = {1: 0, -1: 0}
    boundary_touching = {1: 0, -1: 0}
    for sign_value in (1, -1):
        mask = signs == sign_value
        if not mask.any():
            continue
        values = np.unique(labels[mask])
        totals[sign_value] = len(values)
        if n >= 2:
            edge_labels = set()
            for axis in range(n):
                for idx in (0, resolution - 1):
                    face_labels = np.take(labels, idx, axis=axis)
                    face_signs = np.take(signs, idx, axis=axis)
                    edge_labels.update(
                        int(u) for u in np.unique(face_labels[face_signs == sign_value])
                    )
            boundary_touching[sign_value] = len(edge_labels)

    if n == 1:
        coeffs = _univariate_coeffs(v)
        inside = _sturm_count(coeffs, -radius, radius)
        everywhere = _sturm_count(coeffs, None, None)
        caveat = inside != everywhere
    else:
        caveat = any(boundary_touching[s] >= 2 for s in (1, -1))

    positive, negative = totals[1], totals[-1]
    return SliceReport(positive + negative, positive, negative, caveat, radius, resolution)


# ---------------------------------------------------------------------------
# Polar chamber diagnostic (n = 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarChamberReport:
    """Sign-change data on a small circle around a pole of the unit sphere."""

    pole: str
    radius: float
    sign_changes: int
    n_plus: int


def polar_chambers(
    p: Polynomial,
    pole: str = "north",
    rho: float = 0.1,
    samples: Optional[int] = None,
) -> PolarChamberReport:
    """Evaluate p on the circle x^2 + y^2 = rho^2, t = +-sqrt(1 - rho^2).

    Values inside the guard band |p| < 1e-12 are refined by shifting the
    sample angle in up to 40 halving steps; a sign that never resolves raises
    UnresolvedSign rather than guessing.  sign_changes counts cyclic sign
    alternations and n_plus the maximal positive arcs.
    """
    if p.spatial_dim != 2:
        raise NodalError("polar chambers are defined for n = 2")
    if not 0.0 < rho < 1.0:
        raise NodalError("rho must lie strictly between 0 and 1")
    if pole not in ("north", "south"):
        raise NodalError("pole must be 'north' or 'south'")
    degree = max((ev.algebraic_degree for ev in p.terms), default=1)
    if samples is None:
        samples = max(8 * degree, 64)
    if samples < 8 * degree:
        raise NodalError(f"need at least {8 * degree} samples for degree {degree}")

    guard = 1e-12
    tval = math.sqrt(1.0 - rho * rho) * (1.0 if pole == "north" else -1.0)
    step = 2.0 * math.pi / samples

    def value_at(theta: float) -> float:
        return p.evaluate_float((rho * math.cos(theta), rho * math.sin(theta), tval))

    signs: List[int] = []
    for j in range(samples):
        theta = j * step
        value = value_at(theta)
        shift = step / 2.0
        refinements = 0
        while abs(value) < guard and refinements < 40:
            theta += shift
            shift /= 2.0
            value = value_at(theta)
            refinements += 1
        if abs(value) < guard:
            raise UnresolvedSign(
                f"sample {j} at the {pole} pole stayed within the guard band after 40 refinements"
            )
        signs.append(1 if value > 0 else -1)

    changes = sum(1 for a, b in zip(signs, signs[1:] + signs[:1]) if a != b)
    if changes == 0:
        n_plus = 1 if signs[0] > 0 else 0
    else:
        n_plus = sum(1 for j in range(samples) if signs[j] > 0 and signs[j - 1] < 0)
    return PolarChamberReport(pole=pole, radius=rho, sign_changes=changes, n_plus=n_plus)


# ---------------------------------------------------------------------------
# Point-cloud export and clustering (n = 2)
# ---------------------------------------------------------------------------


def _float_mesh_eval(p: Polynomial, xs: np.ndarray, ys: np.ndarray, ts: np.ndarray) -> np.ndarray:
    out = np.zeros(xs.shape, dtype=np.float64)
    for ev, coeff in p.terms.items():
        term = float(coeff) * np.ones_like(out)
        ex, ey = ev.space_exps
        if ex:
            term = term * xs ** ex
        if ey:
            term = term * ys ** ey
        if ev.t_exp:
            term = term * ts ** ev.t_exp
        out += term
    return out


def export_nodal_pointcloud(
    p: Polynomial,
    resolution: int = 256,
    annulus_delta: float = 0.1,
    path: Optional[str] = None,
    shells: int = 8,
) -> List[Tuple[float, float, float]]:
    """Sample the nodal set of p inside the spherical shell B_1 \\ B_{1-delta}.

    On each of `shells` concentric sphere radii a longitude/latitude grid is
    evaluated; midpoints of sign changes between neighboring samples are
    emitted as (x, y, t) rows, suitable for external plotting.  When `path`
    is given the rows are also written as CSV with 17 significant digits.
    """
    if p.spatial_dim != 2:
        raise NodalError("point-cloud export is defined for n = 2")
    if not 0.0 < annulus_delta < 1.0:
        raise NodalError("annulus delta must lie strictly between 0 and 1")
    thetas = (np.arange(2 * resolution) + 0.5) * (2.0 * np.pi / (2 * resolution))
    phis = -np.pi / 2 + (np.arange(resolution) + 0.5) * (np.pi / resolution)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    ux = np.cos(tg) * np.cos(pg)
    uy = np.sin(tg) * np.cos(pg)
    ut = np.sin(pg)

    points: List[Tuple[float, float, float]] = []
    for radius in np.linspace(1.0 - annulus_delta, 1.0, shells):
        values = _float_mesh_eval(p, radius * ux, radius * uy, radius * ut)
        signs = np.sign(values)

        def emit(mask: np.ndarray, sx: np.ndarray, sy: np.ndarray, st: np.ndarray) -> None:
            mx, my, mt = sx[mask], sy[mask], st[mask]
            norm = np.sqrt(mx * mx + my * my + mt * mt)
            norm[norm == 0] = 1.0
            for px, py, pt in zip(mx / norm * radius, my / norm * radius, mt / norm * radius):
                points.append((float(px), float(py), float(pt)))

        flip_theta = (signs * np.roll(signs, -1, axis=0)) < 0
        emit(
            flip_theta,
            (ux + np.roll(ux, -1, axis=0)) / 2,
            (uy + np.roll(uy, -1, axis=0)) / 2,
            (ut + np.roll(ut, -1, axis=0)) / 2,
        )
        flip_phi = (signs[:, :-1] * signs[:, 1:]) < 0
        emit(
            flip_phi,
            (ux[:, :-1] + ux[:, 1:]) / 2,
            (uy[:, :-1] + uy[:, 1:]) / 2,
            (ut[:, :-1] + ut[:, 1:]) / 2,
        )

    if path is not None:
        with open(path, "w", encoding="ascii") as handle:
            handle.write("x,y,t\n")
            for px, py, pt in points:
                handle.write(f"{px:.17g},{py:.17g},{pt:.17g}\n")
    return points


def cluster_count(points: Sequence[Tuple[float, float, float]], gap: float) -> int:
    """Number of single-linkage clusters when edges join points closer than gap."""
    if not points:
        return 0
    arr = np.asarray(points, dtype=np.float64)
    cells: Dict[Tuple[int, int, int], List[int]] = {}
    for index, row in enumerate(arr):
        key = tuple(int(math.floor(c / gap)) for c in row)
        cells.setdefault(key, []).append(index)
    dsu = _DisjointSet()
    for index in range(len(arr)):
        dsu.add(index)
    gap2 = gap * gap
    for (cx, cy, cz), members in cells.items():
        neighborhood: List[int] = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    neighborhood.extend(cells.get((cx + dx, cy + dy, cz + dz), ()))
        for i in members:
            for j in neighborhood:
                if j <= i:
                    continue
                diff = arr[i] - arr[j]
                if float(diff @ diff) < gap2:
                    dsu.union(i, j)
    return len({dsu.find(i) for i in range(len(arr))})


# ---------------------------------------------------------------------------
# Proven bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundsReport:
    """Known nodal-count bounds for time-dependent degree-d solutions in n+1 dims."""

    n: int
    d: int
    min_count: int
    product_lower_bound: int
    courant_upper_bound: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "min_domains": self.min_count,
            "max_lower_bound": self.product_lower_bound,
            "max_upper_bound": self.courant_upper_bound,
        }


def min_nodal_domains(n: int, d: int) -> int:
    """Minimum nodal-domain count over time-dependent degree-d solutions."""
    if n == 1:
        return 2 * ((d + 1) // 2)
    if n == 2:
        return 3 if d % 4 == 0 else 2
    return 2


def bounds_report(n: int, d: int, counted: Optional[Union[int, ComponentReport]] = None) -> BoundsReport:
    """Bounds m_{n,d} <= N <= C(n+d, n), enforced when a count is supplied.

    The lower bound floor(d/n)^n applies to the maximal count and is reported
    for product-family comparisons.  A supplied count outside
    [min, binomial] raises BoundViolation: that signals a counting bug, not
    an interesting polynomial.
    """
    if n < 1 or d < 2:
        raise NodalError("bounds need n >= 1 and d >= 2")
    report = BoundsReport(
        n=n,
        d=d,
        min_count=min_nodal_domains(n, d),
        product_lower_bound=(d // n) ** n,
        courant_upper_bound=math.comb(n + d, n),
    )
    if counted is not None:
        value = counted.total if isinstance(counted, ComponentReport) else int(counted)
        if not report.min_count <= value <= report.courant_upper_bound:
            raise BoundViolation(
                f"counted {value} nodal domains outside "
                f"[{report.min_count}, {report.courant_upper_bound}] for (n, d) = ({n}, {d})"
            )
    return report


# ---------------------------------------------------------------------------
# Spherical-grid oracle (float path, n = 2)
# ---------------------------------------------------------------------------


def sphere_grid_count(p: Polynomial, resolution: int = 256) -> ComponentReport:
    """Independent nodal count on a longitude/latitude sphere grid (float signs).

    This is the cross-check oracle for the cube-exact pipeline: same
    reduction to the unit sphere, entirely different sampling surface and
    arithmetic.  Near-zero values (relative 1e-12) count as zero cells, and
    the same quarter-point probing guards same-sign adjacency.
    """
    if p.spatial_dim != 2:
        raise NodalError("the spherical oracle is defined for n = 2")
    m, k = 2 * resolution, resolution
    d_theta = 2.0 * np.pi / m
    d_phi = np.pi / k
    thetas = (np.arange(m) + 0.5) * d_theta
    phis = -np.pi / 2 + (np.arange(k) + 0.5) * d_phi

    def grid_signs(theta_vals: np.ndarray, phi_vals: np.ndarray, scale: float) -> np.ndarray:
        tg, pg = np.meshgrid(theta_vals, phi_vals, indexing="ij")
        xs = np.cos(tg) * np.cos(pg)
        ys = np.sin(tg) * np.cos(pg)
        ts = np.sin(pg)
        values = _float_mesh_eval(p, xs, ys, ts)
        out = np.sign(values).astype(np.int8)
        out[np.abs(values) < 1e-12 * scale] = 0
        return out

    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    base_values = _float_mesh_eval(
        p, np.cos(tg) * np.cos(pg), np.sin(tg) * np.cos(pg), np.sin(pg)
    )
    scale = float(np.abs(base_values).max()) or 1.0
    signs = np.sign(base_values).astype(np.int8)
    signs[np.abs(base_values) < 1e-12 * scale] = 0

    size = signs.size
    idx = np.arange(size, dtype=np.int64).reshape(signs.shape)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []

    # theta direction, with wraparound seam
    mask = (signs == np.roll(signs, -1, axis=0)) & (signs != 0)
    for eighth in _PROBE_STEPS:
        probe = grid_signs(thetas + eighth * d_theta / 8.0, phis, scale)
        mask = mask & (probe == signs)
    rows.append(idx[mask].ravel())
    cols.append(np.roll(idx, -1, axis=0)[mask].ravel())

    # phi direction
    mask = (signs[:, :-1] == signs[:, 1:]) & (signs[:, :-1] != 0)
    for eighth in _PROBE_STEPS:
        probe = grid_signs(thetas, phis[:-1] + eighth * d_phi / 8.0, scale)
        mask = mask & (probe == signs[:, :-1])
    rows.append(idx[:, :-1][mask].ravel())
    cols.append(idx[:, 1:][mask].ravel())

    row = np.concatenate(rows)
    col = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(row), dtype=np.int8), (row, col)), shape=(size, size))
    _, flat_labels = _graph_components(graph, directed=False)
    labels = flat_labels.reshape(signs.shape)

    dsu = _DisjointSet()
    label_sign: Dict[int, int] = {}
    nonzero = signs != 0
    for label, sign_value in zip(labels[nonzero].ravel(), signs[nonzero].ravel()):
        dsu.add(int(label))
        label_sign[int(label)] = int(sign_value)

    # poles join every same-sign cell of the adjacent latitude row
    for pole_point, row_index in (((0.0, 0.0, 1.0), k - 1), ((0.0, 0.0, -1.0), 0)):
        pole_value = p.evaluate_float(pole_point)
        if abs(pole_value) < 1e-12 * scale:
            continue
        pole_sign = 1 if pole_value > 0 else -1
        anchor = None
        for i in range(m):
            if signs[i, row_index] == pole_sign:
                label = int(labels[i, row_index])
                if anchor is None:
                    anchor = label
                else:
                    dsu.union(anchor, label)

    roots = {1: set(), -1: set()}
    for label, sign_value in label_sign.items():
        roots[sign_value].add(dsu.find(label))
    positive, negative = len(roots[1]), len(roots[-1])
    zero_fraction = float((signs == 0).sum()) / signs.size
    return ComponentReport(
        total=positive + negative,
        positive=positive,
        negative=negative,
        resolutions_used=(resolution,),
        stable=False,
        zero_cell_fraction=zero_fraction,
        method="sphere-float",
    )
