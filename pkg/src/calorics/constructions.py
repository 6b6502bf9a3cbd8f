"""Builders for the explicit caloric polynomial families with known nodal counts.

Three perturbation families cover the minimal-count constructions in two
space variables (one per congruence class of the degree d):

  lewy       d = 2 mod 4:  Im((x+iy)^d) - eps * p_d(x, t)            -> 2 domains
  odd        d odd >= 3:   y p_{d-1}(x, t) + eps * p_d(c x - s y, t) -> 2 domains
  zero_mod_4 d = 0 mod 4:  p_{2k}(x,t) p_{2k}(y,t)
                             + eps * p_{2k+1}(s x + c y, t)
                                   * p_{2k-1}(c x - s y, t)          -> 3 domains

with (c, s) a point on the unit circle.  The sign placement in the odd and
zero_mod_4 families is fixed so that the hard-coded integer fixtures below
are exact rational multiples of the parametric builders at eps = 1 resp. 1/2
and (c, s) = (3/5, 4/5); mirrored variants have identical nodal topology.

The high-dimensional family adds a planar harmonic polynomial to a basic hcp
in separate variables, and the product family multiplies basic hcps across
coordinates to force many nodal domains.  Fixed integer fixtures are kept as
literal text and cross-validated against the parametric builders by the test
suite, guarding transcriptions in either direction.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .caloric import basic_hcp
from .polyring import (
    ExponentVector,
    NotOnUnitCircle,
    Polynomial,
    embed,
    format_rational,
    parse_poly,
)

RotationSpec = Union[Tuple[Fraction, Fraction], float]

FAMILIES = ("lewy", "odd", "zero_mod_4", "high_dim", "product", "fixture")

# Figure-quality defaults; other degrees need an explicit eps or a scan.
DEFAULT_EPSILON = {
    ("lewy", 6): Fraction(1, 20),
    ("odd", 5): Fraction(3, 10),
    ("zero_mod_4", 4): Fraction(1, 5),
}
DEFAULT_ROTATION: Tuple[Fraction, Fraction] = (Fraction(3, 5), Fraction(4, 5))


class ConstructionError(ValueError):
    """Invalid family parameters (congruence, range, or rotation)."""


@dataclass(frozen=True)
class HarmonicSeed:
    """Choice of Re or Im part of (x + iy)^d."""

    d: int
    kind: str = "imag_part"  # "real_part" | "imag_part"

    def __post_init__(self):
        if self.d < 1:
            raise ConstructionError("harmonic seed degree must be >= 1")
        if self.kind not in ("real_part", "imag_part"):
            raise ConstructionError(f"unknown harmonic kind {self.kind!r}")


@dataclass(frozen=True)
class ConstructionSpec:
    """Serializable recipe for one polynomial from the families above."""

    family: str
    d: int = 0
    n: int = 2
    epsilon: Optional[Union[Fraction, float]] = None
    rotation: Optional[RotationSpec] = None
    fixture_id: Optional[str] = None
    seed_kind: str = "real_part"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConstructionError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "lewy" and self.d % 4 != 2:
            raise ConstructionError(f"lewy family needs d = 2 mod 4, got d = {self.d}")
        if self.family == "odd" and (self.d < 3 or self.d % 2 == 0):
            raise ConstructionError(f"odd family needs odd d >= 3, got d = {self.d}")
        if self.family == "zero_mod_4" and (self.d < 4 or self.d % 4 != 0):
            raise ConstructionError(f"zero_mod_4 family needs d = 0 mod 4 >= 4, got d = {self.d}")
        if isinstance(self.epsilon, Fraction) and self.epsilon <= 0:
            raise ConstructionError("epsilon must be positive")

    def to_json_dict(self) -> dict:
        out: dict = {"family": self.family, "d": self.d, "n": self.n}
        if self.epsilon is not None:
            out["eps"] = (
                format_rational(self.epsilon)
                if isinstance(self.epsilon, Fraction)
                else float(self.epsilon)
            )
        if self.rotation is not None:
            if isinstance(self.rotation, tuple):
                out["rot"] = [format_rational(self.rotation[0]), format_rational(self.rotation[1])]
            else:
                out["rot"] = float(self.rotation)
        if self.fixture_id is not None:
            out["fixture"] = self.fixture_id
        if self.family == "high_dim":
            out["seed_kind"] = self.seed_kind
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConstructionSpec":
        eps = data.get("eps")
        if isinstance(eps, str):
            eps = Fraction(eps)
        rot = data.get("rot")
        if isinstance(rot, list):
            rot = (Fraction(rot[0]), Fraction(rot[1]))
        return cls(
            family=data["family"],
            d=int(data.get("d", 0)),
            n=int(data.get("n", 2)),
            epsilon=eps,
            rotation=rot,
            fixture_id=data.get("fixture"),
            seed_kind=data.get("seed_kind", "real_part"),
        )


def resolve_rotation(rotation: Optional[RotationSpec]) -> Tuple[Fraction, Fraction, bool]:
    """Normalize a rotation input to exact (c, s) plus an exactness flag.

    A pair of rationals is checked to lie on the unit circle.  A float angle
    alpha maps to the pair (cos alpha, -sin alpha): combined with the sign
    placement of the perturbation families this makes the alpha-parametrized
    family the mirror image (an isometry, so nodal counts are unchanged) of
    the conventional one, and small alpha > 0 lands in the regime where the
    odd-degree family has two nodal domains.  The cos/sin doubles are
    converted to exact rationals, so the resulting polynomials are exact but
    only approximately rotations; the flag is False and downstream reports
    must mark such runs inexact.
    """
    if rotation is None:
        rotation = DEFAULT_ROTATION
    if isinstance(rotation, tuple):
        c, s = Fraction(rotation[0]), Fraction(rotation[1])
        if c * c + s * s != 1:
            raise NotOnUnitCircle(f"c^2 + s^2 = {c * c + s * s} != 1")
        return c, s, True
    angle = float(rotation)
    return Fraction(math.cos(angle)), Fraction(-math.sin(angle)), False


def _basic_at_linear_form(d: int, w: Polynomial) -> Polynomial:
    """p_d(w, t) where w is a t-free linear form in the ambient variables."""
    n = w.spatial_dim
    t = Polynomial.time(n)
    out = Polynomial.zero(n)
    for ev, coeff in basic_hcp(d).terms.items():
        out = out + (t ** ev.t_exp * w ** ev.space_exps[0]).scale(coeff)
    return out


def harmonic_2d(d: int, kind: str = "imag_part") -> Polynomial:
    """Re or Im of (x + iy)^d with exact integer coefficients (n = 2, t-free)."""
    seed = HarmonicSeed(d, kind)
    want = 0 if seed.kind == "real_part" else 1
    terms: Dict[ExponentVector, Fraction] = {}
    for j in range(d + 1):
        if j % 2 != want:
            continue
        sign = -1 if j % 4 >= 2 else 1  # i^j = sign * (1 or i)
        terms[ExponentVector(0, (d - j, j))] = Fraction(sign * math.comb(d, j))
    return Polynomial(2, terms)


def lewy_2mod4(d: int, epsilon: Optional[Union[Fraction, float]] = None) -> Polynomial:
    """Im((x+iy)^d) - eps * p_d(x, t) for d = 2 mod 4; two nodal domains for small eps."""
    spec = ConstructionSpec("lewy", d=d, epsilon=_coerce_eps(epsilon))
    eps = _epsilon_or_default(spec)
    psi = harmonic_2d(d, "imag_part")
    return psi - embed(basic_hcp(d), 2, [0]).scale(eps)


def odd_construction(
    d: int,
    epsilon: Optional[Union[Fraction, float]] = None,
    rotation: Optional[RotationSpec] = None,
) -> Polynomial:
    """y p_{d-1}(x, t) + eps * p_d(c x - s y, t) for odd d >= 3.

    Two nodal domains for small eps and generic rotation.  At eps = 1 and
    (c, s) = (3/5, 4/5) this is 1/750 times the integer degree-3 example.
    """
    spec = ConstructionSpec("odd", d=d, epsilon=_coerce_eps(epsilon), rotation=rotation)
    eps = _epsilon_or_default(spec)
    c, s, _ = resolve_rotation(rotation)
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    base = y * embed(basic_hcp(d - 1), 2, [0])
    perturbation = _basic_at_linear_form(d, x.scale(c) - y.scale(s))
    return base + perturbation.scale(eps)


def zero_mod4(
    d: int,
    epsilon: Optional[Union[Fraction, float]] = None,
    rotation: Optional[RotationSpec] = None,
) -> Polynomial:
    """p_{2k} p_{2k} + eps * p_{2k+1}(s x + c y, t) p_{2k-1}(c x - s y, t), d = 4k.

    Three nodal domains for small eps and generic rotation.  At eps = 1/2 and
    (c, s) = (3/5, 4/5) this is 1/7500 times the integer degree-4 example.
    """
    spec = ConstructionSpec("zero_mod_4", d=d, epsilon=_coerce_eps(epsilon), rotation=rotation)
    eps = _epsilon_or_default(spec)
    c, s, _ = resolve_rotation(rotation)
    k = d // 4
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    base = embed(basic_hcp(2 * k), 2, [0]) * embed(basic_hcp(2 * k), 2, [1])
    perturbation = _basic_at_linear_form(2 * k + 1, x.scale(s) + y.scale(c)) * _basic_at_linear_form(
        2 * k - 1, x.scale(c) - y.scale(s)
    )
    return base + perturbation.scale(eps)


def high_dim(d: int, seed: HarmonicSeed | str = "real_part", n: int = 3) -> Polynomial:
    """phi(x, y) + p_d(z, t): a degree-d caloric polynomial with two nodal domains.

    Exposed at n = 3; larger n embeds the same polynomial with unused extra
    variables, which leaves the nodal count at two.
    """
    if isinstance(seed, str):
        seed = HarmonicSeed(d, seed)
    if seed.d != d:
        raise ConstructionError(f"seed degree {seed.d} differs from requested degree {d}")
    if n < 3:
        raise ConstructionError("high_dim needs n >= 3")
    phi = embed(harmonic_2d(seed.d, seed.kind), n, [0, 1])
    psi = embed(basic_hcp(d), n, [2])
    return phi + psi


def product_lower(n: int, d: int) -> Polynomial:
    """q(x_n, t) * prod_{i<n} p(x_i, t) with deg p = floor(d/n), deg q = remainder top-up.

    Caloric of degree d with at least floor(d/n)^n nodal domains; needs
    floor(d/n) >= 2 so every factor is time-dependent.
    """
    if n < 2:
        raise ConstructionError("product family needs n >= 2")
    c = d // n
    if c < 2:
        raise ConstructionError(f"product family needs floor(d/n) >= 2, got {c} for (n, d) = ({n}, {d})")
    b = d - (n - 1) * c
    out = embed(basic_hcp(b), n, [n - 1])
    for i in range(n - 1):
        out = out * embed(basic_hcp(c), n, [i])
    return out


# ---------------------------------------------------------------------------
# Fixed fixtures (integer polynomials printed in the source material)
# ---------------------------------------------------------------------------

_FIXTURE_TEXT = {
    "deg2": ("2*t + x^2", 1),
    "n2d3": ("150*t*(3*x + y) + 27*x^3 + 267*x^2*y + 144*x*y^2 - 64*y^3", 2),
    "n2d4": (
        "7500*t^2 + 150*t*(37*x^2 - 7*x*y + 13*y^2)"
        " + 192*x^4 + 176*x^3*y + 1623*x^2*y^2 - 351*x*y^3 - 108*y^4",
        2,
    ),
    "n3d4": ("12*t^2 + 12*t*x^2 + x^4 + y^4 - 6*y^2*z^2 + z^4", 3),
    "prod_n2d4": ("(2*t + x^2)*(2*t + y^2)", 2),
}

_DEG2_PATTERN = re.compile(r"^deg2_n(\d+)_j(\d+)$")
_BASIC_PATTERN = re.compile(r"^basic_(\d+)$")


def fixture_ids() -> List[str]:
    return sorted(_FIXTURE_TEXT) + ["deg2_n<N>_j<J>", "basic_<d>  (d <= 8)"]


def fixture(fixture_id: str) -> Polynomial:
    """Look up a fixed example polynomial by id.

    Known ids: deg2, deg2_n<N>_j<J>, n2d3, n2d4, n3d4, prod_n2d4, and
    basic_<d> for d <= 8.
    """
    if fixture_id in _FIXTURE_TEXT:
        text, n = _FIXTURE_TEXT[fixture_id]
        return parse_poly(text, n)
    match = _DEG2_PATTERN.match(fixture_id)
    if match:
        n, j = int(match.group(1)), int(match.group(2))
        if not 1 <= j <= n:
            raise ConstructionError(f"deg2 fixture needs 1 <= j <= n, got j = {j}, n = {n}")
        xj = Polynomial.variable(n, j - 1)
        return Polynomial.time(n).scale(2) + xj * xj
    match = _BASIC_PATTERN.match(fixture_id)
    if match:
        d = int(match.group(1))
        if d > 8:
            raise ConstructionError("basic fixtures are provided for d <= 8; use the generator instead")
        return basic_hcp(d)
    raise ConstructionError(
        f"unknown fixture {fixture_id!r}; known ids: {', '.join(fixture_ids())}"
    )


# ---------------------------------------------------------------------------
# Spec-driven dispatch and epsilon admissibility scans
# ---------------------------------------------------------------------------


def _coerce_eps(epsilon) -> Optional[Union[Fraction, float]]:
    if epsilon is None or isinstance(epsilon, Fraction):
        return epsilon
    if isinstance(epsilon, int):
        return Fraction(epsilon)
    if isinstance(epsilon, str):
        return Fraction(epsilon)
    return Fraction(epsilon)  # floats rationalize exactly


def _epsilon_or_default(spec: ConstructionSpec) -> Fraction:
    if spec.epsilon is not None:
        eps = Fraction(spec.epsilon)
        if eps <= 0:
            raise ConstructionError("epsilon must be positive")
        return eps
    key = (spec.family, spec.d)
    if key in DEFAULT_EPSILON:
        return DEFAULT_EPSILON[key]
    raise ConstructionError(
        f"no default epsilon for family {spec.family!r} at d = {spec.d}; "
        f"pass one explicitly or run an epsilon scan"
    )


def target_count(family: str, n: int = 2, d: int = 0) -> int:
    """Expected stabilized nodal count for each construction family."""
    if family in ("lewy", "odd", "high_dim"):
        return 2
    if family == "zero_mod_4":
        return 3
    if family == "product":
        return (d // n) ** n
    raise ConstructionError(f"no target count for family {family!r}")


def build(spec: ConstructionSpec) -> Polynomial:
    """Materialize a ConstructionSpec into a polynomial."""
    if spec.family == "lewy":
        return lewy_2mod4(spec.d, spec.epsilon)
    if spec.family == "odd":
        return odd_construction(spec.d, spec.epsilon, spec.rotation)
    if spec.family == "zero_mod_4":
        return zero_mod4(spec.d, spec.epsilon, spec.rotation)
    if spec.family == "high_dim":
        return high_dim(spec.d, spec.seed_kind, max(spec.n, 3))
    if spec.family == "product":
        return product_lower(spec.n, spec.d)
    if spec.family == "fixture":
        if spec.fixture_id is None:
            raise ConstructionError("fixture family needs fixture_id")
        return fixture(spec.fixture_id)
    raise ConstructionError(f"unknown family {spec.family!r}")


@dataclass(frozen=True)
class ScanRow:
    epsilon: Fraction
    total: int
    positive: int
    negative: int
    stable: bool


@dataclass(frozen=True)
class ScanResult:
    """Epsilon sweep outcome: full table plus the admissibility verdict."""

    target: int
    rows: Tuple[ScanRow, ...]
    largest_admissible: Optional[Fraction]

    @property
    def admissible(self) -> List[Fraction]:
        return [row.epsilon for row in self.rows if row.stable and row.total == self.target]

    @property
    def no_admissible(self) -> bool:
        return self.largest_admissible is None


def scan_epsilon(
    spec: ConstructionSpec,
    eps_grid: Sequence[Union[Fraction, str, float]],
    target: Optional[int] = None,
    schedule: Optional[Sequence[int]] = None,
) -> ScanResult:
    """Sweep eps over the grid (descending) and count nodal domains at each.

    An eps is admissible when the multi-resolution count stabilizes at the
    family's target.  The full table is always returned; when nothing in the
    grid is admissible the result is flagged through `no_admissible`.
    """
    from .nodal import nodal_count  # local import keeps module layering acyclic

    if target is None:
        target = target_count(spec.family, spec.n, spec.d)
    grid = sorted({Fraction(e) for e in eps_grid}, reverse=True)
    if not grid or grid[-1] <= 0:
        raise ConstructionError("eps grid must contain positive rationals")
    rows: List[ScanRow] = []
    largest: Optional[Fraction] = None
    for eps in grid:
        poly = build(
            ConstructionSpec(
                family=spec.family,
                d=spec.d,
                n=spec.n,
                epsilon=eps,
                rotation=spec.rotation,
                fixture_id=spec.fixture_id,
                seed_kind=spec.seed_kind,
            )
        )
        report = nodal_count(poly, schedule)
        rows.append(ScanRow(eps, report.total, report.positive, report.negative, report.stable))
        if largest is None and report.stable and report.total == target:
            largest = eps
    return ScanResult(target=target, rows=tuple(rows), largest_admissible=largest)
