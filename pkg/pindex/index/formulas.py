"""Closed-form index formulas.

Iteration formulas for the ten cases, the three-fold iteration bounds and
their elliptic-height conclusions, the ellipsoid index and the pinching
bounds on iterated indices.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from pindex.core.normal_form import (
    CaseTag,
    NormalFormDecomposition,
    case_representative,
)
from pindex.core.symplectic import Dim
from pindex.errors import ParameterError, TheoremViolationError
from pindex.index.crossing import IndexPair

logger = logging.getLogger(__name__)

#: Cases whose iteration formula needs the rotation angle.
ANGLE_CASES = (7, 8, 9)

#: Nullity at 1 of the one-period block, per case.
CASE_NULLITY = {1: 1, 2: 2, 3: 1, 4: 0, 5: 0, 6: 0, 10: 0}


class CeilingParts(NamedTuple):
    """E(a), phi(a), [a] and {a}."""

    E: int
    phi: int
    floor: int
    frac: float


def ceiling_parts(a: float, tol: float = 1e-12) -> CeilingParts:
    """Split a real number into its ceiling data.

    E(a) is the least integer >= a and phi(a) = E(a) - [a]; values within
    ``tol`` of an integer count as that integer.
    """
    nearest = round(a)
    if abs(a - nearest) <= tol:
        if tol > 1e-12 and a != nearest:
            logger.debug(f"{a!r} lies in the near-integer band of width {tol:.0e}; phi taken as 0")
        return CeilingParts(int(nearest), 0, int(nearest), 0.0)
    floor = int(np.floor(a))
    return CeilingParts(floor + 1, 1, floor, float(a - floor))


def iterate_closed_form(
    tag: CaseTag,
    i1: int,
    m: int,
    tol_integer: float = 1e-9,
) -> IndexPair:
    """(i_{P,1}, nu_{P,1}) of the (2m-1)-th symmetric iterate of a one-case path.

    Args:
        tag: Case of gamma(T) P
        i1: i_{P,1}(gamma)
        m: The iterate is gamma^{2m-1, P}
        tol_integer: Band in which (2m-1) theta / 2 pi counts as an integer

    Raises:
        ParameterError: If m < 1 or an angle case has no theta
    """
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m}")
    k = 2 * int(m) - 1
    case = tag.case_id
    if case in ANGLE_CASES:
        if tag.theta is None:
            raise ParameterError(f"Case {case} needs theta")
        E, phi, _, _ = ceiling_parts(k * tag.theta / (2 * np.pi), tol_integer)
        nu = 2 - 2 * phi
        if case == 7:
            i = k * (i1 - 1) + 2 * E - 1
        elif case == 8:
            i = k * i1 + 2 * phi - 2
        else:
            i = k * i1
        return IndexPair(i, nu, 1.0 + 0j)
    if case in (1, 2):
        return IndexPair(k * (i1 + 1) - 1, CASE_NULLITY[case], 1.0 + 0j)
    return IndexPair(k * i1, CASE_NULLITY[case], 1.0 + 0j)


def iterate_from_blocks(tags: list[CaseTag], i1: int, m: int, tol_integer: float = 1e-9) -> IndexPair:
    """Iterated index of a path whose gamma(T) P is the diamond product of the blocks.

    Each block adds its own iteration term to (2m-1) i1.
    """
    k = 2 * int(m) - 1
    i = k * i1
    nu = 0
    for tag in tags:
        term = iterate_closed_form(tag, 0, m, tol_integer)
        i += term.i
        nu += term.nu
    return IndexPair(i, nu, 1.0 + 0j)


def one_period_nullity(tags: list[CaseTag]) -> int:
    """nu_{P,1} of the one-period path from its blocks."""
    return sum(tag.nullity_at(1.0 + 0j) for tag in tags)


@dataclass
class Theorem37Report:
    """Three-fold iteration differences and their bounds.

    Attributes:
        diff3: i(u^3) - 3 i(u)
        diffnu3: i(u^3) + nu(u^3) - 3 (i(u) + nu(u))
        bound_upper: 2 kappa + 2n
        bound_lower: 2 kappa + 2 - 2n
        block_upper: 2 kappa + 2 p_- + 2 p_0 + 2 r
        block_lower: 2 kappa + 2 - 2 p_0 - 2 p_+ - 2 r
        conclusion_i: "e >= 2n-2kappa" when diff3 >= 2n
        conclusion_ii: "e >= 2n-4kappa" when diffnu3 <= 6 kappa + 2 - 2n
        height: Elliptic height of the decomposed monodromy
    """

    diff3: int
    diffnu3: int
    bound_upper: int
    bound_lower: int
    block_upper: int
    block_lower: int
    conclusion_i: str | None = None
    conclusion_ii: str | None = None
    height: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "diff3": self.diff3,
            "diffnu3": self.diffnu3,
            "bound_upper": self.bound_upper,
            "bound_lower": self.bound_lower,
            "block_upper": self.block_upper,
            "block_lower": self.block_lower,
            "conclusion_i": self.conclusion_i,
            "conclusion_ii": self.conclusion_ii,
            "height": self.height,
        }


def theorem37_check(
    dec: NormalFormDecomposition,
    i_u: int,
    nu_u: int,
    i_u3: int,
    nu_u3: int,
    dim: Dim,
) -> Theorem37Report:
    """Check the three-fold iteration bounds and derive the height conclusions.

    Raises:
        TheoremViolationError: If a bound or a triggered conclusion fails
    """
    n, kappa = dim.n, dim.kappa
    c = dec.counts
    report = Theorem37Report(
        diff3=i_u3 - 3 * i_u,
        diffnu3=(i_u3 + nu_u3) - 3 * (i_u + nu_u),
        bound_upper=2 * kappa + 2 * n,
        bound_lower=2 * kappa + 2 - 2 * n,
        block_upper=2 * kappa + 2 * c.p_minus + 2 * c.p_zero + 2 * c.r,
        block_lower=2 * kappa + 2 - 2 * c.p_zero - 2 * c.p_plus - 2 * c.r,
        height=dec.elliptic_height(),
    )
    if report.diff3 > report.block_upper or report.block_upper > report.bound_upper:
        raise TheoremViolationError(
            f"i(u^3) - 3 i(u) = {report.diff3} exceeds {report.block_upper} (limit {report.bound_upper})",
        )
    if report.diffnu3 < report.block_lower or report.block_lower < report.bound_lower:
        raise TheoremViolationError(
            f"nullity-augmented difference {report.diffnu3} is below {report.block_lower} "
            f"(limit {report.bound_lower})",
        )
    if report.diff3 >= 2 * n:
        report.conclusion_i = f"e >= {2 * n - 2 * kappa}"
        if report.height < 2 * n - 2 * kappa:
            raise TheoremViolationError(f"height {report.height} contradicts {report.conclusion_i}")
    if report.diffnu3 <= 6 * kappa + 2 - 2 * n:
        report.conclusion_ii = f"e >= {2 * n - 4 * kappa}"
        if report.height < 2 * n - 4 * kappa:
            raise TheoremViolationError(f"height {report.height} contradicts {report.conclusion_ii}")
    return report


def iteration_bounds_from_blocks(dec: NormalFormDecomposition, i1: int, dim: Dim) -> Theorem37Report:
    """Run :func:`theorem37_check` with indices from the iteration formulas.

    Uses i(u) = i_{P,1} - kappa and nu(u) = nu_{P,1} - 1 for both iterates.
    """
    tags = dec.tags
    i_u3 = iterate_from_blocks(tags, i1, 2)
    nu1 = one_period_nullity(tags)
    return theorem37_check(
        dec,
        i_u=i1 - dim.kappa,
        nu_u=nu1 - 1,
        i_u3=i_u3.i - dim.kappa,
        nu_u3=i_u3.nu - 1,
        dim=dim,
    )


def _random_angle(rng: np.random.Generator, upper: float) -> float:
    margin = 0.05
    theta = rng.uniform(margin, np.pi - margin)
    if upper > np.pi and rng.random() < 0.5:
        theta += np.pi
    return float(theta)


def random_decomposition(
    dim: Dim,
    rng: np.random.Generator,
    cases: tuple[int, ...] = tuple(range(1, 11)),
) -> NormalFormDecomposition:
    """Draw a block list of total size 2n from the given cases."""
    remaining = dim.size
    blocks = []
    while remaining:
        allowed = [c for c in cases if c not in (8, 9) or remaining >= 4]
        if not allowed:
            allowed = [10]
        case = int(rng.choice(allowed))
        theta = None
        if case == 7:
            theta = _random_angle(rng, 2 * np.pi)
        elif case in (8, 9):
            theta = _random_angle(rng, np.pi)
        form, tag = case_representative(case, theta)
        blocks.append((form, tag))
        remaining -= form.matrix_size
    return NormalFormDecomposition.from_blocks(blocks)


def ellipsoid_index(dim: Dim, c: float, s: float) -> int:
    """i_P^E of the constant coefficient c I_{2n} on [0, s].

    Equals 2 kappa (E(cs/2pi) - 1) + 2 (n - kappa) (E((cs + pi)/2pi) - 1).
    """
    if c <= 0 or s <= 0:
        raise ParameterError(f"c and s must be positive, got c={c}, s={s}")
    n, kappa = dim.n, dim.kappa
    first = ceiling_parts(c * s / (2 * np.pi)).E
    second = ceiling_parts((c * s + np.pi) / (2 * np.pi)).E
    return 2 * kappa * (first - 1) + 2 * (n - kappa) * (second - 1)


class PinchingBounds(NamedTuple):
    """Lower bound on i and upper bound on i + nu of an iterate."""

    lower: int | None
    upper: int | None


def pinching_bounds(tau2: float, m: int, r: float, R: float, dim: Dim) -> PinchingBounds:
    """Bounds on i(u^{2m-1}) and i + nu from the pinching radii.

    lower = 2n l for the largest l >= 1 with (2m-1) tau2 / 2 > l pi R^2;
    upper = 2n (l - 1) - 1 for the smallest l >= 1 with
    (2m-1) tau2 / 2 < (l - 1/2) pi r^2.
    """
    if not 0 < r <= R:
        raise ParameterError(f"radii must satisfy 0 < r <= R, got r={r}, R={R}")
    if tau2 <= 0 or m < 1:
        raise ParameterError(f"need tau2 > 0 and m >= 1, got tau2={tau2}, m={m}")
    n = dim.n
    x = (2 * m - 1) * tau2 / 2
    # both inequalities are strict; ratios within 1e-9 of an integer are that integer
    l_low = ceiling_parts(x / (np.pi * R**2), 1e-9).E - 1
    lower = 2 * n * l_low if l_low >= 1 else None
    l_up = ceiling_parts(x / (np.pi * r**2) + 0.5, 1e-9).floor + 1
    upper = 2 * n * (l_up - 1) - 1
    return PinchingBounds(lower, upper)


@dataclass
class OrbitIndices:
    """Index data of one closed characteristic and its third iterate."""

    action: float
    i: int
    nu: int
    i3: int
    nu3: int
    height: int | None = None


@dataclass
class ChainReport:
    """Step-by-step record of the two-orbit stability argument."""

    ratio: float
    pinched_53: bool
    pinched_32: bool
    checks: dict[str, bool] = field(default_factory=dict)
    conclusions: dict[str, str] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "ratio": self.ratio,
            "pinched_53": self.pinched_53,
            "pinched_32": self.pinched_32,
            "checks": dict(self.checks),
            "conclusions": dict(self.conclusions),
            "holds": self.holds,
        }


def stability_chain(dim: Dim, orbits: list[OrbitIndices], r: float, R: float) -> ChainReport:
    """Replay the stability argument on the first and the (n - kappa)-th orbit.

    The first orbit has i = 0; under sqrt(3/2)-pinching its third iterate
    has i >= 2n, which forces e >= 2n - 2 kappa. The (n - kappa)-th orbit has
    i + nu >= 2(n - kappa) - 1 and, under sqrt(5/3)-pinching, its third
    iterate has i + nu <= 4n - 1, which forces e >= 2n - 4 kappa.

    Raises:
        ParameterError: If no orbits are given
    """
    if not orbits:
        raise ParameterError("the chain needs at least one orbit")
    n, kappa = dim.n, dim.kappa
    ratio = R / r
    report = ChainReport(
        ratio=ratio,
        pinched_53=ratio < np.sqrt(5 / 3),
        pinched_32=ratio < np.sqrt(3 / 2),
    )
    ordered = sorted(orbits, key=lambda orbit: orbit.action)
    first = ordered[0]
    report.checks["first_index_zero"] = first.i == 0
    if report.pinched_32:
        bounds = pinching_bounds(first.action, 2, r, R, dim)
        report.checks["first_iterate_lower"] = bounds.lower is not None and first.i3 >= bounds.lower >= 2 * n
        if first.i3 - 3 * first.i >= 2 * n:
            report.conclusions["first"] = f"e >= {2 * n - 2 * kappa}"
            if first.height is not None:
                report.checks["first_height"] = first.height >= 2 * n - 2 * kappa

    count = n - kappa
    report.checks["enough_orbits"] = len(ordered) >= count
    last = ordered[min(count, len(ordered)) - 1]
    report.checks["last_lower"] = last.i + last.nu >= 2 * (n - kappa) - 1
    if report.pinched_53:
        bounds = pinching_bounds(last.action, 2, r, R, dim)
        report.checks["last_iterate_upper"] = last.i3 + last.nu3 <= min(bounds.upper, 4 * n - 1)
        if (last.i3 + last.nu3) - 3 * (last.i + last.nu) <= 6 * kappa + 2 - 2 * n:
            report.conclusions["last"] = f"e >= {2 * n - 4 * kappa}"
            if last.height is not None:
                report.checks["last_height"] = last.height >= 2 * n - 4 * kappa
    logger.debug(f"stability chain checks: {report.checks}")
    return report
