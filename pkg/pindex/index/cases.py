"""Paths ending at the case representatives, for numeric checks of the case table."""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from pindex.config import Tolerances
from pindex.core.normal_form import (
    CaseTag,
    NormalFormDecomposition,
    SplittingPair,
    build_basic_form,
    case_representative,
    splitting_numbers_numeric,
    splitting_numbers_table,
)
from pindex.core.symplectic import Dim, krein_type, standard_P
from pindex.errors import ParameterError
from pindex.index.crossing import IndexPair, index_crossing
from pindex.index.formulas import iterate_closed_form, random_decomposition
from pindex.paths.engine import extend_by_symmetry, path_to
from pindex.paths.path import SymplecticPath

logger = logging.getLogger(__name__)

#: Smallest gap between distinct unit-circle points of a random block product.
POINT_SEPARATION = 0.1


def case_path(
    case_id: int,
    theta: float | None = None,
    winding: int = 0,
) -> tuple[SymplecticPath, np.ndarray, CaseTag]:
    """Path gamma on [0, 1] with gamma(1) P equal to the case representative.

    P is -I of the block's size (kappa = 0).
    """
    form, tag = case_representative(case_id, theta)
    block = build_basic_form(form)
    P = standard_P(Dim(block.shape[0] // 2, 0))
    return path_to(block @ P, T=1.0, winding=winding), P, tag


def iterate_numeric(gamma: SymplecticPath, P: np.ndarray, m: int) -> IndexPair:
    """(i_{P,1}, nu_{P,1}) of the (2m - 1)-th symmetric iterate by crossing count."""
    return index_crossing(extend_by_symmetry(gamma, P, 2 * m - 1), 1.0, P)


def compare_case(case_id: int, theta: float | None, m_values: list[int]) -> list[tuple[int, IndexPair, IndexPair]]:
    """Closed-form and crossing-count iterates of a case path for each m.

    Returns:
        (m, closed form, crossing count) per m
    """
    gamma, P, tag = case_path(case_id, theta)
    i1 = index_crossing(gamma, 1.0, P).i
    rows = []
    for m in m_values:
        closed = iterate_closed_form(tag, i1, m)
        numeric = iterate_numeric(gamma, P, m)
        logger.debug(f"Case {case_id}, m={m}: closed {closed.as_tuple()}, numeric {numeric.as_tuple()}")
        rows.append((m, closed, numeric))
    return rows


def product_path(decomposition: NormalFormDecomposition) -> tuple[SymplecticPath, np.ndarray]:
    """Path on [0, 1] with gamma(1) P equal to the diamond product of the blocks (kappa = 0)."""
    X = decomposition.reconstruct()
    P = standard_P(Dim(X.shape[0] // 2, 0))
    return path_to(X @ P, T=1.0), P


def distinct_points(tags: list[CaseTag]) -> list[complex]:
    """Unit-circle spectrum points of the blocks, coinciding points once."""
    points: list[complex] = []
    for tag in tags:
        for point in tag.points():
            if all(abs(point - seen) > 1e-12 for seen in points):
                points.append(point)
    return points


def random_block_product(
    dim: Dim,
    rng: np.random.Generator,
    separation: float = POINT_SEPARATION,
    attempts: int = 100,
) -> NormalFormDecomposition:
    """Draw a block product whose distinct unit-circle points are at least ``separation`` apart.

    Raises:
        ParameterError: If no draw within ``attempts`` is separated
    """
    for _ in range(attempts):
        decomposition = random_decomposition(dim, rng)
        points = distinct_points(decomposition.tags)
        gaps = [abs(a - b) for k, a in enumerate(points) for b in points[k + 1:]]
        if all(gap >= separation for gap in gaps):
            return decomposition
    raise ParameterError(f"no block product with point separation {separation} in {attempts} draws")


@dataclass
class SplittingRow:
    """Splitting numbers of a block product at one point.

    Attributes:
        omega: The point of the unit circle
        numeric: Perturbation limit along the product path
        blockwise: Sum of the tabled pairs of the blocks
        krein: Krein type (p, q) of the product at omega
    """

    omega: complex
    numeric: SplittingPair
    blockwise: SplittingPair
    krein: tuple[int, int]

    @property
    def additive(self) -> bool:
        return self.numeric.as_tuple() == self.blockwise.as_tuple()

    @property
    def krein_balanced(self) -> bool:
        """S+ - S- = q - p with the -iJ Krein form."""
        p, q = self.krein
        return self.numeric.s_plus - self.numeric.s_minus == q - p

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega": [self.omega.real, self.omega.imag],
            "numeric": list(self.numeric.as_tuple()),
            "blockwise": list(self.blockwise.as_tuple()),
            "krein": list(self.krein),
        }


def splitting_rows(
    decomposition: NormalFormDecomposition,
    epsilon_schedule: list[float] | None = None,
    tol: Tolerances | None = None,
) -> list[SplittingRow]:
    """Numeric, blockwise and Krein-type splitting data at every point of a block product."""
    gamma, P = product_path(decomposition)
    X = decomposition.reconstruct()
    rows = []
    for omega in distinct_points(decomposition.tags):
        pairs = [splitting_numbers_table(tag, omega) for tag in decomposition.tags]
        blockwise = SplittingPair(sum(p.s_plus for p in pairs), sum(p.s_minus for p in pairs), omega)
        numeric = splitting_numbers_numeric(gamma, omega, P, epsilon_schedule, tol)
        krein = krein_type(X, omega, tol.tol_cluster if tol else None)
        logger.debug(f"product {[t.case_id for t in decomposition.tags]} at {omega:.4f}: {numeric.as_tuple()}")
        rows.append(SplittingRow(omega, numeric, blockwise, krein))
    return rows
