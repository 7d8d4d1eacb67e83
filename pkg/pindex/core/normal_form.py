"""Basic normal forms, case classification and splitting numbers.

The ten cases describe the conjugacy class of a 2x2 (or 4x4 N2) block of
M P. Splitting numbers are read from the case table or computed as
one-sided index jumps along the unit circle.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import linalg
from scipy.sparse.csgraph import connected_components

from pindex.config import DEFAULT_TOLERANCES, Tolerances
from pindex.core.symplectic import (
    as_omega,
    cluster_eigenvalues,
    diamond_all,
    generalized_eigenspace,
    half_dim,
    kernel_basis,
    krein_type,
    merge_radius,
    on_circle,
    rotation,
    standard_J,
)
from pindex.errors import (
    ClassificationError,
    ConvergenceError,
    DecompositionUnsupportedError,
    ParameterError,
    UnsupportedPointError,
)

if TYPE_CHECKING:
    from pindex.paths.path import SymplecticPath

logger = logging.getLogger(__name__)

#: Sign invariants closer to zero than this are ties.
SIGN_TIE = 1e-10

#: Rank tolerance of the shifted splitting evaluations, relative to eps^2.
RANK_MARGIN = 1e-3


class FormKind(Enum):
    """Kinds of basic normal forms."""

    D = "D"
    N1 = "N1"
    R = "R"
    N2 = "N2"
    HYPERBOLIC_REST = "HyperbolicRest"


def _valid_angle(theta: float | None) -> bool:
    if theta is None:
        return False
    return 0.0 < theta < 2 * np.pi and abs(theta - np.pi) > 1e-12


@dataclass(frozen=True)
class BasicForm:
    """A basic normal form with its parameters.

    Attributes:
        kind: Which family the block belongs to
        lam: Eigenvalue for D (+-2) and N1 (+-1)
        b: Off-diagonal sign for N1 (+-1 or 0)
        theta: Rotation angle for R and N2
        B: Upper-right 2x2 block of N2 as (b1, b2, b3, b4)
        size: Matrix size of a hyperbolic rest block
    """

    kind: FormKind
    lam: float | None = None
    b: float | None = None
    theta: float | None = None
    B: tuple[float, float, float, float] | None = None
    size: int = 2

    def validate(self) -> None:
        """Check the parameter ranges of the family.

        Raises:
            ParameterError: If a parameter is out of range
        """
        if self.kind is FormKind.D and self.lam not in (2.0, -2.0):
            raise ParameterError(f"D(lambda) needs lambda in {{2, -2}}, got {self.lam}")
        if self.kind is FormKind.N1:
            if self.lam not in (1.0, -1.0):
                raise ParameterError(f"N1(lambda, b) needs lambda in {{1, -1}}, got {self.lam}")
            if self.b not in (1.0, -1.0, 0.0):
                raise ParameterError(f"N1(lambda, b) needs b in {{1, -1, 0}}, got {self.b}")
        if self.kind in (FormKind.R, FormKind.N2) and not _valid_angle(self.theta):
            raise ParameterError(f"theta must lie in (0, pi) or (pi, 2 pi), got {self.theta}")
        if self.kind is FormKind.N2:
            if self.B is None or len(self.B) != 4:
                raise ParameterError("N2 needs the 2x2 block B")
            _, b2, b3, _ = self.B
            if abs((b2 - b3) * np.sin(self.theta)) <= SIGN_TIE:
                raise ParameterError("N2 needs (b2 - b3) sin(theta) != 0")
        if self.kind is FormKind.HYPERBOLIC_REST and (self.size < 2 or self.size % 2):
            raise ParameterError(f"hyperbolic rest size must be positive and even, got {self.size}")

    @property
    def matrix_size(self) -> int:
        if self.kind is FormKind.N2:
            return 4
        if self.kind is FormKind.HYPERBOLIC_REST:
            return self.size
        return 2

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value}
        for key in ("lam", "b", "theta", "B"):
            value = getattr(self, key)
            if value is not None:
                data[key] = list(value) if key == "B" else value
        if self.kind is FormKind.HYPERBOLIC_REST:
            data["size"] = self.size
        return data


def n2_block(theta: float, b2: float, b3: float, b1: float = 0.0) -> np.ndarray:
    """Return the symplectic N2 block [[R(theta), B], [0, R(theta)]].

    The entry b4 is solved from cos(theta)(b2 - b3) = -sin(theta)(b1 + b4),
    which makes R(theta)^T B symmetric.

    Raises:
        ParameterError: If theta is 0 or pi
    """
    s, c = np.sin(theta), np.cos(theta)
    if abs(s) <= SIGN_TIE:
        raise ParameterError(f"N2 needs sin(theta) != 0, got theta={theta}")
    b4 = -b1 - c * (b2 - b3) / s
    R = rotation(theta)
    B = np.array([[b1, b2], [b3, b4]])
    return np.block([[R, B], [np.zeros((2, 2)), R]])


def build_basic_form(form: BasicForm) -> np.ndarray:
    """Return the literal matrix of a basic normal form.

    Raises:
        ParameterError: If a parameter is out of range
    """
    form.validate()
    if form.kind is FormKind.D:
        return np.diag([form.lam, 1.0 / form.lam])
    if form.kind is FormKind.N1:
        return np.array([[form.lam, form.b], [0.0, form.lam]])
    if form.kind is FormKind.R:
        return rotation(form.theta)
    if form.kind is FormKind.N2:
        b1, b2, b3, _ = form.B
        return n2_block(form.theta, b2, b3, b1)
    return diamond_all(*[np.diag([2.0, 0.5])] * (form.size // 2))


@dataclass(frozen=True)
class CaseTag:
    """One of the ten cases of M P.

    Attributes:
        case_id: Case number 1..10
        theta: Angle for Cases 7-9
        sign_data: Sign of b (Cases 1, 3, 4, 6) or of (b2 - b3) sin(theta) (Cases 8, 9)
    """

    case_id: int
    theta: float | None = None
    sign_data: int | None = None

    def __post_init__(self) -> None:
        if self.case_id not in range(1, 11):
            raise ParameterError(f"case_id must be in 1..10, got {self.case_id}")

    def points(self) -> list[complex]:
        """Unit-circle spectrum points of the case block."""
        if self.case_id in (1, 2, 3):
            return [1.0 + 0j]
        if self.case_id in (4, 5, 6):
            return [-1.0 + 0j]
        if self.case_id in (7, 8, 9):
            if self.theta is None:
                raise UnsupportedPointError(f"Case {self.case_id} needs theta")
            omega = np.exp(1j * self.theta)
            return [complex(omega), complex(np.conj(omega))]
        return []

    def nullity_at(self, omega: complex, tol: float = 1e-9) -> int:
        """nu_{P,omega} of the case block."""
        if self.case_id == 10:
            return 0
        if self.case_id in (2, 5):
            return 2 if abs(omega - self.points()[0]) <= tol else 0
        return sum(1 for point in self.points() if abs(omega - point) <= tol)

    def to_dict(self) -> dict[str, Any]:
        return {"case": self.case_id, "theta": self.theta, "sign": self.sign_data}


@dataclass(frozen=True)
class SplittingPair:
    """Splitting numbers S+ and S- at a point of the unit circle."""

    s_plus: int
    s_minus: int
    at_omega: complex

    def as_tuple(self) -> tuple[int, int]:
        return (self.s_plus, self.s_minus)

    def to_dict(self) -> dict[str, Any]:
        return {
            "s_plus": self.s_plus,
            "s_minus": self.s_minus,
            "omega": {"re": self.at_omega.real, "im": self.at_omega.imag},
        }


@dataclass
class BlockCounts:
    """Block counts of the normal-form pattern."""

    p_minus: int = 0
    p_zero: int = 0
    p_plus: int = 0
    r: int = 0
    s: int = 0

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.p_minus, self.p_zero, self.p_plus, self.r, self.s)


@dataclass
class NormalFormDecomposition:
    """Classified blocks of M P and their counts.

    Attributes:
        blocks: (BasicForm, CaseTag) per block
        counts: p_minus, p_zero, p_plus, r, s
        rest_dim: Size of the part with no spectrum on U - {-1}
    """

    blocks: list[tuple[BasicForm, CaseTag]] = field(default_factory=list)
    counts: BlockCounts = field(default_factory=BlockCounts)
    rest_dim: int = 0

    @classmethod
    def from_blocks(cls, blocks: list[tuple[BasicForm, CaseTag]]) -> "NormalFormDecomposition":
        """Fill the counts and rest size from a block list."""
        counts = BlockCounts()
        rest_dim = 0
        for form, tag in blocks:
            if tag.case_id == 1:
                counts.p_minus += 1
            elif tag.case_id == 2:
                counts.p_zero += 1
            elif tag.case_id == 3:
                counts.p_plus += 1
            elif tag.case_id == 7:
                counts.r += 1
            elif tag.case_id in (8, 9):
                counts.s += 1
            else:
                rest_dim += form.matrix_size
        return cls(blocks=list(blocks), counts=counts, rest_dim=rest_dim)

    @property
    def size(self) -> int:
        return sum(form.matrix_size for form, _ in self.blocks)

    @property
    def tags(self) -> list[CaseTag]:
        return [tag for _, tag in self.blocks]

    def check_counts(self) -> None:
        """Verify 2(p_- + p_0 + p_+) + 2r + 4s + rest_dim = 2n.

        Raises:
            DecompositionUnsupportedError: If the block sizes do not add up
        """
        c = self.counts
        total = 2 * (c.p_minus + c.p_zero + c.p_plus) + 2 * c.r + 4 * c.s + self.rest_dim
        if total != self.size:
            raise DecompositionUnsupportedError(
                f"block counts give size {total}, blocks give {self.size}",
            )

    def reconstruct(self) -> np.ndarray:
        """Diamond product of the block representatives."""
        return diamond_all(*[build_basic_form(form) for form, _ in self.blocks])

    def elliptic_height(self) -> int:
        """Unit-circle multiplicity of the represented matrix."""
        height = 0
        for form, tag in self.blocks:
            if tag.case_id in (1, 2, 3, 4, 5, 6, 7):
                height += 2
            elif tag.case_id in (8, 9):
                height += 4
        return height

    def to_dict(self) -> dict[str, Any]:
        c = self.counts
        return {
            "blocks": [{"form": f.to_dict(), "tag": t.to_dict()} for f, t in self.blocks],
            "counts": {
                "p_minus": c.p_minus,
                "p_zero": c.p_zero,
                "p_plus": c.p_plus,
                "r": c.r,
                "s": c.s,
            },
            "rest_dim": self.rest_dim,
        }


def _sign(value: float, what: str) -> int:
    if abs(value) <= SIGN_TIE:
        raise ClassificationError(f"sign invariant of {what} is a tie ({value:.3e})")
    return 1 if value > 0 else -1


def _unipotent_sign(X: np.ndarray, lam: float) -> int:
    """Sign of b for a 2x2 block conjugate to [[lam, b], [0, lam]]."""
    return _sign(float(np.trace(standard_J(1) @ (X - lam * np.eye(2)))), "the Jordan block")


def _classify_2x2(X: np.ndarray, tol: Tolerances) -> CaseTag:
    trace = float(np.trace(X))
    for lam, cases in ((1.0, (1, 2, 3)), (-1.0, (6, 5, 4))):
        if abs(trace - 2 * lam) <= tol.tol_circle:
            nullity = kernel_basis(X - lam * np.eye(2), tol.tol_rank).shape[1]
            if nullity == 2:
                return CaseTag(cases[1])
            sign = _unipotent_sign(X, lam)
            # for lambda = 1: b > 0 is Case 1; for lambda = -1: b > 0 is Case 6
            return CaseTag(cases[0] if sign > 0 else cases[2], sign_data=sign)
    if abs(trace) > 2:
        return CaseTag(10)
    sin_sign = _sign(-float(np.trace(standard_J(1) @ X)), "the rotation direction")
    angle = float(np.arccos(np.clip(trace / 2, -1.0, 1.0)))
    theta = angle if sin_sign > 0 else 2 * np.pi - angle
    return CaseTag(7, theta=theta)


def _n2_invariant(Y: np.ndarray, omega: complex, tol: Tolerances) -> int:
    """Sign of (b2 - b3) sin(theta) for a block conjugate to N2 at omega.

    With v an eigenvector and w a generalized eigenvector, (Y - omega) w = v,
    the real number -i omega h(v, w) for h(x, y) = x^H (-iJ) y is a
    conjugation invariant whose sign is opposite to (b2 - b3) sin(theta).
    """
    size = Y.shape[0]
    shifted = Y - omega * np.eye(size)
    kernel = kernel_basis(shifted, tol.tol_rank)
    if kernel.shape[1] != 1:
        raise ClassificationError(f"expected a single Jordan chain at {omega}")
    v = kernel[:, 0]
    w = linalg.lstsq(shifted, v)[0]
    J = standard_J(half_dim(Y))
    h = v.conj() @ (-1j * J) @ w
    return -_sign(float((-1j * omega * h).real), "the N2 block")


def classify_case(M: np.ndarray, P: np.ndarray, tol: Tolerances | None = None) -> CaseTag:
    """Classify M P into one of the ten cases.

    Raises:
        ClassificationError: If M P matches none of the patterns
    """
    tol = tol or DEFAULT_TOLERANCES
    X = np.asarray(M, dtype=float) @ np.asarray(P, dtype=float)
    size = X.shape[0]
    if size == 2:
        return _classify_2x2(X, tol)

    eigenvalues = linalg.eigvals(X)
    circle = [value for value in eigenvalues if on_circle(value, tol.tol_circle)]
    if not circle:
        return CaseTag(10)
    if size == 4:
        clusters = cluster_eigenvalues(np.array(circle), tol.tol_cluster)
        upper = [(value, mult) for value, mult in clusters if value.imag > merge_radius(tol.tol_cluster)]
        if len(clusters) == 2 and len(upper) == 1 and upper[0][1] == 2:
            omega = upper[0][0] / abs(upper[0][0])
            theta = float(np.angle(omega))
            sign = _n2_invariant(X, omega, tol)
            return CaseTag(8 if sign < 0 else 9, theta=theta, sign_data=sign)
    raise ClassificationError(
        f"M P of size {size} with unit-circle spectrum matches none of the ten cases",
    )


def _form_from_tag(tag: CaseTag, X: np.ndarray) -> BasicForm:
    if tag.case_id in (1, 2, 3):
        return BasicForm(FormKind.N1, lam=1.0, b=float(tag.sign_data or 0))
    if tag.case_id in (4, 5, 6):
        return BasicForm(FormKind.N1, lam=-1.0, b=float(tag.sign_data or 0))
    if tag.case_id == 7:
        return BasicForm(FormKind.R, theta=tag.theta)
    if tag.case_id in (8, 9):
        return _n2_representative(tag)
    for lam in (2.0, -2.0):
        if X.shape == (2, 2) and np.allclose(X, np.diag([lam, 1 / lam]), atol=1e-12):
            return BasicForm(FormKind.D, lam=lam)
    return BasicForm(FormKind.HYPERBOLIC_REST, size=X.shape[0])


def _n2_representative(tag: CaseTag) -> BasicForm:
    # (b2 - b3) sin(theta) carries the sign of the case
    wanted = tag.sign_data * np.sign(np.sin(tag.theta))
    b2, b3 = (1.0, 0.0) if wanted > 0 else (0.0, 1.0)
    block = n2_block(tag.theta, b2, b3)
    return BasicForm(FormKind.N2, theta=tag.theta, B=tuple(float(x) for x in block[:2, 2:].ravel()))


_CASE_SIGNS = {1: 1, 2: 0, 3: -1, 4: -1, 5: 0, 6: 1}


def case_representative(case_id: int, theta: float | None = None) -> tuple[BasicForm, CaseTag]:
    """Basic form and tag of a representative block of a case.

    Raises:
        ParameterError: If Cases 7-9 come without a valid theta
    """
    if case_id in _CASE_SIGNS:
        tag = CaseTag(case_id, sign_data=_CASE_SIGNS[case_id])
        return _form_from_tag(tag, np.eye(2)), tag
    if case_id == 10:
        return BasicForm(FormKind.D, lam=2.0), CaseTag(10)
    if not _valid_angle(theta):
        raise ParameterError(f"Case {case_id} needs theta in (0, pi) or (pi, 2 pi), got {theta}")
    if case_id == 7:
        return BasicForm(FormKind.R, theta=theta), CaseTag(7, theta=theta)
    tag = CaseTag(case_id, theta=theta, sign_data=-1 if case_id == 8 else 1)
    return _n2_representative(tag), tag


def _plane_components(X: np.ndarray, tol: float) -> list[list[int]]:
    n = half_dim(X)
    coupling = np.zeros((n, n), dtype=bool)
    magnitude = np.abs(X)
    for k in range(n):
        for m in range(n):
            rows = [k, n + k]
            cols = [m, n + m]
            coupling[k, m] = bool(np.any(magnitude[np.ix_(rows, cols)] > tol))
    count, labels = connected_components(coupling | coupling.T, directed=False)
    return [[k for k in range(n) if labels[k] == label] for label in range(count)]


def _restrict(X: np.ndarray, planes: list[int]) -> np.ndarray:
    n = half_dim(X)
    idx = planes + [n + k for k in planes]
    return X[np.ix_(idx, idx)]


def _decompose_unipotent(
    Y: np.ndarray,
    lam: float,
    multiplicity: int,
    tol: Tolerances,
) -> list[tuple[BasicForm, CaseTag]]:
    size = Y.shape[0]
    N = Y - lam * np.eye(size)
    basis = np.real(generalized_eigenspace(Y, lam, tol.tol_cluster))
    nullity = kernel_basis(N, tol.tol_rank).shape[1]
    if np.max(np.abs(N @ N @ basis)) > 1e-6 * max(1.0, float(np.max(np.abs(N)))):
        raise DecompositionUnsupportedError(f"Jordan blocks of size > 2 at {lam}")
    jordan = multiplicity - nullity
    identity = (multiplicity - 2 * jordan) // 2
    if jordan < 0 or identity < 0:
        raise DecompositionUnsupportedError(f"inconsistent nullity {nullity} at {lam}")
    J = standard_J(half_dim(Y))
    form = basis.T @ ((N.T @ J - J @ N) / 2) @ basis
    values = linalg.eigvalsh((form + form.T) / 2)
    cutoff = 1e-8 * max(1.0, float(np.max(np.abs(values))))
    negative = int(np.sum(values < -cutoff))
    positive = int(np.sum(values > cutoff))
    if negative + positive != jordan:
        raise DecompositionUnsupportedError(
            f"sign form at {lam} has rank {negative + positive}, expected {jordan}",
        )
    plus_case, zero_case, minus_case = (1, 2, 3) if lam > 0 else (6, 5, 4)
    blocks = []
    blocks += [(BasicForm(FormKind.N1, lam=lam, b=1.0), CaseTag(plus_case, sign_data=1))] * negative
    blocks += [(BasicForm(FormKind.N1, lam=lam, b=0.0), CaseTag(zero_case))] * identity
    blocks += [(BasicForm(FormKind.N1, lam=lam, b=-1.0), CaseTag(minus_case, sign_data=-1))] * positive
    return blocks


def _decompose_elliptic(
    Y: np.ndarray,
    omega: complex,
    multiplicity: int,
    tol: Tolerances,
) -> list[tuple[BasicForm, CaseTag]]:
    theta = float(np.angle(omega))
    nullity = kernel_basis(Y - omega * np.eye(Y.shape[0]), tol.tol_rank).shape[1]
    if nullity == multiplicity:
        p, q = krein_type(Y, omega, tol.tol_cluster)
        if p + q != multiplicity:
            raise DecompositionUnsupportedError(f"degenerate Krein form at {omega}")
        blocks = [(BasicForm(FormKind.R, theta=theta), CaseTag(7, theta=theta))] * p
        mirrored = 2 * np.pi - theta
        blocks += [(BasicForm(FormKind.R, theta=mirrored), CaseTag(7, theta=mirrored))] * q
        return blocks
    if multiplicity == 2 and nullity == 1:
        sign = _n2_invariant(Y, omega, tol)
        tag = CaseTag(8 if sign < 0 else 9, theta=theta, sign_data=sign)
        return [(_n2_representative(tag), tag)]
    raise DecompositionUnsupportedError(
        f"non-semisimple eigenvalue {omega} of multiplicity {multiplicity}",
    )


def _decompose_block(Y: np.ndarray, tol: Tolerances) -> list[tuple[BasicForm, CaseTag]]:
    if Y.shape == (2, 2):
        tag = _classify_2x2(Y, tol)
        return [(_form_from_tag(tag, Y), tag)]

    radius = merge_radius(tol.tol_cluster)
    blocks: list[tuple[BasicForm, CaseTag]] = []
    hyperbolic = 0
    for value, mult in cluster_eigenvalues(linalg.eigvals(Y), tol.tol_cluster):
        if not on_circle(value, tol.tol_circle):
            hyperbolic += mult
        elif abs(value - 1) <= radius:
            blocks += _decompose_unipotent(Y, 1.0, mult, tol)
        elif abs(value + 1) <= radius:
            blocks += _decompose_unipotent(Y, -1.0, mult, tol)
        elif value.imag > 0:
            blocks += _decompose_elliptic(Y, value / abs(value), mult, tol)
    if hyperbolic:
        form = BasicForm(FormKind.HYPERBOLIC_REST, size=hyperbolic)
        blocks.append((form, CaseTag(10)))
    return blocks


def _unit_circle_signature(X: np.ndarray, tol: Tolerances) -> list[tuple[complex, int, int]]:
    """(eigenvalue, multiplicity, nullity) for the unit-circle spectrum."""
    result = []
    for value, mult in cluster_eigenvalues(linalg.eigvals(X), tol.tol_cluster):
        if on_circle(value, tol.tol_circle):
            omega = value / abs(value)
            nullity = kernel_basis(X - omega * np.eye(X.shape[0]), tol.tol_rank).shape[1]
            result.append((complex(omega), mult, nullity))
    return sorted(result, key=lambda item: (round(item[0].real, 6), round(item[0].imag, 6)))


def decompose(
    M: np.ndarray,
    P: np.ndarray,
    tol: Tolerances | None = None,
) -> NormalFormDecomposition:
    """Decompose M P into classified basic-form blocks.

    Diamond-structured inputs are split along their coupled symplectic
    planes; each component is then split by eigenvalue cluster.

    Raises:
        DecompositionUnsupportedError: For spectra outside the supported patterns
    """
    tol = tol or DEFAULT_TOLERANCES
    X = np.asarray(M, dtype=float) @ np.asarray(P, dtype=float)
    blocks: list[tuple[BasicForm, CaseTag]] = []
    try:
        for planes in _plane_components(X, tol.tol_sp):
            blocks += _decompose_block(_restrict(X, planes), tol)
    except ClassificationError as e:
        raise DecompositionUnsupportedError(str(e)) from e

    decomposition = NormalFormDecomposition.from_blocks(blocks)
    decomposition.check_counts()

    expected = _unit_circle_signature(X, tol)
    rebuilt = _unit_circle_signature(decomposition.reconstruct(), tol)
    if len(expected) != len(rebuilt) or any(
        abs(a[0] - b[0]) > merge_radius(tol.tol_cluster) or a[1:] != b[1:]
        for a, b in zip(expected, rebuilt)
    ):
        raise DecompositionUnsupportedError(
            f"reconstruction changes the unit-circle data: {expected} vs {rebuilt}",
        )
    logger.debug(f"decomposed M P into cases {[t.case_id for t in decomposition.tags]}")
    return decomposition


def _match(omega: complex, point: complex, tol: float) -> bool:
    return abs(omega - point) <= tol


def splitting_numbers_table(
    tag: CaseTag,
    omega: complex,
    tol: float | None = None,
) -> SplittingPair:
    """Splitting numbers of a case block read from the case table.

    Raises:
        UnsupportedPointError: If omega is a spectrum point the table does not cover
    """
    omega = as_omega(omega)
    tol = DEFAULT_TOLERANCES.tol_cluster if tol is None else tol
    if tag.case_id == 10:
        return SplittingPair(0, 0, omega)
    points = tag.points()
    if not any(_match(omega, point, tol) for point in points):
        return SplittingPair(0, 0, omega)
    if tag.case_id in (1, 2, 4, 5, 8):
        return SplittingPair(1, 1, omega)
    if tag.case_id in (3, 6, 9):
        return SplittingPair(0, 0, omega)
    # Case 7: (0, 1) at exp(i theta), conjugate pair at exp(-i theta)
    if _match(omega, points[0], tol):
        return SplittingPair(0, 1, omega)
    if _match(omega, points[1], tol):
        return SplittingPair(1, 0, omega)
    raise UnsupportedPointError(f"no tabled splitting numbers for Case {tag.case_id} at {omega}")


def splitting_numbers_numeric(
    gamma: "SymplecticPath",
    omega: complex,
    P: np.ndarray,
    epsilon_schedule: list[float] | None = None,
    tol: Tolerances | None = None,
) -> SplittingPair:
    """Splitting numbers as the limits of i_{P, omega e^{+-i eps}} - i_{P, omega}.

    At a Jordan block M P - omega e^{+-i eps} is only about eps^2 away from
    singular, so the rank tolerance of the shifted evaluations shrinks with eps^2.

    Raises:
        ConvergenceError: If the last two schedule entries disagree
    """
    from pindex.index.crossing import index_crossing

    omega = as_omega(omega)
    schedule = list(epsilon_schedule or (1e-2, 1e-3, 1e-4))
    if any(b >= a for a, b in zip(schedule, schedule[1:])) or min(schedule) <= 0:
        raise ParameterError(f"epsilon schedule must be positive and decreasing: {schedule}")

    tol = tol or DEFAULT_TOLERANCES
    base = index_crossing(gamma, omega, P, tol=tol).i
    trace = []
    for eps in schedule:
        shifted = replace(tol, tol_rank=min(tol.tol_rank, RANK_MARGIN * eps**2))
        plus = index_crossing(gamma, omega * np.exp(1j * eps), P, tol=shifted).i - base
        minus = index_crossing(gamma, omega * np.exp(-1j * eps), P, tol=shifted).i - base
        trace.append((eps, plus, minus))
        logger.debug(f"splitting at eps={eps:.1e}: S+={plus}, S-={minus}")
    if len(trace) >= 2 and trace[-1][1:] != trace[-2][1:]:
        raise ConvergenceError(
            f"splitting numbers at {omega} did not stabilize along {schedule}",
            trace=trace,
        )
    return SplittingPair(trace[-1][1], trace[-1][2], omega)


@dataclass
class IndexProfile:
    """i_{P,omega} and nu_{P,omega} along the unit circle.

    Built from i_{P,1} and the per-block splitting numbers: moving
    counter-clockwise, the index drops by S- on reaching a spectrum point
    and rises by S+ on leaving it.
    """

    i1: int
    tags: list[CaseTag]
    tol: float = 1e-9

    def _jumps(self) -> list[tuple[float, int, int, int]]:
        """(angle in [0, 2 pi), S+, S-, nu) per spectrum point, merged."""
        merged: dict[float, list[int]] = {}
        for tag in self.tags:
            if tag.case_id == 10:
                continue
            seen = set()
            for point in tag.points():
                angle = float(np.mod(np.angle(point), 2 * np.pi))
                key = next((a for a in merged if _angle_close(a, angle, self.tol)), angle)
                if key in seen:
                    continue
                seen.add(key)
                pair = splitting_numbers_table(tag, point, tol=1e-6)
                entry = merged.setdefault(key, [0, 0, 0])
                entry[0] += pair.s_plus
                entry[1] += pair.s_minus
                entry[2] += tag.nullity_at(point, tol=1e-6)
        return sorted((a, *values) for a, values in merged.items())

    def at(self, omega: complex) -> tuple[int, int]:
        """Return (i, nu) at omega."""
        omega = as_omega(omega)
        target = float(np.mod(np.angle(omega), 2 * np.pi))
        jumps = self._jumps()
        index = self.i1
        nullity = 0
        # the point 1 itself carries i1; leaving it adds its S+
        for angle, s_plus, s_minus, nu in jumps:
            if _angle_close(angle, 0.0, self.tol):
                if _angle_close(target, 0.0, self.tol):
                    return index, nu
                index += s_plus
        for angle, s_plus, s_minus, nu in jumps:
            if _angle_close(angle, 0.0, self.tol):
                continue
            if _angle_close(target, angle, self.tol):
                return index - s_minus, nu
            if angle < target:
                index += s_plus - s_minus
        if _angle_close(target, 0.0, self.tol):
            return self.i1, nullity
        return index, nullity


def _angle_close(a: float, b: float, tol: float) -> bool:
    diff = abs(a - b) % (2 * np.pi)
    return min(diff, 2 * np.pi - diff) <= 2 * np.pi * tol


def index_profile(i1: int, blocks: list[CaseTag], tol: float = 1e-9) -> IndexProfile:
    """Build the index profile of a path with i_{P,1} = i1 whose M P has the given blocks."""
    return IndexProfile(i1=i1, tags=list(blocks), tol=tol)
