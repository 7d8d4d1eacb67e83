"""Generation and manipulation of symplectic paths.

Fundamental solutions are integrated with a fourth-order Magnus step
followed by a first-order symplectic correction. Symmetric iterates use
gamma(t + kT) = P^k gamma(t) P^k gamma(kT).
"""

import logging

import numpy as np
from scipy import linalg

from pindex.config import DEFAULT_TOLERANCES, Tolerances
from pindex.core.symplectic import half_dim, standard_J, symplectic_defect
from pindex.errors import ConcatenationError, IntegrationError, ParameterError
from pindex.paths.path import CoefficientFunction, SymplecticPath, magnus_step

logger = logging.getLogger(__name__)

#: Maximum number of step doublings before giving up.
MAX_REFINEMENTS = 8

#: Symplectic defect allowed at the end of an integration.
DEFECT_BOUND = 1e-8


def symplectic_projection(M: np.ndarray, iterations: int = 2) -> np.ndarray:
    """Pull a nearly symplectic M back toward Sp(2n).

    Each pass replaces M by M (I - (E - I) / 2) with E = -J M^T J M, which
    removes the first-order defect.
    """
    J = standard_J(half_dim(M))
    eye = np.eye(M.shape[0])
    for _ in range(iterations):
        E = -J @ M.T @ J @ M
        M = M @ (eye - 0.5 * (E - eye))
    return M


def _integrate(coeff: CoefficientFunction, steps: int, T: float) -> tuple[np.ndarray, np.ndarray]:
    times = np.linspace(0.0, T, steps + 1)
    size = coeff(0.0).shape[0]
    matrices = np.empty((steps + 1, size, size))
    matrices[0] = np.eye(size)
    h = T / steps
    for k in range(steps):
        step = magnus_step(coeff, times[k], h)
        matrices[k + 1] = symplectic_projection(step @ matrices[k])
    return times, matrices


def integrate_fundamental(
    coeff: CoefficientFunction,
    steps: int | None = None,
    tol: Tolerances | None = None,
    t_end: float | None = None,
) -> SymplecticPath:
    """Solve gamma' = J A(t) gamma, gamma(0) = I on [0, T].

    Steps are doubled until consecutive samples differ by at most
    ``step_bound``.

    Args:
        coeff: The coefficient function
        steps: Initial number of steps (at least ``min_steps``)
        tol: Tolerances of the run
        t_end: End time; the coefficient's half period by default

    Returns:
        The sampled path, carrying ``coeff`` as its generator

    Raises:
        IntegrationError: If the step bound or defect bound cannot be met
    """
    tol = tol or DEFAULT_TOLERANCES
    T = coeff.half_period if t_end is None else float(t_end)
    if T <= 0:
        raise ParameterError(f"integration interval must be positive, got {T}")
    steps = max(int(steps or 0), tol.min_steps)

    for _ in range(MAX_REFINEMENTS):
        times, matrices = _integrate(coeff, steps, T)
        jump = float(np.max(np.abs(np.diff(matrices, axis=0))))
        if jump <= tol.step_bound:
            break
        logger.debug(f"max sample jump {jump:.3e} with {steps} steps, refining")
        steps *= 2
    else:
        raise IntegrationError(f"step bound {tol.step_bound} not met with {steps} steps")

    scale = max(1.0, float(np.max(np.abs(matrices[-1]))) ** 2)
    defect = symplectic_defect(matrices[-1])
    if defect > DEFECT_BOUND * scale:
        raise IntegrationError(f"symplectic defect {defect:.3e} exceeds {DEFECT_BOUND:.0e}")
    return SymplecticPath(times=times, matrices=matrices, generator=coeff)


def constant_path(A: np.ndarray, T: float, samples: int | None = None) -> SymplecticPath:
    """Path gamma(t) = exp(t J A) on [0, T] with exact evaluation."""
    A = np.asarray(A, dtype=float)
    JA = standard_J(half_dim(A)) @ A
    norm = float(np.linalg.norm(JA, 2))
    if samples is None:
        samples = max(DEFAULT_TOLERANCES.min_steps, int(np.ceil(T * norm / DEFAULT_TOLERANCES.step_bound))) + 1
    times = np.linspace(0.0, T, samples)
    matrices = np.array([linalg.expm(t * JA) for t in times])
    return SymplecticPath(
        times=times,
        matrices=matrices,
        generator=CoefficientFunction.constant(A, T),
        evaluator=lambda t: linalg.expm(t * JA),
    )


def extend_by_symmetry(
    path: SymplecticPath,
    P: np.ndarray,
    m: int,
    tol: Tolerances | None = None,
) -> SymplecticPath:
    """Extend gamma on [0, T] to [0, mT] by gamma(t + T) = P gamma(t) P gamma(T).

    Raises:
        ParameterError: If m is not a positive integer
        SymmetryError: If a periodic coefficient violates A(t + T) = P A(t) P
    """
    tol = tol or DEFAULT_TOLERANCES
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m}")
    m = int(m)
    P = np.asarray(P, dtype=float)
    T = path.t_end

    base = path.generator
    if base is None:
        logger.debug("path has no generator; using the one recovered from samples")
        base = path.sampled_generator()
    elif base.periodic:
        base.check_symmetry(P, tol_sym=tol.tol_sym)

    # G[k] = gamma(kT)
    G = [np.eye(2 * path.n)]
    for k in range(m):
        Pk = np.linalg.matrix_power(P, k)
        G.append(Pk @ path.endpoint @ Pk @ G[k])

    times = [path.times]
    matrices = [path.matrices]
    for k in range(1, m):
        Pk = np.linalg.matrix_power(P, k)
        times.append(path.times[1:] + k * T)
        matrices.append(np.array([Pk @ M @ Pk @ G[k] for M in path.matrices[1:]]))

    def evaluator(t: float) -> np.ndarray:
        k = min(max(int(np.ceil(t / T - 1e-12)) - 1, 0), m - 1)
        Pk = np.linalg.matrix_power(P, k)
        return Pk @ path.at(t - k * T) @ Pk @ G[k]

    generator = CoefficientFunction(
        func=base,
        half_period=T,
        P=P,
        symmetry_checked=True,
    )
    return SymplecticPath(
        times=np.concatenate(times),
        matrices=np.concatenate(matrices),
        generator=generator,
        evaluator=evaluator,
    )


def xi_path(n: int, tau: float, samples: int = 33) -> SymplecticPath:
    """Reference path xi_n(t) = diag(2 - t/tau, 1/(2 - t/tau))^{<>n} on [0, tau]."""
    if n < 1 or tau <= 0:
        raise ParameterError(f"xi_path needs n >= 1 and tau > 0, got n={n}, tau={tau}")

    def value(t: float) -> np.ndarray:
        a = 2.0 - t / tau
        return np.diag(np.concatenate([np.full(n, a), np.full(n, 1.0 / a)]))

    def generator(t: float) -> np.ndarray:
        # xi' xi^{-1} = diag(d, -d) = J B
        d = -1.0 / (tau * (2.0 - t / tau))
        B = np.zeros((2 * n, 2 * n))
        B[:n, n:] = -d * np.eye(n)
        B[n:, :n] = -d * np.eye(n)
        return B

    times = np.linspace(0.0, tau, samples)
    return SymplecticPath(
        times=times,
        matrices=np.array([value(t) for t in times]),
        generator=CoefficientFunction(func=generator, half_period=tau),
        evaluator=value,
    )


def concatenate(
    first: SymplecticPath,
    second: SymplecticPath,
    tol: float = 1e-8,
) -> SymplecticPath:
    """Return first * second: run ``second`` on [0, T/2], then ``first`` on [T/2, T].

    T is the length of ``first``; ``second`` must end where ``first`` starts.

    Raises:
        ConcatenationError: If the junction values differ by more than ``tol``
    """
    mismatch = float(np.max(np.abs(second.endpoint - first.start)))
    if mismatch > tol:
        raise ConcatenationError(f"paths do not meet: junction mismatch {mismatch:.3e}")
    T = first.t_end
    half = T / 2
    s2 = second.t_end / half
    s1 = first.t_end / half

    times = np.concatenate([second.times / s2, half + first.times[1:] / s1])
    matrices = np.concatenate([second.matrices, first.matrices[1:]])

    def evaluator(t: float) -> np.ndarray:
        if t <= half:
            return second.at(t * s2)
        return first.at((t - half) * s1)

    generator = None
    if first.generator is not None and second.generator is not None:

        def joined(t: float) -> np.ndarray:
            if t <= half:
                return s2 * second.generator_at(t * s2)
            return s1 * first.generator_at((t - half) * s1)

        generator = CoefficientFunction(func=joined, half_period=T)
    return SymplecticPath(times=times, matrices=matrices, generator=generator, evaluator=evaluator)


def _unitary_log(U: np.ndarray, winding: int) -> np.ndarray:
    """Real skew logarithm of an orthogonal symplectic U, shifted by full turns."""
    n = half_dim(U)
    u = U[:n, :n] + 1j * U[n:, :n]
    T, Z = linalg.schur(u, output="complex")
    phases = np.angle(np.diag(T)) + 2 * np.pi * winding
    log_u = Z @ np.diag(1j * phases) @ Z.conj().T
    X, Y = log_u.real, log_u.imag
    return np.block([[X, -Y], [Y, X]])


def path_to(
    target: np.ndarray,
    T: float = 1.0,
    winding: int = 0,
    samples: int = 65,
) -> SymplecticPath:
    """Build a path from I to a symplectic ``target``.

    target = U S by polar factorization; the path is
    exp(t Y / T) exp(t Z / T) with Y = log U (plus ``winding`` full turns
    exp(2 pi J)) and Z = log S.
    """
    target = np.asarray(target, dtype=float)
    U, S = linalg.polar(target)
    values, vectors = linalg.eigh((S + S.T) / 2)
    Z = vectors @ np.diag(np.log(values)) @ vectors.T
    Y = _unitary_log(U, winding)
    J = standard_J(half_dim(target))

    def value(t: float) -> np.ndarray:
        return linalg.expm(t / T * Y) @ linalg.expm(t / T * Z)

    def generator(t: float) -> np.ndarray:
        R = linalg.expm(t / T * Y)
        B = -J @ (Y + R @ Z @ R.T) / T
        return (B + B.T) / 2

    times = np.linspace(0.0, T, samples)
    return SymplecticPath(
        times=times,
        matrices=np.array([value(t) for t in times]),
        generator=CoefficientFunction(func=generator, half_period=T),
        evaluator=value,
    )
