import logging
from typing import Callable, List, Sequence, Tuple

import numpy as np

import config
from errors import ConvergenceError
from models.polynomial import Polynomial

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


def horner_evaluator(coefficients: Sequence[complex]) -> Evaluator:
    """Vectorized (p(z), p'(z)) for complex coefficients, lowest degree first."""
    coeffs = np.asarray(coefficients, dtype=complex)

    def evaluate(z: np.ndarray):
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        for c in coeffs[::-1]:
            dp = dp * z + p
            p = p * z + c
        return p, dp

    return evaluate


def root_radius(coefficients: Sequence[complex]) -> float:
    """Fujiwara-style bound on the moduli of all roots."""
    coeffs = np.asarray(coefficients, dtype=complex)
    n = len(coeffs) - 1
    lead = abs(coeffs[-1])
    bound = 0.0
    for k in range(n):
        if coeffs[k] != 0:
            bound = max(bound, (abs(coeffs[k]) / lead) ** (1.0 / (n - k)))
    return 2.0 * bound if bound > 0 else 1.0


def newton_polish(evaluate: Evaluator, z: np.ndarray, steps: int = config.NEWTON_POLISH_STEPS) -> np.ndarray:
    """Safeguarded Newton steps on each root; a step is kept only if |p| drops."""
    z = np.array(z, dtype=complex)
    p, dp = evaluate(z)
    for _ in range(steps):
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = z - p / dp
        trial = np.where(np.isfinite(trial), trial, z)
        p_trial, dp_trial = evaluate(trial)
        better = np.abs(p_trial) < np.abs(p)
        if not better.any():
            break
        z = np.where(better, trial, z)
        p = np.where(better, p_trial, p)
        dp = np.where(better, dp_trial, dp)
    return z


def aberth(evaluate: Evaluator, degree: int, radius: float,
           known: Sequence[Tuple[complex, int]] = (),
           max_iter: int = config.ABERTH_MAX_ITER,
           tol: float = config.ABERTH_TOL) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration for `degree` unknown roots.

    `known` lists (root, multiplicity) pairs that are already certified; they
    enter the correction sum as frozen roots so the iteration never returns
    to them.
    """
    if degree <= 0:
        return np.zeros(0, dtype=complex)
    k = np.arange(degree)
    z = radius * np.exp(1j * (2 * np.pi * k / degree + 0.4))
    known_pts = np.array([w for w, _ in known], dtype=complex)
    known_mult = np.array([m for _, m in known], dtype=float)

    best = np.inf
    since_best = 0
    for it in range(max_iter):
        p, dp = evaluate(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            if len(known_pts):
                s = s + (known_mult[None, :] / (z[:, None] - known_pts[None, :])).sum(axis=1)
            ratio = p / dp
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        if bad.any():
            # Pull runaway or stuck iterates back toward the root disk.
            step = np.where(bad, z * 0.25 + 1e-3, step)
        z = z - step
        converged = np.abs(step) <= tol * (1.0 + np.abs(z))
        if converged.all():
            logger.debug(f"Aberth converged for degree {degree} after {it + 1} iterations")
            return z
        # Clustered roots stall at rounding level instead of meeting tol.
        worst = float(np.max(np.abs(step) / (1.0 + np.abs(z))))
        if worst < 0.5 * best:
            best, since_best = worst, 0
        else:
            since_best += 1
        if since_best > 25 and worst < 1e-5:
            logger.debug(f"Aberth stalled at relative step {worst:.1e} for degree {degree}; polishing")
            return newton_polish(evaluate, z)
    residual = np.abs(evaluate(z)[0])
    logger.error(f"Aberth failed for degree {degree}; worst residual {residual.max():.3e}")
    raise ConvergenceError(f"Root finder did not converge for degree {degree}",
                           iterations=max_iter, partial=z)


def companion_roots(coefficients: Sequence[complex]) -> np.ndarray:
    """Eigenvalues of the companion matrix, coefficients lowest degree first."""
    coef = np.asarray(coefficients, dtype=complex)
    a = np.diag(np.ones(len(coef) - 2, dtype=complex), -1)
    a[0] = -(coef[:-1][::-1] / coef[-1])
    return np.linalg.eigvals(a)


def merge_clusters(roots: Sequence[complex], tol: float = config.ROOT_MERGE_TOL) -> List[Tuple[complex, int]]:
    """Group roots closer than tol; each group becomes (centroid, multiplicity)."""
    groups: List[List[complex]] = []
    for r in sorted(roots, key=lambda w: (round(w.real, 9), round(w.imag, 9))):
        for g in groups:
            if abs(np.mean(g) - r) < tol:
                g.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def polynomial_roots(poly: Polynomial) -> List[complex]:
    """All roots with multiplicity.

    Exact zero low-order coefficients are stripped as roots at the origin
    before the numerical solve.
    """
    zeros = 0
    while zeros < poly.degree and poly.coefficients[zeros] == 0:
        zeros += 1
    coeffs = [complex(c) for c in poly.coefficients[zeros:]]
    degree = len(coeffs) - 1
    found: List[complex] = [0j] * zeros
    if degree <= 0:
        return found
    if degree == 1:
        return found + [-coeffs[0] / coeffs[1]]
    try:
        found.extend(aberth(horner_evaluator(coeffs), degree, root_radius(coeffs)).tolist())
    except ConvergenceError as e:
        if degree > config.COMPANION_MAX_DEGREE:
            raise
        logger.warning(f"Falling back to companion matrix for degree {degree}: {e.detail}")
        found.extend(companion_roots(coeffs).tolist())
    return found
