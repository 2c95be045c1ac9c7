"""
Verification suites for the propagation term.

`verify_decoupling` compares the literal generalized cross product against the
closed form over random partial derivatives. `coupling_report` shows how a
careless choice of auxiliary vectors for a 3-D manifold in R^3 mixes the
partial derivatives into the virtual-coordinate entries.
"""

import logging
from typing import List, Sequence

import numpy as np
import sympy as sp

from gvf.field import bruteforce_from_partials, feasible_aux_vectors, orientation, propagation_from_partials
from linalg.core import as_matrix
from models.report import CouplingDraw, CouplingReport, DecouplingReport
from utils.errors import ConfigurationError, DecouplingMismatchError

logger = logging.getLogger(__name__)

# Two auxiliary vectors for n = m = 3 that do not decouple the last three entries.
INFEASIBLE_AUX = (
    np.array([1.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
    np.array([0.0, 0.0, 0.0, 0.0, 1.0, 1.0]),
)


def verify_decoupling(
    n_max: int,
    m_max: int,
    trials: int,
    seed: int = 0,
    partial_range: float = 5.0,
    tolerance: float = 1e-9,
    max_dimension: int = 10,
) -> DecouplingReport:
    """
    For every n <= n_max, m <= m_max and trial, draw partials uniformly in
    [-partial_range, partial_range] and check that the brute-force propagation
    term equals the closed form within `tolerance` (relative) and that its
    last m entries equal (-1)^n. Raises DecouplingMismatchError on the first
    failing instance.
    """
    if n_max < 1 or m_max < 1:
        raise ConfigurationError(f"Need n_max >= 1 and m_max >= 1, got n_max={n_max}, m_max={m_max}")
    if n_max + m_max > max_dimension:
        raise ConfigurationError(f"n_max + m_max must not exceed {max_dimension}, got {n_max + m_max}")
    if trials < 0:
        raise ConfigurationError(f"trials must be non-negative, got {trials}")

    rng = np.random.default_rng(seed)
    matrix: List[List[bool]] = []
    cases = 0
    worst = 0.0

    for n in range(1, n_max + 1):
        row = []
        sign = orientation(n)
        for m in range(1, m_max + 1):
            aux = feasible_aux_vectors(n, m)
            for trial in range(trials):
                partials = rng.uniform(-partial_range, partial_range, size=(n, m))
                brute = bruteforce_from_partials(partials, aux.vectors)
                closed = propagation_from_partials(partials)

                scale = max(1.0, float(np.max(np.abs(closed))))
                error = float(np.max(np.abs(brute - closed))) / scale
                worst = max(worst, error)
                cases += 1

                tail_exact = bool(np.all(closed[n:] == sign))
                tail_error = float(np.max(np.abs(brute[n:] - sign)))
                if error > tolerance or tail_error > tolerance or not tail_exact:
                    instance = {
                        "n": n,
                        "m": m,
                        "trial": trial,
                        "seed": seed,
                        "partials": partials.tolist(),
                        "bruteforce": brute.tolist(),
                        "closed_form": closed.tolist(),
                        "relative_error": error,
                    }
                    logger.error(f"Propagation terms disagree for n={n}, m={m}, trial {trial}: error {error:.3g}")
                    raise DecouplingMismatchError(
                        f"brute-force and closed-form propagation terms disagree for n={n}, m={m}", instance
                    )
            row.append(True)
        matrix.append(row)

    logger.info(f"Decoupling verified on {cases} instances, max relative error {worst:.3g}")
    return DecouplingReport(
        n_max=n_max,
        m_max=m_max,
        trials=trials,
        seed=seed,
        tolerance=tolerance,
        pass_matrix=matrix,
        cases=cases,
        max_relative_error=worst,
    )


def coupling_reference(partials) -> np.ndarray:
    """
    Last three propagation entries for INFEASIBLE_AUX as explicit expressions
    of the partials F[j, l] = df_(j+1)/dw_(l+1):

        F[0,2] - F[0,1] + F[1,2] - F[1,1],  F[0,0] + F[1,0],  -(F[0,0] + F[1,0])
    """
    f = as_matrix(partials, rows=3, cols=3, name="partials")
    column_sum = f[0, 0] + f[1, 0]
    return np.array([f[0, 2] - f[0, 1] + f[1, 2] - f[1, 1], column_sum, -column_sum])


# As commonly quoted; the last entry carries the wrong sign.
PUBLISHED_SYMBOLIC = ("f13 - f12 + f23 - f22", "f11 + f21", "f11 + f21")


def published_reference(partials) -> np.ndarray:
    """The published expressions for the same entries, with p6 = F[0,0] + F[1,0]."""
    f = as_matrix(partials, rows=3, cols=3, name="partials")
    column_sum = f[0, 0] + f[1, 0]
    return np.array([f[0, 2] - f[0, 1] + f[1, 2] - f[1, 1], column_sum, column_sum])


def symbolic_tail(aux: Sequence) -> List[sp.Expr]:
    """Last three propagation entries for n = m = 3 and the given auxiliary vectors, in symbols f_jl."""
    symbols = sp.Matrix(3, 3, lambda j, l: sp.Symbol(f"f{j + 1}{l + 1}"))
    rows = sp.Matrix.hstack(sp.eye(3), -symbols)
    for vector in aux:
        rows = rows.col_join(sp.Matrix([[sp.nsimplify(v) for v in vector]]))

    entries = []
    for column in range(3, 6):
        kept = [c for c in range(6) if c != column]
        entries.append(sp.expand((-1) ** column * rows[:, kept].det()))
    return entries


def _draw(partials: np.ndarray) -> CouplingDraw:
    feasible = feasible_aux_vectors(3, 3)
    return CouplingDraw(
        partials=partials.tolist(),
        infeasible=bruteforce_from_partials(partials, INFEASIBLE_AUX)[3:].tolist(),
        reference=coupling_reference(partials).tolist(),
        published=published_reference(partials).tolist(),
        feasible=bruteforce_from_partials(partials, feasible.vectors)[3:].tolist(),
    )


def coupling_report(draws: int = 20, seed: int = 0, partial_range: float = 5.0) -> CouplingReport:
    """Infeasible versus feasible auxiliary vectors on all-ones, all-zeros and random partials."""
    if draws < 0:
        raise ConfigurationError(f"draws must be non-negative, got {draws}")
    rng = np.random.default_rng(seed)
    spot_checks = [_draw(np.ones((3, 3))), _draw(np.zeros((3, 3)))]
    random_draws = [_draw(rng.uniform(-partial_range, partial_range, size=(3, 3))) for _ in range(draws)]

    def spread(attribute: str) -> List[float]:
        if not random_draws:
            return [0.0, 0.0, 0.0]
        values = np.array([getattr(draw, attribute) for draw in random_draws])
        return values.std(axis=0).tolist()

    return CouplingReport(
        symbolic=[str(entry) for entry in symbolic_tail(INFEASIBLE_AUX)],
        published_symbolic=list(PUBLISHED_SYMBOLIC),
        spot_checks=spot_checks,
        draws=random_draws,
        infeasible_std=spread("infeasible"),
        feasible_std=spread("feasible"),
    )
