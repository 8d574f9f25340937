"""Process-wide numerical tolerances.

All tolerances live in one frozen record so that every module checks the
same thresholds. Replace ``TOL`` (or call :func:`set_tolerances`) to change
them; functions never take per-call tolerance overrides.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    symmetry_ingest: float = 1e-8  # max |A - A^T| accepted before symmetrizing
    symmetry: float = 1e-12
    row_sum: float = 1e-10
    eigen: float = 1e-9
    triangle: float = 1e-9
    mazur_norm: float = 1e-12
    evaluation_budget: int = 10**7
    cube_max_n: int = 14
    jacobi_max_n: int = 64  # larger matrices go to LAPACK


TOL = Tolerances()


def set_tolerances(**changes) -> Tolerances:
    global TOL
    TOL = replace(TOL, **changes)
    return TOL


def get_tolerances() -> Tolerances:
    return TOL
