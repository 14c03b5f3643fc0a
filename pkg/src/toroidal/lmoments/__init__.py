"""Central values of Dirichlet L-functions, moments and nonvanishing."""

from .hurwitz import hurwitz_zeta
from .lvalues import LValueTable, central_values, l_values_half, fe_phase_residual, pin_fe_phase
from .weights import v_weight
from .moments import afe_crosscheck, moment, moment_ladder
from .mollify import (
    certificate,
    minorant,
    mobius_log_sum,
    mollifier_values,
    mollified_moment,
    nonvanishing_count,
    q4_moment,
    trivial_solution_count,
)

__all__ = [
    "hurwitz_zeta", "LValueTable", "l_values_half", "central_values", "fe_phase_residual", "pin_fe_phase", "v_weight",
    "moment", "moment_ladder", "afe_crosscheck", "mollifier_values", "mollified_moment",
    "q4_moment", "nonvanishing_count", "certificate", "minorant", "trivial_solution_count",
    "mobius_log_sum",
]
