"""Least primitive roots via least prime-power non-residues, with the numerics
(Dickman rho, smooth-number counts, Jacobsthal function) and prime sweeps
needed to test the resulting exponent bounds at desk scale."""

__version__ = "0.1.0"

from .arith import FactoredInteger, factorize, is_prime, is_primitive_root, multiplicative_order, sieve_primes
from .constructor import (
    ConstructionTrace,
    Grouping,
    bound_exponent_main1,
    bound_exponent_main3,
    condition2_sum,
    construct_simultaneous_nonresidue,
    group_levels,
    lift_step,
    residue_profile,
    verify_remark2,
)
from .dickman import DickmanTable, rho, u_of
from .errors import CapacityError, ContractError, DomainError
from .residues import check_psi_lower_bound, is_dth_power_residue, least_power_nonresidue, psi_count
from .structure import (
    DlogContext,
    ResidueConstraintSet,
    crt_combine,
    discrete_log,
    jacobsthal_exact,
    least_primitive_root,
    min_avoiding,
)
from .survey import SurveyConfig, SurveyReport, run_survey
