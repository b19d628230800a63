"""Choice rules for vertical and horizontal reservations.

The package implements the two-step rules used for public positions in India
(SCI-AKG as restated and as originally written, 2SMG and 2SMH), the single
category rules they are built from, auditors for the axioms they are judged
by, and brute-force oracles used to cross-check all of it on small pools.
"""

from .core import (
    OPEN,
    Allocation,
    CategoryQuota,
    ContractError,
    Individual,
    Instance,
    InvariantError,
    ParseError,
    QuotaScheme,
    ReservationError,
    Selection,
    TraitMatching,
    ValidationError,
    load_instance,
    parse_applicants,
    parse_quotas,
)
from .matching import build_hr_graph, hr_utilization, increases_hr_utilization, max_trait_matching
from .rules import (
    OverlapError,
    akg_has,
    apply_rule,
    meritorious_horizontal,
    minimum_guarantee,
    sci_akg,
    sci_akg_original,
    two_step_meritorious_horizontal,
    two_step_minimum_guarantee,
)
from .axioms import full_audit

__all__ = [
    "OPEN", "Allocation", "CategoryQuota", "ContractError", "Individual", "Instance", "InvariantError",
    "ParseError", "QuotaScheme", "ReservationError", "Selection", "TraitMatching", "ValidationError",
    "load_instance", "parse_applicants", "parse_quotas", "build_hr_graph", "hr_utilization",
    "increases_hr_utilization", "max_trait_matching", "OverlapError", "akg_has", "apply_rule",
    "meritorious_horizontal", "minimum_guarantee", "sci_akg", "sci_akg_original",
    "two_step_meritorious_horizontal", "two_step_minimum_guarantee", "full_audit",
]
