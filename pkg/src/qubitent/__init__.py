"""Signed phase-space distributions, even-order Rényi entropy and the entropic reconstruction of the qubit."""
from .entropy import EntropyValue, RenyiOrder, check_reality, power_sum, renyi_entropy
from .exceptions import (NonIntegerOrderOnSigned, NotConverged, OrderTooLarge, OutOfCube,
                         QubitEntError, ShannonOnSigned)
from .maxent import MaxEntResult, max_entropy, max_entropy_order2_closed_form, solve_batch
from .phase_space import (BASIS, PhasePoint, SignedDistribution, character_transform,
                          inverse_character_transform, marginals)
from .probes import UnbiasednessProbe, check_unbiasedness_consistency, probe_beta
from .regions import (MembershipVerdict, RegionScan, in_ball, in_region, scan_slice,
                      verify_ball_equals_R2, verify_nesting)
from .representation import (EmpiricalModel, RepresentationFamily, build_family,
                             has_unsigned_member, member)

__version__ = "0.1.0"
