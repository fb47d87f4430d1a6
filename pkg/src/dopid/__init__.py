"""Explicit partial information decomposition for three discrete variables."""
from .atoms import (
    PidResult,
    decompose,
    redundant_information,
    redundant_information_alt,
    synergistic_information,
    unique_information,
    unique_information_alt,
)
from .kernel import BACKEND
from .prob import (
    Alphabet,
    Dist1,
    JointDist2,
    JointDist3,
    SampleTable,
    conditional,
    estimate_from_samples,
    from_array,
    marginal,
    point_mass,
    product,
    validate,
)

__all__ = [
    "Alphabet",
    "BACKEND",
    "Dist1",
    "JointDist2",
    "JointDist3",
    "PidResult",
    "SampleTable",
    "conditional",
    "decompose",
    "estimate_from_samples",
    "from_array",
    "marginal",
    "point_mass",
    "product",
    "redundant_information",
    "redundant_information_alt",
    "synergistic_information",
    "unique_information",
    "unique_information_alt",
    "validate",
]
