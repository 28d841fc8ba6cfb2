"""Quantum state tomography with equidistant-state POVMs in odd dimensions."""

from .circulant import CirculantSystem, build_system, dft, idft, inverse_first_row, solve
from .density import (
    DensityMatrix,
    fidelity,
    maximally_mixed,
    nearest_physical,
    pure_density,
    random_density,
    trace_distance,
)
from .equidistant import (
    EquidistantConfig,
    Spectrum,
    StateSet,
    build_state_set,
    max_inner_product_modulus,
    povm_completeness_defect,
    sic_check,
    spectrum,
)
from .errors import *  # noqa: F401,F403
from .measurement import (
    CountTable,
    ProbabilityTable,
    born_probabilities,
    born_probabilities_via_expansion,
    estimate_probabilities,
    sample_counts,
)
from .tomography import (
    FourierTable,
    ReconstructionReport,
    closed_form_reconstruct,
    diagonal_system,
    even_dim_defect,
    fourier_transform_probabilities,
    reconstruct,
)

__version__ = "0.1.0"
