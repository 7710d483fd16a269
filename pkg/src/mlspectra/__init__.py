"""Multilinear singular values: spectra, feasibility, constructions and Horn checks."""
from .construct import (
    ConstructionWeights,
    InfeasiblePrescription,
    base_tensor_N,
    base_tensors_3,
    construct_2x2x2,
    construct_3,
    construct_N,
    scaled_allorthonormal_234,
    vertex_set_V,
    weights_3,
    weights_N,
)
from .feasibility import (
    FeasibilityReport,
    Prescription,
    Verdict,
    assess,
    check_necessary_3,
    check_necessary_N,
    check_sufficient_3,
    check_sufficient_N_cubic,
    polytope_vertices,
    special_point_rules,
    verify_thm4_chain,
)
from .horn import (
    DegenerateData,
    HornTriple,
    check_horn,
    check_thm7_spectra,
    degenerate_construct,
    generate_T,
    lemma9_verify,
    thm6_decompose_verify,
    weyl_check,
)
from .spectra import (
    ModeSpectrum,
    hermitian_eig,
    is_all_orthogonal,
    largest_ml_singular_values,
    lemma6_check,
    mlsvd,
    mode_singular_values,
)
from .tensor import fold, frobenius_norm, kron, mode_n_product, reshape_third_order, unfold

__version__ = "0.1.0"
