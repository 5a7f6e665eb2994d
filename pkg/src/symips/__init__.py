"""symips: exact symbolic toolkit for symmetric ideal-proof-system certificates.

The package generates families of unsatisfiable polynomial-equation systems
together with their symmetry groups, builds explicit certificate circuits for
them, and machine-checks certificates: the two substitution conditions,
selector-linearity, skewness, semantic degree, and per-generator symmetry
witnesses.  All arithmetic is exact (arbitrary-precision rationals or prime
fields); nothing is floating point.
"""

from .algebra import (
    GF2,
    QQ,
    FieldTag,
    Monomial,
    Polynomial,
    Variable,
    elementary_symmetric,
    poly_arith,
    prime_field,
)
from .circuit import (
    Budget,
    Circuit,
    CircuitBuilder,
    DegreeReport,
    SizeMetrics,
    check_skew,
    check_y_linear,
    degree,
    eval_point,
    eval_symbolic,
    inline,
    size_metrics,
)
from .constructions import (
    Certificate,
    Claims,
    build_cfi_linear,
    build_cfi_mu,
    build_php,
    build_subsetsum,
    symmetrize_average,
    symmetrize_product,
)
from .errors import (
    BudgetExceededError,
    CapExceededError,
    FieldMismatchError,
    InvarianceError,
    MalformedInputError,
    SymipsError,
)
from .instances import (
    GraphInput,
    Instance,
    brute_force_boolean_satisfiable,
    gen_cfi,
    gen_counterexample_f2,
    gen_php,
    gen_piso,
    gen_subset_sum,
    k4,
    make_instance,
    prism,
)
from .pc import (
    EpcProof,
    ExtensionAxiomSet,
    PcProof,
    check_pc_proof,
    check_sym_epc,
    epc_to_symipslin,
    pc_search_bounded_degree,
    pc_to_ipslin,
    skewize,
    sym_linear_certificate_search,
)
from .symmetry import (
    GroupPresentation,
    VariablePermutation,
    check_invariance,
    cycle_space_generators,
    group_elements,
    induce_y_action,
    orbit,
    search_automorphism,
    verify_witness,
)
from .verify import AuditReport, audit, verify_certificate

__version__ = "0.1.0"
