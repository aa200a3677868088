"""Lyapunov one-forms for flows, computed on transition graphs.

A flow on a torus-like space is turned into a box-map graph; a cohomology
class ``xi`` becomes an edge cochain.  The package splits the chain
recurrent set into the part ``xi`` sees (``C_xi``) and the part it does not
(``R_xi``), checks the two conditions under which a Lyapunov one-form in the
class exists, and either builds one with an independently checkable
certificate or returns the violating closed walk.
"""

from . import kernels
from .conditions import (
    ConditionA,
    ConditionB,
    ConditionsReport,
    DriftCertificate,
    FriedReport,
    WalkWitness,
    analyze_conditions,
    check_c_xi_closed,
    check_condition_a,
    check_condition_b,
    drift_certificate,
    fried_check,
    necessity_check,
    validate_drift,
)
from .errors import (
    ChartCoverageError,
    EmptyInput,
    GraphMismatch,
    IntegrationDiverged,
    LyapformError,
    MapConstructionFailed,
    NotApplicable,
    NotASection,
    NotClosed,
    NotCohomologous,
    NoCycle,
    NotIntegral,
    SpecError,
    SynthesisContractViolated,
)
from .forms import (
    ClosedOneForm,
    Cochain1,
    CycleBasis,
    CycleVector,
    LinearForm,
    Potential0,
    coboundary,
    compute_scale,
    extend_form,
    line_integral,
    pairing,
    pull_back,
    walk_weight,
)
from .phase_space import BoxGrid, PhaseSpace, VectorFieldSpec, box_map, integrate
from .section import CircleMap, CrossSection, build_circle_map, extract_cross_section, is_integral
from .synthesis import LyapunovCertificate, Refusal, VerifyResult, pipeline, verify
from .transition import RecurrenceReport, TransitionGraph, chain_exists, reachable, scc_decompose
from .twisted import (
    SignClass,
    compute_r_xi,
    cycle_mean_range,
    lift_graph,
    period_lattice,
    zero_walk_vertices,
)

__version__ = "0.1.0"
