"""Exact tools for quantitative Helly-type statements about axis-parallel
boxes restricted to finite point multisets."""

from .errors import (
    GenerationFailed,
    HalmanError,
    HypothesisViolated,
    MalformedInput,
    SelfCheckFailed,
    StructureViolated,
    UsageError,
)
from .geometry import Box, Instance, Interval, PointRecord, TieBreakKey, box_chain_intersect, project
from .traces import (
    CheckReport,
    TraceSet,
    Verdict,
    check_colorful_n_intersecting,
    check_pq_property,
    check_subfamily_n_intersecting,
    family_traces,
    trace,
    transversal_count,
)
from .solver import CoverProblem, SolveResult, solve_exact, tau, verify_cover
from .witness import (
    AxisSeq,
    EarlyExit,
    Relabeling,
    WitnessCertificate,
    build_Mprime,
    colorful_bound,
    enumerate_M,
    lemma_bound_transversal,
    relabel,
    select_extremal,
    verify_counting_inequality,
    witness_colorful,
    witness_monochromatic,
)
from .reduction import Reduction, corollary_pipeline, reduce
from .gallery import (
    gen_colorful_lower,
    gen_mono_lower,
    gen_pq_lower,
    gen_random_colorful,
    gen_random_mono,
    q_table,
)

__version__ = "0.1.0"

__all__ = [
    "AxisSeq",
    "Box",
    "box_chain_intersect",
    "build_Mprime",
    "check_colorful_n_intersecting",
    "check_pq_property",
    "check_subfamily_n_intersecting",
    "CheckReport",
    "colorful_bound",
    "corollary_pipeline",
    "CoverProblem",
    "EarlyExit",
    "enumerate_M",
    "family_traces",
    "gen_colorful_lower",
    "gen_mono_lower",
    "gen_pq_lower",
    "gen_random_colorful",
    "gen_random_mono",
    "GenerationFailed",
    "HalmanError",
    "HypothesisViolated",
    "Instance",
    "Interval",
    "lemma_bound_transversal",
    "MalformedInput",
    "PointRecord",
    "project",
    "q_table",
    "reduce",
    "Reduction",
    "relabel",
    "Relabeling",
    "select_extremal",
    "SelfCheckFailed",
    "solve_exact",
    "SolveResult",
    "StructureViolated",
    "tau",
    "TieBreakKey",
    "trace",
    "TraceSet",
    "transversal_count",
    "UsageError",
    "Verdict",
    "verify_counting_inequality",
    "verify_cover",
    "witness_colorful",
    "witness_monochromatic",
    "WitnessCertificate",
]
