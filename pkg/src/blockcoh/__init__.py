"""Toolkit for block-structured coherence: partitions, free channels, dilations,
measures and operator-count bounds."""

from .blockcore import (
    BlockPartition,
    block_of_index,
    block_projectors,
    block_dephase,
    block_mask,
    diagonal_block_basis,
    offdiagonal_block_basis,
    is_block_incoherent,
    validate_density_matrix,
)
from .channels import (
    KrausSet,
    PbioSpec,
    PbioConstructionError,
    verify_cptp,
    cptp_deviation,
    apply_channel,
    apply_selective,
    block_pattern,
    is_bio_structural,
    is_sbio_structural,
    is_bio_semantic,
    is_sbio_semantic,
    is_mbio,
    build_pbio,
    gen_random,
    classifier_report,
)
from .counting import BoundReport, bio_bound, sbio_bound, rank_one_reduction_check
from .measures import (
    MeasureReport,
    von_neumann_entropy,
    rel_entropy_block_coherence,
    l1_block_coherence,
    monotonicity_probe,
    strong_monotonicity_probe,
    convexity_probe,
    probe_report,
)
from .naimark import (
    Povm,
    NaimarkExtension,
    measurement_operators,
    dilate,
    verify_dilation,
    induced_partition,
)

__version__ = "0.1.0"

__all__ = [
    "BlockPartition",
    "block_of_index",
    "block_projectors",
    "block_dephase",
    "block_mask",
    "diagonal_block_basis",
    "offdiagonal_block_basis",
    "is_block_incoherent",
    "validate_density_matrix",
    "KrausSet",
    "PbioSpec",
    "PbioConstructionError",
    "verify_cptp",
    "cptp_deviation",
    "apply_channel",
    "apply_selective",
    "block_pattern",
    "is_bio_structural",
    "is_sbio_structural",
    "is_bio_semantic",
    "is_sbio_semantic",
    "is_mbio",
    "build_pbio",
    "gen_random",
    "classifier_report",
    "BoundReport",
    "bio_bound",
    "sbio_bound",
    "rank_one_reduction_check",
    "MeasureReport",
    "von_neumann_entropy",
    "rel_entropy_block_coherence",
    "l1_block_coherence",
    "monotonicity_probe",
    "strong_monotonicity_probe",
    "convexity_probe",
    "probe_report",
    "Povm",
    "NaimarkExtension",
    "measurement_operators",
    "dilate",
    "verify_dilation",
    "induced_partition",
]
