"""Projection-lattice tools for deciding whether two quantum observables are
complementary, with single-photon interferometer scenes to apply them to."""

from .complementarity import (
    Commutation,
    Relation,
    Verdict,
    WitnessKind,
    WitnessRecord,
    classify,
    complementary_observables,
    complementary_pair,
    conditions_agree,
    probabilistic_check,
)
from .duality import DualityReport, TwoPathState, duality_measures, normalization_vs_duality, visibility_from_counts
from .hilbert import (
    Projector,
    QuantumState,
    commutes,
    expectation,
    join,
    meet,
    orthocomplement,
    projector_from_span,
)
from .optics import (
    BeamSplitter,
    BiprismScene,
    Mirror,
    OpticalScene,
    PhaseShifter,
    anticoincidence,
    build_biprism,
    build_rangwala_roy,
    detection_probabilities,
    element_unitary,
    propagate,
)
from .spectral import Observable, ValueSet, common_eigenvectors, decompose, spectral_projector
from .tolerances import Tolerances

__version__ = "0.1.0"
