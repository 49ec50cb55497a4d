"""Which-path predictability and fringe visibility for two-path states.

For a two-path state with amplitudes alpha, beta and coherence mu (the
damping of the off-diagonal density-matrix element),

    P = ||alpha|^2 - |beta|^2|,   V = 2 mu |alpha| |beta|,

so P^2 + V^2 = P^2 + mu^2 (1 - P^2) <= 1 with equality for pure states.

The biprism report computes the same quantities from the scene's path
projectors, and labels |alpha|^2 + |beta|^2 as a normalization: the
tunnelling projector lies below the transmitted-path projector, so the
"wave" weight |beta|^2 is also which-path weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import QuantumState, expectation
from .optics import BiprismScene
from .tolerances import Tolerances, resolve

__all__ = [
    "DegenerateFringe",
    "DualityReport",
    "TwoPathState",
    "duality_measures",
    "normalization_vs_duality",
    "visibility_from_counts",
]

CSV_COLUMNS = ("alpha2", "mu", "P", "V", "P2plusV2", "normalization", "wave_exp", "transmit_exp")


class DegenerateFringe(ValueError):
    """Visibility is undefined: every count is zero."""


@dataclass(frozen=True)
class TwoPathState:
    alpha: complex
    beta: complex
    coherence: float = 1.0

    def __post_init__(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > resolve(None).norm:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, not 1")
        if not 0.0 <= self.coherence <= 1.0:
            raise ValueError(f"coherence {self.coherence} outside [0, 1]")

    @classmethod
    def from_alpha2(cls, alpha2: float, mu: float = 1.0) -> TwoPathState:
        if not 0.0 <= alpha2 <= 1.0:
            raise ValueError(f"|alpha|^2 = {alpha2} outside [0, 1]")
        return cls(math.sqrt(alpha2), math.sqrt(1.0 - alpha2), mu)

    @classmethod
    def from_amplitudes(cls, a: complex, b: complex, mu: float = 1.0) -> TwoPathState:
        """Normalize two unnormalized branch amplitudes."""
        n = math.hypot(abs(a), abs(b))
        if n == 0:
            raise ValueError("both amplitudes are zero")
        return cls(a / n, b / n, mu)


@dataclass(frozen=True)
class DualityReport:
    alpha2: float
    mu: float
    predictability: float
    visibility: float
    sum_of_squares: float
    normalization: float
    wave_expectation: float
    transmit_expectation: float
    label: str = "duality"
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("predictability", "visibility"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name} {v} outside [0, 1]")

    @property
    def violates_bound(self) -> bool:
        # never true for a valid state; surfaced by the CLI rather than raised
        return self.sum_of_squares > 1 + 1e-10

    def row(self) -> tuple[float, ...]:
        return (
            self.alpha2,
            self.mu,
            self.predictability,
            self.visibility,
            self.sum_of_squares,
            self.normalization,
            self.wave_expectation,
            self.transmit_expectation,
        )


def duality_measures(s: TwoPathState) -> DualityReport:
    """Predictability, visibility and P^2 + V^2 for a two-path state.

    Wave and transmission expectations use the idealized identification in
    which the transmitted path and the wave property share one projector, so
    both equal |beta|^2.
    """
    a2, b2 = abs(s.alpha) ** 2, abs(s.beta) ** 2
    p = abs(a2 - b2)
    v = 2.0 * s.coherence * abs(s.alpha) * abs(s.beta)
    return DualityReport(
        alpha2=a2,
        mu=s.coherence,
        predictability=p,
        visibility=v,
        sum_of_squares=p * p + v * v,
        normalization=a2 + b2,
        wave_expectation=b2,
        transmit_expectation=b2,
    )


def normalization_vs_duality(
    scene: BiprismScene,
    state: QuantumState | None = None,
    tol: Tolerances | None = None,
) -> DualityReport:
    """Path, wave and transmission weights of a biprism state.

    ``normalization`` is <P_r> + <P_t>, which is 1 for every state. Because
    P_wave <= P_t, <P_wave> never exceeds <P_t>: the tunnelling weight is
    transmitted-path weight too, so the sum is a normalization and not a
    complementarity relation. The report is labelled accordingly.
    """
    tol = resolve(tol)
    state = scene.state if state is None else state
    pr = expectation(state, scene.P_r, tol)
    pt = expectation(state, scene.P_t, tol)
    pw = expectation(state, scene.P_wave, tol)
    # coherence between the two path blocks: trace norm of P_r rho P_t
    cross = scene.P_r.matrix @ state.density @ scene.P_t.matrix
    coh = float(np.sum(np.linalg.svd(cross, compute_uv=False)))
    p = abs(pr - pt)
    v = min(1.0, 2.0 * coh)
    mu = v / (2.0 * math.sqrt(pr * pt)) if pr * pt > 0 else 1.0
    notes = ["normalization, not complementarity"] if scene.P_wave <= scene.P_t else []
    if pw < pt - 1e-12:
        notes.append("state has transmitted weight outside the wave subspace")
    return DualityReport(
        alpha2=pr,
        mu=min(1.0, mu),
        predictability=p,
        visibility=v,
        sum_of_squares=p * p + v * v,
        normalization=pr + pt,
        wave_expectation=pw,
        transmit_expectation=pt,
        label="normalization",
        notes=tuple(notes),
    )


def visibility_from_counts(counts: Sequence[tuple[float, float]]) -> float:
    """Fringe visibility (max - min) / (max + min) of sampled ``(phi, count)`` pairs.

    Needs at least three samples covering a full period; an evenly spaced
    grid that omits the endpoint 2*pi counts as covering it.
    """
    if len(counts) < 3:
        raise ValueError("need at least 3 samples")
    phis = np.array([c[0] for c in counts], dtype=float)
    vals = np.array([c[1] for c in counts], dtype=float)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise ValueError("counts must be finite and non-negative")
    n = len(phis)
    span = float(np.ptp(phis))
    if span * n / (n - 1) < 2 * math.pi - 1e-3:
        raise ValueError(f"samples span {span:.4g} rad, less than one period")
    hi, lo = float(vals.max()), float(vals.min())
    if hi + lo == 0.0:
        raise DegenerateFringe("all counts are zero; visibility is undefined")
    return (hi - lo) / (hi + lo)
