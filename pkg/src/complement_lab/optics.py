"""Single-photon mode networks: beam splitters, mirrors and phase shifters.

States live in the one-photon sector, a vector of amplitudes over labelled
path modes. Conventions, fixed once for every scene:

* beam splitter of reflectivity ``r`` on modes ``(a, b)``: block
  ``[[t, i*s], [i*s, t]]`` with ``t = sqrt(1 - r)``, ``s = sqrt(r)``
  (transmission real, reflection picks up a factor ``i``);
* mirror: a factor ``i`` on its mode;
* phase shifter: ``exp(i*phi)`` on its mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Sequence, Union

import numpy as np

from .hilbert import (
    DimensionMismatch,
    Projector,
    QuantumState,
    expectation,
    meet,
    orthocomplement,
)
from .tolerances import Tolerances, resolve

__all__ = [
    "BeamSplitter",
    "BiprismScene",
    "CustomUnitary",
    "Element",
    "Mirror",
    "NonOrthogonalDetectors",
    "OpticalScene",
    "PhaseShifter",
    "anticoincidence",
    "build_biprism",
    "build_double_slit",
    "build_rangwala_roy",
    "detection_probabilities",
    "element_unitary",
    "propagate",
]


class NonOrthogonalDetectors(ValueError):
    pass


@dataclass(frozen=True)
class BeamSplitter:
    reflectivity: float
    modes: tuple[int, int]
    name: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ValueError(f"reflectivity {self.reflectivity} outside [0, 1]")
        a, b = self.modes
        if a == b:
            raise ValueError("beam splitter needs two distinct modes")


@dataclass(frozen=True)
class PhaseShifter:
    phi: float
    mode: int
    name: str = ""
    # swept shifters take their phase from OpticalScene.at_phase
    sweep: bool = False


@dataclass(frozen=True)
class Mirror:
    mode: int
    name: str = ""


@dataclass(frozen=True, eq=False)
class CustomUnitary:
    matrix: np.ndarray
    name: str = ""


Element = Union[BeamSplitter, PhaseShifter, Mirror, CustomUnitary]


def _check_mode(mode: int, dim: int) -> None:
    if not 0 <= mode < dim:
        raise ValueError(f"mode {mode} out of range for {dim} modes")


def element_unitary(e: Element, dim: int) -> np.ndarray:
    """The dim x dim unitary of one element, identity outside the modes it touches."""
    u = np.eye(dim, dtype=complex)
    if isinstance(e, BeamSplitter):
        a, b = e.modes
        _check_mode(a, dim)
        _check_mode(b, dim)
        t, s = math.sqrt(1.0 - e.reflectivity), math.sqrt(e.reflectivity)
        u[a, a] = u[b, b] = t
        u[a, b] = u[b, a] = 1j * s
    elif isinstance(e, PhaseShifter):
        _check_mode(e.mode, dim)
        u[e.mode, e.mode] = np.exp(1j * e.phi)
    elif isinstance(e, Mirror):
        _check_mode(e.mode, dim)
        u[e.mode, e.mode] = 1j
    elif isinstance(e, CustomUnitary):
        m = np.asarray(e.matrix, dtype=complex)
        if m.shape != (dim, dim):
            raise DimensionMismatch(f"custom unitary has shape {m.shape}, scene has {dim} modes")
        u = m.copy()
    else:
        raise TypeError(f"unknown optical element {e!r}")
    return u


@dataclass(frozen=True)
class OpticalScene:
    """Labelled modes, an ordered element list, an input state and detectors.

    Detector projectors must be mutually orthogonal. If they do not add up to
    the identity the remainder is added as a detector named ``"loss"``.
    """

    mode_labels: tuple[str, ...]
    elements: tuple[Element, ...]
    input_state: QuantumState
    named_projectors: Mapping[str, Projector] = field(default_factory=dict)
    detectors: Mapping[str, Projector] = field(default_factory=dict)

    def __post_init__(self) -> None:
        dim = len(self.mode_labels)
        object.__setattr__(self, "mode_labels", tuple(self.mode_labels))
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.input_state.dim != dim:
            raise DimensionMismatch(f"input state has dim {self.input_state.dim}, scene has {dim} modes")
        for e in self.elements:
            u = element_unitary(e, dim)
            if np.max(np.abs(u.conj().T @ u - np.eye(dim))) > 1e-10:
                raise ValueError(f"element {e.name or e!r} is not unitary")
        for name, p in {**self.named_projectors, **self.detectors}.items():
            if p.dim != dim:
                raise DimensionMismatch(f"projector {name!r} has dim {p.dim}, scene has {dim} modes")
        dets = dict(self.detectors)
        names = list(dets)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                if np.max(np.abs(dets[a].matrix @ dets[b].matrix)) > 1e-10:
                    raise NonOrthogonalDetectors(f"detectors {a!r} and {b!r} overlap")
        if dets:
            covered = Projector.from_orthonormal(np.hstack([p.basis for p in dets.values()]), dim)
            if covered.rank < dim:
                if "loss" in dets:
                    raise ValueError("detectors named 'loss' must complete the identity")
                dets["loss"] = orthocomplement(covered)
        object.__setattr__(self, "named_projectors", MappingProxyType(dict(self.named_projectors)))
        object.__setattr__(self, "detectors", MappingProxyType(dets))

    @property
    def dim(self) -> int:
        return len(self.mode_labels)

    @property
    def has_sweep(self) -> bool:
        return any(isinstance(e, PhaseShifter) and e.sweep for e in self.elements)

    def at_phase(self, phi: float) -> OpticalScene:
        """Copy with every swept phase shifter set to ``phi``."""
        elements = tuple(
            replace(e, phi=float(phi)) if isinstance(e, PhaseShifter) and e.sweep else e for e in self.elements
        )
        return replace(self, elements=elements, detectors={k: v for k, v in self.detectors.items() if k != "loss"})

    def mode_projector(self, label: str) -> Projector:
        v = np.zeros(self.dim)
        v[self.mode_labels.index(label)] = 1.0
        return Projector.from_orthonormal(v)


def propagate(scene: OpticalScene, stop: int | None = None) -> QuantumState:
    """Apply ``scene.elements[:stop]`` to the input state, in order."""
    state = scene.input_state
    for e in scene.elements[:stop]:
        state = state.evolve(element_unitary(e, scene.dim))
    return state


def detection_probabilities(scene: OpticalScene, tol: Tolerances | None = None) -> dict[str, float]:
    """Probability of a click at each detector for the propagated state."""
    out = propagate(scene)
    return {name: expectation(out, p, tol) for name, p in scene.detectors.items()}


def anticoincidence(scene: OpticalScene, d1: str, d2: str, tol: Tolerances | None = None) -> float:
    """Joint detection probability at two detectors for a single photon.

    This is the expectation of the meet of the two detector projectors,
    which vanishes for distinct (orthogonal) detectors. Naming the same
    detector twice returns its own click probability.
    """
    tol = resolve(tol)
    p, q = scene.detectors[d1], scene.detectors[d2]
    if d1 != d2 and np.max(np.abs(p.matrix @ q.matrix)) > 1e-10:
        raise NonOrthogonalDetectors(f"detectors {d1!r} and {d2!r} are not orthogonal")
    return expectation(propagate(scene), meet(p, q, tol), tol)


RR_MODES = ("Ψ_r", "Ψ_tr", "Ψ_tt")


def build_rangwala_roy(phi: float = 0.0) -> OpticalScene:
    """Three-path interferometer with a which-arm detector.

    The photon enters along Ψ_tt. BS1 sends the reflected part to D_r; BS2
    splits the rest into Ψ_tr and Ψ_tt, which mirrors M1, M2 bring to BS3
    and the detectors D_t1 (Ψ_tr port) and D_t2 (Ψ_tt port). The swept
    phase ``phi`` sits on the Ψ_tr arm before BS3.
    """
    r, tr, tt = range(3)
    elements = (
        BeamSplitter(0.5, (tt, r), "BS1"),
        BeamSplitter(0.5, (tt, tr), "BS2"),
        Mirror(tr, "M1"),
        Mirror(tt, "M2"),
        PhaseShifter(float(phi), tr, "phase", sweep=True),
        BeamSplitter(0.5, (tr, tt), "BS3"),
    )
    e = np.eye(3)
    named = {
        "path_r": Projector.onto(e[r]),
        "path_t1t2": Projector.onto(e[tr]) + Projector.onto(e[tt]),
        "interf_plus": Projector.onto((e[tt] + e[tr]) / math.sqrt(2)),
        "interf_minus": Projector.onto((e[tt] - e[tr]) / math.sqrt(2)),
    }
    detectors = {
        "D_r": Projector.onto(e[r]),
        "D_t1": Projector.onto(e[tr]),
        "D_t2": Projector.onto(e[tt]),
    }
    return OpticalScene(RR_MODES, elements, QuantumState.basis(3, tt), named, detectors)


def build_double_slit(phi: float = 0.0) -> OpticalScene:
    """Two-path (Mach-Zehnder) analogue of the double slit: two modes suffice."""
    e = np.eye(2)
    elements = (
        BeamSplitter(0.5, (0, 1), "split"),
        PhaseShifter(float(phi), 1, "phase", sweep=True),
        BeamSplitter(0.5, (0, 1), "recombine"),
    )
    named = {
        "path_1": Projector.onto(e[0]),
        "path_2": Projector.onto(e[1]),
        "interf_plus": Projector.onto((e[0] + e[1]) / math.sqrt(2)),
        "interf_minus": Projector.onto((e[0] - e[1]) / math.sqrt(2)),
    }
    detectors = {"D_1": Projector.onto(e[0]), "D_2": Projector.onto(e[1])}
    return OpticalScene(("slit_1", "slit_2"), elements, QuantumState.basis(2, 0), named, detectors)


@dataclass(frozen=True)
class BiprismScene:
    """H = H_r ⊕ H_t truncated to ``dim_r + dim_t`` dimensions.

    ``P_wave`` (tunnelling) projects onto the first ``wave_rank`` coordinates
    of the transmitted block, so it always lies below ``P_t``.
    """

    dim_r: int
    dim_t: int
    wave_rank: int
    P_r: Projector
    P_t: Projector
    P_wave: Projector
    state: QuantumState
    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        d = self.dim_r + self.dim_t
        if np.max(np.abs(self.P_r.matrix @ self.P_t.matrix)) > 1e-10:
            raise ValueError("P_r and P_t must be orthogonal")
        if np.max(np.abs(self.P_r.matrix + self.P_t.matrix - np.eye(d))) > 1e-10:
            raise ValueError("P_r + P_t must be the identity")
        if np.max(np.abs(self.P_t.matrix @ self.P_wave.matrix - self.P_wave.matrix)) > 1e-10:
            raise ValueError("P_wave must lie below P_t")

    @property
    def dim(self) -> int:
        return self.dim_r + self.dim_t

    def state_outside_wave(self) -> QuantumState:
        """A transmitted state orthogonal to P_wave (needs wave_rank < dim_t)."""
        if self.wave_rank >= self.dim_t:
            raise ValueError("P_wave = P_t: no transmitted state lies outside the wave subspace")
        return QuantumState.basis(self.dim, self.dim_r + self.wave_rank)

    def as_optical_scene(self) -> OpticalScene:
        labels = tuple(f"r{i}" for i in range(self.dim_r)) + tuple(f"t{i}" for i in range(self.dim_t))
        named = {"P_r": self.P_r, "P_t": self.P_t, "P_wave": self.P_wave}
        return OpticalScene(labels, (), self.state, named, {"D_r": self.P_r, "D_t": self.P_t})


def build_biprism(
    dim_r: int = 4,
    dim_t: int = 4,
    wave_rank: int = 2,
    alpha: complex = 1 / math.sqrt(2),
    beta: complex = 1 / math.sqrt(2),
    tol: Tolerances | None = None,
) -> BiprismScene:
    """Biprism scene with output state alpha * Ψ_r + beta * Ψ_t.

    Ψ_r is the first reflected coordinate and Ψ_t the first transmitted one,
    which lies in the range of P_wave. ``wave_rank == dim_t`` gives
    P_wave = P_t.
    """
    tol = resolve(tol)
    if dim_r < 1 or dim_t < 1:
        raise ValueError("dim_r and dim_t must be at least 1")
    if not 1 <= wave_rank <= dim_t:
        raise ValueError(f"wave_rank must be in [1, {dim_t}], got {wave_rank}")
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > tol.norm:
        raise ValueError(f"|alpha|^2 + |beta|^2 = {abs(alpha) ** 2 + abs(beta) ** 2!r}, not 1")
    d = dim_r + dim_t
    eye = np.eye(d)
    p_r = Projector.from_orthonormal(eye[:, :dim_r], d)
    p_t = Projector.from_orthonormal(eye[:, dim_r:], d)
    p_wave = Projector.from_orthonormal(eye[:, dim_r : dim_r + wave_rank], d)
    psi = np.zeros(d, dtype=complex)
    psi[0] = alpha
    psi[dim_r] = beta
    return BiprismScene(dim_r, dim_t, wave_rank, p_r, p_t, p_wave, QuantumState.pure(psi, normalize=True), alpha, beta)


def sweep(scene: OpticalScene, phis: Sequence[float], tol: Tolerances | None = None) -> list[dict[str, float]]:
    """Detector probabilities at each phase, in the given order."""
    return [detection_probabilities(scene.at_phase(phi), tol) for phi in phis]
