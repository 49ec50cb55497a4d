"""Builtin scenes, each expressed as a :class:`SceneFile`."""

from __future__ import annotations

import math

import numpy as np

from .optics import build_biprism, build_double_slit, build_rangwala_roy
from .scenefile import SceneFile, scene_to_spec

__all__ = ["BUILTINS", "builtin"]

# 64 evenly spaced phases over one period, endpoint excluded so that pi is sampled
FULL_TURN = f"0:{2 * math.pi * 63 / 64!r}:64"


def rangwala_roy(phi: float = 0.0) -> SceneFile:
    scene = build_rangwala_roy(phi)
    spec, matrices = scene_to_spec(scene)
    named = scene.named_projectors
    # path: 0 on Ψ_r, 1 on the transmitted plane; interference: ±1 on the
    # two output combinations, 0 on Ψ_r
    matrices["path"] = np.array(named["path_t1t2"].matrix)
    matrices["interference"] = named["interf_plus"].matrix - named["interf_minus"].matrix
    observables = {n: (n, None) for n in ("path_r", "path_t1t2", "interf_plus", "interf_minus", "path", "interference")}
    queries = [
        {"kind": "analyze", "pair": [a, b]}
        for a in ("path_r", "path_t1t2")
        for b in ("interf_plus", "interf_minus")
    ]
    queries.append({"kind": "analyze", "pair": ["path", "interference"]})
    queries.append({"kind": "simulate", "phi": FULL_TURN})
    return SceneFile(3, matrices, observables, spec, queries)


def double_slit(phi: float = 0.0) -> SceneFile:
    scene = build_double_slit(phi)
    spec, matrices = scene_to_spec(scene)
    named = scene.named_projectors
    matrices["path"] = named["path_1"].matrix - named["path_2"].matrix
    matrices["interference"] = named["interf_plus"].matrix - named["interf_minus"].matrix
    observables = {n: (n, None) for n in ("path_1", "path_2", "interf_plus", "interf_minus", "path", "interference")}
    queries = [
        {"kind": "analyze", "pair": ["path", "interference"]},
        {"kind": "simulate", "phi": FULL_TURN},
    ]
    return SceneFile(2, matrices, observables, spec, queries)


def biprism(dim_r: int = 4, dim_t: int = 4, wave_rank: int = 2, alpha2: float = 0.5) -> SceneFile:
    if not 0.0 <= alpha2 <= 1.0:
        raise ValueError(f"alpha2 must lie in [0, 1], got {alpha2}")
    b = build_biprism(dim_r, dim_t, wave_rank, math.sqrt(alpha2), math.sqrt(1.0 - alpha2))
    spec, matrices = scene_to_spec(b.as_optical_scene())
    observables = {"path_r": ("P_r", None), "path_t": ("P_t", None), "wave": ("P_wave", None)}
    queries = [
        {"kind": "analyze", "pair": ["path_r", "wave"]},
        {"kind": "analyze", "pair": ["path_t", "wave"]},
        {"kind": "simulate"},
    ]
    return SceneFile(b.dim, matrices, observables, spec, queries)


def qubit_zx() -> SceneFile:
    matrices = {
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
    }
    return SceneFile(2, matrices, {"Z": ("Z", None), "X": ("X", None)}, None, [{"kind": "analyze", "pair": ["Z", "X"]}])


BUILTINS = {
    "rangwala-roy": rangwala_roy,
    "biprism": biprism,
    "qubit-zx": qubit_zx,
    "double-slit": double_slit,
}


def builtin(name: str, **params) -> SceneFile:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None
    return factory(**params)
