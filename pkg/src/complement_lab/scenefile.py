"""Scene files: a JSON document bundling matrices, observables, an optional
optical network and a list of queries.

Layout (version 1)::

    {
      "version": 1,
      "dimension": 3,
      "matrices": {"name": [[[re, im], ...], ...]},        # row-major rows
      "observables": {"A": {"matrix": "name", "cluster_tol": null}},
      "scene": {
        "modes": ["Ψ_r", "Ψ_tr", "Ψ_tt"],
        "input": [[re, im], ...],
        "elements": [
          {"kind": "beam_splitter", "reflectivity": 0.5, "modes": [2, 0], "name": "BS1"},
          {"kind": "phase_shifter", "phi": 0.0, "mode": 1, "sweep": true},
          {"kind": "mirror", "mode": 1},
          {"kind": "custom_unitary", "matrix": "U"}
        ],
        "detectors": {"D_r": "matrix name"},
        "projectors": {"path_r": "matrix name"}
      },
      "queries": [{"kind": "analyze", "pair": ["A", "B"]}, ...]
    }

Floats are written with Python's shortest round-trip repr, so a dumped file
parses back to bit-identical arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .hilbert import Projector, QuantumState
from .optics import BeamSplitter, CustomUnitary, Element, Mirror, OpticalScene, PhaseShifter
from .spectral import Observable, decompose
from .tolerances import Tolerances

__all__ = ["SceneFile", "SceneInputError", "SceneParseError", "SceneSpec", "scene_to_spec"]

FORMAT_VERSION = 1


class SceneParseError(ValueError):
    """The document is not a well-formed scene file."""


class SceneInputError(ValueError):
    """The document parses but is inconsistent (unknown names, wrong dimensions)."""


@dataclass
class SceneSpec:
    modes: tuple[str, ...]
    input: np.ndarray
    elements: tuple[Element, ...]
    detectors: dict[str, str]
    projectors: dict[str, str] = field(default_factory=dict)


@dataclass
class SceneFile:
    dimension: int
    matrices: dict[str, np.ndarray]
    observables: dict[str, tuple[str, float | None]] = field(default_factory=dict)
    scene: SceneSpec | None = None
    queries: list[dict[str, Any]] = field(default_factory=list)
    version: int = FORMAT_VERSION

    def observable(self, name: str, tol: Tolerances | None = None) -> Observable:
        if name not in self.observables:
            known = ", ".join(self.observables) or "none"
            raise SceneInputError(f"unknown observable {name!r} (known: {known})")
        ref, cluster_tol = self.observables[name]
        return decompose(self.matrices[ref], cluster_tol, tol)

    def optical_scene(self, tol: Tolerances | None = None) -> OpticalScene:
        if self.scene is None:
            raise SceneInputError("file has no optical network")
        s = self.scene
        try:
            return OpticalScene(
                s.modes,
                s.elements,
                QuantumState(vector=s.input, tol=tol),
                {k: Projector(self.matrices[v], tol) for k, v in s.projectors.items()},
                {k: Projector(self.matrices[v], tol) for k, v in s.detectors.items()},
            )
        except ValueError as exc:
            raise SceneInputError(f"invalid optical network: {exc}") from exc

    # serialization

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "version": self.version,
            "dimension": self.dimension,
            "matrices": {k: _encode_matrix(m) for k, m in self.matrices.items()},
            "observables": {k: {"matrix": ref, "cluster_tol": ct} for k, (ref, ct) in self.observables.items()},
        }
        if self.scene is not None:
            s = self.scene
            doc["scene"] = {
                "modes": list(s.modes),
                "input": [_encode_complex(z) for z in s.input],
                "elements": [_encode_element(e) for e in s.elements],
                "detectors": dict(s.detectors),
                "projectors": dict(s.projectors),
            }
        doc["queries"] = [dict(q) for q in self.queries]
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n"

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> SceneFile:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SceneParseError(f"not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: str | Path) -> SceneFile:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise SceneInputError(f"cannot read {path}: {exc}") from exc
        return cls.loads(text)

    @classmethod
    def from_dict(cls, doc: Any) -> SceneFile:
        if not isinstance(doc, dict):
            raise SceneParseError("top level must be an object")
        version = _require(doc, "version", int)
        if version != FORMAT_VERSION:
            raise SceneParseError(f"unsupported version {version}")
        dim = _require(doc, "dimension", int)
        if dim < 1:
            raise SceneInputError("dimension must be positive")

        raw = _require(doc, "matrices", dict)
        matrices = {}
        for name, m in raw.items():
            a = _decode_matrix(m, name)
            if a.shape != (dim, dim):
                raise SceneInputError(f"matrix {name!r} is {a.shape[0]}x{a.shape[1]}, file dimension is {dim}")
            matrices[name] = a

        observables = {}
        for name, spec in doc.get("observables", {}).items():
            if isinstance(spec, str):
                spec = {"matrix": spec}
            if not isinstance(spec, dict) or not isinstance(spec.get("matrix"), str):
                raise SceneParseError(f"observable {name!r} needs a matrix reference")
            ct = spec.get("cluster_tol")
            if ct is not None and not isinstance(ct, (int, float)):
                raise SceneParseError(f"observable {name!r}: cluster_tol must be a number")
            if spec["matrix"] not in matrices:
                raise SceneInputError(f"observable {name!r} refers to unknown matrix {spec['matrix']!r}")
            observables[name] = (spec["matrix"], None if ct is None else float(ct))

        scene = None
        if doc.get("scene") is not None:
            scene = _decode_scene(doc["scene"], dim, matrices)

        queries = doc.get("queries", [])
        if not isinstance(queries, list) or not all(isinstance(q, dict) and "kind" in q for q in queries):
            raise SceneParseError("queries must be a list of objects with a 'kind'")
        for q in queries:
            if q["kind"] not in ("analyze", "simulate", "duality"):
                raise SceneParseError(f"unknown query kind {q['kind']!r}")
            if q["kind"] == "analyze":
                pair = q.get("pair")
                if not (isinstance(pair, list) and len(pair) == 2):
                    raise SceneParseError("analyze query needs 'pair': [A, B]")
                for n in pair:
                    if n not in observables:
                        raise SceneInputError(f"analyze query names unknown observable {n!r}")
        return cls(dim, matrices, observables, scene, [dict(q) for q in queries], version)

    def same_as(self, other: SceneFile) -> bool:
        """Structural equality with bit-exact array comparison."""
        return self.dumps() == other.dumps() and all(
            np.array_equal(self.matrices[k], other.matrices[k]) for k in self.matrices
        )


def scene_to_spec(scene: OpticalScene, prefix: str = "") -> tuple[SceneSpec, dict[str, np.ndarray]]:
    """Split an in-memory scene into a spec plus the matrices it references."""
    matrices: dict[str, np.ndarray] = {}
    detectors, projectors = {}, {}
    for name, p in scene.named_projectors.items():
        matrices[prefix + name] = np.array(p.matrix)
        projectors[name] = prefix + name
    for name, p in scene.detectors.items():
        if name == "loss":
            continue
        matrices[prefix + name] = np.array(p.matrix)
        detectors[name] = prefix + name
    elements = []
    for e in scene.elements:
        if isinstance(e, CustomUnitary):
            key = prefix + (e.name or f"U{len(matrices)}")
            matrices[key] = np.array(e.matrix, dtype=complex)
            e = CustomUnitary(matrices[key], key)
        elements.append(e)
    spec = SceneSpec(scene.mode_labels, np.array(scene.input_state.vector), tuple(elements), detectors, projectors)
    return spec, matrices


def _require(doc: dict, key: str, typ: type) -> Any:
    if key not in doc:
        raise SceneParseError(f"missing required key {key!r}")
    v = doc[key]
    if not isinstance(v, typ) or (typ is int and isinstance(v, bool)):
        raise SceneParseError(f"{key!r} must be of type {typ.__name__}")
    return v


def _encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _decode_complex(v: Any, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        return complex(float(v[0]), float(v[1]))
    raise SceneParseError(f"{where}: complex entries must be [re, im] pairs, got {v!r}")


def _encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [[_encode_complex(z) for z in row] for row in np.asarray(m)]


def _decode_matrix(m: Any, name: str) -> np.ndarray:
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise SceneParseError(f"matrix {name!r} must be a non-empty list of rows")
    widths = {len(r) for r in m}
    if len(widths) != 1:
        raise SceneParseError(f"matrix {name!r} has ragged rows")
    a = np.array([[_decode_complex(z, f"matrix {name!r}") for z in row] for row in m], dtype=complex)
    if a.shape[0] != a.shape[1]:
        raise SceneInputError(f"matrix {name!r} is not square: {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SceneInputError(f"matrix {name!r} has non-finite entries")
    return a


def _encode_element(e: Element) -> dict[str, Any]:
    if isinstance(e, BeamSplitter):
        return {"kind": "beam_splitter", "reflectivity": e.reflectivity, "modes": list(e.modes), "name": e.name}
    if isinstance(e, PhaseShifter):
        return {"kind": "phase_shifter", "phi": e.phi, "mode": e.mode, "sweep": e.sweep, "name": e.name}
    if isinstance(e, Mirror):
        return {"kind": "mirror", "mode": e.mode, "name": e.name}
    return {"kind": "custom_unitary", "matrix": e.name, "name": e.name}


def _mode_index(v: Any, modes: list[str]) -> int:
    if isinstance(v, str):
        if v not in modes:
            raise SceneInputError(f"unknown mode label {v!r}")
        return modes.index(v)
    if isinstance(v, int) and not isinstance(v, bool):
        if not 0 <= v < len(modes):
            raise SceneInputError(f"mode index {v} out of range")
        return v
    raise SceneParseError(f"mode must be a label or an index, got {v!r}")


def _decode_element(d: Any, modes: list[str], matrices: dict[str, np.ndarray]) -> Element:
    if not isinstance(d, dict) or "kind" not in d:
        raise SceneParseError(f"element must be an object with a 'kind': {d!r}")
    kind, name = d["kind"], d.get("name", "")
    try:
        if kind == "beam_splitter":
            a, b = (_mode_index(m, modes) for m in d["modes"])
            return BeamSplitter(float(d["reflectivity"]), (a, b), name)
        if kind == "phase_shifter":
            return PhaseShifter(float(d["phi"]), _mode_index(d["mode"], modes), name, bool(d.get("sweep", False)))
        if kind == "mirror":
            return Mirror(_mode_index(d["mode"], modes), name)
        if kind == "custom_unitary":
            ref = d["matrix"]
            if ref not in matrices:
                raise SceneInputError(f"custom unitary refers to unknown matrix {ref!r}")
            return CustomUnitary(matrices[ref], ref)
    except (KeyError, TypeError) as exc:
        raise SceneParseError(f"malformed {kind} element: {exc}") from exc
    except SceneInputError:
        raise
    except ValueError as exc:
        raise SceneInputError(f"invalid {kind} element: {exc}") from exc
    raise SceneParseError(f"unknown element kind {kind!r}")


def _decode_scene(d: Any, dim: int, matrices: dict[str, np.ndarray]) -> SceneSpec:
    if not isinstance(d, dict):
        raise SceneParseError("scene must be an object")
    modes = d.get("modes")
    if not isinstance(modes, list) or not all(isinstance(m, str) for m in modes):
        raise SceneParseError("scene.modes must be a list of labels")
    if len(modes) != dim:
        raise SceneInputError(f"scene has {len(modes)} modes, file dimension is {dim}")
    raw_input = d.get("input")
    if not isinstance(raw_input, list):
        raise SceneParseError("scene.input must be a list of [re, im] pairs")
    vec = np.array([_decode_complex(z, "scene.input") for z in raw_input], dtype=complex)
    if vec.shape != (dim,):
        raise SceneInputError(f"scene.input has length {vec.shape[0]}, file dimension is {dim}")
    elements = tuple(_decode_element(e, modes, matrices) for e in d.get("elements", []))
    refs = {}
    for key in ("detectors", "projectors"):
        table = d.get(key, {})
        if not isinstance(table, dict) or not all(isinstance(v, str) for v in table.values()):
            raise SceneParseError(f"scene.{key} must map names to matrix names")
        for n, ref in table.items():
            if ref not in matrices:
                raise SceneInputError(f"scene.{key}[{n!r}] refers to unknown matrix {ref!r}")
        refs[key] = dict(table)
    return SceneSpec(tuple(modes), vec, elements, refs["detectors"], refs["projectors"])
