"""Spectral measures of Hermitian observables on finite-dimensional spaces.

An :class:`Observable` keeps its spectrum clustered by eigenvalue: each
distinct eigenvalue carries the projector onto its whole eigenspace. Value
sets are finite unions of half-open intervals ``[lo, hi)`` and isolated
points, which is all a finite spectrum can distinguish.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .hilbert import (
    DimensionMismatch,
    NotHermitian,
    Projector,
    as_matrix,
    meet,
)
from .tolerances import Tolerances, resolve

__all__ = [
    "Observable",
    "ValueSet",
    "ValueSetSyntaxError",
    "common_eigenvectors",
    "decompose",
    "spectral_projector",
]


class ValueSetSyntaxError(ValueError):
    pass


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


@dataclass(frozen=True)
class ValueSet:
    """A finite union of half-open intervals ``[lo, hi)`` and isolated points.

    Construct through :meth:`build` (or the helpers) to get the normalized
    form: intervals sorted and merged, points sorted, deduplicated and not
    already covered by an interval.
    """

    intervals: tuple[tuple[float, float], ...] = ()
    points: tuple[float, ...] = ()

    @classmethod
    def build(
        cls,
        intervals: Iterable[tuple[float, float]] = (),
        points: Iterable[float] = (),
    ) -> ValueSet:
        ivs = []
        for lo, hi in intervals:
            lo, hi = float(lo), float(hi)
            if math.isnan(lo) or math.isnan(hi) or not lo < hi:
                raise ValueError(f"interval [{lo}, {hi}) must have lo < hi")
            ivs.append((lo, hi))
        ivs.sort()
        merged: list[tuple[float, float]] = []
        for lo, hi in ivs:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        pts = sorted({float(p) for p in points})
        if any(math.isnan(p) for p in pts):
            raise ValueError("points must not be NaN")
        pts = [p for p in pts if not any(lo <= p < hi for lo, hi in merged)]
        return cls(tuple(merged), tuple(pts))

    @classmethod
    def interval(cls, lo: float, hi: float) -> ValueSet:
        return cls.build([(lo, hi)])

    @classmethod
    def of_points(cls, values: Iterable[float]) -> ValueSet:
        return cls.build(points=values)

    @classmethod
    def real_line(cls) -> ValueSet:
        return cls.build([(-math.inf, math.inf)])

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    def contains(self, x: float, tol: Tolerances | None = None) -> bool:
        tol = resolve(tol)
        if any(lo <= x < hi for lo, hi in self.intervals):
            return True
        return any(abs(x - p) <= tol.point * max(1.0, abs(p)) for p in self.points)

    def union(self, other: ValueSet) -> ValueSet:
        return ValueSet.build(self.intervals + other.intervals, self.points + other.points)

    def format(self, ascii: bool = False) -> str:
        parts = [f"[{_fmt(lo)},{_fmt(hi)})" for lo, hi in self.intervals]
        if self.points:
            parts.append("{" + ",".join(_fmt(p) for p in self.points) + "}")
        if not parts:
            return "{}"
        return ("+" if ascii else " ∪ ").join(parts)

    def __str__(self) -> str:
        return self.format()

    _TOKEN = re.compile(r"\s*(\[[^\]\)]*\)|\{[^}]*\})\s*")

    @classmethod
    def parse(cls, text: str) -> ValueSet:
        """Parse ``"[0.5,2.5) ∪ {3}"``; ``+`` and ``U`` also separate terms."""
        src = text.strip()
        if src in ("", "∅", "{}"):
            return cls()
        intervals: list[tuple[float, float]] = []
        points: list[float] = []
        pos = 0
        expect_term = True
        while pos < len(src):
            if expect_term:
                m = cls._TOKEN.match(src, pos)
                if not m:
                    raise ValueSetSyntaxError(f"bad value set near {src[pos:]!r}")
                term = m.group(1)
                try:
                    if term.startswith("["):
                        lo_s, hi_s = term[1:-1].split(",")
                        lo, hi = float(lo_s), float(hi_s)
                        if not lo < hi:
                            raise ValueError
                        intervals.append((lo, hi))
                    else:
                        body = term[1:-1].strip()
                        points.extend(float(p) for p in body.split(",") if p.strip())
                except ValueError:
                    raise ValueSetSyntaxError(f"bad term {term!r}") from None
                pos = m.end()
                expect_term = False
            else:
                sep = src[pos:].lstrip()
                if sep[:1] not in ("∪", "+", "U"):
                    raise ValueSetSyntaxError(f"expected a union separator near {src[pos:]!r}")
                pos = len(src) - len(sep) + 1
                expect_term = True
        if expect_term:
            raise ValueSetSyntaxError(f"dangling separator in {text!r}")
        return cls.build(intervals, points)


class Observable:
    """A Hermitian matrix together with its clustered spectral measure.

    ``eigenvalues`` is strictly increasing; ``projectors[i]`` is the
    eigenprojector for ``eigenvalues[i]``.
    """

    __slots__ = ("matrix", "eigenvalues", "projectors")

    def __init__(self, matrix: np.ndarray, eigenvalues: Sequence[float], projectors: Sequence[Projector]):
        m = np.array(matrix, dtype=complex)
        m.setflags(write=False)
        self.matrix = m
        self.eigenvalues = tuple(float(x) for x in eigenvalues)
        self.projectors = tuple(projectors)

    @classmethod
    def from_projector(cls, p: Projector) -> Observable:
        """The two-valued observable with value 1 on range(P) and 0 on its complement."""
        return decompose(p.matrix)

    @classmethod
    def from_spectrum(cls, pairs: Iterable[tuple[float, Projector]]) -> Observable:
        """Assemble sum(value * projector); the projectors must be orthogonal and complete."""
        pairs = list(pairs)
        if not pairs:
            raise ValueError("empty spectrum")
        dim = pairs[0][1].dim
        m = sum(v * p.matrix for v, p in pairs)
        return decompose(np.asarray(m).reshape(dim, dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_scalar(self) -> bool:
        """True for multiples of the identity (a single spectral point)."""
        return len(self.eigenvalues) == 1

    def spectrum(self) -> list[tuple[float, Projector]]:
        return list(zip(self.eigenvalues, self.projectors))

    def subset_basis(self, indices: Sequence[int]) -> np.ndarray:
        """Orthonormal columns spanning the eigenspaces at ``indices``."""
        return np.hstack([self.projectors[i].basis for i in indices])

    def __repr__(self) -> str:
        vals = ", ".join(f"{v:.6g}" for v in self.eigenvalues)
        return f"Observable(dim={self.dim}, spectrum=[{vals}])"


def decompose(
    m: object,
    cluster_tol: float | None = None,
    tol: Tolerances | None = None,
) -> Observable:
    """Spectral decomposition of a Hermitian matrix.

    Sorted eigenvalues closer than ``cluster_tol`` to their neighbour are
    merged into one spectral point (their mean); the default is
    ``tol.cluster`` times the spectral radius.
    """
    tol = resolve(tol)
    a = as_matrix(m)
    if np.max(np.abs(a - a.conj().T)) > tol.herm:
        raise NotHermitian("observable matrix must be Hermitian")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    radius = float(np.max(np.abs(w)))
    if cluster_tol is None:
        cluster_tol = tol.cluster * radius
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= cluster_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = [float(np.mean(w[g])) for g in groups]
    projectors = [Projector.from_orthonormal(v[:, g], a.shape[0]) for g in groups]
    return Observable(a, eigenvalues, projectors)


def spectral_projector(a: Observable, x: ValueSet, tol: Tolerances | None = None) -> Projector:
    """P_A(X): the sum of eigenprojectors whose eigenvalue lies in ``x``."""
    tol = resolve(tol)
    idx = [i for i, lam in enumerate(a.eigenvalues) if x.contains(lam, tol)]
    if not idx:
        return Projector.zero(a.dim)
    return Projector.from_orthonormal(a.subset_basis(idx), a.dim)


def common_eigenvectors(a: Observable, b: Observable, tol: Tolerances | None = None) -> list[Projector]:
    """Nonzero meets of every (eigenprojector of A, eigenprojector of B) pair.

    Their ranges together span every common eigenvector; an empty list means
    A and B are totally noncommuting.
    """
    tol = resolve(tol)
    if a.dim != b.dim:
        raise DimensionMismatch(f"observables have dims {a.dim} and {b.dim}")
    found = []
    for p in a.projectors:
        for q in b.projectors:
            r = meet(p, q, tol)
            if r.rank > 0:
                found.append(r)
    return found
