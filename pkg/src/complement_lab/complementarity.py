"""Decide whether two sharp observables are complementary.

Two observables are complementary when every pair of nontrivial spectral
projectors ``P_A(X)``, ``P_B(Y)`` has zero meet. The probabilistic form asks
instead whether some state can give probability one to both propositions.
For sharp observables the two tests coincide; :func:`conditions_agree`
cross-checks them.

Value sets range over subsets of the (finite) spectrum, enumerated in
lexicographic order of ascending-eigenvalue index tuples, so verdicts are
reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence, Union

import numpy as np

from .hilbert import (
    DimensionMismatch,
    Projector,
    commutator_norm,
    expectation,
    meet,
    principal_cosines,
    QuantumState,
)
from .spectral import Observable, ValueSet, common_eigenvectors, spectral_projector
from .tolerances import Tolerances, resolve

__all__ = [
    "MAX_SPECTRAL_POINTS",
    "Commutation",
    "PairCounts",
    "Relation",
    "SpectrumTooLarge",
    "Verdict",
    "WitnessKind",
    "WitnessRecord",
    "classify",
    "commutation_class",
    "complementary_observables",
    "complementary_pair",
    "conditions_agree",
    "max_joint_probability",
    "probabilistic_check",
    "verify_witness",
]

MAX_SPECTRAL_POINTS = 12


class SpectrumTooLarge(ValueError):
    pass


class Relation(str, enum.Enum):
    COMPLEMENTARY = "Complementary"
    NONCOMPLEMENTARY = "Noncomplementary"


class Commutation(str, enum.Enum):
    COMMUTING = "Commuting"
    PARTIALLY_COMMUTING = "PartiallyCommuting"
    TOTALLY_NONCOMMUTING = "TotallyNoncommuting"
    DEGENERATE_IDENTITY = "DegenerateIdentity"


class WitnessKind(str, enum.Enum):
    NONZERO_MEET = "NonzeroMeet"
    COMMON_EIGENVECTOR = "CommonEigenvector"
    PROBABILITY_ONE = "ProbabilityOne"
    ALL_MEETS_ZERO = "AllMeetsZero"


Evidence = Union[Projector, np.ndarray]


@dataclass(frozen=True)
class WitnessRecord:
    """Re-checkable evidence for a verdict.

    ``evidence`` is the meet projector for NonzeroMeet and a unit vector
    otherwise. ``magnitude`` is the largest principal cosine (meet records)
    or the largest joint probability (probability records).
    """

    kind: WitnessKind
    value_set_a: ValueSet
    value_set_b: ValueSet
    evidence: Evidence
    magnitude: float
    note: str = ""

    def __post_init__(self) -> None:
        m = float(self.magnitude)
        if not -1e-9 <= m <= 1 + 1e-9:
            raise ValueError(f"witness magnitude {m} outside [0, 1]")
        object.__setattr__(self, "magnitude", min(1.0, max(0.0, m)))

    @property
    def dim(self) -> int:
        e = self.evidence
        return e.dim if isinstance(e, Projector) else e.shape[0]

    def evidence_vectors(self) -> np.ndarray:
        """Evidence as columns: the meet's range basis, or the single vector."""
        e = self.evidence
        return e.basis if isinstance(e, Projector) else e[:, None]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "value_set_a": str(self.value_set_a),
            "value_set_b": str(self.value_set_b),
            "magnitude": self.magnitude,
            "evidence": [[[z.real, z.imag] for z in col] for col in self.evidence_vectors().T],
            "note": self.note,
        }


@dataclass(frozen=True)
class PairCounts:
    total: int
    zero_meet: int
    nonzero_meet: int


@dataclass(frozen=True)
class Verdict:
    relation: Relation
    commutation: Commutation
    witnesses: tuple[WitnessRecord, ...]
    counts: PairCounts
    commutator_norm: float
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.relation is Relation.COMPLEMENTARY and self.commutation is not Commutation.TOTALLY_NONCOMMUTING:
            raise AssertionError(
                f"Complementary verdict with commutation {self.commutation.value}: "
                "complementary observables cannot share an eigenvector"
            )

    @property
    def summary(self) -> str:
        return f"{self.relation.value}, {self.commutation.value}"

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "commutation": self.commutation.value,
            "commutator_norm": self.commutator_norm,
            "pairs": {
                "total": self.counts.total,
                "zero_meet": self.counts.zero_meet,
                "nonzero_meet": self.counts.nonzero_meet,
            },
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": list(self.notes),
        }


def _one() -> ValueSet:
    return ValueSet.of_points([1.0])


def complementary_pair(
    p: Projector,
    q: Projector,
    tol: Tolerances | None = None,
    value_sets: tuple[ValueSet, ValueSet] | None = None,
) -> tuple[bool, WitnessRecord]:
    """Meet condition for a single pair of propositions: is meet(P, Q) zero?

    Zero and identity projectors are excluded by definition; for them the
    answer is False with a note. The witness is the meet when it is nonzero,
    otherwise the principal vector in range(P) closest to range(Q).
    """
    tol = resolve(tol)
    if p.dim != q.dim:
        raise DimensionMismatch(f"projectors have dims {p.dim} and {q.dim}")
    xa, xb = value_sets if value_sets is not None else (_one(), _one())
    trivial = [name for name, r in (("P", p), ("Q", q)) if r.is_zero or r.is_identity]
    note = f"trivial projector(s) {', '.join(trivial)}: excluded from the definition" if trivial else ""
    r = meet(p, q, tol)
    if r.rank > 0:
        return False, WitnessRecord(WitnessKind.NONZERO_MEET, xa, xb, r, 1.0, note)
    cos, vec = _closest_approach(p.basis, q.basis)
    return not trivial, WitnessRecord(WitnessKind.ALL_MEETS_ZERO, xa, xb, vec, cos, note or "minimal principal angle")


def _closest_approach(u: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
    dim = u.shape[0]
    if u.shape[1] == 0 or v.shape[1] == 0:
        e = np.zeros(dim, dtype=complex)
        e[0] = 1.0
        return 0.0, (u[:, 0] if u.shape[1] else e)
    w, s, _ = np.linalg.svd(u.conj().T @ v)
    return float(min(1.0, s[0])), u @ w[:, 0]


def max_joint_probability(p: Projector, q: Projector) -> tuple[float, np.ndarray]:
    """sup of <psi|Q|psi> over unit psi in range(P), and a maximizing psi.

    Computed as the top eigenvalue of Q compressed to range(P).
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"projectors have dims {p.dim} and {q.dim}")
    if p.rank == 0:
        return 0.0, np.zeros(p.dim, dtype=complex)
    w, vecs = np.linalg.eigh(p.basis.conj().T @ q.matrix @ p.basis)
    return float(min(1.0, max(0.0, w[-1]))), p.basis @ vecs[:, -1]


def _check_pair(a: Observable, b: Observable) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"observables have dims {a.dim} and {b.dim}")
    for name, obs in (("A", a), ("B", b)):
        if len(obs.eigenvalues) > MAX_SPECTRAL_POINTS:
            raise SpectrumTooLarge(
                f"observable {name} has {len(obs.eigenvalues)} spectral points; "
                f"subset enumeration is capped at {MAX_SPECTRAL_POINTS}"
            )


def _proper_subsets(n: int) -> list[tuple[int, ...]]:
    subsets = [c for k in range(1, n) for c in combinations(range(n), k)]
    subsets.sort()
    return subsets


def _columns(obs: Observable) -> list[np.ndarray]:
    """Column indices, into the stacked eigenbasis, of each spectral point."""
    out, start = [], 0
    for p in obs.projectors:
        out.append(np.arange(start, start + p.rank))
        start += p.rank
    return out


def _pairs(a: Observable, b: Observable) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    sa, sb = _proper_subsets(len(a.eigenvalues)), _proper_subsets(len(b.eigenvalues))
    return [(x, y) for x in sa for y in sb]


def _batched(
    a: Observable,
    b: Observable,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> np.ndarray:
    """Evaluate ``fn`` over all subset pairs, in ``_pairs`` order.

    Pairs are grouped by the column counts of both subsets. ``fn`` gets index
    arrays of shape (n, ka) and (n, kb) into the stacked eigenbases and
    returns n values.
    """
    sa, sb = _proper_subsets(len(a.eigenvalues)), _proper_subsets(len(b.eigenvalues))

    def by_size(obs: Observable, subsets: list[tuple[int, ...]]) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        cols = _columns(obs)
        groups: dict[int, tuple[list[int], list[np.ndarray]]] = {}
        for pos, x in enumerate(subsets):
            idx = np.concatenate([cols[i] for i in x])
            g = groups.setdefault(len(idx), ([], []))
            g[0].append(pos)
            g[1].append(idx)
        return {k: (np.array(p), np.stack(i)) for k, (p, i) in groups.items()}

    out = np.empty(len(sa) * len(sb))
    groups_b = by_size(b, sb)
    for pos_a, idx_a in by_size(a, sa).values():
        for pos_b, idx_b in groups_b.values():
            na, nb = len(pos_a), len(pos_b)
            vals = fn(np.repeat(idx_a, nb, axis=0), np.tile(idx_b, (na, 1)))
            out[(pos_a[:, None] * len(sb) + pos_b[None, :]).ravel()] = vals
    return out


def _value_set(obs: Observable, subset: tuple[int, ...]) -> ValueSet:
    return ValueSet.of_points(obs.eigenvalues[i] for i in subset)


def commutation_class(a: Observable, b: Observable, tol: Tolerances | None = None) -> Commutation:
    """Commuting, partially commuting, totally noncommuting, or degenerate.

    The commutator threshold is ``tol.comm`` scaled by the product of the
    operators' max-norms (floored at one).
    """
    tol = resolve(tol)
    if a.dim != b.dim:
        raise DimensionMismatch(f"observables have dims {a.dim} and {b.dim}")
    if a.is_scalar or b.is_scalar:
        return Commutation.DEGENERATE_IDENTITY
    scale = max(1.0, float(np.max(np.abs(a.matrix))) * float(np.max(np.abs(b.matrix))))
    if commutator_norm(a.matrix, b.matrix) <= tol.comm * scale:
        return Commutation.COMMUTING
    if not common_eigenvectors(a, b, tol):
        return Commutation.TOTALLY_NONCOMMUTING
    return Commutation.PARTIALLY_COMMUTING


def _degenerate_verdict(a: Observable, b: Observable, commutation: Commutation) -> Verdict:
    # any eigenvector of the non-scalar observable is common to both
    other, first = (b, False) if a.is_scalar else (a, True)
    vec = other.projectors[0].basis[:, 0]
    if first:
        xa, xb = ValueSet.of_points([a.eigenvalues[0]]), ValueSet.of_points(b.eigenvalues)
    else:
        xa, xb = ValueSet.of_points(a.eigenvalues), ValueSet.of_points([b.eigenvalues[0]])
    w = WitnessRecord(
        WitnessKind.COMMON_EIGENVECTOR, xa, xb, np.array(vec), 1.0, "multiple of the identity: every vector is an eigenvector"
    )
    return Verdict(
        Relation.NONCOMPLEMENTARY,
        commutation,
        (w,),
        PairCounts(0, 0, 0),
        commutator_norm(a.matrix, b.matrix),
        ("an observable is a multiple of the identity; it has no nontrivial spectral projector",),
    )


def complementary_observables(a: Observable, b: Observable, tol: Tolerances | None = None) -> Verdict:
    """Meet condition: every cross pair of nontrivial spectral projectors has zero meet.

    All nonempty proper subsets of both spectra are enumerated. The first
    nonzero meet found becomes the witness; if there is none, the witness is
    the pair of closest approach (largest principal cosine).
    """
    tol = resolve(tol)
    _check_pair(a, b)
    commutation = commutation_class(a, b, tol)
    if commutation is Commutation.DEGENERATE_IDENTITY:
        return _degenerate_verdict(a, b, commutation)

    basis_a = a.subset_basis(range(len(a.eigenvalues)))
    basis_b = b.subset_basis(range(len(b.eigenvalues)))
    gram = basis_a.conj().T @ basis_b

    pairs = _pairs(a, b)
    top = _batched(
        a, b,
        lambda ia, ib: np.linalg.svd(gram[ia[:, :, None], ib[:, None, :]], compute_uv=False)[:, 0],
    )
    hit = top >= 1.0 - tol.angle
    total, nonzero = len(pairs), int(hit.sum())

    counts = PairCounts(total, total - nonzero, nonzero)
    if nonzero:
        x, y = pairs[int(np.argmax(hit))]
        pa = Projector.from_orthonormal(a.subset_basis(x), a.dim)
        pb = Projector.from_orthonormal(b.subset_basis(y), b.dim)
        w = WitnessRecord(WitnessKind.NONZERO_MEET, _value_set(a, x), _value_set(b, y), meet(pa, pb, tol), 1.0)
        relation = Relation.NONCOMPLEMENTARY
    else:
        x, y = pairs[int(np.argmax(top))]
        cos, vec = _closest_approach(a.subset_basis(x), b.subset_basis(y))
        w = WitnessRecord(
            WitnessKind.ALL_MEETS_ZERO, _value_set(a, x), _value_set(b, y), vec, cos, "pair of closest approach"
        )
        relation = Relation.COMPLEMENTARY
    note = (
        f"value sets enumerated as subsets of distinct spectral points "
        f"({len(a.eigenvalues)} for A, {len(b.eigenvalues)} for B)"
    )
    return Verdict(relation, commutation, (w,), counts, commutator_norm(a.matrix, b.matrix), (note,))


def probabilistic_check(a: Observable, b: Observable, tol: Tolerances | None = None) -> Verdict:
    """Probability condition: no state gives probability one to both P_A(X) and P_B(Y).

    For each pair the supremum of <psi|P_B(Y)|psi> over unit psi in the
    range of P_A(X) is the top eigenvalue of the compressed projector. A pair
    fails when that supremum reaches ``(1 - tol.angle)**2``, the same cut the
    meet uses on principal cosines.
    """
    tol = resolve(tol)
    _check_pair(a, b)
    commutation = commutation_class(a, b, tol)
    if commutation is Commutation.DEGENERATE_IDENTITY:
        return _degenerate_verdict(a, b, commutation)

    threshold = (1.0 - tol.angle) ** 2
    # columns of both eigenbases, indexed like the spectral points
    basis_a = a.subset_basis(range(len(a.eigenvalues)))
    basis_b = b.subset_basis(range(len(b.eigenvalues)))

    def compressed(ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
        ua = np.moveaxis(basis_a[:, ia], 0, 1)  # (n, d, ka)
        ub = np.moveaxis(basis_b[:, ib], 0, 1)
        proj_b = ub @ ub.conj().transpose(0, 2, 1)
        return ua.conj().transpose(0, 2, 1) @ proj_b @ ua

    pairs = _pairs(a, b)
    sups = _batched(a, b, lambda ia, ib: np.linalg.eigvalsh(compressed(ia, ib))[:, -1])
    fail = sups >= threshold
    total, failed = len(pairs), int(fail.sum())

    def top_state(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[float, np.ndarray]:
        ua, ub = a.subset_basis(x), b.subset_basis(y)
        w, vecs = np.linalg.eigh(ua.conj().T @ (ub @ ub.conj().T) @ ua)
        return float(w[-1]), ua @ vecs[:, -1]

    counts = PairCounts(total, total - failed, failed)
    if failed:
        x, y = pairs[int(np.argmax(fail))]
        sup, psi = top_state(x, y)
        w = WitnessRecord(WitnessKind.PROBABILITY_ONE, _value_set(a, x), _value_set(b, y), psi, sup)
        relation = Relation.NONCOMPLEMENTARY
    else:
        x, y = pairs[int(np.argmax(sups))]
        sup, psi = top_state(x, y)
        w = WitnessRecord(
            WitnessKind.ALL_MEETS_ZERO, _value_set(a, x), _value_set(b, y), psi, max(0.0, sup),
            "largest joint probability over all pairs",
        )
        relation = Relation.COMPLEMENTARY
    return Verdict(relation, commutation, (w,), counts, commutator_norm(a.matrix, b.matrix))


def conditions_agree(a: Observable, b: Observable, tol: Tolerances | None = None) -> bool:
    """True iff the meet test and the probability test return the same relation."""
    tol = resolve(tol)
    return complementary_observables(a, b, tol).relation is probabilistic_check(a, b, tol).relation


def classify(a: Observable, b: Observable, tol: Tolerances | None = None) -> Verdict:
    """Full classification: meet-condition verdict plus common-eigenvector witnesses."""
    tol = resolve(tol)
    base = complementary_observables(a, b, tol)
    if base.commutation is Commutation.DEGENERATE_IDENTITY:
        return base
    extra = []
    for i, p in enumerate(a.projectors):
        for j, q in enumerate(b.projectors):
            r = meet(p, q, tol)
            if r.rank > 0:
                extra.append(
                    WitnessRecord(
                        WitnessKind.COMMON_EIGENVECTOR,
                        ValueSet.of_points([a.eigenvalues[i]]),
                        ValueSet.of_points([b.eigenvalues[j]]),
                        np.array(r.basis[:, 0]),
                        1.0,
                        f"common eigenspace of rank {r.rank}",
                    )
                )
    notes = base.notes
    if base.commutation is Commutation.PARTIALLY_COMMUTING:
        notes += ("PartiallyCommuting: noncommuting, but some eigenvector is shared",)
    return Verdict(base.relation, base.commutation, base.witnesses + tuple(extra), base.counts, base.commutator_norm, notes)


def verify_witness(w: WitnessRecord, a: Observable, b: Observable, atol: float = 1e-8) -> bool:
    """Re-derive the projectors from the stored value sets and check the evidence."""
    p = spectral_projector(a, w.value_set_a)
    q = spectral_projector(b, w.value_set_b)
    if w.kind is WitnessKind.NONZERO_MEET:
        m = w.evidence.matrix
        return bool(
            w.evidence.rank > 0
            and np.max(np.abs(p.matrix @ m - m)) <= atol
            and np.max(np.abs(q.matrix @ m - m)) <= atol
        )
    psi = QuantumState.pure(w.evidence, normalize=True)
    if w.kind is WitnessKind.PROBABILITY_ONE:
        return expectation(psi, p) >= 1 - atol and expectation(psi, q) >= 1 - atol
    if w.kind is WitnessKind.COMMON_EIGENVECTOR:
        v = psi.vector
        return all(
            np.linalg.norm(m @ v - np.vdot(v, m @ v) * v) <= atol * max(1.0, float(np.max(np.abs(m))))
            for m in (a.matrix, b.matrix)
        )
    # AllMeetsZero: psi lies in range(P), the ranges do not meet, and psi
    # attains the closest approach to range(Q)
    if p.is_zero or q.is_zero or expectation(psi, p) < 1 - atol:
        return False
    cos = float(principal_cosines(p, q)[0])
    return cos < 1.0 - atol and abs(expectation(psi, q) - cos**2) <= 1e-6
