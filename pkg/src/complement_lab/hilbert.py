"""Dense complex linear algebra and the lattice of orthogonal projectors.

Projectors are validated when constructed and immutable afterwards, so the
lattice operations (:func:`meet`, :func:`join`, :func:`orthocomplement`) can
assume their inputs are Hermitian and idempotent.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .tolerances import Tolerances, resolve

__all__ = [
    "DimensionMismatch",
    "InvalidProjector",
    "InvalidState",
    "NotHermitian",
    "Projector",
    "QuantumState",
    "as_matrix",
    "commutator_norm",
    "commutes",
    "expectation",
    "is_hermitian",
    "join",
    "meet",
    "orthocomplement",
    "principal_cosines",
    "projector_from_span",
]


class DimensionMismatch(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class InvalidProjector(ValueError):
    pass


class InvalidState(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(m: object) -> np.ndarray:
    """Coerce to a square, finite, complex 2-D array (not copied if already one)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _check_same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def is_hermitian(m: np.ndarray, tol: Tolerances | None = None) -> bool:
    tol = resolve(tol)
    m = as_matrix(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol.herm)


class Projector:
    """Orthogonal projector on C^dim.

    ``basis`` holds an orthonormal basis of the range as columns; ``rank`` is
    its column count.
    """

    __slots__ = ("matrix", "rank", "basis")

    def __init__(self, matrix: object, tol: Tolerances | None = None) -> None:
        tol = resolve(tol)
        m = as_matrix(matrix)
        if np.max(np.abs(m - m.conj().T)) > tol.herm:
            raise InvalidProjector("matrix is not Hermitian")
        if np.max(np.abs(m @ m - m)) > tol.idem:
            raise InvalidProjector("matrix is not idempotent")
        w, v = np.linalg.eigh((m + m.conj().T) / 2)
        near_one = np.abs(w - 1.0) <= tol.eig
        if not np.all(near_one | (np.abs(w) <= tol.eig)):
            raise InvalidProjector(f"eigenvalues outside {{0, 1}}: {w}")
        self.matrix = _frozen(m)
        self.rank = int(np.count_nonzero(near_one))
        self.basis = _frozen(v[:, near_one])

    @classmethod
    def from_orthonormal(cls, basis: np.ndarray, dim: int | None = None) -> Projector:
        """Projector ``B B†`` onto the span of orthonormal columns ``B``."""
        b = np.asarray(basis, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        if b.shape[1] == 0:
            return cls.zero(b.shape[0] if dim is None else dim)
        gram = b.conj().T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-9:
            raise InvalidProjector("basis columns are not orthonormal")
        self = object.__new__(cls)
        self.matrix = _frozen(b @ b.conj().T)
        self.rank = b.shape[1]
        self.basis = _frozen(b)
        return self

    @classmethod
    def zero(cls, dim: int) -> Projector:
        self = object.__new__(cls)
        self.matrix = _frozen(np.zeros((dim, dim)))
        self.rank = 0
        self.basis = _frozen(np.zeros((dim, 0)))
        return self

    @classmethod
    def identity(cls, dim: int) -> Projector:
        return cls.from_orthonormal(np.eye(dim))

    @classmethod
    def onto(cls, vector: object) -> Projector:
        """P[v]: the rank-one projector onto a nonzero vector."""
        v = np.asarray(vector, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("cannot project onto the zero vector")
        return cls.from_orthonormal(v / n)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    @property
    def is_identity(self) -> bool:
        return self.rank == self.dim

    def allclose(self, other: Projector | np.ndarray, atol: float = 1e-10) -> bool:
        o = other.matrix if isinstance(other, Projector) else np.asarray(other)
        return o.shape == self.matrix.shape and bool(np.max(np.abs(self.matrix - o)) <= atol)

    def __le__(self, other: Projector) -> bool:
        # Löwner order; for projectors this is range containment, Q P = P
        _check_same_dim(self.matrix, other.matrix)
        return bool(np.max(np.abs(other.matrix @ self.matrix - self.matrix), initial=0.0) <= 1e-8)

    def __add__(self, other: Projector) -> Projector:
        """Sum of two orthogonal projectors."""
        _check_same_dim(self.matrix, other.matrix)
        if np.max(np.abs(self.matrix @ other.matrix)) > 1e-8:
            raise InvalidProjector("sum of non-orthogonal projectors is not a projector")
        return Projector.from_orthonormal(np.hstack([self.basis, other.basis]), self.dim)

    def __repr__(self) -> str:
        return f"Projector(dim={self.dim}, rank={self.rank})"


def projector_from_span(vectors: Sequence[object], tol: Tolerances | None = None) -> Projector:
    """Orthogonal projector onto the span of ``vectors``.

    The span is found with a rank-revealing SVD; singular values below
    ``tol.rank`` times the largest one are treated as zero. An all-zero input
    gives the zero projector.
    """
    tol = resolve(tol)
    vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not vecs:
        raise ValueError("need at least one vector")
    dims = {v.shape[0] for v in vecs}
    if len(dims) != 1:
        raise DimensionMismatch(f"vectors have differing lengths {sorted(dims)}")
    dim = dims.pop()
    a = np.column_stack(vecs)
    if not np.all(np.isfinite(a)):
        raise ValueError("vectors have non-finite entries")
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Projector.zero(dim)
    k = int(np.count_nonzero(s > tol.rank * s[0]))
    return Projector.from_orthonormal(u[:, :k], dim)


def orthocomplement(p: Projector) -> Projector:
    """I - P."""
    if p.rank == 0:
        return Projector.identity(p.dim)
    if p.rank == p.dim:
        return Projector.zero(p.dim)
    # the eigenvectors of I - P with eigenvalue 1 are the null space of P
    _, v = np.linalg.eigh(p.matrix)
    return Projector.from_orthonormal(v[:, : p.dim - p.rank], p.dim)


def principal_cosines(p: Projector, q: Projector) -> np.ndarray:
    """Cosines of the principal angles between range(P) and range(Q), descending."""
    _check_same_dim(p.matrix, q.matrix)
    if p.rank == 0 or q.rank == 0:
        return np.zeros(0)
    s = np.linalg.svd(p.basis.conj().T @ q.basis, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def meet(p: Projector, q: Projector, tol: Tolerances | None = None) -> Projector:
    """Greatest lower bound: the projector onto range(P) ∩ range(Q).

    Left singular vectors of ``U† V`` whose singular value is within
    ``tol.angle`` of one span the intersection (principal angle zero).
    """
    tol = resolve(tol)
    dim = _check_same_dim(p.matrix, q.matrix)
    if p.rank == 0 or q.rank == 0:
        return Projector.zero(dim)
    w, s, _ = np.linalg.svd(p.basis.conj().T @ q.basis)
    k = int(np.count_nonzero(s >= 1.0 - tol.angle))
    if k == 0:
        return Projector.zero(dim)
    b = p.basis @ w[:, :k]
    # re-orthonormalize; the product of orthonormal factors drifts by O(eps)
    b, _ = np.linalg.qr(b)
    return Projector.from_orthonormal(b, dim)


def join(p: Projector, q: Projector, tol: Tolerances | None = None) -> Projector:
    """Least upper bound: the projector onto range(P) + range(Q)."""
    tol = resolve(tol)
    dim = _check_same_dim(p.matrix, q.matrix)
    cols = np.hstack([p.basis, q.basis])
    if cols.shape[1] == 0:
        return Projector.zero(dim)
    return projector_from_span(list(cols.T), tol)


def commutator_norm(a: object, b: object) -> float:
    """max-norm of AB - BA."""
    a = a.matrix if isinstance(a, Projector) else as_matrix(a)
    b = b.matrix if isinstance(b, Projector) else as_matrix(b)
    _check_same_dim(a, b)
    return float(np.max(np.abs(a @ b - b @ a)))


def commutes(a: object, b: object, tol: Tolerances | None = None) -> bool:
    tol = resolve(tol)
    return commutator_norm(a, b) <= tol.comm


class QuantumState:
    """A pure state vector or a density operator of trace one."""

    __slots__ = ("vector", "_density")

    def __init__(
        self,
        vector: object | None = None,
        density: object | None = None,
        tol: Tolerances | None = None,
    ) -> None:
        tol = resolve(tol)
        if (vector is None) == (density is None):
            raise InvalidState("give exactly one of vector or density")
        if vector is not None:
            v = np.asarray(vector, dtype=complex).ravel()
            if v.size == 0 or not np.all(np.isfinite(v)):
                raise InvalidState("state vector must be non-empty and finite")
            if abs(np.linalg.norm(v) - 1.0) > tol.norm:
                raise InvalidState(f"state vector has norm {np.linalg.norm(v)!r}, not 1")
            self.vector = _frozen(v)
            self._density = None
        else:
            rho = as_matrix(density)
            if np.max(np.abs(rho - rho.conj().T)) > tol.herm:
                raise InvalidState("density matrix is not Hermitian")
            if abs(np.trace(rho).real - 1.0) > tol.norm:
                raise InvalidState(f"density matrix has trace {np.trace(rho).real!r}, not 1")
            if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol.psd:
                raise InvalidState("density matrix is not positive semidefinite")
            self.vector = None
            self._density = _frozen(rho)

    @classmethod
    def pure(cls, vector: object, normalize: bool = False) -> QuantumState:
        v = np.asarray(vector, dtype=complex).ravel()
        if normalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise InvalidState("cannot normalize the zero vector")
            v = v / n
        return cls(vector=v)

    @classmethod
    def mixed(cls, density: object) -> QuantumState:
        return cls(density=density)

    @classmethod
    def maximally_mixed(cls, dim: int) -> QuantumState:
        return cls(density=np.eye(dim) / dim)

    @classmethod
    def basis(cls, dim: int, index: int) -> QuantumState:
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(vector=v)

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    @property
    def dim(self) -> int:
        return self.vector.shape[0] if self.vector is not None else self._density.shape[0]

    @property
    def density(self) -> np.ndarray:
        if self._density is not None:
            return self._density
        return np.outer(self.vector, self.vector.conj())

    def evolve(self, unitary: np.ndarray) -> QuantumState:
        u = as_matrix(unitary)
        _check_same_dim(u, np.empty((self.dim, self.dim)))
        if self.vector is not None:
            out = u @ self.vector
            # unitaries preserve the norm; rescale away O(eps) drift
            return QuantumState(vector=out / np.linalg.norm(out))
        return QuantumState(density=u @ self._density @ u.conj().T)

    def __repr__(self) -> str:
        kind = "pure" if self.is_pure else "mixed"
        return f"QuantumState({kind}, dim={self.dim})"


def expectation(state: QuantumState, observable: object, tol: Tolerances | None = None) -> float:
    """tr(T A): for a projector, the probability of the proposition in ``state``.

    Projector expectations are clamped to [0, 1].
    """
    tol = resolve(tol)
    is_proj = isinstance(observable, Projector)
    a = observable.matrix if is_proj else as_matrix(observable)
    if a.shape[0] != state.dim:
        raise DimensionMismatch(f"state has dim {state.dim}, operator has dim {a.shape[0]}")
    if np.max(np.abs(a - a.conj().T)) > tol.herm:
        raise NotHermitian("expectation needs a Hermitian operator")
    if state.vector is not None:
        value = float(np.vdot(state.vector, a @ state.vector).real)
    else:
        value = float(np.trace(state.density @ a).real)
    if is_proj:
        value = min(1.0, max(0.0, value))
    return value
