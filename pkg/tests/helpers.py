"""Random instances and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from complement_lab.hilbert import Projector


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_projector(rng: np.random.Generator, d: int, rank: int | None = None) -> Projector:
    if rank is None:
        rank = int(rng.integers(0, d + 1))
    u = random_unitary(rng, d)
    return Projector.from_orthonormal(u[:, :rank], d)


def random_projector_pair(rng: np.random.Generator, d: int) -> tuple[Projector, Projector]:
    """Mix of independent pairs and pairs with a planted common subspace."""
    if rng.random() < 0.5:
        return random_projector(rng, d), random_projector(rng, d)
    u = random_unitary(rng, d)
    shared = int(rng.integers(1, d + 1))
    common = u[:, :shared]
    rest = u[:, shared:]
    v = random_unitary(rng, d - shared) if d > shared else np.zeros((0, 0))
    rest2 = rest @ v if d > shared else rest
    extra_p = int(rng.integers(0, d - shared + 1))
    # Q's extra directions: random, but orthogonal to the common part
    extra_q = int(rng.integers(0, d - shared + 1))
    p = Projector.from_orthonormal(np.hstack([common, rest[:, :extra_p]]), d)
    q = Projector.from_orthonormal(np.hstack([common, rest2[:, :extra_q]]), d)
    return p, q


def random_hermitian_pair(rng: np.random.Generator, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian pairs with assorted degeneracies and eigenbasis overlaps."""

    def spectrum() -> np.ndarray:
        # mostly 2..d distinct values; scalar observables occasionally
        k = 1 if rng.random() < 0.05 else int(rng.integers(2, d + 1))
        values = rng.choice(np.arange(-6, 7), size=k, replace=False).astype(float)
        assign = np.concatenate([values, rng.choice(values, size=d - k)])
        return rng.permutation(assign)

    ua = random_unitary(rng, d)
    mode = rng.random()
    if mode < 0.2:
        ub = ua
    elif mode < 0.4:
        # share one eigenvector, rotate the rest
        ub = ua.copy()
        ub[:, 1:] = ua[:, 1:] @ random_unitary(rng, d - 1)
    else:
        ub = random_unitary(rng, d)
    a = ua @ np.diag(spectrum()) @ ua.conj().T
    b = ub @ np.diag(spectrum()) @ ub.conj().T
    return (a + a.conj().T) / 2, (b + b.conj().T) / 2


def random_nondegenerate(rng: np.random.Generator, d: int) -> np.ndarray:
    u = random_unitary(rng, d)
    vals = np.sort(rng.uniform(-3, 3, d))
    vals += np.arange(d) * 0.1  # keep eigenvalues well separated
    h = u @ np.diag(vals) @ u.conj().T
    return (h + h.conj().T) / 2


def von_neumann_meet(p: np.ndarray, q: np.ndarray, max_power: int = 2**17, tol: float = 1e-13) -> np.ndarray:
    """lim (PQP)^n, the projector onto range(P) ∩ range(Q).

    Evaluates the alternating-projection sequence at n = 1, 2, 4, ... by
    repeated squaring, stopping once the iterate is idempotent.
    """
    m = p @ q @ p
    n = 1
    while n < max_power:
        m2 = m @ m
        m2 = (m2 + m2.conj().T) / 2
        n *= 2
        if np.max(np.abs(m2 - m)) <= tol:
            return m2
        m = m2
    return m


def is_eigenvector(h: np.ndarray, v: np.ndarray, atol: float = 1e-8) -> bool:
    v = v / np.linalg.norm(v)
    lam = np.vdot(v, h @ v)
    return bool(np.linalg.norm(h @ v - lam * v) <= atol)
