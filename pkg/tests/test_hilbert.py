import numpy as np
import pytest

from complement_lab.hilbert import (
    DimensionMismatch,
    InvalidProjector,
    InvalidState,
    NotHermitian,
    Projector,
    QuantumState,
    commutes,
    expectation,
    join,
    meet,
    orthocomplement,
    projector_from_span,
)
from helpers import random_projector, random_projector_pair, random_unitary, von_neumann_meet

E3 = np.eye(3)
R, TR, TT = E3  # basis {Ψ_r, Ψ_tr, Ψ_tt}


class TestProjectorFromSpan:
    def test_basis_vector(self):
        p = projector_from_span([[1, 0]])
        assert np.allclose(p.matrix, np.diag([1, 0]))
        assert p.rank == 1

    def test_dependent_vectors_collapse(self):
        p = projector_from_span([[1, 0], [2, 0]])
        assert np.allclose(p.matrix, np.diag([1, 0]))
        assert p.rank == 1

    def test_interference_line(self):
        p = projector_from_span([(TT + TR) / np.sqrt(2)])
        v = (TT + TR) / np.sqrt(2)
        expected = np.outer(v, v.conj())
        assert np.max(np.abs(p.matrix - expected)) < 1e-15
        assert np.isclose(p.matrix[1, 1], 0.5) and np.isclose(p.matrix[1, 2], 0.5)
        assert p.matrix[0, 0] == 0

    def test_zero_input_gives_zero_projector(self):
        p = projector_from_span([[0, 0, 0]])
        assert p.rank == 0 and np.all(p.matrix == 0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            projector_from_span([[1, 0], [1, 0, 0]])


class TestProjectorValidation:
    def test_rejects_non_idempotent(self):
        with pytest.raises(InvalidProjector):
            Projector(np.diag([1, 0.5]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidProjector):
            Projector([[1, 1], [0, 0]])

    def test_rank_and_immutability(self, rng):
        p = random_projector(rng, 5, 3)
        q = Projector(p.matrix)
        assert q.rank == 3
        with pytest.raises(ValueError):
            q.matrix[0, 0] = 2


class TestOrthocomplement:
    def test_diag(self):
        assert np.allclose(orthocomplement(Projector(np.diag([1, 0]))).matrix, np.diag([0, 1]))

    def test_zero_to_identity(self):
        assert np.array_equal(orthocomplement(Projector.zero(3)).matrix, np.eye(3))

    def test_path_r_complement(self):
        p = orthocomplement(Projector.onto(R))
        expected = np.eye(3) - np.outer(R, R)  # matrix subtraction oracle
        assert np.max(np.abs(p.matrix - expected)) < 1e-15
        assert p.allclose(Projector.onto(TR) + Projector.onto(TT))

    def test_rank(self, rng):
        for _ in range(20):
            p = random_projector(rng, 6)
            assert orthocomplement(p).rank == 6 - p.rank


class TestMeet:
    def test_idempotent(self, rng):
        p = random_projector(rng, 4, 2)
        assert meet(p, p).allclose(p, 1e-12)

    def test_distinct_lines(self):
        m = meet(Projector.onto([1, 0]), Projector.onto([1, 1]))
        assert m.rank == 0

    def test_planes_in_three_dims(self):
        p = projector_from_span([E3[0], E3[1]])
        q = projector_from_span([E3[1], E3[2]])
        oracle = von_neumann_meet(p.matrix, q.matrix)
        assert np.max(np.abs(oracle - np.outer(E3[1], E3[1]))) < 1e-12
        assert meet(p, q).allclose(oracle, 1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            meet(Projector.identity(2), Projector.identity(3))


class TestJoin:
    def test_with_zero(self, rng):
        p = random_projector(rng, 4, 2)
        assert join(p, Projector.zero(4)).allclose(p, 1e-12)

    def test_orthogonal_sum(self):
        assert join(Projector.onto(E3[0]), Projector.onto(E3[1])).allclose(np.diag([1, 1, 0]))

    def test_random_lines_span_plane(self, rng):
        for _ in range(20):
            p, q = random_projector(rng, 3, 1), random_projector(rng, 3, 1)
            stacked = np.hstack([p.basis, q.basis])
            assert join(p, q).rank == np.linalg.matrix_rank(stacked) == 2


class TestCommutes:
    def test_self(self, rng):
        p = random_projector(rng, 4)
        assert commutes(p, p)

    def test_hadamard_line(self):
        p, h = np.diag([1.0, 0.0]), 0.5 * np.ones((2, 2))
        c = p @ h - h @ p
        assert np.isclose(abs(c[0, 1]), 0.5)
        assert not commutes(p, h)

    def test_path_r_and_interference(self):
        assert commutes(Projector.onto(R), Projector.onto((TT + TR) / np.sqrt(2)))


class TestExpectation:
    def test_basis_state(self):
        assert expectation(QuantumState.basis(2, 0), Projector(np.diag([1, 0]))) == 1.0

    def test_balanced(self):
        s = QuantumState.pure([1, 1], normalize=True)
        assert np.isclose(expectation(s, Projector(np.diag([1, 0]))), 0.5)

    def test_maximally_mixed(self, rng):
        p = random_projector(rng, 3, 2)
        assert np.isclose(expectation(QuantumState.maximally_mixed(3), p), np.trace(p.matrix).real / 3)
        assert np.isclose(expectation(QuantumState.maximally_mixed(3), p), 2 / 3)

    def test_errors(self):
        with pytest.raises(DimensionMismatch):
            expectation(QuantumState.basis(2, 0), Projector.identity(3))
        with pytest.raises(NotHermitian):
            expectation(QuantumState.basis(2, 0), [[0, 1], [0, 0]])

    def test_state_validation(self):
        with pytest.raises(InvalidState):
            QuantumState.pure([1, 1])
        with pytest.raises(InvalidState):
            QuantumState.mixed(np.diag([1.5, -0.5]))


# properties


def test_lattice_laws(rng):
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        p, q = random_projector_pair(rng, d)
        m = meet(p, q)
        assert m.rank >= p.rank + q.rank - d
        assert max(0, p.rank + q.rank - d) <= m.rank <= min(p.rank, q.rank)
        psi = QuantumState.pure(rng.standard_normal(d) + 1j * rng.standard_normal(d), normalize=True)
        assert expectation(psi, m) <= expectation(psi, p) + 1e-10
        assert expectation(psi, m) <= expectation(psi, q) + 1e-10
        assert m <= p and m <= q
        if m.rank:
            # a sub-projector of the meet lies below both, hence below the meet
            k = int(rng.integers(1, m.rank + 1))
            sub = Projector.from_orthonormal(m.basis @ random_unitary(rng, m.rank)[:, :k], d)
            assert sub <= p and sub <= q and sub <= m


def test_de_morgan(rng):
    for _ in range(300):
        d = int(rng.integers(2, 9))
        p, q = random_projector_pair(rng, d)
        dual = orthocomplement(meet(orthocomplement(p), orthocomplement(q)))
        assert np.max(np.abs(join(p, q).matrix - dual.matrix)) <= 1e-10


def test_orthogonal_projectors_commute(rng):
    for _ in range(200):
        d = int(rng.integers(2, 9))
        u = random_unitary(rng, d)
        k = int(rng.integers(0, d + 1))
        j = int(rng.integers(0, d - k + 1))
        p = Projector.from_orthonormal(u[:, :k], d)
        q = Projector.from_orthonormal(u[:, k : k + j], d)
        assert np.max(np.abs(p.matrix @ q.matrix), initial=0) < 1e-12
        assert commutes(p, q)


def test_expectation_linear_and_monotone(rng):
    for _ in range(100):
        d = int(rng.integers(2, 7))
        u = random_unitary(rng, d)
        k = int(rng.integers(0, d + 1))
        small = Projector.from_orthonormal(u[:, :k], d)
        big = Projector.from_orthonormal(u[:, : k + int(rng.integers(0, d - k + 1))], d)
        s1 = QuantumState.pure(rng.standard_normal(d) + 0j, normalize=True)
        s2 = QuantumState.pure(rng.standard_normal(d) + 1j * rng.standard_normal(d), normalize=True)
        t = rng.random()
        mix = QuantumState.mixed(t * s1.density + (1 - t) * s2.density)
        assert np.isclose(expectation(mix, big), t * expectation(s1, big) + (1 - t) * expectation(s2, big))
        assert expectation(s1, small) <= expectation(s1, big) + 1e-12
