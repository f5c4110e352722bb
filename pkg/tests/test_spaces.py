import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from kreinkit import (
    BallPoint,
    BlockOperator,
    NotAGraphError,
    Subspace,
    build_space,
    classify_operator,
    graph_from_subspace,
    graph_of,
    indefinite_product,
    invariance_residual,
    j_adjoint,
    operator_norm,
    subspace_signature,
)
from kreinkit.fixtures import random_ball_point, random_complex


def test_build_space_small_signatures():
    sp = build_space(1, 1)
    assert_allclose(sp.j, np.diag([-1.0, 1.0]))
    sp = build_space(0, 3)
    assert_allclose(sp.j, np.eye(3))
    sp = build_space(2, 3)
    eigs = np.linalg.eigvalsh(sp.j)
    assert np.sum(eigs < 0) == 2 and np.sum(eigs > 0) == 3


def test_build_space_rejects_zero_dimensions():
    with pytest.raises(ValueError):
        build_space(0, 0)
    with pytest.raises(ValueError):
        build_space(-1, 2)


def test_indefinite_product_signs():
    sp = build_space(1, 1)
    assert indefinite_product(sp, [1, 0], [1, 0]) == pytest.approx(-1)
    assert indefinite_product(sp, [0, 1], [0, 1]) == pytest.approx(1)
    assert indefinite_product(sp, [1, 1], [1, 1]) == pytest.approx(0)


def test_indefinite_product_dimension_mismatch():
    sp = build_space(1, 1)
    with pytest.raises(ValueError):
        indefinite_product(sp, [1, 0, 0], [1, 0])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_indefinite_product_self_is_real(seed):
    rng = np.random.default_rng(seed)
    sp = build_space(int(rng.integers(0, 4)), int(rng.integers(1, 5)))
    x = random_complex(rng, sp.n)
    val = indefinite_product(sp, x, x)
    assert abs(val.imag) <= 1e-14 * np.linalg.norm(x) ** 2


def test_j_adjoint_fixed_points():
    sp = build_space(2, 3)
    assert_allclose(j_adjoint(sp, sp.j), sp.j)
    assert_allclose(j_adjoint(sp, np.eye(5)), np.eye(5))


def test_j_adjoint_pairing_identity():
    # [Ax, y] = [x, A^# y] over random vector pairs
    rng = np.random.default_rng(11)
    sp = build_space(2, 3)
    a = random_complex(rng, (5, 5))
    adj = j_adjoint(sp, a)
    for _ in range(100):
        x = random_complex(rng, 5)
        y = random_complex(rng, 5)
        lhs = indefinite_product(sp, a @ x, y)
        rhs = indefinite_product(sp, x, adj @ y)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_j_adjoint_is_involution(seed):
    rng = np.random.default_rng(seed)
    sp = build_space(int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    a = random_complex(rng, (sp.n, sp.n))
    assert_allclose(j_adjoint(sp, j_adjoint(sp, a)), a, atol=0)


def test_classify_j_itself():
    sp = build_space(1, 1)
    cls = classify_operator(sp, sp.j)
    assert cls.j_selfadjoint and cls.j_unitary
    assert cls.j_dissipative and not cls.strongly_j_dissipative


def test_classify_i_times_j_strongly_dissipative():
    sp = build_space(1, 1)
    cls = classify_operator(sp, 1j * sp.j)
    assert cls.strongly_j_dissipative
    assert cls.dissipativity_margin == pytest.approx(1.0)


def test_classify_expanding():
    sp = build_space(1, 1)
    assert classify_operator(sp, sp.j).j_expanding  # J-unitaries expand with equality
    sp_def = build_space(0, 2)
    assert classify_operator(sp_def, 2.0 * np.eye(2)).j_expanding
    assert not classify_operator(sp_def, 0.5 * np.eye(2)).j_expanding


def test_classify_mobius_matrix_is_j_unitary():
    from kreinkit import mobius_matrix

    rng = np.random.default_rng(5)
    sp = build_space(2, 3)
    m = mobius_matrix(sp, random_ball_point(sp, rng, 0.7))
    assert classify_operator(sp, m).j_unitary


def test_block_operator_blocks_reassemble():
    rng = np.random.default_rng(1)
    sp = build_space(2, 3)
    a = random_complex(rng, (5, 5))
    op = BlockOperator(sp, a)
    assert op.a11.shape == (2, 2) and op.a12.shape == (2, 3)
    assert op.a21.shape == (3, 2) and op.a22.shape == (3, 3)
    assert_allclose(sp.assemble(op.a11, op.a12, op.a21, op.a22), a)


def test_ball_point_validation():
    sp = build_space(1, 1)
    BallPoint(sp, [[0.999]])
    BallPoint(sp, [[1.0]])  # closed ball
    with pytest.raises(ValueError):
        BallPoint(sp, [[1.1]])
    with pytest.raises(ValueError):
        BallPoint.strict(sp, [[1.0]])


def test_graph_of_zero_spans_h_minus():
    sp = build_space(2, 3)
    z = graph_of(sp, np.zeros((3, 2)))
    assert_allclose(z.basis[:2], np.eye(2))
    assert_allclose(z.basis[2:], 0)


def test_graph_of_scalar_gram():
    sp = build_space(1, 1)
    z = graph_of(sp, [[0.5]])
    gram = z.basis.conj().T @ sp.j @ z.basis
    assert gram[0, 0] == pytest.approx(-0.75)


def test_graph_gram_identity():
    # Z^H J Z = W^H W - I for any contraction, singular iff ||W|| = 1
    rng = np.random.default_rng(4)
    sp = build_space(2, 4)
    for norm in (0.3, 0.8, 1.0):
        w = random_ball_point(sp, rng, norm)
        z = graph_of(sp, w)
        gram = z.basis.conj().T @ sp.j @ z.basis
        assert_allclose(gram, w.conj().T @ w - np.eye(2), atol=1e-14)
        assert np.max(np.linalg.eigvalsh(gram)) <= 1e-12
        singular = np.min(np.abs(np.linalg.eigvalsh(gram))) < 1e-12
        assert singular == (norm == 1.0)


def test_graph_from_subspace_round_trip():
    sp = build_space(1, 1)
    assert_allclose(graph_from_subspace(sp, np.array([[1.0], [0.0]])), [[0.0]])
    assert_allclose(graph_from_subspace(sp, np.array([[1.0], [0.5]])), [[0.5]])
    rng = np.random.default_rng(9)
    sp = build_space(3, 4)
    w = random_ball_point(sp, rng, 0.6)
    t = random_complex(rng, (3, 3))  # any change of basis of the graph
    z = graph_of(sp, w).basis @ t
    assert_allclose(graph_from_subspace(sp, z), w, atol=1e-10)


def test_graph_from_subspace_rejects_h_plus():
    sp = build_space(1, 1)
    with pytest.raises(NotAGraphError):
        graph_from_subspace(sp, np.array([[0.0], [1.0]]))


def test_subspace_signature_labels():
    sp = build_space(2, 3)
    assert subspace_signature(sp, graph_of(sp, np.zeros((3, 2)))).is_negative
    sig = subspace_signature(build_space(1, 1), np.array([[1.0], [1.0]]))
    assert sig.n_null == 1
    h_plus = np.vstack([np.zeros((2, 3)), np.eye(3)])
    assert subspace_signature(sp, h_plus).n_pos == 3


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_subspace_signature_basis_independent(seed):
    rng = np.random.default_rng(seed)
    sp = build_space(2, 3)
    z = random_complex(rng, (5, 3))
    t = random_complex(rng, (3, 3)) + 2 * np.eye(3)
    assert subspace_signature(sp, z) == subspace_signature(sp, z @ t)


def test_invariance_residual_trivial_cases():
    sp = build_space(2, 3)
    assert invariance_residual(sp, sp.j, np.zeros((3, 2))) == 0.0
    rng = np.random.default_rng(2)
    w = random_ball_point(sp, rng, 0.9)
    assert invariance_residual(sp, np.eye(5), w) == 0.0


def test_invariance_residual_constructed_invariant_graph():
    # conjugate a block-diagonal matrix so that a prescribed graph is invariant
    rng = np.random.default_rng(3)
    sp = build_space(2, 3)
    w = random_ball_point(sp, rng, 0.5)
    z = graph_of(sp, w).basis
    comp = np.vstack([w.conj().T, np.eye(3)])  # the dual graph, a complement
    s = np.hstack([z, comp])
    blocks = np.diag(rng.standard_normal(5) + 1j * rng.standard_normal(5))
    a = s @ blocks @ np.linalg.inv(s)
    assert invariance_residual(sp, a, w) <= 1e-10 * operator_norm(a)


def test_operations_accept_wrapper_types():
    rng = np.random.default_rng(21)
    sp = build_space(1, 2)
    w = BallPoint(sp, random_ball_point(sp, rng, 0.4))
    op = BlockOperator(sp, 1j * sp.j)
    assert invariance_residual(sp, op, w) >= 0.0
    assert classify_operator(sp, op).strongly_j_dissipative
    assert subspace_signature(sp, graph_of(sp, w)).is_negative
    assert_allclose(graph_from_subspace(sp, graph_of(sp, w)), w.matrix)

    from kreinkit import mnps

    rep = mnps(sp, op)
    assert rep.certified


def test_subspace_rejects_rank_deficient_basis():
    sp = build_space(1, 2)
    with pytest.raises(ValueError):
        Subspace(sp, np.array([[1.0, 1.0], [0.0, 0.0], [1.0, 1.0]]))
