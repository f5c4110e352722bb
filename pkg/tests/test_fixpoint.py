import numpy as np
import pytest
from numpy.testing import assert_allclose

from kreinkit import (
    GroupRep,
    build_space,
    common_fixed_point,
    common_fixed_point_words,
    cyclic,
    doubled_form_matrix,
    fixture_conjugated_rep,
    fixture_double_rep,
    fractional_linear,
    group_average_metric,
    invariance_residual,
    invariant_dual_pair,
    mobius_matrix,
    mobius_norm,
    named_group,
    operator_norm,
    orbit_radius,
    radius_from_norm,
    rep_validate,
    subspace_signature,
    unitarize,
    word_average_metric,
)
from kreinkit.fixtures import (
    cyclic_character_rep,
    random_ball_point,
    random_conjugated_rep,
    random_j_unitary,
    random_unitary_rep,
)


def block_unitary_rep(group, space, rng):
    um = random_unitary_rep(group, space.n_minus, rng)
    up = random_unitary_rep(group, space.n_plus, rng)
    mats = np.array(
        [
            space.assemble(
                um[g],
                np.zeros((space.n_minus, space.n_plus)),
                np.zeros((space.n_plus, space.n_minus)),
                up[g],
            )
            for g in range(group.order)
        ]
    )
    return GroupRep(group, space, mats)


class TestRepValidate:
    def test_block_unitary_rep_is_clean(self):
        rng = np.random.default_rng(0)
        rep = block_unitary_rep(cyclic(4), build_space(1, 2), rng)
        diag = rep_validate(rep)
        assert diag.homomorphism_defect <= 1e-12
        assert diag.identity_defect <= 1e-12
        assert diag.j_unitarity_defect <= 1e-12

    def test_conjugated_rep_stays_j_unitary(self):
        rng = np.random.default_rng(1)
        rep, _ = random_conjugated_rep(named_group("S3"), build_space(2, 3), rng)
        diag = rep_validate(rep)
        assert diag.ok(1e-10)

    def test_corrupted_assignment_flagged(self):
        rng = np.random.default_rng(2)
        rep = block_unitary_rep(cyclic(4), build_space(1, 2), rng)
        mats = rep.matrices.copy()
        mats[1] = mats[2]  # break the homomorphism
        bad = GroupRep(rep.group, rep.space, mats)
        assert rep_validate(bad).homomorphism_defect > 1e-3


class TestOrbitRadius:
    def test_block_unitary_rep_fixes_zero(self):
        rng = np.random.default_rng(3)
        rep = block_unitary_rep(cyclic(3), build_space(1, 2), rng)
        assert orbit_radius(rep) <= 1e-12

    def test_conjugated_rep_orbit(self):
        rng = np.random.default_rng(4)
        group = cyclic(4)
        sp = build_space(1, 2)
        rep, center = random_conjugated_rep(group, sp, rng, center_norm=0.5)
        r = orbit_radius(rep)
        assert r <= radius_from_norm(rep.norm) + 1e-9

    def test_single_j_unitary_bound(self):
        rng = np.random.default_rng(5)
        sp = build_space(2, 3)
        for _ in range(20):
            u = random_j_unitary(sp, rng)
            r = operator_norm(fractional_linear(sp, u, np.zeros((3, 2))))
            assert r <= radius_from_norm(operator_norm(u)) + 1e-9

    def test_scalar_involution_closed_form(self):
        # U = M_a diag(1,-1) M_{-a} on the disk: phi_U(0) = 2a/(1+a^2),
        # ||U|| = (1+a)/(1-a); both derived by composition algebra
        sp = build_space(1, 1)
        group = cyclic(2)
        for a in (0.2, 0.5, 0.8):
            center = np.array([[a]])
            rep = fixture_conjugated_rep(
                group,
                np.array([np.eye(1), np.eye(1)]),
                np.array([np.eye(1), -np.eye(1)]),
                center,
            )
            assert orbit_radius(rep) == pytest.approx(2 * a / (1 + a * a), abs=1e-12)
            assert rep.norm == pytest.approx((1 + a) / (1 - a), abs=1e-10)
            report = common_fixed_point(rep)
            assert_allclose(report.k, center, atol=1e-10)


class TestGroupAverageMetric:
    def test_unitary_rep_gives_identity(self):
        rng = np.random.default_rng(6)
        rep = block_unitary_rep(cyclic(4), build_space(1, 2), rng)
        assert_allclose(group_average_metric(rep), np.eye(3), atol=1e-12)

    def test_invariance_and_spectral_pinch(self):
        rng = np.random.default_rng(7)
        rep, _ = random_conjugated_rep(named_group("D4"), build_space(2, 3), rng)
        b = group_average_metric(rep)
        norm = rep.norm
        for mat in rep.matrices:
            assert operator_norm(mat.conj().T @ b @ mat - b) <= 1e-10 * norm**2
        eigs = np.linalg.eigvalsh(b)
        assert eigs.min() >= 1.0 / norm**2 - 1e-10
        assert eigs.max() <= norm**2 + 1e-10

    def test_trivial_group(self):
        sp = build_space(1, 1)
        rep = GroupRep(cyclic(1), sp, np.eye(2)[None, :, :])
        assert_allclose(group_average_metric(rep), np.eye(2))

    def test_commutation_with_rep(self):
        # B^{-1} J commutes with every pi(g); this is what makes the pencil work
        rng = np.random.default_rng(8)
        rep, _ = random_conjugated_rep(named_group("Q8"), build_space(1, 3), rng)
        b = group_average_metric(rep)
        c = np.linalg.solve(b, rep.space.j)
        for mat in rep.matrices:
            assert operator_norm(c @ mat - mat @ c) <= 1e-9 * rep.norm**2


class TestCommonFixedPoint:
    def test_unitary_rep_fixes_origin(self):
        rng = np.random.default_rng(9)
        rep = block_unitary_rep(named_group("S3"), build_space(2, 2), rng)
        report = common_fixed_point(rep)
        assert report.certified
        assert report.k_norm <= 1e-10

    def test_conjugated_fixture_recovers_center(self):
        # multiplicity-free character blocks make the invariant negative
        # subspace unique, so K must come back as the conjugation center
        group = cyclic(6)
        u_minus = cyclic_character_rep(group, [1])
        u_plus = cyclic_character_rep(group, [2, 3])
        rng = np.random.default_rng(10)
        sp = build_space(1, 2)
        center = random_ball_point(sp, rng, 0.55)
        rep = fixture_conjugated_rep(group, u_minus, u_plus, center)
        report = common_fixed_point(rep)
        assert report.certified
        assert report.max_map_residual <= 1e-8
        assert report.k_norm <= operator_norm(center) + 1e-8
        assert_allclose(report.k, center, atol=1e-6)

    def test_cyclic_group_generated_by_one_j_unitary(self):
        # powers of one J-unitary of finite order
        rng = np.random.default_rng(11)
        sp = build_space(1, 2)
        group = cyclic(8)
        a = random_ball_point(sp, rng, 0.4)
        block = sp.assemble(
            [[np.exp(2j * np.pi / 8)]],
            np.zeros((1, 2)),
            np.zeros((2, 1)),
            np.diag(np.exp(2j * np.pi * np.array([3, 5]) / 8)),
        )
        u = mobius_matrix(sp, a) @ block @ mobius_matrix(sp, -a)
        mats = np.array([np.linalg.matrix_power(u, j) for j in range(8)])
        rep = GroupRep(group, sp, mats)
        report = common_fixed_point(rep)
        assert report.certified
        assert report.max_map_residual <= 1e-8

    def test_fixed_point_is_invariant_graph(self):
        rng = np.random.default_rng(12)
        rep, _ = random_conjugated_rep(named_group("D4"), build_space(2, 2), rng)
        report = common_fixed_point(rep)
        for mat in rep.matrices:
            assert invariance_residual(rep.space, mat, report.k) <= 1e-8


class TestWordAverage:
    def test_finite_group_closure_matches_exact(self):
        rng = np.random.default_rng(13)
        rep, _ = random_conjugated_rep(cyclic(4), build_space(1, 2), rng)
        gen = rep.matrices[1]  # generator of Z4
        b_words, defect = word_average_metric(rep.space, [gen], length_cap=8)
        assert defect <= 1e-10
        assert_allclose(b_words, group_average_metric(rep), atol=1e-10)

    def test_word_mode_certifies_by_residual(self):
        rng = np.random.default_rng(14)
        rep, _ = random_conjugated_rep(cyclic(6), build_space(1, 2), rng)
        report = common_fixed_point_words(rep, [rep.matrices[1]], length_cap=8)
        assert report.certified
        assert report.max_map_residual <= 1e-8


class TestInvariantDualPair:
    def test_zero_fixed_point_gives_coordinate_pair(self):
        rng = np.random.default_rng(15)
        rep = block_unitary_rep(cyclic(4), build_space(1, 2), rng)
        positive, negative = invariant_dual_pair(rep)
        assert positive.dim == 2 and negative.dim == 1
        assert abs(negative.basis[1:, :]).max() <= 1e-10
        assert abs(positive.basis[:1, :]).max() <= 1e-10

    def test_conjugated_pair_properties(self):
        rng = np.random.default_rng(16)
        rep, center = random_conjugated_rep(named_group("S3"), build_space(2, 3), rng)
        positive, negative = invariant_dual_pair(rep)
        sp = rep.space
        assert subspace_signature(sp, positive).is_positive
        assert subspace_signature(sp, negative).is_negative
        assert positive.dim == sp.n_plus and negative.dim == sp.n_minus
        combined = np.hstack([positive.basis, negative.basis])
        assert np.linalg.matrix_rank(combined) == sp.n
        for basis in (positive.basis, negative.basis):
            q = np.linalg.qr(basis)[0]
            proj = q @ q.conj().T
            for mat in rep.matrices:
                img = mat @ basis
                assert operator_norm(img - proj @ img) <= 1e-8 * operator_norm(img)

    def test_pair_matches_mobius_image_of_coordinates(self):
        group = cyclic(5)
        u_minus = cyclic_character_rep(group, [1])
        u_plus = cyclic_character_rep(group, [2, 3])
        rng = np.random.default_rng(17)
        sp = build_space(1, 2)
        center = random_ball_point(sp, rng, 0.5)
        rep = fixture_conjugated_rep(group, u_minus, u_plus, center)
        positive, negative = invariant_dual_pair(rep)
        m = mobius_matrix(sp, center)
        # negative part = M_A . H-; positive part = M_A . H+
        target_neg = m[:, :1]
        target_pos = m[:, 1:]
        for got, want in ((negative.basis, target_neg), (positive.basis, target_pos)):
            qg = np.linalg.qr(got)[0]
            qw = np.linalg.qr(want)[0]
            assert operator_norm(qw - qg @ (qg.conj().T @ qw)) <= 1e-8


class TestUnitarize:
    def test_already_unitary(self):
        rng = np.random.default_rng(18)
        rep = block_unitary_rep(cyclic(4), build_space(1, 2), rng)
        report = unitarize(rep)
        assert report.certified
        assert report.cond == pytest.approx(1.0, abs=1e-10)
        assert report.bound == pytest.approx(3.0)
        assert_allclose(report.v, np.eye(3), atol=1e-10)

    def test_conjugated_norm_point_six(self):
        group = cyclic(4)
        u_minus = cyclic_character_rep(group, [1])
        u_plus = cyclic_character_rep(group, [2, 3])
        rng = np.random.default_rng(19)
        sp = build_space(1, 2)
        center = random_ball_point(sp, rng, 0.6)
        rep = fixture_conjugated_rep(group, u_minus, u_plus, center)
        report = unitarize(rep)
        assert report.certified
        assert report.max_unitarity_defect <= 1e-8
        assert report.cond <= 1.6 / 0.4 + 1e-8

    def test_batch_cond_bound(self):
        rng = np.random.default_rng(20)
        groups = [named_group(n) for n in ("Z2", "Z4", "S3", "D4", "Q8")]
        for i in range(50):
            group = groups[i % len(groups)]
            k = 1 + i % 3
            sp = build_space(k, k + int(rng.integers(1, 4)))
            rep, _ = random_conjugated_rep(group, sp, rng, center_norm=rng.uniform(0.2, 0.6))
            report = unitarize(rep)
            assert report.certified
            assert report.cond <= 2 * rep.norm**2 + 1 + 1e-6
            for u in report.unitaries:
                assert operator_norm(u.conj().T @ u - np.eye(sp.n)) <= 1e-8


class TestFixtures:
    def test_conjugated_rep_identity_group(self):
        group = cyclic(1)
        rep = fixture_conjugated_rep(
            group, np.eye(1)[None], np.eye(2)[None], np.zeros((2, 1))
        )
        assert_allclose(rep.matrices[0], np.eye(3), atol=1e-14)

    def test_conjugated_rep_zero_center_is_block_diagonal(self):
        rng = np.random.default_rng(21)
        group = cyclic(3)
        um = random_unitary_rep(group, 1, rng)
        up = random_unitary_rep(group, 2, rng)
        rep = fixture_conjugated_rep(group, um, up, np.zeros((2, 1)))
        for g in range(3):
            assert abs(rep.matrices[g][:1, 1:]).max() <= 1e-14
            assert abs(rep.matrices[g][1:, :1]).max() <= 1e-14

    def test_conjugated_rep_norm_bound(self):
        rng = np.random.default_rng(22)
        group = named_group("Z4")
        sp = build_space(1, 2)
        rep, center = random_conjugated_rep(group, sp, rng, center_norm=0.5)
        assert rep_validate(rep).ok(1e-10)
        assert rep.norm <= mobius_norm(sp, center).norm ** 2 + 1e-10

    def test_double_rep_form_matrix(self):
        form = doubled_form_matrix(2)
        assert_allclose(form, np.block([[np.zeros((2, 2)), np.eye(2)],
                                        [np.eye(2), np.zeros((2, 2))]]))

    def test_double_rep_of_unitary_is_unitary(self):
        rng = np.random.default_rng(23)
        group = cyclic(4)
        sp = build_space(1, 1)
        rep = block_unitary_rep(group, sp, rng)
        tau = fixture_double_rep(rep)
        for mat in tau.matrices:
            assert operator_norm(mat.conj().T @ mat - np.eye(4)) <= 1e-12

    def test_double_rep_preserves_doubled_form(self):
        # non-unitary invertible rep of Z6, e.g. a unitary conjugated by
        # a diagonal stretch; tau must preserve the skew pairing, i.e. be
        # J-unitary in the diagonalizing coordinates
        group = cyclic(6)
        t = np.diag([2.0, 0.5])
        u = np.diag(np.exp(2j * np.pi * np.array([1, 5]) / 6))
        mats = np.array(
            [t @ np.linalg.matrix_power(u, j) @ np.linalg.inv(t) for j in range(6)]
        )
        rep = GroupRep(group, build_space(0, 2), mats)
        tau = fixture_double_rep(rep)
        assert tau.space.n_minus == 2 and tau.space.n_plus == 2
        diag = rep_validate(tau)
        assert diag.homomorphism_defect <= 1e-10
        assert diag.j_unitarity_defect <= 1e-10
        # equivalently, the raw blocks preserve the x/y pairing
        form = doubled_form_matrix(2)
        for g in range(6):
            raw = np.block(
                [
                    [mats[g], np.zeros((2, 2))],
                    [np.zeros((2, 2)), mats[group.inv(g)].conj().T],
                ]
            )
            assert operator_norm(raw.conj().T @ form @ raw - form) <= 1e-10
