"""Tests for map descriptions, dual measurements, Choi matrices, and the
pure-member certificate."""

import numpy as np
import pytest

from steercert import ptp
from steercert.assemblages import (
    BWI,
    BwiAssemblage,
    ScenarioShape,
    bell_correlations,
    chsh_value,
    pauli_transpose_assemblage,
    random_quantum_bwi,
)
from steercert.matcore import PAULIS

X, Y, Z = PAULIS
EYE = np.eye(2, dtype=complex)
TSIRELSON = 2.0 * np.sqrt(2.0)


def random_effect(rng):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = g @ g.conj().T
    vals, vecs = np.linalg.eigh(h)
    return (vecs * rng.uniform(size=2)) @ vecs.conj().T


def dichotomic_povm(rng):
    effect = random_effect(rng)
    return [effect, EYE - effect]


class TestMapSpec:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown map kind"):
            ptp.LinearMapSpec(kind="conjugation")

    def test_identity_takes_no_images(self):
        with pytest.raises(ValueError, match="do not take Pauli images"):
            ptp.LinearMapSpec(kind=ptp.IDENTITY, pauli_images={"I": EYE})

    def test_images_must_cover_basis(self):
        with pytest.raises(ValueError, match="exactly I, X, Y, Z"):
            ptp.pauli_action({"I": EYE, "X": X})

    def test_identity_image_pinned(self):
        with pytest.raises(ValueError, match="identity to itself"):
            ptp.pauli_action({"I": X, "X": X, "Y": Y, "Z": Z})

    def test_images_must_be_traceless(self):
        with pytest.raises(ValueError, match="traceless"):
            ptp.pauli_action({"I": EYE, "X": X + 0.2 * EYE, "Y": Y, "Z": Z})

    def test_images_must_be_qubit_sized(self):
        with pytest.raises(ValueError, match="2x2"):
            ptp.pauli_action({"I": EYE, "X": np.eye(3), "Y": Y, "Z": Z})


class TestApplyMap:
    def test_transpose_flips_y_component(self):
        before = 0.25 * (EYE - Y)
        after = ptp.apply_map(ptp.transpose_map(), before)
        assert np.linalg.norm(after - 0.25 * (EYE + Y)) < 1e-14

    def test_identity_returns_copy(self):
        matrix = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
        out = ptp.apply_map(ptp.identity_map(), matrix)
        out[0, 0] = -5.0
        assert matrix[0, 0] == 1.0

    def test_transpose_handles_any_dimension(self):
        rng = np.random.default_rng(5)
        matrix = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.array_equal(ptp.apply_map(ptp.transpose_map(), matrix), matrix.T)

    def test_pauli_action_is_qubit_only(self):
        spec = ptp.pauli_action({"I": EYE, "X": X, "Y": -Y, "Z": Z})
        with pytest.raises(ValueError, match="2x2"):
            ptp.apply_map(spec, np.eye(3))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            ptp.apply_map(ptp.identity_map(), np.ones((2, 3)))

    def test_pauli_action_matches_transpose(self):
        spec = ptp.pauli_action({"I": EYE, "X": X, "Y": -Y, "Z": Z})
        rng = np.random.default_rng(11)
        for _ in range(10):
            matrix = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            assert np.linalg.norm(ptp.apply_map(spec, matrix) - matrix.T) < 1e-13


class TestPositivity:
    def test_transpose_transfer_is_y_flip(self):
        transfer = ptp.transfer_matrix(ptp.transpose_map())
        assert np.linalg.norm(transfer - np.diag([1.0, 1.0, -1.0, 1.0])) < 1e-14

    def test_transpose_is_positive(self):
        assert ptp.is_positive_map(ptp.transpose_map())

    def test_duplicate_images_overstretch_the_ball(self):
        spec = ptp.pauli_action({"I": EYE, "X": X, "Y": X, "Z": Z})
        norm = np.linalg.norm(ptp.bloch_matrix(spec), ord=2)
        assert norm == pytest.approx(np.sqrt(2.0), abs=1e-12)
        assert not ptp.is_positive_map(spec)

    def test_shrinking_map_is_positive(self):
        spec = ptp.pauli_action({"I": EYE, "X": 0.6 * X, "Y": -0.5 * Y, "Z": 0.7 * Z})
        assert ptp.is_positive_map(spec)


class TestDual:
    def test_transpose_fixes_computational_basis(self):
        povm = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
        dual = ptp.dual_povm(ptp.transpose_map(), povm)
        assert max(np.linalg.norm(a - b) for a, b in zip(povm, dual)) < 1e-14

    def test_transpose_swaps_y_basis(self):
        povm = [0.5 * (EYE + Y), 0.5 * (EYE - Y)]
        dual = ptp.dual_povm(ptp.transpose_map(), povm)
        assert np.linalg.norm(dual[0] - povm[1]) < 1e-14
        assert np.linalg.norm(dual[1] - povm[0]) < 1e-14

    def test_duality_identity(self):
        spec = ptp.pauli_action({"I": EYE, "X": 0.6 * X + 0.2 * Z, "Y": -0.5 * Y, "Z": 0.7 * Z})
        dual = ptp.dual_map(spec)
        rng = np.random.default_rng(23)
        for _ in range(20):
            effect = random_effect(rng)
            state = random_effect(rng)
            state = state / np.trace(state)
            forward = np.trace(effect @ ptp.apply_map(spec, state))
            pulled = np.trace(ptp.apply_map(dual, effect) @ state)
            assert abs(forward - pulled) < 1e-12

    def test_input_povm_is_validated(self):
        with pytest.raises(ValueError, match="not positive"):
            ptp.dual_povm(ptp.transpose_map(), [-X @ X, EYE])
        with pytest.raises(ValueError, match="sum to the identity"):
            ptp.dual_povm(ptp.transpose_map(), [EYE, EYE])

    def test_dual_output_is_a_povm(self):
        spec = ptp.pauli_action({"I": EYE, "X": 0.6 * X, "Y": -0.5 * Y, "Z": 0.7 * Z})
        rng = np.random.default_rng(29)
        dual = ptp.dual_povm(spec, dichotomic_povm(rng))
        total = sum(dual)
        assert np.linalg.norm(total - EYE) < 1e-9
        for effect in dual:
            assert np.linalg.eigvalsh(effect).min() > -1e-9


class TestChoi:
    def test_transpose_choi_has_negative_eigenvalue(self):
        result = ptp.choi(ptp.transpose_map())
        assert result.map_dimension == 2
        assert result.min_eigenvalue() == pytest.approx(-1.0, abs=1e-12)
        assert not result.is_positive()
        assert result.trace_residual() < 1e-12
        assert result.trace_preservation_residual() < 1e-12

    def test_pauli_form_of_transpose_matches(self):
        spec = ptp.pauli_action({"I": EYE, "X": X, "Y": -Y, "Z": Z})
        direct = ptp.choi(ptp.transpose_map())
        assert np.linalg.norm(ptp.choi(spec).matrix - direct.matrix) < 1e-12

    def test_identity_choi_is_positive(self):
        result = ptp.choi(ptp.identity_map())
        assert result.is_positive()
        assert result.trace_residual() < 1e-12

    def test_transpose_choi_in_dimension_three(self):
        result = ptp.choi(ptp.transpose_map(), d=3)
        assert result.min_eigenvalue() == pytest.approx(-1.0, abs=1e-12)
        assert result.trace_residual() < 1e-12

    def test_pauli_action_choi_is_qubit_only(self):
        spec = ptp.pauli_action({"I": EYE, "X": X, "Y": -Y, "Z": Z})
        with pytest.raises(ValueError, match="qubit"):
            ptp.choi(spec, d=3)


class TestBellModel:
    def test_model_reproduces_example_assemblage(self):
        induced = ptp.model_assemblage(ptp.transpose_bell_spec())
        example = pauli_transpose_assemblage()
        for a in range(2):
            for x in range(3):
                for y in range(2):
                    gap = np.linalg.norm(induced.member(a, x, y) - example.member(a, x, y))
                    assert gap < 1e-12

    def test_dual_path_equals_direct_path(self):
        spec = ptp.transpose_bell_spec()
        bases = [
            [0.5 * (EYE + X), 0.5 * (EYE - X)],
            [0.5 * (EYE + Y), 0.5 * (EYE - Y)],
        ]
        result = ptp.ptp_bell_model(spec, bases)
        assert result.table.shape == (2, 2, 3, 2, 2)
        assert np.max(np.abs(result.table.sum(axis=(0, 1)) - 1.0)) < 1e-12
        for z, effects in enumerate(bases):
            direct = bell_correlations(result.assemblage, [effects, effects])
            assert np.max(np.abs(result.table[:, :, :, :, z] - direct)) < 1e-10

    def test_non_positive_map_rejected(self):
        base = ptp.transpose_bell_spec()
        bad = ptp.pauli_action({"I": EYE, "X": X, "Y": X, "Z": Z})
        spec = ptp.PtpModelSpec(state=base.state, povms=base.povms, maps=[ptp.identity_map(), bad])
        povm = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
        with pytest.raises(ValueError, match="not positive"):
            ptp.ptp_bell_model(spec, [povm])

    def test_malformed_trusted_measurement_rejected(self):
        spec = ptp.transpose_bell_spec()
        with pytest.raises(ValueError, match="sum to the identity"):
            ptp.ptp_bell_model(spec, [[EYE, EYE]])

    def test_sampled_tables_respect_the_quantum_ceiling(self):
        spec = ptp.transpose_bell_spec()
        induced = ptp.model_assemblage(spec)
        rng = np.random.default_rng(31)
        settings = [(y, z) for y in range(2) for z in range(2)]
        worst = 0.0
        for _ in range(60):
            pair = [dichotomic_povm(rng) for _ in range(2)]
            result = ptp.ptp_bell_model(spec, pair)
            for z, effects in enumerate(pair):
                direct = bell_correlations(induced, [effects, effects])
                assert np.max(np.abs(result.table[:, :, :, :, z] - direct)) < 1e-10
            for x1 in range(3):
                for x2 in range(3):
                    if x1 == x2:
                        continue
                    for i, s1 in enumerate(settings):
                        for s2 in settings[i + 1:]:
                            for b1, b2 in ((s1, s2), (s2, s1)):
                                sub = np.zeros((2, 2, 2, 2))
                                for bi, (yy, zz) in enumerate((b1, b2)):
                                    sub[:, :, 0, bi] = result.table[:, :, x1, yy, zz]
                                    sub[:, :, 1, bi] = result.table[:, :, x2, yy, zz]
                                worst = max(worst, abs(chsh_value(sub)))
        assert worst <= TSIRELSON + 1e-6


class TestPureStateCertificate:
    def test_example_is_certified_post_quantum(self):
        report = ptp.pure_state_lemma_check(pauli_transpose_assemblage(), y_ref=1)
        assert report.status == ptp.POST_QUANTUM
        assert report.min_eigenvalue == pytest.approx(-1.0, abs=1e-9)
        images = report.maps[0].pauli_images
        assert np.linalg.norm(images["X"] - X) < 1e-10
        assert np.linalg.norm(images["Y"] + Y) < 1e-10
        assert np.linalg.norm(images["Z"] - Z) < 1e-10

    def test_certificate_is_reference_independent_here(self):
        report = ptp.pure_state_lemma_check(pauli_transpose_assemblage(), y_ref=0)
        assert report.status == ptp.POST_QUANTUM
        assert report.min_eigenvalue == pytest.approx(-1.0, abs=1e-9)

    def test_input_independent_members_give_no_certificate(self):
        example = pauli_transpose_assemblage()
        members = {
            (a, x, y): example.member(a, x, 0)
            for a in range(2)
            for x in range(3)
            for y in range(2)
        }
        flat = BwiAssemblage(shape=example.shape, members=members)
        report = ptp.pure_state_lemma_check(flat, y_ref=0)
        assert report.status == ptp.NO_CERTIFICATE
        assert report.min_eigenvalue > -1e-9

    def test_unitary_rotation_gives_no_certificate(self):
        example = pauli_transpose_assemblage()
        theta = 0.3
        u = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]],
            dtype=complex,
        )
        members = {}
        for a in range(2):
            for x in range(3):
                base = example.member(a, x, 0)
                members[(a, x, 0)] = base
                members[(a, x, 1)] = u @ base @ u.conj().T
        rotated = BwiAssemblage(shape=example.shape, members=members)
        report = ptp.pure_state_lemma_check(rotated, y_ref=0)
        assert report.status == ptp.NO_CERTIFICATE

    def test_deficient_span_is_reported_not_guessed(self):
        members = {}
        for a in range(2):
            projector = 0.5 * np.diag([1.0 - a, float(a)]).astype(complex)
            for y in range(2):
                members[(a, 0, y)] = projector
        shape = ScenarioShape(n_a=2, m_a=1, m_b=2, d=2, kind=BWI)
        report = ptp.pure_state_lemma_check(BwiAssemblage(shape=shape, members=members))
        assert report.status == ptp.INCONCLUSIVE
        assert "span" in report.note

    def test_mixed_reference_members_rejected(self):
        shape = ScenarioShape(n_a=2, m_a=2, m_b=2, d=2, kind=BWI)
        mixed = random_quantum_bwi(shape, seed=3)
        with pytest.raises(ValueError, match="pure"):
            ptp.pure_state_lemma_check(mixed, y_ref=0)

    def test_qubit_members_required(self):
        shape = ScenarioShape(n_a=2, m_a=2, m_b=2, d=3, kind=BWI)
        with pytest.raises(ValueError, match="qubit"):
            ptp.pure_state_lemma_check(random_quantum_bwi(shape, seed=1))

    def test_reference_input_range_checked(self):
        with pytest.raises(ValueError, match="outside range"):
            ptp.pure_state_lemma_check(pauli_transpose_assemblage(), y_ref=5)
