"""Tests for the explicit quantum realizations and their reconstructions."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steercert import ghjw
from steercert.assemblages import (
    TRADITIONAL,
    ScenarioShape,
    SequentialAssemblage,
    SequentialShape,
    TraditionalAssemblage,
    random_ns_sequential,
    random_ns_traditional,
    validate_ns_bwi,
    validate_ns_sequential,
)
from steercert.matcore import PAULIS


def roundtrip_gap(original, rebuilt):
    return max(
        float(np.max(np.abs(rebuilt.members[key] - original.members[key])))
        for key in original.members
    )


# ---------------------------------------------------------------------------
# Traditional scenarios
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=0, max_value=10_000),
    st.integers(min_value=1, max_value=3),
)
def test_traditional_roundtrip_is_exact(seed, m_a):
    shape = ScenarioShape(2, m_a, 1, 2, kind=TRADITIONAL)
    asm = random_ns_traditional(shape, seed)
    realization = ghjw.ghjw_traditional(asm)
    rebuilt = ghjw.reconstruct_traditional(realization)
    assert roundtrip_gap(asm, rebuilt) <= 1e-10
    assert validate_ns_bwi(rebuilt, tol=1e-8).passed


def test_traditional_realization_is_well_formed():
    asm = random_ns_traditional(ScenarioShape(2, 3, 1, 2, kind=TRADITIONAL), seed=4)
    realization = ghjw.ghjw_traditional(asm)
    assert np.linalg.norm(realization.state) == pytest.approx(1.0, abs=1e-12)
    for effects in realization.povms.values():
        total = sum(effects)
        assert np.allclose(total, np.eye(2), atol=1e-9)
        for effect in effects:
            assert np.linalg.eigvalsh(effect).min() >= -1e-10


def test_projective_family_uses_the_maximally_entangled_state():
    members = {}
    for x in range(2):
        for a in range(2):
            members[(a, x)] = 0.25 * (np.eye(2) + (-1.0) ** a * PAULIS[2 * x]).T
    asm = TraditionalAssemblage.from_members(members, d=2)
    realization = ghjw.ghjw_traditional(asm)
    target = np.zeros(4, dtype=complex)
    target[0] = target[3] = 1.0 / np.sqrt(2.0)
    assert np.allclose(realization.state, target, atol=1e-12)
    rebuilt = ghjw.reconstruct_traditional(realization)
    assert roundtrip_gap(asm, rebuilt) <= 1e-12


def test_rank_deficient_reduced_state_completes_into_outcome_zero():
    members = {
        (0, 0): np.diag([0.6, 0.0]).astype(complex),
        (1, 0): np.diag([0.4, 0.0]).astype(complex),
    }
    asm = TraditionalAssemblage.from_members(members, d=2)
    realization = ghjw.ghjw_traditional(asm)
    # The kernel of the reduced state is attached to outcome zero.
    assert realization.povms[0][0][1, 1] == pytest.approx(1.0, abs=1e-12)
    assert realization.povms[0][1][1, 1] == pytest.approx(0.0, abs=1e-12)
    rebuilt = ghjw.reconstruct_traditional(realization)
    assert roundtrip_gap(asm, rebuilt) <= 1e-12


def test_support_leak_is_rejected():
    members = {
        (0, 0): np.diag([0.6, 0.0]).astype(complex),
        (1, 0): np.diag([0.4, 0.0]).astype(complex),
        (0, 1): np.diag([0.5, 0.0]).astype(complex),
        (1, 1): np.diag([0.0, 0.5]).astype(complex),
    }
    asm = TraditionalAssemblage.from_members(members, d=2)
    with pytest.raises(ValueError):
        ghjw.ghjw_traditional(asm)


# ---------------------------------------------------------------------------
# Sequential scenarios
# ---------------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_sequential_roundtrip_is_exact(seed):
    shape = SequentialShape(2, 2, 2, 2, 2)
    asm = random_ns_sequential(shape, seed)
    realization = ghjw.ghjw_sequential(asm)
    rebuilt = ghjw.reconstruct_sequential(realization)
    assert roundtrip_gap(asm, rebuilt) <= 1e-10
    assert validate_ns_sequential(rebuilt, tol=1e-8).passed


def test_sequential_realization_is_well_formed():
    asm = random_ns_sequential(SequentialShape(2, 2, 2, 2, 2), seed=9)
    realization = ghjw.ghjw_sequential(asm)
    assert np.linalg.norm(realization.state) == pytest.approx(1.0, abs=1e-12)
    for elements in realization.kraus.values():
        total = sum(k.conj().T @ k for k in elements)
        assert np.allclose(total, np.eye(2), atol=1e-9)
    assert set(realization.povms) == {
        (a1, x1, x2) for a1 in range(2) for x1 in range(2) for x2 in range(2)
    }
    for effects in realization.povms.values():
        assert np.allclose(sum(effects), np.eye(2), atol=1e-9)
        for effect in effects:
            assert np.linalg.eigvalsh(effect).min() >= -1e-10


def test_trivial_second_round_reduces_to_the_first_round():
    shape = SequentialShape(2, 2, 1, 1, 2)
    base = random_ns_traditional(ScenarioShape(2, 2, 1, 2, kind=TRADITIONAL), seed=13)
    members = {
        (a1, 0, x1, 0): base.traditional_member(a1, x1)
        for a1 in range(2)
        for x1 in range(2)
    }
    asm = SequentialAssemblage(shape=shape, members=members)
    realization = ghjw.ghjw_sequential(asm)
    for key, effects in realization.povms.items():
        assert len(effects) == 1
        assert np.allclose(effects[0], np.eye(2), atol=1e-10)
    rebuilt = ghjw.reconstruct_sequential(realization)
    assert roundtrip_gap(asm, rebuilt) <= 1e-10
