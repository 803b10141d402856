"""Assemblage containers, no-signalling validators, examples, and samplers.

An assemblage collects the conditional states steered onto a trusted quantum
system, indexed by the untrusted party's input and outcome and, in the
scenarios treated here, also by an input on the trusted side:

* bob-with-input members ``sigma_{a|x,y}`` carry the untrusted input ``x``,
  outcome ``a``, and trusted input ``y``;
* traditional members are the ``m_b = 1`` special case;
* sequential members ``sigma_{a1 a2|x1 x2}`` arise from two rounds of inputs
  and outcomes on the untrusted side;
* instrumental members ``sigma_{a|x}`` arise when the trusted input is wired
  to equal the untrusted outcome.

The module also provides the box-like and transpose-based example assemblages,
no-signalling extension tests backed by the in-house semidefinite solver,
correlation tables against trusted measurements, and seeded random samplers
for both quantum-realized and merely no-signalling assemblages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from steercert import sdp
from steercert.matcore import PAULIS, Array, is_psd, require_hermitian

TRADITIONAL = "traditional"
BWI = "bwi"
SEQUENTIAL = "sequential"
INSTRUMENTAL = "instrumental"

KINDS = (TRADITIONAL, BWI, SEQUENTIAL, INSTRUMENTAL)

#: Default tolerance for validation residuals.
VALIDATION_TOL = 1e-9


@dataclass(frozen=True)
class ScenarioShape:
    """Index ranges of a single-round steering scenario.

    ``n_a`` outcomes and ``m_a`` inputs on the untrusted side, ``m_b`` inputs
    on the trusted side, local dimension ``d``.  Traditional scenarios have
    ``m_b = 1``; instrumental scenarios identify the trusted input range with
    the outcome range, so ``m_b = n_a``.
    """

    n_a: int
    m_a: int
    m_b: int
    d: int
    kind: str = BWI

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        for label, value in (("n_a", self.n_a), ("m_a", self.m_a), ("m_b", self.m_b), ("d", self.d)):
            if value < 1:
                raise ValueError(f"{label} must be positive, got {value}")
        if self.kind == TRADITIONAL and self.m_b != 1:
            raise ValueError("traditional scenarios have a single trusted input")
        if self.kind == INSTRUMENTAL and self.m_b != self.n_a:
            raise ValueError(
                "instrumental scenarios wire the trusted input to the outcome, "
                f"so m_b must equal n_a (got m_b={self.m_b}, n_a={self.n_a})"
            )


@dataclass(frozen=True)
class SequentialShape:
    """Index ranges of a two-round scenario on the untrusted side."""

    n_a1: int
    m_x1: int
    n_a2: int
    m_x2: int
    d: int

    def __post_init__(self) -> None:
        for label, value in (
            ("n_a1", self.n_a1),
            ("m_x1", self.m_x1),
            ("n_a2", self.n_a2),
            ("m_x2", self.m_x2),
            ("d", self.d),
        ):
            if value < 1:
                raise ValueError(f"{label} must be positive, got {value}")


def _as_member(matrix: Array, d: int) -> Array:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (d, d):
        raise ValueError(f"member has shape {matrix.shape}, expected {(d, d)}")
    return matrix


@dataclass
class BwiAssemblage:
    """Members ``sigma_{a|x,y}`` keyed by (outcome, untrusted input, trusted input)."""

    shape: ScenarioShape
    members: dict[tuple[int, int, int], Array]

    def __post_init__(self) -> None:
        expected = {
            (a, x, y)
            for a in range(self.shape.n_a)
            for x in range(self.shape.m_a)
            for y in range(self.shape.m_b)
        }
        if set(self.members) != expected:
            raise ValueError("member keys do not match the scenario shape")
        self.members = {
            key: _as_member(mat, self.shape.d) for key, mat in self.members.items()
        }

    def member(self, a: int, x: int, y: int) -> Array:
        return self.members[(a, x, y)]

    def reduced_state(self, y: int, x: int = 0) -> Array:
        """State steered-to on average for trusted input ``y`` (x-independent when NS)."""
        return sum(self.member(a, x, y) for a in range(self.shape.n_a))

    def outcome_distribution(self) -> Array:
        """``p(a|x)`` from member traces at trusted input 0."""
        shape = self.shape
        table = np.zeros((shape.n_a, shape.m_a))
        for a in range(shape.n_a):
            for x in range(shape.m_a):
                table[a, x] = float(np.real(np.trace(self.member(a, x, 0))))
        return table


class TraditionalAssemblage(BwiAssemblage):
    """Single trusted input: members ``sigma_{a|x}`` stored at ``y = 0``."""

    @classmethod
    def from_members(
        cls, members: Mapping[tuple[int, int], Array], d: int | None = None
    ) -> "TraditionalAssemblage":
        keys = sorted(members)
        n_a = 1 + max(key[0] for key in keys)
        m_a = 1 + max(key[1] for key in keys)
        if d is None:
            d = int(np.asarray(next(iter(members.values()))).shape[0])
        shape = ScenarioShape(n_a=n_a, m_a=m_a, m_b=1, d=d, kind=TRADITIONAL)
        table = {(a, x, 0): np.asarray(members[(a, x)], dtype=complex) for a, x in keys}
        return cls(shape=shape, members=table)

    def traditional_member(self, a: int, x: int) -> Array:
        return self.member(a, x, 0)


@dataclass
class SequentialAssemblage:
    """Members ``sigma_{a1 a2|x1 x2}`` for two untrusted rounds."""

    shape: SequentialShape
    members: dict[tuple[int, int, int, int], Array]

    def __post_init__(self) -> None:
        expected = {
            (a1, a2, x1, x2)
            for a1 in range(self.shape.n_a1)
            for a2 in range(self.shape.n_a2)
            for x1 in range(self.shape.m_x1)
            for x2 in range(self.shape.m_x2)
        }
        if set(self.members) != expected:
            raise ValueError("member keys do not match the scenario shape")
        self.members = {
            key: _as_member(mat, self.shape.d) for key, mat in self.members.items()
        }

    def member(self, a1: int, a2: int, x1: int, x2: int) -> Array:
        return self.members[(a1, a2, x1, x2)]

    def first_round_member(self, a1: int, x1: int, x2: int = 0) -> Array:
        """Round-one member ``sum_{a2} sigma_{a1 a2|x1 x2}`` (x2-independent when NS)."""
        return sum(self.member(a1, a2, x1, x2) for a2 in range(self.shape.n_a2))

    def state(self) -> Array:
        """Total steered state (input-independent when NS)."""
        return sum(
            self.member(a1, a2, 0, 0)
            for a1 in range(self.shape.n_a1)
            for a2 in range(self.shape.n_a2)
        )


@dataclass
class InstrumentalAssemblage:
    """Members ``sigma_{a|x}`` with the trusted input wired to the outcome."""

    shape: ScenarioShape
    members: dict[tuple[int, int], Array]

    def __post_init__(self) -> None:
        if self.shape.kind != INSTRUMENTAL:
            raise ValueError("shape.kind must be instrumental")
        expected = {(a, x) for a in range(self.shape.n_a) for x in range(self.shape.m_a)}
        if set(self.members) != expected:
            raise ValueError("member keys do not match the scenario shape")
        self.members = {
            key: _as_member(mat, self.shape.d) for key, mat in self.members.items()
        }

    def member(self, a: int, x: int) -> Array:
        return self.members[(a, x)]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    """Per-constraint residuals of a no-signalling check."""

    passed: bool
    residuals: dict[str, float]
    violations: list[str]
    tol: float


def _member_residuals(matrices: Sequence[Array]) -> tuple[float, float]:
    """Worst hermiticity residue and worst negative eigenvalue over members."""
    herm = 0.0
    neg = 0.0
    for mat in matrices:
        herm = max(herm, float(np.linalg.norm(mat - mat.conj().T)))
        sym = 0.5 * (mat + mat.conj().T)
        low = float(np.linalg.eigvalsh(sym).min())
        neg = max(neg, -min(low, 0.0))
    return herm, neg


def _finish_report(residuals: dict[str, float], tol: float) -> ValidationReport:
    violations = [
        f"{name} residual {value:.3e} exceeds {tol:.1e}"
        for name, value in residuals.items()
        if value > tol
    ]
    return ValidationReport(
        passed=not violations, residuals=residuals, violations=violations, tol=tol
    )


def validate_ns_bwi(asm: BwiAssemblage, tol: float = VALIDATION_TOL) -> ValidationReport:
    """No-signalling check for bob-with-input (or traditional) assemblages.

    Members must be positive semidefinite; the summed state per trusted input
    must not depend on the untrusted input; member traces must not depend on
    the trusted input; and the total trace must be one.
    """
    shape = asm.shape
    herm, neg = _member_residuals(list(asm.members.values()))
    state_res = 0.0
    for y in range(shape.m_b):
        reference = asm.reduced_state(y, x=0)
        for x in range(1, shape.m_a):
            state_res = max(
                state_res, float(np.linalg.norm(asm.reduced_state(y, x=x) - reference))
            )
    trace_res = 0.0
    for a in range(shape.n_a):
        for x in range(shape.m_a):
            reference = np.trace(asm.member(a, x, 0))
            for y in range(1, shape.m_b):
                trace_res = max(
                    trace_res, abs(complex(np.trace(asm.member(a, x, y)) - reference))
                )
    norm_res = 0.0
    for x in range(shape.m_a):
        for y in range(shape.m_b):
            total = sum(np.trace(asm.member(a, x, y)) for a in range(shape.n_a))
            norm_res = max(norm_res, abs(complex(total) - 1.0))
    residuals = {
        "hermitian": herm,
        "psd": neg,
        "state_consistency": state_res,
        "trace_consistency": trace_res,
        "normalization": norm_res,
    }
    return _finish_report(residuals, tol)


def validate_ns_sequential(
    asm: SequentialAssemblage, tol: float = VALIDATION_TOL
) -> ValidationReport:
    """No-signalling check for two-round assemblages.

    The total state must not depend on either input, and each round-one
    member must not depend on the round-two input.
    """
    shape = asm.shape
    herm, neg = _member_residuals(list(asm.members.values()))
    state_res = 0.0
    reference_state = None
    for x1 in range(shape.m_x1):
        for x2 in range(shape.m_x2):
            total = sum(
                asm.member(a1, a2, x1, x2)
                for a1 in range(shape.n_a1)
                for a2 in range(shape.n_a2)
            )
            if reference_state is None:
                reference_state = total
            else:
                state_res = max(state_res, float(np.linalg.norm(total - reference_state)))
    round_res = 0.0
    for a1 in range(shape.n_a1):
        for x1 in range(shape.m_x1):
            reference = asm.first_round_member(a1, x1, x2=0)
            for x2 in range(1, shape.m_x2):
                round_res = max(
                    round_res,
                    float(np.linalg.norm(asm.first_round_member(a1, x1, x2=x2) - reference)),
                )
    assert reference_state is not None
    norm_res = abs(complex(np.trace(reference_state)) - 1.0)
    residuals = {
        "hermitian": herm,
        "psd": neg,
        "state_consistency": state_res,
        "round_one_consistency": round_res,
        "normalization": norm_res,
    }
    return _finish_report(residuals, tol)


def validate_instrumental(
    asm: InstrumentalAssemblage, tol: float = VALIDATION_TOL
) -> ValidationReport:
    """Positivity and per-input normalization of wired members.

    Wiring the trusted input to the outcome mixes different trusted inputs
    into the summed state, so that sum may depend on the untrusted input; the
    only trace condition inherited from a no-signalling parent is that each
    input's outcome weights sum to one.  Whether a full no-signalling parent
    exists is decided by :func:`instrumental_membership`.
    """
    shape = asm.shape
    herm, neg = _member_residuals(list(asm.members.values()))
    norm_res = 0.0
    for x in range(shape.m_a):
        total = sum(np.trace(asm.member(a, x)) for a in range(shape.n_a))
        norm_res = max(norm_res, abs(complex(total) - 1.0))
    residuals = {
        "hermitian": herm,
        "psd": neg,
        "normalization": norm_res,
    }
    return _finish_report(residuals, tol)


# ---------------------------------------------------------------------------
# Example assemblages
# ---------------------------------------------------------------------------


def _basis_state(d: int, index: int) -> Array:
    vec = np.zeros(d, dtype=complex)
    vec[index] = 1.0
    return np.outer(vec, vec.conj())


def pr_box_assemblage() -> BwiAssemblage:
    """Box-like assemblage built from the extremal binary no-signalling box.

    The member for outcome ``a`` and inputs ``(x, y)`` is half the projector
    onto the computational state ``a XOR (x AND y)``.
    """
    shape = ScenarioShape(n_a=2, m_a=2, m_b=2, d=2, kind=BWI)
    members = {
        (a, x, y): 0.5 * _basis_state(2, a ^ (x & y))
        for a in range(2)
        for x in range(2)
        for y in range(2)
    }
    return BwiAssemblage(shape=shape, members=members)


def pauli_transpose_assemblage() -> BwiAssemblage:
    """Pauli steering members at trusted input 0, their transposes at input 1.

    Member ``(a, x, y)`` equals ``(I + (-1)^(a + s) P_x) / 4`` where ``P_x``
    runs over the three Pauli matrices and the extra sign ``s`` flips exactly
    for the imaginary Pauli at trusted input 1.  That sign pattern makes the
    trusted input 1 members the exact transposes of the trusted input 0
    members, which is asserted at construction time together with every member
    being half a rank-one projector.
    """
    shape = ScenarioShape(n_a=2, m_a=3, m_b=2, d=2, kind=BWI)
    members: dict[tuple[int, int, int], Array] = {}
    for a in range(2):
        for x, pauli in enumerate(PAULIS):
            for y in range(2):
                flip = 1 if (x == 1 and y == 1) else 0
                members[(a, x, y)] = 0.25 * (np.eye(2) + (-1.0) ** (a + flip) * pauli)
    for a in range(2):
        for x in range(3):
            if not np.allclose(members[(a, x, 1)], members[(a, x, 0)].T, atol=1e-14):
                raise AssertionError("transpose relation between trusted inputs failed")
            values = np.linalg.eigvalsh(members[(a, x, 0)])
            if not np.allclose(np.sort(values), [0.0, 0.5], atol=1e-14):
                raise AssertionError("members must be half rank-one projectors")
    return BwiAssemblage(shape=shape, members=members)


def instrumental_from_bwi(asm: BwiAssemblage, tol: float = 1e-6) -> InstrumentalAssemblage:
    """Wire the trusted input to the untrusted outcome: keep ``sigma_{a|x,y=a}``.

    ``tol`` bounds the normalization drift accepted per untrusted input; the
    default admits numerically solved parents while still rejecting inputs
    whose outcome weights do not sum to one.
    """
    shape = asm.shape
    if shape.m_b < shape.n_a:
        raise ValueError(
            "wiring needs a trusted input for every outcome "
            f"(m_b={shape.m_b} < n_a={shape.n_a})"
        )
    members = {
        (a, x): asm.member(a, x, a)
        for a in range(shape.n_a)
        for x in range(shape.m_a)
    }
    out_shape = ScenarioShape(
        n_a=shape.n_a, m_a=shape.m_a, m_b=shape.n_a, d=shape.d, kind=INSTRUMENTAL
    )
    out = InstrumentalAssemblage(shape=out_shape, members=members)
    for x in range(shape.m_a):
        total = sum(np.trace(out.member(a, x)) for a in range(shape.n_a))
        if abs(complex(total) - 1.0) > tol:
            raise ValueError(
                "wired members lost normalization; the input assemblage is not "
                "no-signalling"
            )
    return out


def instrumental_pauli_assemblage() -> InstrumentalAssemblage:
    """The wired instrumental family of the transpose-based example."""
    return instrumental_from_bwi(pauli_transpose_assemblage())


# ---------------------------------------------------------------------------
# No-signalling extension problems
# ---------------------------------------------------------------------------


@dataclass
class MembershipReport:
    """Outcome of a set-membership test decided by a semidefinite program.

    ``margin`` is positive when the instance sits strictly inside the set and
    negative when no point of the set matches; ``witness`` carries the found
    element (when feasible) and ``certificate_y`` a separating functional on
    the problem's equality rows (when infeasible).
    """

    feasible: bool
    margin: float
    status: str
    residuals: dict[str, float]
    problem: sdp.SdpProblem
    witness: object | None = None
    certificate_y: Array | None = None


def _unit_entry(d: int, i: int, j: int) -> Array:
    """Coefficient matrix E with tr(E H) = H[i, j]."""
    out = np.zeros((d, d), dtype=complex)
    out[j, i] = 1.0
    return out


def ns_variable_blocks(
    builder: sdp.HermitianBlockBuilder, shape: ScenarioShape, prefix: str = "w"
) -> dict[tuple[int, int, int], str]:
    """Declare one Hermitian block per member and add the no-signalling rows.

    Returns the block names keyed by (outcome, untrusted input, trusted input).
    The rows are: summed state independent of the untrusted input, member
    traces independent of the trusted input, and total trace one.
    """
    d = shape.d
    names = {}
    for a in range(shape.n_a):
        for x in range(shape.m_a):
            for y in range(shape.m_b):
                name = f"{prefix}[{a}|{x},{y}]"
                builder.add_block(name, d)
                names[(a, x, y)] = name
    for y in range(shape.m_b):
        for x in range(1, shape.m_a):
            for i in range(d):
                for j in range(i, d):
                    unit = _unit_entry(d, i, j)
                    terms = [(names[(a, x, y)], unit) for a in range(shape.n_a)]
                    terms += [(names[(a, 0, y)], -unit) for a in range(shape.n_a)]
                    builder.add_equality(terms, 0.0)
    eye = np.eye(d, dtype=complex)
    for a in range(shape.n_a):
        for x in range(shape.m_a):
            for y in range(1, shape.m_b):
                builder.add_equality(
                    [(names[(a, x, y)], eye), (names[(a, x, 0)], -eye)], 0.0
                )
    builder.add_equality([(names[(a, 0, 0)], eye) for a in range(shape.n_a)], 1.0)
    return names


def instrumental_membership(
    asm: InstrumentalAssemblage,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> MembershipReport:
    """Decide whether wired members extend to a no-signalling assemblage.

    Searches for bob-with-input members ``w_{a|x,y}`` satisfying the
    no-signalling rows with ``w_{a|x,y=a}`` pinned to the given members; the
    wiring map then reproduces the input exactly.
    """
    shape = asm.shape
    d = shape.d
    builder = sdp.HermitianBlockBuilder()
    names = ns_variable_blocks(builder, shape)
    for a in range(shape.n_a):
        for x in range(shape.m_a):
            target = asm.member(a, x)
            for i in range(d):
                for j in range(i, d):
                    builder.add_equality(
                        [(names[(a, x, a)], _unit_entry(d, i, j))], complex(target[i, j])
                    )
    problem = builder.build()
    result = sdp.feasibility_phase1(problem, feas_tol=tol, max_iter=max_iter)
    witness = None
    if result.feasible and result.block_values is not None:
        members = {
            key: require_hermitian(
                builder.extract(result.block_values, name), tol=1e-6
            )
            for key, name in names.items()
        }
        witness = BwiAssemblage(shape=ScenarioShape(shape.n_a, shape.m_a, shape.m_b, d, BWI), members=members)
    return MembershipReport(
        feasible=result.feasible,
        margin=result.margin,
        status=result.status,
        residuals=result.residuals,
        problem=problem,
        witness=witness,
        certificate_y=result.certificate_y,
    )


# ---------------------------------------------------------------------------
# Correlation tables
# ---------------------------------------------------------------------------


def bell_correlations(
    asm: BwiAssemblage, povms: Sequence[Sequence[Array]], tol: float = 1e-9
) -> Array:
    """Joint table ``p(a, b|x, y)`` from measuring the members.

    ``povms[y]`` lists the trusted effects for input ``y``; each list must sum
    to the identity.  A single trivial effect reproduces the outcome
    distribution ``p(a|x)`` in the ``b = 0`` slice.
    """
    shape = asm.shape
    if len(povms) != shape.m_b:
        raise ValueError(f"need one effect list per trusted input ({shape.m_b})")
    n_b = len(povms[0])
    eye = np.eye(shape.d)
    for y, effects in enumerate(povms):
        if len(effects) != n_b:
            raise ValueError("every trusted input needs the same number of effects")
        total = sum(np.asarray(e, dtype=complex) for e in effects)
        if np.linalg.norm(total - eye) > tol:
            raise ValueError(f"effects for trusted input {y} do not sum to identity")
        for b, effect in enumerate(effects):
            if not is_psd(np.asarray(effect, dtype=complex), tol=tol):
                raise ValueError(f"effect {b} for trusted input {y} is not positive")
    table = np.zeros((shape.n_a, n_b, shape.m_a, shape.m_b))
    for a in range(shape.n_a):
        for x in range(shape.m_a):
            for y in range(shape.m_b):
                member = asm.member(a, x, y)
                for b, effect in enumerate(povms[y]):
                    value = complex(np.trace(np.asarray(effect, dtype=complex) @ member))
                    if abs(value.imag) > 1e-10:
                        raise ValueError(
                            f"correlation ({a},{b}|{x},{y}) has imaginary part {value.imag:.3e}"
                        )
                    table[a, b, x, y] = value.real
    return table


def chsh_value(table: Array) -> float:
    """Two-input two-outcome correlator combination ``E00 + E01 + E10 - E11``."""
    table = np.asarray(table, dtype=float)
    if table.shape != (2, 2, 2, 2):
        raise ValueError(f"need a (2, 2, 2, 2) table, got {table.shape}")
    value = 0.0
    for x in range(2):
        for y in range(2):
            correlator = 0.0
            for a in range(2):
                for b in range(2):
                    correlator += (-1.0) ** (a + b) * table[a, b, x, y]
            value += -correlator if (x, y) == (1, 1) else correlator
    return value


# ---------------------------------------------------------------------------
# Random models
# ---------------------------------------------------------------------------


def _haar_unitary(rng: np.random.Generator, n: int) -> Array:
    """Haar-distributed unitary via QR with the standard phase fix."""
    gauss = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(gauss)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def _random_povm(rng: np.random.Generator, d: int, n_out: int) -> list[Array]:
    """Random POVM from a unitary dilation with an auxiliary outcome register."""
    unitary = _haar_unitary(rng, d * n_out)
    isometry = unitary[:, :d]
    effects = []
    for a in range(n_out):
        block = isometry[a * d : (a + 1) * d, :]
        effects.append(block.conj().T @ block)
    return effects


def _random_kraus_family(rng: np.random.Generator, d: int, n_out: int) -> list[Array]:
    """Kraus operators of a random instrument with ``n_out`` classical outcomes."""
    unitary = _haar_unitary(rng, d * n_out)
    isometry = unitary[:, :d]
    return [isometry[a * d : (a + 1) * d, :] for a in range(n_out)]


def _random_channel(rng: np.random.Generator, d: int) -> list[Array]:
    """Kraus operators of a random channel with an environment of dimension ``d``."""
    return _random_kraus_family(rng, d, d)


def _random_pure_state(rng: np.random.Generator, d_a: int, d_b: int) -> Array:
    vec = rng.normal(size=d_a * d_b) + 1j * rng.normal(size=d_a * d_b)
    vec /= np.linalg.norm(vec)
    return vec


def random_quantum_bwi(shape: ScenarioShape, seed: int) -> BwiAssemblage:
    """Quantum-realized bob-with-input assemblage, reproducible from the seed.

    A random pure state is shared between an untrusted system of dimension
    ``d`` and the trusted system; the untrusted side measures random POVMs
    from unitary dilations, and each trusted input applies a random channel
    with an environment of dimension ``d`` to the trusted share.
    """
    rng = np.random.default_rng(seed)
    d = shape.d
    vec = _random_pure_state(rng, d, d)
    rho = np.outer(vec, vec.conj())
    povms = [_random_povm(rng, d, shape.n_a) for _ in range(shape.m_a)]
    channels = [_random_channel(rng, d) for _ in range(shape.m_b)]
    members = {}
    for x in range(shape.m_a):
        for a in range(shape.n_a):
            steered = np.einsum(
                "ij,ikjl->kl", povms[x][a].T, rho.reshape(d, d, d, d), optimize=True
            )
            for y in range(shape.m_b):
                out = sum(k @ steered @ k.conj().T for k in channels[y])
                members[(a, x, y)] = 0.5 * (out + out.conj().T)
    return BwiAssemblage(shape=shape, members=members)


def random_quantum_sequential(shape: SequentialShape, seed: int) -> SequentialAssemblage:
    """Quantum-realized two-round assemblage, reproducible from the seed.

    The untrusted side applies a random instrument in round one and a random
    POVM on the post-instrument system in round two.
    """
    rng = np.random.default_rng(seed)
    d = shape.d
    vec = _random_pure_state(rng, d, d)
    rho = np.outer(vec, vec.conj())
    kraus = [_random_kraus_family(rng, d, shape.n_a1) for _ in range(shape.m_x1)]
    povms = [_random_povm(rng, d, shape.n_a2) for _ in range(shape.m_x2)]
    members = {}
    for x1 in range(shape.m_x1):
        for a1 in range(shape.n_a1):
            for x2 in range(shape.m_x2):
                for a2 in range(shape.n_a2):
                    effect = (
                        kraus[x1][a1].conj().T @ povms[x2][a2] @ kraus[x1][a1]
                    )
                    steered = np.einsum(
                        "ij,ikjl->kl", effect.T, rho.reshape(d, d, d, d), optimize=True
                    )
                    members[(a1, a2, x1, x2)] = 0.5 * (steered + steered.conj().T)
    return SequentialAssemblage(shape=shape, members=members)


def _random_psd(rng: np.random.Generator, d: int, mix: float) -> Array:
    gauss = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    raw = gauss @ gauss.conj().T
    raw /= np.trace(raw).real
    return (1.0 - mix) * raw + mix * np.eye(d) / d


def random_ns_traditional(shape: ScenarioShape, seed: int, mix: float = 0.35) -> TraditionalAssemblage:
    """No-signalling traditional assemblage sampled around the maximally mixed one.

    Random positive drafts are projected onto the equal-state rows by shifting
    each input's deficit uniformly over outcomes, rescaled to unit trace, and
    rejected until every member stays positive semidefinite.
    """
    if shape.m_b != 1:
        raise ValueError("traditional sampling needs m_b = 1")
    rng = np.random.default_rng(seed)
    d = shape.d
    for _ in range(1000):
        draft = {
            (a, x): _random_psd(rng, d, mix) / shape.n_a
            for a in range(shape.n_a)
            for x in range(shape.m_a)
        }
        target = sum(draft.values()) / shape.m_a
        members = {}
        for x in range(shape.m_a):
            deficit = target - sum(draft[(a, x)] for a in range(shape.n_a))
            for a in range(shape.n_a):
                members[(a, x)] = draft[(a, x)] + deficit / shape.n_a
        scale = float(np.trace(target).real)
        members = {key: mat / scale for key, mat in members.items()}
        if all(is_psd(mat, tol=1e-12) for mat in members.values()):
            return TraditionalAssemblage.from_members(members, d)
    raise RuntimeError("sampling did not produce a positive assemblage; raise mix")


def random_ns_sequential(shape: SequentialShape, seed: int, mix: float = 0.5) -> SequentialAssemblage:
    """No-signalling two-round assemblage sampled around the maximally mixed one.

    Drafts are projected onto the two no-signalling row families (round-one
    members independent of the round-two input, total state independent of
    both inputs) by uniform shifts, rescaled, and rejected until positive.
    """
    rng = np.random.default_rng(seed)
    d = shape.d
    n_pairs = shape.n_a1 * shape.n_a2
    for _ in range(1000):
        draft = {
            (a1, a2, x1, x2): _random_psd(rng, d, mix) / n_pairs
            for a1 in range(shape.n_a1)
            for a2 in range(shape.n_a2)
            for x1 in range(shape.m_x1)
            for x2 in range(shape.m_x2)
        }
        # Round-one targets: average over x2 of the round-one marginals.
        round_one = {}
        for a1 in range(shape.n_a1):
            for x1 in range(shape.m_x1):
                marginals = [
                    sum(draft[(a1, a2, x1, x2)] for a2 in range(shape.n_a2))
                    for x2 in range(shape.m_x2)
                ]
                round_one[(a1, x1)] = sum(marginals) / shape.m_x2
        state = sum(
            sum(round_one[(a1, x1)] for a1 in range(shape.n_a1))
            for x1 in range(shape.m_x1)
        ) / shape.m_x1
        members = {}
        for a1 in range(shape.n_a1):
            for x1 in range(shape.m_x1):
                target_one = round_one[(a1, x1)] + (
                    state - sum(round_one[(b1, x1)] for b1 in range(shape.n_a1))
                ) / shape.n_a1
                for x2 in range(shape.m_x2):
                    marginal = sum(
                        draft[(a1, a2, x1, x2)] for a2 in range(shape.n_a2)
                    )
                    shift = (target_one - marginal) / shape.n_a2
                    for a2 in range(shape.n_a2):
                        members[(a1, a2, x1, x2)] = draft[(a1, a2, x1, x2)] + shift
        scale = float(np.trace(state).real)
        members = {key: mat / scale for key, mat in members.items()}
        if all(is_psd(mat, tol=1e-12) for mat in members.values()):
            return SequentialAssemblage(shape=shape, members=members)
    raise RuntimeError("sampling did not produce a positive assemblage; raise mix")
