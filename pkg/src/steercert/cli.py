"""Command-line front end: validate, bound, certify, realize, reproduce.

Every subcommand emits a single report document, as plain text or JSON, that
echoes the command line, digests its inputs, and carries named results,
residuals, and per-solve statistics.  Reports are deterministic for fixed
inputs and seed (wall-clock fields aside).

Exit codes: 0 when the requested check passes, 1 when an analysis reaches a
negative verdict, 2 for unusable input, 3 when a solver fails to converge.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from steercert import serialize
from steercert.assemblages import (
    BWI,
    INSTRUMENTAL,
    SEQUENTIAL,
    TRADITIONAL,
    VALIDATION_TOL,
    BwiAssemblage,
    InstrumentalAssemblage,
    ScenarioShape,
    SequentialAssemblage,
    SequentialShape,
    TraditionalAssemblage,
    bell_correlations,
    chsh_value,
    instrumental_from_bwi,
    instrumental_membership,
    instrumental_pauli_assemblage,
    pauli_transpose_assemblage,
    pr_box_assemblage,
    random_ns_sequential,
    random_ns_traditional,
    random_quantum_bwi,
    validate_instrumental,
    validate_ns_bwi,
    validate_ns_sequential,
)
from steercert.ghjw import (
    ghjw_sequential,
    ghjw_traditional,
    reconstruct_sequential,
    reconstruct_traditional,
)
from steercert.matcore import PAULIS
from steercert.ptp import (
    INCONCLUSIVE,
    POST_QUANTUM,
    choi,
    pauli_action,
    ptp_bell_model,
    pure_state_lemma_check,
    transpose_bell_spec,
)
from steercert.steering import (
    InstrumentalFunctional,
    SolverFailure,
    SteeringFunctional,
    build_qtilde_problem,
    canonical_functional,
    canonical_instrumental_functional,
    evaluate,
    lhs_bound,
    lhs_membership,
    ns_bound,
    qtilde_instrumental_bound,
    qtilde_membership,
    qtilde_solution,
)

EXIT_PASS = 0
EXIT_ANALYTIC = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3

TSIRELSON = 2.0 * np.sqrt(2.0)

# Membership margins within solver accuracy of zero mean "on the boundary";
# only a decisively negative margin is accepted as an infeasibility certificate.
DECISIVE_MARGIN = 1e-6

BUILTIN_ASSEMBLAGES: dict[str, Callable[[], Any]] = {
    "builtin:pr-box": pr_box_assemblage,
    "builtin:pauli-transpose": pauli_transpose_assemblage,
    "builtin:instrumental-pauli": instrumental_pauli_assemblage,
}

BOUND_CHOICES = ("lhs", "ns", "qtilde", "qtilde-instrumental")


class CliError(Exception):
    """A failure with a designated exit code and a user-facing message."""

    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


# ---------------------------------------------------------------------------
# Report documents
# ---------------------------------------------------------------------------


def _jsonable(value: Any) -> Any:
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(entry) for entry in value.tolist()]
    if isinstance(value, dict):
        return {str(key): _jsonable(entry) for key, entry in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(entry) for entry in value]
    raise TypeError(f"cannot serialize report value of type {type(value).__name__}")


def _format_scalar(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


@dataclass
class ReportDocument:
    """One command's structured output: results, residuals, solve statistics."""

    command: str = ""
    inputs: dict[str, str] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    solver: list[dict[str, Any]] = field(default_factory=list)
    wall_time: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": dict(self.inputs),
            "results": _jsonable(self.results),
            "residuals": {key: float(val) for key, val in self.residuals.items()},
            "solver": _jsonable(self.solver),
            "wall_time_s": round(self.wall_time, 3),
        }

    def render_text(self) -> str:
        lines = [f"command: {self.command}"]
        if self.inputs:
            lines.append("inputs:")
            for name, digest in self.inputs.items():
                lines.append(f"  {name}: {digest}")
        if self.results:
            lines.append("results:")
            for key, value in self.results.items():
                lines.extend(_render_result(key, value, indent=2))
        if self.residuals:
            lines.append("residuals:")
            for key, value in self.residuals.items():
                lines.append(f"  {key}: {value:.3e}")
        if self.solver:
            lines.append("solver:")
            for entry in self.solver:
                parts = [f"{key}={_format_scalar(val)}" for key, val in entry.items()]
                lines.append("  " + " ".join(parts))
        lines.append(f"wall time [s]: {self.wall_time:.2f}")
        return "\n".join(lines)


def _render_result(key: str, value: Any, indent: int) -> list[str]:
    pad = " " * indent
    if isinstance(value, dict):
        lines = [f"{pad}{key}:"]
        for sub_key, sub_value in value.items():
            lines.extend(_render_result(str(sub_key), sub_value, indent + 2))
        return lines
    if isinstance(value, list) and value and all(
        isinstance(entry, dict) and "name" in entry and "passed" in entry
        for entry in value
    ):
        lines = [f"{pad}{key}:"]
        for entry in value:
            verdict = "PASS" if entry["passed"] else "FAIL"
            lines.append(f"{pad}  {verdict} {entry['name']}: {entry.get('detail', '')}")
        return lines
    if isinstance(value, (list, tuple, np.ndarray)):
        return [f"{pad}{key}: {json.dumps(_jsonable(value))}"]
    return [f"{pad}{key}: {_format_scalar(value)}"]


def _timed(solver_log: list[dict[str, Any]], context: str, action: Callable[[], Any]) -> Any:
    start = time.perf_counter()
    try:
        result = action()
    except SolverFailure as exc:
        solver_log.append(
            {
                "context": context,
                "status": getattr(exc.solution, "status", "unknown"),
                "seconds": round(time.perf_counter() - start, 3),
            }
        )
        raise CliError(EXIT_SOLVER, f"{context}: {exc}") from exc
    solver_log.append(
        {
            "context": context,
            "status": "optimal",
            "seconds": round(time.perf_counter() - start, 3),
        }
    )
    return result


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------


def _load_json_file(path: str) -> Any:
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_INPUT, f"malformed JSON in {path} at byte {exc.pos}: {exc.msg}"
        ) from exc


def _digest_file(path: str) -> str:
    with open(path, "rb") as handle:
        return "sha256:" + hashlib.sha256(handle.read()).hexdigest()


def _resolve_assemblage(ref: str) -> tuple[Any, dict[str, str]]:
    if ref.startswith("builtin:"):
        factory = BUILTIN_ASSEMBLAGES.get(ref)
        if factory is None:
            known = ", ".join(sorted(BUILTIN_ASSEMBLAGES))
            raise CliError(EXIT_INPUT, f"unknown builtin {ref!r}; available: {known}")
        return factory(), {ref: "builtin"}
    data = _load_json_file(ref)
    try:
        asm = serialize.assemblage_from_json(data)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"{ref}: {exc}") from exc
    return asm, {ref: _digest_file(ref)}


def _resolve_functional(ref: str, which: str) -> tuple[Any, dict[str, str]]:
    if ref == "builtin:canonical":
        if which == "qtilde-instrumental":
            return canonical_instrumental_functional(), {ref: "builtin"}
        return canonical_functional(), {ref: "builtin"}
    if ref.startswith("builtin:"):
        raise CliError(
            EXIT_INPUT, f"unknown builtin functional {ref!r}; available: builtin:canonical"
        )
    data = _load_json_file(ref)
    try:
        functional = serialize.functional_from_json(data)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"{ref}: {exc}") from exc
    return functional, {ref: _digest_file(ref)}


def _scenario_kind(asm: Any) -> str:
    if isinstance(asm, SequentialAssemblage):
        return SEQUENTIAL
    return asm.shape.kind


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    asm, inputs = _resolve_assemblage(args.target)
    doc = ReportDocument(inputs=inputs)
    kind = _scenario_kind(asm)
    if args.scenario is not None and args.scenario != kind:
        raise CliError(
            EXIT_INPUT, f"input is a {kind} assemblage, not {args.scenario}"
        )
    tol = VALIDATION_TOL if args.tol is None else args.tol
    if isinstance(asm, SequentialAssemblage):
        report = validate_ns_sequential(asm, tol=tol)
    elif isinstance(asm, InstrumentalAssemblage):
        report = validate_instrumental(asm, tol=tol)
    else:
        report = validate_ns_bwi(asm, tol=tol)
    doc.results = {
        "scenario": kind,
        "tolerance": tol,
        "passed": report.passed,
        "violations": sorted(report.violations),
    }
    doc.residuals = {key: float(val) for key, val in sorted(report.residuals.items())}
    return doc, EXIT_PASS if report.passed else EXIT_ANALYTIC


def cmd_bounds(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    functional, inputs = _resolve_functional(args.target, args.which)
    doc = ReportDocument(inputs=inputs)
    tol = 1e-8 if args.tol is None else args.tol
    if args.which == "qtilde-instrumental":
        if not isinstance(functional, InstrumentalFunctional):
            raise CliError(EXIT_INPUT, "this bound needs an instrumental functional")
    elif not isinstance(functional, SteeringFunctional):
        raise CliError(EXIT_INPUT, f"the {args.which} bound needs a steering functional")
    doc.results["which"] = args.which
    if args.which == "lhs":
        value, model = _timed(
            doc.solver,
            "hidden-state bound",
            lambda: lhs_bound(functional, feas_tol=tol, gap_tol=tol),
        )
        realized = evaluate(functional, model.assemblage(functional.shape))
        doc.residuals["witness_gap"] = abs(realized - value)
        doc.residuals["weight_total"] = abs(sum(model.weights()) - 1.0)
    elif args.which == "ns":
        value = _timed(
            doc.solver,
            "no-signalling bound",
            lambda: ns_bound(functional, feas_tol=tol, gap_tol=tol),
        )
    elif args.which == "qtilde":
        value, moment = _timed(
            doc.solver,
            "relaxation bound",
            lambda: qtilde_solution(functional, feas_tol=tol, gap_tol=tol),
        )
        doc.results["embedded_side"] = build_qtilde_problem(functional).block_dims[0]
        for key, residual in sorted(moment.residuals().items()):
            doc.residuals[key] = float(residual)
    else:
        value = _timed(
            doc.solver,
            "wired relaxation bound",
            lambda: qtilde_instrumental_bound(functional, feas_tol=tol, gap_tol=tol),
        )
    doc.results["value"] = float(value)
    return doc, EXIT_PASS


def _computational_basis(d: int) -> list[np.ndarray]:
    effects = []
    for k in range(d):
        effect = np.zeros((d, d), dtype=complex)
        effect[k, k] = 1.0
        effects.append(effect)
    return effects


def cmd_certify(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    asm, inputs = _resolve_assemblage(args.target)
    doc = ReportDocument(inputs=inputs)
    if not isinstance(asm, BwiAssemblage):
        raise CliError(
            EXIT_INPUT, "certification expects an assemblage with a trusted input"
        )
    tol = 1e-8 if args.tol is None else args.tol
    validation = validate_ns_bwi(asm, tol=max(tol, VALIDATION_TOL))
    if not validation.passed:
        raise CliError(
            EXIT_INPUT,
            "assemblage violates no-signalling: " + ", ".join(sorted(validation.violations)),
        )
    shape = asm.shape
    memberships: dict[str, Any] = {}
    lhs = _timed(doc.solver, "hidden-state membership", lambda: lhs_membership(asm, tol=tol))
    memberships["lhs"] = {"feasible": lhs.feasible, "margin": float(lhs.margin)}
    certificates: list[dict[str, Any]] = []
    if lhs.feasible:
        doc.results["classification"] = "LHS"
    else:
        qt = _timed(doc.solver, "relaxation membership", lambda: qtilde_membership(asm, tol=tol))
        memberships["qtilde"] = {"feasible": qt.feasible, "margin": float(qt.margin)}
        if qt.margin < -max(DECISIVE_MARGIN, tol):
            certificates.append(
                {"kind": "qtilde-infeasible", "margin": float(qt.margin)}
            )
        if shape.d == 2 and shape.n_a == 2 and shape.m_a >= 2 and shape.m_b >= 2:
            basis = _computational_basis(2)
            table = bell_correlations(asm, [basis] * shape.m_b)
            chsh = float(chsh_value(table[:, :, :2, :2]))
            doc.results["bell"] = {
                "basis": "computational",
                "chsh": chsh,
                "table": np.round(table, 12),
            }
            if chsh > TSIRELSON + 1e-6:
                certificates.append({"kind": "bell-violation", "chsh": chsh})
        try:
            lemma = pure_state_lemma_check(asm)
        except ValueError as exc:
            doc.results["choi_check"] = f"skipped: {exc}"
        else:
            doc.results["choi_check"] = lemma.status
            if lemma.status == POST_QUANTUM:
                certificates.append(
                    {
                        "kind": "choi",
                        "min_eigenvalue": float(lemma.min_eigenvalue),
                        "reference_input": lemma.y_reference,
                    }
                )
            elif lemma.status == INCONCLUSIVE and lemma.note:
                doc.results["choi_check"] = f"{lemma.status}: {lemma.note}"
        doc.results["classification"] = (
            "post-quantum" if certificates else "steerable-possibly-quantum"
        )
    doc.results["certificates"] = certificates
    doc.results["memberships"] = memberships
    return doc, EXIT_PASS


def cmd_ghjw(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    asm, inputs = _resolve_assemblage(args.target)
    doc = ReportDocument(inputs=inputs)
    kind = _scenario_kind(asm)
    wanted = args.scenario
    if wanted is not None and wanted != kind:
        raise CliError(EXIT_INPUT, f"input is a {kind} assemblage, not {wanted}")
    tol = VALIDATION_TOL if args.tol is None else args.tol
    if isinstance(asm, SequentialAssemblage):
        validation = validate_ns_sequential(asm, tol=tol)
        if not validation.passed:
            raise CliError(
                EXIT_INPUT,
                "assemblage violates no-signalling: "
                + ", ".join(sorted(validation.violations)),
            )
        try:
            realization = ghjw_sequential(asm)
        except ValueError as exc:
            raise CliError(EXIT_INPUT, f"no realization: {exc}") from exc
        rebuilt = reconstruct_sequential(realization)
        roundtrip = max(
            float(np.linalg.norm(rebuilt.member(*key) - asm.member(*key)))
            for key in asm.members
        )
        completeness = 0.0
        eye = np.eye(realization.d)
        for elements in realization.kraus.values():
            total = sum(el.conj().T @ el for el in elements)
            completeness = max(completeness, float(np.linalg.norm(total - eye)))
        for effects in realization.povms.values():
            total = sum(effects)
            completeness = max(completeness, float(np.linalg.norm(total - eye)))
    elif isinstance(asm, TraditionalAssemblage):
        validation = validate_ns_bwi(asm, tol=tol)
        if not validation.passed:
            raise CliError(
                EXIT_INPUT,
                "assemblage violates no-signalling: "
                + ", ".join(sorted(validation.violations)),
            )
        try:
            realization = ghjw_traditional(asm)
        except ValueError as exc:
            raise CliError(EXIT_INPUT, f"no realization: {exc}") from exc
        rebuilt = reconstruct_traditional(realization)
        roundtrip = max(
            float(
                np.linalg.norm(
                    rebuilt.traditional_member(a, x) - asm.traditional_member(a, x)
                )
            )
            for a in range(asm.shape.n_a)
            for x in range(asm.shape.m_a)
        )
        completeness = max(
            float(np.linalg.norm(sum(effects) - np.eye(realization.d)))
            for effects in realization.povms.values()
        )
    else:
        raise CliError(
            EXIT_INPUT,
            f"realizations are built for traditional or sequential assemblages, not {kind}",
        )
    doc.results["scenario"] = kind
    doc.results["realization"] = serialize.realization_to_json(realization)
    doc.residuals["roundtrip"] = roundtrip
    doc.residuals["completeness"] = completeness
    return doc, EXIT_PASS


# ---------------------------------------------------------------------------
# Reproduction battery
# ---------------------------------------------------------------------------


def _random_psd_functional(shape: ScenarioShape, seed: int) -> SteeringFunctional:
    rng = np.random.default_rng(seed)
    coeffs = {}
    for a in range(shape.n_a):
        for x in range(shape.m_a):
            for y in range(shape.m_b):
                g = rng.normal(size=(shape.d, shape.d)) + 1j * rng.normal(
                    size=(shape.d, shape.d)
                )
                coeffs[(a, x, y)] = g @ g.conj().T / shape.d
    return SteeringFunctional(shape=shape, coeffs=coeffs)


def _criterion(name: str, passed: bool, detail: str) -> dict[str, Any]:
    return {"name": name, "passed": bool(passed), "detail": detail}


def run_reproduction(seed: int = 0) -> list[dict[str, Any]]:
    """The full battery of headline checks, one verdict per criterion."""
    out: list[dict[str, Any]] = []
    functional = canonical_functional()
    example = pauli_transpose_assemblage()

    start = time.perf_counter()
    lhs_value, _ = lhs_bound(functional)
    elapsed = time.perf_counter() - start
    out.append(
        _criterion(
            "hidden-state bound",
            abs(lhs_value - 1.2679) <= 1e-3 and elapsed < 30.0,
            f"value {lhs_value:.9f} vs 1.2679 +/- 1e-3 in {elapsed:.2f} s",
        )
    )

    side = int(build_qtilde_problem(functional).block_dims[0])
    start = time.perf_counter()
    qt_value, _ = qtilde_solution(functional)
    elapsed = time.perf_counter() - start
    out.append(
        _criterion(
            "relaxation bound",
            abs(qt_value - 0.4135) <= 5e-3 and side == 48 and elapsed < 60.0,
            f"value {qt_value:.9f} vs 0.4135 +/- 5e-3, embedded side {side}, "
            f"in {elapsed:.2f} s",
        )
    )

    ns_value = ns_bound(functional)
    out.append(
        _criterion(
            "no-signalling bound",
            abs(ns_value) <= 1e-6,
            f"value {ns_value:.3e} within 1e-6 of zero",
        )
    )

    example_value = evaluate(functional, example)
    margin = qt_value - abs(example_value)
    out.append(
        _criterion(
            "example value and margin",
            abs(example_value) <= 1e-10 and margin >= 0.4,
            f"value {example_value:.3e} within 1e-10, margin {margin:.4f} >= 0.4",
        )
    )

    pr = pr_box_assemblage()
    basis = _computational_basis(2)
    table = bell_correlations(pr, [basis, basis])
    expected = np.zeros_like(table)
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if (a + b) % 2 == (x & y):
                        expected[a, b, x, y] = 0.5
    table_exact = bool(np.array_equal(table, expected))
    chsh = float(chsh_value(table))
    out.append(
        _criterion(
            "box statistics",
            table_exact and abs(chsh - 4.0) <= 1e-12,
            f"table exact: {table_exact}, value {chsh:.12f} vs 4 within 1e-12",
        )
    )

    start = time.perf_counter()
    worst_round = 0.0
    worst_complete = 0.0
    for i in range(100):
        shape = ScenarioShape(n_a=2, m_a=1 + i % 3, m_b=1, d=2, kind=TRADITIONAL)
        sample = random_ns_traditional(shape, seed=seed * 7919 + i)
        realization = ghjw_traditional(sample)
        rebuilt = reconstruct_traditional(realization)
        worst_round = max(
            worst_round,
            max(
                float(
                    np.linalg.norm(
                        rebuilt.traditional_member(a, x) - sample.traditional_member(a, x)
                    )
                )
                for a in range(shape.n_a)
                for x in range(shape.m_a)
            ),
        )
        worst_complete = max(
            worst_complete,
            max(
                float(np.linalg.norm(sum(effects) - np.eye(2)))
                for effects in realization.povms.values()
            ),
        )
    seq_shape = SequentialShape(n_a1=2, m_x1=2, n_a2=2, m_x2=2, d=2)
    for i in range(20):
        sample = random_ns_sequential(seq_shape, seed=seed * 6101 + i)
        realization = ghjw_sequential(sample)
        rebuilt = reconstruct_sequential(realization)
        worst_round = max(
            worst_round,
            max(
                float(np.linalg.norm(rebuilt.member(*key) - sample.member(*key)))
                for key in sample.members
            ),
        )
        eye = np.eye(2)
        for elements in realization.kraus.values():
            total = sum(el.conj().T @ el for el in elements)
            worst_complete = max(worst_complete, float(np.linalg.norm(total - eye)))
        for effects in realization.povms.values():
            worst_complete = max(
                worst_complete, float(np.linalg.norm(sum(effects) - eye))
            )
    elapsed = time.perf_counter() - start
    out.append(
        _criterion(
            "realization roundtrips",
            worst_round <= 1e-8 and worst_complete <= 1e-9 and elapsed < 60.0,
            f"120 samples: roundtrip {worst_round:.2e} <= 1e-8, completeness "
            f"{worst_complete:.2e} <= 1e-9, in {elapsed:.2f} s",
        )
    )

    quantum_shape = ScenarioShape(n_a=2, m_a=2, m_b=2, d=2, kind=BWI)
    feasible_count = 0
    post_quantum_count = 0
    for i in range(50):
        sample = random_quantum_bwi(quantum_shape, seed=seed * 4409 + i)
        report = qtilde_membership(sample)
        if report.feasible:
            feasible_count += 1
        sample_table = bell_correlations(sample, [basis, basis])
        if float(chsh_value(sample_table[:, :, :2, :2])) > TSIRELSON + 1e-6:
            post_quantum_count += 1
    out.append(
        _criterion(
            "quantum samples stay inside",
            feasible_count == 50 and post_quantum_count == 0,
            f"{feasible_count}/50 relaxation-feasible, {post_quantum_count} flagged",
        )
    )

    x_pauli, y_pauli, z_pauli = PAULIS
    flip = pauli_action(
        {"I": np.eye(2), "X": x_pauli, "Y": -y_pauli, "Z": z_pauli}
    )
    result = choi(flip)
    out.append(
        _criterion(
            "map certificate eigenvalue",
            abs(result.min_eigenvalue() + 1.0) <= 1e-9
            and result.trace_residual() <= 1e-9,
            f"min eigenvalue {result.min_eigenvalue():.12f} vs -1 within 1e-9",
        )
    )

    spec = transpose_bell_spec()
    rng = np.random.default_rng(seed + 9)
    worst_chsh = 0.0
    worst_gap = 0.0
    settings = [(y, z) for y in range(2) for z in range(2)]
    for _ in range(1000):
        povms = []
        for _z in range(2):
            g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            h = g @ g.conj().T
            vals, vecs = np.linalg.eigh(h)
            effect = (vecs * rng.uniform(size=2)) @ vecs.conj().T
            povms.append([effect, np.eye(2) - effect])
        bell = ptp_bell_model(spec, povms)
        for z, effects in enumerate(povms):
            direct = bell_correlations(bell.assemblage, [effects, effects])
            worst_gap = max(
                worst_gap, float(np.max(np.abs(bell.table[:, :, :, :, z] - direct)))
            )
        for x1 in range(3):
            for x2 in range(3):
                if x1 == x2:
                    continue
                for i, first in enumerate(settings):
                    for second in settings[i + 1 :]:
                        for b1, b2 in ((first, second), (second, first)):
                            sub = np.zeros((2, 2, 2, 2))
                            for bi, (yy, zz) in enumerate((b1, b2)):
                                sub[:, :, 0, bi] = bell.table[:, :, x1, yy, zz]
                                sub[:, :, 1, bi] = bell.table[:, :, x2, yy, zz]
                            worst_chsh = max(worst_chsh, abs(chsh_value(sub)))
    out.append(
        _criterion(
            "model ceiling and path agreement",
            worst_chsh <= TSIRELSON + 1e-6 and worst_gap <= 1e-10,
            f"1000 effect pairs: max value {worst_chsh:.9f} <= {TSIRELSON:.9f} + 1e-6, "
            f"path gap {worst_gap:.2e} <= 1e-10",
        )
    )

    wired = instrumental_from_bwi(example)
    wired_report = instrumental_membership(wired)
    wired_value = evaluate(canonical_instrumental_functional(), wired)
    wired_bound = qtilde_instrumental_bound(canonical_instrumental_functional())
    out.append(
        _criterion(
            "wired example",
            wired_report.feasible
            and abs(wired_value) <= 1e-10
            and wired_bound > 0.01,
            f"membership {wired_report.feasible}, value {wired_value:.3e} within "
            f"1e-10, bound {wired_bound:.3e} > 0.01",
        )
    )

    ordered = True
    detail = ""
    for i in range(20):
        sample_fn = _random_psd_functional(quantum_shape, seed=seed * 271 + i)
        ns_v = ns_bound(sample_fn)
        qt_v, _ = qtilde_solution(sample_fn)
        lhs_v, _ = lhs_bound(sample_fn)
        if not (ns_v <= qt_v + 1e-6 and qt_v <= lhs_v + 1e-6):
            ordered = False
            detail = f"seed {i}: ns {ns_v:.6f}, relaxation {qt_v:.6f}, lhs {lhs_v:.6f}"
            break
    if ordered:
        detail = "20 functionals ordered ns <= relaxation <= lhs within 1e-6"
    out.append(_criterion("bound ordering", ordered, detail))

    return out


def cmd_reproduce(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    doc = ReportDocument()
    try:
        criteria = run_reproduction(seed=args.seed)
    except SolverFailure as exc:
        raise CliError(EXIT_SOLVER, f"reproduction aborted: {exc}") from exc
    doc.results["criteria"] = criteria
    passed = sum(1 for entry in criteria if entry["passed"])
    doc.results["passed"] = passed
    doc.results["total"] = len(criteria)
    return doc, EXIT_PASS if passed == len(criteria) else EXIT_ANALYTIC


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    parser.add_argument("--tol", type=float, default=None, help="tolerance override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steercert",
        description="certify steering assemblages and reproduce the headline numbers",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    validate = sub.add_parser("validate", help="check no-signalling constraints")
    validate.add_argument("target", help="assemblage file or builtin:<name>")
    validate.add_argument(
        "--scenario",
        choices=(BWI, TRADITIONAL, SEQUENTIAL, INSTRUMENTAL),
        default=None,
        help="require this scenario kind",
    )
    _add_common(validate)

    bounds = sub.add_parser("bounds", help="optimize a functional over a model set")
    bounds.add_argument("target", help="functional file or builtin:canonical")
    bounds.add_argument(
        "--which", choices=BOUND_CHOICES, default="lhs", help="which bound to compute"
    )
    _add_common(bounds)

    certify = sub.add_parser("certify", help="classify an assemblage")
    certify.add_argument("target", help="assemblage file or builtin:<name>")
    _add_common(certify)

    realize = sub.add_parser("ghjw", help="construct a quantum realization")
    realize.add_argument("target", help="assemblage file or builtin:<name>")
    realize.add_argument(
        "--scenario",
        choices=(TRADITIONAL, SEQUENTIAL),
        default=None,
        help="require this scenario kind",
    )
    _add_common(realize)

    reproduce = sub.add_parser("reproduce", help="run the full battery of checks")
    _add_common(reproduce)

    return parser


_HANDLERS = {
    "validate": cmd_validate,
    "bounds": cmd_bounds,
    "certify": cmd_certify,
    "ghjw": cmd_ghjw,
    "reproduce": cmd_reproduce,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        doc, code = _HANDLERS[args.subcommand](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    doc.command = "steercert " + " ".join(argv)
    doc.wall_time = time.perf_counter() - start
    if args.format == "json":
        print(json.dumps(doc.to_json(), indent=2))
    else:
        print(doc.render_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
