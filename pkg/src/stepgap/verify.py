"""Analytic-vs-numeric verification checks.

Each check evaluates a closed-form prediction against dense numerics and
returns the worst absolute deviation it saw.  The CLI `verify` subcommand
and the acceptance tests both run these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analytic, ec3
from .models import ising_step_hamiltonian, lattice_build_order, make_path
from .pauli import GateSpec, OperatorSum, PauliString, conjugate
from .spectra import lowest_eigenpairs, sector_ground_state


@dataclass(frozen=True)
class CheckResult:
    name: str
    n: int | None
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance


def _match_deviation(op, levels) -> float:
    """Worst distance from each analytic level to the dense spectrum."""
    num = np.linalg.eigvalsh(op.to_dense())
    worst = 0.0
    for level in levels:
        worst = max(worst, float(np.min(np.abs(num - level.value))))
    return worst


def first_step_deviation(n: int, points: int = 101, kappa_max: int = 2
                         ) -> float:
    path = make_path("ising-stepwise", n=n)
    worst = 0.0
    for s in np.linspace(0.0, 1.0, points):
        op = path.at_progress(s / n)
        worst = max(worst, _match_deviation(
            op, analytic.ising_first_step_levels(n, s, kappa_max)))
    return worst


def mid_step_deviation(n: int, points: int = 101, kappa_max: int = 2,
                       k: int | None = None) -> float:
    path = make_path("ising-stepwise", n=n)
    if k is None:
        k = max(1, (n - 1) // 2)
    worst = 0.0
    for s in np.linspace(0.0, 1.0, points):
        op = path.at_progress((k + s) / n)
        worst = max(worst, _match_deviation(
            op, analytic.ising_mid_step_levels(n, s, kappa_max)))
    return worst


def cluster_step_deviation(n: int, points: int = 101, kappa_max: int = 2
                           ) -> float:
    path = make_path("cluster1d-stepwise", n=n)
    segments = path.segment_count
    worst = 0.0
    for k in (0, max(1, segments // 2)):
        for s in np.linspace(0.0, 1.0, points):
            op = path.at_progress((k + s) / segments)
            worst = max(worst, _match_deviation(
                op, analytic.cluster1d_step_levels(n, s, kappa_max)))
    return worst


def two_link_deviation(n: int, points: int = 101, kappa_max: int = 2
                       ) -> float:
    """First two-link step of a two-row grid with n sites (n even)."""
    if n % 2:
        raise ValueError("two-link check uses 2-row grids, n must be even")
    order = lattice_build_order(n // 2, 2)
    path = make_path("cluster2d-stepwise", width=n // 2, height=2)
    k = order.two_link_steps()[0]
    segments = path.segment_count
    worst = 0.0
    for s in np.linspace(0.0, 1.0, points):
        op = path.at_progress((k + s) / segments)
        lam0, lam1 = analytic.cluster2d_two_link_lowest(n, s, kappa_max)
        worst = max(worst, _match_deviation(op, lam0 + lam1))
    return worst


def ground_energy_deviation(n: int, points: int = 101) -> float:
    path = make_path("ising-linear", n=n)
    worst = 0.0
    for s in np.linspace(0.0, 1.0, points):
        e0 = lowest_eigenpairs(path.at_progress(s), 1,
                               want_vectors=False).eigenvalues[0]
        worst = max(worst,
                    abs(e0 - analytic.ising_linear_ground_energy(n, s)))
    return worst


def overlap_chain_deviation(n: int) -> float:
    states = [sector_ground_state(ising_step_hamiltonian(n, k), "even")
              for k in range(n + 1)]
    worst = 0.0
    for k in range(n - 1):
        overlap = abs(np.vdot(states[k], states[k + 1]))
        worst = max(worst, abs(overlap - 1.0 / np.sqrt(2.0)))
    return max(worst, abs(abs(np.vdot(states[n - 1], states[n])) - 1.0))


# The six conjugation rules stated for the two gates, plus the three
# complements closing the set on the generators.  Each entry is
# (gate kind, factor on control, factor on target, expected factors).
CONJUGATION_RULES = (
    ("CNOT", "Z", "I", {"control": "Z"}),
    ("CNOT", "Z", "Z", {"target": "Z"}),
    ("CNOT", "I", "X", {"target": "X"}),
    ("CNOT", "X", "I", {"control": "X", "target": "X"}),
    ("CNOT", "I", "Z", {"control": "Z", "target": "Z"}),
    ("CZ", "Z", "X", {"target": "X"}),
    ("CZ", "Z", "I", {"control": "Z"}),
    ("CZ", "I", "Z", {"target": "Z"}),
    ("CZ", "X", "I", {"control": "X", "target": "Z"}),
)


def conjugation_rule_failures(n: int = 4, control: int = 2, target: int = 3
                              ) -> list[str]:
    """Exact term-pattern checks of the stated gate rules; empty = all hold."""
    failures = []
    for kind, pc, qt, expect in CONJUGATION_RULES:
        ops = {}
        if pc != "I":
            ops[control] = pc
        if qt != "I":
            ops[target] = qt
        op = OperatorSum(n, [PauliString.from_ops(n, ops, -1.5)])
        got = conjugate(op, GateSpec(kind, control, target))
        want_ops = {}
        if "control" in expect:
            want_ops[control] = expect["control"]
        if "target" in expect:
            want_ops[target] = expect["target"]
        want = OperatorSum(n, [PauliString.from_ops(n, want_ops, -1.5)])
        if got != want:
            failures.append(f"{kind} {pc}{qt}: got {got}, want {want}")
    return failures


def conjugation_spectrum_deviation(sizes=(4, 6, 8), trials: int = 3,
                                   seed: int = 17) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for kind in ("CNOT", "CZ"):
        for n in sizes:
            for _ in range(trials):
                terms = [PauliString(n,
                                     tuple(rng.choice(list("IXYZ"), size=n)),
                                     float(rng.normal()))
                         for _ in range(2 * n)]
                op = OperatorSum(n, terms)
                gate = GateSpec(kind, int(rng.integers(1, n)), n)
                w0 = np.linalg.eigvalsh(op.to_dense())
                w1 = np.linalg.eigvalsh(conjugate(op, gate).to_dense())
                worst = max(worst, float(np.abs(w0 - w1).max()))
    return worst


def conjugation_dense_deviation() -> float:
    """All 16 two-qubit Pauli pairs against dense gate conjugation."""
    worst = 0.0
    for kind in ("CNOT", "CZ"):
        gate = GateSpec(kind, 1, 2)
        smat = gate.to_matrix(2)
        for pc in "IXYZ":
            for qt in "IXYZ":
                ops = {k: v for k, v in ((1, pc), (2, qt)) if v != "I"}
                op = OperatorSum(2, [PauliString.from_ops(2, ops)])
                got = conjugate(op, gate).to_dense()
                want = smat @ op.to_dense() @ smat
                worst = max(worst, float(np.abs(got - want).max()))
    return worst


def ec3_two_level_deviation(count: int = 3, seed: int = 99) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        inst = ec3.random_satisfiable_instance(6, 4, rng)
        order = ec3.order_clauses(inst)
        gaps = ec3.path_gaps(ec3.solution_counts(inst, order))
        for k in range(inst.m):
            h_a = ec3.projector_hamiltonian(inst, order, k)
            h_b = ec3.projector_hamiltonian(inst, order, k + 1)
            for s in (0.25, 0.5, 0.75):
                w = np.linalg.eigvalsh((1 - s) * h_a.matrix + s * h_b.matrix)
                lam0, lam1 = analytic.projector_two_level(gaps[k], s)
                worst = max(worst, abs(w[0] - lam0), abs(w[1] - lam1))
    return worst


#: name -> (callable(n, points, kappa_max), tolerance, runs per system size)
CHECKS = {
    "ising-first-step":
        (lambda n, p, km: first_step_deviation(n, p, km), 1e-8, True),
    "ising-mid-step":
        (lambda n, p, km: mid_step_deviation(n, p, km), 1e-8, True),
    "cluster1d-step":
        (lambda n, p, km: cluster_step_deviation(n, p, km), 1e-8, True),
    "cluster2d-two-link":
        (lambda n, p, km: two_link_deviation(n, p, km), 1e-8, True),
    "ising-ground-energy":
        (lambda n, p, km: ground_energy_deviation(n, p), 1e-8, True),
    "overlap-chain":
        (lambda n, p, km: overlap_chain_deviation(n), 1e-8, True),
    "conjugation":
        (lambda n, p, km: max(conjugation_dense_deviation(),
                              conjugation_spectrum_deviation(),
                              1e-30 if not conjugation_rule_failures()
                              else 1.0), 1e-10, False),
    "ec3-two-level":
        (lambda n, p, km: ec3_two_level_deviation(), 1e-10, False),
}


def run_checks(names, n_list, points: int = 101, kappa_max: int = 2
               ) -> list[CheckResult]:
    out = []
    for name in names:
        func, tol, per_n = CHECKS[name]
        sizes = n_list if per_n else [None]
        for n in sizes:
            dev = func(n, points, kappa_max)
            out.append(CheckResult(name, n, float(dev), tol))
    return out
