"""Closed-form spectral predictions used to validate the numerical stack.

Every function here is an O(1) formula, independent of the eigensolvers,
so agreement between the two routes is a meaningful cross-check.  Energies
follow the convention of the model constructors (unit couplings).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AnalyticLevel:
    """One closed-form energy level.

    `kappa` counts spectator-qubit excitations (each worth +2), `branch`
    names the nontrivial block eigenvalue the level descends from, and
    `sector` gives the bit-flip parity where the model has that symmetry
    (None otherwise).
    """

    value: float
    kappa: int
    branch: str
    sector: str | None = None


def momentum_grid(n: int) -> np.ndarray:
    """Antiperiodic (odd-integer) momenta ka = (pi/n)(1 + 2Z) of the chain.

    Exactly n values.  For even n they come in symmetric pairs with
    |ka| < pi; odd n additionally contains the ka = pi mode.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    odd = np.arange(1, 2 * n, 2)  # 1, 3, ..., 2n-1
    ka = odd * np.pi / n
    ka = np.where(ka > np.pi + 1e-12, ka - 2 * np.pi, ka)
    return np.sort(ka)


def ising_quasiparticle_energy(n: int, s: float, ka) -> np.ndarray | float:
    """Dispersion sqrt(1 - 4 cos^2(ka/2) s(1-s)) of the linear Ising path.

    This is half the physical single-quasiparticle energy: the numerical
    ground energy is minus the sum of this over :func:`momentum_grid`, and
    even-sector excitations cost four times this at the smallest momentum.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError("s outside [0, 1]")
    ka = np.asarray(ka, dtype=float)
    val = np.sqrt(1.0 - 4.0 * np.cos(ka / 2.0) ** 2 * s * (1.0 - s))
    return float(val) if val.ndim == 0 else val


def ising_linear_ground_energy(n: int, s: float) -> float:
    """Even-sector ground energy of the linear Ising path."""
    return -float(np.sum(ising_quasiparticle_energy(n, s, momentum_grid(n))))


def ising_linear_even_gap(n: int, s: float) -> float:
    """Even-sector gap: a pair of quasiparticles at momenta +-pi/n."""
    return 4.0 * float(ising_quasiparticle_energy(n, s, np.pi / n))


def ising_linear_min_even_gap(n: int) -> float:
    """Minimum of :func:`ising_linear_even_gap` over s, attained at s=1/2."""
    return 4.0 * np.sin(np.pi / (2.0 * n))


def _kappa_range(n_spectators: int, kappa_max: int | None) -> range:
    top = n_spectators if kappa_max is None else min(kappa_max, n_spectators)
    return range(top + 1)


def ising_first_step_levels(n: int, s: float, kappa_max: int | None = None
                            ) -> list[AnalyticLevel]:
    """Levels of the first stepwise Ising segment.

    The two leading qubits contribute a four-level block with eigenvalues
    -+sqrt(5 s^2 - 8 s + 4) and -+s; the remaining n-2 spectators add
    -(n-2) + 2*kappa.  Block parity is even for the outer branches, so the
    overall sector alternates with kappa.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s outside [0, 1]")
    r = np.sqrt(5.0 * s * s - 8.0 * s + 4.0)
    branches = [("lambda0", -r, "even"), ("lambda1", -s, "odd"),
                ("lambda2", +s, "odd"), ("lambda3", +r, "even")]
    out = []
    for kappa in _kappa_range(n - 2, kappa_max):
        flip = kappa % 2 == 1
        for name, base, block_parity in branches:
            sector = block_parity
            if flip:
                sector = "odd" if block_parity == "even" else "even"
            out.append(AnalyticLevel(float(base - (n - 2) + 2 * kappa),
                                     kappa, name, sector))
    return out


def ising_first_step_min_even_gap() -> tuple[float, float]:
    """(s, gap) of the even-sector minimum on the first Ising segment."""
    return 0.8, 4.0 / np.sqrt(5.0)


def ising_mid_step_levels(n: int, s: float, kappa_max: int | None = None
                          ) -> list[AnalyticLevel]:
    """Levels of an intermediate stepwise Ising segment.

    After the CNOT rotation the moving qubit contributes the two-level
    branch -+sqrt(1 - 2 s (1-s)).  The already-built open chain keeps a
    degenerate parity doublet, so every level occurs in both sectors and no
    sector tag is assigned.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s outside [0, 1]")
    r = np.sqrt(1.0 - 2.0 * s * (1.0 - s))
    out = []
    for kappa in _kappa_range(n - 2, kappa_max):
        for name, base in [("lambda_minus", -r), ("lambda_plus", +r)]:
            out.append(AnalyticLevel(float(base - (n - 2) + 2 * kappa),
                                     kappa, name, None))
    return out


def ising_mid_step_gap(s: float) -> float:
    """Fundamental (and even-sector) gap of an intermediate Ising segment."""
    return 2.0 * np.sqrt(1.0 - 2.0 * s * (1.0 - s))


def cluster1d_step_levels(n: int, s: float, kappa_max: int | None = None
                          ) -> list[AnalyticLevel]:
    """Levels of any 1d-cluster build segment (first segment included).

    The two qubits at the growing edge contribute eigenvalues
    -+2 sqrt(1 - 2 s (1-s)) and a doubly degenerate zero.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s outside [0, 1]")
    r = 2.0 * np.sqrt(1.0 - 2.0 * s * (1.0 - s))
    branches = [("lambda1", -r), ("lambda2", 0.0), ("lambda3", 0.0),
                ("lambda4", +r)]
    out = []
    for kappa in _kappa_range(n - 2, kappa_max):
        for name, base in branches:
            out.append(AnalyticLevel(float(base - (n - 2) + 2 * kappa),
                                     kappa, name, None))
    return out


def cluster1d_step_gap(s: float) -> float:
    return 2.0 * np.sqrt(1.0 - 2.0 * s * (1.0 - s))


def cluster2d_two_link_lowest(n: int, s: float, kappa_max: int | None = None
                              ) -> tuple[list[AnalyticLevel],
                                         list[AnalyticLevel]]:
    """Two lowest level families of a two-link 2d-cluster build step.

    The three coupled qubits contribute an 8x8 block; only its two lowest
    eigenvalues have closed forms here, the spectators add -(n-3)+2*kappa.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s outside [0, 1]")
    sq = s * (1.0 - s)
    inner = 4.0 * (1.0 - 2.0 * s) ** 2 + 25.0 * sq * sq
    base0 = -np.sqrt(5.0 - 10.0 * sq + 2.0 * np.sqrt(inner))
    lam0 = [AnalyticLevel(float(base0 - (n - 3) + 2 * k), k, "lambda0", None)
            for k in _kappa_range(n - 3, kappa_max)]
    lam1 = [AnalyticLevel(float(-1.0 - (n - 3) + 2 * k), k, "lambda1", None)
            for k in _kappa_range(n - 3, kappa_max)]
    return lam0, lam1


def cluster2d_two_link_gap(s: float) -> float:
    """Gap of a two-link step; equals sqrt(5)-1 at the s=1/2 minimum."""
    sq = s * (1.0 - s)
    inner = 4.0 * (1.0 - 2.0 * s) ** 2 + 25.0 * sq * sq
    return float(np.sqrt(5.0 - 10.0 * sq + 2.0 * np.sqrt(inner)) - 1.0)


def projector_two_level(overlap: float, s: float) -> tuple[float, float]:
    """Two nontrivial levels of a projector-to-projector segment.

    All remaining levels sit at exactly 1; the gap over s is minimized at
    s=1/2 where it equals the ground-state overlap.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap outside [0, 1]")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s outside [0, 1]")
    root = np.sqrt(1.0 - 4.0 * s * (1.0 - s) * (1.0 - overlap * overlap))
    return 0.5 * (1.0 - root), 0.5 * (1.0 + root)


def projector_gap(overlap: float, s: float) -> float:
    lo, hi = projector_two_level(overlap, s)
    return hi - lo
