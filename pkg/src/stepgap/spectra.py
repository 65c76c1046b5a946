"""Numerical eigensolution and gap curves along interpolation paths.

Low-lying spectra come from dense diagonalization for small registers and
from a matrix-free Lanczos solver (ARPACK) above that.  Parity sectors are
resolved after the fact by classifying eigenvectors with the bit-flip
string, diagonalizing it first inside degenerate clusters.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .models import InterpolationPath
from .pauli import DENSE_QUBIT_CAP, parity_apply

#: Below this dimension the dense solver is used even when not forced.
DENSE_SOLVE_DIM = 512

#: Eigenvalues closer than this are treated as one degenerate cluster.
DEGENERACY_TOL = 1e-8

#: |<P>| above this labels a level even/odd; in between it is "mixed".
PARITY_THRESHOLD = 0.99

GOLDEN_XTOL = 1e-6


class ConvergenceError(RuntimeError):
    """Iterative eigensolver or propagator failed to converge."""


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending low-lying eigenvalues, optionally with vectors and sectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    s: float | None = None
    sector_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(w) < -1e-12):
            raise ValueError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", w)
        if self.sector_labels is not None and self.eigenvectors is not None:
            if len(self.sector_labels) != self.eigenvectors.shape[1]:
                raise ValueError("one sector label per eigenvector required")


@dataclass(frozen=True)
class GapCurve:
    """Sampled gap along a path plus the refined minimum.

    `samples` has rows (global_s, gap, lambda0, lambda1).
    """

    samples: np.ndarray
    sector: str
    minimum: tuple[float, float]

    def __post_init__(self):
        if np.any(self.samples[:, 1] < -1e-10):
            raise ValueError("gaps must be non-negative")


def lowest_eigenpairs(op, count: int, want_vectors: bool = True,
                      method: str = "auto", tol: float = 1e-9,
                      krylov_dim: int = 60, maxiter: int = 2000,
                      seed: int = 0, s: float | None = None
                      ) -> SpectrumResult:
    """The `count` smallest eigenvalues of a Hermitian operator.

    `method` is ``dense``, ``lanczos`` or ``auto``; auto picks the dense
    LAPACK route for small dimensions and the matrix-free Lanczos solver
    otherwise.  The Lanczos route raises :class:`ConvergenceError` when the
    iteration budget is exhausted.
    """
    dim = 1 << op.n
    if not 1 <= count <= dim:
        raise ValueError(f"count {count} outside 1..{dim}")
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        if op.n <= DENSE_QUBIT_CAP and (dim <= DENSE_SOLVE_DIM
                                        or count > dim // 3):
            method = "dense"
        else:
            method = "lanczos"
    if method == "dense" and op.n > DENSE_QUBIT_CAP:
        raise ValueError(f"dense solve refused above {DENSE_QUBIT_CAP} qubits")
    if method == "lanczos" and count >= dim - 1:
        method = "dense"  # ARPACK requires k < dim - 1

    if method == "dense":
        mat = op.to_dense()
        if want_vectors:
            w, v = scipy.linalg.eigh(mat)
            return SpectrumResult(w[:count], v[:, :count], s=s)
        w = scipy.linalg.eigvalsh(mat)
        return SpectrumResult(w[:count], None, s=s)

    dtype = float if op.is_real else complex
    linop = spla.LinearOperator((dim, dim), matvec=op.apply, dtype=dtype)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    ncv = min(dim, max(krylov_dim, 2 * count + 1))
    try:
        out = spla.eigsh(linop, k=count, which="SA", ncv=ncv, tol=tol,
                         maxiter=maxiter, v0=v0,
                         return_eigenvectors=want_vectors)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"Lanczos solver did not converge within {maxiter} iterations "
            f"(dim {dim}, k {count})") from exc
    if want_vectors:
        w, v = out
        order = np.argsort(w)
        return SpectrumResult(w[order], v[:, order], s=s)
    return SpectrumResult(np.sort(out), None, s=s)


def classify_sectors(result: SpectrumResult,
                     threshold: float = PARITY_THRESHOLD,
                     cluster_tol: float = DEGENERACY_TOL) -> SpectrumResult:
    """Label each level even/odd by its bit-flip expectation value.

    Degenerate clusters are rotated into parity eigenstates first, so the
    labels are stable under arbitrary mixing within a degenerate subspace.
    Levels whose parity expectation stays below `threshold` in magnitude are
    labelled ``mixed``, which signals a Hamiltonian without the symmetry.
    """
    if result.eigenvectors is None:
        raise ValueError("sector classification needs eigenvectors")
    w = result.eigenvalues
    v = result.eigenvectors.copy()
    labels: list[str] = []
    i = 0
    while i < len(w):
        j = i
        while j + 1 < len(w) and w[j + 1] - w[i] <= cluster_tol:
            j += 1
        block = v[:, i:j + 1]
        p_block = np.column_stack([parity_apply(block[:, c])
                                   for c in range(block.shape[1])])
        pmat = block.conj().T @ p_block
        pmat = 0.5 * (pmat + pmat.conj().T)
        pw, pv = np.linalg.eigh(pmat)
        v[:, i:j + 1] = block @ pv
        for p in pw:
            if p > threshold:
                labels.append("even")
            elif p < -threshold:
                labels.append("odd")
            else:
                labels.append("mixed")
        i = j + 1
    return replace(result, eigenvectors=v, sector_labels=tuple(labels))


def sector_levels(op, sector: str, count: int = 2, method: str = "auto",
                  seed: int = 0, **solver_kwargs) -> SpectrumResult:
    """Lowest levels restricted to a parity sector.

    Requests increasingly many eigenpairs until `count` levels carry the
    requested label, then returns those levels (vectors included).
    ``sector="all"`` skips classification entirely.
    """
    dim = 1 << op.n
    if sector == "all":
        res = lowest_eigenpairs(op, min(count, dim), want_vectors=True,
                                method=method, seed=seed, **solver_kwargs)
        return classify_sectors(res) if res.eigenvectors is not None else res
    if sector not in ("even", "odd"):
        raise ValueError(f"unknown sector {sector!r}")
    ask = min(dim, max(2 * count + 2, 6))
    while True:
        res = lowest_eigenpairs(op, ask, want_vectors=True, method=method,
                                seed=seed, **solver_kwargs)
        res = classify_sectors(res)
        picks = [i for i, lab in enumerate(res.sector_labels)
                 if lab == sector]
        if len(picks) >= count:
            picks = picks[:count]
            return SpectrumResult(res.eigenvalues[picks],
                                  res.eigenvectors[:, picks], s=res.s,
                                  sector_labels=(sector,) * count)
        if ask >= dim:
            raise ConvergenceError(
                f"found only {len(picks)} {sector}-sector levels in the "
                f"full spectrum, needed {count}")
        ask = min(dim, 2 * ask)


def sector_ground_state(op, sector: str = "even", **kwargs) -> np.ndarray:
    """Ground-state vector within a parity sector."""
    res = sector_levels(op, sector, count=1, **kwargs)
    return res.eigenvectors[:, 0]


def sector_gap(op, sector: str = "all", method: str = "auto", seed: int = 0,
               **solver_kwargs) -> tuple[float, float, float]:
    """(gap, lambda0, lambda1) between the two lowest levels of a sector."""
    if sector == "all":
        # no classification needed, skip the eigenvector computation
        count = min(2, 1 << op.n)
        res = lowest_eigenpairs(op, count, want_vectors=False, method=method,
                                seed=seed, **solver_kwargs)
    else:
        res = sector_levels(op, sector, count=2, method=method, seed=seed,
                            **solver_kwargs)
    lam0, lam1 = float(res.eigenvalues[0]), float(res.eigenvalues[1])
    return lam1 - lam0, lam0, lam1


def _golden_minimize(f: Callable[[float], float], a: float, b: float,
                     xtol: float = GOLDEN_XTOL) -> tuple[float, float]:
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def gap_scan(path: InterpolationPath, points: int = 200,
             sector: str = "all", refine: bool = True, threads: int = 1,
             method: str = "auto", seed: int = 0, **solver_kwargs
             ) -> GapCurve:
    """Gap between the two lowest (sector-resolved) levels along a path.

    Samples `points` uniformly spaced global-s values, then refines the
    smallest sample by golden-section search on its bracketing interval.
    """
    if points < 2:
        raise ValueError("need at least two sample points")
    grid = np.linspace(0.0, 1.0, points)

    def eval_gap(s_global: float) -> tuple[float, float, float]:
        op = path.at_progress(float(s_global))
        return sector_gap(op, sector, method=method, seed=seed,
                          **solver_kwargs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(eval_gap, grid))
    else:
        rows = [eval_gap(s) for s in grid]
    samples = np.column_stack([
        grid,
        [r[0] for r in rows],
        [r[1] for r in rows],
        [r[2] for r in rows],
    ])
    k = int(np.argmin(samples[:, 1]))
    s_min, g_min = float(grid[k]), float(samples[k, 1])
    if refine and 0 < k < points - 1:
        s_min, g_min = _golden_minimize(
            lambda s: eval_gap(s)[0], grid[k - 1], grid[k + 1])
        if samples[k, 1] < g_min:
            s_min, g_min = float(grid[k]), float(samples[k, 1])
    return GapCurve(samples, sector, (s_min, g_min))


def segment_minimum(path: InterpolationPath, k: int, sector: str = "all",
                    points: int = 41, method: str = "auto", seed: int = 0,
                    **solver_kwargs) -> tuple[float, float]:
    """Refined (s_local, gap) minimum of one path segment.

    `s_local` runs over [0, 1] within segment k.  Boundary minima are
    returned unrefined since the curve simply decreases into the endpoint.
    """
    if not 0 <= k < path.segment_count:
        raise ValueError(f"segment {k} outside 0..{path.segment_count - 1}")
    op_a, op_b = path.segment(k)
    n = op_a.n
    if method != "lanczos" and n <= DENSE_QUBIT_CAP \
            and (1 << n) <= DENSE_SOLVE_DIM:
        # the solver will go dense anyway; blend matrices, not term sums
        from .pauli import DenseOperator
        mat_a = op_a.to_dense()
        diff = op_b.to_dense() - mat_a

        def eval_gap(s_local: float) -> float:
            op = DenseOperator(n, mat_a + float(s_local) * diff)
            return sector_gap(op, sector, method=method, seed=seed,
                              **solver_kwargs)[0]
    else:
        def eval_gap(s_local: float) -> float:
            from .pauli import blend
            return sector_gap(blend(op_a, op_b, float(s_local)), sector,
                              method=method, seed=seed, **solver_kwargs)[0]

    grid = np.linspace(0.0, 1.0, points)
    gaps = [eval_gap(s) for s in grid]
    j = int(np.argmin(gaps))
    if j in (0, points - 1):
        return float(grid[j]), float(gaps[j])
    s_min, g_min = _golden_minimize(eval_gap, grid[j - 1], grid[j + 1])
    if gaps[j] < g_min:
        return float(grid[j]), float(gaps[j])
    return s_min, g_min


def min_gap_vs_n(family: str, n_list, sector: str = "even",
                 points: int = 200, threads: int = 1, seed: int = 0,
                 **path_kwargs) -> list[tuple[int, float]]:
    """Minimum path gap per system size, for scaling studies."""
    from .models import make_path
    out = []
    for n in n_list:
        path = make_path(family, n=n, **path_kwargs)
        curve = gap_scan(path, points=points, sector=sector,
                         threads=threads, seed=seed)
        out.append((int(n), float(curve.minimum[1])))
    return out
