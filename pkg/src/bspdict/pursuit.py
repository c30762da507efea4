"""Greedy sparse approximation: OOMP selection, swap refinement, BOOMP pruning.

All inner products are plain Euclidean products of sample vectors. Atoms
are normalized to unit length before any selection; coefficients are
reported back in the original atom scale.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import IndexOutOfRange, Stagnation

log = logging.getLogger(__name__)

DEAD_NORM = 1e-10  # orthogonal component below this: atom lies in the selected span
ORTHO_DEFECT = 1e-8
SWAP_RTOL = 1e-9


class PursuitProblem:
    """Sampled atoms, a signal and an absolute residual-norm tolerance."""

    def __init__(self, atoms, f, tol: float, grid=None):
        A = np.asarray(getattr(atoms, "values", atoms), dtype=float)
        f = np.asarray(f, dtype=float).ravel()
        if A.ndim != 2 or A.shape[1] < 1:
            raise ValueError("atoms must be a 2-D matrix with at least one column")
        if A.shape[0] != f.size:
            raise ValueError(f"atoms have {A.shape[0]} rows but the signal has {f.size} samples")
        if not tol > 0:
            raise ValueError(f"tolerance must be positive, got {tol!r}")
        if grid is None:
            grid = getattr(atoms, "grid", None)
        norms = np.linalg.norm(A, axis=0)
        live = norms > 0
        scale = np.where(live, norms, 1.0)
        self.A = A / scale
        self.norms = norms
        self.live = live
        self.f = f
        self.tol = float(tol)
        self.grid = None if grid is None else np.asarray(grid, dtype=float)
        self.fnorm = float(np.linalg.norm(f))

    @classmethod
    def from_signal(cls, dictionary, signal, tol_fraction: float = 0.01):
        """Sample ``dictionary`` on the signal grid with ``tol = fraction * ||f||``."""
        from .bspline import sample

        mat = sample(dictionary, signal.grid)
        f = signal.values
        return cls(mat, f, tol_fraction * float(np.linalg.norm(f)))

    @property
    def size(self) -> int:
        return self.A.shape[1]

    def fit(self, gamma):
        """Least-squares fit on the selected columns.

        Returns coefficients for the normalized columns and the residual
        vector, both computed from scratch.
        """
        gamma = list(gamma)
        if not gamma:
            return np.zeros(0), self.f.copy()
        sub = self.A[:, gamma]
        q, rr = np.linalg.qr(sub)
        diag = np.abs(np.diag(rr))
        if diag.min() > 1e-12 * diag.max():
            coef = solve_triangular(rr, q.T @ self.f)
        else:
            coef, *_ = np.linalg.lstsq(sub, self.f, rcond=None)
        return coef, self.f - sub @ coef

    def decomposition(self, gamma, stage_log=None) -> "AtomicDecomposition":
        gamma = [int(i) for i in gamma]
        coef, r = self.fit(gamma)
        scaled = coef / self.norms[gamma] if gamma else coef
        return AtomicDecomposition(
            gamma=gamma,
            coeffs=scaled,
            residual_norm=float(np.linalg.norm(r)),
            stage_log=list(stage_log or []),
        )


@dataclass
class AtomicDecomposition:
    gamma: list
    coeffs: np.ndarray
    residual_norm: float
    stage_log: list = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.gamma)

    def to_dict(self, dictionary_ref=None) -> dict:
        out = {
            "atoms": list(self.gamma),
            "coefficients": np.asarray(self.coeffs, dtype=float).tolist(),
            "residual_norm": self.residual_norm,
            "K": self.K,
            "stage_log": self.stage_log,
        }
        if dictionary_ref is not None:
            out["dictionary"] = dictionary_ref
        return out

    def to_json(self, dictionary_ref=None) -> str:
        return json.dumps(self.to_dict(dictionary_ref))

    @classmethod
    def from_dict(cls, data) -> "AtomicDecomposition":
        return cls(
            gamma=[int(i) for i in data["atoms"]],
            coeffs=np.asarray(data["coefficients"], dtype=float),
            residual_norm=float(data["residual_norm"]),
            stage_log=list(data.get("stage_log", [])),
        )


def oomp(prob: PursuitProblem) -> AtomicDecomposition:
    """Optimized orthogonal matching pursuit run down to ``prob.tol``.

    At each step picks the atom whose component orthogonal to the current
    span, renormalized, has the largest inner product with the residual.
    Ties go to the lowest column index.
    """
    A, f = prob.A, prob.f
    M, Ncols = A.shape
    kmax = min(M, Ncols)
    Q = np.zeros((M, kmax))
    # squared norms of the components orthogonal to span(Q), tracked by
    # downdating; the chosen atom's value is recomputed exactly
    wn2 = np.where(prob.live, 1.0, 0.0)
    eligible = prob.live.copy()
    r = f.copy()
    rnorm = float(np.linalg.norm(r))
    gamma = []
    history = [rnorm]
    stalled = None

    while rnorm > prob.tol and len(gamma) < kmax:
        K = len(gamma)
        proj = A.T @ r  # equals the product with the orthogonal components since r is orthogonal to Q
        while True:
            if not eligible.any():
                stalled = "every remaining atom lies in the selected span"
                break
            score = np.full(Ncols, -1.0)
            score[eligible] = proj[eligible] ** 2 / np.maximum(wn2[eligible], DEAD_NORM**2)
            best = int(np.argmax(score))
            w = A[:, best] - Q[:, :K] @ (Q[:, :K].T @ A[:, best])
            w -= Q[:, :K] @ (Q[:, :K].T @ w)  # second pass keeps in-span atoms at roundoff level
            true2 = float(w @ w)
            if true2 <= DEAD_NORM**2:
                eligible[best] = False
                wn2[best] = 0.0
                continue
            if abs(true2 - wn2[best]) > 1e-6 * true2:
                wn2[best] = true2
                continue
            break
        if stalled is not None:
            break
        if not np.sqrt(score[best]) > 1e-12 * max(prob.fnorm, 1e-300):
            stalled = "no atom reduces the residual"
            break

        q = w / np.sqrt(true2)
        if K:
            defect = Q[:, :K].T @ q
            if np.max(np.abs(defect)) > ORTHO_DEFECT:
                q -= Q[:, :K] @ defect
                q /= np.linalg.norm(q)
        Q[:, K] = q
        gamma.append(best)
        eligible[best] = False
        wn2 -= (q @ A) ** 2
        r -= q * (q @ r)
        rnorm = float(np.linalg.norm(r))
        history.append(rnorm)

    if stalled is None and rnorm > prob.tol:
        stalled = "all atoms used"
    dec = prob.decomposition(gamma)
    dec.stage_log.append(
        {"stage": "oomp", "K": dec.K, "residual_norm": dec.residual_norm, "history": history}
    )
    if stalled is not None and dec.residual_norm > prob.tol:
        raise Stagnation(f"OOMP stalled at K={dec.K}: {stalled}", dec)
    return dec


class _Fit:
    """Orthogonal factorization of the selected columns plus their dual vectors."""

    def __init__(self, prob: PursuitProblem, gamma):
        self.gamma = list(gamma)
        sub = prob.A[:, self.gamma]
        self.Q, self.R = np.linalg.qr(sub)
        # duals b_i: biorthogonal to the selected atoms, inside their span
        self.Rinv = solve_triangular(self.R, np.eye(len(self.gamma)))
        self.B = self.Q @ self.Rinv.T
        self.bn2 = np.einsum("ij,ij->j", self.B, self.B)
        self.coef = self.B.T @ prob.f
        self.r = prob.f - self.Q @ (self.Q.T @ prob.f)
        self.r2 = float(self.r @ self.r)


def swap_refine(dec: AtomicDecomposition, prob: PursuitProblem) -> AtomicDecomposition:
    """Steepest-descent single-atom exchanges at fixed K.

    Each round evaluates every (selected, unselected) pair in closed form
    and applies the exchange with the largest residual decrease, as long
    as it improves the residual norm by more than ``SWAP_RTOL`` relative.
    """
    gamma = list(dec.gamma)
    swaps = 0
    if gamma:
        candidates = prob.live.copy()
        while True:
            fit = _Fit(prob, gamma)
            if fit.r2 == 0.0:
                break
            P = fit.Q.T @ prob.A  # K x N
            wn2 = np.clip(1.0 - np.einsum("ij,ij->j", P, P), 0.0, None)
            ra = prob.A.T @ fit.r
            dead = wn2 < DEAD_NORM**2
            wn2[dead] = 0.0
            ra[dead] = 0.0
            bn = np.sqrt(fit.bn2)
            G = (fit.Rinv.T @ P) / bn[:, None]  # <e_i, a_n>
            fe = fit.coef / bn  # <f, e_i>
            num = ra[None, :] + fe[:, None] * G
            den = wn2[None, :] + G * G
            with np.errstate(divide="ignore", invalid="ignore"):
                new_r2 = fit.r2 + fe[:, None] ** 2 - num * num / den
            mask = candidates.copy()
            mask[gamma] = False
            new_r2[:, ~mask] = np.inf
            new_r2[~(den > DEAD_NORM**2)] = np.inf
            flat = int(np.argmin(new_r2))
            i, n = divmod(flat, new_r2.shape[1])
            rnorm = np.sqrt(fit.r2)
            if not np.isfinite(new_r2[i, n]) or np.sqrt(max(new_r2[i, n], 0.0)) >= rnorm * (1 - SWAP_RTOL):
                break
            trial = gamma.copy()
            trial[i] = n
            _, r_new = prob.fit(trial)
            if np.linalg.norm(r_new) >= rnorm * (1 - SWAP_RTOL):
                break
            gamma = trial
            swaps += 1
    out = prob.decomposition(gamma, dec.stage_log)
    if out.residual_norm > dec.residual_norm:
        # refit noise only; keep the input
        out = prob.decomposition(dec.gamma, dec.stage_log)
    out.stage_log.append({"stage": "swap", "swaps": swaps, "K": out.K, "residual_norm": out.residual_norm})
    return out


def boomp_prune(dec: AtomicDecomposition, prob: PursuitProblem, budget: float) -> AtomicDecomposition:
    """Backward removal of atoms while the residual norm stays within ``budget``.

    Removing atom ``i`` raises the squared residual by ``c_i^2 / ||b_i||^2``
    with ``b_i`` its dual vector; the cheapest removal is taken each step
    and the duals are downdated in place.
    """
    gamma = list(dec.gamma)
    budget2 = float(budget) ** 2
    removed = []
    if gamma:
        fit = _Fit(prob, gamma)
        B, coef, bn2, r2 = fit.B, fit.coef, fit.bn2, fit.r2
        keep = list(range(len(gamma)))
        while keep:
            cost = coef[keep] ** 2 / bn2[keep]
            pos = int(np.argmin(cost))
            # slack for rounding; the fresh fit below has the final say
            if r2 + cost[pos] > budget2 * (1 + 1e-12):
                break
            i = keep.pop(pos)
            bi = B[:, i]
            rest = np.array(keep, dtype=int)
            if rest.size:
                B[:, rest] -= np.outer(bi, (bi @ B[:, rest]) / bn2[i])
                bn2[rest] = np.einsum("ij,ij->j", B[:, rest], B[:, rest])
                coef[rest] = B[:, rest].T @ prob.f
            r2 += cost[pos]
            removed.append(i)
        # verify against a fresh fit, backing off removals that rounding let through
        while removed:
            dropped = set(removed)
            _, r = prob.fit([g for j, g in enumerate(gamma) if j not in dropped])
            if np.linalg.norm(r) <= budget:
                break
            removed.pop()
        dropped = set(removed)
        gamma = [g for j, g in enumerate(gamma) if j not in dropped]
    out = prob.decomposition(gamma, dec.stage_log)
    out.stage_log.append(
        {"stage": "prune", "pruned": len(removed), "K": out.K, "residual_norm": out.residual_norm}
    )
    return out


def sparse_approximate(prob: PursuitProblem, max_rounds: int = 10_000) -> AtomicDecomposition:
    """OOMP, then alternate swapping and BOOMP pruning until no swap helps.

    The pruning budget is the residual norm reached by OOMP.
    """
    dec = oomp(prob)
    budget = dec.residual_norm
    for _ in range(max_rounds):
        swapped = swap_refine(dec, prob)
        dec = boomp_prune(swapped, prob, budget)
        log.debug("round: swaps=%d K=%d res=%.3e", swapped.stage_log[-1]["swaps"], dec.K, dec.residual_norm)
        if swapped.stage_log[-1]["swaps"] == 0:
            break
    return dec


def reconstruct(dec: AtomicDecomposition, dictionary, grid) -> np.ndarray:
    """Pointwise sum of coefficient-weighted atoms on ``grid``."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if not dec.gamma:
        return np.zeros(grid.size)
    for i in dec.gamma:
        if not 0 <= i < dictionary.size:
            raise IndexOutOfRange(f"atom index {i} outside [0, {dictionary.size - 1}]")
    return dictionary.evaluate_atoms(dec.gamma, grid) @ np.asarray(dec.coeffs)
