"""Straight-line reference encoder used as an independent test oracle.

Deliberately shares no code with the package: residuals come from
rank-revealing SVD projections instead of Gram-Schmidt, and corpus
directions come from a direct SVD of the coarse matrix instead of the
Gram-matrix eigendecomposition. Only the documented output conventions
(sign fixing, rank cutoff, score formulas) are mirrored.
"""

from __future__ import annotations

import numpy as np


def sign_fix(U: np.ndarray) -> np.ndarray:
    U = U.copy()
    for j in range(U.shape[1]):
        anchor = int(np.argmax(np.abs(U[:, j])))
        if U[anchor, j] < 0:
            U[:, j] *= -1.0
    return U


def reference_word_weight(S, i, m, D, sd, h):
    """Weight of word i of sentence matrix S: novelty + significance + uniqueness."""
    d, n = S.shape
    lo, hi = max(0, i - m), min(n, i + m + 1)
    context = S[:, [j for j in range(lo, hi) if j != i]]
    v = S[:, i]
    v_norm = float(np.linalg.norm(v))

    if context.shape[1] > 0:
        Uc, sc, _ = np.linalg.svd(context, full_matrices=False)
        basis = Uc[:, sc > sc[0] * 1e-12] if sc[0] > 0 else Uc[:, :0]
        residual = v - basis @ (basis.T @ v)
    else:
        residual = v.copy()
    r_last = float(np.linalg.norm(residual))

    if v_norm == 0.0 or r_last <= 1e-8 * v_norm:
        novelty, significance, q = 1.0, 0.0, np.zeros(d)
    else:
        q = residual / r_last
        novelty = float(np.exp(r_last / v_norm))
        significance = r_last / (2 * m + 1)

    aligned = sd * (q @ D) if D.shape[1] > 0 else np.zeros(0)
    uniqueness = float(np.exp(-np.linalg.norm(aligned) / h))
    return novelty + significance + uniqueness, (novelty, significance, uniqueness)


def encode_reference(token_lists, vectors, m, K, h, t, rerank="sigma", removal="sdr"):
    """Encode tokenized sentences with the plain two-phase recipe, inline."""
    mats = [np.column_stack([vectors[w] for w in toks]) for toks in token_lists]
    d = mats[0].shape[0]

    coarse_cols = []
    for S in mats:
        U, s, _ = np.linalg.svd(S, full_matrices=False)
        coarse_cols.append(sign_fix(U) @ s**t)
    Xc = np.column_stack(coarse_cols)

    U, s, _ = np.linalg.svd(Xc, full_matrices=False)
    keep = s > s[0] * 1e-7 if s[0] > 0 else np.zeros(len(s), dtype=bool)
    D_all = sign_fix(U[:, keep])[:, :K]
    sig_all = s[keep][:K]

    out = []
    for S in mats:
        r = D_all.shape[1]
        correlation = np.linalg.norm(S.T @ D_all, axis=0)
        o = sig_all * correlation if rerank == "sigma" else correlation
        order = sorted(range(r), key=lambda i: (-o[i], i))[:h]
        if removal == "sdr":
            D, sd = D_all[:, order], sig_all[order]
        elif removal == "sir":
            D, sd = D_all[:, :h], sig_all[:h]
        elif removal == "none":
            D, sd = D_all[:, :0], sig_all[:0]
        else:
            raise ValueError(removal)

        weights = [
            reference_word_weight(S, i, m, D, sd, h)[0] for i in range(S.shape[1])
        ]
        c = S @ np.asarray(weights)
        if removal != "none" and D.shape[1] > 0:
            c = c - D @ (D.T @ c)
        out.append(c)
    return out
