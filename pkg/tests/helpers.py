"""Independent oracles shared by the unit and acceptance suites.

These deliberately avoid the library code paths they check: the AUC oracle
counts pairs, the gradient oracle uses central finite differences of the
objective, and the CSV builder writes by hand.
"""

from __future__ import annotations

import numpy as np

from enrollcast import ENROLLED, DesignMatrix, gradient, objective


def mann_whitney_auc(scores, truth) -> float:
    """Brute-force pairwise AUC: (#concordant + 0.5 * #tied) / (#pos * #neg)."""
    scores = np.asarray(scores, dtype=float)
    is_pos = np.array([t == ENROLLED for t in truth])
    pos = scores[is_pos][:, None]
    neg = scores[~is_pos][None, :]
    concordant = np.sum(pos > neg)
    tied = np.sum(pos == neg)
    return float((concordant + 0.5 * tied) / (pos.shape[0] * neg.shape[1]))


def finite_difference_gradient(
    w: np.ndarray, b: float, matrix: DesignMatrix, ridge: float, step: float = 1e-5
):
    """Central differences of the objective wrt every parameter."""
    w = np.asarray(w, dtype=float)
    grad_w = np.zeros_like(w)
    for i in range(w.size):
        bump = np.zeros_like(w)
        bump[i] = step
        grad_w[i] = (
            objective(w + bump, b, matrix, ridge) - objective(w - bump, b, matrix, ridge)
        ) / (2 * step)
    grad_b = (objective(w, b + step, matrix, ridge) - objective(w, b - step, matrix, ridge)) / (
        2 * step
    )
    return grad_w, grad_b


def gradient_relative_error(w, b, matrix, ridge) -> float:
    """Max-norm gap between analytic and finite-difference gradients, scaled
    by max(1, max-norm of the analytic gradient)."""
    grad_w, grad_b = gradient(w, b, matrix, ridge)
    fd_w, fd_b = finite_difference_gradient(w, b, matrix, ridge)
    analytic = np.concatenate((grad_w, [grad_b]))
    numeric = np.concatenate((fd_w, [fd_b]))
    return float(np.max(np.abs(analytic - numeric)) / max(1.0, np.max(np.abs(analytic))))


def csv_bytes(header: list[str], rows: list[list]) -> bytes:
    """Hand-built CSV (no library quoting; test inputs contain no commas)."""
    lines = [",".join(header)]
    lines.extend(",".join(str(cell) for cell in row) for row in rows)
    return ("\n".join(lines) + "\n").encode()
