"""Ridge-penalized binary logistic regression.

The fitter runs Newton / iteratively-reweighted-least-squares steps on the
summed log-loss plus an L2 penalty on the weights (intercept unpenalized by
default), with step-halving whenever a full Newton step fails to decrease the
objective. With any positive ridge the objective is strictly convex, so the
optimum is unique and finite even on separable data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .dataset import ENROLLED, NOT_ENROLLED, DesignMatrix
from .errors import BadNumber, Degenerate, DimensionMismatch, SingleClass

# keeps log arguments strictly positive; irrelevant at any penalized optimum
_LOG_FLOOR = 1e-300

# smallest/largest doubles strictly inside (0, 1)
_P_MIN = math.ulp(0.0)
_P_MAX = math.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class FitConfig:
    ridge: float = 1e-8
    tolerance: float = 1e-10  # on max absolute parameter change
    max_iterations: int = 200
    penalize_intercept: bool = False

    def __post_init__(self):
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class LogisticModel:
    """Fitted parameters plus convergence metadata. Immutable; safe for
    concurrent read-only prediction."""

    intercept: float
    weights: tuple[float, ...]
    feature_names: tuple[str, ...]
    ridge: float
    iterations_used: int
    converged: bool
    final_objective: float

    def __post_init__(self):
        if len(self.weights) != len(self.feature_names):
            raise DimensionMismatch("weights and feature_names must align")
        params = (self.intercept, *self.weights, self.final_objective)
        if not all(math.isfinite(p) for p in params):
            raise Degenerate("model parameters must be finite")

    @property
    def d(self) -> int:
        return len(self.weights)


def sigmoid(z):
    """Numerically stable logistic function, elementwise on arrays.

    Uses exp(-|z|) so no input overflows; scalar in, float out.
    """
    z_arr = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z_arr))
    out = np.where(z_arr >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    if np.isscalar(z) or z_arr.ndim == 0:
        return float(out)
    return out


def _check_dims(w: np.ndarray, matrix: DesignMatrix) -> None:
    if w.shape != (matrix.d,):
        raise DimensionMismatch(f"expected {matrix.d} weights, got {w.shape}")


def objective(
    w, b: float, matrix: DesignMatrix, ridge: float, penalize_intercept: bool = False
) -> float:
    """Summed log-loss plus (ridge/2)*||w||^2 (intercept excluded unless
    ``penalize_intercept``)."""
    w = np.asarray(w, dtype=float)
    _check_dims(w, matrix)
    p = sigmoid(matrix.x[:, 1:] @ w + b)
    y = matrix.y
    loss = -(
        y * np.log(np.maximum(p, _LOG_FLOOR))
        + (1.0 - y) * np.log(np.maximum(1.0 - p, _LOG_FLOOR))
    ).sum()
    penalty = 0.5 * ridge * float(w @ w)
    if penalize_intercept:
        penalty += 0.5 * ridge * b * b
    return float(loss + penalty)


def gradient(
    w, b: float, matrix: DesignMatrix, ridge: float, penalize_intercept: bool = False
) -> tuple[np.ndarray, float]:
    """Gradient of ``objective``: (X^T (p - y) + ridge*w, sum(p - y))."""
    w = np.asarray(w, dtype=float)
    _check_dims(w, matrix)
    residual = sigmoid(matrix.x[:, 1:] @ w + b) - matrix.y
    grad_w = matrix.x[:, 1:].T @ residual + ridge * w
    grad_b = float(residual.sum())
    if penalize_intercept:
        grad_b += ridge * b
    return grad_w, grad_b


def fit(matrix: DesignMatrix, config: FitConfig = FitConfig()) -> LogisticModel:
    """Fit by Newton/IRLS with step-halving.

    Stops when the max absolute parameter change drops below the configured
    tolerance (converged) or when max_iterations is reached.
    """
    x, y = matrix.x, matrix.y
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise Degenerate("design matrix contains non-finite values")
    if matrix.n < 2:
        raise SingleClass("need at least 2 rows to fit")
    if y.min() == y.max():
        raise SingleClass("both classes must be present to fit")

    ridge = config.ridge
    penalty_mask = np.ones(matrix.d + 1)
    if not config.penalize_intercept:
        penalty_mask[0] = 0.0

    def full_objective(theta: np.ndarray) -> float:
        p = sigmoid(x @ theta)
        loss = -(
            y * np.log(np.maximum(p, _LOG_FLOOR))
            + (1.0 - y) * np.log(np.maximum(1.0 - p, _LOG_FLOOR))
        ).sum()
        return float(loss + 0.5 * ridge * float((penalty_mask * theta) @ theta))

    theta = np.zeros(matrix.d + 1)
    current = full_objective(theta)
    converged = False
    iterations = 0

    for iterations in range(1, config.max_iterations + 1):
        p = sigmoid(x @ theta)
        grad = x.T @ (p - y) + ridge * penalty_mask * theta
        weights = p * (1.0 - p)
        hessian = (x * weights[:, None]).T @ x
        hessian[np.diag_indices_from(hessian)] += ridge * penalty_mask
        try:
            factor = cho_factor(hessian, lower=True)
            step = cho_solve(factor, -grad)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise Degenerate(f"Hessian not positive-definite: {exc}") from exc
        if not np.isfinite(step).all():
            raise Degenerate("Newton step is non-finite")

        # Step-halving line search. Halving engages only on a float-visible
        # increase: near the optimum a Newton step moves the objective by
        # less than one ulp, and rejecting such steps would freeze the
        # parameters at sqrt(eps)-scale gradients instead of tolerance scale.
        slack = 8.0 * np.finfo(float).eps * (1.0 + abs(current))
        scale = 1.0
        candidate = theta + step
        value = full_objective(candidate)
        halvings = 0
        while value > current + slack and halvings < 60:
            scale *= 0.5
            candidate = theta + scale * step
            value = full_objective(candidate)
            halvings += 1
        if value > current + slack:
            converged = True  # no descent representable: at the optimum
            break
        change = float(np.max(np.abs(scale * step)))
        theta = candidate
        current = value
        if change < config.tolerance:
            converged = True
            break

    return LogisticModel(
        intercept=float(theta[0]),
        weights=tuple(float(v) for v in theta[1:]),
        feature_names=matrix.feature_names,
        ridge=ridge,
        iterations_used=iterations,
        converged=converged,
        final_objective=current,
    )


def _weight_array(model: LogisticModel) -> np.ndarray:
    return np.asarray(model.weights, dtype=float)


def predict_proba(model: LogisticModel, row) -> float:
    """Enrolment probability for one feature row, clamped strictly inside (0, 1)."""
    row = np.asarray(row, dtype=float)
    if row.shape != (model.d,):
        raise DimensionMismatch(f"expected {model.d} feature values, got {row.shape}")
    if not np.isfinite(row).all():
        raise BadNumber("feature values must be finite")
    p = sigmoid(model.intercept + float(_weight_array(model) @ row))
    return min(max(p, _P_MIN), _P_MAX)


def predict_proba_matrix(model: LogisticModel, matrix: DesignMatrix) -> np.ndarray:
    """Vectorized ``predict_proba`` over a design matrix's rows."""
    if matrix.d != model.d:
        raise DimensionMismatch(f"model has {model.d} features, matrix has {matrix.d}")
    p = sigmoid(matrix.x[:, 1:] @ _weight_array(model) + model.intercept)
    return np.clip(p, _P_MIN, _P_MAX)


def predict_label(model: LogisticModel, row, threshold: float = 0.5) -> str:
    """Decision rule: enrolled iff probability >= threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    return ENROLLED if predict_proba(model, row) >= threshold else NOT_ENROLLED
