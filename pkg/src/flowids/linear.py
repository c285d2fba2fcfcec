"""Binary logistic regression trained by full-batch gradient descent.

Objective: mean negative log-likelihood plus an optional penalty on the
weights (never the intercept): L2 adds (lam/2)*||w||^2, L1 adds lam*||w||_1.
L2/no-penalty steps use backtracking line search under the Armijo rule;
L1 uses a proximal (soft-threshold) step with the standard sufficient
decrease condition. Weights start at zero, so training is deterministic.

Features are z-scored internally by default (zero-variance columns get
scale 1); stored means/scales make prediction independent of that choice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dataframe import LabelVector
from .preprocess import FeatureMatrix


class Penalty(enum.Enum):
    NONE = "none"
    L1 = "l1"
    L2 = "l2"


@dataclass
class LogisticConfig:
    penalty: Penalty = Penalty.L2
    strength: float | None = None      # None -> 1 / n_train at fit time
    max_iterations: int = 10000
    tolerance: float = 1e-6            # on gradient / prox-residual max-norm
    initial_step: float = 1.0
    backtrack_factor: float = 0.5
    armijo_constant: float = 1e-4
    standardize: bool = True

    def to_dict(self) -> dict:
        return {
            "penalty": self.penalty.value,
            "strength": self.strength,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "initial_step": self.initial_step,
            "backtrack_factor": self.backtrack_factor,
            "armijo_constant": self.armijo_constant,
            "standardize": self.standardize,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticConfig":
        return cls(
            penalty=Penalty(d["penalty"]),
            strength=d["strength"],
            max_iterations=d["max_iterations"],
            tolerance=d["tolerance"],
            initial_step=d["initial_step"],
            backtrack_factor=d["backtrack_factor"],
            armijo_constant=d["armijo_constant"],
            standardize=d["standardize"],
        )


@dataclass
class LogisticModel:
    weights: np.ndarray
    intercept: float
    means: np.ndarray           # zeros when standardize is off
    scales: np.ndarray          # ones when standardize is off
    config: LogisticConfig
    resolved_strength: float
    converged: bool
    iterations_used: int
    final_objective: float
    feature_names: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "means": self.means.tolist(),
            "scales": self.scales.tolist(),
            "config": self.config.to_dict(),
            "resolved_strength": self.resolved_strength,
            "converged": self.converged,
            "iterations_used": self.iterations_used,
            "final_objective": self.final_objective,
            "feature_names": self.feature_names,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            intercept=float(d["intercept"]),
            means=np.asarray(d["means"], dtype=np.float64),
            scales=np.asarray(d["scales"], dtype=np.float64),
            config=LogisticConfig.from_dict(d["config"]),
            resolved_strength=float(d["resolved_strength"]),
            converged=bool(d["converged"]),
            iterations_used=int(d["iterations_used"]),
            final_objective=float(d["final_objective"]),
            feature_names=list(d["feature_names"]),
        )


def _softplus(z: np.ndarray) -> np.ndarray:
    # log(1 + exp(z)) without overflow
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def smooth_objective(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float,
                     lam: float, penalty: Penalty) -> float:
    """Mean NLL plus the L2 term; L1 is handled outside the smooth part."""
    z = X @ w + b
    nll = float(np.mean(_softplus(z) - y * z))
    if penalty is Penalty.L2:
        nll += 0.5 * lam * float(w @ w)
    return nll


def objective(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float,
              lam: float, penalty: Penalty) -> float:
    """Full penalized objective."""
    val = smooth_objective(X, y, w, b, lam, penalty)
    if penalty is Penalty.L1:
        val += lam * float(np.sum(np.abs(w)))
    return val


def smooth_gradient(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float,
                    lam: float, penalty: Penalty) -> tuple[np.ndarray, float]:
    z = X @ w + b
    resid = _sigmoid(z) - y
    gw = X.T @ resid / len(y)
    if penalty is Penalty.L2:
        gw = gw + lam * w
    gb = float(np.mean(resid))
    return gw, gb


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _l1_residual(gw: np.ndarray, gb: float, w: np.ndarray, lam: float) -> float:
    """Max-norm distance of the smooth gradient from the L1 optimality set."""
    r = np.where(
        w != 0.0,
        np.abs(gw + lam * np.sign(w)),
        np.maximum(np.abs(gw) - lam, 0.0),
    )
    return max(float(np.max(r)) if len(r) else 0.0, abs(gb))


def fit_logistic(X: FeatureMatrix, y: LabelVector,
                 config: LogisticConfig | None = None) -> LogisticModel:
    if config is None:
        config = LogisticConfig()
    n, d = X.rows, X.cols
    yv = y.values.astype(np.float64)
    if n != len(y):
        raise ValueError(f"{n} rows but {len(y)} labels")
    if n < 2:
        raise ValueError("need at least 2 training rows")
    if len(np.unique(y.values)) < 2:
        raise ValueError("training labels contain a single class")
    if not np.all(np.isfinite(X.values)):
        raise ValueError("feature matrix contains non-finite values")

    if config.standardize:
        means = X.values.mean(axis=0)
        scales = X.values.std(axis=0)
        scales = np.where(scales > 0.0, scales, 1.0)
        Xs = (X.values - means) / scales
    else:
        means = np.zeros(d)
        scales = np.ones(d)
        Xs = X.values

    lam = config.strength if config.strength is not None else 1.0 / n
    if lam < 0:
        raise ValueError(f"penalty strength {lam} must be nonnegative")
    penalty = config.penalty
    if lam == 0.0:
        penalty = Penalty.NONE

    w = np.zeros(d)
    b = 0.0
    f = objective(Xs, yv, w, b, lam, penalty)
    step = config.initial_step
    converged = False
    iterations = 0

    for iterations in range(1, config.max_iterations + 1):
        gw, gb = smooth_gradient(Xs, yv, w, b, lam, penalty)

        if penalty is Penalty.L1:
            if _l1_residual(gw, gb, w, lam) <= config.tolerance:
                iterations -= 1
                converged = True
                break
        else:
            if max(float(np.max(np.abs(gw))) if d else 0.0, abs(gb)) <= config.tolerance:
                iterations -= 1
                converged = True
                break

        f_smooth = smooth_objective(Xs, yv, w, b, lam, penalty)
        step = min(step / config.backtrack_factor, config.initial_step)
        accepted = False
        for _ in range(60):
            if penalty is Penalty.L1:
                w_new = _soft_threshold(w - step * gw, step * lam)
                b_new = b - step * gb
                dw = w_new - w
                db = b_new - b
                quad = f_smooth + float(gw @ dw) + gb * db \
                    + (float(dw @ dw) + db * db) / (2.0 * step)
                if smooth_objective(Xs, yv, w_new, b_new, lam, penalty) <= quad:
                    accepted = True
                    break
            else:
                w_new = w - step * gw
                b_new = b - step * gb
                gnorm2 = float(gw @ gw) + gb * gb
                if objective(Xs, yv, w_new, b_new, lam, penalty) <= \
                        f - config.armijo_constant * step * gnorm2:
                    accepted = True
                    break
            step *= config.backtrack_factor
        if not accepted:
            break  # step underflow; gradient numerically flat
        w, b = w_new, b_new
        f = objective(Xs, yv, w, b, lam, penalty)

    return LogisticModel(
        weights=w,
        intercept=b,
        means=means,
        scales=scales,
        config=config,
        resolved_strength=lam,
        converged=converged,
        iterations_used=iterations,
        final_objective=f,
        feature_names=list(X.names),
    )


def predict_proba_linear(model: LogisticModel, X: FeatureMatrix) -> np.ndarray:
    if X.cols != len(model.weights):
        raise ValueError(
            f"matrix width {X.cols} does not match model width {len(model.weights)}"
        )
    Xs = (X.values - model.means) / model.scales
    p = _sigmoid(Xs @ model.weights + model.intercept)
    # keep outputs strictly inside (0, 1)
    return np.clip(p, 1e-12, 1.0 - 1e-12)


def predict_label_linear(model: LogisticModel, X: FeatureMatrix,
                         threshold: float = 0.5) -> LabelVector:
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold {threshold} not in (0, 1)")
    p = predict_proba_linear(model, X)
    return LabelVector((p >= threshold).astype(np.int64))
