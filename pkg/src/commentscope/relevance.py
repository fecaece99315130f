"""Mean-threshold labelling and binomial logistic regression fitted by
iteratively reweighted least squares."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linprog
from scipy.special import expit, xlogy

from .dataset import FEATURES, AuthorRecord, SummaryStats
from .errors import (
    DegenerateResponseError,
    DimensionMismatchError,
    EmptyInputError,
    MalformedInputError,
    SingularSystemError,
)

COEFFICIENT_NAMES = ("intercept",) + FEATURES

_EPS = np.finfo(float).eps
_ETA_LIMIT = 30.0
_DEVIANCE_CLAMP = 1e-12
_RANK_TOL = 1e-11


@dataclass(frozen=True)
class BinaryFeatureRow:
    author: str
    replies: int
    likes: int
    words: int
    comments: int
    relevant: int

    def predictors(self) -> tuple[int, int, int, int]:
        return (self.replies, self.likes, self.words, self.comments)


@dataclass(frozen=True)
class LabeledDesign:
    X: np.ndarray
    y: np.ndarray
    row_authors: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class LogisticFit:
    coefficients: np.ndarray
    null_deviance: float
    residual_deviance: float
    aic: float
    df_total: int
    df_residual: int
    iterations: int
    converged: bool
    separation_detected: bool
    names: tuple[str, ...] = COEFFICIENT_NAMES

    def to_dict(self) -> dict:
        return {
            "coefficients": {n: float(c) for n, c in zip(self.names, self.coefficients)},
            "null_deviance": float(self.null_deviance),
            "residual_deviance": float(self.residual_deviance),
            "aic": float(self.aic),
            "df_total": int(self.df_total),
            "df_residual": int(self.df_residual),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "separation_detected": bool(self.separation_detected),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticFit":
        names = tuple(d["coefficients"])
        return cls(
            coefficients=np.array([d["coefficients"][n] for n in names], dtype=float),
            null_deviance=float(d["null_deviance"]),
            residual_deviance=float(d["residual_deviance"]),
            aic=float(d["aic"]),
            df_total=int(d["df_total"]),
            df_residual=int(d["df_residual"]),
            iterations=int(d["iterations"]),
            converged=bool(d["converged"]),
            separation_detected=bool(d["separation_detected"]),
            names=names,
        )

    def report(self) -> str:
        lines = ["Coefficients:"]
        width = max(len(n) for n in self.names)
        for name, value in zip(self.names, self.coefficients):
            lines.append(f"  {name:<{width}}  {value: .6g}")
        lines += [
            f"df_total: {self.df_total}",
            f"df_residual: {self.df_residual}",
            f"null_deviance: {self.null_deviance:.6g}",
            f"residual_deviance: {self.residual_deviance:.6g}",
            f"aic: {self.aic:.6g}",
            f"iterations: {self.iterations}",
            f"converged: {str(self.converged).lower()}",
            f"separation_detected: {str(self.separation_detected).lower()}",
        ]
        if self.separation_detected:
            lines.append(
                "warning: the classes are separable; coefficients diverge and "
                "only their signs are meaningful"
            )
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# labelling

def _mean_vector(means) -> tuple[float, float, float, float]:
    if isinstance(means, SummaryStats):
        return means.means()
    vals = tuple(float(m) for m in means)
    if len(vals) != len(FEATURES):
        raise DimensionMismatchError(f"expected {len(FEATURES)} means, got {len(vals)}")
    return vals


def label_relevant(records: Sequence[AuthorRecord], means) -> list[int]:
    """1 for authors at or above the mean on every feature, else 0.

    ``means`` is a SummaryStats or an explicit (replies, likes, words,
    comments) tuple.
    """
    m = _mean_vector(means)
    return [int(all(v >= t for v, t in zip(r.values(), m))) for r in records]


def binarize(records: Sequence[AuthorRecord], means) -> list[BinaryFeatureRow]:
    m = _mean_vector(means)
    out = []
    for r in records:
        flags = [int(v >= t) for v, t in zip(r.values(), m)]
        out.append(BinaryFeatureRow(r.author, *flags, relevant=int(all(flags))))
    return out


def design_matrix(rows: Sequence[BinaryFeatureRow]) -> LabeledDesign:
    if not rows:
        raise EmptyInputError("design needs at least one row")
    X = np.array([(1,) + r.predictors() for r in rows], dtype=float)
    y = np.array([r.relevant for r in rows], dtype=float)
    return LabeledDesign(X, y, tuple(r.author for r in rows))


# ---------------------------------------------------------------------------
# logit link with saturation matching the usual GLM conventions

def _linkinv(eta):
    # beyond +-30 the odds are pinned so mu never reaches exactly 0 or 1
    odds = np.exp(np.clip(eta, -_ETA_LIMIT, _ETA_LIMIT))
    odds = np.where(eta < -_ETA_LIMIT, _EPS, odds)
    odds = np.where(eta > _ETA_LIMIT, 1 / _EPS, odds)
    return odds / (1 + odds)


def _mu_eta(eta):
    e = np.exp(np.clip(eta, -_ETA_LIMIT, _ETA_LIMIT))
    d = e / (1 + e) ** 2
    return np.where(np.abs(eta) > _ETA_LIMIT, _EPS, np.maximum(d, _EPS))


def binomial_deviance(y, mu) -> float:
    mu = np.clip(mu, _DEVIANCE_CLAMP, 1 - _DEVIANCE_CLAMP)
    return float(2 * np.sum(xlogy(y, y / mu) + xlogy(1 - y, (1 - y) / (1 - mu))))


def detect_separation(X, y, tol: float = 1e-7) -> bool:
    """True when some non-zero direction orders every case by its label,
    i.e. the maximum-likelihood estimate does not exist (complete or
    quasi-complete separation)."""
    X = np.asarray(X, dtype=float)
    s = 2 * np.asarray(y, dtype=float) - 1
    A = s[:, None] * X
    res = linprog(
        c=-A.sum(axis=0),
        A_ub=-A,
        b_ub=np.zeros(len(s)),
        bounds=[(-1, 1)] * X.shape[1],
        method="highs",
    )
    if res.status != 0:
        return False
    return -res.fun > tol * max(1.0, np.abs(A).sum())


def _wls_step(X, z, w):
    Xw = X * w[:, None]
    Q, R, piv = scipy.linalg.qr(Xw, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[-1] <= _RANK_TOL * diag[0]:
        rank = int(np.sum(diag > _RANK_TOL * diag[0])) if diag.size else 0
        raise SingularSystemError(
            f"weighted design has rank {rank} < {X.shape[1]} columns"
        )
    coef_piv = scipy.linalg.solve_triangular(R, Q.T @ (z * w))
    coef = np.empty_like(coef_piv)
    coef[piv] = coef_piv
    return coef


def fit_logistic(design: LabeledDesign, max_iterations: int = 25, tolerance: float = 1e-8) -> LogisticFit:
    """Fit a logit-link binomial GLM by Fisher scoring.

    Iteration stops once ``|dev - dev_old| / (|dev| + 0.1) <= tolerance``.
    When the classes are separable the estimate does not exist: the solver
    then runs all ``max_iterations`` steps and reports ``converged=False``
    with the last iterate.
    """
    X = np.asarray(design.X, dtype=float)
    y = np.asarray(design.y, dtype=float)
    n, p = X.shape
    if y.shape != (n,):
        raise DimensionMismatchError(f"response has shape {y.shape}, design has {n} rows")
    if n < p:
        raise DimensionMismatchError(f"{n} observations cannot identify {p} coefficients")
    if np.all(y == y[0]):
        raise DegenerateResponseError("response is constant; nothing to discriminate")

    separated = detect_separation(X, y)

    mu = (y + 0.5) / 2
    eta = np.log(mu / (1 - mu))
    dev_old = binomial_deviance(y, mu)
    coef = np.zeros(p)
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        d = _mu_eta(eta)
        var = mu * (1 - mu)
        z = eta + (y - mu) / d
        w = np.sqrt(d * d / var)
        coef = _wls_step(X, z, w)
        eta = X @ coef
        mu = _linkinv(eta)
        dev = binomial_deviance(y, mu)
        if not separated and abs(dev - dev_old) / (abs(dev) + 0.1) <= tolerance:
            converged = True
            break
        dev_old = dev

    dev = binomial_deviance(y, mu)
    null_dev = binomial_deviance(y, np.full(n, y.mean()))
    names = COEFFICIENT_NAMES if p == len(COEFFICIENT_NAMES) else tuple(f"x{i}" for i in range(p))
    return LogisticFit(
        coefficients=coef,
        null_deviance=null_dev,
        residual_deviance=dev,
        aic=dev + 2 * p,
        df_total=n - 1,
        df_residual=n - p,
        iterations=it,
        converged=converged,
        separation_detected=separated,
        names=names,
    )


# ---------------------------------------------------------------------------
# prediction

def _matrix(design) -> np.ndarray:
    X = design.X if isinstance(design, LabeledDesign) else design
    return np.atleast_2d(np.asarray(X, dtype=float))


def predict_probabilities(fit: LogisticFit, design) -> np.ndarray:
    X = _matrix(design)
    if X.shape[1] != len(fit.coefficients):
        raise DimensionMismatchError(
            f"design has {X.shape[1]} columns, model has {len(fit.coefficients)} coefficients"
        )
    return expit(X @ fit.coefficients)


def classify(probabilities, cutoff: float = 0.5) -> np.ndarray:
    if not 0.0 <= cutoff <= 1.0:
        raise MalformedInputError(f"cutoff must lie in [0, 1], got {cutoff}")
    return (np.asarray(probabilities, dtype=float) > cutoff).astype(int)


def positive_cases(classes) -> list[int]:
    """1-based positions of the predicted positives."""
    return [i + 1 for i, c in enumerate(classes) if c == 1]


def accuracy(predicted, actual) -> float:
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise DimensionMismatchError(f"lengths differ: {predicted.shape} vs {actual.shape}")
    if predicted.size == 0:
        raise EmptyInputError("accuracy of zero predictions")
    return float(np.mean(predicted == actual))
