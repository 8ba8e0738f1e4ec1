"""Closed-form main terms for the variances and the pair-correlation sum.

Regimes for degree d_F >= 2 are split at h* = X^{1 - 1/d_F} (equivalently
delta* = X^{-1/d_F}, or X = T^{d_F} for the pair-correlation sum).  Large
h, delta or X (regime I) use the formulas linear in log(X/h), log(1/delta) or
log T; small ones (regime II) use the flat forms.  A value exactly on the
boundary is assigned to regime I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lfunc_registry import EULER_GAMMA, LOG_2PI, LFunctionDescriptor


@dataclass(frozen=True)
class PredictionLine:
    kind: str  # tilde | delta | paircorr
    regime: str  # degree1 | regimeI | regimeII
    value: float
    normalized: float
    formula: str  # MS | A1 | A2 | C1 | C2 | F250 | MurtyPerelli


def _single_regime(desc: LFunctionDescriptor) -> bool:
    return desc.degree <= 1.0 + 1e-12


def regime_boundary(desc: LFunctionDescriptor, X: float):
    """h* = X^{1 - 1/d_F}, or None when d_F = 1."""
    if X <= 1:
        raise ValueError("X must exceed 1")
    if _single_regime(desc):
        return None
    return X ** (1.0 - 1.0 / desc.degree)


def delta_boundary(desc: LFunctionDescriptor, X: float):
    """delta* = X^{-1/d_F}, or None when d_F = 1."""
    if X <= 1:
        raise ValueError("X must exceed 1")
    if _single_regime(desc):
        return None
    return X ** (-1.0 / desc.degree)


def c1_normalized(desc: LFunctionDescriptor, X: float, h: float) -> float:
    d = desc.degree
    return d * math.log(X / h) + desc.log_conductor - (EULER_GAMMA + LOG_2PI) * d


def c2_normalized(X: float) -> float:
    return (6.0 * math.log(X) - (3.0 + 8.0 * math.log(2.0))) / 6.0


def a1_normalized(desc: LFunctionDescriptor, delta: float) -> float:
    d = desc.degree
    return 0.5 * (d * math.log(1.0 / delta) + desc.log_conductor + (1.0 - EULER_GAMMA - LOG_2PI) * d)


def a2_normalized(X: float) -> float:
    return (3.0 * math.log(X) - 4.0 * math.log(2.0)) / 6.0


def predict_v_tilde(desc: LFunctionDescriptor, X: float, h: float) -> PredictionLine:
    if not 1.0 < h < X:
        raise ValueError(f"need 1 < h < X, got h = {h}, X = {X}")
    hstar = regime_boundary(desc, X)
    if hstar is None:
        norm, regime, formula = c1_normalized(desc, X, h), "degree1", "MS"
    elif h >= hstar:
        norm, regime, formula = c1_normalized(desc, X, h), "regimeI", "C1"
    else:
        norm, regime, formula = c2_normalized(X), "regimeII", "C2"
    return PredictionLine("tilde", regime, norm * h * X, norm, formula)


def predict_v_delta(desc: LFunctionDescriptor, X: float, delta: float) -> PredictionLine:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"need 0 < delta < 1, got {delta}")
    dstar = delta_boundary(desc, X)
    if dstar is None:
        norm, regime, formula = a1_normalized(desc, delta), "degree1", "A1"
    elif delta >= dstar:
        norm, regime, formula = a1_normalized(desc, delta), "regimeI", "A1"
    else:
        norm, regime, formula = a2_normalized(X), "regimeII", "A2"
    return PredictionLine("delta", regime, norm * delta * X * X, norm, formula)


def pair_correlation_large_x(desc: LFunctionDescriptor, T: float) -> float:
    d = desc.degree
    return (T / math.pi) * (d * math.log(T / (2.0 * math.pi)) + desc.log_conductor - d)


def predict_pair_correlation(desc: LFunctionDescriptor, X: float, T: float) -> PredictionLine:
    if T <= 2.0 * math.pi:
        raise ValueError("T must exceed 2 pi")
    if X < 1.0:
        raise ValueError("X must be at least 1")
    d = desc.degree
    if math.log(X) >= d * math.log(T):
        value, regime, formula = pair_correlation_large_x(desc, T), "regimeI", "F250"
    else:
        value, regime, formula = T * math.log(X) / math.pi, "regimeII", "MurtyPerelli"
    return PredictionLine("paircorr", regime, value, value * math.pi / T, formula)
