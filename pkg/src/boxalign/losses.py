"""Asymmetric smooth-L1 regression loss.

The loss takes the raw coordinate delta x = x_pred - x_gt and penalizes
undersized predictions (x < 0) `alpha` times more than equally oversized
ones, while staying quadratic inside the smoothing interval (-beta, beta):

    x in [0, beta):   x^2 / (2 sqrt(alpha) beta)
    x in (-beta, 0):  sqrt(alpha) x^2 / (2 beta)
    x >= beta:        x / sqrt(alpha) - beta / (2 sqrt(alpha))
    x <= -beta:       -sqrt(alpha) x - sqrt(alpha) beta / 2

With alpha = 1 this is exactly the standard smooth-L1 loss. The value and
gradient are continuous at -beta, 0 and beta, and satisfy the asymmetry law
loss(-x) = alpha * loss(x) for every x.

Per-box regression applies the asymmetric loss to the width and height
deltas only; center coordinates use the symmetric (alpha = 1) loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInputError
from .geometry import Box

__all__ = [
    "AsymmetricLossParams",
    "BoxLossGradient",
    "loss_value",
    "loss_gradient",
    "loss_value_array",
    "loss_gradient_array",
    "box_regression_loss",
]


@dataclass(frozen=True)
class AsymmetricLossParams:
    """Parameters of the asymmetric smooth-L1 loss.

    Attributes:
        alpha: Asymmetry term, > 0. alpha = 1 recovers standard smooth-L1.
        beta: Smoothing interval half-width, > 0, in the units of x.
    """

    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be a positive finite real, got {self.alpha!r}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be a positive finite real, got {self.beta!r}")


def loss_value(x: float, p: AsymmetricLossParams) -> float:
    """Evaluate the asymmetric smooth-L1 loss at delta x."""
    if not math.isfinite(x):
        raise NonFiniteInputError(f"loss input must be finite, got {x!r}")
    sa = math.sqrt(p.alpha)
    beta = p.beta
    if x >= beta:
        return x / sa - beta / (2 * sa)
    if x <= -beta:
        return -sa * x - sa * beta / 2
    if x >= 0.0:
        return x * x / (2 * sa * beta)
    return sa * x * x / (2 * beta)


def loss_gradient(x: float, p: AsymmetricLossParams) -> float:
    """Derivative of the loss with respect to x; continuous at 0 and +-beta.

    At exactly x = +-beta the linear-branch value is returned (the closed
    branch conditions); continuity makes the choice observationally
    irrelevant.
    """
    if not math.isfinite(x):
        raise NonFiniteInputError(f"loss input must be finite, got {x!r}")
    sa = math.sqrt(p.alpha)
    beta = p.beta
    if x >= beta:
        return 1 / sa
    if x <= -beta:
        return -sa
    if x >= 0.0:
        return x / (sa * beta)
    return sa * x / beta


def loss_value_array(x: np.ndarray, p: AsymmetricLossParams) -> np.ndarray:
    """Vectorized `loss_value` over an array of deltas."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("loss input array contains non-finite values")
    sa = math.sqrt(p.alpha)
    beta = p.beta
    out = np.where(x >= 0.0, x * x / (2 * sa * beta), sa * x * x / (2 * beta))
    out = np.where(x >= beta, x / sa - beta / (2 * sa), out)
    out = np.where(x <= -beta, -sa * x - sa * beta / 2, out)
    return out


def loss_gradient_array(x: np.ndarray, p: AsymmetricLossParams) -> np.ndarray:
    """Vectorized `loss_gradient` over an array of deltas."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("loss input array contains non-finite values")
    sa = math.sqrt(p.alpha)
    beta = p.beta
    out = np.where(x >= 0.0, x / (sa * beta), sa * x / beta)
    out = np.where(x >= beta, 1 / sa, out)
    out = np.where(x <= -beta, -sa, out)
    return out


@dataclass(frozen=True)
class BoxLossGradient:
    """Gradient of the per-box regression loss with respect to the
    predicted box's fields."""

    x_min: float
    y_min: float
    width: float
    height: float


def box_regression_loss(
    pred: Box, gt: Box, p: AsymmetricLossParams
) -> tuple[float, BoxLossGradient]:
    """Per-box regression loss and its gradient w.r.t. the predicted box.

    Width and height deltas go through the asymmetric loss; the center
    deltas go through the symmetric loss (alpha = 1, same beta), since the
    asymmetry only concerns box size, not placement.

    Returns:
        (value, gradient) where the gradient covers all four predicted
        fields via the chain rule (center_x = x_min + width / 2, so the
        center terms contribute to x_min with weight 1 and to width with
        weight 1/2; likewise for y).
    """
    symmetric = AsymmetricLossParams(alpha=1.0, beta=p.beta)
    dw = pred.width - gt.width
    dh = pred.height - gt.height
    dcx = pred.center[0] - gt.center[0]
    dcy = pred.center[1] - gt.center[1]

    value = (
        loss_value(dw, p)
        + loss_value(dh, p)
        + loss_value(dcx, symmetric)
        + loss_value(dcy, symmetric)
    )
    g_w = loss_gradient(dw, p)
    g_h = loss_gradient(dh, p)
    g_cx = loss_gradient(dcx, symmetric)
    g_cy = loss_gradient(dcy, symmetric)
    gradient = BoxLossGradient(
        x_min=g_cx,
        y_min=g_cy,
        width=g_w + g_cx / 2.0,
        height=g_h + g_cy / 2.0,
    )
    return value, gradient
