"""Scalar kernel primitives and bandwidth-scaled product weights.

Conventions used throughout the package::

    u         = d / h                       (scaled distance)
    K_h(d)    = K(d / h) / h                (bandwidth-scaled kernel)
    K_h'(d)   = d/dd [K(d / h) / h]
              = K'(d / h) / h**2

The two-dimensional smoothers are built from the product weight
``K_hx(x - x_i) * K_hy(y - y_i)`` and its partial derivatives.

Only the Epanechnikov kernel ships.  The :class:`Kernel` value/derivative
pair keeps the family pluggable should another compactly supported kernel
ever be needed, but every estimator in this package uses Epanechnikov.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Kernel",
    "EPANECHNIKOV",
    "KernelConfig",
    "epanechnikov",
    "epanechnikov_deriv",
    "scaled_weight",
    "scaled_weight_deriv_x",
    "scaled_weight_deriv_y",
]


def _check_finite(u, name: str = "u"):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError(f"{name} must be finite")
    return u


def epanechnikov(u):
    """Epanechnikov kernel K(u) = 0.75 * (1 - u^2) on |u| <= 1, else 0.

    Accepts scalars or arrays; raises ``ValueError`` on non-finite input.
    """
    u = _check_finite(u)
    out = 0.75 * np.maximum(0.0, 1.0 - u * u)
    return out if out.ndim else float(out)


def epanechnikov_deriv(u):
    """Derivative K'(u) = -1.5 * u on |u| < 1, else 0.

    The kernel is not differentiable at |u| = 1; the value there is defined
    as 0, consistent with the support convention (a measure-zero choice).
    """
    u = _check_finite(u)
    out = np.where(np.abs(u) < 1.0, -1.5 * u, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Kernel:
    """A kernel as a (value, derivative) pair of callables on scaled distances."""

    value: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    name: str = "epanechnikov"


EPANECHNIKOV = Kernel(value=epanechnikov, deriv=epanechnikov_deriv)


@dataclass(frozen=True)
class KernelConfig:
    """Bandwidths for the two-dimensional product kernel.

    Parameters
    ----------
    h_x, h_y : float
        Positive bandwidths for the x and y covariates.
    """

    h_x: float
    h_y: float

    def __post_init__(self):
        if not (np.isfinite(self.h_x) and self.h_x > 0):
            raise ValueError(f"h_x must be a positive real, got {self.h_x}")
        if not (np.isfinite(self.h_y) and self.h_y > 0):
            raise ValueError(f"h_y must be a positive real, got {self.h_y}")

    @classmethod
    def of(cls, h: float) -> "KernelConfig":
        """Common case h_x = h_y = h."""
        return cls(h_x=float(h), h_y=float(h))


def scaled_weight(config: KernelConfig, dx, dy):
    """Product weight K(dx/h_x)/h_x * K(dy/h_y)/h_y."""
    kx = epanechnikov(np.asarray(dx, dtype=float) / config.h_x) / config.h_x
    ky = epanechnikov(np.asarray(dy, dtype=float) / config.h_y) / config.h_y
    out = kx * ky
    return out if np.ndim(out) else float(out)


def scaled_weight_deriv_x(config: KernelConfig, dx, dy):
    """Partial derivative of the product weight in dx: K'(dx/h_x)/h_x^2 * K(dy/h_y)/h_y."""
    kdx = epanechnikov_deriv(np.asarray(dx, dtype=float) / config.h_x) / config.h_x**2
    ky = epanechnikov(np.asarray(dy, dtype=float) / config.h_y) / config.h_y
    out = kdx * ky
    return out if np.ndim(out) else float(out)


def scaled_weight_deriv_y(config: KernelConfig, dx, dy):
    """Partial derivative of the product weight in dy: K(dx/h_x)/h_x * K'(dy/h_y)/h_y."""
    kx = epanechnikov(np.asarray(dx, dtype=float) / config.h_x) / config.h_x
    kdy = epanechnikov_deriv(np.asarray(dy, dtype=float) / config.h_y) / config.h_y**2
    out = kx * kdy
    return out if np.ndim(out) else float(out)
