"""Clayton and Gumbel copulas: CDF, first-argument partial derivative,
conditional-inverse sampling transform, and Kendall-tau parameter maps.

Both families are Archimedean with survival-scale coupling as used by the
data generators: a pair (s1, s2) ~ C is drawn by s1 ~ U(0,1) and
s2 = F^{-1}(v2 | s1) where F(s2 | s1) = d C(s1, s2) / d s1.  For these two
families d1 C(s1, 1) = 1, so the conditional distribution needs no
normalisation.

Numerical conventions: inputs to the power expressions are clamped to
[1e-12, 1 - 1e-12]; boundary identities C(s, 1) = s, C(1, s) = s,
C(s, 0) = C(0, s) = 0 and d1 C(s1, 1) = 1 are handled before any power
expression is evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError

__all__ = [
    "CopulaModel",
    "cdf",
    "partial1",
    "conditional_inverse",
    "tau_to_theta",
]

CLAMP = 1e-12

_FAMILIES = ("clayton", "gumbel")


@dataclass(frozen=True)
class CopulaModel:
    """Archimedean copula family tag plus dependence parameter.

    Clayton requires theta > 0; Gumbel requires theta >= 1 (theta = 1 is
    the independence copula).
    """

    family: str
    theta: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigurationError(f"unknown copula family {self.family!r}; expected one of {_FAMILIES}")
        if not np.isfinite(self.theta):
            raise ConfigurationError("theta must be finite")
        if self.family == "clayton" and self.theta <= 0:
            raise ConfigurationError(f"Clayton copula requires theta > 0, got {self.theta}")
        if self.family == "gumbel" and self.theta < 1:
            raise ConfigurationError(f"Gumbel copula requires theta >= 1, got {self.theta}")

    @classmethod
    def from_tau(cls, family: str, tau: float) -> "CopulaModel":
        return cls(family=family, theta=tau_to_theta(family, tau))


def tau_to_theta(family: str, tau: float) -> float:
    """Map Kendall's tau to the dependence parameter.

    Clayton: theta = 2 tau / (1 - tau) for tau in (0, 1).
    Gumbel:  theta = 1 / (1 - tau) for tau in [0, 1).
    """
    tau = float(tau)
    if family == "clayton":
        if not 0.0 < tau < 1.0:
            raise ConfigurationError(f"Clayton requires tau in (0, 1), got {tau}")
        return 2.0 * tau / (1.0 - tau)
    if family == "gumbel":
        if not 0.0 <= tau < 1.0:
            raise ConfigurationError(f"Gumbel requires tau in [0, 1), got {tau}")
        return 1.0 / (1.0 - tau)
    raise ConfigurationError(f"unknown copula family {family!r}")


def _clamp(u):
    return np.clip(np.asarray(u, dtype=float), CLAMP, 1.0 - CLAMP)


def cdf(model: CopulaModel, s1, s2):
    """Copula CDF C_theta(s1, s2). Accepts scalars or arrays in [0, 1]."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    if np.any((s1 < 0) | (s1 > 1)) or np.any((s2 < 0) | (s2 > 1)):
        raise ValueError("copula arguments must lie in [0, 1]")
    # boundary identities first, so 0^negative never occurs
    at_zero = (s1 == 0.0) | (s2 == 0.0)
    u = _clamp(s1)
    v = _clamp(s2)
    with np.errstate(over="ignore"):  # huge theta saturates to the correct limit
        if model.family == "clayton":
            th = model.theta
            ssum = np.expm1(-th * np.log(u)) + np.expm1(-th * np.log(v))  # u^-th + v^-th - 2
            core = np.exp(-np.log1p(ssum) / th)
        else:
            th = model.theta
            a = -np.log(u)
            b = -np.log(v)
            # (a^th + b^th)^(1/th) computed as max * (1 + (min/max)^th)^(1/th)
            m = np.maximum(a, b)
            r = np.minimum(a, b) / m
            core = np.exp(-m * np.exp(np.log1p(r**th) / th))
    out = np.where(at_zero, 0.0, np.where(s1 == 1.0, s2, np.where(s2 == 1.0, s1, core)))
    return out if out.ndim else float(out)


def partial1(model: CopulaModel, s1, s2):
    """First-argument partial derivative d C(s1, s2) / d s1, in [0, 1].

    Boundary conventions: at s2 = 1 the value is exactly 1 (C(s1, 1) = s1);
    at s2 = 0 it is 0; interior s1 is clamped to [1e-12, 1 - 1e-12] and the
    analytic expression evaluated there, which realises the one-sided limits
    at s1 -> 0+ and s1 -> 1-.
    """
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    u = _clamp(s1)
    v = _clamp(s2)
    with np.errstate(over="ignore"):
        if model.family == "clayton":
            th = model.theta
            ssum = np.expm1(-th * np.log(u)) + np.expm1(-th * np.log(v))
            core = np.exp(-(th + 1.0) * np.log(u) - (1.0 / th + 1.0) * np.log1p(ssum))
        else:
            th = model.theta
            a = -np.log(u)
            b = -np.log(v)
            m = np.maximum(a, b)
            r = np.minimum(a, b) / m
            big_m = m * np.exp(np.log1p(r**th) / th)  # (a^th + b^th)^(1/th)
            # d1 C = C / s1 * (a / M)^(th - 1)
            core = np.exp(-big_m + np.log(u) * (-1.0) + (th - 1.0) * (np.log(a) - np.log(big_m)))
    out = np.where(s2 >= 1.0, 1.0, np.where(s2 <= 0.0, 0.0, core))
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def conditional_inverse(model: CopulaModel, v2, s1, *, tol: float = 1e-10, max_iter: int = 200):
    """Invert the conditional CDF: find s2 with d1 C(s1, s2) = v2.

    Clayton uses the closed form
    ``s2 = (1 - s1^-theta + (v2 * s1^(theta+1))^(-theta/(theta+1)))^(-1/theta)``
    evaluated in the algebraically identical overflow-safe form
    ``exp(-logaddexp(0, -theta*log(s1) + log(expm1(-theta/(theta+1)*log(v2)))) / theta)``.

    Gumbel has no closed form; the root of F(s2 | s1) - v2 = 0 is bracketed
    on (1e-12, 1 - 1e-12) and bisected (F is monotone in s2) until
    |F - v2| <= tol, with an iteration cap.
    """
    v2 = _clamp(v2)
    s1 = _clamp(s1)
    if model.family == "clayton":
        th = model.theta
        w = np.expm1(-(th / (th + 1.0)) * np.log(v2))  # v2^(-th/(th+1)) - 1 > 0
        z = -th * np.log(s1) + np.log(w)
        out = np.exp(-np.logaddexp(0.0, z) / th)
        return out if out.ndim else float(out)

    # Gumbel: vectorised bisection
    scalar = np.ndim(v2) == 0 and np.ndim(s1) == 0
    v2, s1 = np.broadcast_arrays(np.atleast_1d(v2), np.atleast_1d(s1))
    lo = np.full(v2.shape, CLAMP)
    hi = np.full(v2.shape, 1.0 - CLAMP)
    f_lo = partial1(model, s1, lo)
    f_hi = partial1(model, s1, hi)
    bad = (f_lo - v2 > tol) | (f_hi - v2 < -tol)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NumericalError(
            "conditional_inverse: root not bracketed on (eps, 1-eps); "
            f"first failure at index {i}: s1={s1.flat[i]!r}, v2={v2.flat[i]!r}, "
            f"F(eps)={np.atleast_1d(f_lo).flat[i]!r}, F(1-eps)={np.atleast_1d(f_hi).flat[i]!r}"
        )
    mid = 0.5 * (lo + hi)
    done = np.zeros(v2.shape, dtype=bool)
    for _ in range(max_iter):
        fm = partial1(model, s1, mid)
        resid = fm - v2
        done |= np.abs(resid) <= tol
        if done.all():
            break
        go_up = (resid < 0) & ~done
        go_dn = (resid > 0) & ~done
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_dn, mid, hi)
        mid = np.where(done, mid, 0.5 * (lo + hi))
    else:
        fm = partial1(model, s1, mid)
        worst = float(np.max(np.abs(fm - v2)))
        if worst > tol:
            raise NumericalError(
                f"conditional_inverse: bisection did not reach |F - v2| <= {tol} "
                f"within {max_iter} iterations (worst residual {worst:.3e})"
            )
    return float(mid[0]) if scalar else mid
