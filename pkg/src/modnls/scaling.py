"""Scaling exponents for the concentrated-data family, and the data builder.

For a target regularity s below the scaling index s0, the family
u0_h(x) = h^(s - d/2) * kappa_h * a0(x/h) with a0(x) = exp(-|x|^2) and
kappa_h = log(1/h)^(-theta) concentrates at scale h while its H^s norm
tends to zero.  The exponents collected in :class:`ScalingPlan` tie the
family to the rescaled evolution on a fixed box: the small parameter
eps(h), the window exponent delta, the dispersive smallness exponent
beta, and the blow-up time t_h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Field, Grid
from .symbols import BOUNDED, HOMOGENEOUS

__all__ = [
    "ScalingError",
    "ScalingPlan",
    "compute_scaling",
    "build_concentrated_data",
    "H_MAX",
]

# kappa_h needs log(1/h) > 0; the family is asymptotic in h -> 0 anyway
H_MAX = math.exp(-1.0)


class ScalingError(ValueError):
    """A hypothesis on (d, sigma, s, m, omega, h) is violated."""


@dataclass(frozen=True)
class ScalingPlan:
    """Derived exponents for one (d, sigma, s, symbol-class, omega, theta, delta).

    Use :func:`compute_scaling` to construct one; it validates the
    hypotheses and fills the derived fields.
    """

    d: int
    sigma: float
    s: float
    symbol_class: str  # "homogeneous" or "bounded"
    m: float | None
    omega: float | None
    theta: float
    delta: float
    s0: float
    alpha: float
    eps_exponent: float
    beta: float

    def validate_h(self, h: float) -> None:
        if not (0.0 < h <= H_MAX):
            raise ScalingError(
                f"h must lie in (0, e^-1]; got {h} (kappa needs log(1/h) >= 1)"
            )

    def kappa(self, h: float) -> float:
        """Amplitude damping kappa_h = log(1/h)^(-theta)."""
        self.validate_h(h)
        return math.log(1.0 / h) ** (-self.theta)

    def eps(self, h: float) -> float:
        """Small parameter eps = h^(2*sigma*(d/2-s) - 2 - alpha)."""
        self.validate_h(h)
        return h**self.eps_exponent

    def h_for_eps(self, eps: float) -> float:
        if not 0.0 < eps < 1.0:
            raise ScalingError(f"eps must lie in (0, 1), got {eps}")
        return eps ** (1.0 / self.eps_exponent)

    def tau_star_of_eps(self, eps: float) -> float:
        """Rescaled window end tau* = eps * log(1/eps)^delta."""
        if not 0.0 < eps < 1.0:
            raise ScalingError(f"eps must lie in (0, 1), got {eps}")
        return eps * math.log(1.0 / eps) ** self.delta

    def tau_star(self, h: float) -> float:
        return self.tau_star_of_eps(self.eps(h))

    def t_h(self, h: float) -> float:
        """Blow-up time t_h = h^(2+alpha) * eps * log(1/eps)^delta."""
        return h ** (2.0 + self.alpha) * self.tau_star(h)

    def t_h_closed_form(self, h: float) -> float:
        """Equivalent closed form C * h^(2*sigma*(d/2-s)) * log(1/h)^delta."""
        self.validate_h(h)
        C = self.eps_exponent**self.delta
        return C * h ** (2.0 * self.sigma * (self.d / 2.0 - self.s)) * math.log(1.0 / h) ** self.delta

    def window_amplitude(self, h: float) -> float:
        """Prefactor h^(2*sigma*(d/2-s)) of the rescaled multiplier P(xi/h)."""
        self.validate_h(h)
        return h ** (2.0 * self.sigma * (self.d / 2.0 - self.s))

    def identity_log_gap(self, h: float) -> float:
        """Homogeneous-case identity |log h^(2sig(d/2-s)-m) - (m+omega) log eps|."""
        if self.symbol_class != HOMOGENEOUS:
            raise ScalingError("the log identity applies to homogeneous symbols only")
        self.validate_h(h)
        lhs = (2.0 * self.sigma * (self.d / 2.0 - self.s) - self.m) * math.log(h)
        rhs = (self.m + self.omega) * math.log(self.eps(h))
        return abs(lhs - rhs)

    def beta_from_definition(self) -> float:
        """General formula for beta, independent of the per-class closed form."""
        a = 2.0 * self.sigma * (self.s0 - self.d / 2.0) + 2.0 + self.alpha
        b = 2.0 * self.sigma * (self.d / 2.0 - self.s) - 2.0 - self.alpha
        return a / b


def compute_scaling(
    d: int,
    sigma: float,
    s: float,
    symbol_class: str,
    m: float | None = None,
    omega: float | None = None,
    theta: float = 0.05,
    delta: float = 0.1,
) -> ScalingPlan:
    """Fill every derived exponent, rejecting hypothesis-violating inputs."""
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ScalingError(f"dimension d must be a positive integer, got {d}")
    if not sigma > 0:
        raise ScalingError(f"nonlinearity power sigma must be positive, got {sigma}")
    if not theta > 0:
        raise ScalingError(f"theta must be positive, got {theta}")
    if not delta > 0:
        raise ScalingError(f"delta must be positive, got {delta}")

    two_sig_gap = 2.0 * sigma * (d / 2.0 - s)

    if symbol_class == HOMOGENEOUS:
        if m is None or not m >= 1:
            raise ScalingError(f"homogeneous symbols need a degree m >= 1, got {m}")
        if omega is None or not omega > 0:
            raise ScalingError(f"homogeneous symbols need omega > 0, got {omega}")
        s0 = d / 2.0 - m / (2.0 * sigma)
        if not s0 > 0:
            raise ScalingError(
                f"scaling index s0 = d/2 - m/(2*sigma) = {s0} must be positive"
            )
        if not 0.0 < s < s0:
            raise ScalingError(f"s must satisfy 0 < s < s0 = {s0}, got s = {s}")
        two_plus_alpha = ((m - 1.0 + omega) * two_sig_gap + m) / (m + omega)
        beta = m - 1.0 + omega
    elif symbol_class == BOUNDED:
        if m is not None or omega is not None:
            raise ScalingError("m and omega apply to homogeneous symbols only")
        s0 = d / 2.0
        if not 0.0 < s < s0:
            raise ScalingError(f"s must satisfy 0 < s < d/2 = {s0}, got s = {s}")
        two_plus_alpha = sigma * (d / 2.0 - s)
        beta = 1.0
    else:
        raise ScalingError(
            f"symbol_class must be {HOMOGENEOUS!r} or {BOUNDED!r}, got {symbol_class!r}"
        )

    eps_exponent = two_sig_gap - two_plus_alpha
    if not eps_exponent > 0:
        raise ScalingError(
            f"exponent of h in eps is {eps_exponent}; it must be positive "
            "(eps must vanish as h -> 0)"
        )
    return ScalingPlan(
        d=int(d),
        sigma=float(sigma),
        s=float(s),
        symbol_class=symbol_class,
        m=None if m is None else float(m),
        omega=None if omega is None else float(omega),
        theta=float(theta),
        delta=float(delta),
        s0=s0,
        alpha=two_plus_alpha - 2.0,
        eps_exponent=eps_exponent,
        beta=beta,
    )


# Gaussian tail below 1e-12 at the box edge: exp(-(L/h)^2) < 1e-12
_MIN_L_OVER_H = math.sqrt(math.log(1e12))
_NODES_ACROSS_H = 8


def build_concentrated_data(plan: ScalingPlan, h: float, grid: Grid) -> Field:
    """Sample u0_h(x) = h^(s-d/2) * kappa_h * exp(-|x/h|^2) on the grid.

    Rejects grids too coarse to resolve scale h (fewer than 8 nodes across
    width h) or too small to contain the support (Gaussian tail above 1e-12
    at the box edge).
    """
    plan.validate_h(h)
    if grid.d != plan.d:
        raise ScalingError(f"grid dimension {grid.d} does not match plan dimension {plan.d}")
    if grid.dx > h / _NODES_ACROSS_H:
        need = _NODES_ACROSS_H * 2.0 * grid.L / h
        need_n = 2 ** math.ceil(math.log2(need))
        raise ScalingError(
            f"grid spacing {grid.dx:.3e} cannot resolve scale h = {h:.3e}; "
            f"need n >= {need_n} at L = {grid.L}"
        )
    if grid.L < _MIN_L_OVER_H * h:
        raise ScalingError(
            f"box half-length {grid.L} too small for the Gaussian tail at scale "
            f"h = {h:.3e}; need L >= {_MIN_L_OVER_H * h:.3e}"
        )
    r2 = sum(c * c for c in grid.x)
    amplitude = h ** (plan.s - plan.d / 2.0) * plan.kappa(h)
    return Field(grid, amplitude * np.exp(-r2 / h**2))
