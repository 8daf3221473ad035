"""Restoring-force nonlinearities and numeric checks of their structural hypotheses.

Each family evaluates f, its antiderivative F (with F(0) = 0) and its
derivative f' in closed form. The hypothesis checker combines exact per-kind
reasoning with a sampled safety net on a symmetric grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameterError

KINDS = ("linear", "cubic", "power", "piecewise", "exponential", "mckenna_cubic")


@dataclass(frozen=True)
class Nonlinearity:
    """A restoring force f with closed-form antiderivative and derivative.

    kind selects the family:
      linear        f(s) = s
      cubic         f(s) = s + epsilon*s^3
      power         f(s) = s + epsilon*|s|^(p-1)*s   (odd extension, p > 1)
      piecewise     f(s) = (s+1)^+ - 1
      exponential   f(s) = a*(exp(b*s) - 1)
      mckenna_cubic f(s) = sigma*s + c*s^2 + d*s^3
    """

    kind: str
    epsilon: float = 0.0
    p_exp: float = 3.0
    a_coef: float = 1.0
    b_coef: float = 1.0
    sigma_f: float = 1.0
    c_quad: float = 0.0
    d_cub: float = 1.0

    def f(self, s):
        s = np.asarray(s, dtype=float)
        k = self.kind
        if k == "linear":
            out = s.copy()
        elif k == "cubic":
            out = s + self.epsilon * s**3
        elif k == "power":
            out = s + self.epsilon * np.abs(s) ** (self.p_exp - 1.0) * s
        elif k == "piecewise":
            out = np.maximum(s + 1.0, 0.0) - 1.0
        elif k == "exponential":
            out = self.a_coef * np.expm1(self.b_coef * s)
        else:  # mckenna_cubic
            out = self.sigma_f * s + self.c_quad * s**2 + self.d_cub * s**3
        return float(out) if out.ndim == 0 else out

    def F(self, s):
        """Antiderivative of f with F(0) = 0."""
        s = np.asarray(s, dtype=float)
        k = self.kind
        if k == "linear":
            out = s**2 / 2.0
        elif k == "cubic":
            out = s**2 / 2.0 + self.epsilon * s**4 / 4.0
        elif k == "power":
            p = self.p_exp
            out = s**2 / 2.0 + self.epsilon * np.abs(s) ** (p + 1.0) / (p + 1.0)
        elif k == "piecewise":
            out = np.where(s >= -1.0, s**2 / 2.0, -s - 0.5)
        elif k == "exponential":
            a, b = self.a_coef, self.b_coef
            out = a * (np.expm1(b * s) / b - s)
        else:  # mckenna_cubic
            out = (self.sigma_f * s**2 / 2.0 + self.c_quad * s**3 / 3.0
                   + self.d_cub * s**4 / 4.0)
        return float(out) if out.ndim == 0 else out

    def fprime(self, s):
        s = np.asarray(s, dtype=float)
        k = self.kind
        if k == "linear":
            out = np.ones_like(s)
        elif k == "cubic":
            out = 1.0 + 3.0 * self.epsilon * s**2
        elif k == "power":
            out = 1.0 + self.epsilon * self.p_exp * np.abs(s) ** (self.p_exp - 1.0)
        elif k == "piecewise":
            out = np.where(s >= -1.0, 1.0, 0.0)
        elif k == "exponential":
            out = self.a_coef * self.b_coef * np.exp(self.b_coef * s)
        else:  # mckenna_cubic
            out = self.sigma_f + 2.0 * self.c_quad * s + 3.0 * self.d_cub * s**2
        return float(out) if out.ndim == 0 else out

    def to_config(self) -> dict:
        """Scenario-config form: {"kind": ..., "params": {...}}."""
        relevant = {
            "linear": (),
            "cubic": ("epsilon",),
            "power": ("epsilon", "p_exp"),
            "piecewise": (),
            "exponential": ("a_coef", "b_coef"),
            "mckenna_cubic": ("sigma_f", "c_quad", "d_cub"),
        }[self.kind]
        return {"kind": self.kind, "params": {k: getattr(self, k) for k in relevant}}


def make_nonlinearity(kind: str, params: Optional[dict] = None, **kw) -> Nonlinearity:
    """Build a validated Nonlinearity; raises InvalidParameterError on bad input."""
    given = dict(params or {})
    given.update(kw)
    if kind not in KINDS:
        raise InvalidParameterError(f"unknown nonlinearity kind {kind!r}")
    unknown = set(given) - {"epsilon", "p_exp", "a_coef", "b_coef",
                            "sigma_f", "c_quad", "d_cub"}
    if unknown:
        raise InvalidParameterError(f"unknown parameters {sorted(unknown)} for {kind}")
    nl = Nonlinearity(kind=kind, **given)
    if kind in ("cubic", "power") and nl.epsilon < 0.0:
        raise InvalidParameterError("epsilon must be >= 0")
    if kind == "power" and nl.p_exp <= 1.0:
        raise InvalidParameterError("p_exp must be > 1")
    if kind == "exponential" and (nl.a_coef <= 0.0 or nl.b_coef <= 0.0):
        raise InvalidParameterError("exponential needs a_coef > 0 and b_coef > 0")
    if kind == "mckenna_cubic" and nl.d_cub <= 0.0:
        raise InvalidParameterError("mckenna_cubic needs d_cub > 0")
    return nl


def nonlinearity_from_config(cfg: dict) -> Nonlinearity:
    return make_nonlinearity(cfg["kind"], cfg.get("params", {}))


@dataclass(frozen=True)
class HypothesisReport:
    """Which structural hypotheses a nonlinearity satisfies.

    holds_f      sign condition f(s)*s > 0 away from 0
    holds_ff3    one-sided at most linear growth
    holds_fmono  f'(s) >= 0 everywhere
    holds_f2     two-sided power growth with certificate constants
                 rho*|s|^(p+1) <= f(s)*s <= alpha*|s|^(q+1) + beta*|s|^(p+1)
    """

    holds_f: bool
    holds_ff3: bool
    holds_fmono: bool
    holds_f2: bool
    f2_rho: Optional[float] = None
    f2_p: Optional[float] = None
    f2_alpha: Optional[float] = None
    f2_q: Optional[float] = None
    f2_beta: Optional[float] = None


def default_sample_grid(n: int = 2000, s_min: float = 1e-8,
                        s_max: float = 100.0) -> np.ndarray:
    """Symmetric log-spaced grid on [-s_max, s_max] excluding 0.

    n/2 points per side; symmetry about 0 with 0 excluded forces an even count.
    """
    half = max(1, n // 2)
    pos = np.logspace(math.log10(s_min), math.log10(s_max), half)
    return np.concatenate([-pos[::-1], pos])


def _validate_grid(grid: np.ndarray) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise InvalidParameterError("sample grid is empty")
    if np.any(g == 0.0):
        raise InvalidParameterError("sample grid must exclude 0")
    gs = np.sort(g)
    if not np.allclose(gs, -gs[::-1], rtol=0.0, atol=1e-12 * np.max(np.abs(gs))):
        raise InvalidParameterError("sample grid must be symmetric about 0")
    return gs


def _f2_certificate(nl: Nonlinearity):
    """Closed-form (rho, p, alpha, q, beta) for the growth condition, or None.

    For sigma*s + c*s^2 + d*s^3 with d > 0 and c^2 <= 2*d*sigma the constants
    rho=d/2, p=3, alpha=2*sigma, q=1, beta=3*d work; the two polynomial
    inequalities reduce to quadratics with non-positive discriminants.
    """
    if nl.kind == "cubic":
        if nl.epsilon > 0.0:
            return (nl.epsilon / 2.0, 3.0, 2.0, 1.0, 3.0 * nl.epsilon)
        return None
    if nl.kind == "power":
        if nl.epsilon > 0.0:
            return (nl.epsilon, nl.p_exp, 1.0, 1.0, nl.epsilon)
        return None
    if nl.kind == "mckenna_cubic":
        sig, c, d = nl.sigma_f, nl.c_quad, nl.d_cub
        if c == 0.0 and sig >= 0.0:
            return (d, 3.0, sig, 1.0, d)
        if c * c <= 2.0 * d * sig:
            return (d / 2.0, 3.0, 2.0 * sig, 1.0, 3.0 * d)
        return None
    return None


def check_hypotheses(nl: Nonlinearity, sample_grid=None) -> HypothesisReport:
    """Report which of the sign/growth/monotonicity hypotheses hold for nl.

    Each flag combines the exact per-kind answer with a conjunction of the
    corresponding inequality over the sample grid; the grid acts as a safety
    net for parameterized families.
    """
    grid = _validate_grid(default_sample_grid() if sample_grid is None else sample_grid)
    fs = nl.f(grid)
    fps = nl.fprime(grid)

    # sign condition f(s)*s > 0 for s != 0
    if nl.kind == "mckenna_cubic":
        sig, c, d = nl.sigma_f, nl.c_quad, nl.d_cub
        holds_f = (sig > 0.0 and c * c < 4.0 * d * sig) or (sig == 0.0 and c == 0.0)
    else:
        holds_f = True  # remaining kinds satisfy it for all valid parameters
    holds_f = holds_f and bool(np.all(fs * grid > 0.0))

    # one-sided at most linear: limsup f(s)/s < +inf on at least one side
    holds_ff3 = {
        "linear": True,
        "cubic": nl.epsilon == 0.0,
        "power": nl.epsilon == 0.0,
        "piecewise": True,       # f(s)/s -> 0 as s -> -inf
        "exponential": True,     # f(s)/s -> 0 as s -> -inf
        "mckenna_cubic": False,  # f(s)/s -> +inf on both sides (d > 0)
    }[nl.kind]

    # monotonicity f' >= 0 everywhere
    if nl.kind == "mckenna_cubic":
        holds_fmono = nl.c_quad**2 <= 3.0 * nl.d_cub * nl.sigma_f  # discriminant of f'
    else:
        holds_fmono = True
    holds_fmono = holds_fmono and bool(np.all(fps >= 0.0))

    cert = _f2_certificate(nl)
    if cert is not None:
        rho, p, alpha, q, beta = cert
        lower = rho * np.abs(grid) ** (p + 1.0)
        upper = alpha * np.abs(grid) ** (q + 1.0) + beta * np.abs(grid) ** (p + 1.0)
        prod = fs * grid
        slack = 1e-12 * np.maximum(1.0, upper)
        if not (np.all(prod >= lower - slack) and np.all(prod <= upper + slack)):
            cert = None
    if cert is None:
        return HypothesisReport(holds_f, holds_ff3, holds_fmono, False)
    rho, p, alpha, q, beta = cert
    return HypothesisReport(holds_f, holds_ff3, holds_fmono, True,
                            f2_rho=rho, f2_p=p, f2_alpha=alpha, f2_q=q, f2_beta=beta)
