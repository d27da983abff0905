"""Principal-branch Lambert W and the V function on positive arguments.

``W(x)`` solves ``w * exp(w) = x``; ``V(x)`` solves ``v * exp(v / (1 - v)) = x``
with ``v`` in (0, 1).  Both residuals are strictly monotone, so each solve is
a bracketed Newton iteration that falls back to bisection whenever a Newton
step leaves the bracket.

V is computed through the odds ``u = v / (1 - v)``, which satisfies
``log u - log(1 + u) + u = log x``.  Working with ``u`` keeps ``1 - v`` exact
for large arguments, where ``v`` itself crowds against 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from segmenter.errors import ConvergenceError, DomainError
from segmenter.model import DEFAULT_CONFIG, SolverConfig

# below this log-argument W(x) and the odds of V(x) both equal x to double precision
_TINY_LOG = -700.0


@dataclass(frozen=True)
class ScalarSolveReport:
    value: float
    residual: float
    iterations: int


def solve_increasing(func, lo, hi, x, config: SolverConfig = DEFAULT_CONFIG, what="root"):
    """Root of an increasing function on ``[lo, hi]``.

    ``func(x)`` returns ``(f(x), f'(x))`` and must satisfy ``f(lo) <= 0 <= f(hi)``.
    Newton steps are taken while they stay strictly inside the bracket;
    otherwise the bracket is bisected.  Returns ``(x, f(x), iterations)``.
    """
    if not lo <= x <= hi:
        x = 0.5 * (lo + hi)
    for it in range(1, config.max_scalar_iters + 1):
        fx, dfx = func(x)
        if fx == 0.0:
            return x, fx, it
        if fx < 0:
            lo = x
        else:
            hi = x
        step = fx / dfx if dfx > 0 else math.nan
        scale = max(abs(x), 1e-300)
        if abs(step) <= config.step_tol * scale:
            x_new = min(max(x - step, lo), hi)
            fx_new, _ = func(x_new)
            return (x_new, fx_new, it) if abs(fx_new) <= abs(fx) else (x, fx, it)
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
            if hi - lo <= config.step_tol * scale:
                fx, _ = func(x_new)
                return x_new, fx, it
        x = x_new
    raise ConvergenceError(
        f"{what}: no convergence in {config.max_scalar_iters} iterations",
        ScalarSolveReport(x, fx, config.max_scalar_iters),
    )


def _expit(t):
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def _softplus(t):
    if t > 30:
        return t + math.log1p(math.exp(-t))
    return math.log1p(math.exp(t))


def _relative_residual(log_residual, log_x):
    # |lhs - x| / max(1, x) where lhs = x * exp(log_residual)
    rel = abs(math.expm1(log_residual))
    return rel * math.exp(min(log_x, 0.0))


def lambert_w_log(log_x: float, config: SolverConfig = DEFAULT_CONFIG) -> ScalarSolveReport:
    """W(exp(log_x)); avoids forming exp(log_x) for large or small arguments."""
    if log_x == -math.inf:
        return ScalarSolveReport(0.0, 0.0, 0)
    if math.isnan(log_x) or log_x == math.inf:
        raise DomainError(f"lambert_w: bad log-argument {log_x!r}")
    if log_x < _TINY_LOG:
        return ScalarSolveReport(math.exp(log_x), 0.0, 0)

    def func(w):
        return math.log(w) + w - log_x, 1.0 / w + 1.0

    # x/(1+x) <= W(x) <= log(1+x)
    lo, hi = _expit(log_x), _softplus(log_x)
    guess = log_x - math.log(log_x) if log_x > 1.0 else lo
    w, r, iters = solve_increasing(func, lo, hi, guess, config, "lambert_w")
    residual = _relative_residual(r, log_x)
    if residual > config.residual_tol:
        raise ConvergenceError("lambert_w: residual above tolerance", ScalarSolveReport(w, residual, iters))
    return ScalarSolveReport(w, residual, iters)


def lambert_w(x: float, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Principal branch W(x) for x >= 0."""
    if not x >= 0 or math.isinf(x):
        raise DomainError(f"lambert_w needs a finite x >= 0, got {x!r}")
    if x == 0:
        return 0.0
    return lambert_w_log(math.log(x), config).value


def v_odds_log(log_x: float, config: SolverConfig = DEFAULT_CONFIG) -> ScalarSolveReport:
    """Odds u = V(x) / (1 - V(x)) at x = exp(log_x)."""
    if math.isnan(log_x) or math.isinf(log_x):
        raise DomainError(f"v_func: bad log-argument {log_x!r}")
    if log_x < _TINY_LOG:
        return ScalarSolveReport(math.exp(log_x), 0.0, 0)

    def func(u):
        return math.log(u) - math.log1p(u) + u - log_x, 1.0 / (u * (1.0 + u)) + 1.0

    # W(x) <= u, x/(1+x) <= W(x); u <= x and u <= max(1, log 2x)
    lo = _expit(log_x)
    hi = math.exp(min(log_x, math.log(max(1.0, math.log(2.0) + log_x))))
    hi = max(hi, lo)
    guess = max(lo, min(hi, log_x)) if log_x > 1.0 else lo
    u, r, iters = solve_increasing(func, lo, hi, guess, config, "v_func")
    residual = _relative_residual(r, log_x)
    if residual > config.residual_tol:
        raise ConvergenceError("v_func: residual above tolerance", ScalarSolveReport(u, residual, iters))
    return ScalarSolveReport(u, residual, iters)


def _check_positive(x, name):
    if not x > 0 or math.isinf(x):
        raise DomainError(f"{name} needs a finite x > 0, got {x!r}")


def v_func_report(x: float, config: SolverConfig = DEFAULT_CONFIG) -> ScalarSolveReport:
    _check_positive(x, "v_func")
    rep = v_odds_log(math.log(x), config)
    return ScalarSolveReport(rep.value / (1.0 + rep.value), rep.residual, rep.iterations)


def v_func(x: float, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """V(x) in (0, 1) solving v * exp(v / (1 - v)) = x."""
    return v_func_report(x, config).value


def v_derivative_from_odds(x: float, u: float) -> float:
    """V'(x) = 1 / (x * (1/V + 1/(1-V)^2)) written in terms of the odds u."""
    v = u / (1.0 + u)
    return 1.0 / (x * (1.0 / v + (1.0 + u) ** 2))


def v_func_derivative(x: float, config: SolverConfig = DEFAULT_CONFIG) -> float:
    _check_positive(x, "v_func_derivative")
    u = v_odds_log(math.log(x), config).value
    return v_derivative_from_odds(x, u)
