import logging
from typing import Callable, Tuple

from scipy.optimize import brentq

from app.exceptions import NoConvergence

logger = logging.getLogger(__name__)

Function = Callable[[float], float]

NEWTON_STEPS = 5


def bisect_newton(
    f: Function,
    df: Function,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    newton_steps: int = NEWTON_STEPS,
) -> Tuple[float, float]:
    """
    Root of f in [lo, hi] and the width of the bracket that was attained

    The bracket is narrowed to tol, then at most newton_steps Newton iterations polish the
    midpoint; a step leaving the bracket is discarded.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo, 0.0
    if f_hi == 0:
        return hi, 0.0
    if (f_lo > 0) == (f_hi > 0):
        raise NoConvergence(f"no sign change on [{lo}, {hi}]", lo=lo, hi=hi)
    try:
        root, result = brentq(f, lo, hi, xtol=tol, full_output=True, disp=False)
    except (RuntimeError, ValueError) as exc:
        raise NoConvergence(f"bracketing failed on [{lo}, {hi}]: {exc}", lo=lo, hi=hi) from exc
    if not result.converged:
        raise NoConvergence(f"bracketing did not converge on [{lo}, {hi}]", lo=lo, hi=hi)

    x = root
    for _ in range(newton_steps):
        slope = df(x)
        if slope == 0:
            break
        step = f(x) / slope
        candidate = x - step
        if not lo <= candidate <= hi or abs(candidate - root) > tol:
            break
        x = candidate
        if step == 0:
            break
    logger.debug("root %.15g on [%g, %g] after %d evaluations", x, lo, hi, result.function_calls)
    return x, tol


def scan_for_sign_change(f: Function, start: float, stop: float, step: float = 1e-3) -> Tuple[float, float]:
    """First [x, x + step] inside (start, stop] on which f changes sign"""
    previous_x, previous = start, f(start)
    x = start
    while x < stop:
        x = min(x + step, stop)
        value = f(x)
        if value == 0 or (value > 0) != (previous > 0):
            return previous_x, x
        previous_x, previous = x, value
    raise NoConvergence(f"no sign change on ({start}, {stop}] at step {step}", start=start, stop=stop)
