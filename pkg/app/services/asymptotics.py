"""
Singularity analysis of the term generating functions

Every singular expansion is stored as a - b*sqrt(1 - z/rho) with b > 0, so a family with
constant b has about (b / (2 sqrt(pi))) * n^(-3/2) * rho^(-n) terms of size n.
"""
import logging
import math
from functools import lru_cache
from math import gcd
from typing import List, Optional, Tuple

import numpy as np

from app.config import settings
from app.exceptions import DomainError, DoubleRoot, NegativeRadicand, NumericOverflow
from app.schemas import (
    FamilyConstants,
    LeafStatistics,
    NormalFormSingularity,
    SingularData,
    SizeSpec,
    SuperclassConstants,
)
from app.services.counting import ScaledCountTable
from app.services.roots import bisect_newton, scan_for_sign_change

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
LOG_FLOAT_MAX = math.log(np.finfo(float).max)
SCAN_STEP = 1e-3
DERIVATIVE_FLOOR = 1e-9


def _tol(tol: Optional[float]) -> float:
    return settings.root_tolerance if tol is None else tol


def _geometric_sum(z: float, b: int, count: int) -> float:
    """sum of z^(b j) for j < count, termwise so that z = 1 stays defined"""
    return math.fsum(z ** (b * j) for j in range(count))


# Unrestricted terms
def singularity_polynomial(spec: SizeSpec, z: float, u: float = 1.0) -> float:
    """p(z) = (1 - z^b)(1 - z^c)^2 - 4u z^(a+d); u marks variables"""
    a, b, c, d = spec.weights
    return (1 - z ** b) * (1 - z ** c) ** 2 - 4 * u * z ** (a + d)


def singularity_polynomial_derivative(spec: SizeSpec, z: float, u: float = 1.0) -> float:
    a, b, c, d = spec.weights
    return (
        -b * z ** (b - 1) * (1 - z ** c) ** 2
        - 2 * c * z ** (c - 1) * (1 - z ** b) * (1 - z ** c)
        - 4 * u * (a + d) * z ** (a + d - 1)
    )


def _rho(spec: SizeSpec, tol: float, u: float = 1.0) -> Tuple[float, float]:
    return bisect_newton(
        lambda z: singularity_polynomial(spec, z, u),
        lambda z: singularity_polynomial_derivative(spec, z, u),
        0.0,
        1.0,
        tol,
    )


@lru_cache(maxsize=32)
def dominant_singularity(spec: SizeSpec, tol: Optional[float] = None) -> SingularData:
    tol = _tol(tol)
    rho, width = _rho(spec, tol)
    a, b, c, d = spec.weights
    a_inf = (1 - rho ** c) / (2 * rho ** d)
    # -rho * p'(rho), every term positive
    slope = (
        4 * (a + d) * rho ** (a + d)
        + 2 * c * rho ** c * (1 - rho ** b) * (1 - rho ** c)
        + b * rho ** b * (1 - rho ** c) ** 2
    )
    b_inf = math.sqrt(slope / (1 - rho ** b)) / (2 * rho ** d)
    logger.info("spec %s: rho=%.12f a_inf=%.12f b_inf=%.12f", spec.label, rho, a_inf, b_inf)
    return SingularData(spec=spec, rho=rho, a_inf=a_inf, b_inf=b_inf, tolerance=width)


@lru_cache(maxsize=256)
def bounded_h_singularity(spec: SizeSpec, h: int, tol: Optional[float] = None) -> float:
    """Smallest positive root of (1 - z^c)^2 - 4 z^(a+d) sum_{j<h} z^(bj)"""
    if h < 1:
        raise DomainError(f"successor bound h must be at least 1, got {h}")
    a, b, c, d = spec.weights

    def f(z: float) -> float:
        return (1 - z ** c) ** 2 - 4 * z ** (a + d) * _geometric_sum(z, b, h)

    def df(z: float) -> float:
        leaves = sum((a + d + b * j) * z ** (a + d + b * j - 1) for j in range(h))
        return -2 * c * z ** (c - 1) * (1 - z ** c) - 4 * leaves

    root, _ = bisect_newton(f, df, 0.0, 1.0, _tol(tol))
    return root


# Superclass constants
@lru_cache(maxsize=64)
def superclass_constants(spec: SizeSpec, N: int, tol: Optional[float] = None) -> SuperclassConstants:
    """
    Values a_{N,m} = L_{m,N}(rho) and singular constants b_{N,m} for m = 0..N

    Level N is the unrestricted family; below it, with D_m the radicand at rho,
    a_{N,m} = (1 - sqrt(D_m)) / (2 rho^d) and b_{N,m} = rho^c b_{N,m+1} / sqrt(D_m).
    """
    if N < 0:
        raise DomainError(f"superclass level N must be nonnegative, got {N}")
    data = dominant_singularity(spec, tol)
    rho = data.rho
    a, b, c, d = spec.weights
    values: List[float] = [0.0] * (N + 1)
    slopes: List[float] = [0.0] * (N + 1)
    radicands: List[float] = [0.0] * N
    values[N], slopes[N] = data.a_inf, data.b_inf
    for m in range(N - 1, -1, -1):
        radicand = (
            1
            - 4 * rho ** (a + d) * (1 - rho ** (b * m)) / (1 - rho ** b)
            - 4 * rho ** (c + d) * values[m + 1]
        )
        if radicand <= 0:
            raise NegativeRadicand(f"radicand D_{m} = {radicand:.3e} at level N={N}", m=m, N=N)
        root = math.sqrt(radicand)
        radicands[m] = radicand
        values[m] = (1 - root) / (2 * rho ** d)
        slopes[m] = rho ** c * slopes[m + 1] / root
    return SuperclassConstants(N=N, rho=rho, a=values, b=slopes, radicands=radicands)


def leading_constant_estimate(spec: SizeSpec, m: int, N: Optional[int] = None) -> float:
    """C(m, N) = b_{N,m} / (2 sqrt(pi)), the constant of L_{m,n} ~ C n^(-3/2) rho^(-n)"""
    N = settings.constant_level if N is None else N
    if not 0 <= m <= N:
        raise DomainError(f"expected 0 <= m <= N, got m={m}, N={N}")
    return superclass_constants(spec, N).b[m] / (2 * SQRT_PI)


def closed_proportion(spec: SizeSpec, N: int, reference: int = 200) -> float:
    """Asymptotic share of m=0 terms among the size-n terms of the superclass at level N"""
    return superclass_constants(spec, max(N, reference)).b[0] / superclass_constants(spec, N).b[0]


@lru_cache(maxsize=16)
def scaled_table(spec: SizeSpec) -> ScaledCountTable:
    return ScaledCountTable(spec, dominant_singularity(spec).rho)


def empirical_constant(spec: SizeSpec, m: Optional[int], n: int) -> float:
    """u_{m,n} * n^(3/2) from the scaled table (m None: unrestricted)"""
    if n <= 0:
        raise DomainError(f"n must be positive, got {n}")
    table = scaled_table(spec)
    value = table.unrestricted(n) if m is None else table.value(m, n)
    return value * n ** 1.5


# Terms with a fixed number of abstractions
def _delta_squared(spec: SizeSpec, i: int, z: float) -> float:
    a, b, _, d = spec.weights
    return 1 - 4 * z ** (a + d) * _geometric_sum(z, b, i)


@lru_cache(maxsize=256)
def xi_singularity(spec: SizeSpec, M: int, tol: Optional[float] = None) -> float:
    """Smallest positive root of 1 - 4 z^(a+d) sum_{j<M} z^(bj)"""
    if M < 1:
        raise DomainError(f"M must be at least 1, got {M}")
    a, b, _, d = spec.weights

    def df(z: float) -> float:
        return -4 * sum((a + d + b * j) * z ** (a + d + b * j - 1) for j in range(M))

    root, _ = bisect_newton(lambda z: _delta_squared(spec, M, z), df, 0.0, 1.0, _tol(tol))
    return root


def q_abstraction_period(spec: SizeSpec, m: int, q: int) -> int:
    """Sizes of L_{m,q} live in one residue class modulo this period"""
    if m + q == 1:
        return spec.a + spec.d
    return gcd(spec.b, spec.a + spec.d)


def q_abstraction_constant(spec: SizeSpec, m: int, q: int) -> float:
    """
    C with L_{m,q,n} ~ C xi^(-n) / (2 sqrt(pi n^3)) where xi = xi_{m+q}

    Applies to the sizes of the family's residue class; see q_abstraction_constants for
    the periodic estimate.
    """
    if m < 0 or q < 0 or m + q < 1:
        raise DomainError(f"expected m, q >= 0 with m + q >= 1, got m={m}, q={q}")
    a, b, c, d = spec.weights
    M = m + q
    xi = xi_singularity(spec, M)
    slope = xi ** (a + d) * sum((a + d + b * j) * xi ** (b * j) for j in range(M))
    product = 1.0
    for i in range(q):
        radicand = _delta_squared(spec, m + i, xi)
        if radicand <= 0:
            raise NegativeRadicand(f"delta_{m + i} vanishes at xi_{M}", m=m, q=q)
        product *= math.sqrt(radicand)
    return xi ** (c * q - d) * math.sqrt(slope) / product


def q_abstraction_constants(spec: SizeSpec, m: int, q: int) -> FamilyConstants:
    period = q_abstraction_period(spec, m, q)
    return FamilyConstants(
        constant=period * q_abstraction_constant(spec, m, q) / (2 * SQRT_PI),
        sigma=xi_singularity(spec, m + q),
        period=period,
        offset=(spec.a + q * spec.c) % period,
    )


def q_abstraction_estimate(spec: SizeSpec, m: int, q: int, n: int) -> float:
    return asymptotic_count(q_abstraction_constants(spec, m, q), n)


def m_open_constants(spec: SizeSpec, m: int, N: Optional[int] = None) -> FamilyConstants:
    return FamilyConstants(
        constant=leading_constant_estimate(spec, m, N),
        sigma=dominant_singularity(spec).rho,
    )


# Normal forms
def _normal_form_parts(spec: SizeSpec, z: float) -> Tuple[float, float, float]:
    """X(z), X'(z) and Y(z) = X(z) - 4(1 - z^c)"""
    a, b, c, d = spec.weights
    x = 4 * z ** (a + d) / (1 - z ** b)
    dx = 4 * ((a + d) * z ** (a + d - 1) * (1 - z ** b) + b * z ** (a + d + b - 1)) / (1 - z ** b) ** 2
    return x, dx, x - 4 * (1 - z ** c)


def normal_form_discriminant(spec: SizeSpec, z: float) -> float:
    """f(z) = X(z)^2 + (X(z) - 4(1 - z^c))^3 / 27"""
    x, _, y = _normal_form_parts(spec, z)
    return x * x + y ** 3 / 27


def normal_form_discriminant_derivative(spec: SizeSpec, z: float) -> float:
    x, dx, y = _normal_form_parts(spec, z)
    c = spec.c
    return 2 * x * dx + y * y * (dx + 4 * c * z ** (c - 1)) / 9


@lru_cache(maxsize=32)
def normal_form_singularity(spec: SizeSpec, tol: Optional[float] = None) -> NormalFormSingularity:
    rho = dominant_singularity(spec, tol).rho

    def f(z: float) -> float:
        return normal_form_discriminant(spec, z)

    def df(z: float) -> float:
        return normal_form_discriminant_derivative(spec, z)

    lo, hi = scan_for_sign_change(f, rho, 1 - 1e-9, SCAN_STEP)
    rho_tilde, _ = bisect_newton(f, df, lo, hi, _tol(tol))
    derivative = df(rho_tilde)
    if abs(derivative) < DERIVATIVE_FLOOR:
        raise DoubleRoot(f"f'({rho_tilde:.9f}) = {derivative:.3e}", rho_tilde=rho_tilde)
    logger.info("spec %s: rho_tilde=%.12f ratio=%.12f", spec.label, rho_tilde, rho / rho_tilde)
    return NormalFormSingularity(rho_tilde=rho_tilde, ratio=rho / rho_tilde, derivative=derivative)


# Estimates
def asymptotic_log_count(constants: FamilyConstants, n: int) -> float:
    """log(C * n^(-3/2) * sigma^(-n)), ignoring the residue class"""
    if n <= 0:
        raise DomainError(f"asymptotic estimates need n >= 1, got {n}")
    return math.log(constants.constant) - 1.5 * math.log(n) - n * math.log(constants.sigma)


def asymptotic_count(constants: FamilyConstants, n: int) -> float:
    log_value = asymptotic_log_count(constants, n)
    if (n - constants.offset) % constants.period:
        return 0.0
    if log_value > LOG_FLOAT_MAX:
        raise NumericOverflow(f"estimate for n={n} exceeds the float range", n=n, log_value=log_value)
    return math.exp(log_value)


# Variables per size
@lru_cache(maxsize=32)
def leaf_statistics(spec: SizeSpec, step: float = 1e-3) -> LeafStatistics:
    """
    Mean and variance constants of the number of variables in a random term of size n

    With rho(u) the singularity when each variable carries weight u, the count is
    asymptotically normal with mean mu*n and variance sigma2*n where
    mu = -rho'(1)/rho(1) and sigma2 = -d^2/dt^2 log rho(e^t) at t = 0.
    """
    ts = np.array([-step, 0.0, step])
    logs = np.array([math.log(_rho(spec, 1e-15, math.exp(t))[0]) for t in ts])
    mean = -(logs[2] - logs[0]) / (2 * step)
    variance = -(logs[2] - 2 * logs[1] + logs[0]) / step ** 2
    data = dominant_singularity(spec)
    return LeafStatistics(
        mean_per_size=float(mean),
        variance_per_size=float(variance),
        leaf_probability_per_node=data.rho ** spec.d * data.a_inf,
    )
