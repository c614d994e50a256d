"""
Singular Boltzmann sampler for m-open terms

Terms are drawn from the superclass whose variables below level N must be bound and whose
variables from level N on follow a geometric law. An attempt is abandoned as soon as its
size passes the window, or a variable turns out unbound by the enclosing abstractions, so
accepted terms are uniform within each size.
"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.config import settings
from app.exceptions import AttemptsExhausted, DomainError, NormalizationFailure
from app.models import ABS, APP, VAR, Token, build_from_preorder
from app.schemas import BatchStats, SampleReport, SamplerTables, SizeSpec
from app.services.asymptotics import superclass_constants
from app.services.blc import decode_blc, encode_blc
from app.services.terms import term_metrics

logger = logging.getLogger(__name__)

OVERSIZE = "oversize"
UNDERSIZE = "undersize"
UNBOUND = "unbound-index"
REJECTION_REASONS = (OVERSIZE, UNDERSIZE, UNBOUND)

NORMALIZATION_TOLERANCE = 1e-6
UNIFORM_CHUNK = 1 << 14

Window = Tuple[int, int]


def build_tables(spec: SizeSpec, N: Optional[int] = None, tol: Optional[float] = None) -> SamplerTables:
    """Per-level branch probabilities from the superclass values A_m = L_{m,N}(rho)"""
    N = settings.sampler_level if N is None else N
    if N < 1:
        raise DomainError(f"sampler level N must be at least 1, got {N}")
    constants = superclass_constants(spec, N, tol)
    rho, A = constants.rho, constants.a
    a, b, c, d = spec.weights

    leaf_mass: List[float] = []
    p_abs: List[float] = []
    p_app: List[float] = []
    for level in range(N + 1):
        if level < N:
            leaf = rho ** a * (1 - rho ** (b * level)) / ((1 - rho ** b) * A[level])
            unary = rho ** c * A[level + 1] / A[level]
        else:
            leaf = rho ** a / ((1 - rho ** b) * A[level])
            unary = rho ** c
        binary = rho ** d * A[level]
        total = leaf + unary + binary
        if abs(total - 1) > NORMALIZATION_TOLERANCE:
            raise NormalizationFailure(
                f"branch probabilities at level {level} sum to {total:.12f}", level=level, total=total
            )
        leaf_mass.append(leaf / total)
        p_abs.append(unary / total)
        p_app.append(binary / total)
    return SamplerTables(spec=spec, N=N, rho=rho, A=list(A), leaf_mass=leaf_mass, p_abs=p_abs, p_app=p_app)


def branch_probabilities(tables: SamplerTables) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "level": range(tables.N + 1),
            "leaf": tables.leaf_mass,
            "abstraction": tables.p_abs,
            "application": tables.p_app,
            "A": tables.A,
        }
    )


def size_window(n: int, epsilon: float) -> Window:
    """[ceil((1 - eps) n), floor((1 + eps) n)]"""
    if n < 0 or epsilon < 0:
        raise DomainError(f"expected n >= 0 and epsilon >= 0, got n={n}, epsilon={epsilon}")
    return math.ceil((1 - epsilon) * n), math.floor((1 + epsilon) * n)


def fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


class UniformStream:
    """Buffered uniform draws in [0, 1) from a numpy generator"""

    def __init__(self, seed: int, chunk: int = UNIFORM_CHUNK):
        self.rng = np.random.default_rng(seed)
        self.chunk = chunk
        self.buffer: List[float] = []
        self.position = 0

    def next(self) -> float:
        if self.position == len(self.buffer):
            self.buffer = self.rng.random(self.chunk).tolist()
            self.position = 0
        value = self.buffer[self.position]
        self.position += 1
        return value


class _Attempt:
    """One top-down generation run; status is None when the term is accepted"""

    __slots__ = ("status", "size", "tokens")

    def __init__(self, status: Optional[str], size: int, tokens: List[Token]):
        self.status = status
        self.size = size
        self.tokens = tokens


class _Branching:
    """Constants of the per-node draw, computed once per request"""

    def __init__(self, tables: SamplerTables):
        b = tables.spec.b
        self.tables = tables
        self.log_rho_b = b * math.log(tables.rho)
        self.truncation = [1 - tables.rho ** (b * level) for level in range(tables.N)]
        self.abs_threshold = [leaf + unary for leaf, unary in zip(tables.leaf_mass, tables.p_abs)]


def _attempt(branching: _Branching, target_m: int, n_max: int, uniforms: UniformStream) -> _Attempt:
    tables = branching.tables
    a, b, c, d = tables.spec.weights
    N = tables.N
    leaf_mass, abs_threshold = tables.leaf_mass, branching.abs_threshold
    log_rho_b, truncation = branching.log_rho_b, branching.truncation
    draw = uniforms.next

    tokens: List[Token] = []
    size = 0
    stack = [0]  # abstraction depth of each pending node
    while stack:
        depth = stack.pop()
        level = min(target_m + depth, N)
        u = draw()
        if u < leaf_mass[level]:
            if level < N:
                j = int(math.log(1 - draw() * truncation[level]) / log_rho_b)
                j = min(j, level - 1)
            else:
                j = int(math.log(1 - draw()) / log_rho_b)
                if j >= target_m + depth:
                    return _Attempt(UNBOUND, size, tokens)
            tokens.append((VAR, j))
            size += a + b * j
        elif u < abs_threshold[level]:
            tokens.append((ABS, None))
            size += c
            stack.append(depth + 1)
        else:
            tokens.append((APP, None))
            size += d
            stack.append(depth)
            stack.append(depth)
        if size > n_max:
            return _Attempt(OVERSIZE, size, tokens)
    return _Attempt(None, size, tokens)


def sample_term(
    tables: SamplerTables,
    target_m: int,
    window: Window,
    seed: Optional[int] = None,
    max_attempts: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> SampleReport:
    """First accepted term with openness <= target_m and size inside the window"""
    n_min, n_max = window
    if target_m < 0 or n_min < 0 or n_min > n_max:
        raise DomainError(f"invalid request: target_m={target_m}, window=[{n_min}, {n_max}]")
    max_attempts = settings.max_attempts if max_attempts is None else max_attempts
    time_budget = settings.time_budget if time_budget is None else time_budget
    if max_attempts < 1:
        raise DomainError(f"max_attempts must be at least 1, got {max_attempts}")
    seed = fresh_seed() if seed is None else seed
    uniforms = UniformStream(seed)
    branching = _Branching(tables)
    rejections: Dict[str, int] = {reason: 0 for reason in REJECTION_REASONS}
    deadline = time.monotonic() + time_budget

    for attempt in range(1, max_attempts + 1):
        result = _attempt(branching, target_m, n_max, uniforms)
        if result.status is None and result.size < n_min:
            result.status = UNDERSIZE
        if result.status is None:
            term = build_from_preorder(result.tokens)
            logger.debug("accepted size %d after %d attempts (seed %d)", result.size, attempt, seed)
            return SampleReport(term=term, size=result.size, attempts=attempt, rejections=rejections, rng_seed=seed)
        rejections[result.status] += 1
        if time.monotonic() > deadline:
            raise AttemptsExhausted(
                f"time budget of {time_budget}s exhausted after {attempt} attempts", attempt, rejections
            )
    raise AttemptsExhausted(
        f"no term in [{n_min}, {n_max}] after {max_attempts} attempts", max_attempts, rejections
    )


def batch_seeds(seed: int, count: int) -> List[int]:
    """Sub-seed i of a batch is the first 64-bit word of the i-th spawned SeedSequence"""
    return [int(child.generate_state(1, np.uint64)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


def _sample_encoded(args: Tuple[SamplerTables, int, Window, int, Optional[int], Optional[float]]) -> Dict:
    # deep terms do not pickle, so workers ship the BLC string back
    tables, target_m, window, seed, max_attempts, time_budget = args
    report = sample_term(tables, target_m, window, seed, max_attempts, time_budget)
    return {
        "bits": encode_blc(report.term),
        "size": report.size,
        "attempts": report.attempts,
        "rejections": report.rejections,
        "rng_seed": report.rng_seed,
    }


def sample_batch(
    tables: SamplerTables,
    target_m: int,
    window: Window,
    count: int,
    seed: Optional[int] = None,
    workers: int = 1,
    max_attempts: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> List[SampleReport]:
    """count reports; report i uses sub-seed i, so the output does not depend on workers"""
    if count < 1:
        raise DomainError(f"count must be at least 1, got {count}")
    seed = fresh_seed() if seed is None else seed
    seeds = batch_seeds(seed, count)
    if workers <= 1:
        return [sample_term(tables, target_m, window, s, max_attempts, time_budget) for s in seeds]

    jobs = [(tables, target_m, window, s, max_attempts, time_budget) for s in seeds]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        encoded = list(executor.map(_sample_encoded, jobs))
    return [
        SampleReport(
            term=decode_blc(item["bits"]),
            size=item["size"],
            attempts=item["attempts"],
            rejections=item["rejections"],
            rng_seed=item["rng_seed"],
        )
        for item in encoded
    ]


def sample_batch_stats(
    tables: SamplerTables,
    target_m: int,
    window: Window,
    count: int,
    seed: Optional[int] = None,
    workers: int = 1,
    max_attempts: Optional[int] = None,
) -> BatchStats:
    started = time.perf_counter()
    reports = sample_batch(tables, target_m, window, count, seed, workers, max_attempts)
    rows = []
    for report in reports:
        metrics = term_metrics(report.term)
        rows.append(
            {
                "size": report.size,
                "variables": metrics.variables,
                "abstractions": metrics.abstractions,
                "nodes": metrics.variables + metrics.abstractions + metrics.applications,
                "attempts": report.attempts,
                **{reason: report.rejections.get(reason, 0) for reason in REJECTION_REASONS},
            }
        )
    frame = pd.DataFrame(rows)
    ratio = frame["variables"].sum() / frame["size"].sum()
    residual = frame["variables"] - ratio * frame["size"]
    attempts = int(frame["attempts"].sum())
    unbound = int(frame[UNBOUND].sum())
    elapsed = time.perf_counter() - started
    logger.info("%d samples in [%d, %d] took %.2fs, %d attempts", count, window[0], window[1], elapsed, attempts)
    return BatchStats(
        count=count,
        target_m=target_m,
        n_min=window[0],
        n_max=window[1],
        mean_size=float(frame["size"].mean()),
        mean_variables=float(frame["variables"].mean()),
        var_variables=float(frame["variables"].var()) if count > 1 else 0.0,
        residual_var_variables=float(residual.var()) if count > 1 else 0.0,
        variables_per_size=float(ratio),
        variables_per_node=float(frame["variables"].sum() / frame["nodes"].sum()),
        mean_abstractions=float(frame["abstractions"].mean()),
        var_abstractions=float(frame["abstractions"].var()) if count > 1 else 0.0,
        attempts=attempts,
        rejection_rates={reason: float(frame[reason].sum()) / attempts for reason in REJECTION_REASONS},
        closed_proportion=count / (count + unbound),
        elapsed_seconds=elapsed,
    )
