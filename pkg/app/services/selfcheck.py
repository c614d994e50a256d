import logging
import time
from collections import Counter
from typing import Callable, Dict, List, Optional

from scipy.stats import chisquare

from app.exceptions import LambdaToolError
from app.schemas import CheckResult, SizeSpec
from app.services import counting
from app.services.asymptotics import (
    dominant_singularity,
    normal_form_discriminant,
    normal_form_singularity,
    singularity_polynomial,
    xi_singularity,
)
from app.services.blc import encode_blc
from app.services.enumeration import clear_cache, enumerate_superclass, enumerate_terms
from app.services.sampler import batch_seeds, build_tables, sample_term

logger = logging.getLogger(__name__)

UNIFORMITY_SIZE = 7
UNIFORMITY_SAMPLES = 3000
SIGNIFICANCE = 1e-3


class SelfCheck:
    """
    Cross-validation of counting, enumeration, root finding and sampling

    With inject_fault the oracle comparison is fed one wrong count, which must make the
    run fail.
    """

    def __init__(self, specs: Dict[str, SizeSpec], max_n: int = 12, seed: int = 2017, inject_fault: bool = False):
        self.specs = specs
        self.max_n = max_n
        self.seed = seed
        self.inject_fault = inject_fault

    def run(self) -> List[CheckResult]:
        results: List[CheckResult] = []
        for name, spec in self.specs.items():
            results.append(self._timed(f"oracle[{name}]", lambda: self.check_oracle(spec)))
            results.append(self._timed(f"roots[{name}]", lambda: self.check_roots(spec)))
            results.append(self._timed(f"fixpoint[{name}]", lambda: self.check_fixpoint(spec)))
            results.append(self._timed(f"partition[{name}]", lambda: self.check_partition(spec)))
            results.append(self._timed(f"superclass[{name}]", lambda: self.check_superclass(spec)))
        natural = next((spec for spec in self.specs.values() if spec.weights == (1, 1, 1, 1)), None)
        if natural is not None:
            results.append(self._timed("uniformity[natural]", lambda: self.check_uniformity(natural)))
        clear_cache()
        for result in results:
            logger.info("%s %s %s", "PASS" if result.passed else "FAIL", result.name, result.detail)
        return results

    @staticmethod
    def _timed(name: str, check: Callable[[], Optional[str]]) -> CheckResult:
        started = time.perf_counter()
        try:
            problem = check()
        except LambdaToolError as exc:
            problem = f"{exc.error_type}: {exc.message}"
        return CheckResult(
            name=name,
            passed=problem is None,
            detail=problem or "ok",
            elapsed_seconds=time.perf_counter() - started,
        )

    # Checks return None on success, else a description of the first mismatch
    def check_oracle(self, spec: SizeSpec) -> Optional[str]:
        for n in range(self.max_n + 1):
            cases = []
            for m in range(4):
                cases.append((f"m-open m={m}", counting.count_m_open(spec, m, n), enumerate_terms(spec, m, n)))
            for m in range(2):
                cases.append((f"normal-form m={m}", counting.count_normal_form(spec, m, n),
                              enumerate_terms(spec, m, n, "normal-form")))
                cases.append((f"beta-normal m={m}", counting.count_beta_normal_form(spec, m, n),
                              enumerate_terms(spec, m, n, "beta-normal")))
            for q in range(4):
                cases.append((f"q-abstractions q={q}", counting.count_q_abstractions(spec, 0, q, n),
                              enumerate_terms(spec, 0, n, "q-abstractions", q=q)))
            for h in range(1, 4):
                cases.append((f"bounded-h h={h}", counting.count_bounded_successors(spec, 1, h, n),
                              enumerate_terms(spec, 1, n, "bounded-h", h=h)))
            for N in range(1, 7):
                cases.append((f"superclass N={N}", counting.count_superclass(spec, N, 0, n),
                              enumerate_superclass(spec, N, 0, n)))
            for label, expected, terms in cases:
                if self.inject_fault and n == self.max_n and label == "m-open m=0":
                    expected += 1
                found = sum(1 for _ in terms)
                if found != expected:
                    return f"{label} n={n}: count {expected}, enumerated {found}"
        return None

    def check_roots(self, spec: SizeSpec) -> Optional[str]:
        data = dominant_singularity(spec)
        width = max(data.tolerance, 1e-12)
        rho = data.rho
        if singularity_polynomial(spec, rho - width) <= 0 or singularity_polynomial(spec, rho + width) >= 0:
            return f"p does not change sign across rho={rho!r}"
        if abs(2 * rho ** spec.d * data.a_inf + rho ** spec.c - 1) > 1e-12:
            return "2 rho^d a_inf + rho^c != 1"
        rho_tilde = normal_form_singularity(spec).rho_tilde
        if not rho < rho_tilde or normal_form_discriminant(spec, rho_tilde - width) > 0:
            return f"rho_tilde={rho_tilde!r} is not the first root above rho"
        if not xi_singularity(spec, 2) < xi_singularity(spec, 1):
            return "xi is not decreasing in M"
        return None

    def check_fixpoint(self, spec: SizeSpec) -> Optional[str]:
        tables = build_tables(spec)
        for level in range(tables.N + 1):
            total = tables.leaf_mass[level] + tables.p_abs[level] + tables.p_app[level]
            if abs(total - 1) > 1e-9:
                return f"level {level} sums to {total!r}"
        if tables.leaf_mass[0] != 0:
            return "level 0 allows variables"
        return None

    def check_partition(self, spec: SizeSpec) -> Optional[str]:
        for n in range(self.max_n + 1):
            for m in range(3):
                total = counting.count_at_most_q(spec, m, n, n)
                if total != counting.count_m_open(spec, m, n):
                    return f"sum over q of L_(m={m},q,n={n}) is {total}"
                if counting.count_not_m_open(spec, m, n) < 0:
                    return f"K_(m={m},n={n}) is negative"
        return None

    def check_superclass(self, spec: SizeSpec) -> Optional[str]:
        N = self.max_n
        for n in range(spec.a + spec.b * N + N * spec.c):
            if n > self.max_n:
                break
            upper = counting.count_superclass(spec, N, 0, n)
            if upper != counting.count_m_open(spec, 0, n):
                return f"L_(0,{N}) differs from L_0 at n={n}"
            if counting.count_superclass(spec, N + 1, 0, n) > upper:
                return f"superclass grows with N at n={n}"
        return None

    def check_uniformity(self, spec: SizeSpec) -> Optional[str]:
        window = (UNIFORMITY_SIZE, UNIFORMITY_SIZE)
        universe = [encode_blc(term) for term in enumerate_terms(spec, 0, UNIFORMITY_SIZE)]
        tables = build_tables(spec)
        observed = Counter(
            encode_blc(sample_term(tables, 0, window, seed).term)
            for seed in batch_seeds(self.seed, UNIFORMITY_SAMPLES)
        )
        if set(observed) - set(universe):
            return "sampler produced a term outside the enumerated class"
        statistic, p_value = chisquare([observed.get(bits, 0) for bits in universe])
        if p_value <= SIGNIFICANCE:
            return f"chi-square {statistic:.2f} rejects uniformity (p={p_value:.2e})"
        return None
