import time
from collections import Counter

import pytest
from scipy.stats import chisquare

from app.exceptions import AttemptsExhausted, DomainError
from app.models import Abs, Var
from app.services.asymptotics import leaf_statistics
from app.services.blc import encode_blc
from app.services.enumeration import enumerate_terms
from app.services.sampler import (
    REJECTION_REASONS,
    UniformStream,
    batch_seeds,
    branch_probabilities,
    build_tables,
    sample_batch,
    sample_batch_stats,
    sample_term,
    size_window,
)
from app.services.size_model import term_size
from app.services.terms import openness


@pytest.fixture
def natural_tables(natural):
    return build_tables(natural, 20)


class TestTables:
    def test_level_n_probabilities(self, natural_tables):
        assert abs(natural_tables.p_abs[20] - 0.2955977425) < 1e-8
        assert abs(natural_tables.p_app[20] - 0.3522011287) < 1e-8
        assert abs(natural_tables.leaf_mass[20] - 0.3522011287) < 1e-8

    def test_levels_are_distributions(self, natural, less_natural, binary):
        for spec in (natural, less_natural, binary):
            tables = build_tables(spec, 12)
            assert tables.leaf_mass[0] == 0
            for level in range(13):
                total = tables.leaf_mass[level] + tables.p_abs[level] + tables.p_app[level]
                assert abs(total - 1) < 1e-12

    def test_frame(self, natural_tables):
        frame = branch_probabilities(natural_tables)
        assert list(frame.columns) == ["level", "leaf", "abstraction", "application", "A"]
        assert len(frame) == 21

    def test_rejects_level_zero(self, natural):
        with pytest.raises(DomainError):
            build_tables(natural, 0)


def test_size_window():
    assert size_window(100, 0.1) == (90, 110)
    assert size_window(8, 0) == (8, 8)
    with pytest.raises(DomainError):
        size_window(-1, 0.1)


def test_uniform_stream_is_reproducible():
    first, second = UniformStream(7, chunk=4), UniformStream(7, chunk=4)
    draws = [first.next() for _ in range(10)]
    assert draws == [second.next() for _ in range(10)]
    assert all(0 <= value < 1 for value in draws)


def test_batch_seeds():
    assert batch_seeds(42, 3) == batch_seeds(42, 3)
    assert len(set(batch_seeds(42, 50))) == 50
    assert batch_seeds(42, 5)[:3] == batch_seeds(42, 3)


class TestSampleTerm:
    def test_unique_term_of_size_two(self, natural_tables):
        for seed in range(20):
            report = sample_term(natural_tables, 0, (2, 2), seed)
            assert report.term == Abs(Var(0))
            assert report.size == 2
            assert report.rng_seed == seed

    def test_same_seed_same_term(self, natural_tables):
        first = sample_term(natural_tables, 0, (30, 40), 11)
        second = sample_term(natural_tables, 0, (30, 40), 11)
        assert encode_blc(first.term) == encode_blc(second.term)
        assert first.attempts == second.attempts

    @pytest.mark.parametrize("target_m", [0, 1, 3])
    def test_accepted_terms(self, natural, natural_tables, target_m):
        for seed in batch_seeds(5, 20):
            report = sample_term(natural_tables, target_m, (20, 30), seed)
            assert 20 <= report.size <= 30
            assert term_size(natural, report.term) == report.size
            assert openness(report.term) <= target_m
            assert report.attempts == 1 + sum(report.rejections.values())

    def test_attempts_exhausted(self, natural_tables):
        with pytest.raises(AttemptsExhausted) as info:
            sample_term(natural_tables, 0, (1, 1), 3, max_attempts=5)
        assert info.value.attempts == 5
        assert sum(info.value.rejections.values()) == 5
        assert set(info.value.rejections) == set(REJECTION_REASONS)

    def test_time_budget(self, natural_tables):
        with pytest.raises(AttemptsExhausted) as info:
            sample_term(natural_tables, 0, (1, 1), 3, max_attempts=10 ** 9, time_budget=0.0)
        assert info.value.attempts == sum(info.value.rejections.values())
        assert "time budget" in info.value.message


    def test_rejects_bad_requests(self, natural_tables):
        with pytest.raises(DomainError):
            sample_term(natural_tables, 0, (10, 5), 1)
        with pytest.raises(DomainError):
            sample_term(natural_tables, -1, (5, 10), 1)


def test_batch_does_not_depend_on_workers(natural_tables):
    serial = sample_batch(natural_tables, 0, (15, 25), 6, seed=99)
    parallel = sample_batch(natural_tables, 0, (15, 25), 6, seed=99, workers=2)
    assert [encode_blc(report.term) for report in serial] == [encode_blc(report.term) for report in parallel]
    assert [report.rng_seed for report in serial] == batch_seeds(99, 6)


def test_batch_stats(natural_tables):
    stats = sample_batch_stats(natural_tables, 0, (45, 55), 50, seed=2017)
    assert stats.count == 50
    assert 45 <= stats.mean_size <= 55
    assert 0 < stats.variables_per_node < 1
    assert 0 < stats.closed_proportion <= 1
    assert stats.attempts >= 50
    assert set(stats.rejection_rates) == set(REJECTION_REASONS)
    with pytest.raises(DomainError):
        sample_batch_stats(natural_tables, 0, (45, 55), 0, seed=1)


@pytest.mark.slow
def test_uniform_within_size(natural, natural_tables):
    universe = [encode_blc(term) for term in enumerate_terms(natural, 0, 8)]
    observed = Counter(
        encode_blc(sample_term(natural_tables, 0, (8, 8), seed).term) for seed in batch_seeds(2017, 10_000)
    )
    assert set(observed) <= set(universe)
    _, p_value = chisquare([observed.get(bits, 0) for bits in universe])
    assert p_value > 1e-3


@pytest.mark.slow
def test_variable_count_statistics(natural, natural_tables):
    expected = leaf_statistics(natural)
    stats = sample_batch_stats(natural_tables, 0, (900, 1100), 1000, seed=7)
    assert abs(stats.variables_per_size / expected.mean_per_size - 1) < 0.02
    assert abs(stats.variables_per_node / expected.leaf_probability_per_node - 1) < 0.02
    residual_per_size = stats.residual_var_variables / stats.mean_size
    assert abs(residual_per_size / expected.variance_per_size - 1) < 0.15


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_large_closed_term_within_a_minute(natural_tables, seed):
    started = time.monotonic()
    report = sample_term(natural_tables, 0, size_window(100_000, 0.1), seed, time_budget=60)
    assert time.monotonic() - started < 60
    assert 90_000 <= report.size <= 110_000
    assert openness(report.term) == 0
    assert report.rejections["unbound-index"] == 0
