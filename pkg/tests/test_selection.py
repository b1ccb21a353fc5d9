import logging
import math

import numpy as np
import pytest
from scipy.special import zeta

from ktmap.corpus import CitationNetwork, Document
from ktmap.errors import DegenerateDataError, InsufficientDataError
from ktmap.selection import (fit_power_law, ks_distance,
                             sample_discrete_power_law, select_top_cited)

from conftest import make_net


def star_corpus(in_degrees):
    """One node per entry, cited by fresh citer nodes to hit the in-degrees."""
    docs = [Document(id=f"t{i:02d}") for i in range(len(in_degrees))]
    edges = []
    c = 0
    for i, deg in enumerate(in_degrees):
        for _ in range(deg):
            docs.append(Document(id=f"c{c:03d}"))
            edges.append((f"c{c:03d}", f"t{i:02d}"))
            c += 1
    return CitationNetwork(docs, edges)


class TestSelectTopCited:
    def test_distinct_ranks(self):
        net = star_corpus(range(10))  # targets with in-degree 0..9 plus citers
        # 45 citers + 10 targets = 55 docs; fraction fine-tuned to pick top-2
        core = select_top_cited(net, 2 / net.n_docs)
        kept = [i for i in core.ids if i.startswith("t")]
        assert kept == ["t08", "t09"]

    def test_identity_fraction(self):
        net = make_net([("a", "b"), ("c", "b")])
        core = select_top_cited(net, 1.0)
        assert core.ids == net.ids and core.edges == net.edges

    def test_boundary_ties_included(self):
        # in-degrees 5,3,3,3,2,... with target count 2: boundary value 3,
        # every node tied at 3 comes along
        net = star_corpus([5, 3, 3, 3, 2, 1, 1, 0, 0, 0])
        assert net.n_docs == 28  # 18 citers + 10 targets
        assert math.ceil(0.07 * net.n_docs) == 2
        core = select_top_cited(net, 0.07)
        kept = sorted(i for i in core.ids if i.startswith("t"))
        assert kept == ["t00", "t01", "t02", "t03"]

    def test_fraction_out_of_range(self):
        net = make_net([("a", "b")])
        for bad in (0.0, -0.1, 1.2):
            with pytest.raises(ValueError):
                select_top_cited(net, bad)

    def test_empty_corpus(self):
        with pytest.raises(InsufficientDataError):
            select_top_cited(CitationNetwork([], []), 0.5)

    def test_monotone_in_fraction(self):
        net = star_corpus([7, 5, 5, 4, 3, 3, 3, 2, 1, 0])
        previous: set = set()
        for frac in (0.05, 0.1, 0.2, 0.4, 0.7, 1.0):
            ids = set(select_top_cited(net, frac).ids)
            assert previous <= ids
            previous = ids

    def test_core_dominates_excluded(self):
        net = star_corpus([7, 5, 5, 4, 3, 3, 3, 2, 1, 0])
        core = set(select_top_cited(net, 0.1).ids)
        inside = min(net.in_degree(i) for i in core)
        outside = max(net.in_degree(i) for i in net.ids if i not in core)
        assert inside >= outside

    def test_external_ranking(self):
        docs = [Document(id="a", ext_citations=10),
                Document(id="b", ext_citations=500),
                Document(id="c", ext_citations=3)]
        net = CitationNetwork(docs, [("a", "b"), ("a", "c")])
        core = select_top_cited(net, 0.3, rank_by="external")
        assert core.ids == ("b",)

    def test_external_ranking_requires_field(self):
        net = make_net([("a", "b")])
        with pytest.raises(ValueError, match="ext_citations"):
            select_top_cited(net, 0.5, rank_by="external")


def brute_force_alpha(tail, xmin, lo=1.01, hi=5.0, step=0.001):
    """Grid argmax of the discrete power-law log-likelihood."""
    grid = np.arange(lo, hi + step / 2, step)
    log_sum = np.log(tail).sum()
    ll = -grid * log_sum - len(tail) * np.log(zeta(grid, xmin))
    return float(grid[np.argmax(ll)])


class TestFitPowerLaw:
    def test_degenerate_constant(self):
        with pytest.raises(DegenerateDataError):
            fit_power_law([3, 3, 3, 3])

    def test_zeros_dropped_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="ktmap.selection"):
            fit = fit_power_law([0, 0, 1, 1, 2, 2, 3, 4, 5, 9], xmin=1)
        assert "zero" in caplog.text
        assert fit.n_tail == 8

    def test_insufficient_tail(self):
        with pytest.raises(InsufficientDataError):
            fit_power_law([1, 1, 1, 7], xmin=7)

    def test_alpha_matches_grid_scan_at_fixed_xmin(self):
        tail = [1, 1, 1, 1, 2, 2, 3, 5, 9, 14]
        fit = fit_power_law(tail, xmin=1)
        assert abs(fit.alpha - brute_force_alpha(tail, 1)) <= 0.001

    def test_likelihood_optimality_on_grid(self):
        rng = np.random.default_rng(3)
        x = sample_discrete_power_law(2.2, 2, 500, rng)
        fit = fit_power_law(x, xmin=2)
        tail = x[x >= 2]
        log_sum = np.log(tail).sum()

        def loglike(alpha):
            return -alpha * log_sum - tail.size * np.log(zeta(alpha, 2))

        grid = np.arange(max(1.01, fit.alpha - 0.5), fit.alpha + 0.5, 0.001)
        assert loglike(fit.alpha) >= max(loglike(a) for a in grid) - 1e-9

    def test_ks_distance_recomputed_matches(self):
        rng = np.random.default_rng(11)
        x = sample_discrete_power_law(2.5, 1, 2000, rng)
        fit = fit_power_law(x)
        tail = np.asarray([v for v in x if v >= fit.xmin])
        # independent recomputation of the KS statistic
        uniq = np.unique(tail)
        ecdf = np.array([(tail <= u).mean() for u in uniq])
        cdf = 1.0 - zeta(fit.alpha, uniq + 1) / zeta(fit.alpha, fit.xmin)
        assert abs(np.abs(ecdf - cdf).max() - fit.ks_distance) < 1e-9

    def test_recovers_alpha(self):
        rng = np.random.default_rng(0)
        x = sample_discrete_power_law(2.5, 1, 10_000, rng)
        fit = fit_power_law(x)
        assert 2.4 <= fit.alpha <= 2.6
        assert ks_distance(x[x >= fit.xmin], fit.alpha, fit.xmin) == fit.ks_distance

    def test_bootstrap_p_value_range(self):
        rng = np.random.default_rng(1)
        x = sample_discrete_power_law(2.5, 1, 300, rng)
        fit = fit_power_law(x, bootstrap=20, seed=7)
        assert fit.p_value is not None and 0.0 <= fit.p_value <= 1.0
        # a true power-law sample should rarely be rejected outright
        assert fit.p_value > 0.0


class TestSampler:
    def test_values_at_least_xmin(self):
        rng = np.random.default_rng(2)
        x = sample_discrete_power_law(3.0, 4, 1000, rng)
        assert x.min() >= 4

    def test_deterministic_per_seed(self):
        a = sample_discrete_power_law(2.5, 1, 100, np.random.default_rng(9))
        b = sample_discrete_power_law(2.5, 1, 100, np.random.default_rng(9))
        assert (a == b).all()

    def test_tail_frequencies_follow_pmf(self):
        rng = np.random.default_rng(4)
        x = sample_discrete_power_law(2.5, 1, 50_000, rng)
        p1 = (x == 1).mean()
        expected = 1.0 / zeta(2.5, 1)
        assert abs(p1 - expected) < 0.01
