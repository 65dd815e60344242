"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report.  Tolerances are fixed here, not calibrated elsewhere.
"""

import itertools
import re
import time

import numpy as np
import pytest

from relu_regions import (activation_pattern, brute_force_enumerate,
                          enumerate_regions, forward, find_linear_region,
                          init_kaiming, save_network)
from relu_regions.cache import RegionCache, predict, _pattern_texts
from relu_regions.cli import main as cli_main
from relu_regions.experiments import cache_grid_stats, compare_skips
from relu_regions.network import ActivationPattern, batch_pre_activations
from relu_regions.regions import LinearRegion
from relu_regions.stats import A_LESS_THAN_B, mann_whitney_one_tailed

from conftest import demo_net, rel_err  # noqa: F401
from test_stats import exact_less_p

# Fixed fleet for criteria 1, 2 and 6: input dim 2, two or three hidden
# layers, at most 4 neurons per layer, first layer at least 3 wide (with
# only two inputs that forces an infeasible first-layer cell, so pruning
# always has something to do), with and without skips.
FLEET = [
    ([3, 2], (), 101), ([3, 3], (), 102), ([4, 2], (), 103),
    ([4, 3], (), 104), ([4, 4], (), 105), ([3, 3, 2], (), 106),
    ([3, 3, 3], (), 107), ([4, 4, 4], (), 108), ([4, 3, 2], (), 109),
    ([4, 4, 2], (), 110),
    ([3, 3, 2], ((1, 3),), 111), ([3, 3, 3], ((1, 3),), 112),
    ([4, 4, 4], ((1, 3),), 113), ([4, 4, 2], ((1, 3),), 114),
    ([3, 3, 4], ((1, 3),), 115), ([3, 3, 3], ((1, 3),), 116),
    ([4, 4, 4], ((1, 3),), 117), ([4, 4, 3], ((1, 3),), 118),
    ([3, 3, 2], ((1, 3),), 119), ([4, 4, 4], ((1, 3),), 120),
]

TABLE1_ROWS = [
    # (layers, width, printed no-skip mean, printed skip mean)
    (3, 4, 42.4, 52.3),
    (3, 6, 115.7, 137.6),
    (4, 4, 53.5, 71.5),  # printed skip list "1->3, 2->5" exceeds 4 layers;
                         # implemented as 1->3 only (see README)
]
TABLE1_SEED = 777000
TABLE1_TOLERANCE = 0.35


def fleet_nets():
    return [(init_kaiming(w, 2, 1, s, seed), w, s)
            for w, s, seed in FLEET]


def report(criterion: str, detail: str):
    print(f"PASS {criterion}: {detail}")


class TestCriterion1:
    def test_enumeration_matches_brute_force(self):
        start = time.perf_counter()
        total_regions = 0
        for net, widths, skips in fleet_nets():
            es = enumerate_regions(net)
            bs = brute_force_enumerate(net)
            assert es.pattern_texts == bs.pattern_texts, (widths, skips)
            total_regions += len(es)
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0
        report("criterion 1",
               f"{len(FLEET)} networks, enumerate == brute force exactly "
               f"({total_regions} regions total) in {elapsed:.1f}s < 60s")


class TestCriterion2:
    def test_point_coverage_and_affine_correctness(self):
        rng = np.random.default_rng(22)
        worst = 0.0
        for net, widths, skips in fleet_nets():
            region_map = {r.pattern.text: r
                          for r in enumerate_regions(net).regions}
            xs = rng.uniform(-10.0, 10.0, size=(10_000, 2))
            texts = _pattern_texts(net, xs)
            missing = [t for t in texts if t not in region_map]
            assert not missing, f"{len(missing)} uncovered patterns {widths}"

            # reference outputs, vectorized
            pres = batch_pre_activations(net, xs)
            posts = np.maximum(pres[-1], 0.0)
            expected = posts @ net.output_head.weights.T + net.output_head.bias

            by_pattern: dict[str, list[int]] = {}
            for i, t in enumerate(texts):
                by_pattern.setdefault(t, []).append(i)
            for text, idxs in by_pattern.items():
                region = region_map[text]
                got = xs[idxs] @ region.matrix.T + region.offset
                err = np.max(np.abs(got - expected[idxs])
                             / (1.0 + np.abs(expected[idxs])))
                worst = max(worst, float(err))
            assert worst <= 1e-9

            cache = RegionCache()
            for x in xs[:50]:
                assert rel_err(predict(net, cache, x),
                               forward(net, x).output) <= 1e-9
        report("criterion 2",
               f"10,000 samples per network all covered; worst affine "
               f"relative error {worst:.2e} <= 1e-9")


class TestCriterion3:
    def test_table1_rows_reproduce(self):
        start = time.perf_counter()
        lines = []
        for layers, width, printed_plain, printed_skip in TABLE1_ROWS:
            result = compare_skips(layers, width, [(1, 3)], trials=50,
                                   seed=TABLE1_SEED)
            mean_skip = result.with_skips["mean"]
            mean_plain = result.without_skips["mean"]
            assert mean_skip > mean_plain, (layers, width)
            assert result.u_test is not None
            assert result.u_test.p_value < 0.05, (layers, width)
            assert result.reject_null is True
            for mean, printed in ((mean_plain, printed_plain),
                                  (mean_skip, printed_skip)):
                assert abs(mean - printed) <= TABLE1_TOLERANCE * printed, (
                    layers, width, mean, printed)
            lines.append(f"{layers}x{width}: {mean_plain:.1f}/{mean_skip:.1f} "
                         f"vs printed {printed_plain}/{printed_skip}, "
                         f"p={result.u_test.p_value:.1e}")
        elapsed = time.perf_counter() - start
        assert elapsed < 600.0
        report("criterion 3",
               "; ".join(lines) + f"; total {elapsed:.0f}s < 600s")


class TestCriterion4:
    def test_worked_example_region(self, demo_net):
        region = find_linear_region(demo_net,
                                    ActivationPattern.from_text("11|01"))
        assert isinstance(region, LinearRegion)
        expected = [
            (np.array([4.0, -1.0]), -2.0),    # 4x - y <= 2
            (np.array([4.0, 1.0]), -3.0),     # 4x + y <= 3
            (np.array([20.0, -11.0]), -11.0),  # 20x - 11y <= 11
            (np.array([-2.0, 10.0]), -19.0 / 4.0),  # 2x - 10y >= -19/4
        ]
        for hs, (ea, eb) in zip(region.halfspaces, expected):
            got = np.append(hs.alpha, hs.beta)
            want = np.append(ea, eb)
            scale = float(got @ want) / float(want @ want)
            assert scale > 0.0
            np.testing.assert_allclose(got, scale * want, atol=1e-9)
        assert region.chebyshev_radius > 1e-7
        x = np.array([0.4, 0.2])
        margins = [hs.evaluate(x) for hs in region.halfspaces]
        assert all(m < 0 for m in margins)
        report("criterion 4",
               "pattern 11|01 gives the four printed half-spaces (up to "
               "positive scale), full-dimensional, (0.4, 0.2) interior "
               f"with margins {['%.2f' % m for m in margins]}")


class TestCriterion5:
    def test_tropical_identities_on_random_pairs(self):
        from test_tropical import states_along_pattern
        rng = np.random.default_rng(55)
        configs = [([3, 3], ()), ([4, 4, 4], ()), ([3, 3, 3], ((1, 3),)),
                   ([4, 4, 4], ((1, 3),)), ([4, 4, 2], ((1, 3),)),
                   ([2, 4, 4, 4], ()), ([3, 3, 3, 3], ((1, 3), (2, 4)))]
        worst_post = worst_pre = 0.0
        pairs = 0
        while pairs < 1000:
            widths, skips = configs[pairs % len(configs)]
            net = init_kaiming(widths, 2, 1, skips, seed=7000 + pairs)
            x = rng.uniform(-8.0, 8.0, size=2)
            tr = forward(net, x)
            states, _ = states_along_pattern(net, activation_pattern(net, x))
            for depth in range(1, net.num_hidden_layers + 1):
                worst_post = max(worst_post, rel_err(
                    states[depth].post_activation_at(x),
                    tr.post_activations[depth - 1]))
                worst_pre = max(worst_pre, rel_err(
                    states[depth].pre_activation_at(x),
                    tr.pre_activations[depth - 1]))
            pairs += 1
        assert worst_post <= 1e-9 and worst_pre <= 1e-9
        report("criterion 5",
               f"1000 (network, input) pairs: post-activation identity "
               f"err {worst_post:.2e}, boundary identity err "
               f"{worst_pre:.2e}, both <= 1e-9")


class TestCriterion6:
    def test_pruning_soundness_and_savings(self):
        checked = strict = 0
        for net, widths, skips in fleet_nets():
            pruned = enumerate_regions(net, prune=True)
            unpruned = enumerate_regions(net, prune=False)
            assert pruned.pattern_texts == unpruned.pattern_texts
            for a, b in zip(pruned.regions, unpruned.regions):
                np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-12)
                np.testing.assert_allclose(a.offset, b.offset, atol=1e-12)
            total = 2 ** net.total_neurons
            assert unpruned.stats.patterns_visited == total
            checked += 1
            if len(pruned) < total:  # at least one empty region exists
                assert pruned.stats.patterns_visited < total, (widths, skips)
                strict += 1
        assert strict == checked  # every fleet net has empty regions
        report("criterion 6",
               f"pruned == unpruned on all {checked} networks; pruned "
               f"visited strictly fewer patterns on all {strict} with "
               "empty regions")


class TestCriterion7:
    def test_partition_areas_sum_to_box(self, tmp_path, capsys):
        worst = 0.0
        for seed in (201, 202, 203, 204, 205):
            net_path = tmp_path / f"net{seed}.json"
            net_path.write_text(save_network(init_kaiming([3, 3], 2, 1, (),
                                                          seed)))
            svg_path = tmp_path / f"net{seed}.svg"
            code = cli_main(["plot", str(net_path), "--box", "-10", "10",
                             "-10", "10", "--out", str(svg_path)])
            capsys.readouterr()
            assert code == 0
            total = 0.0
            for points in re.findall(r'points="([^"]+)"', svg_path.read_text()):
                verts = [tuple(map(float, p.split(",")))
                         for p in points.split()]
                s = 0.0
                for i in range(len(verts)):
                    x0, y0 = verts[i]
                    x1, y1 = verts[(i + 1) % len(verts)]
                    s += x0 * y1 - x1 * y0
                total += abs(s) / 2.0
            worst = max(worst, abs(total - 400.0) / 400.0)
        assert worst <= 1e-3
        report("criterion 7",
               f"5 networks: SVG polygon areas sum to 400 within "
               f"{worst * 100:.4f}% <= 0.1%")


class TestCriterion8:
    def test_u_test_against_exact_oracle(self):
        worst = 0.0
        for n in range(2, 11):
            for n1 in range(1, n):
                for positions in itertools.combinations(range(n), n1):
                    a = [float(p) for p in positions]
                    b = [float(q) for q in range(n) if q not in positions]
                    res = mann_whitney_one_tailed(a, b, A_LESS_THAN_B)
                    p_exact, _ = exact_less_p(a, b)
                    worst = max(worst, abs(res.p_value - p_exact))
        assert worst <= 0.03

        rng = np.random.default_rng(88)
        for _ in range(1000):
            a = list(rng.normal(size=rng.integers(1, 30)))
            b = list(rng.integers(0, 6, size=rng.integers(1, 30)).astype(float))
            r1 = mann_whitney_one_tailed(a, b, A_LESS_THAN_B)
            r2 = mann_whitney_one_tailed(b, a, A_LESS_THAN_B)
            assert r1.u_statistic + r2.u_statistic == pytest.approx(
                len(a) * len(b))
        report("criterion 8",
               f"exact-oracle max |p - p_exact| = {worst:.2e} <= 0.03 over "
               "all tie-free shapes n1+n2 <= 10; U complement identity on "
               "1000 random pairs")


class TestCriterion9:
    def test_declared_exclusions_and_regression_fixture(self):
        # Training-time region curves, image-dataset caching accuracies,
        # UMAP embeddings and KS/Gamma goodness-of-fit are out of scope at
        # desk scale; the deterministic grid hit-rate fixture plus the
        # property suites above stand in for them.
        net = init_kaiming([5, 5], 2, 1, (), seed=2025)
        fine = cache_grid_stats(net, train_fn=2, grid_start=-10.0,
                                grid_step=0.1, grid_len=201, offset=0.1)
        assert fine["cached_regions"] == 34
        assert fine["hit_rate"] == pytest.approx(1.0)
        coarse = cache_grid_stats(net, train_fn=2, grid_start=-10.0,
                                  grid_step=0.5, grid_len=41, offset=0.25)
        assert coarse["cached_regions"] == 27
        assert coarse["hit_rate"] == pytest.approx(0.998810232004759,
                                                   abs=1e-12)
        report("criterion 9",
               "excluded experiments declared; grid fixtures reproduce "
               f"(fine: 34 regions, rate 1.0; interleaved: 27 regions, "
               f"rate {coarse['hit_rate']:.15f})")
