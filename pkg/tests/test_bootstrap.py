import itertools
import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats

import oracles
from opensetpad import rng
from opensetpad.bootstrap import (
    BootstrapConfig,
    bootstrap_ci,
    bootstrap_pad_metrics,
    pad_replicate_matrix,
    replicate_values,
    resample,
)
from opensetpad.metrics import ScoreSet, bpcer_at_apcer, d_eer
from opensetpad.synth import GaussianScoreSpec, gen_scores


def linear_quantile(sorted_vals, q):
    h = (len(sorted_vals) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(sorted_vals) - 1)
    return sorted_vals[lo] + (h - lo) * (sorted_vals[hi] - sorted_vals[lo])


def test_singletons_collapse():
    s = ScoreSet([0.3], [0.7])
    for r in range(20):
        rs = resample(s, rng.replicate_key(1, r))
        assert rs.bonafide.tolist() == [0.3] and rs.attack.tolist() == [0.7]
    ci = bootstrap_ci(s, d_eer, BootstrapConfig(200, 0.95, 3))
    assert ci.half_width == 0.0 and ci.lo == ci.hi == ci.point_estimate


def test_class_sizes_preserved(rs):
    s = ScoreSet(rs.normal(size=17), rs.normal(size=5))
    for r in range(10):
        out = resample(s, rng.replicate_key(0, r))
        assert out.n_bonafide == 17 and out.n_attack == 5
        assert set(out.bonafide) <= set(s.bonafide) and set(out.attack) <= set(s.attack)


def test_resample_keeps_ids():
    s = ScoreSet.from_entries([("a", "bonafide", 0.1), ("b", "bonafide", 0.2), ("z", "attack", 0.9)])
    out = resample(s, 77)
    lookup = {"a": 0.1, "b": 0.2}
    assert [lookup[i] for i in out.bonafide_ids] == out.bonafide.tolist()


def test_two_point_resample_uniform():
    s = ScoreSet.from_entries(
        [("a", "bonafide", 0.0), ("b", "bonafide", 1.0), ("z", "attack", 5.0)]
    )
    B = 10_000
    counts = Counter("".join(resample(s, rng.replicate_key(2024, r)).bonafide_ids) for r in range(B))
    assert set(counts) == {"aa", "ab", "ba", "bb"}
    chi2 = stats.chisquare([counts[k] for k in ("aa", "ab", "ba", "bb")])
    assert chi2.pvalue > 1e-3


def test_exact_enumeration_tiny_set():
    bf, at = [0.1, 0.6], [0.4, 0.9]
    exact = Counter()
    for ib in itertools.product(range(2), repeat=2):
        for ia in itertools.product(range(2), repeat=2):
            exact[float(oracles.eer([bf[i] for i in ib], [at[i] for i in ia]))] += 1
    B = 10_000
    vals = replicate_values(ScoreSet(bf, at), d_eer, BootstrapConfig(B, 0.95, 99))
    observed = Counter(np.round(vals, 12).tolist())
    assert set(observed) <= {round(v, 12) for v in exact}
    for v, k in exact.items():
        p = k / 16
        sigma = math.sqrt(p * (1 - p) / B)
        assert abs(observed[round(v, 12)] / B - p) <= 3 * sigma


def test_deterministic_and_seed_sensitive(rs):
    s = ScoreSet(rs.normal(0, 1, 200), rs.normal(1, 1, 150))
    a = bootstrap_ci(s, d_eer, BootstrapConfig(150, 0.9, 5))
    assert a == bootstrap_ci(s, d_eer, BootstrapConfig(150, 0.9, 5))
    assert a != bootstrap_ci(s, d_eer, BootstrapConfig(150, 0.9, 6))


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_workers_do_not_change_results(rs, workers):
    s = ScoreSet(rs.normal(0, 1, 120).round(1), rs.normal(1, 1, 90).round(1))
    cfg = BootstrapConfig(101, 0.95, 8)
    assert bootstrap_pad_metrics(s, cfg, workers=workers) == bootstrap_pad_metrics(s, cfg, workers=1)
    assert bootstrap_ci(s, d_eer, cfg, workers=workers) == bootstrap_ci(s, d_eer, cfg)


def test_fused_path_matches_generic(rs, backend):
    s = ScoreSet(rs.normal(0, 1, 80).round(1), rs.normal(1, 1, 60).round(1), direction="attack_high")
    cfg = BootstrapConfig(120, 0.95, 21)
    mat = pad_replicate_matrix(s, cfg, (0.05, 0.10))
    assert np.array_equal(mat[:, 0], replicate_values(s, d_eer, cfg))
    assert np.array_equal(mat[:, 2], replicate_values(s, lambda x: bpcer_at_apcer(x, 0.10), cfg))


def test_fused_path_bonafide_high(rs):
    s = ScoreSet(rs.normal(1, 1, 50), rs.normal(0, 1, 40), direction="bonafide_high")
    cfg = BootstrapConfig(60, 0.95, 2)
    assert np.array_equal(pad_replicate_matrix(s, cfg, ())[:, 0], replicate_values(s, d_eer, cfg))


def test_percentiles_and_point(rs):
    s = ScoreSet(rs.normal(0, 1, 60), rs.normal(1.2, 1, 60))
    cfg = BootstrapConfig(257, 0.9, 4)
    ci = bootstrap_ci(s, d_eer, cfg)
    vals = sorted(replicate_values(s, d_eer, cfg).tolist())
    assert ci.point_estimate == d_eer(s)
    assert ci.lo == pytest.approx(linear_quantile(vals, 0.05), abs=1e-15)
    assert ci.hi == pytest.approx(linear_quantile(vals, 0.95), abs=1e-15)
    assert ci.half_width == pytest.approx((ci.hi - ci.lo) / 2, abs=1e-15)
    assert ci.lo <= ci.hi


def test_ci_to_dict_keys():
    ci = bootstrap_ci(ScoreSet([0.0, 1.0], [2.0, 0.5]), d_eer, BootstrapConfig(10))
    assert set(ci.to_dict()) == {"metric", "point", "mean", "lo", "hi", "half_width"}
    assert ci.metric == "d_eer"


def test_width_shrinks_with_sample_size():
    def median_hw(n):
        hws = []
        for seed in range(20):
            s = gen_scores(GaussianScoreSpec(0.0, 1.0, 2.0, 1.0, n, n, seed=seed))
            hws.append(bootstrap_pad_metrics(s, BootstrapConfig(200, 0.95, seed), ())["d_eer"].half_width)
        return float(np.median(hws))

    assert median_hw(4000) < median_hw(250)


@pytest.mark.parametrize("kwargs", [{"replicates": 0}, {"ci_level": 1.0}, {"ci_level": 0.0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        BootstrapConfig(**kwargs)
