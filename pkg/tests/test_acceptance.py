"""Acceptance criteria, one test each.

Every test records a ``[criterion N] ... PASS|FAIL`` line before asserting;
conftest prints the collected lines at the end of the session.
"""
import itertools
import math
import time
from collections import Counter

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from opensetpad import cli, corpus
from opensetpad._backend import get_backend, use_backend
from opensetpad.bootstrap import BootstrapConfig, bootstrap_ci, bootstrap_pad_metrics, replicate_values
from opensetpad.metrics import ScoreSet, d_eer, pad_metrics
from opensetpad.protocol import (
    check_disjoint,
    enumerate_p1,
    enumerate_p2,
    enumerate_p4,
    generate_p3,
)
from opensetpad.report import ReportCell, ReportTable, format_cell, mark_best
from opensetpad.separability import EmbeddingSet, class_geometry, shift_report
from opensetpad.synth import GaussianScoreSpec, gen_scores, std_normal_cdf

pytestmark = pytest.mark.acceptance


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[criterion {n}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_1_metric_oracle_equivalence():
    rs = np.random.default_rng(1)
    sets = []
    for _ in range(500):
        nb, na = rs.integers(2, 51, size=2)
        # quarter-step grid forces ties within and across classes
        sets.append((rs.integers(0, 16, nb) / 4.0, rs.integers(3, 19, na) / 4.0))
    pad_metrics(ScoreSet(*sets[0]))  # compile outside the timed region

    t0 = time.perf_counter()
    worst = 0.0
    for bf, at in sets:
        got = pad_metrics(ScoreSet(bf, at), (0.05, 0.10))
        want = (
            oracles.eer(bf.tolist(), at.tolist()),
            oracles.bpcer_at_apcer(bf.tolist(), at.tolist(), 0.05),
            oracles.bpcer_at_apcer(bf.tolist(), at.tolist(), 0.10),
        )
        have = (got.d_eer, got.bpcer_at_5, got.bpcer_at_10)
        worst = max(worst, max(abs(h - float(w)) for h, w in zip(have, want)))
    elapsed = time.perf_counter() - t0
    record(1, worst <= 1e-9 and elapsed < 10.0,
           f"500 tied sets, max |err| {worst:.2e} (<= 1e-9), {elapsed:.2f}s incl. oracle (< 10s)")


def test_criterion_2_analytic_gaussian_eer():
    target = std_normal_cdf(-1.0)
    d_eer(gen_scores(GaussianScoreSpec(0, 1, 2, 1, 10, 10)))  # warm-up
    t0 = time.perf_counter()
    values = [d_eer(gen_scores(GaussianScoreSpec(0.0, 1.0, 2.0, 1.0, 100_000, 100_000, seed))) for seed in range(5)]
    elapsed = time.perf_counter() - t0
    worst = max(abs(v - 0.15866) for v in values)
    ok = worst <= 0.005 and elapsed < 5.0 and abs(target - 0.15866) < 1e-5
    record(2, ok, f"5 seeds, max |d_eer - 0.15866| = {worst:.4f} (<= 0.005), {elapsed:.2f}s (< 5s)")


def test_criterion_3_bootstrap_exactness():
    bf, at = [0.1, 0.6], [0.4, 0.9]
    exact = Counter()
    for ib in itertools.product(range(2), repeat=2):
        for ia in itertools.product(range(2), repeat=2):
            exact[round(float(oracles.eer([bf[i] for i in ib], [at[i] for i in ia])), 12)] += 1
    B = 10_000
    vals = replicate_values(ScoreSet(bf, at), d_eer, BootstrapConfig(B, 0.95, 12345))
    observed = Counter(np.round(vals, 12).tolist())
    worst_z = 0.0
    for v in set(exact) | set(observed):
        p = exact[v] / 16
        if p == 0:
            worst_z = math.inf
            continue
        worst_z = max(worst_z, abs(observed[v] / B - p) / math.sqrt(p * (1 - p) / B))
    dist_ok = worst_z <= 3.0

    single = bootstrap_ci(ScoreSet([0.2], [0.7]), d_eer, BootstrapConfig(500, 0.95, 1))
    single_ok = single.half_width == 0.0

    rs = np.random.default_rng(3)
    s = ScoreSet(rs.normal(0, 1, 400).round(2), rs.normal(1.5, 1, 300).round(2))
    cfg = BootstrapConfig(400, 0.95, 77)
    per_workers = [bootstrap_pad_metrics(s, cfg, workers=w) for w in (1, 2, 8)]
    generic = [bootstrap_ci(s, d_eer, cfg, workers=w) for w in (1, 2, 8)]
    workers_ok = per_workers[0] == per_workers[1] == per_workers[2] and generic[0] == generic[1] == generic[2]

    record(3, dist_ok and single_ok and workers_ok,
           f"16-resample enumeration max z {worst_z:.2f} (<= 3); singleton half_width {single.half_width}; "
           f"workers 1/2/8 identical: {workers_ok}")


def test_criterion_4_separability_hand_oracle():
    ind = EmbeddingSet.from_classes([[0, 0], [0, 2]], [[4, 0], [4, 2]])
    g = class_geometry(ind)
    hand_ok = g.mean_gap == 4.0 and g.sigma_bf == 1.0 and g.sigma_at == 1.0 and g.ratio == 2.0

    same = shift_report(ind, ind)
    collapsed = shift_report(ind, EmbeddingSet.from_classes([[0, 0], [0, 2]], [[0, 0], [0, 2]]))
    ident_ok = same.srd == 0.0 and same.ddp == 0.0 and collapsed.srd == 100.0

    rs = np.random.default_rng(4)
    bf, at = rs.normal(0, 1, (50, 8)), rs.normal(1, 1.5, (40, 8))
    base = class_geometry(EmbeddingSet.from_classes(bf, at)).ratio
    worst = 0.0
    for _ in range(100):
        q, r = np.linalg.qr(rs.normal(size=(8, 8)))
        q *= np.sign(np.diag(r))
        t = rs.normal(0, 5, 8)
        moved = class_geometry(EmbeddingSet.from_classes(bf @ q.T + t, at @ q.T + t)).ratio
        worst = max(worst, abs(moved - base))
    record(4, hand_ok and ident_ok and worst <= 1e-9,
           f"gap {g.mean_gap}, sigmas {g.sigma_bf}/{g.sigma_at}, R {g.ratio}; SRD/DDP identities {ident_ok}; "
           f"rotation drift {worst:.1e} (<= 1e-9)")


def _by_id(records):
    return {r.sample_id: r for r in records}


def test_criterion_5_protocol_counts(corpus_records):
    recs = _by_id(corpus_records)
    p1, p2 = enumerate_p1(corpus_records), enumerate_p2(corpus_records)
    p3 = [generate_p3(corpus_records)]
    runs = p1 + p2 + p3

    textured = next(r for r in p1 if r.run_id == "P1/textured_lens")
    n_textured = sum(recs[i].pai_category == "textured_lens" for i in textured.test_ids)
    nd15 = next(r for r in p2 if r.run_id == "P2/NDCLD15")
    nd15_labels = Counter(recs[i].label for i in nd15.test_ids)
    n_p3 = len(p3[0].test_ids)

    invariants = True
    for run in runs:
        check_disjoint(run)
        pool = [recs[i] for i in run.train_ids + run.val_ids]
        test = [recs[i] for i in run.test_ids]
        held = run.run_id.split("/", 1)[1]
        if run.run_id.startswith("P1/"):
            invariants &= all(r.pai_category != held and r.spectrum == "NIR" for r in pool)
        elif run.run_id.startswith("P2/"):
            invariants &= all(r.dataset != held for r in pool) and all(r.dataset == held for r in test)
        else:
            invariants &= all(r.spectrum == "NIR" for r in pool) and all(r.spectrum == "VIS" for r in test)
        invariants &= not run.degenerate

    ok = (
        len(runs) == 15 and n_textured == 17_740
        and (nd15_labels["bonafide"], nd15_labels["attack"]) == (2_475, 4_825)
        and n_p3 == 31_200 and invariants
    )
    record(5, ok, f"{len(runs)} runs (15); textured test attacks {n_textured} (17740); "
                  f"NDCLD15 test {nd15_labels['bonafide']}+{nd15_labels['attack']} (2475+4825); "
                  f"P3 test {n_p3} (31200); invariants {invariants}")


def test_criterion_6_protocol_4(corpus_records):
    recs = _by_id(corpus_records)
    runs = enumerate_p4(corpus_records)
    ok = len(runs) == len(corpus.JOINT_HOLDOUT_PAIRS) == 4
    details = []
    for run, (ds, pai) in zip(runs, corpus.JOINT_HOLDOUT_PAIRS):
        check_disjoint(run)
        pool = [recs[i] for i in run.train_ids + run.val_ids]
        leaks = sum(r.dataset == ds or r.pai_category == pai for r in pool)
        ok &= leaks == 0 and not run.degenerate and len(run.test_ids) > 0
        details.append(f"{ds}+{pai}: {leaks} leaked")
    record(6, ok, "; ".join(details))


def test_criterion_7_report_formatting():
    strings_ok = format_cell(44.55, 0.58) == "44.55±0.58" and format_cell(18.12, 0.57) == "18.12±0.57"

    def best(metric, values):
        t = ReportTable()
        for i, v in enumerate(values):
            t.put((f"m{i}", "-", metric), "c", ReportCell(v / 100))
        t = mark_best(t)
        return [values[i] for i in range(len(values)) if t.cells[((f"m{i}", "-", metric), "c")].best]

    flags_ok = (
        best("d_eer", [5.0, 3.0, 7.0]) == [3.0]
        and best("srd", [-377.10, 17.08]) == [-377.10]
        and best("ddp", [-377.10, 17.08]) == [17.08]
    )
    record(7, strings_ok and flags_ok, f"cell strings {strings_ok}; best flags d_eer/srd/ddp {flags_ok}")


def test_criterion_8_pipeline_determinism(tmp_path):
    scores = []
    for k, mu in enumerate((1.0, 2.0, 3.0)):
        p = tmp_path / f"cond{k}.csv"
        with use_backend(get_backend()):
            spec = p.with_suffix(".json")
            spec.write_text(f'{{"mu_bf": 0, "sigma_bf": 1, "mu_at": {mu}, "sigma_at": 1, '
                            f'"n_bf": 2000, "n_at": 1500, "seed": {k}}}')
            assert cli.main(["synth", "scores", "--spec", str(spec), "--out", str(p)]) == 0
        scores.append(str(p))

    def snapshot(out, workers):
        with use_backend(get_backend()):
            code = cli.main(["evaluate", "--scores", *scores, "--out", str(out),
                             "--bootstrap", "300", "--seed", "5", "--workers", str(workers)])
        assert code == 0
        return {str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}

    a = snapshot(tmp_path / "a", 1)
    b = snapshot(tmp_path / "b", 1)
    c = snapshot(tmp_path / "c", 4)
    ok = len(a) == 5 and a == b == c
    record(8, ok, f"{len(a)} files; repeat identical {a == b}; workers 1 vs 4 identical {a == c}")
