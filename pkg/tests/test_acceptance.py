"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see per-criterion
status lines.
"""
import itertools
import math
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from hicurate import lip_geometry as lg
from hicurate import metrics
from hicurate import quality_audio as qa
from hicurate import resampler_core as rc
from hicurate.curation import SampleScore, curate_corpus, partition
from hicurate.config import PipelineConfig
from hicurate.curriculum import build_schedule
from hicurate.manifest_io import parse_sample_manifest

from test_curation import hand_scores


def report(name):
    print(f"\nACCEPTANCE PASS: {name}")


def round_half_up(x):
    # round the 10-decimal representation so binary noise at 1e-16 cannot
    # flip a .x5 midpoint the wrong way
    return float(Decimal(f"{x:.10f}").quantize(Decimal("0.01"), ROUND_HALF_UP))


class TestCriterion1TableArithmetic:
    ROWS = [
        ("whisper-large-v3", 0.32, 0.79, 0.735, 0.74),
        ("step-audio-2-mini", 0.34, 0.79, 0.725, 0.73),
        ("qwen2.5-omni-3b", 0.44, 0.73, 0.645, 0.65),
        ("qwen2.5-omni-7b", 0.42, 0.75, 0.665, 0.67),
        ("hi-transpa", 0.37, 0.77, 0.700, 0.70),
        ("hi-transpa-cl", 0.27, 0.84, 0.785, 0.79),
    ]

    def test_cs_reproduces_every_row(self):
        for name, cer, emb, exact, printed in self.ROWS:
            cs = metrics.comprehensive_score(cer, emb, alpha=0.5)
            assert cs == pytest.approx(exact, abs=1e-12), name
            if round(exact * 1000) % 10 == 5:  # .x5 midpoint rows
                assert abs(cs - printed) <= 0.005 + 1e-9, name
            assert round_half_up(cs) == printed, name
        report("criterion 1: published CS table arithmetic at alpha=0.5")


class TestCriterion2LevenshteinOracle:
    def test_exhaustive_and_random(self):
        def oracle(a, b):
            @lru_cache(maxsize=None)
            def d(i, j):
                if i == 0 or j == 0:
                    return i or j
                return min(d(i - 1, j) + 1, d(i, j - 1) + 1,
                           d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
            return d(len(a), len(b))

        strings = ["".join(p) for n in range(7)
                   for p in itertools.product("abc", repeat=n)]
        checked = 0
        for i, a in enumerate(strings):
            for b in strings[i:]:  # d is symmetric; verified separately below
                assert qa.levenshtein(a, b) == oracle(a, b)
                checked += 1
        assert checked == len(strings) * (len(strings) + 1) // 2

        rng = np.random.default_rng(0)
        alphabet = [chr(c) for c in
                    list(range(0x61, 0x7B)) + list(range(0x4E00, 0x4E20))
                    + [0x1F600, 0x1F601]]
        for _ in range(1000):
            a = "".join(rng.choice(alphabet, size=rng.integers(0, 9)))
            b = "".join(rng.choice(alphabet, size=rng.integers(0, 9)))
            assert qa.levenshtein(a, b) == oracle(a, b)
            assert qa.levenshtein(a, b) == qa.levenshtein(b, a)
        report("criterion 2: Levenshtein equals recursive oracle "
               f"({checked} exhaustive pairs + 1000 random Unicode pairs)")


class TestCriterion3Partition:
    def test_random_score_vectors(self):
        rng = np.random.default_rng(1)
        values = rng.uniform(0, 1, size=10000)
        # force exact boundary hits into the pool
        values[:50] = 0.55
        values[50:100] = np.nextafter(0.55, 0)
        scores = [SampleScore(id=f"s{i}", s_asr=0, snr_db=0, motion=0,
                              snr_norm=0, s_audio=0, s_video=0,
                              s_comp=float(v), accepted=False)
                  for i, v in enumerate(values)]
        accept, reject = partition(scores, 0.55)
        assert len(accept) + len(reject) == 10000
        assert not set(accept) & set(reject)
        accept_set = set(accept)
        for s in scores:
            assert (s.id in accept_set) == (s.s_comp >= 0.55)
        prev = None
        for threshold in np.linspace(0, 1, 21):
            acc, _ = partition(scores, float(threshold))
            if prev is not None:
                assert set(acc) <= prev
            prev = set(acc)
        report("criterion 3: partition disjoint/exhaustive/boundary-"
               "inclusive/monotone on 10000 scores")


class TestCriterion4CropGeometry:
    def test_crop_size_cases_and_sweep(self):
        assert lg.crop_size(99, 97, 1.2) == 120
        assert lg.crop_size(100, 80, 1.2) == 120
        rng = np.random.default_rng(2)
        for _ in range(10000):
            w = float(rng.uniform(0, 400))
            h = float(rng.uniform(0, 400))
            gamma = float(rng.uniform(0.2, 3.0))
            s = lg.crop_size(w, h, gamma)
            target = gamma * max(w, h)
            assert s % 2 == 0 and s >= 2
            assert s >= target
            assert s < target + 2 or s == 2
        report("criterion 4a: crop size evenness + minimal even cover "
               "over 10000 random inputs")

    def test_interpolation_affine_exact(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(3, 40))
            a = rng.uniform(-10, 10, size=2)
            b = rng.uniform(0, 200, size=2)
            mask = rng.random(n) < 0.5
            mask[0] = mask[-1] = True  # interior gaps only
            partial = [tuple(a * t + b) if mask[t] else None for t in range(n)]
            out = lg.interpolate_centroids(partial, n)
            for t in range(n):
                np.testing.assert_allclose(out[t], a * t + b, atol=1e-9)
        report("criterion 4b: centroid interpolation exact on affine motion")


class TestCriterion5Snr:
    def test_constructed_case(self):
        s = np.array([1.0, 1.0, 1.0, 1.0])
        n = np.array([1.1, 0.9, 1.1, 0.9])
        assert qa.snr_reference(s, n) == pytest.approx(20.0, abs=1e-9)

    def test_noise_halving_law(self):
        rng = np.random.default_rng(4)
        checked = 0
        for _ in range(100):
            s = rng.normal(size=256)
            n = rng.normal(scale=10 ** rng.uniform(-2, -0.5), size=256)
            full = qa.snr_reference(s, s + n)
            half = qa.snr_reference(s, s + n / 2)
            if -10.0 < full and half < 60.0:
                assert half - full == pytest.approx(
                    20 * math.log10(2), abs=1e-6)
                checked += 1
        assert checked >= 90
        report("criterion 5: reference SNR 20 dB case + noise-halving law "
               f"over {checked} random signals")


class TestCriterion6CurationDeterminism:
    def test_hand_table_and_byte_identity(self, curation_corpus, tmp_path):
        records = parse_sample_manifest(curation_corpus["manifest"].read_text())
        config = PipelineConfig(snr_mode="reference")
        _, scores, _ = curate_corpus(records, config, tmp_path / "a")
        curate_corpus(records, config, tmp_path / "b")
        assert ((tmp_path / "a/report.json").read_bytes()
                == (tmp_path / "b/report.json").read_bytes())
        rows, _ = hand_scores(curation_corpus["expected"])
        for s in scores:
            for key in ("s_asr", "snr_db", "motion", "snr_norm", "s_audio",
                        "s_video", "s_comp"):
                assert getattr(s, key) == pytest.approx(
                    rows[s.id][key], abs=1e-9), f"{s.id}.{key}"
        report("criterion 6: 4-sample corpus matches hand table to 1e-9, "
               "byte-identical reports")


class TestCriterion7Curriculum:
    def test_over_100_random_corpora(self):
        rng = np.random.default_rng(5)
        for trial in range(100):
            n_a = int(rng.integers(1, 30))
            n_r = int(rng.integers(1, 30))
            accept = [f"a{i}" for i in range(n_a)]
            reject = [f"r{i}" for i in range(n_r)]
            seed = int(rng.integers(0, 2**31))
            s = build_schedule(accept, reject, seed=seed)
            assert len(s.stages[0].epochs) == 3
            assert len(s.stages[1].epochs) == 5
            for epoch in s.stages[0].epochs:
                assert sorted(epoch) == sorted(accept)
            for epoch in s.stages[1].epochs:
                assert sorted(epoch) == sorted(reject)
            again = build_schedule(accept, reject, seed=seed)
            assert s.to_json() == again.to_json()
        report("criterion 7: 3+5 epoch schedule, stage purity, permutation "
               "property, seed determinism over 100 corpora")


class TestCriterion8Resampler:
    def test_shapes_rowsums_gradients(self):
        config = rc.ResamplerConfig(n_queries=64, d_in=12, d_model=16,
                                    n_heads=2, d_llm=10, seed=0)
        params = rc.init_resampler(config)
        for dims in [(1, 1, 1), (2, 2, 2), (4, 4, 4), (8, 8, 8)]:
            grid = rc.synthetic_grid(dims, 12, seed=1)
            assert rc.resample(params, grid).shape == (64, 10)
            attn = rc.attention_weights(params, grid, per_head=True)
            np.testing.assert_allclose(attn.sum(axis=-1), 1.0, atol=1e-6)

        toy = rc.ResamplerConfig(n_queries=4, d_in=6, d_model=8,
                                 n_heads=2, d_llm=5, seed=0)
        toy_params = rc.init_resampler(toy)
        grid = rc.synthetic_grid((2, 2, 2), 6, seed=2)
        err = rc.gradient_check(toy_params, grid, targets=np.array([0]))
        assert err < 1e-4
        report("criterion 8: 64-query shape contract for 1/8/64/512 tokens, "
               f"row sums within 1e-6, gradient max rel error {err:.2e} < 1e-4")


class TestCriterion9DeskScaleScope:
    def test_documented_substitution(self):
        # the published corpus results need the private dataset and GPU
        # training; criteria 1-8 are the acceptance basis and the README
        # must say so
        readme = Path(__file__).resolve().parents[1] / "README.md"
        text = readme.read_text(encoding="utf-8").lower()
        assert "not reproducible" in text or "cannot be reproduced" in text
        report("criterion 9: desk-scale substitution documented in README")
