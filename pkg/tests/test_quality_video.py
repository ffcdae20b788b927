import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hicurate import quality_video as qv
from hicurate.errors import CurationError


class TestMotionMagnitude:
    def test_identical_frames(self):
        f = np.full((4, 4), 7, dtype=np.uint8)
        assert qv.motion_magnitude([f, f]) == 0.0

    def test_uniform_step(self):
        a = np.zeros((4, 4), dtype=np.uint8)
        b = np.full((4, 4), 10, dtype=np.uint8)
        assert qv.motion_magnitude([a, b]) == 10.0

    def test_three_levels(self):
        frames = [np.full((3, 3), lv, dtype=np.uint8) for lv in (0, 10, 30)]
        assert qv.motion_magnitude(frames) == 15.0

    def test_uint8_no_wraparound(self):
        a = np.zeros((2, 2), dtype=np.uint8)
        b = np.full((2, 2), 255, dtype=np.uint8)
        assert qv.motion_magnitude([b, a]) == 255.0

    def test_too_few_frames(self):
        with pytest.raises(CurationError):
            qv.motion_magnitude([np.zeros((2, 2))])

    def test_dimension_mismatch(self):
        with pytest.raises(CurationError):
            qv.motion_magnitude([np.zeros((2, 2)), np.zeros((3, 3))])

    def test_reversal_invariance(self):
        rng = np.random.default_rng(0)
        frames = [rng.integers(0, 256, (5, 5), dtype=np.uint8) for _ in range(6)]
        assert qv.motion_magnitude(frames) == qv.motion_magnitude(frames[::-1])

    def test_scale_linearity(self):
        rng = np.random.default_rng(1)
        frames = [rng.uniform(0, 1, (4, 4)) for _ in range(4)]
        base = qv.motion_magnitude(frames)
        scaled = qv.motion_magnitude([3.0 * f for f in frames])
        assert scaled == pytest.approx(3.0 * base, rel=1e-12)


class TestVideoScore:
    def test_zero_motion(self):
        assert qv.video_score(0.0, 5.0) == 0.0

    def test_clamp(self):
        assert qv.video_score(10.0, 5.0) == 1.0

    def test_ratio(self):
        assert qv.video_score(0.45 * 8.0, 8.0) == pytest.approx(0.45)

    def test_degenerate_corpus(self):
        with pytest.raises(CurationError):
            qv.video_score(1.0, 0.0)

    @given(st.floats(0, 100), st.floats(0, 100), st.floats(0.001, 50))
    @settings(max_examples=50)
    def test_monotone_and_bounded(self, m1, m2, m_max):
        lo, hi = sorted([m1, m2])
        assert 0.0 <= qv.video_score(lo, m_max) <= qv.video_score(hi, m_max) <= 1.0


class TestPercentile90:
    def test_one_to_ten(self):
        assert qv.percentile_90(list(range(1, 11))) == 9

    def test_single_value(self):
        assert qv.percentile_90([3.7]) == 3.7

    def test_all_equal(self):
        assert qv.percentile_90([2.0] * 5) == 2.0

    def test_empty(self):
        with pytest.raises(CurationError):
            qv.percentile_90([])

    def test_nearest_rank_property_exhaustive(self):
        rng = np.random.default_rng(9)
        for n in range(1, 21):
            values = rng.uniform(0, 1, n).tolist()
            p = qv.percentile_90(values)
            assert p in values
            assert sum(v <= p for v in values) >= math.ceil(0.9 * n)
            # minimality of the nearest rank
            assert sum(v < p for v in values) < math.ceil(0.9 * n)
