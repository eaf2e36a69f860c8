import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keysched import errors, refops


def rand(shape, seed):
    return np.random.default_rng(seed).standard_normal(shape)


class TestAttention:
    def test_single_key_copies_value_row(self):
        q = rand((4, 3), 0)
        k = rand((1, 3), 1)
        v = np.array([[2.0, -1.0]])
        out = refops.attention(q, k, v)
        assert np.allclose(out, np.tile(v, (4, 1)))

    def test_zero_query_gives_column_mean(self):
        q = np.zeros((3, 2))
        v = rand((5, 4), 2)
        out = refops.attention(q, rand((5, 2), 3), v)
        assert np.allclose(out, np.tile(v.mean(axis=0), (3, 1)))

    def test_saturated_softmax_selects_rows(self):
        q = np.eye(3)
        k = 100.0 * np.eye(3)
        v = np.eye(3)
        out = refops.attention(q, k, v)
        assert np.allclose(out, np.eye(3), atol=1e-8)

    def test_rows_are_convex_combinations(self):
        q, k = rand((6, 4), 4), rand((5, 4), 5)
        v = rand((5, 3), 6)
        out = refops.attention(q, k, v)
        lo, hi = v.min(axis=0), v.max(axis=0)
        assert np.all(out >= lo - 1e-12) and np.all(out <= hi + 1e-12)

    def test_weights_rows_sum_to_one(self):
        w = refops.attention_weights(rand((7, 3), 7), rand((9, 3), 8))
        assert np.all(np.abs(w.sum(axis=1) - 1.0) <= 1e-12)

    def test_logit_shift_invariance(self):
        q = rand((4, 3), 9)
        k = rand((5, 3), 10)
        v = rand((5, 2), 11)
        # shifting every logit in a row by a constant: add a constant
        # column to q and a matching ones column to k
        q_shift = np.hstack([q, np.full((4, 1), 3.7)])
        k_shift = np.hstack([k, np.ones((5, 1))])
        scale = np.sqrt(4 / 3)  # undo the 1/sqrt(d) change from d=3 to d=4
        out = refops.attention(q, k, v)
        out_shift = refops.attention(q_shift * scale, k_shift, v)
        assert np.allclose(out, out_shift, atol=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(errors.ShapeMismatchError):
            refops.attention(np.zeros((2, 3)), np.zeros((2, 4)), np.zeros((2, 2)))
        with pytest.raises(errors.ShapeMismatchError):
            refops.attention(np.zeros((2, 3)), np.zeros((2, 3)), np.zeros((3, 2)))


class TestFuseFeatures:
    def test_gates_off_equals_text_attention(self):
        f_in = rand((4, 3), 12)
        w_q = rand((3, 3), 13)
        text = (rand((5, 3), 14), rand((5, 2), 15))
        audio = (rand((6, 3), 16), rand((6, 2), 17))
        image = (rand((7, 3), 18), rand((7, 2), 19))
        out = refops.fuse_features(f_in, w_q, text, audio, image,
                                   refops.FusionWeights(audio=0.0, image=0.0))
        assert np.allclose(out, refops.attention(f_in @ w_q, *text))

    def test_identical_kv_sets_triple_the_output(self):
        f_in = rand((4, 3), 20)
        w_q = rand((3, 3), 21)
        kv = (rand((5, 3), 22), rand((5, 2), 23))
        out = refops.fuse_features(f_in, w_q, kv, kv, kv,
                                   refops.FusionWeights(audio=1.0, image=1.0))
        assert np.allclose(out, 3.0 * refops.attention(f_in @ w_q, *kv))

    def test_two_by_two_hand_case(self):
        w_q = np.eye(2)
        text = (np.array([[1.0, 0.0]]), np.array([[5.0, 0.0]]))
        audio = (np.array([[0.0, 3.0]]), np.array([[0.0, 3.0]]))
        image = (np.array([[1.0, 1.0]]), np.array([[0.0, 0.0]]))
        out = refops.fuse_features(np.eye(2), w_q, text, audio, image,
                                   refops.FusionWeights(audio=0.5, image=0.0))
        assert np.allclose(out, [[5.0, 1.5], [5.0, 1.5]])

    def test_linear_in_gates(self):
        f_in = rand((3, 3), 24)
        w_q = rand((3, 3), 25)
        text = (rand((4, 3), 26), rand((4, 2), 27))
        audio = (rand((4, 3), 28), rand((4, 2), 29))
        image = (rand((4, 3), 30), rand((4, 2), 31))

        def fused(a, i):
            return refops.fuse_features(f_in, w_q, text, audio, image,
                                        refops.FusionWeights(audio=a, image=i))

        base = fused(0.0, 0.0)
        da = fused(1.0, 0.0) - base
        di = fused(0.0, 1.0) - base
        assert np.allclose(fused(2.5, -1.5), base + 2.5 * da - 1.5 * di, atol=1e-10)


class TestCfgCombine:
    def test_hand_scalar_case(self):
        tiers = [np.array([[float(v)]]) for v in (0, 1, 3, 4)]
        out = refops.cfg_combine(*tiers, refops.GuidanceScales(2.0, 1.0, 7.5))
        assert out[0, 0] == 11.5

    def test_unit_scales_telescope_to_full(self):
        tiers = [rand((3, 4), s) for s in range(40, 44)]
        out = refops.cfg_combine(*tiers, refops.GuidanceScales(1.0, 1.0, 1.0))
        assert np.max(np.abs(out - tiers[3])) <= 1e-12

    def test_zero_scales_collapse_to_none(self):
        tiers = [rand((3, 4), s) for s in range(44, 48)]
        out = refops.cfg_combine(*tiers, refops.GuidanceScales(0.0, 0.0, 0.0))
        assert np.array_equal(out, tiers[0])

    def test_affine_in_audio_scale(self):
        # dyadic entries keep float64 arithmetic exact, so the slope can be
        # compared bitwise
        rng = np.random.default_rng(50)
        tiers = [rng.integers(-8, 9, (4, 5)) / 4.0 for _ in range(4)]
        for s_aud in (0.0, 1.0, 2.5):
            lo = refops.cfg_combine(*tiers, refops.GuidanceScales(1.5, 0.5, s_aud))
            hi = refops.cfg_combine(*tiers, refops.GuidanceScales(1.5, 0.5, s_aud + 1.0))
            assert np.array_equal(hi - lo, tiers[3] - tiers[2])

    def test_default_scales_match_pipeline_configuration(self):
        scales = refops.GuidanceScales()
        assert (scales.image, scales.text, scales.audio) == (2.0, 1.0, 7.5)

    def test_shape_mismatch(self):
        with pytest.raises(errors.ShapeMismatchError):
            refops.cfg_combine(np.zeros((2, 2)), np.zeros((2, 2)),
                               np.zeros((2, 2)), np.zeros((3, 2)))

    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_telescoping_property(self, data):
        rows = data.draw(st.integers(min_value=1, max_value=4))
        cols = data.draw(st.integers(min_value=1, max_value=4))
        flat = st.floats(min_value=-10, max_value=10, allow_nan=False)
        tiers = [
            np.array(data.draw(st.lists(flat, min_size=rows * cols,
                                        max_size=rows * cols))).reshape(rows, cols)
            for _ in range(4)
        ]
        unit = refops.cfg_combine(*tiers, refops.GuidanceScales(1.0, 1.0, 1.0))
        assert np.max(np.abs(unit - tiers[3])) <= 1e-12
