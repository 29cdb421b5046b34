import numpy as np
import pytest

import qaq
from qaq.errors import DimensionError, DomainError


class TestInterpolateSample:
    def test_endpoints(self):
        rng = np.random.default_rng(0)
        real = rng.uniform(0, 255, (8, 8))
        fake = rng.uniform(0, 255, (8, 8))
        assert np.array_equal(qaq.interpolate_sample(real, fake, 1.0), real)
        assert np.array_equal(qaq.interpolate_sample(real, fake, 0.0), fake)

    def test_midpoint_of_constants(self):
        real = np.zeros((4, 4))
        fake = np.full((4, 4), 255.0)
        mid = qaq.interpolate_sample(real, fake, 0.5)
        assert np.all(mid == 127.5)

    def test_values_stay_between_sources(self):
        rng = np.random.default_rng(1)
        real = rng.uniform(0, 255, (16, 16))
        fake = rng.uniform(0, 255, (16, 16))
        for eps in (0.25, 0.5, 0.9):
            mix = qaq.interpolate_sample(real, fake, eps)
            lo = np.minimum(real, fake)
            hi = np.maximum(real, fake)
            assert np.all(mix >= lo - 1e-12) and np.all(mix <= hi + 1e-12)

    def test_epsilon_out_of_range(self):
        imgs = np.zeros((2, 4, 4))
        for eps in (-0.1, 1.1, np.nan):
            with pytest.raises(DomainError):
                qaq.interpolate_sample(imgs[0], imgs[1], eps)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            qaq.interpolate_sample(np.zeros((4, 4)), np.zeros((4, 5)), 0.5)


class TestOneGpPenalty:
    def test_exact_unit_norm_is_zero(self):
        field = np.zeros((8, 8))
        field[3, 3] = 1.0
        assert qaq.one_gp_penalty(field) == 0.0

    def test_zero_field_is_one(self):
        assert qaq.one_gp_penalty(np.zeros((5, 5))) == 1.0

    def test_single_entry_three_is_four(self):
        assert qaq.one_gp_penalty(np.array([[3.0]])) == 4.0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        field = rng.normal(0, 1, (6, 7))
        flat = field.ravel().copy()
        rng.shuffle(flat)
        assert qaq.one_gp_penalty(field) == pytest.approx(
            qaq.one_gp_penalty(flat.reshape(7, 6)), rel=1e-12
        )

    def test_normalized_random_field_near_zero(self):
        rng = np.random.default_rng(3)
        field = rng.normal(0, 1, (16, 16))
        field /= np.linalg.norm(field)
        assert qaq.one_gp_penalty(field) < 1e-28

    def test_empty_field_rejected(self):
        with pytest.raises(DimensionError):
            qaq.one_gp_penalty(np.zeros((0,)))


class TestNiqeGpPenalty:
    def test_equals_model_distance_definitionally(
        self, photo_corpus, acc_config, pristine_gradient_model
    ):
        g = qaq.spatial_gradient(photo_corpus[3][1])
        pen = qaq.niqe_gp_penalty(g, pristine_gradient_model)
        feats = qaq.patch_features(g, acc_config)
        direct = qaq.niqe_distance(
            pristine_gradient_model,
            qaq.fit_mvg(feats, meta=pristine_gradient_model.meta),
        )
        assert pen == pytest.approx(direct, abs=1e-12)

    def test_pristine_gradient_below_loo_median(
        self, photo_corpus, acc_config, pristine_gradient_model
    ):
        gfeats = [
            qaq.patch_features(qaq.spatial_gradient(img), acc_config)
            for _, img in photo_corpus
        ]
        loo = []
        for i, (_, img) in enumerate(photo_corpus):
            others = np.vstack([f for j, f in enumerate(gfeats) if j != i])
            model = qaq.fit_mvg(
                others, meta=qaq.meta_from_config(acc_config, True, others.shape[0])
            )
            loo.append(qaq.niqe_gp_penalty(qaq.spatial_gradient(img), model))
        in_model = qaq.niqe_gp_penalty(
            qaq.spatial_gradient(photo_corpus[0][1]), pristine_gradient_model
        )
        assert in_model < float(np.median(loo))

    @pytest.mark.parametrize("name", ["camera", "grass", "moon"])
    def test_heavy_noise_raises_penalty(self, photo_corpus, pristine_gradient_model, name):
        img = dict(photo_corpus)[name]
        g = qaq.spatial_gradient(img)
        clean = qaq.niqe_gp_penalty(g, pristine_gradient_model)
        rng = np.random.default_rng(11)
        corrupted = np.clip(g + rng.normal(0.0, 40.0, g.shape), 0.0, None)
        assert qaq.niqe_gp_penalty(corrupted, pristine_gradient_model) > clean

    def test_constant_field_propagates_error(self, pristine_gradient_model):
        with pytest.raises(qaq.PatchSelectionError):
            qaq.niqe_gp_penalty(np.full((192, 192), 1.0), pristine_gradient_model)


class TestDiscriminatorLossTerms:
    def test_zero_weights_pass_gap_through(self):
        w = qaq.PenaltyWeights(lambda1=0.0, lambda2=0.0)
        assert qaq.discriminator_loss_terms(2.25, 100.0, 50.0, w) == 2.25

    def test_default_weights_hand_value(self):
        # gap=2, gp=0.5, quality=3 at the default (1, 0.1) weights.
        got = qaq.discriminator_loss_terms(2.0, 0.5, 3.0)
        assert got == 2.0 + 1.0 * 0.5 + 0.1 * 3.0

    def test_defaults_are_one_and_tenth(self):
        w = qaq.PenaltyWeights()
        assert (w.lambda1, w.lambda2) == (1.0, 0.1)

    def test_linear_in_each_term(self):
        w = qaq.PenaltyWeights(lambda1=2.0, lambda2=0.5)
        base = qaq.discriminator_loss_terms(1.0, 1.0, 1.0, w)
        bumped_gp = qaq.discriminator_loss_terms(1.0, 2.0, 1.0, w)
        bumped_quality = qaq.discriminator_loss_terms(1.0, 1.0, 3.0, w)
        assert bumped_gp - base == pytest.approx(2.0, abs=1e-12)
        assert bumped_quality - base == pytest.approx(1.0, abs=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            qaq.discriminator_loss_terms(np.inf, 0.0, 0.0)
        with pytest.raises(DomainError):
            qaq.discriminator_loss_terms(0.0, np.nan, 0.0)

    def test_negative_weights_rejected(self):
        with pytest.raises(DomainError):
            qaq.PenaltyWeights(lambda1=-1.0)
