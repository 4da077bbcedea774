"""Scenario generation, baseline aggregators, and the comparison harness."""
from __future__ import annotations

import random

import pytest

from crowdmark import (
    AnnotatorProfile,
    DAY_MS,
    InvalidScenario,
    Label,
    ScenarioConfig,
    aggregate,
    baseline_majority_vote,
    baseline_nms,
    generate_scenario,
    histories_from_annotations,
    iou3d,
    run_comparison,
)

from catalog import region_tuple
from conftest import ann
from oracle import ref_nms

BLURRY = Label("predefined", "blurry")


def profile(uid="sim-user-000", **kw) -> AnnotatorProfile:
    return AnnotatorProfile(user_id=uid, **kw)


def perfect_profile(uid="sim-user-000") -> AnnotatorProfile:
    return AnnotatorProfile(
        user_id=uid, hit_rate=1.0, false_alarm_rate=0.0,
        confidence_mean=0.9, confidence_std=0.0,
        spatial_noise_sigma=0.0, temporal_noise_sigma=0.0,
        label_accuracy=1.0)


def small_config(**kw) -> ScenarioConfig:
    base = dict(
        seed=5, video_count=6, video_duration=20.0, fake_fraction=0.5,
        annotators=(profile("sim-user-000"), profile("sim-user-001")),
        steps=2, per_step_quota=6)
    base.update(kw)
    return ScenarioConfig(**base)


class TestProfileValidation:
    def test_probability_bounds(self):
        with pytest.raises(InvalidScenario):
            profile(hit_rate=1.2)
        with pytest.raises(InvalidScenario):
            profile(false_alarm_rate=-0.1)
        with pytest.raises(InvalidScenario):
            profile(label_accuracy=2.0)

    def test_sigma_bounds(self):
        with pytest.raises(InvalidScenario):
            profile(spatial_noise_sigma=-0.01)
        with pytest.raises(InvalidScenario):
            profile(confidence_std=-1.0)

    def test_empty_user_id(self):
        with pytest.raises(InvalidScenario):
            AnnotatorProfile(user_id="")

    def test_round_trip(self):
        p = profile(hit_rate=0.6, spatial_noise_sigma=0.02)
        assert AnnotatorProfile.from_dict(p.to_dict()) == p


class TestScenarioConfig:
    def test_validation(self):
        with pytest.raises(InvalidScenario):
            small_config(video_count=0)
        with pytest.raises(InvalidScenario):
            small_config(fake_fraction=1.5)
        with pytest.raises(InvalidScenario):
            small_config(annotators=())
        with pytest.raises(InvalidScenario):
            small_config(annotators=(profile("u"), profile("u")))
        with pytest.raises(InvalidScenario):
            small_config(steps=0)

    def test_from_dict_explicit_annotators(self):
        cfg = ScenarioConfig.from_dict({
            "seed": 3,
            "video_count": 4,
            "annotators": [profile("a").to_dict(), profile("b").to_dict()],
        })
        assert [p.user_id for p in cfg.annotators] == ["a", "b"]
        assert cfg.seed == 3

    def test_from_dict_template_annotators(self):
        cfg = ScenarioConfig.from_dict({
            "annotators": {"count": 3, "profile": {"hit_rate": 0.7}},
        })
        assert [p.user_id for p in cfg.annotators] \
            == ["sim-user-000", "sim-user-001", "sim-user-002"]
        assert all(p.hit_rate == 0.7 for p in cfg.annotators)

    def test_round_trip(self):
        cfg = small_config()
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg


class TestGenerateScenario:
    def test_deterministic_under_seed(self):
        a = generate_scenario(small_config())
        b = generate_scenario(small_config())
        assert [v.to_dict() for v in a.videos] == [v.to_dict() for v in b.videos]
        assert [x.to_record() for x in a.all_annotations] \
            == [x.to_record() for x in b.all_annotations]

    def test_different_seeds_differ(self):
        a = generate_scenario(small_config(seed=1))
        b = generate_scenario(small_config(seed=2))
        assert [x.to_record() for x in a.all_annotations] \
            != [x.to_record() for x in b.all_annotations]

    def test_video_shape(self):
        s = generate_scenario(small_config())
        assert [v.video_id for v in s.videos] \
            == [f"v{i:03d}" for i in range(6)]
        fakes = [v for v in s.videos if v.ground_truth.is_fake]
        assert len(fakes) == 3
        # Fake videos carry planted artifacts; real ones carry none.
        for v in s.videos:
            if v.ground_truth.is_fake:
                assert len(v.ground_truth.artifacts) == 1
            else:
                assert v.ground_truth.artifacts == ()

    def test_stream_is_validated_and_ordered(self):
        s = generate_scenario(small_config())
        assert len(s.steps) == 2
        stream = s.all_annotations
        assert len({a.id for a in stream}) == len(stream)
        times = [a.submitted_at for a in stream]
        assert times == sorted(times)
        video_ids = {v.video_id for v in s.videos}
        for i, a in enumerate(stream):
            assert a.video_id in video_ids
            assert 0.0 <= a.confidence <= 1.0
            a.region.validate()
            assert a.region.t_end <= 20.0
        for step_index, step in enumerate(s.steps):
            for a in step:
                assert a.submitted_at // DAY_MS == step_index

    def test_perfect_profiles_reproduce_planted_box(self):
        cfg = small_config(
            annotators=(perfect_profile("sim-user-000"),
                        perfect_profile("sim-user-001")))
        s = generate_scenario(cfg)
        planted = {v.video_id: v.ground_truth.artifacts[0]
                   for v in s.videos if v.ground_truth.is_fake}
        fake_ids = set(planted)
        assert all(a.video_id in fake_ids for a in s.all_annotations)
        # Both annotators view all six videos on both steps.
        assert len(s.all_annotations) == 2 * 2 * 3
        for a in s.all_annotations:
            artifact = planted[a.video_id]
            assert a.region == artifact.region
            assert a.label == artifact.label
            assert a.confidence == pytest.approx(0.9)

    def test_false_alarm_rate_zero_means_silent_real_videos(self):
        s = generate_scenario(small_config(
            annotators=(profile("sim-user-000", false_alarm_rate=0.0),)))
        real_ids = {v.video_id for v in s.videos if not v.ground_truth.is_fake}
        assert all(a.video_id not in real_ids for a in s.all_annotations)

    def test_explicit_planted_artifacts(self):
        art = {"region": {"x1": 0.1, "y1": 0.1, "x2": 0.3, "y2": 0.3,
                          "t_start": 1.0, "t_end": 5.0},
               "label": {"kind": "predefined", "value": "melting"}}
        s = generate_scenario(small_config(planted={0: [art]}))
        gt = s.videos[0].ground_truth
        assert region_tuple(gt.artifacts[0].region) \
            == (0.1, 0.1, 0.3, 0.3, 1.0, 5.0)
        assert gt.artifacts[0].label.value == "melting"

    def test_planted_region_beyond_duration_rejected(self):
        art = {"region": {"x1": 0.1, "y1": 0.1, "x2": 0.3, "y2": 0.3,
                          "t_start": 1.0, "t_end": 25.0},
               "label": {"kind": "predefined", "value": "melting"}}
        with pytest.raises(InvalidScenario):
            generate_scenario(small_config(video_duration=20.0,
                                           planted={0: [art]}))

    def test_noise_decay_shrinks_spatial_scatter(self):
        cfg = small_config(
            video_count=2, fake_fraction=0.5, steps=6, per_step_quota=2,
            annotators=tuple(
                profile(f"sim-user-{i:03d}", hit_rate=1.0,
                        false_alarm_rate=0.0, spatial_noise_sigma=0.08)
                for i in range(8)),
            noise_decay=0.5)
        s = generate_scenario(cfg)
        planted = s.videos[0].ground_truth.artifacts[0].region
        first = [a for a in s.steps[0] if a.video_id == "v000"]
        last = [a for a in s.steps[-1] if a.video_id == "v000"]

        def scatter(anns):
            return sum(abs(a.region.x1 - planted.x1)
                       + abs(a.region.x2 - planted.x2)
                       for a in anns) / len(anns)

        assert scatter(last) < scatter(first)


class TestNms:
    def test_higher_confidence_survives_verbatim(self):
        hi = ann("hi", (0.1, 0.1, 0.5, 0.5, 0.0, 4.0), BLURRY, 0.9, when=1)
        lo = ann("lo", (0.12, 0.1, 0.52, 0.5, 0.0, 4.0), BLURRY, 0.5, when=2)
        out = baseline_nms([lo, hi])
        assert out == [hi]
        assert out[0] is hi  # the box itself, not a recomputed one

    def test_disjoint_both_survive(self):
        a = ann("a", (0.0, 0.0, 0.2, 0.2, 0.0, 2.0), BLURRY, 0.9, when=1)
        b = ann("b", (0.7, 0.7, 0.9, 0.9, 0.0, 2.0), BLURRY, 0.5, when=2)
        assert baseline_nms([a, b]) == [a, b]

    def test_chain_keeps_first_and_third(self):
        box_a = (0.00, 0.0, 0.40, 0.4, 0.0, 4.0)
        box_b = (0.15, 0.0, 0.55, 0.4, 0.0, 4.0)
        box_c = (0.30, 0.0, 0.70, 0.4, 0.0, 4.0)
        a = ann("a", box_a, BLURRY, 0.9, when=1)
        b = ann("b", box_b, BLURRY, 0.8, when=2)
        c = ann("c", box_c, BLURRY, 0.7, when=3)
        assert iou3d(a.region, b.region) >= 0.40
        assert iou3d(b.region, c.region) >= 0.40
        assert iou3d(a.region, c.region) < 0.40
        assert [x.id for x in baseline_nms([a, b, c])] == ["a", "c"]

    def test_survivors_are_input_subset(self):
        rng = random.Random(83)
        for _ in range(30):
            anns = [ann(f"a{i}", _random_box(rng), BLURRY, rng.random(),
                        when=i)
                    for i in range(rng.randint(0, 10))]
            out = baseline_nms(anns)
            ids = {a.id for a in anns}
            assert all(s.id in ids for s in out)
            assert all(s in anns for s in out)
            assert len({s.id for s in out}) == len(out)

    def test_matches_reference(self):
        rng = random.Random(89)
        for _ in range(50):
            anns = [ann(f"a{i}", _random_box(rng), BLURRY, rng.random(),
                        when=i)
                    for i in range(rng.randint(1, 9))]
            got = [a.id for a in baseline_nms(anns)]
            want = ref_nms([(a.id, region_tuple(a.region), a.confidence,
                             a.submitted_at) for a in anns])
            assert got == want


class TestMajorityVote:
    def test_unweighted_average(self):
        a = ann("a", (0.0, 0.0, 0.4, 0.4, 0.0, 4.0), BLURRY, 0.99, when=1)
        b = ann("b", (0.1, 0.0, 0.5, 0.4, 0.0, 4.0), BLURRY, 0.01, when=2)
        out = baseline_majority_vote([a, b])
        assert len(out) == 1
        # Confidence plays no role: plain midpoint.
        assert out[0].region.x1 == pytest.approx(0.05)
        assert out[0].mean_confidence == pytest.approx(0.5)

    def test_arrival_order_not_confidence_order(self):
        late_hi = ann("hi", (0.0, 0.0, 0.4, 0.4, 0.0, 4.0), BLURRY, 0.9, when=5)
        early_lo = ann("lo", (0.5, 0.5, 0.9, 0.9, 0.0, 4.0), BLURRY, 0.1, when=1)
        out = baseline_majority_vote([late_hi, early_lo])
        assert [r.members[0].id for r in out] == ["lo", "hi"]

    def test_top_label_by_count(self):
        box = (0.0, 0.0, 0.4, 0.4, 0.0, 4.0)
        anns = [
            ann("a", box, BLURRY, 0.5, when=1),
            ann("b", box, BLURRY, 0.5, when=2),
            ann("c", box, Label("predefined", "mismatch"), 0.9, when=3),
        ]
        out = baseline_majority_vote(anns)
        assert out[0].top_label == BLURRY

    def test_merged_region_not_an_input_box(self):
        a = ann("a", (0.0, 0.0, 0.4, 0.4, 0.0, 4.0), BLURRY, 0.9, when=1)
        b = ann("b", (0.1, 0.0, 0.5, 0.4, 0.0, 4.0), BLURRY, 0.7, when=2)
        merged = aggregate([a, b], {}).regions[0].region
        assert merged not in (a.region, b.region)
        vote = baseline_majority_vote([a, b])[0].region
        assert vote not in (a.region, b.region)


class TestRunComparison:
    def test_perfect_annotators_reach_f1_one(self):
        cfg = small_config(
            annotators=(perfect_profile("sim-user-000"),
                        perfect_profile("sim-user-001")))
        report = run_comparison(generate_scenario(cfg))
        for name, m in report.methods.items():
            assert m.f1 == 1.0, name
            assert m.precision == 1.0 and m.recall == 1.0

    def test_zero_noise_regions_equal_planted_exactly(self):
        cfg = small_config(
            annotators=(perfect_profile("sim-user-000"),
                        perfect_profile("sim-user-001")))
        s = generate_scenario(cfg)
        histories = histories_from_annotations(s.all_annotations)
        planted = {v.video_id: v.ground_truth.artifacts[0].region
                   for v in s.videos if v.ground_truth.is_fake}
        for vid, expected in planted.items():
            anns = [a for a in s.all_annotations if a.video_id == vid]
            out = aggregate(anns, histories)
            assert len(out.regions) == 1
            assert out.regions[0].region == expected
        report = run_comparison(s)
        assert report.methods["confidence_weighted"].localization_iou == 1.0
        assert report.methods["nms_baseline"].localization_iou == 1.0

    def test_single_annotator_region_is_their_box(self):
        cfg = ScenarioConfig(
            seed=11, video_count=2, video_duration=20.0, fake_fraction=0.5,
            annotators=(profile("solo", hit_rate=1.0, false_alarm_rate=0.0,
                                spatial_noise_sigma=0.03),),
            steps=1, per_step_quota=2)
        s = generate_scenario(cfg)
        anns = s.all_annotations
        assert len(anns) == 1
        out = aggregate(anns, histories_from_annotations(anns))
        assert out.regions[0].region == anns[0].region

    def test_noisy_crowd_beats_mean_individual(self):
        cfg = ScenarioConfig(
            seed=7, video_count=8, video_duration=20.0, fake_fraction=0.5,
            annotators=tuple(
                profile(f"sim-user-{i:03d}", hit_rate=0.75,
                        false_alarm_rate=0.0, spatial_noise_sigma=0.05)
                for i in range(12)),
            steps=3, per_step_quota=8)
        report = run_comparison(generate_scenario(cfg))
        assert report.methods["confidence_weighted"].localization_iou \
            > report.methods["individual"].localization_iou

    def test_csv_shape(self):
        report = run_comparison(generate_scenario(small_config()))
        lines = report.to_csv().strip().split("\n")
        assert lines[0] == "method,localization_iou,precision,recall,f1"
        names = [line.split(",")[0] for line in lines[1:]]
        assert names == ["confidence_weighted", "nms_baseline",
                         "majority_vote", "individual"]


def _random_box(rng: random.Random) -> tuple:
    x1 = rng.uniform(0.0, 0.6)
    y1 = rng.uniform(0.0, 0.6)
    t0 = rng.uniform(0.0, 10.0)
    return (x1, y1, x1 + rng.uniform(0.1, 0.4), y1 + rng.uniform(0.1, 0.4),
            t0, t0 + rng.uniform(1.0, 6.0))
