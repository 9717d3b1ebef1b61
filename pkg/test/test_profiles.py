#!/usr/bin/env python3

import unittest

import numpy as np

from rrbtrace.errors import ConfigurationError
from rrbtrace.profiles import (
    PROFILE_CATALOGUE,
    AppProfile,
    DirectionParams,
    Shape,
    arrival_series,
    catalogue_profile,
    generate_arrivals,
)
from rrbtrace.radio import Direction, standard_qos
from test.test_utils import profile


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


class TestGenerateArrivals(unittest.TestCase):

    def test_linear_noiseless_constant(self) -> None:
        flat = profile(ul=500, dl=500)
        generator = rng()
        for subframe in (0, 1, 17, 4000):
            self.assertEqual(generate_arrivals(flat, Direction.UPLINK, subframe, generator), 500)

    def test_sinusoid_peak(self) -> None:
        wave = profile(shape=Shape.SINUSOIDAL, ul=1000, dl=1000, amplitude=1000, period=4)
        self.assertEqual(generate_arrivals(wave, Direction.DOWNLINK, 1, rng()), 2000)

    def test_sinusoid_trough_clamped_at_zero(self) -> None:
        wave = profile(shape=Shape.SINUSOIDAL, ul=1000, dl=1000, amplitude=1000, period=4)
        self.assertEqual(generate_arrivals(wave, Direction.DOWNLINK, 3, rng()), 0)

    def test_never_negative(self) -> None:
        noisy = profile(ul=10, dl=10, noise=500)
        generator = rng(3)
        values = [generate_arrivals(noisy, Direction.UPLINK, s, generator) for s in range(500)]
        self.assertGreaterEqual(min(values), 0)
        self.assertIn(0, values)

    def test_convex_peaks_mid_period(self) -> None:
        arc = profile(shape=Shape.CONVEX, ul=100, dl=100, amplitude=1000, period=100)
        values = [generate_arrivals(arc, Direction.UPLINK, s, rng()) for s in range(100)]
        self.assertEqual(values[0], 100)
        self.assertEqual(values[50], 1100)
        self.assertEqual(max(values), 1100)

    def test_bursty_decay_halves_per_period(self) -> None:
        decay = profile(shape=Shape.BURSTY_DECAY, ul=0, dl=0, amplitude=1024, period=10)
        self.assertEqual(generate_arrivals(decay, Direction.UPLINK, 0, rng()), 1024)
        self.assertEqual(generate_arrivals(decay, Direction.UPLINK, 10, rng()), 512)
        self.assertEqual(generate_arrivals(decay, Direction.UPLINK, 30, rng()), 128)

    def test_bursts_fire_with_certainty(self) -> None:
        params = DirectionParams(base_rate=0, period=10, burst_probability=1.0, burst_bytes=700)
        bursty = AppProfile("b", Shape.BURSTY_DECAY, params, params, standard_qos(9))
        self.assertEqual(generate_arrivals(bursty, Direction.UPLINK, 5, rng()), 700)

    def test_same_stream_is_deterministic(self) -> None:
        noisy = catalogue_profile("amazon")
        first = [generate_arrivals(noisy, Direction.DOWNLINK, s, rng(9)) for s in range(50)]
        second = [generate_arrivals(noisy, Direction.DOWNLINK, s, rng(9)) for s in range(50)]
        self.assertEqual(first, second)

    def test_every_shape_consumes_two_draws(self) -> None:
        for shape in Shape:
            generator = rng(1)
            generate_arrivals(profile(shape=shape, period=10), Direction.UPLINK, 0, generator)
            reference = rng(1)
            reference.normal()
            reference.random()
            self.assertEqual(generator.random(), reference.random())

    def test_negative_subframe(self) -> None:
        with self.assertRaises(ConfigurationError):
            generate_arrivals(profile(), Direction.UPLINK, -1, rng())


class TestArrivalSeries(unittest.TestCase):

    def test_matches_per_subframe_values_without_noise(self) -> None:
        for shape in Shape:
            shaped = profile(shape=shape, ul=300, dl=300, amplitude=200, period=40)
            series = arrival_series(shaped, Direction.UPLINK, 5, 120, rng())
            expected = [generate_arrivals(shaped, Direction.UPLINK, s, rng()) for s in range(5, 125)]
            self.assertEqual(series.tolist(), expected, shape)

    def test_consumes_one_normal_and_one_uniform_per_subframe(self) -> None:
        generator = rng(4)
        arrival_series(catalogue_profile("netflix"), Direction.DOWNLINK, 0, 250, generator)
        reference = rng(4)
        reference.normal(size=250)
        reference.random(size=250)
        self.assertEqual(generator.random(), reference.random())

    def test_whole_session_is_deterministic(self) -> None:
        noisy = catalogue_profile("etsy")
        first = arrival_series(noisy, Direction.DOWNLINK, 0, 4000, rng(9))
        second = arrival_series(noisy, Direction.DOWNLINK, 0, 4000, rng(9))
        self.assertEqual(first.dtype, np.int64)
        self.assertTrue(np.array_equal(first, second))
        self.assertGreaterEqual(int(first.min()), 0)

    def test_empty_and_negative_counts(self) -> None:
        self.assertEqual(len(arrival_series(profile(), Direction.UPLINK, 0, 0, rng())), 0)
        with self.assertRaises(ConfigurationError):
            arrival_series(profile(), Direction.UPLINK, 0, -1, rng())


class TestProfileValidation(unittest.TestCase):

    def test_sinusoid_needs_period_two(self) -> None:
        with self.assertRaises(ConfigurationError):
            profile(shape=Shape.SINUSOIDAL, period=1)

    def test_gbr_needs_persistent_rbs(self) -> None:
        with self.assertRaises(ConfigurationError):
            profile(qci=1)

    def test_negative_base_rate(self) -> None:
        with self.assertRaises(ConfigurationError):
            DirectionParams(base_rate=-1)

    def test_scaled_keeps_shape_parameters(self) -> None:
        original = catalogue_profile("netflix")
        scaled = original.scaled(2.0)
        self.assertEqual(scaled.downlink.base_rate, 2 * original.downlink.base_rate)
        self.assertEqual(scaled.downlink.period, original.downlink.period)
        self.assertEqual(scaled.qos, original.qos)


class TestCatalogue(unittest.TestCase):

    def test_twenty_two_classes(self) -> None:
        self.assertEqual(len(PROFILE_CATALOGUE), 22)

    def test_family_shapes(self) -> None:
        shapes = [p.shape for p in PROFILE_CATALOGUE.values()]
        self.assertEqual(shapes.count(Shape.BURSTY_DECAY), 4)
        self.assertEqual(shapes.count(Shape.LINEAR), 9)
        self.assertEqual(shapes.count(Shape.SINUSOIDAL), 6)
        self.assertEqual(shapes.count(Shape.CONVEX), 3)

    def test_calls_are_gbr_and_others_are_not(self) -> None:
        for p in PROFILE_CATALOGUE.values():
            self.assertEqual(p.qos.is_gbr, p.shape is Shape.LINEAR, p.class_label)

    def test_caller_uploads_more_than_it_downloads(self) -> None:
        for label, p in PROFILE_CATALOGUE.items():
            if p.shape is not Shape.LINEAR:
                continue
            if label == "zoom_video_callee":
                self.assertGreater(p.downlink.persistent_rbs, p.uplink.persistent_rbs)
            else:
                self.assertGreater(p.uplink.persistent_rbs, p.downlink.persistent_rbs)

    def test_browsing_and_streaming_download_more(self) -> None:
        for p in PROFILE_CATALOGUE.values():
            if p.shape is not Shape.LINEAR:
                self.assertGreater(p.downlink.base_rate, p.uplink.base_rate, p.class_label)

    def test_orderings(self) -> None:
        dl = {label: p.downlink.base_rate for label, p in PROFILE_CATALOGUE.items()}
        self.assertEqual(max(("amazon", "ebay", "etsy", "target"), key=dl.__getitem__), "amazon")
        ott_peak = {label: dl[label] + PROFILE_CATALOGUE[label].downlink.amplitude
                    for label in ("apple_tv", "prime_video", "netflix")}
        self.assertEqual(max(ott_peak, key=ott_peak.__getitem__), "apple_tv")
        for kind in ("live", "nonlive"):
            self.assertLess(dl[f"youtube_{kind}_sd"], dl[f"youtube_{kind}_hd"])
            self.assertLess(dl[f"youtube_{kind}_hd"], dl[f"youtube_{kind}_fhd"])
        for quality in ("sd", "hd", "fhd"):
            self.assertGreater(dl[f"youtube_nonlive_{quality}"], dl[f"youtube_live_{quality}"])

    def test_unknown_label(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            catalogue_profile("myspace")
        self.assertEqual(cm.exception.context, "profile")


if __name__ == '__main__':
    unittest.main()
