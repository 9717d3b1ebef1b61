#!/usr/bin/env python3

import unittest

import numpy as np

from rrbtrace.errors import ConfigurationError, LogIntegrityError, NotFoundError
from rrbtrace.pipeline import pearson_correlation
from rrbtrace.profiles import Shape
from rrbtrace.radio import DIRECTIONS, CellConfig, Direction, UeIdentity
from rrbtrace.simulator import DciLog, RarEvent, SimConfig, UeSpec, run_simulation
from rrbtrace.sniffer import (
    identify_victims,
    read_trace_csv,
    reconstruct_throughput,
    sniff_all,
    write_trace_csv,
)
from test.test_utils import dci_log, grant, profile, random_sim_config, temp_dir

DL = Direction.DOWNLINK
UL = Direction.UPLINK


class TestIdentifyVictims(unittest.TestCase):

    def test_rar_order_preserved(self) -> None:
        log = dci_log([], [17, 42])
        self.assertEqual(identify_victims(log), [UeIdentity(17), UeIdentity(42)])

    def test_empty_log(self) -> None:
        self.assertEqual(identify_victims(DciLog((), ())), [])

    def test_duplicates_removed(self) -> None:
        log = DciLog((RarEvent(0, UeIdentity(42)), RarEvent(5, UeIdentity(42))), ())
        self.assertEqual(identify_victims(log), [UeIdentity(42)])

    def test_grant_without_rar(self) -> None:
        log = dci_log([grant(0, 99, DL, 0, 1)], [17])
        with self.assertRaises(LogIntegrityError):
            identify_victims(log)

    def test_grant_before_rar(self) -> None:
        log = DciLog((RarEvent(5, UeIdentity(99)),), (grant(2, 99, DL, 0, 1),))
        with self.assertRaises(LogIntegrityError):
            identify_victims(log)


class TestReconstructThroughput(unittest.TestCase):

    def test_victim_without_grants(self) -> None:
        log = dci_log([grant(3, 42, UL, 0, 1)], [17, 42], duration=10)
        trace = reconstruct_throughput(log, UeIdentity(17), bin_subframes=2)
        self.assertEqual(trace.dl.values.tolist(), [0.0] * 5)
        self.assertEqual(trace.ul.values.tolist(), [0.0] * 5)

    def test_hand_summed_bin(self) -> None:
        log = dci_log([grant(0, 17, DL, 0, 3), grant(1, 17, DL, 0, 2)], [17], duration=2)
        trace = reconstruct_throughput(log, UeIdentity(17), bin_subframes=2)
        self.assertEqual(trace.dl.values[0], 2000)

    def test_unknown_victim(self) -> None:
        with self.assertRaises(NotFoundError):
            reconstruct_throughput(dci_log([], [17]), UeIdentity(18))

    def test_bad_bin_width(self) -> None:
        with self.assertRaises(ConfigurationError):
            reconstruct_throughput(dci_log([], [17]), UeIdentity(17), bin_subframes=0)

    def test_partial_last_bin_kept(self) -> None:
        log = dci_log([grant(9, 17, UL, 0, 1)], [17], duration=10)
        trace = reconstruct_throughput(log, UeIdentity(17), bin_subframes=4)
        self.assertTrue(trace.partial_last_bin)
        self.assertEqual(trace.ul.values.tolist(), [0.0, 0.0, 400.0])

    def test_bin_width_in_milliseconds(self) -> None:
        trace = reconstruct_throughput(dci_log([], [17], 10), UeIdentity(17), bin_subframes=5, subframe_ms=0.5)
        self.assertEqual(trace.ul.bin_width_ms, 2.5)

    def test_non_interference(self) -> None:
        mine = [grant(0, 17, DL, 0, 2), grant(4, 17, UL, 0, 1)]
        alone = reconstruct_throughput(dci_log(mine, [17], 8), UeIdentity(17), 2)
        crowded = reconstruct_throughput(
            dci_log(mine + [grant(0, 42, DL, 2, 5), grant(5, 42, UL, 1, 3)], [17, 42], 8), UeIdentity(17), 2)
        self.assertEqual(alone, crowded)


class TestSnifferOracles(unittest.TestCase):

    def test_lossless_against_ground_truth(self) -> None:
        rng = np.random.default_rng(50)
        for _ in range(50):
            log, truth = run_simulation(random_sim_config(rng))
            for trace in sniff_all(log, bin_subframes=1):
                ue = truth.for_rnti(trace.crnti)
                np.testing.assert_array_equal(trace.ul.values, ue.granted[UL])
                np.testing.assert_array_equal(trace.dl.values, ue.granted[DL])

    def test_totals_preserved_for_any_bin(self) -> None:
        log, _ = run_simulation(random_sim_config(np.random.default_rng(6)))
        victim = identify_victims(log)[0]
        totals = {d: sum(g.tbs_bytes for g in log.grants if g.rnti == victim and g.direction is d)
                  for d in DIRECTIONS}
        for width in (1, 3, 7, 100, 1000):
            trace = reconstruct_throughput(log, victim, width)
            self.assertEqual(trace.ul.values.sum(), totals[UL])
            self.assertEqual(trace.dl.values.sum(), totals[DL])

    def test_reconstruction_tracks_application_load(self) -> None:
        shapes = {
            Shape.SINUSOIDAL: profile(shape=Shape.SINUSOIDAL, ul=1000, dl=3000, amplitude=900, period=200),
            Shape.CONVEX: profile(shape=Shape.CONVEX, ul=300, dl=1000, amplitude=4000, period=1000),
            Shape.LINEAR: profile(shape=Shape.LINEAR, ul=800, dl=2000, noise=600),
            Shape.BURSTY_DECAY: profile(shape=Shape.BURSTY_DECAY, ul=200, dl=600, amplitude=8000, period=150),
        }
        for shape, p in shapes.items():
            log, truth = run_simulation(SimConfig(CellConfig(), (UeSpec(p),), 1000, 3))
            ue = next(iter(truth.ues.values()))
            trace = reconstruct_throughput(log, ue.crnti, bin_subframes=1)
            for direction, series in ((UL, trace.ul), (DL, trace.dl)):
                r = pearson_correlation(ue.arrivals[direction], series)
                self.assertGreaterEqual(r, 0.9, f"{shape.value} {direction.value}")


class TestTraceCsv(unittest.TestCase):

    def test_write_then_read(self) -> None:
        log = dci_log([grant(0, 17, DL, 0, 3), grant(3, 17, UL, 0, 1)], [17], duration=4)
        trace = reconstruct_throughput(log, UeIdentity(17), 2)
        with temp_dir() as root:
            write_trace_csv(trace, root / "t.csv")
            text = (root / "t.csv").read_text(encoding="utf-8")
            loaded = read_trace_csv(root / "t.csv", bin_width_ms=2, crnti=17)
        self.assertEqual(text, "bin_index,ul_bytes,dl_bytes\n0,0,1200\n1,400,0\n")
        self.assertEqual(loaded, trace)

    def test_out_of_order_bins(self) -> None:
        with temp_dir() as root:
            (root / "t.csv").write_text("bin_index,ul_bytes,dl_bytes\n1,0,0\n", encoding="utf-8")
            with self.assertRaises(LogIntegrityError):
                read_trace_csv(root / "t.csv")

    def test_missing_trace(self) -> None:
        with temp_dir() as root:
            with self.assertRaises(NotFoundError):
                read_trace_csv(root / "t.csv")


if __name__ == '__main__':
    unittest.main()
