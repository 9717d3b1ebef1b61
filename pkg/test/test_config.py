#!/usr/bin/env python3

import json
import unittest

from rrbtrace.config import cell_from_json, load_sim_config, parse_sim_config
from rrbtrace.errors import ConfigurationError, NotFoundError
from rrbtrace.profiles import Shape, catalogue_profile
from test.test_utils import temp_dir


def document(**overrides: object) -> str:
    base: dict[str, object] = {
        "cell": {"total_rbs": 100, "rbg_size": 4, "tbs_per_rb": 100, "subframe_ms": 1},
        "duration_subframes": 400,
        "seed": 7,
        "ues": [{"profile": "netflix"}],
    }
    base.update(overrides)
    return json.dumps(base)


class TestParseSimConfig(unittest.TestCase):

    def test_catalogue_profile_by_name(self) -> None:
        config = parse_sim_config(document())
        self.assertEqual(config.duration_subframes, 400)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.ues[0].profile, catalogue_profile("netflix"))
        self.assertIsNone(config.ues[0].crnti)

    def test_inline_profile(self) -> None:
        inline = {
            "profile": {"class_label": "custom", "shape": "Sinusoidal", "qci": 7,
                        "uplink": {"base_rate": 200, "amplitude": 50, "period": 10},
                        "downlink": {"base_rate": 1200, "amplitude": 300, "period": 10}},
            "crnti": 4242,
        }
        config = parse_sim_config(document(ues=[inline]))
        spec = config.ues[0]
        self.assertEqual(spec.crnti, 4242)
        self.assertIs(spec.profile.shape, Shape.SINUSOIDAL)
        self.assertEqual(spec.profile.qos.qci_id, 7)
        self.assertEqual(spec.profile.downlink.amplitude, 300)

    def test_cell_defaults(self) -> None:
        config = parse_sim_config(json.dumps({"duration_subframes": 10, "ues": [{"profile": "ebay"}]}))
        self.assertEqual(config.cell.total_rbs, 100)
        self.assertEqual(config.seed, 0)

    def test_zero_duration_names_field(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(duration_subframes=0))
        self.assertEqual(cm.exception.context, "duration_subframes")

    def test_nested_field_path(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(cell={"total_rbs": -5}))
        self.assertEqual(cm.exception.context, "cell.total_rbs")

    def test_unknown_key_rejected(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(speed=3))
        self.assertEqual(cm.exception.context, "speed")

    def test_unknown_profile_name(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(ues=[{"profile": "myspace"}]))
        self.assertEqual(cm.exception.context, "profile")

    def test_crnti_out_of_range(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(ues=[{"profile": "ebay", "crnti": 3}]))
        self.assertEqual(cm.exception.context, "ues.0.crnti")

    def test_no_ues(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(ues=[]))
        self.assertEqual(cm.exception.context, "ues")

    def test_indivisible_cell(self) -> None:
        with self.assertRaises(ConfigurationError) as cm:
            parse_sim_config(document(cell={"total_rbs": 10, "rbg_size": 4}))
        self.assertEqual(cm.exception.context, "cell.total_rbs")

    def test_invalid_json(self) -> None:
        with self.assertRaises(ConfigurationError):
            parse_sim_config("{not json", source="broken.json")


class TestConfigFiles(unittest.TestCase):

    def test_load_from_file(self) -> None:
        with temp_dir() as root:
            path = root / "sim.json"
            path.write_text(document(), encoding="utf-8")
            self.assertEqual(load_sim_config(path).seed, 7)

    def test_missing_file(self) -> None:
        with temp_dir() as root:
            with self.assertRaises(NotFoundError):
                load_sim_config(root / "absent.json")

    def test_cell_only(self) -> None:
        with temp_dir() as root:
            path = root / "sim.json"
            path.write_text(document(cell={"total_rbs": 48, "rbg_size": 3, "tbs_per_rb": 60}), encoding="utf-8")
            cell = cell_from_json(path)
        self.assertEqual((cell.total_rbs, cell.rbg_size, cell.tbs_per_rb), (48, 3, 60))


if __name__ == '__main__':
    unittest.main()
