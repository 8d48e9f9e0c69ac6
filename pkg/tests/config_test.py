# Copyright 2026 The rowclone_sim Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Tests for rowclone_sim.config."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import json
import os
import shutil
import tempfile
import unittest

import rowclone_sim as rcs


class SimConfigTest(unittest.TestCase):

  def setUp(self):
    self.config = rcs.load_config()

  def test_default(self):
    c = self.config
    self.assertEqual(c.geometry, rcs.Geometry(8, 64, 512, 4096, 64))
    self.assertEqual(c.zero_row, 511)
    self.assertEqual(c.policy, rcs.FIFO)
    self.assertEqual(c.features, rcs.FeatureFlags())
    self.assertTrue(c.mapping().row_contiguous)
    self.assertTrue(c.power.calibration_note)
    cache = c.cache.build(64)
    self.assertEqual((cache.capacity_bytes, cache.associativity),
                     (512 * 1024, 8))

  def test_round_trip(self):
    d = self.config.to_dict()
    self.assertEqual(rcs.SimConfig.from_dict(d).to_dict(), d)
    self.assertEqual(self.config.copy().to_dict(), d)

  def test_overrides(self):
    c = self.config.with_overrides({"timing.tWR": 16.0, "seed": 4,
                                    "workload.params.num_pages": 8})
    self.assertEqual(c.timing.tWR, 16.0)
    self.assertEqual(c.seed, 4)
    self.assertEqual(c.workload.params, {"num_pages": 8})
    self.assertEqual(self.config.timing.tWR, 15.0)
    with self.assertRaises(rcs.ConfigError):
      self.config.with_overrides({"timing.tXYZ": 1.0})
    with self.assertRaises(rcs.ConfigError):
      self.config.with_overrides({"nosuch.field": 1})

  def test_with_features(self):
    c = self.config.with_features(rowclone=False)
    self.assertFalse(c.features.rowclone)
    self.assertTrue(self.config.features.rowclone)
    c = self.config.with_features(zi=True)
    self.assertTrue(c.features.zi)
    c.validate()

  def test_validate_fields(self):
    cases = [
      ({"features.rowclone": False, "features.zi": True}, "features.zi"),
      ({"scheduling.policy": "lifo"}, "scheduling.policy"),
      ({"dram.zero_row": 512}, "dram.zero_row"),
      ({"dram.initial_contents": "ones"}, "dram.initial_contents"),
      ({"cache.capacity_bytes": 1000}, "cache"),
      ({"workload.generator": "nope"}, "workload.generator"),
      ({"workload.inter_arrival_ns": -1.0}, "workload.inter_arrival_ns"),
      ({"output.format": "xml"}, "output.format"),
      ({"sweep.workers": 0}, "sweep.workers"),
      ({"sweep.parameters": {"seed": []}}, "sweep.parameters.seed"),
      ({"timing.tRAS": 35.0}, "tRC"),
      ({"geometry.num_banks": 6}, "num_banks"),
      ({"power.e_transfer": 100.0}, "e_transfer"),
      ({"mapping.field_order": ["row", "bank", "column"]},
       "mapping.field_order"),
    ]
    for overrides, field in cases:
      with self.assertRaises(rcs.ConfigError) as ctx:
        self.config.with_overrides(overrides).validate()
      self.assertEqual(ctx.exception.field, field, overrides)

  def test_from_dict_errors(self):
    d = self.config.to_dict()
    d["extra"] = {}
    with self.assertRaises(rcs.ConfigError) as ctx:
      rcs.SimConfig.from_dict(d)
    self.assertEqual(ctx.exception.field, "extra")
    d = self.config.to_dict()
    d["features"]["turbo"] = True
    with self.assertRaises(rcs.ConfigError) as ctx:
      rcs.SimConfig.from_dict(d)
    self.assertEqual(ctx.exception.field, "features.turbo")
    d = self.config.to_dict()
    del d["power"]
    with self.assertRaises(rcs.ConfigError) as ctx:
      rcs.SimConfig.from_dict(d)
    self.assertEqual(ctx.exception.field, "power")
    d = self.config.to_dict()
    d["features"]["rowclone"] = "yes"
    with self.assertRaises(rcs.ConfigError):
      rcs.SimConfig.from_dict(d)

  def test_cache_disabled(self):
    c = self.config.with_overrides({"cache.enabled": False})
    self.assertIsNone(c.cache.build(64))


class LoadConfigTest(unittest.TestCase):

  def setUp(self):
    self.dir = tempfile.mkdtemp()

  def tearDown(self):
    shutil.rmtree(self.dir)

  def write(self, text):
    path = os.path.join(self.dir, "config.json")
    with open(path, "w") as f:
      f.write(text)
    return path

  def test_missing_and_malformed(self):
    with self.assertRaises(rcs.ConfigError):
      rcs.load_config(os.path.join(self.dir, "none.json"))
    with self.assertRaises(rcs.ConfigError):
      rcs.load_config(self.write("{not json"))

  def test_minimal_file(self):
    d = rcs.load_config().to_dict()
    minimal = {k: d[k] for k in ("geometry", "timing", "power")}
    minimal["geometry"]["rows_per_subarray"] = 8
    config = rcs.load_config(self.write(json.dumps(minimal)))
    self.assertEqual(config.zero_row, 7)
    self.assertEqual(config.output_format, "json")
    self.assertFalse(config.features.zi)


if __name__ == "__main__":
  unittest.main()
