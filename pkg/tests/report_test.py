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
"""Tests for rowclone_sim.report."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import json
import os
import shutil
import tempfile
import unittest

import pandas as pd
from six import StringIO

import rowclone_sim as rcs
from rowclone_sim import workloads


_TOY = {
  "geometry.num_banks": 2,
  "geometry.subarrays_per_bank": 2,
  "geometry.rows_per_subarray": 8,
  "geometry.row_size_bytes": 256,
  "cache.capacity_bytes": 1024,
  "cache.associativity": 2,
}


class RunTest(unittest.TestCase):

  def setUp(self):
    self.config = rcs.load_config()

  def test_single_copy(self):
    records = workloads.parse_trace("C 0x0 0x200000 0x1000\n")
    report = rcs.run(self.config, records)
    (record,) = report.timeline.records
    self.assertEqual(record.mechanism, "FPM")
    self.assertEqual(record.channel_bytes, 0)
    self.assertAlmostEqual(record.latency, 88.125)
    self.assertAlmostEqual(report.energy.total, 3.0)
    self.assertEqual(report.stats.mechanism_counts, {"FPM": 1})
    self.assertIsNotNone(report.system_stats)

  def test_baseline_copy(self):
    records = workloads.parse_trace("C 0x0 0x200000 0x1000\n")
    config = self.config.with_features(rowclone=False)
    (record,) = rcs.run(config, records).timeline.records
    self.assertEqual(record.mechanism, "BaselineCopy")
    self.assertEqual(record.channel_bytes, 2 * 4096)
    self.assertAlmostEqual(record.latency, 1038.75)

  def test_generated_run_is_deterministic(self):
    config = self.config.with_overrides(dict(_TOY, **{
      "workload.generator": "random",
      "workload.params": {"count": 12},
      "seed": 3,
    }))
    a = rcs.run(config)
    b = rcs.run(config)
    self.assertEqual(len(a.timeline.records), len(b.timeline.records))
    self.assertEqual(a.to_json(), b.to_json())
    self.assertEqual(json.loads(a.to_json())["seed"], 3)

  def test_render(self):
    records = workloads.parse_trace("W 0x40 0x11\nR 0x40\n")
    config = self.config.with_overrides({"cache.enabled": False})
    report = rcs.run(config, records)
    d = json.loads(report.render("json"))
    self.assertEqual([r["kind"] for r in d["requests"]], ["Write", "Read"])
    frame = pd.read_csv(StringIO(report.render("csv")))
    self.assertEqual(list(frame.columns), list(rcs.RECORD_COLUMNS))
    self.assertEqual(len(frame), 2)
    table = report.render("table")
    self.assertIn("energy (nJ):", table)
    self.assertIn("policy: fifo", table)
    with self.assertRaises(rcs.ConfigError):
      report.render("xml")


class LoadWorkloadTest(unittest.TestCase):

  def setUp(self):
    self.dir = tempfile.mkdtemp()
    self.config = rcs.load_config()

  def tearDown(self):
    shutil.rmtree(self.dir)

  def test_needs_exactly_one_source(self):
    with self.assertRaises(rcs.ConfigError):
      rcs.load_workload(self.config)
    path = os.path.join(self.dir, "t.trace")
    with open(path, "w") as f:
      f.write("R 0x0\n")
    config = self.config.with_overrides({"workload.trace": path,
                                         "workload.generator": "random"})
    with self.assertRaises(rcs.ConfigError):
      rcs.load_workload(config)

  def test_trace_file(self):
    path = os.path.join(self.dir, "t.trace")
    with open(path, "w") as f:
      f.write("R 0x0\nZ 0x1000 0x1000\n")
    config = self.config.with_overrides({"workload.trace": path,
                                         "workload.inter_arrival_ns": 5.0})
    records = rcs.load_workload(config)
    self.assertEqual([r.kind for r in records], ["R", "Z"])
    self.assertEqual([r.arrival for r in records], [0.0, 5.0])

  def test_missing_trace(self):
    config = self.config.with_overrides(
        {"workload.trace": os.path.join(self.dir, "none.trace")})
    with self.assertRaises(rcs.ParseError) as ctx:
      rcs.load_workload(config)
    self.assertEqual(ctx.exception.line, 0)

  def test_bad_generator_params(self):
    config = self.config.with_overrides({
      "workload.generator": "bulkzero",
      "workload.params": {"pages": 1, "colour": "red"},
    })
    with self.assertRaises(rcs.ConfigError) as ctx:
      rcs.load_workload(config)
    self.assertEqual(ctx.exception.field, "workload.params")


class CompareTest(unittest.TestCase):

  @classmethod
  def setUpClass(cls):
    config = rcs.load_config()
    cls.base = config.with_features(rowclone=False, zi=False)
    cls.rowclone = config.with_features(rowclone=True, zi=False)
    cls.zi = config.with_features(rowclone=True, zi=True)
    cls.table = rcs.compare(cls.base, cls.rowclone, cls.zi)

  def test_latency_reductions(self):
    for op, ratio in [("intra_subarray_copy", 11.79), ("zeroing", 6.04),
                      ("inter_bank_copy", 1.93)]:
      row = self.table.get(op)
      self.assertAlmostEqual(row["latency_reduction"], ratio, places=2)
      self.assertAlmostEqual(row["latency_reduction"],
                             row["baseline_latency"] / row["latency"])

  def test_energy_reductions(self):
    for op, ratio in [("intra_subarray_copy", 74.5), ("zeroing", 41.6),
                      ("inter_bank_copy", 3.2)]:
      row = self.table.get(op)
      self.assertLess(abs(row["energy_reduction"] - ratio) / ratio, 0.01, op)

  def test_channel_bytes(self):
    row = self.table.get("intra_subarray_copy")
    self.assertEqual(row["baseline_channel_bytes"], 2 * 4096)
    self.assertEqual(row["channel_bytes"], 0)
    self.assertEqual(self.table.get("inter_bank_copy")["channel_bytes"], 0)

  def test_reciprocal(self):
    flipped = rcs.compare(self.rowclone, self.base)
    for op in rcs.OPERATION_CLASSES:
      self.assertAlmostEqual(
          flipped.get(op)["latency_reduction"] *
          self.table.get(op)["latency_reduction"], 1.0)
      self.assertAlmostEqual(
          flipped.get(op)["energy_reduction"] *
          self.table.get(op)["energy_reduction"], 1.0)

  def test_zero_then_read(self):
    self.assertEqual(len(self.table), 2 * len(rcs.OPERATION_CLASSES) + 1)
    row = self.table.get(rcs.ZERO_THEN_READ, pair="rowclone_zi")
    self.assertGreater(row["latency_reduction"], 1.0)
    with self.assertRaises(KeyError):
      self.table.get(rcs.ZERO_THEN_READ)

  def test_renderings(self):
    frame = self.table.to_frame()
    self.assertEqual(len(frame), len(self.table))
    self.assertIn("11.79x", self.table.to_table())
    self.assertEqual(len(self.table.to_dict()["rows"]), len(self.table))

  def test_incompatible(self):
    other = self.rowclone.with_overrides({"timing.tWR": 16.0})
    with self.assertRaises(rcs.IncompatibleConfigsError):
      rcs.compare(self.base, other)


class SweepTest(unittest.TestCase):

  def setUp(self):
    self.config = rcs.load_config().with_overrides({
      "workload.generator": "bulkzero",
      "workload.params": {"pages": 2},
    })

  def check(self, points):
    self.assertEqual([p["index"] for p in points], [0, 1])
    self.assertEqual([p["overrides"] for p in points],
                     [{"features.rowclone": False},
                      {"features.rowclone": True}])
    counts = [p["report"]["stats"]["mechanism_counts"] for p in points]
    self.assertEqual(counts, [{"BaselineZero": 2}, {"FpmZero": 2}])

  def test_serial(self):
    self.check(rcs.sweep(self.config, {"features.rowclone": [False, True]}))

  def test_workers(self):
    self.check(rcs.sweep(self.config, {"features.rowclone": [False, True]},
                         workers=2))

  def test_config_parameters(self):
    config = self.config.with_overrides(
        {"sweep.parameters": {"features.rowclone": [False, True]}})
    self.check(rcs.sweep(config))

  def test_bad_path(self):
    with self.assertRaises(rcs.ConfigError):
      rcs.sweep(self.config, {"timing.tNOPE": [1.0]})
    with self.assertRaises(rcs.ConfigError):
      rcs.sweep(self.config, {"seed": []})


if __name__ == "__main__":
  unittest.main()
