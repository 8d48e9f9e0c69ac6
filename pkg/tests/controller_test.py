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
"""Tests for rowclone_sim.controller."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
import unittest

import rowclone_sim as rcs
from rowclone_sim import request as req
from rowclone_sim import workloads
from rowclone_sim.request import Mechanism


class ControllerTest(unittest.TestCase):

  def setUp(self):
    self.geometry = rcs.Geometry(8, 64, 512, 4096, 64)
    self.mapping = rcs.AddressMapping(self.geometry)
    self.timing = rcs.load_config().timing

  def row(self, b, s, r):
    return self.mapping.row_base(b, s, r)

  def run_requests(self, requests, rowclone=True, policy=rcs.FIFO):
    timeline, stats, ctrl = rcs.schedule(
        requests, self.geometry, self.timing, self.mapping,
        rcs.FeatureFlags(rowclone=rowclone), policy=policy, zero_row=511)
    timeline.verify(self.timing)
    return timeline, stats, ctrl

  def test_single_read(self):
    timeline, stats, ctrl = self.run_requests([req.read(self.row(2, 0, 0))])
    self.assertEqual(timeline.record(0).latency, 33.75)
    self.assertEqual(timeline.channel_bytes, 64)
    self.assertEqual(stats.mean_read_latency, 33.75)
    self.assertEqual(ctrl.read_result(0).tolist(), [0] * 64)

  def test_write_then_read(self):
    addr = self.row(1, 1, 1) + 64
    _, _, ctrl = self.run_requests([req.write(addr, data=0x5A),
                                    req.read(addr)])
    self.assertEqual(ctrl.read_result(1).tolist(), [0x5A] * 64)

  def test_copy_latencies(self):
    cases = [
      (req.copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096), True,
       Mechanism.FPM, 88.125, 0),
      (req.copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096), False,
       Mechanism.BASELINE_COPY, 1038.75, 8192),
      (req.copy(self.row(0, 0, 0), self.row(1, 0, 0), 4096), True,
       Mechanism.PSM, 528.75, 0),
      (req.zero(self.row(0, 0, 0), 4096), True, Mechanism.FPM_ZERO, 88.125,
       0),
      (req.zero(self.row(0, 0, 0), 4096), False, Mechanism.BASELINE_ZERO,
       532.5, 4096),
    ]
    for request, rowclone, mechanism, latency, nbytes in cases:
      timeline, _, _ = self.run_requests([request], rowclone=rowclone)
      record = timeline.record(0)
      self.assertEqual(record.mechanism, mechanism)
      self.assertEqual(record.latency, latency)
      self.assertEqual(timeline.channel_bytes, nbytes)
      self.assertEqual(record.channel_bytes, nbytes)

  def test_cross_bank_baseline(self):
    copy = req.copy(self.row(0, 0, 0), self.row(1, 0, 0), 4096)
    timeline, _, _ = self.run_requests([copy], rowclone=False)
    self.assertEqual(timeline.channel_bytes, 8192)
    ratio = timeline.record(0).latency / 528.75
    self.assertTrue(1.9 * 0.8 <= ratio <= 1.9 * 1.2, ratio)

  def test_parallel_fpm_copies(self):
    timeline, _, ctrl = self.run_requests([
        req.copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096),
        req.copy(self.row(1, 0, 0), self.row(1, 0, 1), 4096)])
    self.assertEqual(timeline.record(0).latency, 88.125)
    self.assertEqual(timeline.record(1).latency, 95.625)
    self.assertEqual(ctrl.dram.fpm_copies, 2)

  def test_multi_row_fpm_slope(self):
    latencies = {}
    for rows in (1, 2, 4, 8):
      copy = req.copy(self.row(0, 0, 0), self.row(0, 0, 1), rows * 4096)
      timeline, _, _ = self.run_requests([copy])
      self.assertEqual(timeline.record(0).mechanism, Mechanism.FPM)
      latencies[rows] = timeline.record(0).latency
    self.assertEqual(latencies, {1: 88.125, 2: 95.625, 4: 110.625,
                                 8: 185.625})
    bound = self.timing.tRC + self.timing.tRRD
    for rows in (2, 4, 8):
      slope = (latencies[rows] - latencies[1]) / (rows - 1)
      self.assertLessEqual(slope, bound, rows)

  def test_baseline_timeline_checked_without_fpm(self):
    copy = req.copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096)
    timeline, _, _ = self.run_requests([copy], rowclone=False)
    self.assertFalse(timeline.fpm_enabled)
    fpm, _, _ = self.run_requests([copy])
    self.assertTrue(fpm.fpm_enabled)
    # An FPM command list replayed as if FPM were switched off.
    relabelled = rcs.Timeline(fpm.entries, fpm.records, fpm_enabled=False)
    with self.assertRaises(rcs.InvariantError):
      relabelled.verify(self.timing)

  def test_uncollected_reads_are_dropped(self):
    ctrl = rcs.Controller(self.geometry, self.timing, self.mapping,
                          rcs.FeatureFlags(), zero_row=511)
    kept = ctrl.submit(req.read(self.row(0, 0, 0)))
    dropped = ctrl.submit(req.read(self.row(1, 0, 0)), keep_data=False)
    ctrl.drain()
    self.assertEqual(ctrl.held_reads, 1)
    with self.assertRaises(KeyError):
      ctrl.read_result(dropped)
    self.assertEqual(ctrl.read_result(kept).tolist(), [0] * 64)
    self.assertEqual(ctrl.held_reads, 0)

  def test_same_bank_fifo(self):
    timeline, _, _ = self.run_requests([
        req.copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096),
        req.read(self.row(0, 3, 3))])
    self.assertEqual([r.seq for r in timeline.records], [0, 1])
    self.assertGreaterEqual(timeline.record(1).start_time,
                            timeline.record(0).end_time - self.timing.tRP)

  def test_arrival_time_respected(self):
    timeline, _, _ = self.run_requests(
        [req.read(self.row(0, 0, 0), arrival_time=500.0)])
    self.assertEqual(timeline.record(0).start_time, 500.0)
    self.assertEqual(timeline.record(0).latency, 33.75)

  def test_reserved_zero_row_write(self):
    ctrl = rcs.Controller(self.geometry, self.timing, self.mapping,
                          rcs.FeatureFlags(), zero_row=511)
    with self.assertRaises(rcs.RequestError):
      ctrl.submit(req.write(self.row(0, 0, 511)))
    with self.assertRaises(rcs.RequestError):
      ctrl.submit(req.copy(self.row(0, 0, 0), self.row(0, 0, 511), 4096))
    with self.assertRaises(rcs.AlignmentError):
      ctrl.submit(req.read(32))
    with self.assertRaises(rcs.OutOfRangeError):
      ctrl.submit(req.read(self.geometry.total_bytes))
    with self.assertRaises(rcs.RequestError):
      ctrl.submit(req.copy(0, 64, 4096))
    self.assertTrue(ctrl.idle)

  def test_frfcfs_row_hit_bypass(self):
    def requests():
      return [
        req.read(self.row(0, 0, 0)),
        req.zero(self.row(1, 0, 0), 4096),
        req.copy(self.row(0, 0, 5), self.row(1, 0, 5), 4096),
        req.read(self.row(0, 0, 0) + 64),
      ]
    fifo, _, _ = self.run_requests(requests(), rowclone=False)
    frfcfs, _, _ = self.run_requests(requests(), rowclone=False,
                                     policy=rcs.FRFCFS)
    self.assertGreater(fifo.record(3).latency, 500.0)
    self.assertLess(frfcfs.record(3).latency, 100.0)
    self.assertLess(frfcfs.record(3).end_time, frfcfs.record(2).start_time)

  def test_interference_direction(self):
    for seed in range(10):
      rng = np.random.RandomState(seed)
      requests = []
      for i in range(4):
        b, s = int(rng.randint(0, 8)), int(rng.randint(0, 64))
        requests.append(req.copy(self.row(b, s, 0), self.row(b, s, 1), 4096,
                                 arrival_time=200.0 * i))
      lines = self.geometry.total_bytes // 64
      for k in range(64):
        requests.append(req.read(int(rng.randint(0, lines)) * 64,
                                 arrival_time=15.0 * k))
      requests.sort(key=lambda r: r.arrival_time)

      def clone():
        return [rcs.BulkRequest(r.kind, r.src, r.dst, r.length,
                                r.arrival_time, r.data) for r in requests]

      _, fpm, _ = self.run_requests(clone(), rowclone=True)
      _, base, _ = self.run_requests(clone(), rowclone=False)
      self.assertLess(fpm.mean_read_latency, base.mean_read_latency,
                      "seed {}".format(seed))
      self.assertGreater(fpm.reads_per_us, base.reads_per_us,
                         "seed {}".format(seed))


class DifferentialTest(unittest.TestCase):
  """RowClone on, RowClone off and a flat byte array agree on every byte."""

  def test_random_streams(self):
    g = rcs.Geometry(2, 2, 8, 256, 64)
    mapping = rcs.AddressMapping(g)
    timing = rcs.load_config().timing
    reserved = [(b, s, 7) for b, s in g.all_subarrays()]
    for seed in range(1000):
      rng = np.random.RandomState(seed)
      records = workloads.gen_random_trace(rng, mapping, zero_row=7, count=8,
                                           timestamps=seed % 2 == 0)
      base = rcs.MemoryImage(g, fill_seed=seed, reserved=reserved)
      flat = rcs.FlatMemoryModel(mapping, base)
      expected = flat.run(workloads.requests_from_trace(records))
      policy = rcs.FRFCFS if seed % 3 == 0 else rcs.FIFO
      for rowclone in (True, False):
        requests = workloads.requests_from_trace(records)
        _, _, ctrl = rcs.schedule(requests, g, timing, mapping,
                                  rcs.FeatureFlags(rowclone=rowclone),
                                  policy=policy, zero_row=7,
                                  image=base.copy())
        msg = "seed {} rowclone {}".format(seed, rowclone)
        self.assertTrue(flat.matches(ctrl.image), msg)
        for r, data in zip(requests, expected):
          if r.kind == req.READ:
            np.testing.assert_array_equal(ctrl.read_result(r.seq), data,
                                          err_msg=msg)


if __name__ == "__main__":
  unittest.main()
