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
"""Tests for rowclone_sim.checker."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np
import unittest

import rowclone_sim as rcs
from rowclone_sim import command as cmd
from rowclone_sim import workloads


def names(violations):
  return [v.constraint for v in violations]


class CheckerTest(unittest.TestCase):

  def setUp(self):
    self.timing = rcs.load_config().timing

  def check(self, commands):
    return names(rcs.check_commands(commands, self.timing))

  def test_legal_sequence(self):
    seq = [cmd.act(0, 0, 0, 0.0), cmd.rd(0, 0, 13.125),
           cmd.wr(0, 1, 22.5, data=1), cmd.pre(0, 56.25)]
    self.assertEqual(self.check(seq), [])

  def test_tras(self):
    self.assertIn("tRAS", self.check([cmd.act(0, 0, 0, 0.0),
                                      cmd.pre(0, 30.0)]))

  def test_trc(self):
    seq = [cmd.act(0, 0, 0, 0.0), cmd.pre(0, 37.5), cmd.act(0, 0, 1, 50.0)]
    self.assertIn("tRC", self.check(seq))

  def test_trcd(self):
    self.assertEqual(self.check([cmd.act(0, 0, 0, 0.0), cmd.rd(0, 0, 10.0)]),
                     ["tRCD"])

  def test_tccd(self):
    seq = [cmd.act(0, 0, 0, 0.0), cmd.rd(0, 0, 13.125), cmd.rd(0, 1, 16.0)]
    self.assertIn("tCCD", self.check(seq))

  def test_tfaw(self):
    seq = [cmd.act(b, 0, 0, 7.5 * b) for b in range(5)]
    self.assertEqual(self.check(seq), ["tFAW"])

  def test_twr(self):
    seq = [cmd.act(0, 0, 0, 0.0), cmd.wr(0, 0, 13.125, data=1),
           cmd.pre(0, 40.0)]
    self.assertEqual(self.check(seq), ["tWR"])

  def test_data_bus(self):
    # The write burst would start before the read burst on the bus ends.
    seq = [cmd.act(0, 0, 0, 0.0), cmd.act(1, 0, 0, 7.5),
           cmd.rd(0, 0, 13.125), cmd.wr(1, 0, 20.625, data=1)]
    self.assertEqual(self.check(seq), ["data_bus"])
    seq[3] = cmd.wr(1, 0, 22.5, data=1)
    self.assertEqual(self.check(seq), [])

  def test_structural(self):
    self.assertEqual(self.check([cmd.rd(0, 0, 0.0)]), ["illegal_transition"])
    seq = [cmd.act(0, 0, 0, 0.0), cmd.act(0, 1, 0, 37.5)]
    self.assertEqual(self.check(seq), ["fpm_cross_subarray"])
    seq = [cmd.act(0, 0, 0, 0.0), cmd.rd(0, 0, 13.125),
           cmd.act(0, 0, 1, 40.0)]
    self.assertEqual(self.check(seq), ["illegal_transition"])

  def test_double_act_needs_fpm(self):
    seq = [cmd.act(0, 0, 0, 0.0), cmd.act(0, 0, 1, 37.5), cmd.pre(0, 75.0)]
    self.assertEqual(self.check(seq), [])
    self.assertEqual(
        names(rcs.check_commands(seq, self.timing, fpm_enabled=False)),
        ["illegal_transition"])
    with self.assertRaises(rcs.InvariantError):
      rcs.assert_legal(seq, self.timing, fpm_enabled=False)

  def test_mutated_controller_timeline(self):
    g = rcs.Geometry(8, 4, 16, 4096, 64)
    mapping = rcs.AddressMapping(g)
    copy = rcs.request.copy(mapping.row_base(0, 1, 2),
                            mapping.row_base(0, 1, 3), 4096)
    timeline, _, _ = rcs.schedule([copy], g, self.timing, mapping,
                                  rcs.FeatureFlags(), zero_row=15)
    commands = timeline.commands
    self.assertEqual(self.check(commands), [])
    timeline.verify(self.timing)
    # Pull the second ACT of the FPM copy forward by one nanosecond.
    mutated = list(commands)
    mutated[1] = mutated[1].at(mutated[1].issue_time - 1.0)
    self.assertEqual(self.check(mutated), ["tRAS"])
    with self.assertRaises(rcs.InvariantError):
      rcs.assert_legal(mutated, self.timing)

  def test_random_schedules_are_legal(self):
    g = rcs.Geometry(2, 2, 8, 256, 64)
    mapping = rcs.AddressMapping(g)
    for seed in range(10000):
      rng = np.random.RandomState(seed)
      records = workloads.gen_random_trace(rng, mapping, zero_row=7, count=3,
                                           timestamps=seed % 4 < 2)
      requests = workloads.requests_from_trace(records)
      features = rcs.FeatureFlags(rowclone=seed % 2 == 0)
      policy = rcs.FRFCFS if seed % 3 == 0 else rcs.FIFO
      timeline, _, _ = rcs.schedule(requests, g, self.timing, mapping,
                                    features, policy=policy, zero_row=7)
      violations = rcs.check_commands(timeline.commands, self.timing,
                                      timeline.fpm_enabled)
      self.assertEqual(violations, [], "seed {}: {}".format(seed, violations))


if __name__ == "__main__":
  unittest.main()
