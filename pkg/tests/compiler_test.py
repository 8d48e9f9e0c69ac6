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
"""Tests for rowclone_sim.compiler."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import unittest

import rowclone_sim as rcs
from rowclone_sim import command as cmd
from rowclone_sim import request as req
from rowclone_sim.request import Mechanism


class DecideMechanismTest(unittest.TestCase):

  def setUp(self):
    self.mapping = rcs.AddressMapping(rcs.Geometry(8, 64, 512, 4096, 64))

  def decide(self, src, dst, length=4096, **features):
    return rcs.decide_mechanism(self.mapping.row_base(*src),
                                self.mapping.row_base(*dst), length,
                                self.mapping, rcs.FeatureFlags(**features))

  def test_whole_rows(self):
    self.assertEqual(self.decide((0, 3, 1), (0, 3, 9)), Mechanism.FPM)
    self.assertEqual(self.decide((0, 3, 1), (5, 0, 1)), Mechanism.PSM)
    self.assertEqual(self.decide((0, 3, 1), (0, 4, 1)),
                     Mechanism.BASELINE_COPY)

  def test_feature_flags(self):
    self.assertEqual(self.decide((0, 3, 1), (0, 3, 9), rowclone=False),
                     Mechanism.BASELINE_COPY)
    self.assertEqual(self.decide((0, 3, 1), (0, 3, 9), fpm=False),
                     Mechanism.BASELINE_COPY)
    self.assertEqual(self.decide((0, 3, 1), (5, 0, 1), psm=False),
                     Mechanism.BASELINE_COPY)

  def test_partial_rows(self):
    self.assertEqual(self.decide((0, 3, 1), (0, 3, 9), length=64),
                     Mechanism.BASELINE_COPY)
    src = self.mapping.row_base(0, 3, 1) + 64
    self.assertEqual(
        rcs.decide_mechanism(src, self.mapping.row_base(0, 3, 9) + 64, 4096,
                             self.mapping, rcs.FeatureFlags()),
        Mechanism.BASELINE_COPY)

  def test_multi_row(self):
    # Two consecutive rows of one subarray, moved to two consecutive rows of
    # the same subarray.
    g = rcs.Geometry(2, 2, 8, 256, 64)
    m = rcs.AddressMapping(g, ("bank", "subarray", "row", "column"))
    self.assertEqual(
        rcs.decide_mechanism(m.row_base(1, 0, 0), m.row_base(1, 0, 4), 512,
                             m, rcs.FeatureFlags()),
        Mechanism.FPM)

  def test_interleaved_mapping_never_uses_rowclone(self):
    m = rcs.AddressMapping(self.mapping.geometry,
                           ("row", "column", "subarray", "bank"))
    self.assertFalse(m.row_contiguous)
    self.assertEqual(rcs.decide_mechanism(0, 1 << 20, 4096, m,
                                          rcs.FeatureFlags()),
                     Mechanism.BASELINE_COPY)

  def test_zero(self):
    dst = self.mapping.row_base(2, 2, 2)
    self.assertEqual(rcs.decide_zero_mechanism(dst, 4096, self.mapping,
                                               rcs.FeatureFlags()),
                     Mechanism.FPM_ZERO)
    self.assertEqual(rcs.decide_zero_mechanism(dst, 128, self.mapping,
                                               rcs.FeatureFlags()),
                     Mechanism.BASELINE_ZERO)
    self.assertEqual(
        rcs.decide_zero_mechanism(dst, 4096, self.mapping,
                                  rcs.FeatureFlags(rowclone=False)),
        Mechanism.BASELINE_ZERO)


class CompileTest(unittest.TestCase):

  def setUp(self):
    self.geometry = rcs.Geometry(8, 64, 512, 4096, 64)
    self.mapping = rcs.AddressMapping(self.geometry)
    self.timing = rcs.load_config().timing

  def row(self, b, s, r):
    return self.mapping.row_base(b, s, r)

  def test_fpm_sequence(self):
    seq = rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096,
                           Mechanism.FPM, self.mapping, timing=self.timing)
    self.assertEqual([c.kind for c in seq], [cmd.ACT, cmd.ACT, cmd.PRE])
    self.assertEqual([c.issue_time for c in seq], [0.0, 37.5, 75.0])
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 88.125)

  def test_fpm_rows_overlap_across_banks(self):
    # Consecutive 4 KB rows sit in banks 0 and 1.
    seq = rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 2 * 4096,
                           Mechanism.FPM, self.mapping, timing=self.timing)
    self.assertEqual([(c.kind, c.bank) for c in seq],
                     [(cmd.ACT, 0), (cmd.ACT, 1), (cmd.ACT, 0), (cmd.ACT, 1),
                      (cmd.PRE, 0), (cmd.PRE, 1)])
    self.assertEqual([c.issue_time for c in seq],
                     [0.0, 7.5, 37.5, 45.0, 75.0, 82.5])
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 95.625)

  def test_fpm_waves_split_on_repeated_bank(self):
    seq = rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 16 * 4096,
                           Mechanism.FPM, self.mapping)
    wave = [cmd.ACT] * 16 + [cmd.PRE] * 8
    self.assertEqual([c.kind for c in seq], wave + wave)
    self.assertEqual([c.bank for c in seq[16:24]], list(range(8)))
    self.assertEqual(set(c.subarray for c in seq[24:40]), {1})

  def test_fpm_zero_rows_overlap_across_banks(self):
    seq = rcs.compile_zero(self.row(0, 0, 1), 2 * 4096, Mechanism.FPM_ZERO,
                           self.mapping, 511, timing=self.timing)
    self.assertEqual([(c.kind, c.bank, c.row) for c in seq],
                     [(cmd.ACT, 0, 511), (cmd.ACT, 1, 511), (cmd.ACT, 0, 1),
                      (cmd.ACT, 1, 1), (cmd.PRE, 0, None),
                      (cmd.PRE, 1, None)])
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 95.625)

    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 88.125)

  def test_baseline_copy_same_bank(self):
    seq = rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096,
                           Mechanism.BASELINE_COPY, self.mapping,
                           timing=self.timing)
    kinds = [c.kind for c in seq]
    self.assertEqual(kinds.count(cmd.RD), 64)
    self.assertEqual(kinds.count(cmd.WR), 64)
    self.assertEqual(kinds.count(cmd.ACT), 2)
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 1038.75)

  def test_baseline_zero(self):
    seq = rcs.compile_zero(self.row(0, 0, 0), 4096, Mechanism.BASELINE_ZERO,
                           self.mapping, 511, timing=self.timing)
    self.assertEqual(len(seq), 66)
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 532.5)

  def test_fpm_zero(self):
    seq = rcs.compile_zero(self.row(3, 2, 1), 4096, Mechanism.FPM_ZERO,
                           self.mapping, 511, timing=self.timing)
    self.assertEqual([(c.kind, c.row) for c in seq],
                     [(cmd.ACT, 511), (cmd.ACT, 1), (cmd.PRE, None)])
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 88.125)

  def test_psm(self):
    seq = rcs.compile_copy(self.row(0, 0, 0), self.row(1, 0, 0), 4096,
                           Mechanism.PSM, self.mapping, timing=self.timing)
    self.assertEqual(sum(c.kind == cmd.TRANSFER for c in seq), 64)
    self.assertEqual(seq[-1].issue_time + self.timing.tRP, 528.75)

  def test_compile_errors(self):
    with self.assertRaises(rcs.CompileError):
      rcs.compile_copy(self.row(0, 0, 0), self.row(0, 1, 0), 4096,
                       Mechanism.FPM, self.mapping)
    with self.assertRaises(rcs.CompileError):
      rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096,
                       Mechanism.PSM, self.mapping)
    with self.assertRaises(rcs.CompileError):
      rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 64,
                       Mechanism.FPM, self.mapping)
    with self.assertRaises(rcs.CompileError) as ctx:
      rcs.compile_zero(self.row(0, 0, 0), 4096, Mechanism.FPM_ZERO,
                       self.mapping, {})
    self.assertIn("missing_zero_row", str(ctx.exception))
    with self.assertRaises(rcs.CompileError):
      rcs.compile_zero(self.row(0, 0, 511), 4096, Mechanism.FPM_ZERO,
                       self.mapping, 511)

  def test_open_rows_are_closed(self):
    seq = rcs.compile_copy(self.row(0, 0, 0), self.row(0, 0, 1), 4096,
                           Mechanism.FPM, self.mapping,
                           open_rows={0: (4, 4), 3: (0, 0)})
    self.assertEqual([c.kind for c in seq],
                     [cmd.PRE, cmd.ACT, cmd.ACT, cmd.PRE])
    self.assertEqual(seq[0].bank, 0)

  def test_access_open_page(self):
    r = req.read(self.row(0, 0, 5) + 128)
    self.assertEqual([c.kind for c in rcs.compile_access(r, self.mapping)],
                     [cmd.ACT, cmd.RD])
    hit = rcs.compile_access(r, self.mapping, open_rows={0: (0, 5)})
    self.assertEqual([c.kind for c in hit], [cmd.RD])
    self.assertEqual(hit[0].column, 2)
    miss = rcs.compile_access(r, self.mapping, open_rows={0: (0, 6)})
    self.assertEqual([c.kind for c in miss], [cmd.PRE, cmd.ACT, cmd.RD])
    w = req.write(self.row(0, 0, 5), data=7)
    self.assertEqual(rcs.compile_access(w, self.mapping)[-1].data, 7)


if __name__ == "__main__":
  unittest.main()
