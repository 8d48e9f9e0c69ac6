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
"""
compiler.py

Mechanism selection and translation of requests into DRAM command sequences.

Compiled sequences are untimed: every command carries issue_time 0. The
controller (or `time_sequence` for a standalone sequence) assigns each
command the earliest time the device accepts it.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from absl import logging
import sys
if sys.version >= '3':
  from typing import Any, Dict, Hashable, List, Optional, Tuple, Union

from rowclone_sim import command as cmd_lib
from rowclone_sim import dram as dram_lib
from rowclone_sim import request as req_lib
from rowclone_sim.errors import CompileError
from rowclone_sim.geometry import Geometry, TimingParams
from rowclone_sim.mapping import AddressMapping
from rowclone_sim.request import Mechanism


__all__ = [
  "decide_mechanism",
  "decide_zero_mechanism",
  "mechanism_for",
  "compile_copy",
  "compile_zero",
  "compile_access",
  "compile_request",
  "time_sequence",
]

RowKey = Tuple[int, int, int]
ZeroRows = Union[int, Dict[Tuple[int, int], int], None]
OpenRows = Dict[int, Tuple[int, int]]


def _row_pairs(src, dst, length, mapping):
  # type: (int, int, int, AddressMapping) -> List[Tuple[RowKey, RowKey]]
  row = mapping.geometry.row_size_bytes
  return [(mapping.row_of(src + i), mapping.row_of(dst + i))
          for i in range(0, length, row)]


def _whole_rows(mapping, length, *addrs):
  row = mapping.geometry.row_size_bytes
  return (mapping.row_contiguous and length % row == 0 and
          all(a % row == 0 for a in addrs))


def _fpm_waves(acts):
  # type: (List[Tuple[cmd_lib.Command, cmd_lib.Command]]) -> List[cmd_lib.Command]
  """
  Orders the (first ACT, second ACT) pairs of a multi-row FPM operation.

  Pairs are cut, in order, into waves that hold at most one pair per bank.
  A wave issues every first ACT, then every second ACT, then one PRE per
  bank, so rows in different banks overlap instead of running back to back.
  """
  waves = []  # type: List[List[Tuple[cmd_lib.Command, cmd_lib.Command]]]
  for first, second in acts:
    if not waves or any(f.bank == first.bank for f, _ in waves[-1]):
      waves.append([])
    waves[-1].append((first, second))
  commands = []
  for wave in waves:
    commands.extend(first for first, _ in wave)
    commands.extend(second for _, second in wave)
    commands.extend(cmd_lib.pre(first.bank) for first, _ in wave)
  return commands


def decide_mechanism(src, dst, length, mapping, features):
  # type: (int, int, int, AddressMapping, Any) -> str
  """
  Pick the mechanism for Copy(src, dst, length).

  Args:
    src: Source byte address.
    dst: Destination byte address.
    length: Number of bytes.
    mapping: Address mapping; its geometry gives the row size.
    features: Object with boolean attributes `rowclone`, `fpm` and `psm`.

  Returns:
    Mechanism.FPM if every (source row, destination row) pair shares a
    subarray, Mechanism.PSM if every pair spans two banks, otherwise
    Mechanism.BASELINE_COPY. Both in-DRAM mechanisms need RowClone enabled
    and whole, row-aligned rows.
  """
  if not features.rowclone or not _whole_rows(mapping, length, src, dst):
    return Mechanism.BASELINE_COPY
  pairs = _row_pairs(src, dst, length, mapping)
  if features.fpm and all(s[:2] == d[:2] for s, d in pairs):
    return Mechanism.FPM
  if features.psm and all(s[0] != d[0] for s, d in pairs):
    return Mechanism.PSM
  return Mechanism.BASELINE_COPY


def decide_zero_mechanism(dst, length, mapping, features):
  # type: (int, int, AddressMapping, Any) -> str
  if features.rowclone and features.fpm and _whole_rows(mapping, length, dst):
    return Mechanism.FPM_ZERO
  return Mechanism.BASELINE_ZERO


def mechanism_for(request, mapping, features):
  # type: (req_lib.BulkRequest, AddressMapping, Any) -> str
  if request.kind == req_lib.COPY:
    return decide_mechanism(request.src, request.dst, request.length, mapping,
                            features)
  if request.kind == req_lib.ZERO:
    return decide_zero_mechanism(request.dst, request.length, mapping,
                                 features)
  return request.kind


def _zero_row_for(zero_rows, bank, subarray):
  # type: (ZeroRows, int, int) -> int
  if isinstance(zero_rows, dict):
    row = zero_rows.get((bank, subarray))
  else:
    row = zero_rows
  if row is None:
    raise CompileError("missing_zero_row: no reserved zero row in bank {} "
                       "subarray {}".format(bank, subarray))
  return row


def _close(banks, open_rows):
  # type: (Any, Optional[OpenRows]) -> List[cmd_lib.Command]
  """PREs for every bank in `banks` that is currently open."""
  if not open_rows:
    return []
  return [cmd_lib.pre(b) for b in sorted(set(banks)) if b in open_rows]


def _segments(src, dst, length, mapping):
  """Groups cacheline pairs by (source row, destination row), in order."""
  g = mapping.geometry
  segments = []
  for off in range(0, length, g.cacheline_bytes):
    s = mapping.map(src + off)
    d = mapping.map(dst + off)
    key = (s[:3], d[:3])
    if segments and segments[-1][0] == key:
      segments[-1][1].append((s[3], d[3]))
    else:
      segments.append((key, [(s[3], d[3])]))
  return segments


def _baseline_copy(src, dst, length, mapping, tag):
  commands = []
  slot = 0
  for (s, d), columns in _segments(src, dst, length, mapping):
    slots = list(range(slot, slot + len(columns)))
    slot += len(columns)
    reads = [cmd_lib.rd(s[0], sc, slot=(tag, k))
             for k, (sc, _) in zip(slots, columns)]
    writes = [cmd_lib.wr(d[0], dc, slot=(tag, k))
              for k, (_, dc) in zip(slots, columns)]
    if s[0] != d[0]:
      commands.append(cmd_lib.act(*s))
      commands.append(cmd_lib.act(*d))
      for rd, wr in zip(reads, writes):
        commands.extend([rd, wr])
      commands.extend([cmd_lib.pre(s[0]), cmd_lib.pre(d[0])])
    elif s == d:
      commands.append(cmd_lib.act(*s))
      commands.extend(reads)
      commands.extend(writes)
      commands.append(cmd_lib.pre(s[0]))
    else:
      commands.append(cmd_lib.act(*s))
      commands.extend(reads)
      commands.append(cmd_lib.pre(s[0]))
      commands.append(cmd_lib.act(*d))
      commands.extend(writes)
      commands.append(cmd_lib.pre(d[0]))
  return commands


def compile_copy(src, # type: int
                 dst, # type: int
                 length, # type: int
                 mechanism, # type: str
                 mapping, # type: AddressMapping
                 open_rows=None, # type: Optional[OpenRows]
                 tag=None, # type: Hashable
                 timing=None # type: Optional[TimingParams]
                 ):
  # type: (...) -> List[cmd_lib.Command]
  """
  Compile Copy(src, dst, length) with `mechanism`.

  Args:
    src: Source byte address.
    dst: Destination byte address.
    length: Number of bytes to copy.
    mechanism: FPM, PSM or BASELINE_COPY.
    mapping: Address mapping.
    open_rows: Map from bank index to the (subarray, row) currently open in
      it. Open banks the copy touches are precharged first.
    tag: Key that makes staging-buffer slots unique to this request.
    timing: If given, the commands are returned stamped with the earliest
      issue times on an idle, precharged device.

  Returns:
    Ordered list of commands. Every bank touched ends precharged.

  Raises:
    CompileError: if `mechanism` does not fit the addresses.
  """
  row = mapping.geometry.row_size_bytes
  if mechanism in (Mechanism.FPM, Mechanism.PSM):
    if not _whole_rows(mapping, length, src, dst):
      raise CompileError("{} needs whole row-aligned rows under a contiguous "
                         "mapping".format(mechanism))
    pairs = _row_pairs(src, dst, length, mapping)
  banks = req_lib.copy(src, dst, length).banks(mapping)
  commands = _close(banks, open_rows)

  if mechanism == Mechanism.FPM:
    for s, d in pairs:
      if s[:2] != d[:2]:
        raise CompileError("FPM copy from {} to {} leaves the subarray"
                           "".format(s, d))
    commands.extend(_fpm_waves([(cmd_lib.act(*s), cmd_lib.act(*d))
                                for s, d in pairs]))
  elif mechanism == Mechanism.PSM:
    columns = row // mapping.geometry.cacheline_bytes
    for s, d in pairs:
      if s[0] == d[0]:
        raise CompileError("PSM copy from {} to {} stays in bank {}"
                           "".format(s, d, s[0]))
      commands.extend([cmd_lib.act(*s), cmd_lib.act(*d)])
      commands.extend(cmd_lib.transfer(s[0], c, d[0], c)
                      for c in range(columns))
      commands.extend([cmd_lib.pre(s[0]), cmd_lib.pre(d[0])])
  elif mechanism == Mechanism.BASELINE_COPY:
    commands.extend(_baseline_copy(src, dst, length, mapping, tag))
  else:
    raise CompileError("'{}' is not a copy mechanism".format(mechanism))

  logging.debug("Compiled %s copy %#x -> %#x (%d bytes) into %d commands",
                mechanism, src, dst, length, len(commands))
  if timing is not None:
    return time_sequence(commands, mapping.geometry, timing,
                         fpm_enabled=mechanism == Mechanism.FPM)
  return commands


def compile_zero(dst, # type: int
                 length, # type: int
                 mechanism, # type: str
                 mapping, # type: AddressMapping
                 zero_rows, # type: ZeroRows
                 open_rows=None, # type: Optional[OpenRows]
                 timing=None # type: Optional[TimingParams]
                 ):
  # type: (...) -> List[cmd_lib.Command]
  """
  Compile Zero(dst, length) with FPM_ZERO or BASELINE_ZERO.

  `zero_rows` is either one row index reserved in every subarray or a map
  from (bank, subarray) to that subarray's reserved row.

  Raises:
    CompileError: if the mechanism does not fit or a destination subarray
      has no reserved zero row (missing_zero_row).
  """
  g = mapping.geometry
  banks = req_lib.zero(dst, length).banks(mapping)
  commands = _close(banks, open_rows)
  if mechanism == Mechanism.FPM_ZERO:
    if not _whole_rows(mapping, length, dst):
      raise CompileError("FpmZero needs whole row-aligned rows under a "
                         "contiguous mapping")
    acts = []
    for off in range(0, length, g.row_size_bytes):
      b, s, r = mapping.row_of(dst + off)
      zr = _zero_row_for(zero_rows, b, s)
      if zr == r:
        raise CompileError("Zero destination is the reserved zero row of "
                           "bank {} subarray {}".format(b, s))
      acts.append((cmd_lib.act(b, s, zr), cmd_lib.act(b, s, r)))
    commands.extend(_fpm_waves(acts))
  elif mechanism == Mechanism.BASELINE_ZERO:
    key = None
    for addr in mapping.lines(dst, length):
      b, s, r, c = mapping.map(addr)
      if (b, s, r) != key:
        if key is not None:
          commands.append(cmd_lib.pre(key[0]))
        commands.append(cmd_lib.act(b, s, r))
        key = (b, s, r)
      commands.append(cmd_lib.wr(b, c, data=0))
    commands.append(cmd_lib.pre(key[0]))
  else:
    raise CompileError("'{}' is not a zeroing mechanism".format(mechanism))

  if timing is not None:
    return time_sequence(commands, g, timing,
                         fpm_enabled=mechanism == Mechanism.FPM_ZERO)
  return commands


def compile_access(request, mapping, open_rows=None, tag=None):
  # type: (req_lib.BulkRequest, AddressMapping, Optional[OpenRows], Hashable) -> List[cmd_lib.Command]
  """
  Compile a Read or Write under the open-page policy.

  A row hit issues only the column command. A row conflict precharges the
  bank first. The bank is left open afterwards. A Read deposits its
  cacheline in the staging buffer under slot (tag, "read").
  """
  b, s, r, c = mapping.map(request.addr)
  open_rows = open_rows or {}
  commands = []
  if open_rows.get(b) != (s, r):
    if b in open_rows:
      commands.append(cmd_lib.pre(b))
    commands.append(cmd_lib.act(b, s, r))
  if request.kind == req_lib.READ:
    commands.append(cmd_lib.rd(b, c, slot=(tag, "read")))
  elif request.kind == req_lib.WRITE:
    commands.append(cmd_lib.wr(b, c, data=request.data))
  else:
    raise CompileError("{} is not a single-line access".format(request))
  return commands


def compile_request(request, mechanism, mapping, zero_rows=None,
                    open_rows=None):
  # type: (req_lib.BulkRequest, str, AddressMapping, ZeroRows, Optional[OpenRows]) -> List[cmd_lib.Command]
  """Compile any request; `request.seq` tags its staging slots."""
  if request.kind == req_lib.COPY:
    return compile_copy(request.src, request.dst, request.length, mechanism,
                        mapping, open_rows=open_rows, tag=request.seq)
  if request.kind == req_lib.ZERO:
    return compile_zero(request.dst, request.length, mechanism, mapping,
                        zero_rows, open_rows=open_rows)
  return compile_access(request, mapping, open_rows=open_rows,
                        tag=request.seq)


def time_sequence(commands, geometry, timing, fpm_enabled=False, start=0.0):
  # type: (List[cmd_lib.Command], Geometry, TimingParams, bool, float) -> List[cmd_lib.Command]
  """
  Stamp a command sequence with the earliest issue times on a fresh device.

  The sequence runs alone on an idle device whose banks are all precharged,
  with every command issued no earlier than its predecessor.
  """
  device = dram_lib.Dram(geometry, timing, fpm_enabled=fpm_enabled)
  now = start
  timed = []
  for c in commands:
    now = device.earliest_legal_time(c.at(now))
    stamped = c.at(now)
    device.apply(stamped)
    timed.append(stamped)
  return timed
