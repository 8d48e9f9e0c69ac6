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
dram.py

Bank state machines, timing legality and the functional effect of every DRAM
command, including the two RowClone extensions: a second ACTIVATE to an
already-activated bank (Fast Parallel Mode row copy) and the TRANSFER command
(Pipelined Serial Mode cacheline copy between banks over the internal bus).
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
from absl import logging
import numpy as np
from six import iteritems
import sys
if sys.version >= '3':
  from typing import Any, Dict, Hashable, Iterable, List, Optional, Tuple

from rowclone_sim import command as cmd_lib
from rowclone_sim import util
from rowclone_sim.errors import IllegalStateError, ProtocolError, RequestError
from rowclone_sim.geometry import Geometry, TimingParams


__all__ = [
  "PRECHARGED",
  "ACTIVATED",
  "FPM_ARMED",
  "BankState",
  "MemoryImage",
  "Channel",
  "Dram",
  "as_line",
]

PRECHARGED = "Precharged"
ACTIVATED = "Activated"
FPM_ARMED = "FpmArmed"

_NEVER = float("-inf")


def as_line(data, line_bytes):
  # type: (Any, int) -> np.ndarray
  """Converts a fill byte, a bytes-like object or an array to one cacheline."""
  if isinstance(data, (int, np.integer)):
    if not 0 <= data <= 0xFF:
      raise RequestError("Fill value {} does not fit in a byte".format(data))
    return np.full(line_bytes, data, dtype=np.uint8)
  if isinstance(data, (bytes, bytearray)):
    line = np.frombuffer(bytes(data), dtype=np.uint8).copy()
  else:
    line = np.array(data, dtype=np.uint8).reshape(-1)
  if line.size != line_bytes:
    raise RequestError("Expected {} bytes of line data, got {}"
                       "".format(line_bytes, line.size))
  return line


class BankState(object):
  """
  Per-bank protocol state and the timestamps the timing rules need.

  `phase` is one of PRECHARGED, ACTIVATED or FPM_ARMED. In the two open
  phases `subarray` and `row` name the latched row.
  """
  __slots__ = ("phase", "subarray", "row", "last_act", "last_pre", "last_rd",
               "last_wr", "wr_data_end")

  def __init__(self):
    self.phase = PRECHARGED
    self.subarray = None  # Optional[int]
    self.row = None  # Optional[int]
    self.last_act = _NEVER
    self.last_pre = _NEVER
    # Last column read out of this bank (RD, or TRANSFER as source).
    self.last_rd = _NEVER
    # Last column write into this bank (WR, or TRANSFER as destination).
    self.last_wr = _NEVER
    # End of the last write data burst into this bank; start of tWR.
    self.wr_data_end = _NEVER

  @property
  def is_open(self):
    # type: () -> bool
    return self.phase != PRECHARGED

  def __repr__(self):
    if self.phase == PRECHARGED:
      return "BankState[Precharged]"
    return "BankState[{}(s{}, r{})]".format(self.phase, self.subarray,
                                            self.row)


class MemoryImage(object):
  """
  Data contents of every row plus the per-bank row buffers.

  Rows are materialized lazily. Until first written a row reads as zero, or,
  with a `fill_seed`, as random bytes drawn from a generator seeded by the
  fill seed and the row's coordinates; rows in `reserved` always start as
  zero. A bank's row buffer aliases the activated row, so a WR updates the
  row buffer and the backing row in one step.
  """

  def __init__(self, geometry, fill_seed=None, reserved=()):
    # type: (Geometry, Optional[int], Iterable[Tuple[int, int, int]]) -> None
    self._geometry = geometry
    self._fill_seed = fill_seed
    self._reserved = frozenset(reserved)
    self._rows = {}  # type: Dict[Tuple[int, int, int], np.ndarray]
    # Read-only initial contents of seeded rows, shared between copies.
    self._pristine = {}  # type: Dict[Tuple[int, int, int], np.ndarray]
    self._row_buffers = {}  # type: Dict[int, np.ndarray]

  @property
  def geometry(self):
    return self._geometry

  def _initial(self, key):
    # type: (Tuple[int, int, int]) -> np.ndarray
    """Contents of an unwritten row. The result must not be modified."""
    size = self._geometry.row_size_bytes
    if self._fill_seed is None or key in self._reserved:
      return np.zeros(size, dtype=np.uint8)
    row = self._pristine.get(key)
    if row is None:
      rng = np.random.RandomState([self._fill_seed] + list(key))
      row = rng.randint(0, 256, size=size).astype(np.uint8)
      row.flags.writeable = False
      self._pristine[key] = row
    return row

  def _row(self, key):
    # type: (Tuple[int, int, int]) -> np.ndarray
    row = self._rows.get(key)
    if row is None:
      row = self._initial(key).copy()
      self._rows[key] = row
    return row

  def _contents(self, key):
    # type: (Tuple[int, int, int]) -> np.ndarray
    data = self._rows.get(key)
    return self._initial(key) if data is None else data

  @property
  def num_materialized(self):
    # type: () -> int
    """Number of rows that hold their own storage."""
    return len(self._rows)

  def _line_slice(self, column):
    line = self._geometry.cacheline_bytes
    return slice(column * line, (column + 1) * line)

  def read_row(self, bank, subarray, row):
    # type: (int, int, int) -> np.ndarray
    return self._contents((bank, subarray, row)).copy()

  def write_row(self, bank, subarray, row, data):
    data = np.asarray(data, dtype=np.uint8).reshape(-1)
    if data.size != self._geometry.row_size_bytes:
      raise RequestError("Row data must be {} bytes, got {}".format(
          self._geometry.row_size_bytes, data.size))
    self._row((bank, subarray, row))[:] = data

  def read_line(self, bank, subarray, row, column):
    # type: (int, int, int, int) -> np.ndarray
    data = self._contents((bank, subarray, row))
    return data[self._line_slice(column)].copy()

  def write_line(self, bank, subarray, row, column, data):
    line = as_line(data, self._geometry.cacheline_bytes)
    self._row((bank, subarray, row))[self._line_slice(column)] = line

  def latch(self, bank, subarray, row):
    """Loads the row into the bank's row buffer (ACT)."""
    self._row_buffers[bank] = self._row((bank, subarray, row))

  def copy_buffer_to(self, bank, subarray, row):
    """Writes the bank's row buffer into another row and latches that row.

    This is the second ACTIVATE of a Fast Parallel Mode copy.
    """
    src = self._row_buffers[bank]
    dst = self._row((bank, subarray, row))
    if dst is not src:
      dst[:] = src
    self._row_buffers[bank] = dst

  def release(self, bank):
    """Drops the bank's row buffer (PRE)."""
    self._row_buffers.pop(bank, None)

  def row_buffer(self, bank):
    # type: (int) -> Optional[np.ndarray]
    """Returns a copy of the data latched in the bank, or None."""
    buf = self._row_buffers.get(bank)
    return None if buf is None else buf.copy()

  def buffer_line(self, bank, column):
    return self._row_buffers[bank][self._line_slice(column)].copy()

  def write_buffer_line(self, bank, column, data):
    line = as_line(data, self._geometry.cacheline_bytes)
    self._row_buffers[bank][self._line_slice(column)] = line

  def fill_random(self, rng, skip=()):
    # type: (np.random.RandomState, Iterable[Tuple[int, int, int]]) -> None
    """Fills every row except those in `skip` with random bytes."""
    skip = frozenset(skip)
    g = self._geometry
    for b, s in g.all_subarrays():
      for r in range(g.rows_per_subarray):
        if (b, s, r) in skip:
          continue
        self._row((b, s, r))[:] = rng.randint(0, 256, size=g.row_size_bytes,
                                              dtype=np.uint8)

  def copy(self):
    # type: () -> MemoryImage
    """Deep copy of the row contents; row buffers are not copied."""
    ret = MemoryImage(self._geometry, self._fill_seed, self._reserved)
    ret._pristine = self._pristine
    for key, row in iteritems(self._rows):
      ret._rows[key] = row.copy()
    return ret

  def first_difference(self, other):
    # type: (MemoryImage) -> Optional[Tuple[int, int, int]]
    """Returns the first row whose contents differ from `other`, or None."""
    for key in sorted(set(self._rows) | set(other._rows)):
      if not np.array_equal(self.read_row(*key), other.read_row(*key)):
        return key
    return None

  def equals(self, other):
    # type: (MemoryImage) -> bool
    return self.first_difference(other) is None


class Channel(object):
  """
  The processor-memory data channel as seen by the device.

  Counts the bytes driven on the bus and holds the controller-side staging
  buffer through which baseline copies and reads pass their cachelines.
  """

  def __init__(self):
    self.bytes_transferred = 0
    self.bursts = 0
    self._staging = {}  # type: Dict[Hashable, np.ndarray]

  def put(self, slot, line):
    self._staging[slot] = line

  def take(self, slot):
    # type: (Hashable) -> np.ndarray
    if slot not in self._staging:
      raise RequestError("No staged cacheline under slot {!r}".format(slot))
    return self._staging.pop(slot)

  def count_burst(self, nbytes):
    self.bytes_transferred += nbytes
    self.bursts += 1


class Dram(object):
  """
  One DRAM device: per-bank state machines, device-wide timing history, the
  memory image and the channel.

  A Dram is advanced only by `apply()`. Replaying the same command stream on
  two fresh instances gives identical images and completion times.
  """

  def __init__(self,
               geometry, # type: Geometry
               timing, # type: TimingParams
               fpm_enabled=False, # type: bool
               image=None # type: Optional[MemoryImage]
               ):
    """
    Args:
      geometry: Device organization.
      timing: Timing constraints.
      fpm_enabled: If True, every ACT to a precharged bank arms it for a
        Fast Parallel Mode copy, and a second ACT to the same subarray copies
        the latched row into the newly addressed row.
      image: Initial memory contents. A zeroed image is created if None.
    """
    self._geometry = geometry
    self._timing = timing
    self._fpm_enabled = fpm_enabled
    self._image = image if image is not None else MemoryImage(geometry)
    self._banks = [BankState() for _ in range(geometry.num_banks)]
    self._recent_acts = collections.deque(maxlen=4)
    self._last_rd = _NEVER
    self._last_wr = _NEVER
    self._last_transfer = _NEVER
    self._data_bus_free = _NEVER
    self._last_issue = _NEVER
    self._channel = Channel()
    self._command_counts = collections.Counter()
    self._fpm_copies = 0

  @property
  def geometry(self):
    return self._geometry

  @property
  def timing(self):
    return self._timing

  @property
  def fpm_enabled(self):
    return self._fpm_enabled

  @property
  def image(self):
    # type: () -> MemoryImage
    return self._image

  @property
  def channel(self):
    # type: () -> Channel
    return self._channel

  @property
  def banks(self):
    return util.ListView(self._banks)

  def bank(self, index):
    # type: (int) -> BankState
    return self._banks[index]

  @property
  def command_counts(self):
    return dict(self._command_counts)

  @property
  def fpm_copies(self):
    return self._fpm_copies

  @property
  def last_issue_time(self):
    return self._last_issue

  def _illegality(self, cmd):
    # type: (cmd_lib.Command) -> Optional[Tuple[str, str]]
    """Returns (kind, message) if `cmd` can never be legal right now."""
    bank = self._banks[cmd.bank]
    if cmd.kind == cmd_lib.ACT:
      if bank.phase == ACTIVATED:
        return (ProtocolError.ILLEGAL_TRANSITION,
                "ACT to bank {} with row {} open".format(cmd.bank, bank.row))
      if bank.phase == FPM_ARMED and cmd.subarray != bank.subarray:
        return (ProtocolError.FPM_CROSS_SUBARRAY,
                "ACT to subarray {} while bank {} holds a row of subarray {}"
                "".format(cmd.subarray, cmd.bank, bank.subarray))
    elif cmd.kind == cmd_lib.PRE:
      if not bank.is_open:
        return (ProtocolError.ILLEGAL_TRANSITION,
                "PRE to precharged bank {}".format(cmd.bank))
    else:
      for b in cmd.banks:
        if not self._banks[b].is_open:
          return (ProtocolError.ILLEGAL_TRANSITION,
                  "{} to precharged bank {}".format(cmd.kind, b))
    return None

  def _constraints(self, cmd):
    # type: (cmd_lib.Command) -> List[Tuple[str, float]]
    """Lists (constraint name, earliest time) pairs that apply to `cmd`.

    The order is the order in which violations are reported.
    """
    t = self._timing
    bank = self._banks[cmd.bank]
    out = [("command_order", self._last_issue)]
    if cmd.kind == cmd_lib.ACT:
      if bank.phase == FPM_ARMED:
        # Second ACT of an FPM copy: the source row must be fully restored.
        out.append(("tRAS", bank.last_act + t.tRAS))
      else:
        out.append(("tRC", bank.last_act + t.tRC))
        out.append(("tRP", bank.last_pre + t.tRP))
      others = [b.last_act for i, b in enumerate(self._banks) if i != cmd.bank]
      out.append(("tRRD", max(others) + t.tRRD if others else _NEVER))
      if len(self._recent_acts) == self._recent_acts.maxlen:
        out.append(("tFAW", self._recent_acts[0] + t.tFAW))
    elif cmd.kind == cmd_lib.PRE:
      out.append(("tRAS", bank.last_act + t.tRAS))
      out.append(("tRTP", bank.last_rd + t.tRTP))
      out.append(("tWR", bank.wr_data_end + t.tWR))
    elif cmd.kind == cmd_lib.RD:
      out.append(("tRCD", bank.last_act + t.tRCD))
      out.append(("tCCD", self._last_rd + t.tCCD))
      out.append(("data_bus", self._data_bus_free - t.CL))
    elif cmd.kind == cmd_lib.WR:
      out.append(("tRCD", bank.last_act + t.tRCD))
      out.append(("tCCD", self._last_wr + t.tCCD))
      out.append(("data_bus", self._data_bus_free - t.CWL))
    else:
      dst = self._banks[cmd.dst_bank]
      out.append(("tRCD", max(bank.last_act, dst.last_act) + t.tRCD))
      out.append(("tCCD", self._last_transfer + t.tCCD))
    return out

  def earliest_legal_time(self, cmd):
    # type: (cmd_lib.Command) -> float
    """
    Returns the smallest time >= `cmd.issue_time` at which every timing
    constraint on `cmd` holds.

    Raises:
      IllegalStateError: if `cmd` can never become legal from the current
        state (for example a RD to a precharged bank).
    """
    illegal = self._illegality(cmd)
    if illegal is not None:
      raise IllegalStateError(illegal[1])
    return max([cmd.issue_time] + [when for _, when in self._constraints(cmd)])

  def violation(self, cmd):
    # type: (cmd_lib.Command) -> Optional[Tuple[str, float]]
    """Returns (name, required time) of the first constraint `cmd` breaks."""
    for name, when in self._constraints(cmd):
      if cmd.issue_time + util.TIME_EPSILON < when:
        return name, when
    return None

  def completion_time(self, cmd):
    # type: (cmd_lib.Command) -> float
    t = self._timing
    if cmd.kind == cmd_lib.ACT:
      return cmd.issue_time + t.tRCD
    if cmd.kind == cmd_lib.PRE:
      return cmd.issue_time + t.tRP
    if cmd.kind == cmd_lib.RD:
      return cmd.issue_time + t.CL + t.tBURST
    if cmd.kind == cmd_lib.WR:
      return cmd.issue_time + t.CWL + t.tBURST
    return cmd.issue_time + t.tBURST

  def apply(self, cmd):
    # type: (cmd_lib.Command) -> float
    """
    Issue `cmd` to the device and perform its functional effect.

    Args:
      cmd: Command to issue; `cmd.issue_time` must be at least
        `earliest_legal_time(cmd)`.

    Returns:
      The completion time of the command.

    Raises:
      ProtocolError: with kind timing_violation (and the constraint name),
        illegal_transition or fpm_cross_subarray.
    """
    cmd.validate(self._geometry)
    illegal = self._illegality(cmd)
    if illegal is not None:
      raise ProtocolError(illegal[0], illegal[1])
    broken = self.violation(cmd)
    if broken is not None:
      raise ProtocolError(
          ProtocolError.TIMING_VIOLATION,
          "{} issued at {} but {} requires {}".format(cmd, cmd.issue_time,
                                                      broken[0], broken[1]),
          constraint=broken[0])

    now = cmd.issue_time
    t = self._timing
    bank = self._banks[cmd.bank]
    line_bytes = self._geometry.cacheline_bytes
    if cmd.kind == cmd_lib.ACT:
      if bank.phase == FPM_ARMED:
        self._image.copy_buffer_to(cmd.bank, cmd.subarray, cmd.row)
        self._fpm_copies += 1
        logging.debug("FPM copy in bank %s subarray %s: row %s -> row %s",
                      cmd.bank, cmd.subarray, bank.row, cmd.row)
        bank.phase = ACTIVATED
      else:
        self._image.latch(cmd.bank, cmd.subarray, cmd.row)
        bank.phase = FPM_ARMED if self._fpm_enabled else ACTIVATED
      bank.subarray = cmd.subarray
      bank.row = cmd.row
      bank.last_act = now
      self._recent_acts.append(now)
    elif cmd.kind == cmd_lib.PRE:
      self._image.release(cmd.bank)
      bank.phase = PRECHARGED
      bank.subarray = None
      bank.row = None
      bank.last_pre = now
    elif cmd.kind == cmd_lib.RD:
      line = self._image.buffer_line(cmd.bank, cmd.column)
      if cmd.slot is not None:
        self._channel.put(cmd.slot, line)
      self._channel.count_burst(line_bytes)
      bank.phase = ACTIVATED
      bank.last_rd = now
      self._last_rd = now
      self._data_bus_free = now + t.CL + t.tBURST
    elif cmd.kind == cmd_lib.WR:
      if cmd.data is not None:
        data = cmd.data
      elif cmd.slot is not None:
        data = self._channel.take(cmd.slot)
      else:
        raise RequestError("{} carries neither data nor a slot".format(cmd))
      self._image.write_buffer_line(cmd.bank, cmd.column, data)
      self._channel.count_burst(line_bytes)
      bank.phase = ACTIVATED
      bank.last_wr = now
      bank.wr_data_end = now + t.CWL + t.tBURST
      self._last_wr = now
      self._data_bus_free = now + t.CWL + t.tBURST
    else:
      dst = self._banks[cmd.dst_bank]
      line = self._image.buffer_line(cmd.bank, cmd.column)
      self._image.write_buffer_line(cmd.dst_bank, cmd.dst_column, line)
      bank.phase = ACTIVATED
      dst.phase = ACTIVATED
      bank.last_rd = now
      dst.last_wr = now
      dst.wr_data_end = now + t.tBURST
      self._last_transfer = now
    self._last_issue = now
    self._command_counts[cmd.kind] += 1
    return self.completion_time(cmd)
