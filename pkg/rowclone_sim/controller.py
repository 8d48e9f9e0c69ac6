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
controller.py

The memory controller: admits requests, compiles them against the current
bank state, and issues their commands at the earliest legal time, producing a
Timeline and per-request latency records.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
from absl import logging
import numpy as np
import sys
if sys.version >= '3':
  from typing import Any, Dict, Iterable, List, Optional, Set, Tuple

from rowclone_sim import checker
from rowclone_sim import compiler
from rowclone_sim import dram as dram_lib
from rowclone_sim import request as req_lib
from rowclone_sim import util
from rowclone_sim.command import Command, RD
from rowclone_sim.errors import InvariantError, RequestError
from rowclone_sim.geometry import Geometry, TimingParams
from rowclone_sim.mapping import AddressMapping
from rowclone_sim.request import BulkRequest, Mechanism


__all__ = [
  "FIFO",
  "FRFCFS",
  "POLICIES",
  "TimelineEntry",
  "RequestRecord",
  "Timeline",
  "SimStats",
  "Controller",
  "schedule",
]

FIFO = "fifo"
FRFCFS = "frfcfs"
POLICIES = (FIFO, FRFCFS)


class TimelineEntry(object):
  __slots__ = ("command", "issue_time", "completion_time", "request_seq")

  def __init__(self, command, completion_time, request_seq):
    # type: (Command, float, Optional[int]) -> None
    self.command = command
    self.issue_time = command.issue_time
    self.completion_time = completion_time
    self.request_seq = request_seq

  def __repr__(self):
    return "TimelineEntry[#{} {} done@{}]".format(
        self.request_seq, self.command, self.completion_time)


class RequestRecord(object):
  """Latency and traffic of one finished request."""

  def __init__(self, seq, kind, mechanism, arrival_time, start_time, end_time,
               num_commands, channel_bytes):
    self.seq = seq
    self.kind = kind
    self.mechanism = mechanism
    self.arrival_time = arrival_time
    self.start_time = start_time
    self.end_time = end_time
    self.num_commands = num_commands
    self.channel_bytes = channel_bytes

  @property
  def latency(self):
    # type: () -> float
    return self.end_time - self.arrival_time

  def to_dict(self):
    return {
      "seq": self.seq,
      "kind": self.kind,
      "mechanism": self.mechanism,
      "arrival_time": self.arrival_time,
      "start_time": self.start_time,
      "end_time": self.end_time,
      "latency": self.latency,
      "num_commands": self.num_commands,
      "channel_bytes": self.channel_bytes,
    }

  def __repr__(self):
    return "RequestRecord[#{} {} {} latency={}]".format(
        self.seq, self.kind, self.mechanism, self.latency)


class Timeline(object):
  """
  Ordered issued commands with their completion times, plus the latency
  record of every finished request and the bytes driven on the channel.
  """

  def __init__(self, entries=None, records=None, channel_bytes=0,
               duration=None, fpm_enabled=True):
    self._entries = list(entries or [])  # type: List[TimelineEntry]
    self._records = list(records or [])  # type: List[RequestRecord]
    self.channel_bytes = channel_bytes
    self._duration = duration
    # Whether the device that ran these commands honours FPM double ACTs.
    self.fpm_enabled = fpm_enabled

  @property
  def entries(self):
    return util.ListView(self._entries)

  @property
  def records(self):
    return util.ListView(self._records)

  @property
  def commands(self):
    # type: () -> List[Command]
    return [e.command for e in self._entries]

  def record(self, seq):
    # type: (int) -> RequestRecord
    for r in self._records:
      if r.seq == seq:
        return r
    raise KeyError("No record for request #{}".format(seq))

  def append(self, entry):
    # type: (TimelineEntry) -> None
    self._entries.append(entry)

  def add_record(self, record):
    # type: (RequestRecord) -> None
    self._records.append(record)

  @property
  def duration(self):
    # type: () -> float
    """Time from the first issue to the last completion."""
    if self._duration is not None:
      return self._duration
    if not self._entries:
      return 0.0
    return (max(e.completion_time for e in self._entries) -
            min(e.issue_time for e in self._entries))

  def command_counts(self):
    # type: () -> Dict[str, int]
    return dict(collections.Counter(e.command.kind for e in self._entries))

  def verify(self, timing):
    # type: (TimingParams) -> None
    """Re-check the commands with the standalone checker.

    Raises:
      InvariantError: on any violation.
    """
    checker.assert_legal(self.commands, timing, self.fpm_enabled)

  def __add__(self, other):
    # type: (Timeline) -> Timeline
    """Concatenation of two independent timelines; durations add up."""
    return Timeline(self._entries + other._entries,
                    self._records + other._records,
                    self.channel_bytes + other.channel_bytes,
                    self.duration + other.duration,
                    self.fpm_enabled and other.fpm_enabled)

  def __len__(self):
    return len(self._entries)


class SimStats(object):
  """Aggregates of a Timeline: per-mechanism counts and latencies."""

  def __init__(self, timeline):
    # type: (Timeline) -> None
    self.mechanism_counts = collections.Counter()
    self.latencies = collections.defaultdict(list)
    for r in timeline.records:
      self.mechanism_counts[r.mechanism] += 1
      self.latencies[r.mechanism].append(r.latency)
    self.channel_bytes = timeline.channel_bytes
    self.duration = timeline.duration
    self.command_counts = timeline.command_counts()

  @property
  def read_latencies(self):
    # type: () -> List[float]
    return list(self.latencies.get(Mechanism.READ, []))

  def mean_latency(self, mechanism=None):
    # type: (Optional[str]) -> float
    if mechanism is None:
      values = [v for vs in self.latencies.values() for v in vs]
    else:
      values = self.latencies.get(mechanism, [])
    return float(np.mean(values)) if values else 0.0

  @property
  def mean_read_latency(self):
    return self.mean_latency(Mechanism.READ)

  @property
  def reads_per_us(self):
    # type: () -> float
    """Completed reads per microsecond of simulated time."""
    if self.duration <= 0:
      return 0.0
    return len(self.read_latencies) / (self.duration / 1000.0)

  def to_dict(self):
    return {
      "mechanism_counts": dict(self.mechanism_counts),
      "mean_latency": {m: self.mean_latency(m) for m in self.latencies},
      "channel_bytes": self.channel_bytes,
      "duration": self.duration,
      "command_counts": self.command_counts,
    }


class _Active(object):
  """A request whose command sequence is being issued."""
  __slots__ = ("request", "mechanism", "banks", "commands", "index",
               "last_issue", "start_time", "end_time", "channel_bytes")

  def __init__(self, request, mechanism, banks, commands):
    self.request = request
    self.mechanism = mechanism
    self.banks = banks
    self.commands = commands
    self.index = 0
    self.last_issue = float("-inf")
    self.start_time = None
    self.end_time = request.arrival_time
    self.channel_bytes = 0

  @property
  def next_command(self):
    # type: () -> Command
    return self.commands[self.index]

  @property
  def done(self):
    return self.index >= len(self.commands)


class Controller(object):
  """
  Request queue, scheduler and command issue loop on top of one Dram.

  Requests sharing a bank are admitted in submission order, so the commands
  of one compiled sequence run in order and requests on disjoint banks
  interleave freely. Under FR-FCFS, a single-line access that hits the open
  row of an idle bank may be admitted ahead of older requests blocked on that
  bank, as long as it has arrived and touches none of their bytes.
  """

  def __init__(self,
               geometry, # type: Geometry
               timing, # type: TimingParams
               mapping, # type: AddressMapping
               features, # type: Any
               policy=FIFO, # type: str
               zero_row=None, # type: Optional[int]
               image=None # type: Optional[dram_lib.MemoryImage]
               ):
    """
    Args:
      geometry: Device organization.
      timing: Timing parameters.
      mapping: Physical address mapping.
      features: Object with boolean attributes `rowclone`, `fpm` and `psm`.
      policy: FIFO or FRFCFS.
      zero_row: Row index reserved in every subarray as the zero source, or
        None for no reserved rows.
      image: Initial memory contents.
    """
    if policy not in POLICIES:
      raise ValueError("Unknown scheduling policy '{}'".format(policy))
    self._geometry = geometry
    self._timing = timing
    self._mapping = mapping
    self._features = features
    self._policy = policy
    self._zero_row = zero_row
    self._dram = dram_lib.Dram(geometry, timing,
                               fpm_enabled=features.rowclone and features.fpm,
                               image=image)
    self._pending = []  # type: List[BulkRequest]
    self._banks = {}  # type: Dict[int, Set[int]]
    self._active = []  # type: List[_Active]
    self._finished = set()  # type: Set[int]
    self._read_data = {}  # type: Dict[int, np.ndarray]
    self._kept_reads = set()  # type: Set[int]
    self._timeline = Timeline(fpm_enabled=self._dram.fpm_enabled)
    self._next_seq = 0

  @property
  def dram(self):
    # type: () -> dram_lib.Dram
    return self._dram

  @property
  def image(self):
    return self._dram.image

  @property
  def mapping(self):
    return self._mapping

  @property
  def timeline(self):
    # type: () -> Timeline
    return self._timeline

  @property
  def zero_row(self):
    return self._zero_row

  @property
  def idle(self):
    # type: () -> bool
    return not self._pending and not self._active

  def _check_reserved(self, request):
    if self._zero_row is None:
      return
    g = self._geometry
    step = (g.row_size_bytes if self._mapping.row_contiguous
            else g.cacheline_bytes)
    for lo, hi in request.writes():
      addr = lo - lo % step
      while addr < hi:
        if self._mapping.map(addr)[2] == self._zero_row:
          raise RequestError("{} writes the reserved zero row at {:#x}"
                             "".format(request, addr))
        addr += step

  def submit(self, request, keep_data=True):
    # type: (BulkRequest, bool) -> int
    """
    Queue a request.

    Args:
      request: The request to queue.
      keep_data: For a Read, whether to hold its data until `read_result`
        collects it. Callers that never collect should pass False.

    Returns:
      The sequence number assigned to the request.

    Raises:
      AlignmentError, OutOfRangeError, RequestError: if the request is
        malformed or writes a reserved zero row.
    """
    request.validate(self._mapping)
    self._check_reserved(request)
    request.seq = self._next_seq
    self._next_seq += 1
    if keep_data and request.kind == req_lib.READ:
      self._kept_reads.add(request.seq)
    self._banks[request.seq] = request.banks(self._mapping)
    self._pending.append(request)
    logging.debug("Submitted %s", request)
    return request.seq

  def _open_rows(self):
    return {i: (b.subarray, b.row) for i, b in enumerate(self._dram.banks)
            if b.is_open}

  def _start(self, request):
    mechanism = compiler.mechanism_for(request, self._mapping, self._features)
    if mechanism == Mechanism.FPM_ZERO and self._zero_row is None:
      logging.warning("No reserved zero row; %s falls back to %s", request,
                      Mechanism.BASELINE_ZERO)
      mechanism = Mechanism.BASELINE_ZERO
    commands = compiler.compile_request(request, mechanism, self._mapping,
                                        zero_rows=self._zero_row,
                                        open_rows=self._open_rows())
    self._active.append(_Active(request, mechanism, self._banks[request.seq],
                                commands))
    logging.debug("Admitted %s as %s (%d commands)", request, mechanism,
                  len(commands))

  def _now(self):
    t = self._dram.last_issue_time
    return t if t > float("-inf") else 0.0

  def _row_hit(self, request):
    if request.kind not in (req_lib.READ, req_lib.WRITE):
      return False
    b, s, r, _ = self._mapping.map(request.addr)
    bank = self._dram.bank(b)
    return bank.is_open and (bank.subarray, bank.row) == (s, r)

  def _admit(self):
    busy = set()
    for a in self._active:
      busy |= a.banks
    claimed = set()
    blocked = []  # type: List[BulkRequest]
    remaining = []
    now = self._now()
    for request in self._pending:
      banks = self._banks[request.seq]
      if not banks & busy and not banks & claimed:
        self._start(request)
        busy |= banks
        continue
      if (self._policy == FRFCFS and not banks & busy and
          request.arrival_time <= now and self._row_hit(request) and
          not any(request.conflicts_with(o) for o in blocked)):
        logging.debug("FR-FCFS row hit %s bypasses %d queued request(s)",
                      request, len(blocked))
        self._start(request)
        busy |= banks
        continue
      claimed |= banks
      blocked.append(request)
      remaining.append(request)
    self._pending = remaining

  def _pick(self):
    best = None
    for a in self._active:
      cmd = a.next_command
      t = max(a.request.arrival_time, a.last_issue,
              self._dram.last_issue_time)
      t = self._dram.earliest_legal_time(cmd.at(t))
      prefer = 0 if (self._policy == FRFCFS and cmd.is_column) else 1
      key = (t, prefer, a.request.seq)
      if best is None or key < best[0]:
        best = (key, a, t)
    return best[1], best[2]

  def step(self):
    # type: () -> bool
    """Issue one command. Returns False if there was nothing to issue."""
    self._admit()
    if not self._active:
      return False
    active, t = self._pick()
    cmd = active.next_command.at(t)
    before = self._dram.channel.bytes_transferred
    completion = self._dram.apply(cmd)
    moved = self._dram.channel.bytes_transferred - before
    seq = active.request.seq
    if cmd.kind == RD and cmd.slot == (seq, "read"):
      data = self._dram.channel.take(cmd.slot)
      if seq in self._kept_reads:
        self._kept_reads.discard(seq)
        self._read_data[seq] = data
    self._timeline.append(TimelineEntry(cmd, completion, seq))
    self._timeline.channel_bytes += moved
    active.channel_bytes += moved
    active.index += 1
    active.last_issue = t
    if active.start_time is None:
      active.start_time = t
    active.end_time = max(active.end_time, completion)
    if active.done:
      self._finish(active)
    return True

  def _finish(self, active):
    self._active.remove(active)
    request = active.request
    record = RequestRecord(request.seq, request.kind, active.mechanism,
                           request.arrival_time, active.start_time,
                           active.end_time, len(active.commands),
                           active.channel_bytes)
    self._timeline.add_record(record)
    self._finished.add(request.seq)
    logging.debug("Finished %s: latency %s", request, record.latency)

  def run_until(self, seq):
    # type: (int) -> RequestRecord
    """Issue commands until request `seq` has issued all of its commands."""
    while seq not in self._finished:
      if not self.step():
        raise InvariantError("Request #{} was never scheduled".format(seq))
    return self._timeline.record(seq)

  def drain(self):
    # type: () -> Timeline
    """Issue every queued command and return the timeline."""
    while self.step():
      pass
    return self._timeline

  @property
  def held_reads(self):
    # type: () -> int
    """Number of finished Reads whose data is waiting for `read_result`."""
    return len(self._read_data)

  def read_result(self, seq):
    # type: (int) -> np.ndarray
    """Data returned by finished Read request `seq`."""
    if seq not in self._read_data:
      raise KeyError("Read #{} has not returned data".format(seq))
    return self._read_data.pop(seq)

  def stats(self):
    # type: () -> SimStats
    return SimStats(self._timeline)


def schedule(requests, # type: Iterable[BulkRequest]
             geometry, # type: Geometry
             timing, # type: TimingParams
             mapping, # type: AddressMapping
             features, # type: Any
             policy=FIFO, # type: str
             zero_row=None, # type: Optional[int]
             image=None, # type: Optional[dram_lib.MemoryImage]
             keep_reads=True # type: bool
             ):
  # type: (...) -> Tuple[Timeline, SimStats, Controller]
  """
  Run a request stream to completion on a fresh controller.

  Returns:
    (timeline, stats, controller). The controller gives access to the final
    memory image and, unless `keep_reads` is False, to the data of every
    Read.
  """
  ctrl = Controller(geometry, timing, mapping, features, policy=policy,
                    zero_row=zero_row, image=image)
  for r in requests:
    ctrl.submit(r, keep_data=keep_reads)
  timeline = ctrl.drain()
  return timeline, SimStats(timeline), ctrl
