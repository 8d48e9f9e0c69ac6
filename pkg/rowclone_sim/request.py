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
request.py

High-level memory requests as software or a trace issues them, and the
mechanisms the controller can pick to carry them out.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import sys
if sys.version >= '3':
  from typing import Any, List, Optional, Set, Tuple

from rowclone_sim import util
from rowclone_sim.errors import AlignmentError, RequestError


__all__ = [
  "READ",
  "WRITE",
  "COPY",
  "ZERO",
  "REQUEST_KINDS",
  "Mechanism",
  "BulkRequest",
  "read",
  "write",
  "copy",
  "zero",
]

READ = "Read"
WRITE = "Write"
COPY = "Copy"
ZERO = "Zero"

REQUEST_KINDS = (READ, WRITE, COPY, ZERO)


class Mechanism(object):
  """Names of the ways a request can be carried out.

  Plain reads and writes are tagged with their own request kind so that
  statistics can be grouped by one key.
  """
  FPM = "FPM"
  PSM = "PSM"
  BASELINE_COPY = "BaselineCopy"
  BASELINE_ZERO = "BaselineZero"
  FPM_ZERO = "FpmZero"
  READ = READ
  WRITE = WRITE

  ALL = (FPM, PSM, BASELINE_COPY, BASELINE_ZERO, FPM_ZERO, READ, WRITE)
  IN_DRAM = frozenset([FPM, PSM, FPM_ZERO])
  BASELINE = frozenset([BASELINE_COPY, BASELINE_ZERO])


class BulkRequest(object):
  """
  A memory operation: Read(addr), Write(addr), Copy(src, dst, length) or
  Zero(dst, length).

  Read and Write move exactly one cacheline. `data` of a Write is either a
  fill byte or `cacheline_bytes` of literal data. `seq` is assigned by the
  controller on submission and breaks arrival-time ties.
  """
  __slots__ = ("kind", "src", "dst", "length", "arrival_time", "data", "seq")

  def __init__(self,
               kind, # type: str
               src=None, # type: Optional[int]
               dst=None, # type: Optional[int]
               length=0, # type: int
               arrival_time=0.0, # type: float
               data=None # type: Any
               ):
    if kind not in REQUEST_KINDS:
      raise ValueError("Unknown request kind '{}'".format(kind))
    self.kind = kind
    self.src = src
    self.dst = dst
    self.length = length
    self.arrival_time = float(arrival_time)
    self.data = data
    self.seq = None  # type: Optional[int]

  @property
  def addr(self):
    # type: () -> int
    """The single address of a Read or Write."""
    return self.src if self.kind == READ else self.dst

  def validate(self, mapping):
    """
    Check alignment, capacity and overlap rules.

    Raises:
      AlignmentError: if an address or length is not cacheline aligned.
      OutOfRangeError: if any byte lies outside the device.
      RequestError: if a length is not positive or Copy ranges overlap.
    """
    g = mapping.geometry
    if self.kind in (READ, WRITE):
      if not self.length:
        self.length = g.cacheline_bytes
      if self.length != g.cacheline_bytes:
        raise RequestError("{} must move exactly one cacheline".format(self))
    if self.length <= 0:
      raise RequestError("{} needs a positive length, got {}"
                         "".format(self, self.length))
    if self.length % g.cacheline_bytes != 0:
      raise AlignmentError("Length {:#x} of {} is not cacheline aligned"
                           "".format(self.length, self))
    for what, start in (("source", self.src), ("destination", self.dst)):
      if start is None:
        continue
      mapping.check_line_aligned(start, what)
      mapping.map(start)
      mapping.map(start + self.length - 1)
    if self.kind == COPY and util.intervals_overlap(
        (self.src, self.src + self.length), (self.dst, self.dst + self.length)):
      raise RequestError("Copy ranges overlap: {}".format(self))

  def reads(self):
    # type: () -> List[Tuple[int, int]]
    """Half-open byte ranges this request reads."""
    if self.kind in (READ, COPY):
      return [(self.src, self.src + self.length)]
    return []

  def writes(self):
    # type: () -> List[Tuple[int, int]]
    """Half-open byte ranges this request writes."""
    if self.kind in (WRITE, COPY, ZERO):
      return [(self.dst, self.dst + self.length)]
    return []

  def conflicts_with(self, other):
    # type: (BulkRequest) -> bool
    """True if reordering this request with `other` could change data."""
    return (util.any_overlap(self.writes(), other.writes()) or
            util.any_overlap(self.writes(), other.reads()) or
            util.any_overlap(self.reads(), other.writes()))

  def banks(self, mapping):
    # type: (Any) -> Set[int]
    """Banks holding any byte this request touches."""
    g = mapping.geometry
    step = g.row_size_bytes if mapping.row_contiguous else g.cacheline_bytes
    ret = set()
    for lo, hi in self.reads() + self.writes():
      addr = lo - lo % step
      while addr < hi:
        ret.add(mapping.map(addr)[0])
        addr += step
    return ret

  def __repr__(self):
    seq = "" if self.seq is None else "#{} ".format(self.seq)
    if self.kind in (READ, WRITE):
      body = "{:#x}".format(self.addr)
    elif self.kind == COPY:
      body = "{:#x} -> {:#x}, {:#x}".format(self.src, self.dst, self.length)
    else:
      body = "{:#x}, {:#x}".format(self.dst, self.length)
    return "{}{}({})@{}".format(seq, self.kind, body, self.arrival_time)


def read(addr, arrival_time=0.0, length=None):
  return BulkRequest(READ, src=addr, length=length or 0,
                     arrival_time=arrival_time)


def write(addr, data=0, arrival_time=0.0, length=None):
  return BulkRequest(WRITE, dst=addr, length=length or 0,
                     arrival_time=arrival_time, data=data)


def copy(src, dst, length, arrival_time=0.0):
  return BulkRequest(COPY, src=src, dst=dst, length=length,
                     arrival_time=arrival_time)


def zero(dst, length, arrival_time=0.0):
  return BulkRequest(ZERO, dst=dst, length=length, arrival_time=arrival_time)
