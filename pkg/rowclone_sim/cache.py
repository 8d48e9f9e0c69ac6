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
"""Set-associative, write-back, LRU last-level cache with a CleanZero state."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import numpy as np
import sys
if sys.version >= '3':
  from typing import Iterable, List, Optional

from rowclone_sim import util


__all__ = [
  "INVALID",
  "CLEAN",
  "DIRTY",
  "CLEAN_ZERO",
  "CacheLine",
  "CacheState",
]

INVALID = "Invalid"
CLEAN = "Clean"
DIRTY = "Dirty"
CLEAN_ZERO = "CleanZero"


class CacheLine(object):
  __slots__ = ("addr", "state", "data")

  def __init__(self, addr, state, data=None):
    self.addr = addr
    self.state = state
    # None for CleanZero lines.
    self.data = data

  def read(self, line_bytes):
    # type: (int) -> np.ndarray
    if self.state == CLEAN_ZERO:
      return np.zeros(line_bytes, dtype=np.uint8)
    return self.data.copy()

  def __repr__(self):
    return "CacheLine[{:#x} {}]".format(self.addr, self.state)


class CacheState(object):
  """
  A set-associative cache indexed by physical cacheline address.

  Each set is an OrderedDict from line address to CacheLine kept in LRU
  order, least recently used first. A line that is not present is Invalid.
  """

  def __init__(self, capacity_bytes, associativity, line_bytes):
    # type: (int, int, int) -> None
    if capacity_bytes % (associativity * line_bytes) != 0:
      raise ValueError("Capacity {} is not a multiple of {} ways x {}B lines"
                       "".format(capacity_bytes, associativity, line_bytes))
    self._capacity = capacity_bytes
    self._ways = associativity
    self._line_bytes = line_bytes
    self._num_sets = capacity_bytes // (associativity * line_bytes)
    if not util.is_power_of_two(self._num_sets):
      raise ValueError("Number of sets {} is not a power of two"
                       "".format(self._num_sets))
    self._sets = [collections.OrderedDict() for _ in range(self._num_sets)]
    self.hits = 0
    self.misses = 0
    self.clean_zero_hits = 0

  @property
  def capacity_bytes(self):
    return self._capacity

  @property
  def associativity(self):
    return self._ways

  @property
  def line_bytes(self):
    return self._line_bytes

  @property
  def num_sets(self):
    return self._num_sets

  def _set(self, addr):
    return self._sets[(addr // self._line_bytes) % self._num_sets]

  def _check(self, addr):
    if addr % self._line_bytes != 0:
      raise ValueError("Cache address {:#x} is not line aligned".format(addr))

  def state(self, addr):
    # type: (int) -> str
    line = self._set(addr).get(addr)
    return INVALID if line is None else line.state

  def peek(self, addr):
    # type: (int) -> Optional[np.ndarray]
    """Data of a resident line without touching LRU order or counters."""
    line = self._set(addr).get(addr)
    return None if line is None else line.read(self._line_bytes)

  def lookup(self, addr):
    # type: (int) -> Optional[np.ndarray]
    """Data of `addr` on a hit (which becomes most recently used), else None.
    """
    self._check(addr)
    s = self._set(addr)
    line = s.get(addr)
    if line is None:
      self.misses += 1
      return None
    self.hits += 1
    if line.state == CLEAN_ZERO:
      self.clean_zero_hits += 1
    s.move_to_end(addr)
    return line.read(self._line_bytes)

  def insert(self, addr, state, data=None):
    # type: (int, str, Optional[np.ndarray]) -> Optional[CacheLine]
    """
    Install `addr` in `state`, replacing any resident copy.

    Args:
      addr: Line address.
      state: CLEAN, DIRTY or CLEAN_ZERO.
      data: Line contents; ignored for CLEAN_ZERO.

    Returns:
      The evicted victim line, or None.
    """
    self._check(addr)
    if state not in (CLEAN, DIRTY, CLEAN_ZERO):
      raise ValueError("Cannot insert a line in state '{}'".format(state))
    if state == CLEAN_ZERO:
      data = None
    else:
      data = np.array(data, dtype=np.uint8).reshape(-1).copy()
      if data.size != self._line_bytes:
        raise ValueError("Line data must be {} bytes".format(self._line_bytes))
    s = self._set(addr)
    s.pop(addr, None)
    victim = None
    if len(s) >= self._ways:
      _, victim = s.popitem(last=False)
    s[addr] = CacheLine(addr, state, data)
    return victim

  def mark_clean(self, addr):
    line = self._set(addr).get(addr)
    if line is not None and line.state == DIRTY:
      line.state = CLEAN

  def invalidate(self, addr):
    # type: (int) -> Optional[CacheLine]
    """Drop `addr` from the cache; returns the dropped line, if any."""
    return self._set(addr).pop(addr, None)

  def resident(self, addrs):
    # type: (Iterable[int]) -> List[CacheLine]
    """Resident lines among `addrs`, in the order given."""
    ret = []
    for a in addrs:
      line = self._set(a).get(a)
      if line is not None:
        ret.append(line)
    return ret

  def dirty_lines(self):
    # type: () -> List[CacheLine]
    return sorted((line for s in self._sets for line in s.values()
                   if line.state == DIRTY), key=lambda l: l.addr)

  def __len__(self):
    return sum(len(s) for s in self._sets)

  def __iter__(self):
    for s in self._sets:
      for line in s.values():
        yield line
