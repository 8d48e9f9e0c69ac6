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
Flat reference interpreters.

Both models perform every copy and initialization instantly on a plain byte
array, with no banks, timing, caches or page sharing. The differential tests
compare the simulator against them.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import numpy as np
import sys
if sys.version >= '3':
  from typing import Any, Dict, Iterable, Optional

from rowclone_sim import dram as dram_lib
from rowclone_sim import request as req_lib
from rowclone_sim.mapping import AddressMapping


__all__ = [
  "image_to_flat",
  "FlatMemoryModel",
  "FlatProcessModel",
]


def image_to_flat(image, mapping):
  # type: (dram_lib.MemoryImage, AddressMapping) -> np.ndarray
  """Lays a MemoryImage out in physical address order."""
  g = mapping.geometry
  flat = np.zeros(g.total_bytes, dtype=np.uint8)
  line = g.cacheline_bytes
  size = g.row_size_bytes
  for b, s in g.all_subarrays():
    for r in range(g.rows_per_subarray):
      data = image.read_row(b, s, r)
      if mapping.row_contiguous:
        base = mapping.row_base(b, s, r)
        flat[base:base + size] = data
        continue
      for c in range(g.columns_per_row):
        addr = mapping.inverse(b, s, r, c)
        flat[addr:addr + line] = data[c * line:(c + 1) * line]
  return flat


class FlatMemoryModel(object):
  """Physical memory as one byte array."""

  def __init__(self, mapping, image=None):
    # type: (AddressMapping, Optional[dram_lib.MemoryImage]) -> None
    self._mapping = mapping
    self._line = mapping.geometry.cacheline_bytes
    if image is None:
      self.memory = np.zeros(mapping.geometry.total_bytes, dtype=np.uint8)
    else:
      self.memory = image_to_flat(image, mapping)

  def apply(self, request):
    # type: (req_lib.BulkRequest) -> Optional[np.ndarray]
    """Performs `request`; returns the line a Read returns."""
    if request.kind == req_lib.READ:
      return self.memory[request.src:request.src + self._line].copy()
    if request.kind == req_lib.WRITE:
      self.memory[request.dst:request.dst + self._line] = dram_lib.as_line(
          request.data, self._line)
    elif request.kind == req_lib.COPY:
      self.memory[request.dst:request.dst + request.length] = \
          self.memory[request.src:request.src + request.length]
    else:
      self.memory[request.dst:request.dst + request.length] = 0
    return None

  def run(self, requests):
    # type: (Iterable[req_lib.BulkRequest]) -> list
    return [self.apply(r) for r in requests]

  def matches(self, image):
    # type: (dram_lib.MemoryImage) -> bool
    return np.array_equal(self.memory, image_to_flat(image, self._mapping))


class FlatProcessModel(object):
  """
  Processes as independent virtual byte spaces. fork copies the whole space
  eagerly, so there is no sharing to get wrong.
  """

  def __init__(self, page_bytes):
    # type: (int) -> None
    self._page_bytes = page_bytes
    self._spaces = collections.OrderedDict()  # type: Dict[int, Dict[int, np.ndarray]]
    self._next_pid = 0

  def create_process(self):
    pid = self._next_pid
    self._next_pid += 1
    self._spaces[pid] = {}
    return pid

  def map_pages(self, pid, count):
    space = self._spaces[pid]
    start = max(space) + 1 if space else 0
    for vpage in range(start, start + count):
      space[vpage] = np.zeros(self._page_bytes, dtype=np.uint8)
    return list(range(start, start + count))

  def fork(self, pid):
    child = self.create_process()
    self._spaces[child] = {v: p.copy() for v, p in self._spaces[pid].items()}
    return child

  def _bytes(self, pid, vaddr, length):
    out = np.zeros(length, dtype=np.uint8)
    for i in range(length):
      vpage, off = divmod(vaddr + i, self._page_bytes)
      out[i] = self._spaces[pid][vpage][off]
    return out

  def _store(self, pid, vaddr, data):
    for i, byte in enumerate(data):
      vpage, off = divmod(vaddr + i, self._page_bytes)
      self._spaces[pid][vpage][off] = byte

  def read(self, pid, vaddr, length):
    # type: (int, int, int) -> np.ndarray
    return self._bytes(pid, vaddr, length)

  def write(self, pid, vaddr, data):
    # type: (int, int, Any) -> None
    self._store(pid, vaddr, np.asarray(data, dtype=np.uint8).reshape(-1))

  def memcopy(self, pid, src, dst, length):
    self._store(pid, dst, self._bytes(pid, src, length))

  def meminit(self, pid, dst, length, value):
    self._store(pid, dst, np.full(length, value, dtype=np.uint8))

  def pages(self, pid):
    return sorted(self._spaces[pid])
