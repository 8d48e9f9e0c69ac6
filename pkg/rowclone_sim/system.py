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
system.py

The software side of the memory system: a subarray-aware page allocator with
reserved zero rows, processes with Copy-on-Write page tables and fork, the
memcopy/meminit entry points, and the cache coherence work (including the
RowClone-ZI in-cache copy and clean-zero insertion) that precedes every bulk
operation.

One page is one DRAM row, so the system layer needs an address mapping in
which every row is contiguous.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import heapq
from absl import logging
import numpy as np
from six import iteritems
import sys
if sys.version >= '3':
  from typing import Any, Dict, List, Optional, Set, Tuple

from rowclone_sim import cache as cache_lib
from rowclone_sim import dram as dram_lib
from rowclone_sim import request as req_lib
from rowclone_sim import util
from rowclone_sim.controller import Controller, Timeline
from rowclone_sim.errors import (AlignmentError, AllocError, ConfigError,
                                 RequestError)
from rowclone_sim.mapping import AddressMapping
from rowclone_sim.request import BulkRequest


__all__ = [
  "PageTableEntry",
  "Process",
  "PageTableState",
  "CoherenceResult",
  "SystemStats",
  "System",
]


class PageTableEntry(object):
  __slots__ = ("ppn", "writable")

  def __init__(self, ppn, writable):
    # type: (int, bool) -> None
    self.ppn = ppn
    self.writable = writable

  def __repr__(self):
    return "PageTableEntry[ppn={} {}]".format(self.ppn,
                                              "rw" if self.writable else "ro")


class Process(object):
  """A process: its id and its map from virtual page to page table entry."""

  def __init__(self, pid):
    # type: (int) -> None
    self.pid = pid
    self.pages = collections.OrderedDict()  # type: Dict[int, PageTableEntry]

  @property
  def next_vpage(self):
    # type: () -> int
    return max(self.pages) + 1 if self.pages else 0

  def entry(self, vpage):
    # type: (int) -> PageTableEntry
    if vpage not in self.pages:
      raise RequestError("Virtual page {} is not mapped in process {}"
                         "".format(vpage, self.pid))
    return self.pages[vpage]


class PageTableState(object):
  """
  Physical page allocator and reference counts.

  Free pages are kept in one min-heap per (bank, subarray) and in one global
  min-heap. Both heaps are lazy: an entry is only valid while its page is in
  `_free`. The reserved zero row of every subarray is never free.
  """

  def __init__(self, mapping, zero_row=None):
    # type: (AddressMapping, Optional[int]) -> None
    if not mapping.row_contiguous:
      raise ConfigError("mapping.field_order",
                        "pages map to rows only when column is the least "
                        "significant field")
    g = mapping.geometry
    self._mapping = mapping
    self._zero_row = zero_row
    self._page_bytes = g.row_size_bytes
    self._num_pages = g.total_bytes // g.row_size_bytes

    ppns = np.arange(self._num_pages, dtype=np.int64)
    addrs = ppns * self._page_bytes

    def field(name):
      return ((addrs >> mapping.shift(name)) &
              ((1 << mapping.width(name)) - 1))

    banks, subarrays, rows = field("bank"), field("subarray"), field("row")
    reserved = (rows == zero_row) if zero_row is not None else \
        np.zeros(self._num_pages, dtype=bool)
    self._reserved = frozenset(int(p) for p in ppns[reserved])
    self._free_heaps = {}  # type: Dict[Tuple[int, int], List[int]]
    for b, s in g.all_subarrays():
      members = ppns[(banks == b) & (subarrays == s) & ~reserved]
      # Already ascending, hence a valid heap.
      self._free_heaps[(b, s)] = [int(p) for p in members]
    self._global_heap = [int(p) for p in ppns[~reserved]]
    self._free = set(self._global_heap)  # type: Set[int]
    self.refcount = {}  # type: Dict[int, int]
    self.sharers = collections.defaultdict(set)
    self.fallbacks = 0

  @property
  def page_bytes(self):
    return self._page_bytes

  @property
  def num_pages(self):
    return self._num_pages

  @property
  def num_free(self):
    return len(self._free)

  @property
  def reserved(self):
    return self._reserved

  def location(self, ppn):
    # type: (int) -> Tuple[int, int, int]
    """(bank, subarray, row) of physical page `ppn`."""
    return self._mapping.row_of(ppn * self._page_bytes)

  def subarray_of(self, ppn):
    # type: (int) -> Tuple[int, int]
    return self.location(ppn)[:2]

  def is_reserved(self, ppn):
    return ppn in self._reserved

  def free_pages(self, bank, subarray):
    # type: (int, int) -> List[int]
    return sorted(p for p in set(self._free_heaps[(bank, subarray)])
                  if p in self._free)

  def _pop(self, heap):
    while heap:
      ppn = heapq.heappop(heap)
      if ppn in self._free:
        return ppn
    return None

  def alloc_page(self, hint=None):
    # type: (Optional[int]) -> int
    """
    Allocate a physical page.

    Args:
      hint: Optional physical page; if given, a page from the same (bank,
        subarray) is preferred.

    Returns:
      The lowest-numbered free page of the hinted subarray, or, without a
      hint or when that subarray is exhausted, the lowest-numbered free page
      anywhere. Falling back from a hint increments `fallbacks`.

    Raises:
      AllocError: if no page is free.
    """
    ppn = None
    if hint is not None:
      ppn = self._pop(self._free_heaps[self.subarray_of(hint)])
      if ppn is None:
        self.fallbacks += 1
        logging.warning("Subarray %s of page %s is full; allocating elsewhere",
                        self.subarray_of(hint), hint)
    if ppn is None:
      ppn = self._pop(self._global_heap)
    if ppn is None:
      raise AllocError("out_of_memory: all {} allocatable pages are in use"
                       "".format(self._num_pages - len(self._reserved)))
    self._free.discard(ppn)
    self.refcount[ppn] = 0
    return ppn

  def free_page(self, ppn):
    # type: (int) -> None
    if ppn in self._free or ppn in self._reserved:
      raise ValueError("Page {} is not allocated".format(ppn))
    self._free.add(ppn)
    self.refcount.pop(ppn, None)
    self.sharers.pop(ppn, None)
    heapq.heappush(self._free_heaps[self.subarray_of(ppn)], ppn)
    heapq.heappush(self._global_heap, ppn)

  def add_mapping(self, ppn, pid, vpage):
    self.refcount[ppn] = self.refcount.get(ppn, 0) + 1
    self.sharers[ppn].add((pid, vpage))

  def remove_mapping(self, ppn, pid, vpage):
    self.refcount[ppn] -= 1
    self.sharers[ppn].discard((pid, vpage))


class CoherenceResult(object):
  """What `coherence_prepare` did to the cache before a bulk operation."""

  def __init__(self):
    self.writebacks = []  # type: List[BulkRequest]
    self.invalidations = 0
    self.in_cache_copies = 0
    self.clean_zero_inserts = 0

  def __repr__(self):
    return ("CoherenceResult[{} writebacks, {} invalidations, {} in-cache "
            "copies, {} clean-zero inserts]".format(
                len(self.writebacks), self.invalidations,
                self.in_cache_copies, self.clean_zero_inserts))


class SystemStats(object):

  FIELDS = ("cow_faults", "last_sharer_flips", "coherence_writebacks",
            "eviction_writebacks", "invalidations", "zi_in_cache_copies",
            "zi_clean_zero_inserts", "dram_reads", "dram_writes")

  def __init__(self):
    for f in self.FIELDS:
      setattr(self, f, 0)

  def to_dict(self):
    return {f: getattr(self, f) for f in self.FIELDS}


class System(object):
  """
  Processes, page tables, allocator and cache in front of one Controller.

  Requests are submitted with the current system time (see `advance`) as
  their arrival time. Reads that must return data to the cache run the
  controller until the read has been issued.
  """

  def __init__(self,
               controller, # type: Controller
               cache=None, # type: Optional[cache_lib.CacheState]
               zi=False, # type: bool
               zero_on_alloc=False # type: bool
               ):
    """
    Args:
      controller: Memory controller; its mapping must be row-contiguous.
      cache: Last-level cache, or None to send every access to DRAM.
      zi: Enable the RowClone-ZI in-cache copy and clean-zero insertion.
      zero_on_alloc: Zero every newly mapped page with a Zero request.
    """
    self._controller = controller
    self._mapping = controller.mapping
    self._geometry = self._mapping.geometry
    self._page_table = PageTableState(self._mapping, controller.zero_row)
    self._cache = cache
    self._zi = zi
    self._zero_on_alloc = zero_on_alloc
    self._processes = collections.OrderedDict()  # type: Dict[int, Process]
    self._next_pid = 0
    self._now = 0.0
    self._cow_seqs = []  # type: List[int]
    self.stats = SystemStats()

  @property
  def controller(self):
    return self._controller

  @property
  def page_table(self):
    # type: () -> PageTableState
    return self._page_table

  @property
  def cache(self):
    return self._cache

  @property
  def page_bytes(self):
    return self._page_table.page_bytes

  @property
  def now(self):
    return self._now

  @property
  def processes(self):
    return util.ListView(list(self._processes.values()))

  def process(self, pid):
    # type: (int) -> Process
    if pid not in self._processes:
      raise RequestError("No process with pid {}".format(pid))
    return self._processes[pid]

  def advance(self, t):
    # type: (float) -> None
    """Move the system clock forward to `t`."""
    self._now = max(self._now, float(t))

  def _submit(self, request, keep_data=True):
    # type: (BulkRequest, bool) -> BulkRequest
    request.arrival_time = self._now
    self._controller.submit(request, keep_data=keep_data)
    return request

  ##############################################################################
  # Processes and pages

  def create_process(self):
    # type: () -> int
    pid = self._next_pid
    self._next_pid += 1
    self._processes[pid] = Process(pid)
    return pid

  def map_pages(self, pid, count):
    # type: (int, int) -> List[int]
    """Map `count` fresh, writable pages at the end of the process' space."""
    proc = self.process(pid)
    vpages = []
    for _ in range(count):
      vpage = proc.next_vpage
      ppn = self._page_table.alloc_page()
      self._page_table.add_mapping(ppn, pid, vpage)
      proc.pages[vpage] = PageTableEntry(ppn, True)
      vpages.append(vpage)
      if self._zero_on_alloc:
        self.meminit(ppn * self.page_bytes, self.page_bytes, 0)
    return vpages

  def fork(self, parent):
    # type: (int) -> int
    """
    Create a child sharing every page of `parent`.

    Both the parent's and the child's mappings become read-only and every
    shared page gains one reference. No memory request is emitted.
    """
    proc = self.process(parent)
    child = self.create_process()
    child_proc = self._processes[child]
    for vpage, e in iteritems(proc.pages):
      e.writable = False
      child_proc.pages[vpage] = PageTableEntry(e.ppn, False)
      self._page_table.add_mapping(e.ppn, child, vpage)
    logging.debug("fork %s -> %s sharing %d pages", parent, child,
                  len(proc.pages))
    return child

  def translate(self, pid, vaddr):
    # type: (int, int) -> int
    vpage, off = divmod(vaddr, self.page_bytes)
    return self.process(pid).entry(vpage).ppn * self.page_bytes + off

  def cow_write(self, pid, vpage):
    # type: (int, int) -> Optional[BulkRequest]
    """
    Resolve a write fault on a Copy-on-Write page.

    A page still shared gets a private copy, allocated in the source's
    subarray when possible, and the writer is remapped to it. When only one
    mapping remains, that mapping becomes writable without a copy.

    Returns:
      The Copy request, or None if no copy was needed.

    Raises:
      AllocError: if no page is free.
    """
    entry = self.process(pid).entry(vpage)
    if entry.writable:
      return None
    src = entry.ppn
    pt = self._page_table
    if pt.refcount[src] == 1:
      entry.writable = True
      self.stats.last_sharer_flips += 1
      return None
    dst = pt.alloc_page(hint=src)
    copies = self.memcopy(src * self.page_bytes, dst * self.page_bytes,
                          self.page_bytes)
    pt.remove_mapping(src, pid, vpage)
    pt.add_mapping(dst, pid, vpage)
    entry.ppn = dst
    entry.writable = True
    self.stats.cow_faults += 1
    self._cow_seqs.extend(r.seq for r in copies)
    if pt.refcount[src] == 1:
      (other_pid, other_vpage), = pt.sharers[src]
      self._processes[other_pid].pages[other_vpage].writable = True
      self.stats.last_sharer_flips += 1
    return copies[0]

  def cow_mechanisms(self):
    # type: () -> Dict[str, int]
    """Mechanism counts of the CoW copies finished so far."""
    wanted = set(self._cow_seqs)
    counts = collections.Counter(r.mechanism
                                 for r in self._controller.timeline.records
                                 if r.seq in wanted)
    return dict(counts)

  ##############################################################################
  # Physical accesses

  def _check_line(self, addr):
    self._mapping.check_line_aligned(addr)
    self._mapping.map(addr)

  def _check_not_reserved(self, addr):
    if self._page_table.is_reserved(addr // self.page_bytes):
      raise RequestError("Address {:#x} lies in a reserved zero row"
                         "".format(addr))

  def _install(self, addr, state, data=None):
    victim = self._cache.insert(addr, state, data)
    if victim is not None and victim.state == cache_lib.DIRTY:
      self._submit(req_lib.write(victim.addr, data=victim.data))
      self.stats.eviction_writebacks += 1
      self.stats.dram_writes += 1

  def read(self, paddr, blocking=True):
    # type: (int, bool) -> Optional[np.ndarray]
    """
    Read one cacheline at physical address `paddr`.

    With a cache, a miss fetches the line from DRAM and installs it Clean.
    Without a cache and with `blocking` False, the Read is only queued and
    None is returned.
    """
    self._check_line(paddr)
    if self._cache is not None:
      data = self._cache.lookup(paddr)
      if data is not None:
        return data
    request = self._submit(req_lib.read(paddr),
                           keep_data=self._cache is not None or blocking)
    self.stats.dram_reads += 1
    if self._cache is None and not blocking:
      return None
    self._controller.run_until(request.seq)
    data = self._controller.read_result(request.seq)
    if self._cache is not None:
      self._install(paddr, cache_lib.CLEAN, data)
    return data

  def write(self, paddr, data):
    # type: (int, Any) -> None
    """Write one full cacheline (a fill byte or line-sized data)."""
    self._check_line(paddr)
    self._check_not_reserved(paddr)
    line = dram_lib.as_line(data, self._geometry.cacheline_bytes)
    if self._cache is not None:
      self._install(paddr, cache_lib.DIRTY, line)
    else:
      self._submit(req_lib.write(paddr, data=line))
      self.stats.dram_writes += 1

  def read_virtual(self, pid, vaddr):
    # type: (int, int) -> np.ndarray
    return self.read(self.translate(pid, vaddr))

  def write_virtual(self, pid, vaddr, data):
    # type: (int, int, Any) -> None
    """Write through the page table, taking a CoW fault if needed."""
    vpage = vaddr // self.page_bytes
    if not self.process(pid).entry(vpage).writable:
      self.cow_write(pid, vpage)
    self.write(self.translate(pid, vaddr), data)

  ##############################################################################
  # Bulk operations

  def _check_bulk(self, length, *addrs):
    if length <= 0:
      raise RequestError("Bulk length must be positive, got {}"
                         "".format(length))
    line = self._geometry.cacheline_bytes
    if length % line != 0:
      raise AlignmentError("Bulk length {:#x} is not cacheline aligned"
                           "".format(length))
    for a in addrs:
      self._mapping.check_line_aligned(a)

  def _chunks(self, src, dst, length):
    """Splits a range so no chunk crosses a row boundary on either side."""
    row = self.page_bytes
    off = 0
    while off < length:
      s, d = src + off, dst + off
      n = min(length - off, row - s % row, row - d % row)
      yield s, d, n
      off += n

  def coherence_prepare(self, src, dst, length, zero=False):
    # type: (Optional[int], int, int, bool) -> CoherenceResult
    """
    Make the cache consistent with a bulk operation about to run in DRAM.

    Dirty source lines are written back, then every destination line is
    invalidated. With RowClone-ZI, cached source lines are then copied into
    their destination tags as Dirty lines, and a zeroing inserts every
    destination line as CleanZero.

    Args:
      src: Source address of a copy, or None for an initialization.
      dst: Destination address.
      length: Bytes affected.
      zero: True if the destination is being zeroed.
    """
    result = CoherenceResult()
    if self._cache is None:
      return result
    src_lines = list(self._mapping.lines(src, length)) if src is not None \
        else []
    resident = self._cache.resident(src_lines)
    for line in resident:
      if line.state == cache_lib.DIRTY:
        request = self._submit(req_lib.write(line.addr, data=line.data.copy()))
        self._cache.mark_clean(line.addr)
        result.writebacks.append(request)
    snapshot = [(line.addr, line.read(self._geometry.cacheline_bytes))
                for line in resident]
    for addr in self._mapping.lines(dst, length):
      if self._cache.invalidate(addr) is not None:
        result.invalidations += 1
    if self._zi:
      if zero:
        for addr in self._mapping.lines(dst, length):
          self._install(addr, cache_lib.CLEAN_ZERO)
          result.clean_zero_inserts += 1
      elif src is not None:
        for addr, data in snapshot:
          self._install(dst + (addr - src), cache_lib.DIRTY, data)
          result.in_cache_copies += 1
    self.stats.coherence_writebacks += len(result.writebacks)
    self.stats.dram_writes += len(result.writebacks)
    self.stats.invalidations += result.invalidations
    self.stats.zi_in_cache_copies += result.in_cache_copies
    self.stats.zi_clean_zero_inserts += result.clean_zero_inserts
    return result

  def memcopy(self, src, dst, length):
    # type: (int, int, int) -> List[BulkRequest]
    """
    Copy [src, src + length) to [dst, dst + length) in physical memory.

    Returns:
      The Copy requests, one per piece that stays within one source row and
      one destination row.

    Raises:
      AlignmentError: for unaligned arguments.
      RequestError: if the ranges overlap.
    """
    self._check_bulk(length, src, dst)
    if util.intervals_overlap((src, src + length), (dst, dst + length)):
      raise RequestError("memcopy ranges overlap: {:#x} -> {:#x}, {:#x}"
                         "".format(src, dst, length))
    self.coherence_prepare(src, dst, length)
    return [self._submit(req_lib.copy(s, d, n))
            for s, d, n in self._chunks(src, dst, length)]

  def meminit(self, dst, length, value):
    # type: (int, int, int) -> List[BulkRequest]
    """
    Fill [dst, dst + length) with byte `value`.

    Zero becomes one Zero request per row piece. Any other value is written
    with cacheline writes into the first whole row, which then seeds Copy
    requests to every other whole row; partial rows get cacheline writes.
    """
    self._check_bulk(length, dst)
    if not 0 <= value <= 0xFF:
      raise RequestError("meminit value {} does not fit in a byte"
                         "".format(value))
    self.coherence_prepare(None, dst, length, zero=value == 0)
    pieces = list(self._chunks(dst, dst, length))
    if value == 0:
      return [self._submit(req_lib.zero(d, n)) for d, _, n in pieces]

    requests = []
    whole = [d for d, _, n in pieces if n == self.page_bytes]
    seed = whole[0] if whole else None
    for d, _, n in pieces:
      if seed is not None and d != seed and n == self.page_bytes:
        requests.append(self._submit(req_lib.copy(seed, d, n)))
        continue
      for addr in self._mapping.lines(d, n):
        requests.append(self._submit(req_lib.write(addr, data=value)))
        self.stats.dram_writes += 1
    return requests

  def _writable_range(self, pid, vaddr, length):
    """Breaks CoW sharing on every page of a virtual destination range."""
    first = vaddr // self.page_bytes
    last = (vaddr + length - 1) // self.page_bytes
    for vpage in range(first, last + 1):
      if not self.process(pid).entry(vpage).writable:
        self.cow_write(pid, vpage)

  def _virtual_pieces(self, pid, vaddr, length):
    off = 0
    while off < length:
      v = vaddr + off
      n = min(length - off, self.page_bytes - v % self.page_bytes)
      yield off, self.translate(pid, v), n
      off += n

  def process_memcopy(self, pid, src_vaddr, dst_vaddr, length):
    # type: (int, int, int, int) -> List[BulkRequest]
    """memcopy between virtual ranges of process `pid`."""
    self._check_bulk(length, src_vaddr, dst_vaddr)
    if util.intervals_overlap((src_vaddr, src_vaddr + length),
                              (dst_vaddr, dst_vaddr + length)):
      raise RequestError("memcopy ranges overlap")
    self._writable_range(pid, dst_vaddr, length)
    requests = []
    for off, dst, n in self._virtual_pieces(pid, dst_vaddr, length):
      for off2, src, m in self._virtual_pieces(pid, src_vaddr + off, n):
        requests.extend(self.memcopy(src, dst + off2, m))
    return requests

  def process_meminit(self, pid, vaddr, length, value):
    # type: (int, int, int, int) -> List[BulkRequest]
    self._check_bulk(length, vaddr)
    self._writable_range(pid, vaddr, length)
    requests = []
    for _, dst, n in self._virtual_pieces(pid, vaddr, length):
      requests.extend(self.meminit(dst, n, value))
    return requests

  ##############################################################################
  # Observation

  def finish(self):
    # type: () -> Timeline
    """Run every queued request to completion."""
    return self._controller.drain()

  def flush(self):
    # type: () -> int
    """Write back every dirty line; returns the number written back."""
    if self._cache is None:
      return 0
    dirty = self._cache.dirty_lines()
    for line in dirty:
      self._submit(req_lib.write(line.addr, data=line.data.copy()))
      self._cache.mark_clean(line.addr)
    self.stats.dram_writes += len(dirty)
    return len(dirty)

  def observe(self, paddr):
    # type: (int) -> np.ndarray
    """
    The value a program would read at line `paddr`, without changing cache
    state or statistics. Queued requests are run to completion first.
    """
    self._check_line(paddr)
    self._controller.drain()
    if self._cache is not None:
      data = self._cache.peek(paddr)
      if data is not None:
        return data
    b, s, r, c = self._mapping.map(paddr)
    return self._controller.image.read_line(b, s, r, c)

  def observe_virtual(self, pid, vaddr):
    # type: (int, int) -> np.ndarray
    return self.observe(self.translate(pid, vaddr))
