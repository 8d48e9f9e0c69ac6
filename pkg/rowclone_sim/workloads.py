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
workloads.py

The text trace format, its parser and serializer, synthetic workload
generators, and the driver that replays a trace on a System.

One record per line:

    [@<ns>] R <addr>
    [@<ns>] W <addr> [<fill>]
    [@<ns>] C <src> <dst> <len>
    [@<ns>] Z <dst> <len>
    [@<ns>] A <count>         map <count> fresh pages into the current process
    [@<ns>] F                 fork the current process; the child is current
    [@<ns>] CW <vpage>        write to a page of the current process
    # comment

Addresses, lengths and fill bytes are hexadecimal; counts and virtual page
numbers are decimal unless written with a 0x prefix.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from absl import logging
import numpy as np
import sys
if sys.version >= '3':
  from typing import Any, List, Optional, Tuple

from rowclone_sim import request as req_lib
from rowclone_sim.errors import ConfigError, ParseError, RequestError
from rowclone_sim.geometry import Geometry
from rowclone_sim.mapping import AddressMapping


__all__ = [
  "READ",
  "WRITE",
  "COPY",
  "ZERO",
  "ALLOC",
  "FORK",
  "COW_WRITE",
  "TraceRecord",
  "parse_trace",
  "read_trace_file",
  "serialize_trace",
  "requests_from_trace",
  "records_from_requests",
  "ForkbenchParams",
  "gen_forkbench",
  "gen_bulkzero",
  "gen_page_migration",
  "gen_random_trace",
  "replay_trace",
]

READ = "R"
WRITE = "W"
COPY = "C"
ZERO = "Z"
ALLOC = "A"
FORK = "F"
COW_WRITE = "CW"

# Record kind -> (min args, max args)
_ARITY = {
  READ: (1, 1),
  WRITE: (1, 2),
  COPY: (3, 3),
  ZERO: (2, 2),
  ALLOC: (1, 1),
  FORK: (0, 0),
  COW_WRITE: (1, 1),
}

# Fill byte written by a CW record.
COW_FILL = 0xFF


class TraceRecord(object):
  """
  One trace record.

  `time` is the explicit @-timestamp or None; `arrival` is the resolved
  arrival time, filled in by `parse_trace`.
  """
  __slots__ = ("kind", "args", "time", "arrival", "line")

  def __init__(self, kind, args=(), time=None, line=0):
    # type: (str, Tuple[int, ...], Optional[float], int) -> None
    if kind not in _ARITY:
      raise ValueError("Unknown record kind '{}'".format(kind))
    self.kind = kind
    self.args = tuple(args)
    self.time = time
    self.arrival = time if time is not None else 0.0
    self.line = line

  def __eq__(self, other):
    return (isinstance(other, TraceRecord) and self.kind == other.kind and
            self.args == other.args and self.time == other.time)

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash((self.kind, self.args, self.time))

  def to_text(self):
    # type: () -> str
    if self.kind in (READ, ZERO, COPY):
      fields = ["{:#x}".format(a) for a in self.args]
    elif self.kind == WRITE:
      fields = ["{:#x}".format(self.args[0])]
      fields += ["{:#04x}".format(a) for a in self.args[1:]]
    else:
      fields = [str(a) for a in self.args]
    prefix = "" if self.time is None else "@{!r} ".format(self.time)
    return prefix + " ".join([self.kind] + fields)

  def __repr__(self):
    return "TraceRecord[{}]".format(self.to_text())


def _number(token, base, line):
  try:
    return int(token, base)
  except ValueError:
    raise ParseError(line, "bad number '{}'".format(token))


def parse_trace(text, cacheline_bytes=64, inter_arrival_ns=0.0):
  # type: (str, int, float) -> List[TraceRecord]
  """
  Parse trace text.

  Args:
    text: Trace contents.
    cacheline_bytes: Alignment unit for addresses and lengths.
    inter_arrival_ns: Gap added to the previous arrival time for records
      without an @-timestamp. The first such record arrives at 0.

  Returns:
    Records in file order with `arrival` set.

  Raises:
    ParseError: with the 1-based line number of the first bad record.
  """
  records = []
  prev = None  # type: Optional[float]
  for lineno, raw in enumerate(text.splitlines(), 1):
    body = raw.split("#", 1)[0].strip()
    if not body:
      continue
    tokens = body.split()
    time = None
    if tokens[0].startswith("@"):
      try:
        time = float(tokens[0][1:])
      except ValueError:
        raise ParseError(lineno, "bad timestamp '{}'".format(tokens[0]))
      if time < 0:
        raise ParseError(lineno, "negative timestamp")
      if prev is not None and time < prev:
        raise ParseError(lineno, "timestamp {} before previous {}"
                         "".format(time, prev))
      tokens = tokens[1:]
      if not tokens:
        raise ParseError(lineno, "timestamp without a record")
    kind = tokens[0].upper()
    if kind not in _ARITY:
      raise ParseError(lineno, "unknown record '{}'".format(tokens[0]))
    lo, hi = _ARITY[kind]
    if not lo <= len(tokens) - 1 <= hi:
      raise ParseError(lineno, "{} takes {} argument(s), got {}".format(
          kind, lo if lo == hi else "{}-{}".format(lo, hi), len(tokens) - 1))
    if kind in (READ, WRITE, COPY, ZERO):
      args = [_number(t, 16, lineno) for t in tokens[1:]]
      addrs = args if kind != WRITE else args[:1]
      if any(a < 0 or a % cacheline_bytes for a in addrs):
        raise ParseError(lineno, "alignment: values must be multiples of "
                         "{} bytes".format(cacheline_bytes))
      if kind in (COPY, ZERO) and args[-1] == 0:
        raise ParseError(lineno, "zero length")
      if kind == WRITE and len(args) == 2 and not 0 <= args[1] <= 0xFF:
        raise ParseError(lineno, "fill value does not fit in a byte")
    else:
      args = [_number(t, 0, lineno) for t in tokens[1:]]
      if any(a < 0 for a in args):
        raise ParseError(lineno, "negative argument")
    record = TraceRecord(kind, args, time=time, line=lineno)
    if time is None:
      record.arrival = 0.0 if prev is None else prev + inter_arrival_ns
    prev = record.arrival
    records.append(record)
  return records


def read_trace_file(path, cacheline_bytes=64, inter_arrival_ns=0.0):
  # type: (str, int, float) -> List[TraceRecord]
  """Parse a trace file. A missing file is a ParseError on line 0."""
  try:
    with open(path, "rb") as f:
      text = f.read().decode("utf-8")
  except (IOError, OSError) as e:
    raise ParseError(0, "cannot read trace file '{}': {}".format(path, e))
  except UnicodeDecodeError:
    raise ParseError(0, "trace file '{}' is not UTF-8".format(path))
  return parse_trace(text, cacheline_bytes, inter_arrival_ns)


def serialize_trace(records):
  # type: (List[TraceRecord]) -> str
  return "".join(r.to_text() + "\n" for r in records)


def requests_from_trace(records):
  # type: (List[TraceRecord]) -> List[req_lib.BulkRequest]
  """
  BulkRequests of the memory records of a trace.

  Raises:
    RequestError: if the trace holds process records (A, F, CW), which need
      a System to replay.
  """
  ret = []
  for r in records:
    if r.kind == READ:
      ret.append(req_lib.read(r.args[0], arrival_time=r.arrival))
    elif r.kind == WRITE:
      fill = r.args[1] if len(r.args) > 1 else 0
      ret.append(req_lib.write(r.args[0], data=fill, arrival_time=r.arrival))
    elif r.kind == COPY:
      ret.append(req_lib.copy(*r.args, arrival_time=r.arrival))
    elif r.kind == ZERO:
      ret.append(req_lib.zero(*r.args, arrival_time=r.arrival))
    else:
      raise RequestError("Line {}: record {} needs a System to replay"
                         "".format(r.line, r.kind))
  return ret


def records_from_requests(requests, timestamps=True):
  # type: (List[req_lib.BulkRequest], bool) -> List[TraceRecord]
  ret = []
  for q in requests:
    t = q.arrival_time if timestamps else None
    if q.kind == req_lib.READ:
      ret.append(TraceRecord(READ, (q.src,), time=t))
    elif q.kind == req_lib.WRITE:
      if not isinstance(q.data, (int, np.integer)):
        raise RequestError("Only fill-byte writes have a trace form: "
                           "{}".format(q))
      ret.append(TraceRecord(WRITE, (q.dst, int(q.data)), time=t))
    elif q.kind == req_lib.COPY:
      ret.append(TraceRecord(COPY, (q.src, q.dst, q.length), time=t))
    else:
      ret.append(TraceRecord(ZERO, (q.dst, q.length), time=t))
  return ret


################################################################################
# Generators


class ForkbenchParams(object):
  """Knobs of the fork benchmark."""

  def __init__(self, num_pages=16384, write_fraction=0.1, seed=0,
               interleaved_reads=1):
    self.num_pages = num_pages
    self.write_fraction = write_fraction
    self.seed = seed
    self.interleaved_reads = interleaved_reads

  def validate(self):
    if not isinstance(self.num_pages, int) or self.num_pages < 1:
      raise ConfigError("workload.params.num_pages", "must be >= 1")
    if not 0.0 <= self.write_fraction <= 1.0:
      raise ConfigError("workload.params.write_fraction",
                        "must lie in [0, 1]")
    if self.interleaved_reads < 0:
      raise ConfigError("workload.params.interleaved_reads", "must be >= 0")


def _random_line(rng, geometry):
  lines = geometry.total_bytes // geometry.cacheline_bytes
  return int(rng.randint(0, lines)) * geometry.cacheline_bytes


def gen_forkbench(params, geometry):
  # type: (ForkbenchParams, Geometry) -> List[TraceRecord]
  """
  A process maps `num_pages` pages and forks; the child then writes a
  seeded-random `write_fraction` of the pages, each write preceded by
  `interleaved_reads` reads of random physical cachelines.
  """
  params.validate()
  rng = np.random.RandomState(params.seed)
  records = [TraceRecord(ALLOC, (params.num_pages,)), TraceRecord(FORK)]
  count = int(round(params.write_fraction * params.num_pages))
  for vpage in rng.permutation(params.num_pages)[:count]:
    for _ in range(params.interleaved_reads):
      records.append(TraceRecord(READ, (_random_line(rng, geometry),)))
    records.append(TraceRecord(COW_WRITE, (int(vpage),)))
  return records


def _allocatable_rows(mapping, zero_row):
  """Row-sized, row-aligned address ranges that hold no reserved row, by
  start address."""
  g = mapping.geometry
  for addr in range(0, g.total_bytes, g.row_size_bytes):
    if mapping.row_contiguous:
      ok = mapping.row_of(addr)[2] != zero_row
    else:
      ok = all(mapping.row_of(a)[2] != zero_row
               for a in mapping.lines(addr, g.row_size_bytes))
    if ok:
      yield addr


def gen_bulkzero(pages, mapping, zero_row=None, stride=1):
  # type: (int, AddressMapping, Optional[int], int) -> List[TraceRecord]
  """
  Zero `pages` row-aligned pages, taking every `stride`-th allocatable row
  in address order.
  """
  if pages < 1:
    raise ConfigError("workload.params.pages", "must be >= 1")
  if stride < 1:
    raise ConfigError("workload.params.stride", "must be >= 1")
  row = mapping.geometry.row_size_bytes
  records = []
  for i, addr in enumerate(_allocatable_rows(mapping, zero_row)):
    if i % stride == 0:
      records.append(TraceRecord(ZERO, (addr, row)))
      if len(records) == pages:
        return records
  raise ConfigError("workload.params.pages",
                    "{} pages with stride {} exceed the device"
                    "".format(pages, stride))


def gen_page_migration(pages, mapping, zero_row=None, seed=0):
  # type: (int, AddressMapping, Optional[int], int) -> List[TraceRecord]
  """
  Migrate `pages` random pages, each to a free page in the next bank.

  Source and destination pages are all distinct, so every copy is an
  inter-bank whole-row copy.
  """
  g = mapping.geometry
  if g.num_banks < 2:
    raise ConfigError("geometry.num_banks", "page migration needs two banks")
  rng = np.random.RandomState(seed)
  rows = list(_allocatable_rows(mapping, zero_row))
  order = [rows[i] for i in rng.permutation(len(rows))]
  used = set()
  records = []
  for src in order:
    if len(records) == pages:
      break
    if src in used:
      continue
    b, s, r = mapping.row_of(src)
    dst = mapping.row_base((b + 1) % g.num_banks, s, r)
    if dst in used:
      continue
    used.update((src, dst))
    records.append(TraceRecord(COPY, (src, dst, g.row_size_bytes)))
  if len(records) < pages:
    raise ConfigError("workload.params.pages", "not enough free rows")
  return records


def gen_random_trace(rng, mapping, zero_row=None, count=8, timestamps=False):
  # type: (np.random.RandomState, AddressMapping, Optional[int], int, bool) -> List[TraceRecord]
  """
  A random mix of reads, writes, copies and zeroings that never writes a
  reserved row and never overlaps copy source and destination.

  Whole-row copies within a subarray, across banks and across subarrays of
  one bank are all drawn, as are partial-row copies and zeroings.
  """
  g = mapping.geometry
  line = g.cacheline_bytes
  row = g.row_size_bytes
  rows = list(_allocatable_rows(mapping, zero_row))
  if len(rows) < 2:
    raise ConfigError("geometry", "random traces need two allocatable rows")
  allowed = frozenset(rows)

  def pick_row():
    return rows[int(rng.randint(0, len(rows)))]

  def pick_line():
    return pick_row() + int(rng.randint(0, row // line)) * line

  records = []
  t = 0.0
  while len(records) < count:
    choice = int(rng.randint(0, 6))
    if choice == 0:
      rec = TraceRecord(READ, (pick_line(),))
    elif choice == 1:
      rec = TraceRecord(WRITE, (pick_line(), int(rng.randint(0, 256))))
    elif choice in (2, 3):
      src = pick_row()
      if choice == 2 and mapping.row_contiguous:
        # Same subarray.
        b, s, _ = mapping.row_of(src)
        r = int(rng.randint(0, g.rows_per_subarray))
        dst = mapping.row_base(b, s, r)
      else:
        dst = pick_row()
      if dst == src or dst not in allowed:
        continue
      rec = TraceRecord(COPY, (src, dst, row))
    elif choice == 4:
      n = int(rng.randint(1, row // line + 1)) * line
      src = pick_row() + int(rng.randint(0, row // line)) * line
      dst = pick_row() + int(rng.randint(0, row // line)) * line
      if not (mapping.row_contiguous and
              _fits(src, n, allowed, row) and _fits(dst, n, allowed, row)):
        continue
      if src < dst + n and dst < src + n:
        continue
      rec = TraceRecord(COPY, (src, dst, n))
    else:
      if rng.randint(0, 2):
        rec = TraceRecord(ZERO, (pick_row(), row))
      else:
        n = int(rng.randint(1, row // line + 1)) * line
        dst = pick_row()
        rec = TraceRecord(ZERO, (dst, n))
    if timestamps:
      t += float(rng.randint(0, 4)) * 10.0
      rec.time = t
      rec.arrival = t
    records.append(rec)
  return records


def _fits(addr, length, allowed, row):
  """True if every row touched by [addr, addr + length) is allocatable."""
  base = addr - addr % row
  while base < addr + length:
    if base not in allowed:
      return False
    base += row
  return True


################################################################################
# Replay


def replay_trace(system, records, blocking_reads=None):
  # type: (Any, List[TraceRecord], Optional[bool]) -> Optional[int]
  """
  Drive a System with trace records.

  The current process is the most recently created one: A maps pages into
  it (creating it first if there is none), F forks it and makes the child
  current, and CW writes the fill byte 0xFF to the first cacheline of the
  given page.

  Args:
    system: A system.System.
    records: Parsed records.
    blocking_reads: Whether R records wait for their data. Defaults to True
      exactly when the system has a cache.

  Returns:
    The pid of the current process at the end, or None.
  """
  if blocking_reads is None:
    blocking_reads = system.cache is not None
  current = None
  for r in records:
    system.advance(r.arrival)
    if r.kind == READ:
      system.read(r.args[0], blocking=blocking_reads)
    elif r.kind == WRITE:
      system.write(r.args[0], r.args[1] if len(r.args) > 1 else 0)
    elif r.kind == COPY:
      system.memcopy(*r.args)
    elif r.kind == ZERO:
      system.meminit(r.args[0], r.args[1], 0)
    elif r.kind == ALLOC:
      if current is None:
        current = system.create_process()
      system.map_pages(current, r.args[0])
    elif r.kind == FORK:
      if current is None:
        current = system.create_process()
      current = system.fork(current)
    else:
      if current is None:
        raise RequestError("Line {}: CW before any process exists"
                           "".format(r.line))
      system.write_virtual(current, r.args[0] * system.page_bytes, COW_FILL)
  logging.info("Replayed %d trace records", len(records))
  return current
