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
report.py

Running configured simulations and turning their timelines into reports:
one JSON document, a CSV of per-request latencies and an aligned text table,
all rendered from the same `Report` object. Also holds the single-operation
benchmarks behind `compare` and the parameter sweep.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from absl import logging
from concurrent import futures
import itertools
import json
import numpy as np
import pandas as pd
from six import iteritems
import sys
if sys.version >= '3':
  from typing import Any, Dict, List, Optional, Tuple

from rowclone_sim import controller as ctrl_lib
from rowclone_sim import dram as dram_lib
from rowclone_sim import energy as energy_lib
from rowclone_sim import request as req_lib
from rowclone_sim import system as system_lib
from rowclone_sim import workloads
from rowclone_sim.config import SimConfig
from rowclone_sim.errors import ConfigError, IncompatibleConfigsError


__all__ = [
  "RECORD_COLUMNS",
  "OPERATION_CLASSES",
  "ZERO_THEN_READ",
  "Report",
  "OperationResult",
  "RatioTable",
  "build_controller",
  "build_system",
  "load_workload",
  "run",
  "microbenchmark",
  "compare",
  "sweep",
]

RECORD_COLUMNS = ("seq", "kind", "mechanism", "arrival_time", "start_time",
                  "end_time", "latency", "num_commands", "channel_bytes")

OPERATION_CLASSES = ("intra_subarray_copy", "inter_bank_copy", "zeroing")

# Zero one row through the cache hierarchy, then read every line of it.
ZERO_THEN_READ = "zero_then_read"

_RATIO_COLUMNS = ("pair", "operation", "baseline_latency", "latency",
                  "latency_reduction", "baseline_energy", "energy",
                  "energy_reduction", "baseline_channel_bytes",
                  "channel_bytes")

# Sections that may differ between the configurations given to compare.
_COMPARE_IGNORED = ("features", "output", "sweep")


class Report(object):
  """
  Outcome of one simulation.

  Every rendering is computed from `to_dict()`, so the table and the CSV hold
  nothing the JSON document lacks.
  """

  def __init__(self,
               config, # type: SimConfig
               timeline, # type: ctrl_lib.Timeline
               energy, # type: energy_lib.EnergyLedger
               system_stats=None, # type: Optional[Dict[str, int]]
               cow_mechanisms=None, # type: Optional[Dict[str, int]]
               ratios=None # type: Optional[RatioTable]
               ):
    self._config = config
    self._timeline = timeline
    self._stats = ctrl_lib.SimStats(timeline)
    self._energy = energy
    self._system_stats = system_stats
    self._cow_mechanisms = cow_mechanisms
    self._ratios = ratios

  @property
  def config(self):
    return self._config

  @property
  def timeline(self):
    return self._timeline

  @property
  def stats(self):
    # type: () -> ctrl_lib.SimStats
    return self._stats

  @property
  def energy(self):
    # type: () -> energy_lib.EnergyLedger
    return self._energy

  @property
  def system_stats(self):
    return self._system_stats

  @property
  def cow_mechanisms(self):
    return self._cow_mechanisms

  @property
  def ratios(self):
    return self._ratios

  def to_dict(self):
    # type: () -> Dict[str, Any]
    return {
      "features": self._config.features.to_dict(),
      "policy": self._config.policy,
      "seed": self._config.seed,
      "stats": self._stats.to_dict(),
      "energy": self._energy.to_dict(),
      "system": self._system_stats,
      "cow_mechanisms": self._cow_mechanisms,
      "requests": [r.to_dict() for r in self._timeline.records],
      "ratios": self._ratios.to_dict() if self._ratios is not None else None,
    }

  def to_json(self):
    # type: () -> str
    return json.dumps(self.to_dict(), sort_keys=True, indent=2)

  def latency_frame(self):
    # type: () -> pd.DataFrame
    """One row per finished request, in completion order."""
    return pd.DataFrame(self.to_dict()["requests"],
                        columns=list(RECORD_COLUMNS))

  def to_csv(self):
    # type: () -> str
    return self.latency_frame().to_csv(index=False)

  def to_table(self):
    # type: () -> str
    d = self.to_dict()
    lines = [
      "features: " + ", ".join(
          "{}={}".format(k, v) for k, v in sorted(d["features"].items())),
      "policy: {}  seed: {}".format(d["policy"], d["seed"]),
      "duration: {:.3f} ns  channel bytes: {}".format(
          d["stats"]["duration"], d["stats"]["channel_bytes"]),
    ]
    frame = pd.DataFrame(d["requests"], columns=list(RECORD_COLUMNS))
    if len(frame):
      summary = frame.groupby("mechanism")["latency"].agg(
          ["count", "mean", "max"])
      lines += ["", summary.to_string(float_format="{:.3f}".format)]
    lines += ["", "energy (nJ):"]
    lines += ["  {:<18} {:.4f}".format(k, v)
              for k, v in sorted(d["energy"].items())]
    if d["system"] is not None:
      lines += ["", "system:"]
      lines += ["  {:<22} {}".format(k, v)
                for k, v in sorted(d["system"].items())]
    if self._ratios is not None:
      lines += ["", self._ratios.to_table()]
    return "\n".join(lines) + "\n"

  def render(self, fmt):
    # type: (str) -> str
    """The report as "json", "csv" or "table" text."""
    if fmt == "json":
      return self.to_json() + "\n"
    if fmt == "csv":
      return self.to_csv()
    if fmt == "table":
      return self.to_table()
    raise ConfigError("output.format", "unknown format '{}'".format(fmt))


################################################################################
# Building and running


def build_controller(config, image=None):
  # type: (SimConfig, Optional[dram_lib.MemoryImage]) -> ctrl_lib.Controller
  """A fresh controller for `config`, with its initial memory contents."""
  g = config.geometry
  if image is None and config.initial_contents == "random":
    reserved = [(b, s, config.zero_row) for b, s in g.all_subarrays()]
    image = dram_lib.MemoryImage(g, fill_seed=config.seed, reserved=reserved)
  return ctrl_lib.Controller(g, config.timing, config.mapping(),
                             config.features, policy=config.policy,
                             zero_row=config.zero_row, image=image)


def build_system(config, controller=None):
  # type: (SimConfig, Optional[ctrl_lib.Controller]) -> system_lib.System
  """
  A System on top of `controller` (a fresh one by default).

  Raises:
    ConfigError: if the mapping does not keep rows contiguous.
  """
  controller = controller or build_controller(config)
  cache = config.cache.build(config.geometry.cacheline_bytes)
  return system_lib.System(controller, cache=cache, zi=config.features.zi,
                           zero_on_alloc=config.zero_on_alloc)


def _space(records, gap):
  """Gives untimed generated records arrivals `gap` ns apart."""
  if gap <= 0:
    return records
  for i, r in enumerate(records):
    if r.time is None:
      r.arrival = i * gap
  return records


def load_workload(config):
  # type: (SimConfig) -> List[workloads.TraceRecord]
  """
  The trace records of `config.workload`.

  Raises:
    ConfigError: if the workload names neither or both of a trace and a
      generator, or carries bad generator parameters.
    ParseError: for a missing or malformed trace file.
  """
  w = config.workload
  if (w.trace is None) == (w.generator is None):
    raise ConfigError("workload", "set exactly one of trace and generator")
  g = config.geometry
  if w.trace is not None:
    return workloads.read_trace_file(w.trace, g.cacheline_bytes,
                                     w.inter_arrival_ns)
  params = dict(w.params)
  params.setdefault("seed", config.seed)
  mapping = config.mapping()
  try:
    if w.generator == "forkbench":
      records = workloads.gen_forkbench(workloads.ForkbenchParams(**params), g)
    elif w.generator == "bulkzero":
      params.pop("seed")
      records = workloads.gen_bulkzero(mapping=mapping,
                                       zero_row=config.zero_row, **params)
    elif w.generator == "page_migration":
      records = workloads.gen_page_migration(mapping=mapping,
                                             zero_row=config.zero_row,
                                             **params)
    else:
      rng = np.random.RandomState(params.pop("seed"))
      records = workloads.gen_random_trace(rng, mapping,
                                           zero_row=config.zero_row, **params)
  except TypeError as e:
    raise ConfigError("workload.params", str(e))
  logging.info("Generated %d %s records", len(records), w.generator)
  return _space(records, w.inter_arrival_ns)


def run(config, records=None, verify=True):
  # type: (SimConfig, Optional[List[workloads.TraceRecord]], bool) -> Report
  """
  Simulate a workload under `config`.

  Traces with process records (A, F, CW) replay on a System and need a
  row-contiguous mapping; plain memory traces under any other mapping go
  straight to the controller.

  Args:
    config: Simulation config.
    records: Trace records; loaded with `load_workload` if None.
    verify: Re-check the timeline with the standalone timing checker.

  Returns:
    The report. Runs of equal configs give equal reports.

  Raises:
    ConfigError, ParseError, RequestError, AlignmentError: for bad input.
    InvariantError: if the timeline breaks a timing rule.
  """
  config.validate()
  if records is None:
    records = load_workload(config)
  controller = build_controller(config)
  system_stats = cow = None
  if config.mapping().row_contiguous:
    system = build_system(config, controller)
    workloads.replay_trace(system, records)
    timeline = system.finish()
    system_stats = system.stats.to_dict()
    cow = system.cow_mechanisms()
  else:
    for r in workloads.requests_from_trace(records):
      controller.submit(r, keep_data=False)
    timeline = controller.drain()
  if verify:
    timeline.verify(config.timing)
  energy = energy_lib.account(timeline, config.power,
                              config.include_background)
  logging.info("Simulated %d requests in %s ns, %s nJ", len(timeline.records),
               timeline.duration, energy.total)
  return Report(config, timeline, energy, system_stats, cow)


################################################################################
# Single-operation benchmarks and compare


class OperationResult(object):
  """Latency, energy and channel traffic of one benchmark operation."""

  def __init__(self, operation, latency, energy, channel_bytes, mechanisms):
    self.operation = operation
    self.latency = latency
    self.energy = energy
    self.channel_bytes = channel_bytes
    self.mechanisms = mechanisms

  def __repr__(self):
    return "OperationResult[{} {} latency={} energy={}]".format(
        self.operation, self.mechanisms, self.latency, self.energy.total)


def _bench_rows(config):
  rows = [r for r in range(config.geometry.rows_per_subarray)
          if r != config.zero_row]
  if len(rows) < 2:
    raise ConfigError("geometry.rows_per_subarray",
                      "benchmarks need two rows besides the zero row")
  return rows[0], rows[1]


def _bench_requests(config, operation):
  mapping = config.mapping()
  g = config.geometry
  ra, rb = _bench_rows(config)
  src = mapping.row_base(0, 0, ra)
  if operation == "intra_subarray_copy":
    return [req_lib.copy(src, mapping.row_base(0, 0, rb), g.row_size_bytes)]
  if operation == "inter_bank_copy":
    if g.num_banks < 2:
      raise ConfigError("geometry.num_banks",
                        "an inter-bank copy needs two banks")
    return [req_lib.copy(src, mapping.row_base(1, 0, ra), g.row_size_bytes)]
  if operation == "zeroing":
    return [req_lib.zero(src, g.row_size_bytes)]
  raise ValueError("Unknown operation '{}'".format(operation))


def microbenchmark(config, operation):
  # type: (SimConfig, str) -> OperationResult
  """
  Run one 4 KB-class operation alone on an idle, precharged device.

  Args:
    config: Device, features and power parameters to use.
    operation: One of OPERATION_CLASSES, or ZERO_THEN_READ, which zeroes a
      row through the cache and then reads each of its lines back.

  Returns:
    The operation's latency (its duration for ZERO_THEN_READ), energy and
    channel bytes.
  """
  config.validate()
  if not config.mapping().row_contiguous:
    raise ConfigError("mapping.field_order",
                      "benchmarks need a row-contiguous mapping")
  if operation == ZERO_THEN_READ:
    system = build_system(config)
    dst = config.mapping().row_base(0, 0, _bench_rows(config)[0])
    system.meminit(dst, config.geometry.row_size_bytes, 0)
    for addr in config.mapping().lines(dst, config.geometry.row_size_bytes):
      system.read(addr)
    timeline = system.finish()
    latency = timeline.duration
  else:
    controller = build_controller(config)
    for r in _bench_requests(config, operation):
      controller.submit(r, keep_data=False)
    timeline = controller.drain()
    latency = max(r.latency for r in timeline.records)
  timeline.verify(config.timing)
  energy = energy_lib.account(timeline, config.power,
                              config.include_background)
  mechanisms = ctrl_lib.SimStats(timeline).mechanism_counts
  logging.debug("%s under %s: %s ns", operation, config.features, latency)
  return OperationResult(operation, latency, energy, timeline.channel_bytes,
                         dict(mechanisms))


class RatioTable(object):
  """
  Reduction factors of one configuration against a baseline, per pair of
  configurations and operation class. Each reduction is the quotient of the
  two raw values stored next to it.
  """

  def __init__(self, rows=None):
    # type: (Optional[List[Dict[str, Any]]]) -> None
    self._rows = list(rows or [])

  @property
  def rows(self):
    return [dict(r) for r in self._rows]

  def add(self, pair, baseline, other):
    # type: (str, OperationResult, OperationResult) -> None
    self._rows.append({
      "pair": pair,
      "operation": baseline.operation,
      "baseline_latency": baseline.latency,
      "latency": other.latency,
      "latency_reduction": baseline.latency / other.latency,
      "baseline_energy": baseline.energy.total,
      "energy": other.energy.total,
      "energy_reduction": energy_lib.energy_ratio(baseline.energy,
                                                  other.energy),
      "baseline_channel_bytes": baseline.channel_bytes,
      "channel_bytes": other.channel_bytes,
    })

  def get(self, operation, pair="rowclone"):
    # type: (str, str) -> Dict[str, Any]
    for r in self._rows:
      if r["pair"] == pair and r["operation"] == operation:
        return dict(r)
    raise KeyError("No ratio for {} / {}".format(pair, operation))

  def to_frame(self):
    # type: () -> pd.DataFrame
    return pd.DataFrame(self._rows, columns=list(_RATIO_COLUMNS))

  def to_csv(self):
    return self.to_frame().to_csv(index=False)

  def to_table(self):
    # type: () -> str
    frame = self.to_frame()[["pair", "operation", "latency_reduction",
                             "energy_reduction", "baseline_channel_bytes",
                             "channel_bytes"]]
    return frame.to_string(index=False, float_format="{:.2f}x".format)

  def to_dict(self):
    return {"rows": self.rows}

  def __len__(self):
    return len(self._rows)


def _check_compatible(a, b):
  da, db = a.to_dict(), b.to_dict()
  for section in sorted(da):
    if section in _COMPARE_IGNORED:
      continue
    if da[section] != db[section]:
      raise IncompatibleConfigsError(
          "Compared configs differ in '{}', not only in features"
          "".format(section))


def compare(config_base, config_rowclone, config_zi=None):
  # type: (SimConfig, SimConfig, Optional[SimConfig]) -> RatioTable
  """
  Reduction factors of `config_rowclone` (and `config_zi`) against
  `config_base` for every operation class.

  The ZI pair also gets a ZERO_THEN_READ row when the cache is enabled.

  Raises:
    IncompatibleConfigsError: if the configs differ in anything but their
      feature flags.
  """
  others = [("rowclone", config_rowclone)]
  if config_zi is not None:
    others.append(("rowclone_zi", config_zi))
  for _, c in others:
    _check_compatible(config_base, c)
  table = RatioTable()
  base = {op: microbenchmark(config_base, op) for op in OPERATION_CLASSES}
  for pair, c in others:
    for op in OPERATION_CLASSES:
      table.add(pair, base[op], microbenchmark(c, op))
  if config_zi is not None and config_base.cache.enabled:
    table.add("rowclone_zi", microbenchmark(config_base, ZERO_THEN_READ),
              microbenchmark(config_zi, ZERO_THEN_READ))
  return table


################################################################################
# Sweep


def _sweep_points(parameters):
  # type: (Dict[str, list]) -> List[Dict[str, Any]]
  """Cartesian product of the parameter lists, keys in sorted order."""
  keys = sorted(parameters)
  return [dict(zip(keys, values))
          for values in itertools.product(*[parameters[k] for k in keys])]


def _run_point(index, config_dict, overrides):
  # type: (int, Dict[str, Any], Dict[str, Any]) -> Tuple[int, Dict[str, Any]]
  config = SimConfig.from_dict(config_dict).with_overrides(overrides)
  report = run(config)
  logging.info("Sweep point %d done: %s", index, overrides)
  return index, report.to_dict()


def sweep(config, parameters=None, workers=None):
  # type: (SimConfig, Optional[Dict[str, list]], Optional[int]) -> List[Dict[str, Any]]
  """
  Run one simulation per point of a cartesian parameter sweep.

  Args:
    config: Base config.
    parameters: Dotted config path to list of values; defaults to
      `config.sweep_parameters`.
    workers: Worker processes; defaults to `config.sweep_workers`. With one
      worker every point runs in this process.

  Returns:
    One {"index", "overrides", "report"} dict per point, ordered by index.
  """
  parameters = config.sweep_parameters if parameters is None else parameters
  workers = config.sweep_workers if workers is None else workers
  for path, values in iteritems(parameters):
    if not isinstance(values, list) or not values:
      raise ConfigError("sweep.parameters." + path, "must be a non-empty list")
  points = _sweep_points(parameters)
  base = config.to_dict()
  # Fail on bad paths before starting any worker.
  for p in points:
    config.with_overrides(p).validate()
  if workers <= 1:
    results = [_run_point(i, base, p) for i, p in enumerate(points)]
  else:
    with futures.ProcessPoolExecutor(max_workers=workers) as pool:
      pending = [pool.submit(_run_point, i, base, p)
                 for i, p in enumerate(points)]
      results = [f.result() for f in pending]
  results.sort(key=lambda r: r[0])
  return [{"index": i, "overrides": points[i], "report": d}
          for i, d in results]
