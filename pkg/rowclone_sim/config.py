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
config.py

The simulation configuration document. One JSON file holds every section;
the key names mirror the attribute names of `SimConfig` and its parts.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import copy
import json
import os
from absl import logging
from six import iteritems, string_types
import sys
if sys.version >= '3':
  from typing import Any, Dict, Optional

from rowclone_sim import cache as cache_lib
from rowclone_sim import controller as ctrl_lib
from rowclone_sim.energy import PowerParams
from rowclone_sim.errors import ConfigError
from rowclone_sim.geometry import Geometry, TimingParams, validate_config
from rowclone_sim.mapping import AddressMapping


__all__ = [
  "DEFAULT_CONFIG_PATH",
  "GENERATORS",
  "OUTPUT_FORMATS",
  "FeatureFlags",
  "CacheConfig",
  "WorkloadSpec",
  "SimConfig",
  "load_config",
]

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(__file__), "configs",
                                   "ddr3_1066.json")

GENERATORS = ("forkbench", "bulkzero", "page_migration", "random")
OUTPUT_FORMATS = ("json", "csv", "table")
INITIAL_CONTENTS = ("zero", "random")

_SECTIONS = ("geometry", "timing", "power", "mapping", "scheduling",
             "features", "cache", "dram", "system", "energy", "workload",
             "output", "seed", "sweep")


def _section(d, name, fields):
  """Returns d[name] after checking it holds exactly the given fields."""
  sec = d.get(name, {})
  if not isinstance(sec, dict):
    raise ConfigError(name, "must be an object")
  unknown = sorted(set(sec) - set(fields))
  if unknown:
    raise ConfigError("{}.{}".format(name, unknown[0]), "unknown field")
  return sec


def _flag(value, field):
  if not isinstance(value, bool):
    raise ConfigError(field, "must be true or false, got {!r}".format(value))
  return value


class FeatureFlags(object):
  """Which RowClone mechanisms are available to the controller and caches."""

  FIELDS = ("rowclone", "zi", "fpm", "psm")

  def __init__(self, rowclone=True, zi=False, fpm=True, psm=True):
    self.rowclone = rowclone
    self.zi = zi
    self.fpm = fpm
    self.psm = psm

  @classmethod
  def from_dict(cls, d):
    return cls(**{f: _flag(d[f], "features." + f) for f in cls.FIELDS
                  if f in d})

  def to_dict(self):
    return {f: getattr(self, f) for f in self.FIELDS}

  def __eq__(self, other):
    return isinstance(other, FeatureFlags) and self.to_dict() == other.to_dict()

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return "FeatureFlags[{}]".format(", ".join(
        f for f in self.FIELDS if getattr(self, f)))


class CacheConfig(object):

  def __init__(self, enabled=True, capacity_bytes=512 * 1024, associativity=8):
    self.enabled = enabled
    self.capacity_bytes = capacity_bytes
    self.associativity = associativity

  def to_dict(self):
    return {"enabled": self.enabled, "capacity_bytes": self.capacity_bytes,
            "associativity": self.associativity}

  def build(self, line_bytes):
    # type: (int) -> Optional[cache_lib.CacheState]
    if not self.enabled:
      return None
    return cache_lib.CacheState(self.capacity_bytes, self.associativity,
                                line_bytes)


class WorkloadSpec(object):
  """Either a trace file or a generator with its parameters."""

  def __init__(self, trace=None, generator=None, params=None,
               inter_arrival_ns=0.0):
    self.trace = trace
    self.generator = generator
    self.params = dict(params or {})
    self.inter_arrival_ns = float(inter_arrival_ns)

  def to_dict(self):
    return {"trace": self.trace, "generator": self.generator,
            "params": dict(self.params),
            "inter_arrival_ns": self.inter_arrival_ns}


class SimConfig(object):
  """
  Complete description of one simulation.

  Build it with `SimConfig.from_dict` or `load_config`, then call
  `validate()` before running anything.
  """

  def __init__(self,
               geometry, # type: Geometry
               timing, # type: TimingParams
               power, # type: PowerParams
               field_order=("row", "subarray", "bank", "column"),
               policy=ctrl_lib.FIFO, # type: str
               features=None, # type: Optional[FeatureFlags]
               cache=None, # type: Optional[CacheConfig]
               zero_row=None, # type: Optional[int]
               initial_contents="zero", # type: str
               zero_on_alloc=False, # type: bool
               include_background=False, # type: bool
               workload=None, # type: Optional[WorkloadSpec]
               output_path=None, # type: Optional[str]
               output_format="json", # type: str
               seed=0, # type: int
               sweep_parameters=None, # type: Optional[Dict[str, list]]
               sweep_workers=1 # type: int
               ):
    self.geometry = geometry
    self.timing = timing
    self.power = power
    self.field_order = tuple(field_order)
    self.policy = policy
    self.features = features or FeatureFlags()
    self.cache = cache or CacheConfig()
    self._zero_row = zero_row
    self.initial_contents = initial_contents
    self.zero_on_alloc = zero_on_alloc
    self.include_background = include_background
    self.workload = workload or WorkloadSpec()
    self.output_path = output_path
    self.output_format = output_format
    self.seed = seed
    self.sweep_parameters = dict(sweep_parameters or {})
    self.sweep_workers = sweep_workers

  @property
  def zero_row(self):
    # type: () -> int
    """Reserved row index in every subarray; the last row by default."""
    if self._zero_row is None:
      return self.geometry.rows_per_subarray - 1
    return self._zero_row

  def mapping(self):
    # type: () -> AddressMapping
    return AddressMapping(self.geometry, self.field_order)

  @classmethod
  def from_dict(cls, d):
    # type: (Dict[str, Any]) -> SimConfig
    """
    Build a config from its JSON document.

    Raises:
      ConfigError: for unknown sections or fields, or missing required ones.
    """
    if not isinstance(d, dict):
      raise ConfigError("<root>", "config must be a JSON object")
    unknown = sorted(set(d) - set(_SECTIONS))
    if unknown:
      raise ConfigError(unknown[0], "unknown config section")
    for required in ("geometry", "timing", "power"):
      if required not in d:
        raise ConfigError(required, "missing config section")
    mapping = _section(d, "mapping", ("field_order",))
    scheduling = _section(d, "scheduling", ("policy",))
    features = _section(d, "features", FeatureFlags.FIELDS)
    cache = _section(d, "cache", ("enabled", "capacity_bytes",
                                  "associativity"))
    dram = _section(d, "dram", ("zero_row", "initial_contents"))
    system = _section(d, "system", ("zero_on_alloc",))
    energy = _section(d, "energy", ("include_background",))
    workload = _section(d, "workload", ("trace", "generator", "params",
                                        "inter_arrival_ns"))
    output = _section(d, "output", ("path", "format"))
    sweep = _section(d, "sweep", ("parameters", "workers"))
    try:
      return cls(
          geometry=Geometry.from_dict(d["geometry"]),
          timing=TimingParams.from_dict(d["timing"]),
          power=PowerParams.from_dict(d["power"]),
          field_order=mapping.get("field_order",
                                  ("row", "subarray", "bank", "column")),
          policy=scheduling.get("policy", ctrl_lib.FIFO),
          features=FeatureFlags.from_dict(features),
          cache=CacheConfig(**cache),
          zero_row=dram.get("zero_row"),
          initial_contents=dram.get("initial_contents", "zero"),
          zero_on_alloc=_flag(system.get("zero_on_alloc", False),
                              "system.zero_on_alloc"),
          include_background=_flag(energy.get("include_background", False),
                                   "energy.include_background"),
          workload=WorkloadSpec(**workload),
          output_path=output.get("path"),
          output_format=output.get("format", "json"),
          seed=d.get("seed", 0),
          sweep_parameters=sweep.get("parameters"),
          sweep_workers=sweep.get("workers", 1))
    except (TypeError, ValueError) as e:
      if isinstance(e, ConfigError):
        raise
      raise ConfigError("<root>", str(e))

  def to_dict(self):
    # type: () -> Dict[str, Any]
    return {
      "geometry": self.geometry.to_dict(),
      "timing": self.timing.to_dict(),
      "power": self.power.to_dict(),
      "mapping": {"field_order": list(self.field_order)},
      "scheduling": {"policy": self.policy},
      "features": self.features.to_dict(),
      "cache": self.cache.to_dict(),
      "dram": {"zero_row": self._zero_row,
               "initial_contents": self.initial_contents},
      "system": {"zero_on_alloc": self.zero_on_alloc},
      "energy": {"include_background": self.include_background},
      "workload": self.workload.to_dict(),
      "output": {"path": self.output_path, "format": self.output_format},
      "seed": self.seed,
      "sweep": {"parameters": copy.deepcopy(self.sweep_parameters),
                "workers": self.sweep_workers},
    }

  def copy(self):
    # type: () -> SimConfig
    return SimConfig.from_dict(copy.deepcopy(self.to_dict()))

  def with_overrides(self, overrides):
    # type: (Dict[str, Any]) -> SimConfig
    """
    Returns a copy with dotted-path values replaced, for example
    {"features.rowclone": False, "timing.tRAS": 35.0}.
    """
    d = copy.deepcopy(self.to_dict())
    for path, value in iteritems(overrides):
      node = d
      keys = path.split(".")
      for k in keys[:-1]:
        if not isinstance(node, dict) or k not in node:
          raise ConfigError(path, "no such config field")
        node = node[k]
      if keys[-1] not in node and keys[-2:-1] != ["params"]:
        raise ConfigError(path, "no such config field")
      node[keys[-1]] = value
    return SimConfig.from_dict(d)

  def with_features(self, rowclone=None, zi=None):
    # type: (Optional[bool], Optional[bool]) -> SimConfig
    overrides = {}
    if rowclone is not None:
      overrides["features.rowclone"] = rowclone
    if zi is not None:
      overrides["features.zi"] = zi
    return self.with_overrides(overrides)

  def validate(self):
    """
    Check every section before a run.

    Raises:
      ConfigError: naming the first offending field.
    """
    validate_config(self.geometry, self.timing)
    self.power.validate()
    self.mapping()
    if self.features.zi and not self.features.rowclone:
      raise ConfigError("features.zi", "zi requires rowclone")
    if self.policy not in ctrl_lib.POLICIES:
      raise ConfigError("scheduling.policy",
                        "must be one of {}".format(list(ctrl_lib.POLICIES)))
    if not 0 <= self.zero_row < self.geometry.rows_per_subarray:
      raise ConfigError("dram.zero_row", "outside the subarray")
    if self.initial_contents not in INITIAL_CONTENTS:
      raise ConfigError("dram.initial_contents",
                        "must be one of {}".format(list(INITIAL_CONTENTS)))
    if self.cache.enabled:
      try:
        self.cache.build(self.geometry.cacheline_bytes)
      except ValueError as e:
        raise ConfigError("cache", str(e))
    w = self.workload
    if w.trace is not None and not isinstance(w.trace, string_types):
      raise ConfigError("workload.trace", "must be a path")
    if w.generator is not None and w.generator not in GENERATORS:
      raise ConfigError("workload.generator",
                        "must be one of {}".format(list(GENERATORS)))
    if w.inter_arrival_ns < 0:
      raise ConfigError("workload.inter_arrival_ns", "must be >= 0")
    if self.output_format not in OUTPUT_FORMATS:
      raise ConfigError("output.format",
                        "must be one of {}".format(list(OUTPUT_FORMATS)))
    if not isinstance(self.seed, int):
      raise ConfigError("seed", "must be an integer")
    if not isinstance(self.sweep_workers, int) or self.sweep_workers < 1:
      raise ConfigError("sweep.workers", "must be a positive integer")
    for path, values in iteritems(self.sweep_parameters):
      if not isinstance(values, list) or not values:
        raise ConfigError("sweep.parameters." + path,
                          "must be a non-empty list")


def load_config(path=None):
  # type: (Optional[str]) -> SimConfig
  """
  Read and validate a config file; the packaged DDR3-1066 default if `path`
  is None.

  Raises:
    ConfigError: if the file is missing, is not JSON, or is invalid.
  """
  path = path or DEFAULT_CONFIG_PATH
  if not os.path.exists(path):
    raise ConfigError(path, "no such config file")
  with open(path) as f:
    try:
      d = json.load(f)
    except ValueError as e:
      raise ConfigError(path, "not valid JSON: {}".format(e))
  config = SimConfig.from_dict(d)
  config.validate()
  logging.info("Loaded config %s", path)
  return config
