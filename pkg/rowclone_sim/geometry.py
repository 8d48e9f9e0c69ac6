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
"""Static DRAM organization and timing parameters."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from six import iteritems
import sys
if sys.version >= '3':
  from typing import Any, Dict

from rowclone_sim import util
from rowclone_sim.errors import ConfigError


__all__ = [
  "Geometry",
  "TimingParams",
  "validate_config",
]


class Geometry(object):
  """
  Organization of one DRAM device: banks, subarrays per bank, rows per
  subarray, and the row and cacheline sizes in bytes.

  Rows are indexed within their subarray, so a row is addressed by the
  triple (bank, subarray, row).
  """

  FIELDS = ("num_banks", "subarrays_per_bank", "rows_per_subarray",
            "row_size_bytes", "cacheline_bytes")

  def __init__(self,
               num_banks, # type: int
               subarrays_per_bank, # type: int
               rows_per_subarray, # type: int
               row_size_bytes, # type: int
               cacheline_bytes # type: int
               ):
    self.num_banks = num_banks
    self.subarrays_per_bank = subarrays_per_bank
    self.rows_per_subarray = rows_per_subarray
    self.row_size_bytes = row_size_bytes
    self.cacheline_bytes = cacheline_bytes

  @classmethod
  def from_dict(cls, d):
    # type: (Dict[str, Any]) -> Geometry
    missing = [f for f in cls.FIELDS if f not in d]
    if missing:
      raise ConfigError(missing[0], "missing from geometry section")
    unknown = sorted(set(d) - set(cls.FIELDS))
    if unknown:
      raise ConfigError(unknown[0], "unknown geometry field")
    return cls(**{f: d[f] for f in cls.FIELDS})

  def to_dict(self):
    return {f: getattr(self, f) for f in self.FIELDS}

  def __eq__(self, other):
    return isinstance(other, Geometry) and self.to_dict() == other.to_dict()

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash(tuple(getattr(self, f) for f in self.FIELDS))

  def __repr__(self):
    return ("Geometry[{} banks x {} subarrays x {} rows, {}B rows, "
            "{}B lines]".format(self.num_banks, self.subarrays_per_bank,
                                self.rows_per_subarray, self.row_size_bytes,
                                self.cacheline_bytes))

  @property
  def columns_per_row(self):
    # type: () -> int
    """Number of cachelines in one row."""
    return self.row_size_bytes // self.cacheline_bytes

  @property
  def total_rows(self):
    # type: () -> int
    return self.num_banks * self.subarrays_per_bank * self.rows_per_subarray

  @property
  def total_bytes(self):
    # type: () -> int
    return self.total_rows * self.row_size_bytes

  def all_subarrays(self):
    """Yields every (bank, subarray) pair in bank-major order."""
    for b in range(self.num_banks):
      for s in range(self.subarrays_per_bank):
        yield b, s


class TimingParams(object):
  """
  JEDEC-style timing constraints, all in nanoseconds.

  The values are never baked into the code; they come from the config file
  (see `configs/ddr3_1066.json` for the DDR3-1066 7-7-7 defaults).
  """

  FIELDS = ("tCK", "tRCD", "tRAS", "tRP", "tRC", "CL", "CWL", "tBURST",
            "tCCD", "tRRD", "tFAW", "tWR", "tRTP")

  def __init__(self, **kwargs):
    missing = [f for f in self.FIELDS if f not in kwargs]
    if missing:
      raise ConfigError(missing[0], "missing from timing section")
    unknown = sorted(set(kwargs) - set(self.FIELDS))
    if unknown:
      raise ConfigError(unknown[0], "unknown timing field")
    for name, value in iteritems(kwargs):
      setattr(self, name, float(value))

  @classmethod
  def from_dict(cls, d):
    # type: (Dict[str, Any]) -> TimingParams
    return cls(**d)

  def to_dict(self):
    return {f: getattr(self, f) for f in self.FIELDS}

  def __eq__(self, other):
    return isinstance(other, TimingParams) and self.to_dict() == other.to_dict()

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash(tuple(getattr(self, f) for f in self.FIELDS))

  def __repr__(self):
    return "TimingParams[{}]".format(
        ", ".join("{}={}".format(f, getattr(self, f)) for f in self.FIELDS))


def validate_config(geometry, timing):
  # type: (Geometry, TimingParams) -> None
  """Check the static DRAM configuration.

  Args:
    geometry: Device organization to check.
    timing: Timing parameters to check.

  Raises:
    ConfigError: naming the first violated invariant.
  """
  for f in Geometry.FIELDS:
    value = getattr(geometry, f)
    if not isinstance(value, int) or isinstance(value, bool):
      raise ConfigError(f, "must be an integer, got {!r}".format(value))
    if value < 1:
      raise ConfigError(f, "must be >= 1")
  if geometry.row_size_bytes % geometry.cacheline_bytes != 0:
    raise ConfigError("row_size_bytes", "not multiple of cacheline")
  for f in Geometry.FIELDS:
    if not util.is_power_of_two(getattr(geometry, f)):
      raise ConfigError(f, "not a power of two")

  for f in TimingParams.FIELDS:
    if not getattr(timing, f) > 0:
      raise ConfigError(f, "must be > 0")
  if abs(timing.tRC - (timing.tRAS + timing.tRP)) > timing.tCK:
    raise ConfigError("tRC", "tRC ≠ tRAS + tRP")
  if timing.tCCD < timing.tBURST:
    raise ConfigError("tCCD", "tCCD < tBURST")
  if timing.tFAW < timing.tRRD:
    raise ConfigError("tFAW", "tFAW < tRRD")
