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
"""Per-command energy accounting over a Timeline."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from six import string_types
import sys
if sys.version >= '3':
  from typing import Any, Dict

from rowclone_sim import command as cmd_lib
from rowclone_sim.errors import ConfigError, EnergyError


__all__ = [
  "PowerParams",
  "EnergyLedger",
  "account",
  "energy_ratio",
]


class PowerParams(object):
  """
  Energy per command class, in nJ, and background power in mW.

  `e_act_pre` is charged per ACT+PRE pair; each ACT and each PRE counts as
  half a pair. `e_io` is charged once per burst driven on the channel (every
  RD and WR), on top of the array energy of the burst.
  """

  ENERGY_FIELDS = ("e_act_pre", "e_rd_array", "e_wr_array", "e_io",
                   "e_transfer")

  def __init__(self,
               e_act_pre, # type: float
               e_rd_array, # type: float
               e_wr_array, # type: float
               e_io, # type: float
               e_transfer, # type: float
               p_background=0.0, # type: float
               calibration_note="" # type: str
               ):
    self.e_act_pre = float(e_act_pre)
    self.e_rd_array = float(e_rd_array)
    self.e_wr_array = float(e_wr_array)
    self.e_io = float(e_io)
    self.e_transfer = float(e_transfer)
    self.p_background = float(p_background)
    if not isinstance(calibration_note, string_types):
      raise TypeError("calibration_note must be a string, got {}"
                      "".format(type(calibration_note)))
    self.calibration_note = calibration_note

  @classmethod
  def from_dict(cls, d):
    # type: (Dict[str, Any]) -> PowerParams
    known = cls.ENERGY_FIELDS + ("p_background", "calibration_note")
    missing = [f for f in cls.ENERGY_FIELDS if f not in d]
    if missing:
      raise ConfigError(missing[0], "missing from power section")
    unknown = sorted(set(d) - set(known))
    if unknown:
      raise ConfigError(unknown[0], "unknown power field")
    return cls(**d)

  def to_dict(self):
    ret = {f: getattr(self, f) for f in self.ENERGY_FIELDS}
    ret["p_background"] = self.p_background
    ret["calibration_note"] = self.calibration_note
    return ret

  def scaled(self, k):
    # type: (float) -> PowerParams
    """All energies and the background power multiplied by `k`."""
    return PowerParams(*[getattr(self, f) * k for f in self.ENERGY_FIELDS],
                       p_background=self.p_background * k,
                       calibration_note=self.calibration_note)

  def validate(self):
    """
    Raises:
      ConfigError: if a value is negative or a TRANSFER costs at least as
        much as a round trip through the channel.
    """
    for f in self.ENERGY_FIELDS + ("p_background",):
      if getattr(self, f) < 0:
        raise ConfigError(f, "must be >= 0")
    round_trip = self.e_rd_array + self.e_wr_array + 2 * self.e_io
    if not self.e_transfer < round_trip:
      raise ConfigError("e_transfer",
                        "must be below e_rd_array + e_wr_array + 2*e_io")

  def __eq__(self, other):
    return (isinstance(other, PowerParams) and
            all(getattr(self, f) == getattr(other, f)
                for f in self.ENERGY_FIELDS + ("p_background",)))

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash(tuple(getattr(self, f)
                      for f in self.ENERGY_FIELDS + ("p_background",)))


class EnergyLedger(object):
  """Energy of a timeline split by component, all in nJ."""

  COMPONENTS = ("act_pre_energy", "array_rw_energy", "io_energy",
                "transfer_energy", "background_energy")

  def __init__(self, act_pre_energy=0.0, array_rw_energy=0.0, io_energy=0.0,
               transfer_energy=0.0, background_energy=0.0):
    self.act_pre_energy = act_pre_energy
    self.array_rw_energy = array_rw_energy
    self.io_energy = io_energy
    self.transfer_energy = transfer_energy
    self.background_energy = background_energy

  @property
  def total(self):
    # type: () -> float
    return sum(getattr(self, c) for c in self.COMPONENTS)

  def __add__(self, other):
    # type: (EnergyLedger) -> EnergyLedger
    return EnergyLedger(*[getattr(self, c) + getattr(other, c)
                          for c in self.COMPONENTS])

  def to_dict(self):
    ret = {c: getattr(self, c) for c in self.COMPONENTS}
    ret["total"] = self.total
    return ret

  def __repr__(self):
    return "EnergyLedger[{}]".format(", ".join(
        "{}={:.4f}".format(k, v) for k, v in sorted(self.to_dict().items())))


def account(timeline, params, include_background=False):
  # type: (Any, PowerParams, bool) -> EnergyLedger
  """
  Energy of a timeline under `params`.

  Args:
    timeline: A controller.Timeline.
    params: Energy per command class.
    include_background: If True, charge `params.p_background` over
      `timeline.duration`.

  Returns:
    EnergyLedger whose components are linear in the command counts.
  """
  counts = timeline.command_counts()
  n_act = counts.get(cmd_lib.ACT, 0)
  n_pre = counts.get(cmd_lib.PRE, 0)
  n_rd = counts.get(cmd_lib.RD, 0)
  n_wr = counts.get(cmd_lib.WR, 0)
  n_transfer = counts.get(cmd_lib.TRANSFER, 0)
  background = 0.0
  if include_background:
    # mW * ns = pJ.
    background = params.p_background * timeline.duration / 1000.0
  return EnergyLedger(
      act_pre_energy=params.e_act_pre * (n_act + n_pre) / 2.0,
      array_rw_energy=params.e_rd_array * n_rd + params.e_wr_array * n_wr,
      io_energy=params.e_io * (n_rd + n_wr),
      transfer_energy=params.e_transfer * n_transfer,
      background_energy=background)


def energy_ratio(baseline, rowclone):
  # type: (EnergyLedger, EnergyLedger) -> float
  """baseline.total / rowclone.total.

  Raises:
    EnergyError: if `rowclone.total` is zero.
  """
  if rowclone.total == 0:
    raise EnergyError("Energy ratio with a zero-energy denominator")
  return baseline.total / rowclone.total
