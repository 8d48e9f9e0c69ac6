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
"""Objects for representing timed DRAM commands."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import sys
if sys.version >= '3':
  from typing import Any, Hashable, Optional

from rowclone_sim.errors import RequestError


__all__ = [
  "ACT",
  "PRE",
  "RD",
  "WR",
  "TRANSFER",
  "COMMAND_KINDS",
  "COLUMN_KINDS",
  "Command",
  "act",
  "pre",
  "rd",
  "wr",
  "transfer",
]

ACT = "ACT"
PRE = "PRE"
RD = "RD"
WR = "WR"
TRANSFER = "TRANSFER"

COMMAND_KINDS = (ACT, PRE, RD, WR, TRANSFER)

# Commands that move a cacheline through a row buffer.
COLUMN_KINDS = frozenset([RD, WR, TRANSFER])


class Command(object):
  """
  One DRAM command addressed to the device.

  Fields that a command kind does not use are None. TRANSFER uses `bank` and
  `column` for its source side and `dst_bank`/`dst_column` for its
  destination side.

  RD and WR commands may carry a `slot`: a RD deposits the cacheline it
  returns into the controller staging buffer under that key, and a WR without
  literal `data` takes its cacheline from the same key. This is how a
  baseline copy moves data through the channel.
  """
  __slots__ = ("kind", "bank", "subarray", "row", "column", "dst_bank",
               "dst_column", "issue_time", "data", "slot")

  def __init__(self,
               kind, # type: str
               bank, # type: int
               subarray=None, # type: Optional[int]
               row=None, # type: Optional[int]
               column=None, # type: Optional[int]
               dst_bank=None, # type: Optional[int]
               dst_column=None, # type: Optional[int]
               issue_time=0.0, # type: float
               data=None, # type: Any
               slot=None # type: Optional[Hashable]
               ):
    if kind not in COMMAND_KINDS:
      raise ValueError("Unknown command kind '{}'".format(kind))
    self.kind = kind
    self.bank = bank
    self.subarray = subarray
    self.row = row
    self.column = column
    self.dst_bank = dst_bank
    self.dst_column = dst_column
    self.issue_time = float(issue_time)
    self.data = data
    self.slot = slot

  def at(self, issue_time):
    # type: (float) -> Command
    """Returns a copy of this command issued at `issue_time`."""
    return Command(self.kind, self.bank, self.subarray, self.row, self.column,
                   self.dst_bank, self.dst_column, issue_time, self.data,
                   self.slot)

  @property
  def banks(self):
    """Banks whose state this command reads or changes."""
    if self.kind == TRANSFER:
      return (self.bank, self.dst_bank)
    return (self.bank,)

  @property
  def is_column(self):
    # type: () -> bool
    return self.kind in COLUMN_KINDS

  def validate(self, geometry):
    """Structural check of the command against `geometry`.

    Raises:
      RequestError: if an index is out of range or a TRANSFER stays within one
        bank.
    """
    def _check(name, value, limit):
      if value is None or not 0 <= value < limit:
        raise RequestError("{} {} of {} out of range [0, {})"
                           "".format(name, value, self, limit))

    _check("bank", self.bank, geometry.num_banks)
    if self.kind == ACT:
      _check("subarray", self.subarray, geometry.subarrays_per_bank)
      _check("row", self.row, geometry.rows_per_subarray)
    elif self.kind in (RD, WR):
      _check("column", self.column, geometry.columns_per_row)
    elif self.kind == TRANSFER:
      _check("column", self.column, geometry.columns_per_row)
      _check("dst_bank", self.dst_bank, geometry.num_banks)
      _check("dst_column", self.dst_column, geometry.columns_per_row)
      if self.bank == self.dst_bank:
        raise RequestError("TRANSFER needs distinct banks: {}".format(self))

  def __repr__(self):
    if self.kind == ACT:
      args = "b{},s{},r{}".format(self.bank, self.subarray, self.row)
    elif self.kind == PRE:
      args = "b{}".format(self.bank)
    elif self.kind == TRANSFER:
      args = "b{},c{}->b{},c{}".format(self.bank, self.column, self.dst_bank,
                                       self.dst_column)
    else:
      args = "b{},c{}".format(self.bank, self.column)
    return "{}({})@{}".format(self.kind, args, self.issue_time)


def act(bank, subarray, row, issue_time=0.0):
  return Command(ACT, bank, subarray=subarray, row=row, issue_time=issue_time)


def pre(bank, issue_time=0.0):
  return Command(PRE, bank, issue_time=issue_time)


def rd(bank, column, issue_time=0.0, slot=None):
  return Command(RD, bank, column=column, issue_time=issue_time, slot=slot)


def wr(bank, column, issue_time=0.0, data=None, slot=None):
  return Command(WR, bank, column=column, issue_time=issue_time, data=data,
                 slot=slot)


def transfer(src_bank, src_column, dst_bank, dst_column, issue_time=0.0):
  return Command(TRANSFER, src_bank, column=src_column, dst_bank=dst_bank,
                 dst_column=dst_column, issue_time=issue_time)
