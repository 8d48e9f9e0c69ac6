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
Standalone timing checker for issued command lists.

This deliberately shares no code with `dram.Dram`: it re-derives every
constraint by searching backwards through the command history, so a bug in
the state machine that produced a timeline does not hide itself here.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import sys
if sys.version >= '3':
  from typing import Iterable, List, Optional

from rowclone_sim import command as cmd_lib
from rowclone_sim import util
from rowclone_sim.errors import InvariantError
from rowclone_sim.geometry import TimingParams


__all__ = [
  "Violation",
  "check_commands",
  "assert_legal",
]


class Violation(object):
  """One broken constraint found by the checker."""

  def __init__(self, index, constraint, required, actual):
    # type: (int, str, float, float) -> None
    self.index = index
    self.constraint = constraint
    self.required = required
    self.actual = actual

  def __repr__(self):
    return "Violation[#{} {}: issued {} < required {}]".format(
        self.index, self.constraint, self.actual, self.required)


def _last(history, pred):
  """Newest entry of `history` matching `pred`, or None."""
  for entry in reversed(history):
    if pred(entry):
      return entry
  return None


def _touches_bank(c, bank):
  return c.bank == bank or (c.kind == cmd_lib.TRANSFER and c.dst_bank == bank)


def _open_act(history, bank):
  # type: (List[cmd_lib.Command], int) -> Optional[cmd_lib.Command]
  """The ACT that opened `bank`, if the bank is open after `history`."""
  for c in reversed(history):
    if c.bank != bank or c.kind not in (cmd_lib.ACT, cmd_lib.PRE):
      continue
    return c if c.kind == cmd_lib.ACT else None
  return None


def _acts_since_open(history, bank):
  count = 0
  for c in reversed(history):
    if c.bank == bank and c.kind == cmd_lib.PRE:
      break
    if c.bank == bank and c.kind == cmd_lib.ACT:
      count += 1
  return count


def _rules(history, acts, c, t):
  """Yields (constraint, required time) for command `c` after `history`.

  `acts` holds the issue times of every ACT in `history`.
  """
  if history:
    yield "command_order", history[-1].issue_time

  if c.kind == cmd_lib.ACT:
    opener = _open_act(history, c.bank)
    if opener is not None:
      yield "tRAS", opener.issue_time + t.tRAS
    else:
      prev_act = _last(history, lambda h: h.kind == cmd_lib.ACT and
                       h.bank == c.bank)
      if prev_act is not None:
        yield "tRC", prev_act.issue_time + t.tRC
      prev_pre = _last(history, lambda h: h.kind == cmd_lib.PRE and
                       h.bank == c.bank)
      if prev_pre is not None:
        yield "tRP", prev_pre.issue_time + t.tRP
    other = _last(history, lambda h: h.kind == cmd_lib.ACT and
                  h.bank != c.bank)
    if other is not None:
      yield "tRRD", other.issue_time + t.tRRD
    if len(acts) >= 4:
      yield "tFAW", acts[-4] + t.tFAW

  elif c.kind == cmd_lib.PRE:
    opener = _open_act(history, c.bank)
    if opener is not None:
      yield "tRAS", opener.issue_time + t.tRAS
    last_read = _last(history, lambda h: h.bank == c.bank and
                      h.kind in (cmd_lib.RD, cmd_lib.TRANSFER))
    if last_read is not None:
      yield "tRTP", last_read.issue_time + t.tRTP
    last_write = _last(history, lambda h: (
        (h.kind == cmd_lib.WR and h.bank == c.bank) or
        (h.kind == cmd_lib.TRANSFER and h.dst_bank == c.bank)))
    if last_write is not None:
      if last_write.kind == cmd_lib.WR:
        data_end = last_write.issue_time + t.CWL + t.tBURST
      else:
        data_end = last_write.issue_time + t.tBURST
      yield "tWR", data_end + t.tWR

  else:
    for bank in c.banks:
      opener = _open_act(history, bank)
      if opener is not None:
        yield "tRCD", opener.issue_time + t.tRCD
    same_kind = _last(history, lambda h: h.kind == c.kind)
    if same_kind is not None:
      yield "tCCD", same_kind.issue_time + t.tCCD
    if c.kind in (cmd_lib.RD, cmd_lib.WR):
      burst = _last(history, lambda h: h.kind in (cmd_lib.RD, cmd_lib.WR))
      if burst is not None:
        lead = t.CL if burst.kind == cmd_lib.RD else t.CWL
        own_lead = t.CL if c.kind == cmd_lib.RD else t.CWL
        yield "data_bus", burst.issue_time + lead + t.tBURST - own_lead


def _structural(history, c, fpm_enabled):
  # type: (List[cmd_lib.Command], cmd_lib.Command, bool) -> Optional[str]
  if c.kind == cmd_lib.ACT:
    opener = _open_act(history, c.bank)
    if opener is None:
      return None
    if not fpm_enabled:
      return "illegal_transition"
    if _acts_since_open(history, c.bank) > 1:
      return "illegal_transition"
    used = _last(history, lambda h: h.is_column and _touches_bank(h, c.bank)
                 and h.issue_time >= opener.issue_time)
    if used is not None:
      return "illegal_transition"
    if opener.subarray != c.subarray:
      return "fpm_cross_subarray"
    return None
  for bank in c.banks:
    if _open_act(history, bank) is None:
      return "illegal_transition"
  return None


def check_commands(commands, timing, fpm_enabled=True):
  # type: (Iterable[cmd_lib.Command], TimingParams, bool) -> List[Violation]
  """
  Re-checks a list of issued commands against every timing rule.

  Args:
    commands: Commands in issue order, each carrying its `issue_time`.
    timing: Timing parameters the commands were scheduled under.
    fpm_enabled: Whether the device accepts a second ACT to an open bank.
      If False, every such ACT is an "illegal_transition".

  Returns:
    All violations found, in command order. For one command, violations are
    listed in rule order. Structural problems (a column command to a closed
    bank, a third ACT, a cross-subarray second ACT, any second ACT without
    FPM) are reported with the constraint names "illegal_transition" and
    "fpm_cross_subarray".
  """
  history = []  # type: List[cmd_lib.Command]
  acts = []  # type: List[float]
  found = []  # type: List[Violation]
  for i, c in enumerate(commands):
    problem = _structural(history, c, fpm_enabled)
    if problem is not None:
      found.append(Violation(i, problem, float("nan"), c.issue_time))
    for name, required in _rules(history, acts, c, timing):
      if c.issue_time + util.TIME_EPSILON < required:
        found.append(Violation(i, name, required, c.issue_time))
    history.append(c)
    if c.kind == cmd_lib.ACT:
      acts.append(c.issue_time)
  return found


def assert_legal(commands, timing, fpm_enabled=True):
  # type: (Iterable[cmd_lib.Command], TimingParams, bool) -> None
  """Raises InvariantError if `check_commands` finds any violation."""
  violations = check_commands(commands, timing, fpm_enabled)
  if violations:
    raise InvariantError("Timeline breaks {} timing rule(s); first: {}"
                         "".format(len(violations), violations[0]))
