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
"""Exceptions raised by the simulator.

Every class also derives from the builtin exception that a plain Python
caller would expect (`ValueError` for bad inputs, `RuntimeError` for broken
internal state), so `except ValueError` keeps working.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function


__all__ = [
  "SimulatorError",
  "ConfigError",
  "ProtocolError",
  "IllegalStateError",
  "OutOfRangeError",
  "AlignmentError",
  "RequestError",
  "CompileError",
  "AllocError",
  "ParseError",
  "IncompatibleConfigsError",
  "EnergyError",
  "InvariantError",
]


class SimulatorError(Exception):
  """Base class of all simulator errors."""


class ConfigError(SimulatorError, ValueError):
  """A configuration value violates an invariant.

  Attributes:
    field: Name of the first offending field.
    reason: Human-readable description of the violated invariant.
  """
  def __init__(self, field, reason):
    super(ConfigError, self).__init__(
        "Invalid configuration field '{}': {}".format(field, reason))
    self.field = field
    self.reason = reason


class ProtocolError(SimulatorError, ValueError):
  """A DRAM command was applied in a state or at a time where it is illegal.

  Attributes:
    kind: One of "timing_violation", "illegal_transition" or
      "fpm_cross_subarray".
    constraint: Name of the violated timing constraint for timing violations,
      otherwise None.
  """
  TIMING_VIOLATION = "timing_violation"
  ILLEGAL_TRANSITION = "illegal_transition"
  FPM_CROSS_SUBARRAY = "fpm_cross_subarray"

  def __init__(self, kind, message, constraint=None):
    super(ProtocolError, self).__init__("{}: {}".format(kind, message))
    self.kind = kind
    self.constraint = constraint


class IllegalStateError(SimulatorError, ValueError):
  """A command can never become legal from the current bank state."""


class OutOfRangeError(SimulatorError, ValueError):
  """An address lies outside the simulated capacity."""


class AlignmentError(SimulatorError, ValueError):
  """An address or length is not cacheline aligned."""


class RequestError(SimulatorError, ValueError):
  """A memory request is malformed or targets a reserved location."""


class CompileError(SimulatorError, ValueError):
  """A request cannot be compiled with the selected mechanism."""


class AllocError(SimulatorError, RuntimeError):
  """The page allocator has no free page left."""


class ParseError(SimulatorError, ValueError):
  """A trace file could not be parsed.

  Attributes:
    line: 1-based line number of the offending record, or 0 when the error is
      not tied to a line (for example a missing file).
    reason: Short description of the problem.
  """
  def __init__(self, line, reason):
    super(ParseError, self).__init__("line {}: {}".format(line, reason))
    self.line = line
    self.reason = reason


class IncompatibleConfigsError(SimulatorError, ValueError):
  """Two configurations differ in more than their feature flags."""


class EnergyError(SimulatorError, ZeroDivisionError):
  """An energy ratio has a zero denominator."""


class InvariantError(SimulatorError, RuntimeError):
  """The simulator broke one of its own invariants."""
