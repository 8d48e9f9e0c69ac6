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
"""Bit-field mapping between physical byte addresses and DRAM coordinates."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import sys
if sys.version >= '3':
  from typing import Iterable, Sequence, Tuple

from rowclone_sim import util
from rowclone_sim.errors import AlignmentError, ConfigError, OutOfRangeError
from rowclone_sim.geometry import Geometry


__all__ = [
  "FIELD_NAMES",
  "DEFAULT_FIELD_ORDER",
  "AddressMapping",
  "map_address",
  "inverse_map",
]

FIELD_NAMES = ("row", "subarray", "bank", "column")

# Most significant field first. The byte offset within a cacheline always
# occupies the lowest bits.
DEFAULT_FIELD_ORDER = ("row", "subarray", "bank", "column")


class AddressMapping(object):
  """
  Splits a physical address into (bank, subarray, row, column, offset).

  The address is read as a concatenation of bit fields, most significant
  first, in `field_order`, followed by the byte offset within a cacheline.
  Every field is log2 of the corresponding geometry count wide, so the mapping
  is a bijection onto [0, geometry.total_bytes).
  """

  def __init__(self, geometry, field_order=DEFAULT_FIELD_ORDER):
    # type: (Geometry, Sequence[str]) -> None
    field_order = tuple(field_order)
    if sorted(field_order) != sorted(FIELD_NAMES):
      raise ConfigError("mapping.field_order",
                        "must be a permutation of {}, got {}"
                        "".format(list(FIELD_NAMES), list(field_order)))
    self._geometry = geometry
    self._field_order = field_order
    self._offset_bits = util.log2_exact(geometry.cacheline_bytes)
    self._widths = {
      "row": util.log2_exact(geometry.rows_per_subarray),
      "subarray": util.log2_exact(geometry.subarrays_per_bank),
      "bank": util.log2_exact(geometry.num_banks),
      "column": util.log2_exact(geometry.columns_per_row),
    }
    # Bit position of the least significant bit of each field.
    self._shifts = {}
    shift = self._offset_bits
    for name in reversed(field_order):
      self._shifts[name] = shift
      shift += self._widths[name]
    self._total_bits = shift

  @property
  def geometry(self):
    return self._geometry

  @property
  def field_order(self):
    # type: () -> Tuple[str, ...]
    return self._field_order

  @property
  def total_bits(self):
    return self._total_bits

  def width(self, field):
    # type: (str) -> int
    return self._widths[field]

  def shift(self, field):
    # type: (str) -> int
    return self._shifts[field]

  @property
  def row_contiguous(self):
    # type: () -> bool
    """True if every row occupies one contiguous, row-aligned address range.

    This holds exactly when the column field is the least significant one.
    """
    return self._field_order[-1] == "column"

  def _field(self, addr, name):
    return (addr >> self._shifts[name]) & ((1 << self._widths[name]) - 1)

  def map(self, addr):
    # type: (int) -> Tuple[int, int, int, int]
    """Returns (bank, subarray, row, column) of byte address `addr`."""
    if not 0 <= addr < self._geometry.total_bytes:
      raise OutOfRangeError("Address {:#x} outside [0, {:#x})".format(
          addr, self._geometry.total_bytes))
    return (self._field(addr, "bank"), self._field(addr, "subarray"),
            self._field(addr, "row"), self._field(addr, "column"))

  def offset(self, addr):
    # type: (int) -> int
    return addr & ((1 << self._offset_bits) - 1)

  def inverse(self, bank, subarray, row, column=0, offset=0):
    # type: (int, int, int, int, int) -> int
    values = {"bank": bank, "subarray": subarray, "row": row,
              "column": column}
    addr = offset
    for name, value in values.items():
      if not 0 <= value < (1 << self._widths[name]):
        raise OutOfRangeError("{} index {} out of range".format(name, value))
      addr |= value << self._shifts[name]
    return addr

  def row_of(self, addr):
    # type: (int) -> Tuple[int, int, int]
    """Returns the (bank, subarray, row) key that holds `addr`."""
    return self.map(addr)[:3]

  def row_base(self, bank, subarray, row):
    # type: (int, int, int) -> int
    """Address of column 0 of a row."""
    return self.inverse(bank, subarray, row)

  def is_row_aligned(self, addr):
    # type: (int) -> bool
    """True if `addr` is the first byte of a row under a contiguous mapping."""
    return self.row_contiguous and addr % self._geometry.row_size_bytes == 0

  def check_line_aligned(self, addr, what="address"):
    if addr % self._geometry.cacheline_bytes != 0:
      raise AlignmentError("{} {:#x} is not aligned to {}-byte cachelines"
                           "".format(what, addr,
                                     self._geometry.cacheline_bytes))

  def lines(self, addr, length):
    # type: (int, int) -> Iterable[int]
    """Yields the cacheline addresses in [addr, addr + length)."""
    step = self._geometry.cacheline_bytes
    return range(addr, addr + length, step)

  def __eq__(self, other):
    return (isinstance(other, AddressMapping) and
            self._geometry == other._geometry and
            self._field_order == other._field_order)

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash((self._geometry, self._field_order))

  def __repr__(self):
    return "AddressMapping[{}|offset]".format("|".join(self._field_order))


def map_address(addr, mapping):
  # type: (int, AddressMapping) -> Tuple[int, int, int, int]
  """Returns (bank, subarray, row, column) of `addr` under `mapping`.

  Raises:
    OutOfRangeError: if `addr` is outside the simulated capacity.
  """
  return mapping.map(addr)


def inverse_map(coords, mapping, offset=0):
  # type: (Tuple[int, int, int, int], AddressMapping, int) -> int
  bank, subarray, row, column = coords
  return mapping.inverse(bank, subarray, row, column, offset)
