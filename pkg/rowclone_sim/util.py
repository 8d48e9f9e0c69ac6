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
"""Utility functions for rowclone_sim
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import sys
if sys.version >= '3':
  from typing import Iterable, Tuple


__all__ = [
  "ListView",
  "TIME_EPSILON",
  "is_power_of_two",
  "log2_exact",
  "intervals_overlap",
  "any_overlap",
]


# Slack for timing comparisons, in ns.
TIME_EPSILON = 1e-6


class ListView(object):
  """Immutable list wrapper.

  Used to hand out internal command and record lists without letting callers
  append to them.
  """

  def __init__(self, list_):
    if not isinstance(list_, list):
      raise TypeError("Expected a list, got: {}.".format(type(list_)))
    self._list = list_

  def __iter__(self):
    return iter(self._list)

  def __len__(self):
    return len(self._list)

  def __bool__(self):
    return bool(self._list)

  # Python 3 wants __bool__, Python 2.7 wants __nonzero__
  __nonzero__ = __bool__

  def __getitem__(self, i):
    return self._list[i]

  def __add__(self, other):
    if not isinstance(other, list):
      other = list(other)
    return list(self) + other

  def __str__(self):
    return "ListView[{}]".format(self._list)


def is_power_of_two(value):
  # type: (int) -> bool
  return value >= 1 and (value & (value - 1)) == 0


def log2_exact(value):
  # type: (int) -> int
  """Returns log2 of `value`, which must be a power of two."""
  if not is_power_of_two(value):
    raise ValueError("{} is not a power of two".format(value))
  return value.bit_length() - 1


def intervals_overlap(a, b):
  # type: (Tuple[int, int], Tuple[int, int]) -> bool
  """True if the half-open byte intervals `a` and `b` share a byte."""
  return a[0] < b[1] and b[0] < a[1]


def any_overlap(left, right):
  # type: (Iterable[Tuple[int, int]], Iterable[Tuple[int, int]]) -> bool
  right = list(right)
  for a in left:
    for b in right:
      if intervals_overlap(a, b):
        return True
  return False
