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
"""rowclone_sim: a trace-driven DRAM simulator with in-DRAM bulk copy

Models Fast Parallel Mode and Pipelined Serial Mode row copies, zero-row
initialization and the cache and page-allocation support around them, next
to a conventional read/write baseline, and reports latency, energy and
channel traffic for both.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

# pylint: disable=wildcard-import
from rowclone_sim.cache import *
from rowclone_sim.checker import *
from rowclone_sim.command import *
from rowclone_sim.compiler import *
from rowclone_sim.config import *
from rowclone_sim.controller import *
from rowclone_sim.dram import *
from rowclone_sim.energy import *
from rowclone_sim.errors import *
from rowclone_sim.geometry import *
from rowclone_sim.mapping import *
from rowclone_sim.reference import *
from rowclone_sim.report import *
from rowclone_sim.system import *
from rowclone_sim.util import *
# pylint: enable=wildcard-import

# Other parts go under sub-modules
from rowclone_sim import request
from rowclone_sim.request import BulkRequest
from rowclone_sim import workloads

del absolute_import
del division
del print_function
