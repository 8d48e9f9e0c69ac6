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
Command-line entry point.

    rowclone-sim simulate --config cfg.json --trace t.trace --format table
    rowclone-sim compare --format table
    rowclone-sim gen-trace --generator forkbench --param num_pages=64
    rowclone-sim validate-config --config cfg.json
    rowclone-sim sweep --param timing.tRAS=35,37.5 --workers 2

Exit status is 0 on success, 1 for configuration errors, 2 for trace and
request errors and 3 when the simulator breaks one of its own invariants.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import argparse
from absl import logging
import json
import sys
if sys.version >= '3':
  from typing import Any, Dict, List, Optional

from rowclone_sim import report as report_lib
from rowclone_sim import workloads
from rowclone_sim.config import GENERATORS, OUTPUT_FORMATS, load_config
from rowclone_sim.errors import (AlignmentError, AllocError, ConfigError,
                                 IncompatibleConfigsError, InvariantError,
                                 OutOfRangeError, ParseError, RequestError,
                                 SimulatorError)


__all__ = [
  "EXIT_OK",
  "EXIT_CONFIG",
  "EXIT_TRACE",
  "EXIT_INTERNAL",
  "build_parser",
  "main",
]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TRACE = 2
EXIT_INTERNAL = 3


def _parse_value(text):
  """JSON if it parses, else the raw string."""
  try:
    return json.loads(text)
  except ValueError:
    return text


def _key_values(pairs, split_lists=False):
  # type: (List[str], bool) -> Dict[str, Any]
  ret = {}
  for pair in pairs or []:
    if "=" not in pair:
      raise ConfigError(pair, "expected key=value")
    key, value = pair.split("=", 1)
    if split_lists:
      ret[key] = [_parse_value(v) for v in value.split(",")]
    else:
      ret[key] = _parse_value(value)
  return ret


def _common_flags():
  parser = argparse.ArgumentParser(add_help=False)
  parser.add_argument("--config", default=None,
                      help="Config file; the packaged DDR3-1066 config if "
                      "omitted.")
  parser.add_argument("--seed", type=int, default=None,
                      help="Overrides the config seed.")
  parser.add_argument("--out", default=None,
                      help="Output file; stdout if omitted.")
  parser.add_argument("--format", choices=OUTPUT_FORMATS, default=None,
                      help="Overrides output.format.")
  parser.add_argument("--rowclone", dest="rowclone", action="store_const",
                      const=True, default=None)
  parser.add_argument("--no-rowclone", dest="rowclone", action="store_const",
                      const=False)
  parser.add_argument("--zi", dest="zi", action="store_const", const=True,
                      default=None)
  parser.add_argument("--no-zi", dest="zi", action="store_const",
                      const=False)
  parser.add_argument("-v", "--verbose", action="count", default=0,
                      help="-v for progress, -vv for every command.")
  return parser


def build_parser():
  # type: () -> argparse.ArgumentParser
  parser = argparse.ArgumentParser(
      prog="rowclone-sim",
      description="Trace-driven DRAM simulator with in-DRAM bulk copy and "
      "initialization.")
  common = _common_flags()
  sub = parser.add_subparsers(dest="command")
  sub.required = True

  p = sub.add_parser("simulate", parents=[common],
                     help="Run one workload and report.")
  p.add_argument("--trace", default=None, help="Trace file to replay.")
  p.set_defaults(func=_simulate)

  p = sub.add_parser("compare", parents=[common],
                     help="Baseline vs RowClone (vs RowClone-ZI) ratios.")
  p.set_defaults(func=_compare)

  p = sub.add_parser("gen-trace", parents=[common],
                     help="Write a synthetic trace.")
  p.add_argument("--generator", choices=GENERATORS, default=None)
  p.add_argument("--param", action="append", default=[],
                 help="Generator parameter as key=value; repeatable.")
  p.set_defaults(func=_gen_trace)

  p = sub.add_parser("validate-config", parents=[common],
                     help="Check a config file.")
  p.set_defaults(func=_validate_config)

  p = sub.add_parser("sweep", parents=[common],
                     help="One simulation per point of a parameter grid.")
  p.add_argument("--param", action="append", default=[],
                 help="Dotted config path and values as path=v1,v2; "
                 "repeatable. Replaces sweep.parameters.")
  p.add_argument("--workers", type=int, default=None)
  p.set_defaults(func=_sweep)
  return parser


def _load(args):
  """The config file with the command-line overrides applied."""
  config = load_config(args.config)
  overrides = {}  # type: Dict[str, Any]
  if args.seed is not None:
    overrides["seed"] = args.seed
  if args.out is not None:
    overrides["output.path"] = args.out
  if args.format is not None:
    overrides["output.format"] = args.format
  if getattr(args, "trace", None) is not None:
    overrides["workload.trace"] = args.trace
    overrides["workload.generator"] = None
  if args.rowclone is not None:
    overrides["features.rowclone"] = args.rowclone
    if args.rowclone is False and args.zi is None:
      overrides["features.zi"] = False
  if args.zi is not None:
    overrides["features.zi"] = args.zi
  if overrides:
    config = config.with_overrides(overrides)
  config.validate()
  return config


def _emit(text, path):
  if path is None:
    sys.stdout.write(text)
    return
  with open(path, "w") as f:
    f.write(text)
  logging.info("Wrote %s", path)


def _simulate(args):
  config = _load(args)
  report = report_lib.run(config)
  _emit(report.render(config.output_format), config.output_path)
  return EXIT_OK


def _compare(args):
  config = _load(args)
  base = config.with_features(rowclone=False, zi=False)
  rowclone = config.with_features(rowclone=True, zi=False)
  zi = None
  if args.zi is not False:
    zi = config.with_features(rowclone=True, zi=True)
  table = report_lib.compare(base, rowclone, zi)
  fmt = config.output_format
  if fmt == "json":
    text = json.dumps(table.to_dict(), sort_keys=True, indent=2) + "\n"
  elif fmt == "csv":
    text = table.to_csv()
  else:
    text = table.to_table() + "\n"
  _emit(text, config.output_path)
  return EXIT_OK


def _gen_trace(args):
  config = _load(args)
  overrides = {}  # type: Dict[str, Any]
  if args.generator is not None:
    overrides["workload.generator"] = args.generator
    overrides["workload.trace"] = None
  for key, value in sorted(_key_values(args.param).items()):
    overrides["workload.params." + key] = value
  if overrides:
    config = config.with_overrides(overrides)
  if config.workload.generator is None:
    raise ConfigError("workload.generator", "gen-trace needs a generator")
  records = report_lib.load_workload(config)
  _emit(workloads.serialize_trace(records), config.output_path)
  return EXIT_OK


def _validate_config(args):
  config = _load(args)
  _emit("OK: {} banks x {} subarrays x {} rows of {} bytes\n".format(
      config.geometry.num_banks, config.geometry.subarrays_per_bank,
      config.geometry.rows_per_subarray, config.geometry.row_size_bytes),
        None)
  return EXIT_OK


def _sweep(args):
  config = _load(args)
  parameters = _key_values(args.param, split_lists=True) or None
  points = report_lib.sweep(config, parameters, args.workers)
  text = json.dumps({"points": points}, sort_keys=True, indent=2) + "\n"
  _emit(text, config.output_path)
  return EXIT_OK


def _exit_code(e):
  # type: (Exception) -> int
  if isinstance(e, (ConfigError, IncompatibleConfigsError)):
    return EXIT_CONFIG
  if isinstance(e, (ParseError, RequestError, AlignmentError,
                    OutOfRangeError, AllocError)):
    return EXIT_TRACE
  return EXIT_INTERNAL


def main(argv=None):
  # type: (Optional[List[str]]) -> int
  """Runs the command line in `argv` (sys.argv[1:] by default)."""
  args = build_parser().parse_args(argv)
  if args.verbose >= 2:
    logging.set_verbosity(logging.DEBUG)
  elif args.verbose == 1:
    logging.set_verbosity(logging.INFO)
  else:
    logging.set_verbosity(logging.WARNING)
  try:
    return args.func(args)
  except SimulatorError as e:
    sys.stderr.write("rowclone-sim {}: {}\n".format(args.command, e))
    return _exit_code(e)


if __name__ == "__main__":
  sys.exit(main())
