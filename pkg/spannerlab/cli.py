# Copyright 2026 The spanner-lab developers
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

"""Command line entry point, ``spanner-lab <mode> [options]``."""

import argparse
import pathlib
import sys

from typing import Optional, List

from spannerlab import defaults, __version__
from spannerlab.experiment import MODES, ExperimentConfig, Experiment
from spannerlab.utils import ConfigError, InvariantError, SpannerLabError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INVARIANT = 3

DEFAULT_OUT = 'out'


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    return [float(v) for v in text.split(',') if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(',') if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog='spanner-lab',
        description="Build and measure sparse (1+eps)-spanners of random "
                    "embedded graphs.",
    )
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')
    parser.add_argument('mode', choices=MODES,
                        help="build a spanner, verify an edge subset, "
                             "count lonely edges, run a sweep or a random "
                             "geometric graph run")
    parser.add_argument('--config', help="key = value configuration file")

    group = parser.add_argument_group('instance')
    group.add_argument('--n', type=int, help="number of vertices")
    group.add_argument('--p', type=float, help="edge probability")
    group.add_argument('--model', choices=('gnp', 'rgg'))
    group.add_argument('--radius', type=float,
                       help="connection radius of the rgg model")
    group.add_argument('--seed', type=int, help="seed of the first run")
    group.add_argument('--seeds', type=int,
                       help="number of seeds, run consecutively")

    group = parser.add_argument_group('spanner')
    group.add_argument('--epsilon', type=float)
    group.add_argument('--theta', type=float)
    group.add_argument('--M', type=float, dest='M')
    group.add_argument('--K', type=float, dest='K')
    group.add_argument('--cone-kind', dest='cone_kind',
                       choices=('yao', 'theta'))
    group.add_argument('--lonely-samples', dest='lonely_samples', type=int)

    group = parser.add_argument_group('sweep')
    group.add_argument('--grid-n', dest='grid_n', type=_int_list,
                       help="comma separated vertex counts")
    group.add_argument('--grid-p', dest='grid_p', type=_float_list)
    group.add_argument('--grid-epsilon', dest='grid_epsilon',
                       type=_float_list)
    group.add_argument('--workers', type=int)

    group = parser.add_argument_group('verify')
    group.add_argument('--instance', help="instance file to verify")
    group.add_argument('--edges', help="edge CSV of the subset to verify")

    parser.add_argument('--out', help=f"output directory "
                                      f"(default {DEFAULT_OUT})")
    parser.add_argument('--quiet', action='store_true',
                        help="do not report progress")
    return parser


def _print_summary(report):
    summary = report.summary()
    print(f"{report.config.mode}: {summary['seeds']} run(s)")
    for key, value in summary['mean'].items():
        print(f"  {key:38s} {value:.6g}")


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line interface and return the exit code: 0
    success, 1 usage error, 2 I/O error, 3 internal invariant
    violation."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    verbose = defaults['report_progress']
    if args.quiet:
        defaults['report_progress'] = False
    try:
        return _run(args)
    finally:
        defaults['report_progress'] = verbose


def _run(args) -> int:
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ('mode', 'config', 'quiet')}
    try:
        config = ExperimentConfig.from_file(args.config, mode=args.mode,
                                            overrides=overrides)
        if config.out is None:
            config.out = pathlib.Path(DEFAULT_OUT)
        experiment = Experiment(config, keep_runs=False)
        if config.mode == 'sweep':
            table = experiment.sweep()
            print(f"sweep: {len(table)} rows written to "
                  f"{config.out / 'sweep.csv'}")
        else:
            _print_summary(experiment.run())
    except ConfigError as e:
        print(f"spanner-lab: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"spanner-lab: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as e:
        print(f"spanner-lab: invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except SpannerLabError as e:
        # malformed instance or edge files
        print(f"spanner-lab: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
