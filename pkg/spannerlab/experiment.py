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

import math
import pathlib
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from warnings import warn

import numpy as np
import pandas as pd

from typing import Optional, Dict, Any, List, Union

from spannerlab import defaults, __version__
from spannerlab.file_readers import load_instance, load_edge_set
from spannerlab.file_writers import save_instance, save_table, save_report
from spannerlab.geometry import ConeSpec
from spannerlab.instance import Params, EmbeddedGraph, generate_instance
from spannerlab.lonely import (
    lonely_edges, essential_edges, expected_lonely_integral, lonely_report
)
from spannerlab.paths import apsp, largest_component
from spannerlab.spanner import (
    CONE_KINDS, critical_radii, cone_table, classify_pairs,
    assemble_spanner, construct_all, verify_stretch, check_far_pairs,
    yao_stretch_all, cone_occupancy, size_constant
)
from spannerlab.utils import Datastore, ConfigError, report_progress

MODES = ('build', 'verify', 'lonely', 'sweep', 'rgg')

INT_KEYS = ('n', 'seed', 'seeds', 'lonely_samples', 'workers')
FLOAT_KEYS = ('p', 'epsilon', 'theta', 'M', 'K', 'radius')
STR_KEYS = ('mode', 'model', 'out', 'cone_kind', 'instance', 'edges')
LIST_KEYS = {'grid_n': int, 'grid_p': float, 'grid_epsilon': float}
CONFIG_KEYS = INT_KEYS + FLOAT_KEYS + STR_KEYS + tuple(LIST_KEYS)

PARAM_KEYS = ('n', 'p', 'epsilon', 'theta', 'M', 'K', 'seed', 'model',
              'radius')

# Reported as mean and max over the seeds of a run
SUMMARY_KEYS = (
    'sizes.E1', 'sizes.E2', 'sizes.E3', 'sizes.E4', 'sizes.E_eps',
    'stretch.max_stretch', 'stretch.infinite_pairs',
    'construct.max_ratio', 'construct.empirical_constant',
    'construct.stretch_violations', 'construct.containment_failures_near',
    'far_pairs.distance_violations', 'yao.max_ratio',
    'lonely.lonely_count', 'lonely.essential_count',
    'lonely.essential_missing', 'occupancy.interior', 'size_constant',
)


def default_radius(n: int) -> float:
    """(25 ln n / n)^(1/2), capped at sqrt(2)."""
    return min(math.sqrt(25 * math.log(n) / n), math.sqrt(2))


def _coerce(key, value):
    if key not in CONFIG_KEYS:
        raise ConfigError(key, "unknown configuration key")
    if value is None:
        return None
    if key in LIST_KEYS:
        if isinstance(value, str):
            value = [v for v in (s.strip() for s in value.split(',')) if v]
        try:
            return [LIST_KEYS[key](v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(key, f"malformed list {value!r}")
    if key in INT_KEYS:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"not an integer: {value!r}")
    if key in FLOAT_KEYS:
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"not a number: {value!r}")
    return str(value)


def read_config(file_path: Union[str, pathlib.Path]) -> Dict[str, Any]:
    """Read a `key = value` configuration file. Blank lines and text
    after `#` are ignored, list values are comma separated.

    Raises
    ------
    ConfigError
        For a malformed line or an unknown key.
    OSError
        If the file cannot be read.

    """
    values = {}
    with open(str(file_path), 'r', encoding='utf-8') as f:
        for i, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            key = key.strip()
            if not sep or not key:
                raise ConfigError('config', f"line {i}: expected key = value")
            values[key] = _coerce(key, value.strip())
    return values


class ExperimentConfig(object):
    """Validated configuration of one invocation.

    Attributes
    ----------
    mode : str
        One of build, verify, lonely, sweep or rgg.
    params : Params or None
        Instance parameters of the first seed. None only in verify mode
        with an instance file.
    seeds : int
        Repetitions, run with seeds `params.seed`, `params.seed + 1`, ...
    out : pathlib.Path or None
        Output directory, nothing is written if None.
    cone_kind : str
    lonely_samples : int or None
    grid_n, grid_p, grid_epsilon : list or None
        Sweep grid, None for an axis fixed at the `params` value.
    workers : int
        Processes used by a sweep.
    instance, edges : pathlib.Path or None
        Instance file and edge subset of verify mode.
    radius_auto : bool
        The rgg radius was not given and follows `default_radius(n)`.

    """
    def __init__(self, mode: str, params: Optional[Params], seeds: int = 1,
                 out=None, cone_kind: Optional[str] = None,
                 lonely_samples: Optional[int] = None,
                 grid_n: Optional[List[int]] = None,
                 grid_p: Optional[List[float]] = None,
                 grid_epsilon: Optional[List[float]] = None,
                 workers: int = 1, instance=None, edges=None,
                 radius_auto: bool = False):
        if mode not in MODES:
            raise ConfigError('mode', f"must be one of {', '.join(MODES)}")
        self.mode = mode

        if params is None and not (mode == 'verify' and instance):
            raise ConfigError('n', "required")
        if mode == 'rgg' and params.model != 'rgg':
            raise ConfigError('model', "rgg mode needs the rgg model")
        self.params = params

        if seeds is None or int(seeds) < 1:
            raise ConfigError('seeds', "must be at least 1")
        self.seeds = int(seeds)
        if params is not None and params.seed + self.seeds > 2 ** 64:
            raise ConfigError('seeds', "seed range exceeds 64 bits")

        self.cone_kind = defaults['cone_kind'] if cone_kind is None \
            else cone_kind
        if self.cone_kind not in CONE_KINDS:
            raise ConfigError('cone_kind',
                              f"must be one of {', '.join(CONE_KINDS)}")

        if lonely_samples is not None and lonely_samples < 10 ** 4:
            raise ConfigError('lonely_samples', "must be at least 10000")
        self.lonely_samples = lonely_samples

        if workers is None or int(workers) < 1:
            raise ConfigError('workers', "must be at least 1")
        self.workers = int(workers)

        self.radius_auto = radius_auto
        self.grid_n = grid_n
        self.grid_p = grid_p
        self.grid_epsilon = grid_epsilon
        if mode == 'sweep':
            self._check_grid()

        self.out = None if out is None else pathlib.Path(out)
        self.instance = None if instance is None else pathlib.Path(instance)
        self.edges = None if edges is None else pathlib.Path(edges)
        if self.edges is not None and self.instance is None:
            raise ConfigError('edges', "needs an instance file")

    def _check_grid(self):
        axes = {'grid_n': self.grid_n, 'grid_p': self.grid_p,
                'grid_epsilon': self.grid_epsilon}
        if all(axis is None for axis in axes.values()):
            raise ConfigError('grid_n', "sweep grid is empty")
        for key, axis in axes.items():
            if axis is not None and len(axis) == 0:
                raise ConfigError(key, "sweep grid is empty")
        if self.grid_p is not None and self.params.model == 'rgg':
            raise ConfigError('grid_p', "not valid for the rgg model")
        # every grid point must give valid parameters
        self.grid_params()

    @classmethod
    def from_values(cls, mode: str,
                    values: Dict[str, Any]) -> 'ExperimentConfig':
        """Build from a mapping of configuration keys to (possibly
        string) values."""
        values = {k: _coerce(k, v) for k, v in values.items()}
        mode = values.pop('mode', None) if mode is None else mode
        values.pop('mode', None)
        if mode is None:
            raise ConfigError('mode', "required")

        param_values = {k: values[k] for k in PARAM_KEYS
                        if values.get(k) is not None}
        radius_auto = False
        if mode == 'rgg':
            param_values['model'] = 'rgg'
        if param_values.get('model') == 'rgg':
            param_values.pop('p', None)
            if 'radius' not in param_values and 'n' in param_values:
                n = param_values['n']
                if isinstance(n, int) and n >= 2:
                    param_values['radius'] = default_radius(n)
                    radius_auto = True

        params = None
        if 'n' in param_values:
            params = Params(**param_values)
        elif not (mode == 'verify' and values.get('instance')):
            raise ConfigError('n', "required")

        return cls(
            mode, params,
            seeds=1 if values.get('seeds') is None else values['seeds'],
            out=values.get('out'),
            cone_kind=values.get('cone_kind'),
            lonely_samples=values.get('lonely_samples'),
            grid_n=values.get('grid_n'),
            grid_p=values.get('grid_p'),
            grid_epsilon=values.get('grid_epsilon'),
            workers=1 if values.get('workers') is None else values['workers'],
            instance=values.get('instance'),
            edges=values.get('edges'),
            radius_auto=radius_auto,
        )

    @classmethod
    def from_file(cls, file_path: Optional[Union[str, pathlib.Path]] = None,
                  mode: Optional[str] = None,
                  overrides: Optional[Dict[str, Any]] = None
                  ) -> 'ExperimentConfig':
        """Read a configuration file and apply `overrides` on top. Keys
        of `overrides` with value None are ignored."""
        values = {} if file_path is None else read_config(file_path)
        if overrides:
            values.update({k: v for k, v in overrides.items()
                           if v is not None})
        return cls.from_values(mode, values)

    def seed_list(self) -> List[int]:
        if self.params is None:
            return [None]
        return [self.params.seed + i for i in range(self.seeds)]

    def grid_params(self) -> List[Params]:
        """Parameters of every (n, p, epsilon, seed) job, seeds innermost."""
        ns = self.grid_n or [self.params.n]
        ps = self.grid_p or [self.params.p]
        epss = self.grid_epsilon or [self.params.epsilon]
        out = []
        for n, p, eps in itertools.product(ns, ps, epss):
            for seed in self.seed_list():
                changes = {'n': n, 'epsilon': eps, 'seed': seed}
                if self.params.model == 'rgg':
                    if self.radius_auto:
                        changes['radius'] = default_radius(n)
                else:
                    changes['p'] = p
                out.append(self.params.replace(**changes))
        return out

    def to_dict(self) -> Dict[str, Any]:
        """Echo of the configuration for reports. The output directory is
        left out so that reports do not depend on where they are
        written."""
        out = {
            'mode': self.mode,
            'params': None if self.params is None else self.params.to_dict(),
            'seeds': self.seeds,
            'cone_kind': self.cone_kind,
            'lonely_samples': self.lonely_samples,
        }
        if self.mode == 'sweep':
            out['grid'] = {'n': self.grid_n, 'p': self.grid_p,
                           'epsilon': self.grid_epsilon}
        if self.mode == 'verify':
            out['instance'] = None if self.instance is None \
                else self.instance.name
            out['edges'] = None if self.edges is None else self.edges.name
        return out


class SeedRun(object):
    """Pipeline of one instance, computed lazily in a Datastore.

    Every item is tagged with the pipeline phase it belongs to, so
    `data.timings()` gives the wall clock of each phase.

    Parameters
    ----------
    params
        Instance parameters, may be None for a given `graph` that is only
        verified.
    cone_kind
        'yao' or 'theta'.
    lonely_samples
        Samples of the lonely edge expectation.
    graph
        Use this graph instead of generating one.
    subset
        Edge mask to verify, the spanner by default.

    """
    def __init__(self, params: Optional[Params], cone_kind: str = 'yao',
                 lonely_samples: Optional[int] = None,
                 graph: Optional[EmbeddedGraph] = None,
                 subset: Optional[np.ndarray] = None):
        self.params = params
        self.cone_kind = cone_kind
        self.lonely_samples = lonely_samples
        self.data = Datastore()

        if graph is None:
            self.data.add_generator('graph', self.generate_graph,
                                    phase='generate')
        else:
            self.data.add('graph', graph, phase='generate')
        self.data.add_generator('component', self.calc_component,
                                phase='oracle')
        self.data.add_generator('oracle', self.calc_oracle, phase='oracle')
        self.data.add_generator('table', self.calc_cone_table, phase='build')
        self.data.add_generator('classes', self.calc_classes, phase='build')
        self.data.add_generator('spanner', self.calc_spanner, phase='build')
        self.data.add_generator('traces', self.calc_traces,
                                phase='construct')
        self.data.add_generator('yao', self.calc_yao, phase='construct')
        if subset is None:
            self.data.add_generator('subset', self.calc_subset,
                                    phase='build')
        else:
            self.data.add('subset', np.asarray(subset, dtype=bool),
                          phase='verify')
        self.data.add_generator('stretch', self.calc_stretch, phase='verify')
        self.data.add_generator('far_pairs', self.calc_far_pairs,
                                phase='verify')
        self.data.add_generator('lonely', self.calc_lonely, phase='lonely')
        self.data.add_generator('essential', self.calc_essential,
                                phase='lonely')
        self.data.add_generator('lonely_estimate', self.calc_lonely_estimate,
                                phase='lonely')

    @property
    def seed(self) -> Optional[int]:
        if self.params is not None:
            return self.params.seed
        return self.data.graph.seed

    @property
    def radii(self):
        return critical_radii(self.params)

    def generate_graph(self) -> EmbeddedGraph:
        return generate_instance(self.params)

    def calc_component(self) -> np.ndarray:
        g = self.data.graph
        component = largest_component(g)
        if len(component) < g.n:
            warn(f"graph is disconnected, {g.n - len(component)} vertices "
                 f"outside the largest component are skipped")
        return component

    def calc_oracle(self):
        return apsp(self.data.graph, self.data.component)

    def calc_cone_table(self):
        return cone_table(self.data.graph, ConeSpec(self.params.epsilon),
                          self.cone_kind)

    def calc_classes(self):
        return classify_pairs(self.data.graph, self.radii, self.data.table,
                              self.data.oracle)

    def calc_spanner(self):
        return assemble_spanner(self.data.graph, self.params,
                                oracle=self.data.oracle,
                                table=self.data.table,
                                classes=self.data.classes)

    def calc_traces(self):
        return construct_all(self.data.graph, self.radii, self.data.table,
                             self.data.oracle, spanner=self.data.spanner)

    def calc_yao(self):
        return yao_stretch_all(self.data.table, self.data.component)

    def calc_subset(self):
        return self.data.spanner.union

    def calc_stretch(self):
        return verify_stretch(self.data.graph, self.data.subset,
                              self.data.oracle, seed=self.seed)

    def calc_far_pairs(self):
        return check_far_pairs(self.data.graph, self.radii, self.data.oracle,
                               self.params.epsilon, table=self.data.table)

    def calc_lonely(self):
        return lonely_edges(self.data.graph, self.params.epsilon)

    def calc_essential(self):
        return essential_edges(self.data.graph, self.params.epsilon,
                               oracle=self.data.oracle,
                               lonely=self.data.lonely)

    def calc_lonely_estimate(self):
        return expected_lonely_integral(
            self.params.n, self.params.p, self.params.epsilon,
            samples=self.lonely_samples, seed=self.params.seed
        )

    def build_section(self) -> Dict[str, Any]:
        g = self.data.graph
        spanner = self.data.spanner
        radii = self.radii
        table = self.data.table
        n_pairs = g.n * (g.n - 1) / 2
        return {
            'seed': self.seed,
            'n': g.n,
            'm': g.m,
            'radii': radii.to_dict(),
            'tau': table.spec.tau,
            'component_size': spanner.info['component_size'],
            'skipped_pairs': spanner.info['skipped_pairs'],
            'pair_classes': spanner.info['pair_classes'],
            'sizes': spanner.sizes(),
            'e1_bound': n_pairs * math.pi * radii.r_eps ** 2 * g.p
            if g.p else None,
            'e2_bound': table.spec.tau * g.n,
            'long_path_edges': spanner.long_path_edges(radii.R_eps),
        }

    def stretch_section(self) -> Dict[str, Any]:
        out = self.data.stretch.to_dict()
        if self.params is not None:
            bound = 1 + 7 * self.params.epsilon
            out['bound'] = bound
            out['within_bound'] = bool(out['max_stretch'] <= bound + 1e-9)
        return out

    def lonely_section(self, estimate: bool = False,
                       spanner: bool = True) -> Dict[str, Any]:
        report = lonely_report(
            self.data.graph, self.params.epsilon,
            essential=self.data.essential,
            estimate=self.data.lonely_estimate if estimate else None,
            spanner_mask=self.data.spanner.union if spanner else None,
            mask=self.data.lonely,
        )
        return report.to_dict()

    def timings(self) -> Dict[str, float]:
        return self.data.timings()


class RunReport(object):
    """Measurements of a run over one or more seeds.

    `to_dict` holds only values that are pure functions of the
    configuration, wall clock times are kept apart in `timings`.

    Attributes
    ----------
    config : ExperimentConfig
    runs : list of dict
        One entry per seed.
    timings : dict
        Seconds per phase, keyed by seed.

    """
    def __init__(self, config: ExperimentConfig, runs: List[Dict[str, Any]],
                 timings: Dict[str, Dict[str, float]]):
        self.config = config
        self.runs = runs
        self.timings = timings

    def __repr__(self):
        return f'RunReport(mode={self.config.mode!r}, runs={len(self.runs)})'

    def __getitem__(self, i):
        return self.runs[i]

    def __len__(self):
        return len(self.runs)

    @staticmethod
    def _lookup(run, key):
        value = run
        for part in key.split('.'):
            if not isinstance(value, dict) or part not in value:
                return None
            value = value[part]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return None
        return value

    def summary(self) -> Dict[str, Any]:
        """Mean and max over seeds of the headline numbers."""
        mean = {}
        top = {}
        for key in SUMMARY_KEYS:
            values = [self._lookup(run, key) for run in self.runs]
            values = [v for v in values if v is not None]
            if not values:
                continue
            mean[key] = float(np.mean(values))
            top[key] = float(np.max(values))
        return {'seeds': len(self.runs), 'mean': mean, 'max': top}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'version': __version__,
            'config': self.config.to_dict(),
            'runs': self.runs,
            'summary': self.summary(),
        }


class Experiment(object):
    """Runs the modes of an ExperimentConfig and writes their artefacts:
    `report.json`, `timings.json` and per seed `seed_<seed>/instance.txt`
    and `seed_<seed>/edges.csv` (`sweep.csv` for sweeps).

    """
    def __init__(self, config: ExperimentConfig, keep_runs: bool = True):
        self.config = config
        self.keep_runs = keep_runs
        self.seed_runs = []

    def __getitem__(self, key):
        return self.seed_runs[key]

    def __len__(self):
        return len(self.seed_runs)

    def _check_out(self):
        if self.config.out is not None:
            self.config.out.mkdir(parents=True, exist_ok=True)

    def _seed_dir(self, seed):
        name = 'seed_none' if seed is None else f'seed_{seed}'
        return self.config.out / name

    def _new_run(self, params, **kwargs) -> SeedRun:
        run = SeedRun(params, cone_kind=self.config.cone_kind,
                      lonely_samples=self.config.lonely_samples, **kwargs)
        if not self.keep_runs:
            self.seed_runs.clear()
        self.seed_runs.append(run)
        return run

    def _params_of(self, seed):
        return self.config.params.replace(seed=seed)

    def run(self) -> RunReport:
        """Run the configured mode, except sweep, over every seed."""
        mode = self.config.mode
        if mode == 'sweep':
            raise ConfigError('mode', "use Experiment.sweep for sweeps")
        self._check_out()
        method = {
            'build': self._build_seed,
            'rgg': self._rgg_seed,
            'lonely': self._lonely_seed,
            'verify': self._verify_seed,
        }[mode]

        runs = []
        timings = {}
        for seed in self.config.seed_list():
            ts = time.perf_counter()
            run, section = method(seed)
            tw = time.perf_counter()
            self._write_seed(run, mode)
            phases = run.timings()
            phases['write'] = time.perf_counter() - tw
            phases['total'] = time.perf_counter() - ts
            timings[str(run.seed)] = phases
            runs.append(section)

        report = RunReport(self.config, runs, timings)
        self.write_report(report)
        return report

    def _build_seed(self, seed):
        run = self._new_run(self._params_of(seed))
        section = run.build_section()
        section['construct'] = run.data.traces.to_dict()
        section['stretch'] = run.stretch_section()
        section['far_pairs'] = run.data.far_pairs
        if run.params.p == 1:
            section['yao'] = run.data.yao
        section['lonely'] = run.lonely_section()
        return run, section

    def _rgg_seed(self, seed):
        run, section = self._build_seed(seed)
        g = run.data.graph
        section['radius'] = g.radius
        section['occupancy'] = cone_occupancy(run.data.table, g, g.radius)
        section['size_constant'] = size_constant(run.data.spanner,
                                                 run.params.epsilon)
        if section['skipped_pairs']:
            warn(f"seed {seed}: {section['skipped_pairs']} disconnected "
                 f"pairs at radius {g.radius!r}")
        return run, section

    def _lonely_seed(self, seed):
        params = self._params_of(seed)
        run = self._new_run(params)
        g = run.data.graph
        section = {'seed': seed, 'n': g.n, 'm': g.m,
                   'component_size': len(run.data.component)}
        section['lonely'] = run.lonely_section(
            estimate=params.model == 'gnp', spanner=False)
        return run, section

    def _verify_seed(self, seed):
        config = self.config
        if config.instance is not None:
            graph = load_instance(config.instance)
            params = None
        else:
            params = self._params_of(seed)
            graph = generate_instance(params)
        if config.edges is not None:
            subset = load_edge_set(config.edges, graph)
        else:
            subset = np.ones(graph.m, dtype=bool)

        run = self._new_run(params, graph=graph, subset=subset)
        section = {
            'seed': run.seed,
            'n': graph.n,
            'm': graph.m,
            'subset_edges': int(np.count_nonzero(subset)),
            'component_size': len(run.data.component),
            'stretch': run.stretch_section(),
        }
        return run, section

    def _write_seed(self, run, mode):
        if self.config.out is None:
            return
        folder = self._seed_dir(run.seed)
        if mode != 'verify' or self.config.instance is None:
            save_instance(run.data.graph, folder / 'instance.txt',
                          overwrite=True)
        if mode in ('build', 'rgg'):
            save_table(run.data.spanner.to_dataframe(),
                       folder / 'edges.csv', overwrite=True)
        elif mode == 'lonely':
            g = run.data.graph
            mask = run.data.lonely
            edges = g.edges[mask]
            save_table(pd.DataFrame({
                'u': edges[:, 0],
                'v': edges[:, 1],
                'length': g.lengths[mask],
                'essential': run.data.essential.mask[mask].astype(np.int8),
            }), folder / 'lonely.csv', overwrite=True)

    def write_report(self, report: RunReport) -> None:
        if self.config.out is None:
            return
        save_report(report.to_dict(), self.config.out / 'report.json')
        save_report(report.timings, self.config.out / 'timings.json')

    @report_progress("running sweep")
    def sweep(self):
        """One row per (n, p, epsilon, seed) with set sizes, stretch,
        lonely counts and phase timings, in grid order.

        Jobs run in a process pool when `config.workers` > 1.

        Returns
        -------
        pandas.DataFrame

        """
        config = self.config
        if config.mode != 'sweep':
            raise ConfigError('mode', "not a sweep configuration")
        self._check_out()
        jobs = [(params.to_dict(), config.cone_kind)
                for params in config.grid_params()]

        rows = []
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                for i, row in enumerate(pool.map(_sweep_job, jobs)):
                    rows.append(row)
                    yield (i + 1) / len(jobs)
        else:
            for i, job in enumerate(jobs):
                rows.append(_sweep_job(job))
                yield (i + 1) / len(jobs)

        table = pd.DataFrame(rows)
        if config.out is not None:
            save_table(table, config.out / 'sweep.csv', overwrite=True)
            save_table(summarise_sweep(table),
                       config.out / 'sweep_summary.csv', overwrite=True)
        return table


def _sweep_job(job) -> Dict[str, Any]:
    param_values, cone_kind = job
    verbose = defaults['report_progress']
    defaults['report_progress'] = False
    try:
        params = Params(**param_values)
        ts = time.perf_counter()
        run = SeedRun(params, cone_kind=cone_kind)
        g = run.data.graph
        sizes = run.data.spanner.sizes()
        stretch = run.data.stretch
        essential = run.data.essential
        row = {
            'n': params.n,
            'p': params.p,
            'epsilon': params.epsilon,
            'theta': params.theta,
            'seed': params.seed,
            'm': g.m,
            'component_size': len(run.data.component),
        }
        row.update(sizes)
        row['size_ratio'] = sizes['E_eps'] / (params.n *
                                              params.p ** -params.theta)
        row['max_stretch'] = stretch.max_stretch
        row['infinite_pairs'] = stretch.infinite_pairs
        row['stretch_sampled'] = stretch.sampled
        row['lonely_count'] = int(np.count_nonzero(run.data.lonely))
        row['essential_count'] = essential.count
        row['essential_missing'] = int(
            len(essential.missing_from(run.data.spanner.union)))
        for phase, seconds in run.timings().items():
            row[f'time_{phase}'] = seconds
        row['time_total'] = time.perf_counter() - ts
    finally:
        defaults['report_progress'] = verbose
    return row


def summarise_sweep(table: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation over seeds of every grid point."""
    columns = ['E_eps', 'size_ratio', 'max_stretch', 'lonely_count',
               'essential_count']
    grouped = table.groupby(['n', 'p', 'epsilon', 'theta'], sort=False)
    summary = grouped[columns].agg(['mean', 'std'])
    summary.columns = [f'{col}_{stat}' for col, stat in summary.columns]
    summary['seeds'] = grouped.size()
    return summary.reset_index()


def run(config: ExperimentConfig) -> RunReport:
    return Experiment(config).run()


def sweep(config: ExperimentConfig) -> pd.DataFrame:
    return Experiment(config).sweep()


def rgg_run(config: ExperimentConfig) -> RunReport:
    """Run the random geometric graph pipeline of an rgg configuration."""
    if config.mode != 'rgg':
        raise ConfigError('mode', "rgg_run needs rgg mode")
    return Experiment(config).run()
