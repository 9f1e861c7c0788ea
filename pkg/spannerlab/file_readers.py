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

import numpy as np
import pandas as pd
from abc import ABC, abstractmethod
import pathlib

from typing import Dict, Any, Union

from spannerlab.instance import EmbeddedGraph, MODELS
from spannerlab.utils import InstanceFormatError

FORMAT_NAME = 'geograph'
FORMAT_VERSION = 'v1'


class DataLoader(ABC):
    """Base of the file loaders.

    """
    def __init__(self) -> None:
        self.loaded_metadata = {}
        self.loaded_data = None

    @staticmethod
    def get_loader(data_type: str) -> 'DataLoader':
        data_type = data_type.lower()
        try:
            loader = {
                'instance': InstanceLoader,
                'edges': EdgeSetLoader,
            }[data_type]
        except KeyError:
            raise ValueError(f"No loader for data of type {data_type}.")
        return loader()

    @staticmethod
    def check_file(file_path: pathlib.Path) -> pathlib.Path:
        file_path = pathlib.Path(file_path)
        if not file_path.is_file():
            raise FileNotFoundError(f"Cannot open file {file_path}")
        return file_path

    @abstractmethod
    def load(self, file_path: pathlib.Path, *args, **kwargs):
        pass


class InstanceLoader(DataLoader):
    """Loader for instance files::

        geograph v1 n=<n> model=<gnp|rgg> p=<p>|r=<r> seed=<seed>
        v <id> <x> <y>
        ...
        e <u> <v>
        ...

    Vertex lines list ids 0..n-1 in order, edge lines have u < v. Edge
    lengths are recomputed from the coordinates.

    """
    def parse_header(self, line: str) -> Dict[str, Any]:
        tokens = line.split()
        if len(tokens) < 2 or tokens[0] != FORMAT_NAME:
            raise InstanceFormatError(1, f"expected `{FORMAT_NAME}` header")
        if tokens[1] != FORMAT_VERSION:
            raise InstanceFormatError(
                1, f"unsupported format version `{tokens[1]}`")

        fields = {}
        for token in tokens[2:]:
            key, sep, value = token.partition('=')
            if not sep:
                raise InstanceFormatError(1, f"malformed field `{token}`")
            fields[key] = value

        model = fields.get('model')
        if model not in MODELS:
            raise InstanceFormatError(1, f"unknown model `{model}`")
        metadata = {'model': model}
        try:
            metadata['n'] = int(fields['n'])
            if model == 'gnp':
                metadata['p'] = float(fields['p'])
                metadata['radius'] = None
            else:
                metadata['radius'] = float(fields['r'])
                metadata['p'] = None
            seed = fields['seed']
            metadata['seed'] = None if seed == 'none' else int(seed)
        except KeyError as e:
            raise InstanceFormatError(1, f"missing header field {e}")
        except ValueError as e:
            raise InstanceFormatError(1, f"malformed header ({e})")
        if metadata['n'] < 0:
            raise InstanceFormatError(1, "negative vertex count")
        return metadata

    def load(self, file_path: pathlib.Path) -> None:
        """Read an instance file into `loaded_metadata` and
        `loaded_data` (an EmbeddedGraph).

        Parameters
        ----------
        file_path
            Path to file.

        """
        file_path = self.check_file(file_path)

        with open(str(file_path), 'r', encoding='utf-8') as inst_file:
            header = inst_file.readline()
            self.loaded_metadata = self.parse_header(header)
            n = self.loaded_metadata['n']
            points = np.empty((n, 2))
            edges = []
            seen = set()
            n_vertices = 0
            line_number = 1

            for line_number, line in enumerate(inst_file, start=2):
                tokens = line.split()
                if not tokens:
                    continue
                kind = tokens[0]
                if kind == 'v':
                    if edges:
                        raise InstanceFormatError(
                            line_number, "vertex after edge lines")
                    if len(tokens) != 4:
                        raise InstanceFormatError(
                            line_number, "expected `v <id> <x> <y>`")
                    try:
                        vid = int(tokens[1])
                        x, y = float(tokens[2]), float(tokens[3])
                    except ValueError:
                        raise InstanceFormatError(
                            line_number, "malformed vertex line")
                    if vid != n_vertices or vid >= n:
                        raise InstanceFormatError(
                            line_number, f"unexpected vertex id {vid}")
                    if not (0. <= x <= 1. and 0. <= y <= 1.):
                        raise InstanceFormatError(
                            line_number, "coordinate out of domain")
                    points[vid] = x, y
                    n_vertices += 1

                elif kind == 'e':
                    if n_vertices != n:
                        raise InstanceFormatError(
                            line_number,
                            f"expected {n} vertices, found {n_vertices}")
                    if len(tokens) != 3:
                        raise InstanceFormatError(
                            line_number, "expected `e <u> <v>`")
                    try:
                        u, v = int(tokens[1]), int(tokens[2])
                    except ValueError:
                        raise InstanceFormatError(
                            line_number, "malformed edge line")
                    if u == v:
                        raise InstanceFormatError(line_number, "self-loop")
                    if not u < v:
                        raise InstanceFormatError(
                            line_number, "edge endpoints must have u < v")
                    if u < 0 or v >= n:
                        raise InstanceFormatError(
                            line_number, "vertex id out of range")
                    if (u, v) in seen:
                        raise InstanceFormatError(
                            line_number, "duplicate edge")
                    seen.add((u, v))
                    edges.append((u, v))

                else:
                    raise InstanceFormatError(
                        line_number, f"unknown line type `{kind}`")

        if n_vertices != n:
            raise InstanceFormatError(
                line_number, f"expected {n} vertices, found {n_vertices}")

        self.loaded_data = EmbeddedGraph(
            points, np.array(edges, dtype=np.int64).reshape((-1, 2)),
            model=self.loaded_metadata['model'],
            p=self.loaded_metadata['p'],
            radius=self.loaded_metadata['radius'],
            seed=self.loaded_metadata['seed'],
        )


class EdgeSetLoader(DataLoader):
    """Loader for edge CSV files with at least `u` and `v` columns. The
    edges are matched against a graph and loaded as a mask over its edge
    ids.

    """
    def load(self, file_path: pathlib.Path, graph: EmbeddedGraph) -> None:
        file_path = self.check_file(file_path)
        table = pd.read_csv(str(file_path))
        for col in ('u', 'v'):
            if col not in table.columns:
                raise InstanceFormatError(1, f"missing column `{col}`")

        ids = graph.edge_index(table['u'].to_numpy(dtype=np.int64),
                               table['v'].to_numpy(dtype=np.int64))
        ids = np.atleast_1d(ids)
        if np.any(ids < 0):
            row = int(np.flatnonzero(ids < 0)[0])
            # header is line 1
            raise InstanceFormatError(row + 2, "edge not in graph")

        mask = np.zeros(graph.m, dtype=bool)
        mask[ids] = True
        self.loaded_metadata = {'rows': len(table)}
        self.loaded_data = mask


def load_instance(file_path: Union[str, pathlib.Path]) -> EmbeddedGraph:
    loader = DataLoader.get_loader('instance')
    loader.load(pathlib.Path(file_path))
    return loader.loaded_data


def load_edge_set(file_path: Union[str, pathlib.Path],
                  graph: EmbeddedGraph) -> np.ndarray:
    loader = DataLoader.get_loader('edges')
    loader.load(pathlib.Path(file_path), graph)
    return loader.loaded_data
