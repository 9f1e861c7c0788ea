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

import json
import math
import pathlib

import numpy as np
import pandas as pd

from typing import Union, Any

from spannerlab.file_readers import FORMAT_NAME, FORMAT_VERSION
from spannerlab.instance import EmbeddedGraph

FLOAT_FORMAT = '%.17g'


class DataWriter(object):
    def __init__(self) -> None:
        self.data = None

    @staticmethod
    def get_writer(data_type: str) -> 'DataWriter':
        data_type = data_type.lower()
        try:
            writer = {
                'instance': InstanceWriter,
                'table': CsvTableWriter,
                'report': JsonReportWriter,
            }[data_type]
        except KeyError:
            raise ValueError(f"No writer for data of type {data_type}.")
        return writer()

    @staticmethod
    def check_path(file_path: Union[str, pathlib.Path],
                   overwrite: bool) -> pathlib.Path:
        file_path = pathlib.Path(file_path)
        if file_path.exists() and not overwrite:
            raise FileExistsError(f"File already exits {file_path}")
        file_path.parent.mkdir(parents=True, exist_ok=True)
        return file_path


class InstanceWriter(DataWriter):
    def write(self, file_path: Union[str, pathlib.Path],
              overwrite: bool = False) -> None:
        """Write `data` (an EmbeddedGraph) as an instance file.
        Coordinates are written with 17 significant digits so they load
        back bit for bit.

        Parameters
        ----------
        file_path
            Path to file.
        overwrite
            Replace an existing file.

        """
        file_path = self.check_path(file_path, overwrite)
        g = self.data

        if g.model == 'rgg':
            model_field = f"r={g.radius!r}"
        else:
            model_field = f"p={1.0 if g.p is None else g.p!r}"
        seed = 'none' if g.seed is None else int(g.seed)

        with open(str(file_path), 'w', encoding='utf-8', newline='\n') as f:
            f.write(f"{FORMAT_NAME} {FORMAT_VERSION} n={g.n} "
                    f"model={g.model} {model_field} seed={seed}\n")
            for i, (x, y) in enumerate(g.points):
                f.write(f"v {i} {FLOAT_FORMAT % x} {FLOAT_FORMAT % y}\n")
            for u, v in g.edges:
                f.write(f"e {u} {v}\n")


class CsvTableWriter(DataWriter):
    def write(self, file_path: Union[str, pathlib.Path],
              overwrite: bool = False) -> None:
        """Write `data` (a DataFrame) as CSV without the index."""
        file_path = self.check_path(file_path, overwrite)
        self.data.to_csv(str(file_path), index=False,
                         float_format=FLOAT_FORMAT, lineterminator='\n')


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays to plain Python, with non-finite
    floats as strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isfinite(value):
            return value
        return str(value)
    if isinstance(value, pathlib.Path):
        return str(value)
    return value


class JsonReportWriter(DataWriter):
    def write(self, file_path: Union[str, pathlib.Path],
              overwrite: bool = True) -> None:
        """Write `data` (a dict) as JSON with sorted keys."""
        file_path = self.check_path(file_path, overwrite)
        text = json.dumps(to_jsonable(self.data), sort_keys=True, indent=2)
        with open(str(file_path), 'w', encoding='utf-8', newline='\n') as f:
            f.write(text + '\n')


def save_instance(g: EmbeddedGraph, file_path: Union[str, pathlib.Path],
                  overwrite: bool = False) -> None:
    writer = DataWriter.get_writer('instance')
    writer.data = g
    writer.write(file_path, overwrite=overwrite)


def save_table(table: pd.DataFrame, file_path: Union[str, pathlib.Path],
               overwrite: bool = False) -> None:
    writer = DataWriter.get_writer('table')
    writer.data = table
    writer.write(file_path, overwrite=overwrite)


def save_report(report: dict, file_path: Union[str, pathlib.Path],
                overwrite: bool = True) -> None:
    writer = DataWriter.get_writer('report')
    writer.data = report
    writer.write(file_path, overwrite=overwrite)
