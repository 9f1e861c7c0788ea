import json

import pytest
import numpy as np
import pandas as pd

from spannerlab.file_readers import (
    DataLoader, InstanceLoader, EdgeSetLoader, load_instance, load_edge_set
)
from spannerlab.file_writers import (
    DataWriter, save_instance, save_table, save_report, to_jsonable
)
from spannerlab.instance import (
    Params, EmbeddedGraph, generate_instance, geometric_graph, sample_points,
    save_instance as instance_save, load_instance as instance_load
)
from spannerlab.utils import InstanceFormatError

GOOD_INSTANCE = """geograph v1 n=3 model=gnp p=0.5 seed=7
v 0 0.25 0.5
v 1 0.75 0.5
v 2 0.5 1

e 0 1
e 1 2
"""


def write(tmp_path, text, name='instance.txt'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


class TestInstanceLoader:

    @staticmethod
    @pytest.fixture
    def loader():
        return DataLoader.get_loader('instance')

    @staticmethod
    def test_get_loader(loader):
        assert isinstance(loader, InstanceLoader)
        assert isinstance(DataLoader.get_loader('EDGES'), EdgeSetLoader)
        with pytest.raises(ValueError):
            DataLoader.get_loader('badger')

    @staticmethod
    def test_load_good_file(loader, tmp_path):
        loader.load(write(tmp_path, GOOD_INSTANCE))
        metadata = loader.loaded_metadata
        assert metadata == {'model': 'gnp', 'n': 3, 'p': 0.5, 'radius': None,
                            'seed': 7}
        g = loader.loaded_data
        assert g.edges.tolist() == [[0, 1], [1, 2]]
        assert g.lengths[0] == 0.5
        assert g.seed == 7

    @staticmethod
    def test_missing_file(loader, tmp_path):
        with pytest.raises(FileNotFoundError):
            loader.load(tmp_path / 'badger.txt')

    @staticmethod
    @pytest.mark.parametrize('text, line, message', [
        ("graph v1 n=1 model=gnp p=1 seed=0\n", 1, "header"),
        ("geograph v2 n=1 model=gnp p=1 seed=0\n", 1, "version"),
        ("geograph v1 n=1 model=ba p=1 seed=0\n", 1, "unknown model"),
        ("geograph v1 n=1 model=gnp seed=0\n", 1, "missing header field"),
        ("geograph v1 n=1 model=rgg p=1 seed=0\n", 1, "missing header field"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 1 1.5 0\n",
         3, "coordinate out of domain"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 2 0 0\n",
         3, "unexpected vertex id"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 1 0 0\n"
         "e 0 1\ne 0 1\n", 5, "duplicate edge"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 1 0 0\n"
         "e 1 1\n", 4, "self-loop"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 1 0 0\n"
         "e 1 0\n", 4, "u < v"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 1 0 0\n"
         "e 0 2\n", 4, "out of range"),
        ("geograph v1 n=3 model=gnp p=1 seed=0\nv 0 0.1 0.1\nv 1 0 0\n"
         "e 0 1\n", 4, "expected 3 vertices"),
        ("geograph v1 n=2 model=gnp p=1 seed=0\nv 0 0.1 0.1\nx 1 0 0\n",
         3, "unknown line type"),
    ])
    def test_bad_file(loader, tmp_path, text, line, message):
        with pytest.raises(InstanceFormatError, match=message) as e:
            loader.load(write(tmp_path, text))
        assert e.value.line_number == line


class TestInstanceWriter:

    @staticmethod
    def test_get_writer():
        with pytest.raises(ValueError):
            DataWriter.get_writer('badger')

    @staticmethod
    @pytest.mark.parametrize('params', [
        Params(n=60, p=0.3, seed=4),
        Params(n=60, model='rgg', radius=0.3, seed=4),
    ])
    def test_save_and_load(tmp_path, params):
        g = generate_instance(params)
        path = tmp_path / 'out' / 'instance.txt'
        instance_save(g, path)
        loaded = instance_load(path)
        assert loaded.identical(g)
        assert loaded.model == g.model
        assert loaded.p == g.p
        assert loaded.radius == g.radius
        assert loaded.seed == 4
        # lengths are recomputed with the same arithmetic
        assert np.array_equal(loaded.lengths, g.lengths)

    @staticmethod
    def test_header(tmp_path):
        g = geometric_graph(sample_points(3, 0), 0.5)
        path = tmp_path / 'instance.txt'
        save_instance(g, path)
        header = path.read_text(encoding='utf-8').splitlines()[0]
        assert header == "geograph v1 n=3 model=rgg r=0.5 seed=none"
        assert load_instance(path).seed is None

    @staticmethod
    def test_no_overwrite(tmp_path):
        g = EmbeddedGraph([(0., 0.), (1., 1.)], [(0, 1)])
        path = tmp_path / 'instance.txt'
        save_instance(g, path)
        with pytest.raises(FileExistsError):
            save_instance(g, path)
        save_instance(g, path, overwrite=True)


class TestEdgeSet:

    @staticmethod
    @pytest.fixture
    def graph(tmp_path):
        return generate_instance(Params(n=20, p=0.5, seed=1))

    @staticmethod
    def test_load(graph, tmp_path):
        mask = np.zeros(graph.m, dtype=bool)
        mask[::3] = True
        edges = graph.edges[mask]
        path = tmp_path / 'edges.csv'
        save_table(pd.DataFrame({'u': edges[:, 1], 'v': edges[:, 0]}), path)
        assert np.array_equal(load_edge_set(path, graph), mask)

    @staticmethod
    def test_not_an_edge(graph, tmp_path):
        u, v = graph.edges[0]
        missing = next((a, b) for a in range(graph.n) for b in range(a + 1, graph.n)
                       if not graph.has_edge(a, b))
        path = tmp_path / 'edges.csv'
        save_table(pd.DataFrame({'u': [u, missing[0]], 'v': [v, missing[1]]}),
                   path)
        with pytest.raises(InstanceFormatError) as e:
            load_edge_set(path, graph)
        assert e.value.line_number == 3

    @staticmethod
    def test_missing_column(graph, tmp_path):
        path = write(tmp_path, "a,b\n0,1\n", 'edges.csv')
        with pytest.raises(InstanceFormatError, match="missing column"):
            load_edge_set(path, graph)


class TestReports:

    @staticmethod
    def test_to_jsonable():
        value = {1: np.int64(3), 'x': np.array([0.5, np.inf]),
                 'flag': np.bool_(True), 'nan': float('nan'),
                 't': (np.float32(0.25), None)}
        assert to_jsonable(value) == {
            '1': 3, 'x': [0.5, 'inf'], 'flag': True, 'nan': 'nan',
            't': [0.25, None],
        }

    @staticmethod
    def test_save_report_sorted(tmp_path):
        path = tmp_path / 'report.json'
        save_report({'b': 1, 'a': {'d': 2, 'c': 3}}, path)
        text = path.read_text(encoding='utf-8')
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"c"') < text.index('"d"')
        assert json.loads(text) == {'a': {'c': 3, 'd': 2}, 'b': 1}
        # reports are overwritten by default
        save_report({'a': 1}, path)

    @staticmethod
    def test_save_table(tmp_path):
        path = tmp_path / 'table.csv'
        save_table(pd.DataFrame({'u': [0], 'x': [0.1]}), path)
        assert path.read_text(encoding='utf-8') == "u,x\n0,0.10000000000000001\n"
