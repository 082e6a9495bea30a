import math
import os
import unittest
from unittest import mock

import numpy as np

from src.utils.parallel import max_workers, thread_map
from src.utils.serialization import dumps, read_json, to_jsonable, write_json


class TestThreadMap(unittest.TestCase):
    def test_keeps_input_order(self):
        self.assertEqual(thread_map(lambda x: x * x, range(10), workers=4), [x * x for x in range(10)])

    def test_empty(self):
        self.assertEqual(thread_map(lambda x: x, []), [])

    @mock.patch.dict(os.environ, {"OLAB_THREADS": "3"})
    def test_env_cap(self):
        self.assertEqual(max_workers(), 3)

    @mock.patch.dict(os.environ, {"OLAB_THREADS": "zero"})
    def test_bad_env_cap(self):
        with self.assertRaises(ValueError):
            max_workers()

    @mock.patch.dict(os.environ, {"OLAB_THREADS": "0"})
    def test_nonpositive_env_cap(self):
        with self.assertRaises(ValueError):
            max_workers()


def test_to_jsonable_handles_numpy_and_infinity():
    data = to_jsonable({1: np.float64(2.5), "x": np.array([1, 2]), "big": math.inf, "ok": np.bool_(True)})
    assert data == {"1": 2.5, "x": [1, 2], "big": "inf", "ok": True}


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_write_json_creates_directories(tmp_path):
    path = tmp_path / "nested" / "out.json"
    write_json(path, {"value": math.nan})
    assert read_json(path) == {"value": "nan"}
