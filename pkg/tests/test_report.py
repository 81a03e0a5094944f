import json
import math

import numpy as np

from rslab.report import Report, RunManifest, Series, digest, dumps, to_plain, write_run


def test_to_plain_types():
    assert to_plain(np.float64(1.5)) == 1.5
    assert to_plain(np.int64(3)) == 3 and isinstance(to_plain(np.int64(3)), int)
    assert to_plain(np.bool_(True)) is True
    assert to_plain(2 + 3j) == [2.0, 3.0]
    assert to_plain([math.inf, -math.inf, math.nan]) == ["inf", "-inf", "nan"]
    assert to_plain(np.array([1.0, 2.0])) == [1.0, 2.0]
    assert to_plain({1: (1, 2)}) == {"1": [1, 2]}


def test_dumps_sorted_and_stable():
    a = dumps({"b": 1, "a": [1.0, 2 + 0j]})
    assert a == dumps({"a": [1.0, 2 + 0j], "b": 1})
    assert list(json.loads(a)) == ["a", "b"]


def test_series_csv_uses_repr():
    s = Series("t", ["x", "y"], [(0.1, 1), (1 / 3, None)])
    lines = s.to_csv().splitlines()
    assert lines[0] == "x,y"
    assert lines[2].split(",")[0] == repr(1 / 3)


def test_report_keys():
    r = Report("op", "zeta", {"x": 1.0}, 1.0, 2.0, 0.5, True)
    assert set(json.loads(r.to_json())) == {"op", "instance", "params", "value", "bound", "ratio", "pass", "details"}


def test_write_run_digests(tmp_path):
    r = Report("op", "zeta", {}, 1.0, 2.0, 0.5, True)
    s = Series("rows", ["a"], [(1,)])
    m = write_run(tmp_path, r, [s], RunManifest("op", "zeta", {}, 0))
    for name in ("report.json", "rows.csv"):
        assert m.digests[name] == digest((tmp_path / name).read_text())
    back = json.loads((tmp_path / "manifest.json").read_text())
    assert back["digests"] == m.digests and back["command"] == "op"
