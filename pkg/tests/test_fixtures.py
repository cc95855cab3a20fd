import json
import math

import pytest

from hyperlap import fixtures


@pytest.mark.parametrize("name", sorted(fixtures.MEASUREMENTS))
def test_stored_values_reproduce(name):
    drift, ok = fixtures.reproduce(name)
    assert ok, f"{name} drifted by {drift:.3g}"


def test_every_measurement_records_its_grid():
    data = fixtures.load()
    assert set(data) == set(fixtures.MEASUREMENTS)
    for name, entry in data.items():
        assert "value" in entry
        if name != "golden":
            assert "grid" in entry


def test_budgets_sit_above_measurements():
    op = fixtures.get("opnorm")
    for n, row in op["value"].items():
        for p, v in row.items():
            assert v < op["budget"][n][p] <= math.ceil(125 * v) / 100 + 1e-12


def test_reproduce_detects_drift(tmp_path):
    data = fixtures.load()
    data["c_o"]["value"] *= 1.5
    path = tmp_path / "f.json"
    path.write_text(json.dumps(data))
    drift, ok = fixtures.reproduce("c_o", path=path)
    assert not ok and drift == pytest.approx(1 / 3)


def test_unknown_names():
    with pytest.raises(KeyError):
        fixtures.get("nope")
    with pytest.raises(KeyError):
        fixtures.measure("nope")
