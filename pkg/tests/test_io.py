"""Artifact writers."""

import re

import numpy as np
import pytest

from mrtlb import io
from mrtlb.errors import ShapeMismatch


def test_csv_round_trip_precision(tmp_path):
    vals = np.random.default_rng(0).standard_normal(20) * 10.0 ** np.arange(-10, 10)
    p = io.write_csv(tmp_path / "a.csv", ["i", "v"], enumerate(vals), {"b": 2, "a": 0.5})
    header, cols, rows = io.read_csv(p)
    assert header == "a=0.5; b=2"
    assert cols == ["i", "v"]
    back = np.array([float(r[1]) for r in rows])
    assert np.array_equal(back, vals)
    for r in rows:
        mantissa = r[1].lstrip("-").split("e")[0].replace(".", "")
        assert len(mantissa) >= 12 and "e" in r[1]


def test_field_csv(tmp_path):
    phi = np.arange(6.0).reshape(2, 3)
    p = io.write_field_csv(tmp_path / "f.csv", [0.0, 0.5], [0.0, 1.0, 2.0], phi, {"k": 1})
    _, cols, rows = io.read_csv(p)
    assert cols == ["x", "y", "phi"] and len(rows) == 6
    assert [float(r[2]) for r in rows] == list(phi.ravel())
    with pytest.raises(ShapeMismatch):
        io.write_field_csv(tmp_path / "g.csv", [0.0], [0.0], phi)


def test_binary_round_trip(tmp_path):
    phi = np.random.default_rng(1).standard_normal((4, 7))
    p = io.write_field_binary(tmp_path / "f.bin", phi, 12, 0.1, 0.01)
    back, n, dx, dt = io.read_field_binary(p)
    assert np.array_equal(back, phi) and (n, dx, dt) == (12, 0.1, 0.01)
    with pytest.raises(ShapeMismatch):
        io.write_field_binary(tmp_path / "h.bin", phi.ravel(), 0, 1.0, 1.0)


def test_svg_self_contained(tmp_path):
    x = np.linspace(0, 1, 5)
    p = io.heatmap_svg(tmp_path / "h.svg", x, x, np.outer(x, x), "t", "z", {"run": "x"})
    q = io.loglog_svg(tmp_path / "c.svg", {"a": ([0.1, 0.05], [1e-4, 6e-6])}, "c", {"run": "y"})
    for path, tag in ((p, "run=x"), (q, "run=y")):
        text = path.read_text()
        assert text.lstrip().startswith("<?xml") and "<svg" in text
        assert tag in text
        assert not re.search(r"@font-face|\.ttf|\.woff|href=\"(http|file)", text)


def test_svg_deterministic(tmp_path):
    x = np.linspace(0, 1, 5)
    a = io.heatmap_svg(tmp_path / "a.svg", x, x, np.outer(x, x)).read_bytes()
    b = io.heatmap_svg(tmp_path / "b.svg", x, x, np.outer(x, x)).read_bytes()
    assert a == b
