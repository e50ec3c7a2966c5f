import json
import math
import os

import numpy as np
import pytest

import lyz

DATA = os.environ.get("LYZ_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def square_gauge(p):
    return lyz.ConvexFunction.gauge_power(lyz.ConvexBody.cube(2), p)


def test_gaussian_is_fixed():
    r = lyz.lyz_matrix(lyz.ConvexFunction.quadratic(np.eye(2)))
    assert np.allclose(r["A"], 0.5 * np.eye(2), atol=1e-6)
    assert r["J"] == pytest.approx(2 * math.pi, rel=1e-9)


def test_square_lyz_matches_body():
    assert np.allclose(lyz.lyz_body_ellipsoid(lyz.ConvexBody.cube(2)), np.eye(2), atol=1e-12)
    r = lyz.lyz_matrix(square_gauge(2.0), backend="mc", budget=200000, seed=3)
    assert np.all(np.abs(r["A"] - 0.5 * np.eye(2)) <= 4 * r["A_error"] + 1e-12)


def test_conjugate_and_evaluation():
    phi = lyz.ConvexFunction.quadratic(np.diag([2.0, 1.0]))
    c = lyz.legendre_conjugate(phi)
    assert c(np.array([1.0, 1.0])) == pytest.approx(0.5 * 0.5 + 0.5)
    assert lyz.fenchel_young_gap(phi, np.array([1.0, 0.0]), np.array([2.0, 0.0])) == pytest.approx(0.0, abs=1e-14)
    ind = lyz.legendre_conjugate(square_gauge(1.0))
    assert math.isinf(ind(np.array([0.9, 0.9])))


def test_json_round_trip():
    with open(os.path.join(DATA, "hexagon.json")) as fh:
        doc = json.load(fh)
    phi = lyz.ConvexFunction.from_json(json.dumps(doc["function"]))
    again = lyz.ConvexFunction.from_json(phi.to_json())
    x = np.array([0.3, -0.4])
    assert again(x) == pytest.approx(phi(x), rel=1e-14)
    with pytest.raises(lyz.ParseError):
        lyz.ConvexFunction.from_json('{"dim": 2, "kind": ')


def test_mass_and_variation():
    m = lyz.total_mass(square_gauge(2.0))
    assert m["value"] == pytest.approx(8.0, rel=1e-8)
    g = lyz.ConvexFunction.quadratic(np.eye(2))
    assert lyz.first_variation(g, g)["value"] == pytest.approx(2 * math.pi, rel=1e-8)


def test_slog_and_petty():
    s = lyz.solve_slog(lyz.ConvexFunction.quadratic(np.eye(2)))
    assert np.allclose(s["M"], np.eye(2), atol=1e-6)
    c = lyz.petty_chain(lyz.ConvexFunction.gauge_power(lyz.ConvexBody.regular_polygon(6), 2.0), budget=1 << 14)
    assert c["first_holds"] and c["second_holds"]
    h = lyz.projection_support(square_gauge(1.0), np.array([1.0, 0.0]))
    assert h["value"] == pytest.approx(2.0, rel=1e-5)


def test_errors_are_typed():
    with pytest.raises(lyz.DegenerateError):
        lyz.lyz_matrix(square_gauge(1.0), budget=4096)
    with pytest.raises(lyz.DomainError):
        lyz.ConvexFunction.quadratic(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_criterion_report():
    r = lyz.run_criterion(4)
    assert r["id"] == 4 and r["pass"]
