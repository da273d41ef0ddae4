import math

import pytest

import slgap

FREE = {"interval": [0, math.pi], "V": 0, "w": 1}
QUADRATIC = {
    "interval": [5, 6],
    "V": {"breakpoints": [5, 6], "pieces": [[0, 0, -1]]},
    "w": {"breakpoints": [5, 6], "pieces": [[0, 0, 1]]},
}


def test_free_string_gap():
    r = slgap.solve(FREE, mesh_n=1024)
    assert r["lambda"][0] == pytest.approx(1.0, rel=1e-8)
    assert r["gap"] == pytest.approx(3.0, rel=1e-8)


def test_artifacts_land_in_out_dir(tmp_path):
    slgap.solve(FREE, tmp_path, mesh_n=256, k=3)
    header = (tmp_path / "eigenfunctions.csv").read_bytes().split(b"\r\n")[0]
    assert header == b"x,u1,u2,u3"
    assert (tmp_path / "result.json").exists()


def test_liouville_bound():
    r = slgap.liouville(QUADRATIC, mesh_n=1024)
    assert r["L"] == pytest.approx(5.5, rel=1e-12)
    assert r["bound"] == pytest.approx(3 * math.pi**2 / 5.5**2, rel=1e-12)
    assert r["convex"] is False


def test_secular_roots():
    r = slgap.secular({"x_minus": 1.0, "xhat_minus": 2.0, "v_max": 1.0, "n_big": 2.0, "w_low": 1.0})
    assert len(r["lambda"]) == 2
    assert r["gap"] == pytest.approx(r["lambda"][1] - r["lambda"][0])


def test_optimize_is_deterministic():
    space = {"space": {"M": 5, "N_less": 1, "N_big": 2}}
    a = slgap.optimize(space, max_sweeps=3)
    b = slgap.optimize(space, max_sweeps=3)
    assert a == b
    assert a["gamma"] > 0


def test_invalid_input_raises_value_error():
    with pytest.raises(ValueError):
        slgap.solve({"interval": [0, 1], "V": 0, "w": -1})
    with pytest.raises(ValueError):
        slgap.solve(FREE, mesh_n=8)
    with pytest.raises(ValueError):
        slgap.run("frob", FREE)


def test_infeasible_class_raises_value_error():
    bad = {
        "interval": [0, 2],
        "V": {"breakpoints": [0, 2], "pieces": [[0, 2, -1]]},
        "w": 1, "M": 1, "N_less": 1, "N_big": 1,
    }
    with pytest.raises(ValueError):
        slgap.validate(bad)
