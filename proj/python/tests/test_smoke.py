import json
import math
import os
import pathlib

import numpy as np
import pytest

import conegrasp as cg

SCENARIOS = pathlib.Path(
    os.environ.get("CONEGRASP_SCENARIO_DIR", pathlib.Path(__file__).resolve().parents[2] / "scenarios")
)


def test_frame_for_unit_x_normal():
    f = cg.build_contact_frame([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    np.testing.assert_allclose(f.d, [0.0, 1.0, 0.0])
    np.testing.assert_allclose(f.c, [0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        cg.build_contact_frame([0.0, 0.0, 0.0], [0.0, 0.0, 0.0])


def test_slip_bound_half_turn():
    axis = cg.RotationAxis.through([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    pts = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
    assert cg.rotational_slip_bound(pts, axis, math.pi) == pytest.approx(2.0, abs=1e-15)


def test_adaptive_bound_example():
    (b,) = cg.adaptive_lower_bounds([[1.0, 0.3, 0.4]], 0.5)
    assert b.gamma_low == pytest.approx(1.0)
    assert not b.saturated


def test_antipodal_solve_matches_oracle():
    frames = [
        cg.build_contact_frame([-0.05, 0.0, 0.0], [1.0, 0.0, 0.0]),
        cg.build_contact_frame([0.05, 0.0, 0.0], [-1.0, 0.0, 0.0]),
    ]
    bounds = [cg.ConeBounds(0.4), cg.ConeBounds(0.4)]
    p = cg.assemble(frames, bounds, [0.0, 0.0, 1.0], beta1=0.0, beta2=1e-6)
    s = cg.solve(p)
    assert s.status == "optimal"
    np.testing.assert_allclose(cg.local_to_world(frames[0], s.f[:3]), [1.25, 0.0, 0.5], atol=1e-4)
    ref = cg.oracle_solve(p)
    assert ref.objective_value >= s.objective_value - 1e-9
    assert abs(ref.objective_value - s.objective_value) <= 1e-3 * (1 + ref.objective_value)


def test_gravity_estimate_compensates_acceleration():
    frames = [
        cg.build_contact_frame([-0.05, 0.0, 0.0], [1.0, 0.0, 0.0]),
        cg.build_contact_frame([0.05, 0.0, 0.0], [-1.0, 0.0, 0.0]),
    ]
    local = [cg.world_to_local(f, [f.n[0], 0.0, 1.96]) for f in frames]
    g = cg.instantaneous_gravity(local, frames, cg.GRAVITY)
    np.testing.assert_allclose(g, [0.0, 0.0, 1.96], atol=1e-12)
    assert cg.instantaneous_gravity(local, frames, -cg.GRAVITY) is None


def test_jacobian_shape():
    q = np.full(12, 0.3)
    assert len(cg.forward_kinematics(q)) == 4
    assert cg.contact_jacobian(q, [0, 2]).shape == (6, 12)


def test_run_box_and_recompute_metrics():
    r = cg.run_scenario(str(SCENARIOS / "rigid" / "box_100g.json"))
    assert r["completed"]
    assert r["metrics"]["success"]
    again = cg.metrics_from_csv(r["trace_csv"], 0.1, 0.8)
    assert again == r["metrics"]
    assert cg.run_scenario(str(SCENARIOS / "rigid" / "box_100g.json"))["trace_csv"] == r["trace_csv"]


def test_invalid_scenario_names_field():
    with pytest.raises(cg.ScenarioError, match="object.mass"):
        cg.validate_scenario_json(json.dumps({"object": {"mass": -1}, "q_pregrasp": [0] * 12}))
    with pytest.raises(ValueError):
        cg.run_scenario(str(SCENARIOS / "rigid" / "box_100g.json"), mode="fast")


def test_property_suite_passes():
    results = cg.property_suite()
    assert results
    assert all(r["passed"] for r in results), [r["detail"] for r in results if not r["passed"]]


def test_bundled_scenarios_match_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SCENARIOS / "scenario.schema.json").read_text())
    files = sorted(p for p in SCENARIOS.rglob("*.json") if not p.name.endswith(".schema.json"))
    assert len(files) == 15
    for path in files:
        doc = json.loads(path.read_text())
        jsonschema.validate(doc, schema)
        cg.validate_scenario_json(path.read_text())
