import math

import numpy as np
import pytest

import vortexloop as vl


def single_state(alpha=0.0, k=2.0):
    scatterers = vl.ScattererSet([[0.0, 0.0, 0.0]], [alpha])
    return vl.FieldState.solve(scatterers, vl.IncidentWave(k))


def test_version():
    assert vl.__version__


def test_free_field_plane_wave():
    state = vl.FieldState.solve(vl.ScattererSet([], []), vl.IncidentWave(2.0))
    psi = state.psi([0.5, 0.0, 0.0])
    assert psi == pytest.approx(complex(math.cos(1.0), math.sin(1.0)), abs=1e-12)
    sample = state.sample([0.5, 0.0, 0.0])
    assert sample.rho == pytest.approx(1.0)
    assert sample.velocity == pytest.approx([2.0, 0.0, 0.0])


def test_single_center_ring_and_trace():
    ring = vl.ring_geometry(0.0, 2.0)
    assert ring is not None
    assert ring.distance == pytest.approx(0.5)
    state = single_state()
    assert abs(state.psi([ring.axial_x, ring.radius, 0.0])) < 1e-12

    cfg = vl.TraceConfig()
    cfg.bounds = vl.Box([-1, -1, -1], [1, 1, 1])
    loops = vl.trace_all(state, cfg)
    assert len(loops) == 1
    loop = loops[0]
    assert loop.closed
    verts = loop.vertices
    assert verts.shape[1] == 3
    radial = np.hypot(verts[:, 1], verts[:, 2])
    assert np.max(np.abs(radial - ring.radius)) < 1e-6
    assert np.max(np.abs(verts[:, 0] - ring.axial_x)) < 1e-6
    assert loop.length() == pytest.approx(2 * math.pi * ring.radius, rel=1e-3)


def test_winding_on_traced_loop():
    state = single_state()
    cfg = vl.TraceConfig()
    cfg.bounds = vl.Box([-1, -1, -1], [1, 1, 1])
    loops = vl.trace_all(state, cfg)
    report = vl.probe_loop(state, loops[0], 0, 0.01)
    assert abs(report.winding) == 1
    assert abs(report.circulation) == pytest.approx(2 * math.pi, rel=5e-3)


def test_kappa_threshold():
    assert 2.9705 < vl.kappa_threshold() < 2.9715
    assert vl.ring_geometry(0.06, 2.0) is None


def test_config_round_trip():
    cfg = vl.load_config('{"k": 2.0, "trace": {"step": 0.02}}')
    assert cfg.trace.step == 0.02
    assert vl.load_config(vl.emit_config(cfg)) == cfg
    assert len(vl.config_fingerprint(cfg)) == 16


def test_errors_are_mapped():
    with pytest.raises(ValueError):
        vl.IncidentWave(-1.0)
    with pytest.raises(ValueError):
        vl.ScattererSet([[0, 0, 0], [0, 0, 0]], [0.0, 0.0])
    with pytest.raises(ValueError):
        vl.load_config('{"k": 2.0, "bogus": 1}')


def test_diagnostics_pass():
    params = vl.RandomScatterers(seed=1, count=5, alpha=0.0)
    state = vl.FieldState.solve(
        vl.generate_scatterers(params), vl.IncidentWave(2.0)
    )
    diag = vl.run_diagnostics(state, seed=1, points=40)
    assert diag.ok()
