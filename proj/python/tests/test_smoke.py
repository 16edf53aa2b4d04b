import math

import numpy as np
import pytest

import wftrack as w


def light_laws():
    return w.TrafficLight().laws()


def test_constants():
    m = light_laws()
    assert m.R_f1 == pytest.approx(0.3, rel=1e-12)
    assert m.R_max == pytest.approx(math.sqrt(4 / 30), rel=1e-12)
    assert m.W_min < m.W_c < m.W_max
    assert not m.constant_free_speed


def test_bad_laws_raise():
    spec = w.LawSpec()
    spec.W_c = 4 / 30
    spec.W_max = 1 / 8
    with pytest.raises(w.WftError):
        w.Laws(spec)


def test_riemann_fan():
    m = light_laws()
    fan = w.solve(m, m.free_state(0.1), m.congested_state(0.35, 0.01))
    assert [wv.kind for wv in fan.waves][0] == "phase-transition"
    assert fan.sample(-10.0).rho == pytest.approx(0.1)


def test_simulation_and_audit():
    m = light_laws()
    breaks, values = w.random_datum(m, seed=3, max_jumps=20)
    sim = w.simulate(m, breaks, values, n=5, t_end=10.0, strict=True)
    assert sim.events > 0
    tv = [e["tv"] for e in sim.log]
    assert all(b <= a + 1e-10 for a, b in zip(tv, tv[1:]))
    assert sim.audit().ok
    prof = sim.profile(5.0, np.linspace(-1.5, 1.5, 31))
    assert prof["rho"].shape == (31,)
    assert np.all(prof["rho"] >= 0)
    assert sim.l1_distance(2.0, 3.0) <= sim.tv0 * m.max_speed * 1.0 + 1e-8


def test_datum_validation():
    m = light_laws()
    with pytest.raises(w.ConfigError):
        w.simulate(m, [0.0], [m.free_state(0.1)], n=4, t_end=1.0)


def test_traffic_light():
    cfg = w.TrafficLight()
    with pytest.raises(w.StructuralAssumptionViolated):
        w.closed_form_table(cfg)
    table = w.closed_form_table(cfg, check=False)
    assert table.a2.t == pytest.approx(26.25)
    ex = w.ExactReference(cfg)
    breaks, values = cfg.datum()
    sim = w.simulate(cfg.laws(), breaks, values, n=5, t_end=360.0)
    assert sim.last_passage_time() == pytest.approx(table.t_last, rel=1e-10)
    assert abs(sim.last_passage_time() - table.t_d1) / table.t_d1 < 0.02
    assert ex.l1_error(sim, 45.0, -11.0, 1.0) < 0.1


def test_ladder_rows():
    rows = w.ladder(w.TrafficLight(), n_min=4, n_max=5)
    assert [r.n for r in rows] == [4, 5]
    assert rows[1].l1_probe < rows[0].l1_probe


def test_mesh_solver_stays_on_mesh():
    m = light_laws()
    g = w.Mesh(m, 5)
    fan = g.solve(m.free_state(0.1), m.congested_state(0.35, 0.01))
    assert fan.waves
    for wave in fan.waves:
        s = g.snap(wave.right)
        assert s.rho == wave.right.rho and s.v == wave.right.v
