#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "wft/analysis.hpp"
#include "wft/config.hpp"
#include "wft/driver.hpp"
#include "wft/errors.hpp"

namespace py = pybind11;
using namespace wft;

namespace {

py::dict front_dict(const GridMesh& g, const Front& f) {
    py::dict d;
    d["t0"] = f.t0;
    d["t1"] = f.t_end;
    d["x0"] = f.x0;
    d["x1"] = f.x(f.t_end);
    d["speed"] = f.speed;
    d["kind"] = to_string(f.kind);
    d["left"] = g.state(f.left);
    d["right"] = g.state(f.right);
    return d;
}

py::dict event_dict(const EventRecord& r) {
    py::dict d;
    d["t"] = r.t;
    d["x"] = r.x;
    d["tv"] = r.tv;
    d["temple"] = r.temple;
    d["waves"] = r.waves;
    d["phase_transitions"] = r.pts;
    d["d_tv"] = r.d_tv;
    d["d_temple"] = r.d_temple;
    return d;
}

py::dict profile_arrays(const std::vector<TrafficState>& us, const ModelLaws& m) {
    const auto n = static_cast<py::ssize_t>(us.size());
    py::array_t<double> rho(n), v(n), w1(n), w2(n);
    py::array_t<bool> congested(n);
    for (py::ssize_t i = 0; i < n; ++i) {
        const TrafficState& u = us[static_cast<std::size_t>(i)];
        RiemannCoords c = m.to_coords(u);
        rho.mutable_at(i) = u.rho;
        v.mutable_at(i) = u.v;
        w1.mutable_at(i) = c.w1;
        w2.mutable_at(i) = c.w2;
        congested.mutable_at(i) = u.phase == Phase::Congested;
    }
    py::dict d;
    d["rho"] = rho;
    d["v"] = v;
    d["w1"] = w1;
    d["w2"] = w2;
    d["congested"] = congested;
    return d;
}

PiecewiseDatum make_datum(std::vector<double> breaks, std::vector<TrafficState> values) {
    if (values.size() != breaks.size() + 1) throw ConfigError("a datum needs one more value than breaks");
    return {std::move(breaks), std::move(values)};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Wave-front tracking for a two-phase LWR/ARZ traffic model";

    auto base = py::register_exception<Error>(mod, "WftError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
    py::register_exception<OutOfDomain>(mod, "OutOfDomain", base.ptr());
    py::register_exception<OrderingViolation>(mod, "OrderingViolation", base.ptr());
    py::register_exception<HypothesisViolation>(mod, "HypothesisViolation", base.ptr());
    py::register_exception<InvariantViolation>(mod, "InvariantViolation", base.ptr());
    py::register_exception<EventOverflow>(mod, "EventOverflow", base.ptr());
    py::register_exception<StructuralAssumptionViolated>(mod, "StructuralAssumptionViolated", base.ptr());
    py::register_exception<OutOfWindow>(mod, "OutOfWindow", base.ptr());
    py::register_exception<NotReached>(mod, "NotReached", base.ptr());

    py::enum_<Phase>(mod, "Phase").value("Free", Phase::Free).value("Congested", Phase::Congested);

    py::class_<TrafficState>(mod, "State")
        .def(py::init([](double rho, double v, Phase ph) { return TrafficState{rho, v, ph}; }), py::arg("rho"),
             py::arg("v"), py::arg("phase"))
        .def_readwrite("rho", &TrafficState::rho)
        .def_readwrite("v", &TrafficState::v)
        .def_readwrite("phase", &TrafficState::phase)
        .def("__repr__", [](const TrafficState& u) {
            return "State(rho=" + std::to_string(u.rho) + ", v=" + std::to_string(u.v) + ", " + to_string(u.phase) + ")";
        });

    py::class_<LawSpec>(mod, "LawSpec")
        .def(py::init<>())
        .def_readwrite("family", &LawSpec::family)
        .def_readwrite("V_max", &LawSpec::V_max)
        .def_readwrite("R", &LawSpec::R)
        .def_readwrite("gamma", &LawSpec::gamma)
        .def_readwrite("v_ref", &LawSpec::v_ref)
        .def_readwrite("rho_max", &LawSpec::rho_max)
        .def_readwrite("vf_coeffs", &LawSpec::vf_coeffs)
        .def_readwrite("p_coeffs", &LawSpec::p_coeffs)
        .def_readwrite("R_f1", &LawSpec::R_f1)
        .def_readwrite("R_f2", &LawSpec::R_f2)
        .def_readwrite("W_c", &LawSpec::W_c)
        .def_readwrite("W_max", &LawSpec::W_max)
        .def_readwrite("V_c", &LawSpec::V_c);

    py::class_<ModelLaws>(mod, "Laws")
        .def(py::init(&build_laws), py::arg("spec"))
        .def_property_readonly("R_f1", &ModelLaws::R_f1)
        .def_property_readonly("R_f2", &ModelLaws::R_f2)
        .def_property_readonly("V_c", &ModelLaws::V_c)
        .def_property_readonly("V_max", &ModelLaws::V_max)
        .def_property_readonly("V_f", &ModelLaws::V_f)
        .def_property_readonly("W_max", &ModelLaws::W_max)
        .def_property_readonly("W_c", &ModelLaws::W_c)
        .def_property_readonly("W_min", &ModelLaws::W_min)
        .def_property_readonly("R_max", &ModelLaws::R_max)
        .def_property_readonly("R_c", &ModelLaws::R_c)
        .def_property_readonly("max_speed", &ModelLaws::max_speed)
        .def_property_readonly("constant_free_speed", &ModelLaws::constant_free_speed)
        .def("vf", [](const ModelLaws& m, double r) { return m.vf()(r); })
        .def("p", [](const ModelLaws& m, double r) { return m.p()(r); })
        .def("p_inv", &ModelLaws::p_inv)
        .def("free_state", &ModelLaws::free_state)
        .def("congested_state", &ModelLaws::congested_state)
        .def("vacuum", &ModelLaws::vacuum)
        .def("contains", &ModelLaws::contains, py::arg("u"), py::arg("tol") = 1e-10)
        .def("coords", [](const ModelLaws& m, const TrafficState& u) {
            RiemannCoords c = m.to_coords(u);
            return py::make_tuple(c.w1, c.w2);
        })
        .def("from_coords", [](const ModelLaws& m, double w1, double w2, Phase ph) { return m.from_coords({w1, w2}, ph); })
        .def("characteristics", [](const ModelLaws& m, const TrafficState& u) {
            Characteristics c = m.characteristics(u);
            return py::make_tuple(c.lambda1, c.lambda2);
        })
        .def("norm", &ModelLaws::norm)
        .def("marker_W", &ModelLaws::marker_W)
        .def("entropy_production", [](const ModelLaws& m, const TrafficState& l, const TrafficState& r, double s,
                                      double k) { return entropy_production(m, l, r, s, k); });

    py::class_<Wave>(mod, "Wave")
        .def_property_readonly("kind", [](const Wave& w) { return to_string(w.kind); })
        .def_readonly("left", &Wave::left)
        .def_readonly("right", &Wave::right)
        .def_readonly("speed_lo", &Wave::speed_lo)
        .def_readonly("speed_hi", &Wave::speed_hi);
    py::class_<WaveFan>(mod, "WaveFan")
        .def_readonly("waves", &WaveFan::waves)
        .def("sample", &WaveFan::sample, py::arg("xi"))
        .def("breakpoints", &WaveFan::breakpoints);
    mod.def("solve", &solve_coupled, py::arg("laws"), py::arg("left"), py::arg("right"),
            "Exact two-phase Riemann solver.");
    mod.def("sigma", &sigma);

    py::class_<GridMesh>(mod, "Mesh")
        .def(py::init<const ModelLaws&, int>(), py::arg("laws"), py::arg("n"), py::keep_alive<1, 2>())
        .def_property_readonly("n", &GridMesh::n)
        .def_property_readonly("eps_v", &GridMesh::eps_v)
        .def_property_readonly("eps_w", &GridMesh::eps_w)
        .def_property_readonly("size", &GridMesh::size)
        .def("snap", &GridMesh::snap)
        .def(
            "solve",
            [](const GridMesh& g, const TrafficState& l, const TrafficState& r) {
                return solve_approx(g, g.snap(l), g.snap(r));
            },
            py::arg("left"), py::arg("right"), "Approximate solver; both states are first snapped to the mesh.");

    py::class_<Audit>(mod, "Audit")
        .def_property_readonly("ok", &Audit::ok)
        .def_property_readonly("failures", [](const Audit& a) {
            py::list l;
            for (const auto& f : a.failures) l.append(py::make_tuple(f.invariant, f.t, f.detail));
            return l;
        })
        .def_readonly("max_rh_mass", &Audit::max_rh_mass)
        .def_readonly("max_rh_momentum", &Audit::max_rh_momentum)
        .def_readonly("transitions", &Audit::transitions);

    py::class_<EntropyReport>(mod, "EntropyReport")
        .def_readonly("k_grid", &EntropyReport::k_grid)
        .def_readonly("min_per_k", &EntropyReport::min_per_k)
        .def_readonly("min_admissible", &EntropyReport::min_admissible)
        .def_readonly("negative_total", &EntropyReport::negative_total)
        .def_readonly("positive_total", &EntropyReport::positive_total)
        .def_readonly("rarefaction_strength", &EntropyReport::rarefaction_strength)
        .def_readonly("c_model", &EntropyReport::c_model)
        .def_readonly("eps_v", &EntropyReport::eps_v);

    py::class_<Simulation>(mod, "Simulation")
        .def_property_readonly("events", [](const Simulation& s) { return s.history.events; })
        .def_property_readonly("tv0", [](const Simulation& s) { return s.history.tv0; })
        .def_property_readonly("t_end", [](const Simulation& s) { return s.history.t_end; })
        .def_property_readonly("eps_v", [](const Simulation& s) { return s.grid().eps_v(); })
        .def_property_readonly("eps_w", [](const Simulation& s) { return s.grid().eps_w(); })
        .def_property_readonly("fronts", [](const Simulation& s) {
            py::list l;
            for (const Front& f : s.history.segments) l.append(front_dict(s.grid(), f));
            return l;
        })
        .def_property_readonly("log", [](const Simulation& s) {
            py::list l;
            for (const EventRecord& r : s.history.log) l.append(event_dict(r));
            return l;
        })
        .def("evaluate", [](const Simulation& s, double t, double x) { return evaluate(s.history, t, x); })
        .def("profile",
             [](const Simulation& s, double t, const std::vector<double>& xs) {
                 return profile_arrays(profile(s.history, t, xs), *s.laws);
             },
             py::arg("t"), py::arg("xs"))
        .def("l1_distance",
             [](const Simulation& s, double t, double u) {
                 return l1_distance(s.grid(), snapshot(s.history, t), snapshot(s.history, u));
             })
        .def("audit", [](const Simulation& s) { return audit_run(s.history); })
        .def("entropy", [](const Simulation& s, std::vector<double> k) { return entropy_report(s.history, std::move(k)); },
             py::arg("k_grid") = std::vector<double>{})
        .def("weak_residual",
             [](const Simulation& s, double t0, double x0, double rt, double rx) {
                 WeakResidual r = weak_residual(s.history, Bump{t0, x0, rt, rx});
                 return py::make_tuple(r.mass, r.momentum);
             },
             py::arg("t0"), py::arg("x0"), py::arg("rt"), py::arg("rx"))
        .def("last_passage_time", [](const Simulation& s, double x) { return last_passage_time(s.history, x); },
             py::arg("x") = 0.0);

    mod.def(
        "simulate",
        [](const ModelLaws& laws, std::vector<double> breaks, std::vector<TrafficState> values, int n, double t_end,
           bool strict, const std::string& rounding) {
            SimOptions o;
            o.strict = strict;
            if (rounding == "floor") o.rounding = Rounding::Floor;
            else if (rounding != "mintv") throw ConfigError("rounding must be mintv or floor");
            py::gil_scoped_release nogil;
            return simulate(laws, make_datum(std::move(breaks), std::move(values)), n, t_end, o);
        },
        py::arg("laws"), py::arg("breaks"), py::arg("values"), py::arg("n"), py::arg("t_end"), py::arg("strict") = false,
        py::arg("rounding") = "mintv");

    mod.def(
        "random_datum",
        [](const ModelLaws& m, std::uint64_t seed, int max_jumps, double a, double b) {
            std::mt19937_64 rng(seed);
            PiecewiseDatum d = random_datum(m, rng, max_jumps, a, b);
            return py::make_tuple(d.breaks, d.values);
        },
        py::arg("laws"), py::arg("seed"), py::arg("max_jumps") = 20, py::arg("a") = -1.0, py::arg("b") = 1.0);

    py::class_<TrafficLightConfig>(mod, "TrafficLight")
        .def(py::init<>())
        .def_readwrite("gamma", &TrafficLightConfig::gamma)
        .def_readwrite("V_max", &TrafficLightConfig::V_max)
        .def_readwrite("W_max", &TrafficLightConfig::W_max)
        .def_readwrite("W_c", &TrafficLightConfig::W_c)
        .def_readwrite("V_c", &TrafficLightConfig::V_c)
        .def_readwrite("x1", &TrafficLightConfig::x1)
        .def_readwrite("x2", &TrafficLightConfig::x2)
        .def("laws", [](const TrafficLightConfig& c) { return build_laws(traffic_light_laws(c)); })
        .def("datum", [](const TrafficLightConfig& c) {
            Scenario s = build_scenario(c);
            return py::make_tuple(s.datum.breaks, s.datum.values);
        });

    py::class_<EventPoint>(mod, "EventPoint")
        .def_readonly("t", &EventPoint::t)
        .def_readonly("x", &EventPoint::x)
        .def("__iter__", [](const EventPoint& p) { return py::iter(py::make_tuple(p.t, p.x)); });
    py::class_<ExactEventTable>(mod, "EventTable")
        .def_readonly("a1", &ExactEventTable::a1)
        .def_readonly("a2", &ExactEventTable::a2)
        .def_readonly("b1", &ExactEventTable::b1)
        .def_readonly("b2", &ExactEventTable::b2)
        .def_readonly("c1", &ExactEventTable::c1)
        .def_readonly("c2", &ExactEventTable::c2)
        .def_readonly("c2_geometric", &ExactEventTable::c2_geometric)
        .def_readonly("merge", &ExactEventTable::merge)
        .def_readonly("t_star", &ExactEventTable::t_star)
        .def_readonly("t_d1", &ExactEventTable::t_d1)
        .def_readonly("t_d2", &ExactEventTable::t_d2)
        .def_readonly("t_last", &ExactEventTable::t_last)
        .def_readonly("shocks_meet_upstream", &ExactEventTable::shocks_meet_upstream);
    mod.def("closed_form_table", &closed_form_table, py::arg("config"), py::arg("check") = true,
            py::arg("ode_steps") = 1024);

    py::class_<ExactReference>(mod, "ExactReference")
        .def(py::init<const TrafficLightConfig&, int>(), py::arg("config"), py::arg("ode_steps") = 1024)
        .def_property_readonly("table", &ExactReference::table)
        .def_property_readonly("window", &ExactReference::window)
        .def("__call__", &ExactReference::operator(), py::arg("t"), py::arg("x"))
        .def("profile",
             [](const ExactReference& e, double t, const std::vector<double>& xs) {
                 return profile_arrays(e.profile(t, xs), e.laws());
             })
        .def("jumps", &ExactReference::jumps)
        .def("l1_error", [](const ExactReference& e, const Simulation& s, double t, double a, double b) {
            return l1_error(s.history, e, t, a, b);
        });

    py::class_<LadderRow>(mod, "LadderRow")
        .def_readonly("n", &LadderRow::n)
        .def_readonly("events", &LadderRow::events)
        .def_readonly("t_last_sim", &LadderRow::t_last_sim)
        .def_readonly("t_d1_closed", &LadderRow::t_d1_closed)
        .def_readonly("t_last_exact", &LadderRow::t_last_exact)
        .def_readonly("error_closed", &LadderRow::error_closed)
        .def_readonly("error_exact", &LadderRow::error_exact)
        .def_readonly("l1_probe", &LadderRow::l1_probe)
        .def_readonly("negative_entropy", &LadderRow::negative_entropy);
    mod.def(
        "ladder",
        [](const TrafficLightConfig& c, int n_min, int n_max, int jobs, double probe_time) {
            LadderOptions o;
            o.n_min = n_min;
            o.n_max = n_max;
            o.jobs = jobs;
            o.probe_time = probe_time;
            py::gil_scoped_release nogil;
            return run_ladder(c, o);
        },
        py::arg("config"), py::arg("n_min") = 5, py::arg("n_max") = 9, py::arg("jobs") = 1, py::arg("probe_time") = 45.0);
}
