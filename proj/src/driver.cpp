#include "wft/driver.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

#include "wft/analysis.hpp"
#include "wft/errors.hpp"

namespace wft {

Simulation simulate(const ModelLaws& laws, const PiecewiseDatum& datum, int n, double t_end, const SimOptions& opt) {
    if (n < 1) throw ConfigError("mesh level n must be at least 1");
    if (!(t_end > 0.0)) throw ConfigError("T_end must be positive");
    Simulation s;
    s.laws = std::make_unique<ModelLaws>(laws);
    s.mesh = std::make_unique<GridMesh>(*s.laws, n);
    RunOptions ro;
    ro.t_end = t_end;
    ro.max_events = opt.max_events;
    ro.strict = opt.strict;
    ro.strict_temple = !s.laws->constant_free_speed();
    s.history = run(approximate_datum(datum, *s.mesh, opt.rounding), *s.mesh, ro);
    return s;
}

namespace {

std::string num(double x) {
    std::ostringstream o;
    o.precision(6);
    o << x;
    return o.str();
}

}  // namespace

Audit audit_run(const RunHistory& h, double slack, double rh_tol) {
    Audit a;
    const GridMesh& g = *h.mesh;
    const ModelLaws& m = g.laws();
    const bool temple_binding = !m.constant_free_speed();
    auto temple = [&](AuditFinding f) {
        (temple_binding ? a.failures : a.warnings).push_back(std::move(f));
    };
    for (std::size_t i = 1; i < h.log.size(); ++i) {
        const EventRecord& r = h.log[i];
        if (r.d_tv > slack) a.failures.push_back({"tv_monotone", r.t, "TV increased by " + num(r.d_tv)});
        if (r.d_temple > slack) temple({"temple_monotone", r.t, "Temple functional increased by " + num(r.d_temple)});
        if (r.waves_out > r.waves_in && r.d_temple > -g.eps_w() + slack)
            temple({"temple_growth", r.t, "wave count grew while the Temple functional changed by " + num(r.d_temple)});
        const int dp = r.pts_in - r.pts_out;
        if (dp < 0 || dp % 2 != 0)
            a.failures.push_back({"pt_parity", r.t, "phase-transition count changed by " + std::to_string(-dp)});
        else if (dp > 0 && r.pts_in < 2)
            a.failures.push_back({"pt_parity", r.t, "phase transitions vanished without a collision of two"});
    }
    for (const Front& f : h.segments) {
        RhResidual res = rh_residual(g, f);
        a.max_rh_mass = std::max(a.max_rh_mass, std::abs(res.mass));
        if (std::abs(res.mass) > rh_tol)
            a.failures.push_back({"rh_mass", f.t0, "mass residual " + num(res.mass)});
        if (res.momentum_applicable) {
            a.max_rh_momentum = std::max(a.max_rh_momentum, std::abs(res.momentum));
            if (std::abs(res.momentum) > rh_tol)
                a.failures.push_back({"rh_momentum", f.t0, "momentum residual " + num(res.momentum)});
        }
        if (f.kind == WaveKind::PhaseTransition) {
            ++a.transitions;
            if (!classify_transition(m, g.state(f.left), g.state(f.right)).entropic)
                a.failures.push_back({"G_e", f.t0, "phase transition outside G_e at x=" + num(f.x0)});
        }
    }
    return a;
}

std::vector<LadderRow> run_ladder(const TrafficLightConfig& cfg, const LadderOptions& opt) {
    if (opt.n_min < 1 || opt.n_min > opt.n_max) throw ConfigError("ladder needs 1 <= n_min <= n_max");
    Scenario sc = build_scenario(cfg);
    const ExactReference ex(cfg);
    const ExactEventTable& tab = ex.table();
    const double t_end = opt.t_end > 0.0 ? opt.t_end : std::ceil(1.05 * ex.window());
    if (opt.probe_time <= 0.0 || opt.probe_time > std::min(t_end, ex.window()))
        throw ConfigError("probe time outside the exact reference window");
    const double a = cfg.x1 - 1.0, b = 1.0;

    auto level = [&](int n) {
        auto t0 = std::chrono::steady_clock::now();
        Simulation s = simulate(sc.laws, sc.datum, n, t_end, opt.sim);
        LadderRow r;
        r.n = n;
        r.events = s.history.events;
        r.t_last_sim = last_passage_time(s.history, 0.0);
        r.t_d1_closed = tab.t_d1;
        r.t_last_exact = tab.t_last;
        r.error_closed = std::abs(r.t_last_sim - tab.t_d1) / tab.t_d1;
        r.error_exact = std::abs(r.t_last_sim - tab.t_last);
        r.l1_probe = l1_error(s.history, ex, opt.probe_time, a, b);
        r.negative_entropy = entropy_report(s.history).negative_total;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    std::vector<LadderRow> rows;
    const int jobs = std::max(1, opt.jobs);
    for (int lo = opt.n_min; lo <= opt.n_max; lo += jobs) {
        std::vector<std::future<LadderRow>> batch;
        for (int n = lo; n <= std::min(opt.n_max, lo + jobs - 1); ++n)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, level, n));
        for (auto& f : batch) rows.push_back(f.get());
    }
    return rows;
}

}  // namespace wft
