#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "wft/analysis.hpp"
#include "wft/config.hpp"
#include "wft/driver.hpp"
#include "wft/errors.hpp"
#include "wft/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wft;

namespace {

constexpr int kOk = 0, kValidation = 2, kInvariant = 3;

const char* kind_name(DatumKind k) {
    switch (k) {
        case DatumKind::Inline: return "inline";
        case DatumKind::Scenario: return "scenario";
        case DatumKind::Random: return "random";
    }
    return "?";
}

json constants(const ModelLaws& m) {
    return {{"R_f1", m.R_f1()}, {"R_f2", m.R_f2()}, {"V_c", m.V_c()},     {"V_max", m.V_max()},
            {"V_f", m.V_f()},   {"W_max", m.W_max()}, {"W_c", m.W_c()}, {"W_min", m.W_min()},
            {"R_max", m.R_max()}, {"R_c", m.R_c()}};
}

json light_json(const TrafficLightConfig& c) {
    return {{"gamma", c.gamma}, {"V_max", c.V_max}, {"W_max", c.W_max}, {"W_c", c.W_c},
            {"V_c", c.V_c},     {"x1", c.x1},       {"x2", c.x2}};
}

const char* kSwapNote =
    "traffic-light data uses W_max=4/30 and W_c=1/8, the printed pair exchanged, so that W_max > W_c holds";

json audit_json(const Audit& a) {
    json f = json::array();
    for (const auto& x : a.failures) f.push_back({{"invariant", x.invariant}, {"t", x.t}, {"detail", x.detail}});
    return {{"ok", a.ok()},
            {"failures", f},
            {"temple_warnings", a.warnings.size()},
            {"max_rh_mass", a.max_rh_mass},
            {"max_rh_momentum", a.max_rh_momentum},
            {"phase_transitions_checked", a.transitions}};
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return xs;
}

template <class F>
std::string render(F&& f) {
    std::ostringstream o;
    f(o);
    return o.str();
}

int report_audit(const Audit& a) {
    if (a.ok()) return kOk;
    for (const auto& f : a.failures) std::cerr << "invariant " << f.invariant << " failed at t=" << f.t << ": " << f.detail << "\n";
    return kInvariant;
}

int cmd_run(const std::string& path, const fs::path& out, std::uint64_t seed, bool strict) {
    RunConfig cfg = load_config(path);
    Problem p = build_problem(cfg, seed);
    SimOptions so{cfg.rounding, cfg.max_events, strict};
    Simulation s = simulate(p.laws, p.datum, cfg.n, p.T_end, so);
    const RunHistory& h = s.history;
    Audit audit = audit_run(h);
    EntropyReport ent = entropy_report(h, cfg.k_grid, true);

    auto xs = linspace(p.x_min, p.x_max, cfg.x_samples);
    io::write_file(out, "profiles.csv", render([&](std::ostream& o) { io::write_profiles(o, h, p.snapshots, xs); }));
    io::write_file(out, "fronts.csv", render([&](std::ostream& o) { io::write_fronts(o, h); }));
    io::write_file(out, "functionals.csv", render([&](std::ostream& o) { io::write_functionals(o, h); }));
    io::write_file(out, "entropy.csv", render([&](std::ostream& o) { io::write_entropy(o, h, ent); }));
    io::write_file(out, "entropy_summary.csv", render([&](std::ostream& o) { io::write_entropy_summary(o, ent); }));

    const EventRecord& last = h.log.back();
    json meta = {{"command", "run"},
                 {"timestamp", io::iso_timestamp()},
                 {"config", path},
                 {"datum", kind_name(cfg.datum)},
                 {"seed", seed},
                 {"n", cfg.n},
                 {"T_end", p.T_end},
                 {"eps_v", s.grid().eps_v()},
                 {"eps_w", s.grid().eps_w()},
                 {"constants", constants(*s.laws)},
                 {"events", h.events},
                 {"tv0", h.tv0},
                 {"final", {{"tv", last.tv}, {"temple", last.temple}, {"waves", last.waves}, {"phase_transitions", last.pts}}},
                 {"entropy", {{"negative_total", ent.negative_total}, {"min_admissible", ent.min_admissible}}},
                 {"audit", audit_json(audit)}};
    if (cfg.datum == DatumKind::Scenario) {
        meta["scenario"] = light_json(cfg.light);
        meta["notes"] = {kSwapNote};
    }
    io::write_file(out, "metadata.json", meta.dump(2) + "\n");
    std::cout << "run: " << h.events << " events, " << h.segments.size() << " fronts, output in " << out.string() << "\n";
    return report_audit(audit);
}

int cmd_ladder(const std::string& path, const fs::path& out, int n_min, int n_max, int jobs, bool strict) {
    RunConfig cfg = load_config(path);
    if (cfg.datum != DatumKind::Scenario) throw ConfigError("ladder needs a [scenario] config");
    if (n_min < 0) n_min = cfg.n_min;
    if (n_max < 0) n_max = cfg.n_max;
    if (n_min < 1 || n_min > n_max) throw ConfigError("ladder needs 1 <= n_min <= n_max");
    LadderOptions lo;
    lo.n_min = n_min;
    lo.n_max = n_max;
    lo.jobs = jobs;
    lo.probe_time = cfg.probe_time;
    lo.t_end = cfg.T_end.value_or(-1.0);
    lo.sim = {cfg.rounding, cfg.max_events, strict};
    auto rows = run_ladder(cfg.light, lo);
    io::write_file(out, "ladder.csv", render([&](std::ostream& o) { io::write_ladder(o, rows); }));

    json meta = {{"command", "ladder"},
                 {"timestamp", io::iso_timestamp()},
                 {"config", path},
                 {"n_min", n_min},
                 {"n_max", n_max},
                 {"probe_time", cfg.probe_time},
                 {"scenario", light_json(cfg.light)},
                 {"notes", {kSwapNote,
                            "t_d1_closed assumes the two free shocks reach x=0 separately; t_last_exact is the "
                            "last passage from car conservation"}}};
    io::write_file(out, "metadata.json", meta.dump(2) + "\n");
    for (const auto& r : rows)
        std::cout << "n=" << r.n << " events=" << r.events << " t_last=" << io::format_number(r.t_last_sim)
                  << " rel_err_closed=" << r.error_closed << " l1=" << r.l1_probe << " (" << r.seconds << " s)\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wave-front tracking for a two-phase traffic model"};
    app.require_subcommand(1);
    std::string out = "out";
    std::uint64_t seed = 0;
    bool strict = false;
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Seed for random data")->capture_default_str();
    app.add_flag("--strict", strict, "Abort at the first invariant violation");

    std::string config;
    auto* run = app.add_subcommand("run", "Run one simulation");
    run->add_option("config", config, "INI config")->required();
    run->fallthrough();

    std::string lconfig;
    int n_min = -1, n_max = -1, jobs = 1;
    auto* ladder = app.add_subcommand("ladder", "Refinement ladder of the traffic-light scenario");
    ladder->add_option("config", lconfig, "INI config")->required();
    ladder->add_option("--n-min", n_min, "Coarsest level");
    ladder->add_option("--n-max", n_max, "Finest level");
    ladder->add_option("--jobs", jobs, "Levels run in parallel")->check(CLI::PositiveNumber);
    ladder->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run) return cmd_run(config, out, seed, strict);
        return cmd_ladder(lconfig, out, n_min, n_max, jobs, strict);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kInvariant;
    } catch (const EventOverflow& e) {
        std::cerr << "event overflow: " << e.what() << "\n";
        return kInvariant;
    } catch (const Error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
