#include "wft/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wft/errors.hpp"

namespace wft {

namespace {

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        double x = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + s + "'");
    }
}

std::vector<double> to_doubles(const CLI::ConfigItem& it) {
    std::vector<double> out;
    for (const auto& s : it.inputs) out.push_back(to_double(it.fullname(), s));
    return out;
}

double one(const CLI::ConfigItem& it) {
    if (it.inputs.size() != 1) throw ConfigError("'" + it.fullname() + "' expects a single value");
    return to_double(it.fullname(), it.inputs[0]);
}

std::string word(const CLI::ConfigItem& it) {
    if (it.inputs.size() != 1) throw ConfigError("'" + it.fullname() + "' expects a single value");
    return it.inputs[0];
}

int integer(const CLI::ConfigItem& it) {
    double x = one(it);
    if (x != static_cast<double>(static_cast<long>(x))) throw ConfigError("'" + it.fullname() + "' expects an integer");
    return static_cast<int>(x);
}

Phase to_phase(const std::string& s) {
    if (s == "free" || s == "f") return Phase::Free;
    if (s == "congested" || s == "c") return Phase::Congested;
    throw ConfigError("unknown phase '" + s + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    RunConfig c;
    bool have_kind = false, scenario_block = false;
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--") continue;
        if (it.parents.size() != 1) throw ConfigError("key '" + it.fullname() + "' must sit inside a section");
        const std::string& sec = it.parents[0];
        const std::string& k = it.name;
        if (sec == "model") {
            auto& m = c.model;
            if (k == "family") m.family = word(it);
            else if (k == "V_max") m.V_max = one(it);
            else if (k == "R") m.R = one(it);
            else if (k == "gamma") m.gamma = one(it);
            else if (k == "v_ref") m.v_ref = one(it);
            else if (k == "rho_max") m.rho_max = one(it);
            else if (k == "vf_coeffs") m.vf_coeffs = to_doubles(it);
            else if (k == "p_coeffs") m.p_coeffs = to_doubles(it);
            else if (k == "R_f1") m.R_f1 = one(it);
            else if (k == "R_f2") m.R_f2 = one(it);
            else if (k == "W_c") m.W_c = one(it);
            else if (k == "W_max") m.W_max = one(it);
            else if (k == "V_c") m.V_c = one(it);
            else throw ConfigError("unknown key '" + it.fullname() + "'");
        } else if (sec == "scenario") {
            scenario_block = true;
            auto& s = c.light;
            if (k == "name") {
                if (word(it) != "traffic_light") throw ConfigError("unknown scenario '" + word(it) + "'");
            } else if (k == "gamma") s.gamma = one(it);
            else if (k == "V_max") s.V_max = one(it);
            else if (k == "W_max") s.W_max = one(it);
            else if (k == "W_c") s.W_c = one(it);
            else if (k == "V_c") s.V_c = one(it);
            else if (k == "x1") s.x1 = one(it);
            else if (k == "x2") s.x2 = one(it);
            else if (k == "n_min") c.n_min = integer(it);
            else if (k == "n_max") c.n_max = integer(it);
            else if (k == "n_levels") c.n_max = c.n_min + integer(it) - 1;
            else throw ConfigError("unknown key '" + it.fullname() + "'");
        } else if (sec == "datum") {
            if (k == "kind") {
                std::string w = word(it);
                have_kind = true;
                if (w == "inline") c.datum = DatumKind::Inline;
                else if (w == "scenario") c.datum = DatumKind::Scenario;
                else if (w == "random") c.datum = DatumKind::Random;
                else throw ConfigError("unknown datum kind '" + w + "'");
            } else if (k == "breaks") c.breaks = to_doubles(it);
            else if (k == "rho") c.rho = to_doubles(it);
            else if (k == "v") c.v = to_doubles(it);
            else if (k == "phase") {
                c.phase.clear();
                for (const auto& s : it.inputs) c.phase.push_back(to_phase(s));
            } else if (k == "jumps") c.random_jumps = integer(it);
            else if (k == "a") c.random_a = one(it);
            else if (k == "b") c.random_b = one(it);
            else throw ConfigError("unknown key '" + it.fullname() + "'");
        } else if (sec == "run") {
            if (k == "n") c.n = integer(it);
            else if (k == "T_end") c.T_end = one(it);
            else if (k == "snapshots") c.snapshots = to_doubles(it);
            else if (k == "x_min") c.x_min = one(it);
            else if (k == "x_max") c.x_max = one(it);
            else if (k == "x_samples") c.x_samples = integer(it);
            else if (k == "k_grid") c.k_grid = to_doubles(it);
            else if (k == "rounding") {
                std::string w = word(it);
                if (w == "mintv") c.rounding = Rounding::MinTV;
                else if (w == "floor") c.rounding = Rounding::Floor;
                else throw ConfigError("unknown rounding '" + w + "'");
            } else if (k == "max_events") c.max_events = static_cast<std::size_t>(integer(it));
            else if (k == "probe_time") c.probe_time = one(it);
            else throw ConfigError("unknown key '" + it.fullname() + "'");
        } else {
            throw ConfigError("unknown section [" + sec + "]");
        }
    }
    if (scenario_block && !have_kind) c.datum = DatumKind::Scenario;
    if (c.n < 1 || c.n > 20) throw ConfigError("run.n must lie in [1, 20]");
    if (c.n_min < 1 || c.n_max > 20) throw ConfigError("ladder levels must lie in [1, 20]");
    if (c.x_samples < 1) throw ConfigError("run.x_samples must be positive");
    if (c.x_min && c.x_max && !(*c.x_max > *c.x_min)) throw ConfigError("run.x_max must exceed run.x_min");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(f);
}

namespace {

void finish(Problem& p, const RunConfig& c, double lo, double hi) {
    for (double t : p.snapshots)
        if (t < 0.0 || t > p.T_end) throw ConfigError("snapshot times must lie in [0, T_end]");
    p.x_min = c.x_min.value_or(lo);
    p.x_max = c.x_max.value_or(hi);
    if (!(p.x_max > p.x_min)) throw ConfigError("run.x_max must exceed run.x_min");
}

}  // namespace

Problem build_problem(const RunConfig& c, std::uint64_t seed) {
    if (c.T_end && !(*c.T_end > 0.0)) throw ConfigError("run.T_end must be positive");
    if (c.datum == DatumKind::Scenario) {
        Scenario sc = build_scenario(c.light);
        Problem p{std::move(sc.laws), std::move(sc.datum), c.T_end.value_or(400.0), c.snapshots};
        if (p.snapshots.empty()) p.snapshots = {0.0, std::min(c.probe_time, 0.5 * p.T_end), p.T_end};
        finish(p, c, c.light.x1 - 1.0, 1.0 + p.laws.V_max() * p.T_end);
        return p;
    }
    Problem p{build_laws(c.model), {}, c.T_end.value_or(1.0), c.snapshots};
    const ModelLaws& m = p.laws;
    if (c.datum == DatumKind::Random) {
        std::mt19937_64 rng(seed);
        p.datum = random_datum(m, rng, c.random_jumps, c.random_a, c.random_b);
    } else {
        if (c.rho.size() != c.breaks.size() + 1) throw ConfigError("datum.rho needs one more entry than datum.breaks");
        if (!c.phase.empty() && c.phase.size() != c.rho.size()) throw ConfigError("datum.phase length mismatch");
        if (!c.v.empty() && c.v.size() != c.rho.size()) throw ConfigError("datum.v length mismatch");
        p.datum.breaks = c.breaks;
        for (std::size_t i = 0; i < c.rho.size(); ++i) {
            Phase ph = c.phase.empty() ? Phase::Free : c.phase[i];
            if (ph == Phase::Free && c.v.empty()) {
                if (c.rho[i] < 0.0 || c.rho[i] > m.R_f2()) throw OutOfDomain("free density outside [0, R_f'']");
                p.datum.values.push_back(m.free_state(c.rho[i]));
            } else if (c.v.empty()) {
                throw ConfigError("congested states need datum.v");
            } else {
                TrafficState u{c.rho[i], c.v[i], ph};
                if (!m.contains(u)) throw OutOfDomain("datum value " + std::to_string(i) + " lies outside the state space");
                p.datum.values.push_back(u);
            }
        }
    }
    if (p.snapshots.empty()) p.snapshots = {0.0, 0.5 * p.T_end, p.T_end};
    double lo = -1.0, hi = 1.0;
    if (!p.datum.breaks.empty()) {
        double span = std::max(1.0, p.datum.breaks.back() - p.datum.breaks.front());
        lo = p.datum.breaks.front() - 0.5 * span;
        hi = p.datum.breaks.back() + 0.5 * span;
    }
    finish(p, c, lo, hi);
    return p;
}

}  // namespace wft
