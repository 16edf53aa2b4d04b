#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wft/scenario.hpp"

namespace wft {

enum class DatumKind { Inline, Scenario, Random };

/// Everything a run or ladder needs, read from an INI file with sections
/// [model], [scenario], [datum] and [run].
struct RunConfig {
    LawSpec model;
    TrafficLightConfig light;
    DatumKind datum = DatumKind::Inline;

    std::vector<double> breaks;
    std::vector<double> rho;
    std::vector<double> v;       ///< optional for free states
    std::vector<Phase> phase;

    int random_jumps = 20;
    double random_a = -1.0, random_b = 1.0;

    int n = 6;
    std::optional<double> T_end;  ///< unset: 1 for inline and random data, 400 for the scenario
    std::vector<double> snapshots;
    std::optional<double> x_min, x_max;  ///< unset: a margin around the datum
    int x_samples = 201;
    std::vector<double> k_grid;
    Rounding rounding = Rounding::MinTV;
    std::size_t max_events = 10'000'000;

    int n_min = 5, n_max = 9;
    double probe_time = 45.0;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

struct Problem {
    ModelLaws laws;
    PiecewiseDatum datum;
    double T_end = 1.0;
    std::vector<double> snapshots;
    double x_min = -1.0, x_max = 1.0;
};
/// Builds and validates laws and datum. The seed drives random data only.
Problem build_problem(const RunConfig& cfg, std::uint64_t seed = 0);

}  // namespace wft
