#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wft/scenario.hpp"

namespace wft {

struct SimOptions {
    Rounding rounding = Rounding::MinTV;
    std::size_t max_events = 10'000'000;
    bool strict = false;
};

/// A finished run that owns its laws and mesh, so it can be moved around freely.
struct Simulation {
    std::unique_ptr<ModelLaws> laws;
    std::unique_ptr<GridMesh> mesh;
    RunHistory history;

    const GridMesh& grid() const { return *mesh; }
};

/// Temple checks are skipped in strict mode when V_max = V_f, where the
/// functional can rise at a free contact meeting a phase transition.
Simulation simulate(const ModelLaws& laws, const PiecewiseDatum& datum, int n, double t_end,
                    const SimOptions& opt = {});

struct AuditFinding {
    std::string invariant;
    double t = 0.0;
    std::string detail;
};

struct Audit {
    std::vector<AuditFinding> failures;
    std::vector<AuditFinding> warnings;  ///< Temple findings when V_max = V_f
    double max_rh_mass = 0.0;
    double max_rh_momentum = 0.0;
    std::size_t transitions = 0;
    bool ok() const { return failures.empty(); }
};

/// Post-hoc check of the event log and every front: TV and Temple monotonicity,
/// phase-transition parity, Rankine-Hugoniot residuals and G_e membership.
Audit audit_run(const RunHistory& h, double slack = 1e-10, double rh_tol = 1e-10);

struct LadderRow {
    int n = 0;
    std::size_t events = 0;
    double t_last_sim = 0.0;
    double t_d1_closed = 0.0;
    double t_last_exact = 0.0;
    double error_closed = 0.0;  ///< |t_last_sim - t_d1| / t_d1
    double error_exact = 0.0;   ///< |t_last_sim - t_last|
    double l1_probe = 0.0;
    double negative_entropy = 0.0;
    double seconds = 0.0;
};

struct LadderOptions {
    int n_min = 5, n_max = 9;
    int jobs = 1;
    double probe_time = 45.0;
    double t_end = -1.0;  ///< negative: just past the exact reference window
    SimOptions sim;
};

/// Runs the traffic-light scenario at every level, levels in parallel.
std::vector<LadderRow> run_ladder(const TrafficLightConfig& cfg, const LadderOptions& opt);

}  // namespace wft
