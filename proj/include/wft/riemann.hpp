#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wft/model.hpp"

namespace wft {

enum class WaveKind { Shock, Contact, Rarefaction, RarefactionStep, PhaseTransition };

const char* to_string(WaveKind k);

struct Wave {
    WaveKind kind = WaveKind::Shock;
    TrafficState left;
    TrafficState right;
    double speed_lo = 0.0;
    double speed_hi = 0.0;  ///< equals speed_lo unless Rarefaction
    std::function<TrafficState(double)> fan;  ///< set for Rarefaction only

    double speed() const { return speed_lo; }
};

/// Self-similar solution of a Riemann problem, waves ordered by speed.
struct WaveFan {
    TrafficState left;
    TrafficState right;
    std::vector<Wave> waves;

    /// State at x/t = xi. Discontinuities are right-continuous.
    TrafficState sample(double xi) const;
    /// All wave speeds, rarefaction ends included, in increasing order.
    std::vector<double> breakpoints() const;
    bool empty() const { return waves.empty(); }
};

/// (rho_r v_r - rho_l v_l) / (rho_r - rho_l).
double sigma(const TrafficState& ul, const TrafficState& ur);

WaveFan solve_lwr(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur);
WaveFan solve_arz(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur);
/// The two-phase solver: Lax solvers inside a phase, phase transition otherwise.
WaveFan solve_coupled(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur);

/// Same phase, coordinates within tol and densities within tol.
bool same_state(const ModelLaws& m, const TrafficState& a, const TrafficState& b, double tol = 1e-9);

struct ConsistencyResult {
    bool pass = true;
    bool premise_I = false;
    bool premise_II = false;
    double witness = 0.0;
    std::string detail;
};

/// Checks the consistency implications (I) and (II) at x = xbar by sampling
/// the three fans (64 points per rarefaction plus breakpoint neighbourhoods).
ConsistencyResult check_consistency(const ModelLaws& m, const TrafficState& ul, const TrafficState& um,
                                    const TrafficState& ur, double xbar, int resolution = 64);

}  // namespace wft
