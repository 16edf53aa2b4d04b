#pragma once

#include <random>
#include <vector>

#include "wft/engine.hpp"

namespace wft {

/// Red light at x = 0 turning green at t = 0 with two stopped platoons.
/// Long vehicles (marker W_c) on [x1, x2), short ones (W_max) on [x2, 0).
struct TrafficLightConfig {
    double gamma = 2.0;
    double V_max = 0.05;
    double W_max = 4.0 / 30.0;
    double W_c = 1.0 / 8.0;
    double V_c = 0.02;
    double x1 = -10.0;
    double x2 = -7.0;
};

/// v_f = V_max (1 - rho), p = rho^gamma.
LawSpec traffic_light_laws(const TrafficLightConfig& cfg);

struct Scenario {
    ModelLaws laws;
    PiecewiseDatum datum;
};
Scenario build_scenario(const TrafficLightConfig& cfg);

/// Random piecewise constant datum on [a, b] with up to max_jumps jumps,
/// mixing free, congested and vacuum states.
PiecewiseDatum random_datum(const ModelLaws& m, std::mt19937_64& rng, int max_jumps, double a = -1.0, double b = 1.0);

struct EventPoint {
    double t = 0.0;
    double x = 0.0;
};

struct ExactEventTable {
    EventPoint a2, b2, c2, a1, b1, c1;
    double t_star = 0.0;
    double t_d2 = 0.0;
    double t_d1 = 0.0;  ///< car-count closed form
    /// c2 recomputed from b2 along the contact of speed V_c
    EventPoint c2_geometric;
    /// where the trailing shock catches the leading one
    EventPoint merge;
    /// time the last vehicle passes x = 0 when the shocks merge first
    double t_last = 0.0;
    bool shocks_meet_upstream = false;
};

/// Interaction points and passage times. With check set, throws
/// StructuralAssumptionViolated when the two shocks meet before x = 0.
ExactEventTable closed_form_table(const TrafficLightConfig& cfg, bool check = true, int ode_steps = 1024);

/// Exact solution of the traffic-light problem, including the curved contact
/// and phase-transition paths integrated with RK4.
class ExactReference {
public:
    explicit ExactReference(const TrafficLightConfig& cfg, int ode_steps = 1024);

    const ModelLaws& laws() const { return laws_; }
    const ExactEventTable& table() const { return table_; }
    double window() const { return window_; }

    TrafficState operator()(double t, double x) const;
    std::vector<TrafficState> profile(double t, const std::vector<double>& xs) const;

    /// State of the centred congested fan at xi = x/t (short vehicles).
    TrafficState fan_left(double xi) const;
    /// Position of the accelerating contact for t in [t_a2, t_b2].
    double contact_path(double t) const;
    /// Position of the accelerating phase transition for t in [t_a1, t_b1].
    double transition_path(double t) const;
    /// Tail of the platoon at time t.
    double tail(double t) const;
    /// Positions of the discontinuities at time t, sorted.
    std::vector<double> jumps(double t) const;

private:
    struct Path {
        std::vector<double> t, x, dx;
        double operator()(double s) const;
    };
    template <class F, class S>
    Path integrate(F&& f, double ta, double xa, S&& stop, int steps) const;
    double lambda1(double rho, double v) const;
    TrafficState fan_secondary(double t, double x) const;

    TrafficLightConfig cfg_;
    ModelLaws laws_;
    ExactEventTable table_;
    Path c2_, pt1_;
    double rho_mv_ = 0, rho_cv_ = 0, lam_l_ = 0, lam_r_ = 0, lam_c_ = 0, lam_cv_ = 0;
    double sig_a_ = 0, sig_s2_ = 0, sig_pt2_ = 0, v1_ = 0;
    double window_ = 0;

    friend ExactEventTable closed_form_table(const TrafficLightConfig&, bool, int);
};

std::vector<TrafficState> exact_reference(const TrafficLightConfig& cfg, double t, const std::vector<double>& xs);

/// Time at which the last front with vacuum on its left crosses x.
double last_passage_time(const RunHistory& h, double x = 0.0);

/// L1 distance in the coordinate norm between a run and the exact solution on [a, b].
double l1_error(const RunHistory& h, const ExactReference& ex, double t, double a, double b);

}  // namespace wft
