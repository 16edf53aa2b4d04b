#pragma once

#include <vector>

#include "wft/engine.hpp"

namespace wft {

/// Jump residuals speed*[Y] - [F] for mass and for rho W(u).
struct RhResidual {
    double mass = 0.0;
    double momentum = 0.0;
    bool momentum_applicable = false;
};
RhResidual rh_residual(const ModelLaws& m, const TrafficState& l, const TrafficState& r, double speed);
RhResidual rh_residual(const GridMesh& g, const Front& f);

/// Membership of a phase transition (u_-, u_+) in the admissibility sets.
struct TransitionClass {
    bool weak = false;     ///< in G_w
    bool entropic = false; ///< in G_e = G1 u G2 u G3
    bool G1 = false, G2 = false, G3 = false;
    bool G1T = false, G2T = false;
};
TransitionClass classify_transition(const ModelLaws& m, const TrafficState& um, const TrafficState& up,
                                    double tol = 1e-9);

/// Signed entropy production of a jump travelling at the given speed.
double entropy_production(const ModelLaws& m, const TrafficState& l, const TrafficState& r, double speed, double k);

/// max of 2 + rho p''/p' over [p^-1(W_c - V_c), R_max], densely sampled.
double c_model(const ModelLaws& m);

/// Multiples of eps_v/2 in [0, V_c] followed by (V_c + V_f)/2 and V_f.
std::vector<double> default_k_grid(const GridMesh& g);

struct EntropyRecord {
    std::size_t front = 0;
    double k = 0.0;
    double value = 0.0;
};

struct EntropyReport {
    std::vector<double> k_grid;
    std::vector<EntropyRecord> records;  ///< filled when requested
    std::vector<double> min_per_k;       ///< over non-rarefaction fronts
    double min_admissible = 0.0;         ///< min over non-rarefaction fronts and k
    double negative_total = 0.0;         ///< sum over k and rarefaction steps of int min(Y,0) dt
    double positive_total = 0.0;         ///< same with max(Y,0)
    double rarefaction_strength = 0.0;   ///< sum over steps of |dv| times lifetime
    double c_model = 0.0;
    double eps_v = 0.0;
};
EntropyReport entropy_report(const RunHistory& h, std::vector<double> k_grid = {}, bool keep_records = false);

/// phi(t,x) = b((t-t0)/rt) b((x-x0)/rx), b(s) = exp(1 - 1/(1-s^2)) on |s| < 1.
struct Bump {
    double t0 = 0.0, x0 = 0.0, rt = 1.0, rx = 1.0;
    double operator()(double t, double x) const;
    double dt(double t, double x) const;
    double dx(double t, double x) const;
    static double b(double s);
    static double db(double s);
};

struct WeakResidual {
    double mass = 0.0;
    double momentum = 0.0;
};
/// Line-integral form sum_fronts int (s [Y] - [F]) phi dt over the run history.
WeakResidual weak_residual(const RunHistory& h, const Bump& phi);

}  // namespace wft
