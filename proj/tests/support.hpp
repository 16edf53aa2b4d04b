#pragma once

#include <cmath>
#include <random>

#include "wft/scenario.hpp"

namespace wft::testing {

/// v_f = (1 - rho)/20, p = rho^2, markers 1/8 and 4/30.
inline ModelLaws light() { return build_laws(traffic_light_laws(TrafficLightConfig{})); }

/// A second linear law with a different pressure exponent.
inline LawSpec steep_spec() {
    LawSpec s;
    s.family = "linear";
    s.V_max = 0.08;
    s.gamma = 1.5;
    s.v_ref = 2.0;
    s.R_f1 = 0.2;
    s.R_f2 = 0.28;
    s.V_c = 0.03;
    return s;
}
inline ModelLaws steep() { return build_laws(steep_spec()); }

/// Constant free speed, so that V_max = V_f.
inline LawSpec flat_spec() {
    LawSpec s;
    s.family = "constant";
    s.V_max = 0.03;
    s.R_f1 = 0.3;
    s.R_f2 = 0.35;
    s.gamma = 2.0;
    s.v_ref = 2.0;
    s.V_c = 0.02;
    return s;
}
inline ModelLaws flat() { return build_laws(flat_spec()); }

inline TrafficState random_congested(const ModelLaws& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double v = m.V_c() * U(rng);
    double w = m.W_c() + (m.W_max() - m.W_c()) * U(rng);
    return m.from_coords({v, w}, Phase::Congested);
}

inline TrafficState random_free(const ModelLaws& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    return m.free_state(m.R_f2() * U(rng));
}

inline TrafficState random_state(const ModelLaws& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double r = U(rng);
    if (r < 0.1) return m.vacuum();
    return r < 0.5 ? random_free(m, rng) : random_congested(m, rng);
}

}  // namespace wft::testing
