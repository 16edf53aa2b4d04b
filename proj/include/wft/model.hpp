#pragma once

#include <functional>
#include <string>
#include <vector>

namespace wft {

enum class Phase { Free, Congested };

const char* to_string(Phase p);

/// A point u = (rho, v) of the state space with its phase tag.
struct TrafficState {
    double rho = 0.0;
    double v = 0.0;
    Phase phase = Phase::Free;
};

/// Extended Riemann invariants (w1, w2).
struct RiemannCoords {
    double w1 = 0.0;
    double w2 = 0.0;
};

/// Characteristic speeds. In the free phase both entries hold lambda_f.
struct Characteristics {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Scalar law with first and second derivatives.
struct Law {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
    double operator()(double r) const { return f(r); }
};

namespace laws {
/// v(rho) = vmax (1 - rho/R).
Law linear_velocity(double vmax, double R);
/// v(rho) = vmax, so that V_max = V_f.
Law constant_velocity(double vmax);
/// vref/gamma (rho/rho_max)^gamma, or vref log(rho/rho_max) when gamma = 0.
Law power_pressure(double gamma, double vref, double rho_max);
/// sum_i c_i rho^i
Law polynomial(std::vector<double> coeffs);
}  // namespace laws

/// Speed and pressure laws together with the derived constants.
/// Immutable after construction; built through validate_laws.
class ModelLaws {
public:
    const Law& vf() const { return vf_; }
    const Law& p() const { return p_; }

    double R_f1() const { return R_f1_; }   ///< R_f'
    double R_f2() const { return R_f2_; }   ///< R_f''
    double V_c() const { return V_c_; }
    double V_max() const { return V_max_; }
    double V_f() const { return V_f_; }
    double W_max() const { return W_max_; }
    double W_c() const { return W_c_; }
    double W_min() const { return W_min_; }
    double R_max() const { return R_max_; }
    double R_c() const { return R_c_; }

    /// V_max == V_f, i.e. v_f is constant and every free jump is a contact.
    bool constant_free_speed() const { return V_max_ == V_f_; }

    double p_inv(double w) const;
    double vf_inv(double v) const;

    TrafficState free_state(double rho) const;
    TrafficState congested_state(double rho, double v) const;
    TrafficState vacuum() const { return {0.0, V_max_, Phase::Free}; }

    bool contains(const TrafficState& u, double tol = 1e-10) const;
    /// Free with rho < R_f'.
    bool in_free_low(const TrafficState& u) const { return u.phase == Phase::Free && u.rho < R_f1_; }
    /// Free with rho in [R_f', R_f''].
    bool in_free_high(const TrafficState& u) const { return u.phase == Phase::Free && u.rho >= R_f1_; }

    RiemannCoords to_coords(const TrafficState& u) const;
    TrafficState from_coords(const RiemannCoords& c, Phase phase) const;
    double norm(const TrafficState& u) const;
    double dist(const TrafficState& a, const TrafficState& b) const;

    /// Unique rho in [R_f', R_f''] with v_f(rho) + p(rho) = w.
    double rho_f(double w) const;
    double lambda_f(double rho) const;
    Characteristics characteristics(const TrafficState& u) const;
    /// W(u) = max{w2(u), W_c}.
    double marker_W(const TrafficState& u) const;
    /// Density abscissa R^k(w) of the extended entropy pair.
    double R_k(double w, double k) const;

    /// Entropy pair used with the marker W, for k in [0, V_f].
    double entropy_E(const TrafficState& u, double k) const;
    double entropy_Q(const TrafficState& u, double k) const;

    /// Sup of |lambda| over the state space, i.e. max{V_max, R_max p'(R_max)}.
    double max_speed() const;
    /// Bound on the coordinate norm max{|W_max|, |W_min|} + V_max.
    double linf_bound() const;

private:
    friend ModelLaws validate_laws(Law, Law, double, double, double);
    Law vf_, p_;
    double R_f1_ = 0, R_f2_ = 0, V_c_ = 0;
    double V_max_ = 0, V_f_ = 0, W_max_ = 0, W_c_ = 0, W_min_ = 0, R_max_ = 0, R_c_ = 0;
    double p_hi_ = 0;  // bracket top for p_inv
};

/// Checks (H1)(H2)(H3) by sampling and derives all constants.
ModelLaws validate_laws(Law vf, Law p, double R_f1, double R_f2, double V_c);

/// Density rho > 0 where v_f(rho) + p(rho) = w on the increasing branch below rho_hi.
double density_for_marker(const Law& vf, const Law& p, double w, double rho_hi);

/// Parametric description of laws, as read from configuration.
struct LawSpec {
    std::string family = "linear";  ///< linear | constant | custom
    double V_max = 0.05;
    double R = 1.0;
    double gamma = 2.0;
    double v_ref = 2.0;
    double rho_max = 1.0;
    std::vector<double> vf_coeffs;  ///< custom family
    std::vector<double> p_coeffs;   ///< custom family
    double R_f1 = -1, R_f2 = -1;    ///< negative: derive from W_c / W_max
    double W_c = -1, W_max = -1;
    double V_c = 0.02;
};

ModelLaws build_laws(const LawSpec& spec);

}  // namespace wft
