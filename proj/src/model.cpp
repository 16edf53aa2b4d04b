#include "wft/model.hpp"

#include <algorithm>
#include <cmath>

#include "wft/errors.hpp"
#include "wft/numerics.hpp"

namespace wft {

namespace {
constexpr int kSamples = 2048;
constexpr double kFlat = 1e-13;

template <class F>
void sample(double a, double b, F&& check) {
    for (int i = 0; i <= kSamples; ++i) {
        double r = (i == kSamples) ? b : a + (b - a) * i / kSamples;
        check(r);
    }
}
}  // namespace

const char* to_string(Phase p) { return p == Phase::Free ? "free" : "congested"; }

namespace laws {

Law linear_velocity(double vmax, double R) {
    return {[=](double r) { return vmax * (1.0 - r / R); }, [=](double) { return -vmax / R; },
            [](double) { return 0.0; }};
}

Law constant_velocity(double vmax) {
    return {[=](double) { return vmax; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Law power_pressure(double gamma, double vref, double rho_max) {
    if (gamma == 0.0) {
        return {[=](double r) { return vref * std::log(r / rho_max); }, [=](double r) { return vref / r; },
                [=](double r) { return -vref / (r * r); }};
    }
    return {[=](double r) { return vref / gamma * std::pow(r / rho_max, gamma); },
            [=](double r) { return vref / rho_max * std::pow(r / rho_max, gamma - 1.0); },
            [=](double r) { return vref * (gamma - 1.0) / (rho_max * rho_max) * std::pow(r / rho_max, gamma - 2.0); }};
}

Law polynomial(std::vector<double> c) {
    auto eval = [](const std::vector<double>& a, double r) {
        double s = 0.0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * r + *it;
        return s;
    };
    std::vector<double> d1, d2;
    for (std::size_t i = 1; i < c.size(); ++i) d1.push_back(c[i] * static_cast<double>(i));
    for (std::size_t i = 1; i < d1.size(); ++i) d2.push_back(d1[i] * static_cast<double>(i));
    return {[=](double r) { return eval(c, r); }, [=](double r) { return eval(d1, r); },
            [=](double r) { return eval(d2, r); }};
}

}  // namespace laws

double ModelLaws::p_inv(double w) const {
    double lo = R_f1_;
    double plo = p_(lo);
    if (w < plo) {
        if (w < plo - 1e-12 * (1.0 + std::abs(plo))) throw OutOfDomain("p^-1 argument below p(R_f')");
        return lo;
    }
    if (w == W_max_) return R_max_;
    double hi = p_hi_;
    while (p_(hi) < w) hi *= 2.0;
    return num::bisect([this](double r) { return p_(r); }, lo, hi, w);
}

double ModelLaws::vf_inv(double v) const {
    if (v >= V_max_) return 0.0;
    if (v <= V_f_) return R_f2_;
    return num::bisect([this](double r) { return vf_(r); }, 0.0, R_f2_, v);
}

TrafficState ModelLaws::free_state(double rho) const {
    if (rho < 0.0 || rho > R_f2_) throw OutOfDomain("free density outside [0, R_f'']");
    if (rho == 0.0) return vacuum();
    if (rho == R_f2_) return {rho, V_f_, Phase::Free};
    return {rho, vf_(rho), Phase::Free};
}

TrafficState ModelLaws::congested_state(double rho, double v) const {
    TrafficState u{rho, v, Phase::Congested};
    if (!contains(u)) throw OutOfDomain("congested state outside its domain");
    return u;
}

bool ModelLaws::contains(const TrafficState& u, double tol) const {
    if (!(u.rho >= 0.0) || !(u.v >= -tol)) return false;
    if (u.phase == Phase::Free) {
        if (u.rho > R_f2_ + tol) return false;
        return std::abs(u.v - vf_(std::min(u.rho, R_f2_))) <= tol;
    }
    if (u.v > V_c_ + tol || u.rho < R_f1_) return false;
    double w = u.v + p_(u.rho);
    return w >= W_c_ - tol && w <= W_max_ + tol;
}

RiemannCoords ModelLaws::to_coords(const TrafficState& u) const {
    if (u.phase == Phase::Congested) return {u.v, u.v + p_(u.rho)};
    if (u.rho == 0.0) return {V_f_, W_min_};
    if (u.rho == R_f1_) return {V_f_, W_c_};
    if (u.rho == R_f2_) return {V_f_, W_max_};
    if (u.rho > R_f1_) return {V_f_, vf_(u.rho) + p_(u.rho)};
    return {V_f_, W_c_ + vf_(R_f1_) - vf_(u.rho)};
}

TrafficState ModelLaws::from_coords(const RiemannCoords& c, Phase phase) const {
    if (phase == Phase::Congested) {
        if (c.w1 < -1e-12 || c.w1 > V_c_ + 1e-12 || c.w2 < W_c_ - 1e-12 || c.w2 > W_max_ + 1e-12)
            throw OutOfDomain("congested coordinates outside [0,V_c]x[W_c,W_max]");
        return {p_inv(c.w2 - c.w1), c.w1, Phase::Congested};
    }
    if (c.w2 < W_min_ - 1e-12 || c.w2 > W_max_ + 1e-12) throw OutOfDomain("free w2 outside [W_min,W_max]");
    if (c.w2 >= W_c_) return free_state(rho_f(std::min(c.w2, W_max_)));
    if (c.w2 <= W_min_) return vacuum();
    double r = vf_inv(W_c_ + vf_(R_f1_) - c.w2);
    return free_state(std::min(r, R_f1_));
}

double ModelLaws::norm(const TrafficState& u) const {
    auto c = to_coords(u);
    return std::abs(c.w1) + std::abs(c.w2);
}

double ModelLaws::dist(const TrafficState& a, const TrafficState& b) const {
    auto ca = to_coords(a), cb = to_coords(b);
    return std::abs(ca.w1 - cb.w1) + std::abs(ca.w2 - cb.w2);
}

double ModelLaws::rho_f(double w) const {
    double tol = 1e-12 * (1.0 + std::abs(W_max_));
    if (w < W_c_ - tol || w > W_max_ + tol) throw OutOfDomain("rho_f argument outside [W_c, W_max]");
    if (w <= W_c_) return R_f1_;
    if (w >= W_max_) return R_f2_;
    return num::bisect([this](double r) { return vf_(r) + p_(r); }, R_f1_, R_f2_, w);
}

double ModelLaws::lambda_f(double rho) const { return vf_(rho) + rho * vf_.df(rho); }

Characteristics ModelLaws::characteristics(const TrafficState& u) const {
    if (u.phase == Phase::Free) {
        double l = lambda_f(u.rho);
        return {l, l};
    }
    return {u.v - u.rho * p_.df(u.rho), u.v};
}

double ModelLaws::marker_W(const TrafficState& u) const { return std::max(to_coords(u).w2, W_c_); }

double ModelLaws::R_k(double w, double k) const {
    double tol = 1e-12 * (1.0 + std::abs(W_max_));
    if (w < W_c_ - tol || w > W_max_ + tol) throw OutOfDomain("R_k marker outside [W_c, W_max]");
    if (k < -tol || k > V_f_ + tol) throw OutOfDomain("R_k constant outside [0, V_f]");
    w = std::clamp(w, W_c_, W_max_);
    if (k <= V_c_) return p_inv(w - k);
    double ra = p_inv(w - V_f_), rb = p_inv(w - V_c_);
    double s = (rb * V_c_ - ra * V_f_) / (rb - ra);
    return (V_f_ - s) / (k - s) * ra;
}

double ModelLaws::entropy_E(const TrafficState& u, double k) const {
    if (u.v <= k) return 0.0;
    return 1.0 - u.rho / R_k(marker_W(u), k);
}

double ModelLaws::entropy_Q(const TrafficState& u, double k) const {
    if (u.v <= k) return 0.0;
    return k - u.rho * u.v / R_k(marker_W(u), k);
}

double ModelLaws::max_speed() const { return std::max(V_max_, R_max_ * p_.df(R_max_)); }

double ModelLaws::linf_bound() const { return std::max(std::abs(W_max_), std::abs(W_min_)) + V_max_; }

ModelLaws validate_laws(Law vf, Law p, double R_f1, double R_f2, double V_c) {
    if (!(R_f1 > 0.0) || !(R_f2 > R_f1)) throw OrderingViolation("need R_f'' > R_f' > 0");
    ModelLaws m;
    m.vf_ = std::move(vf);
    m.p_ = std::move(p);
    m.R_f1_ = R_f1;
    m.R_f2_ = R_f2;
    m.V_c_ = V_c;
    const Law& v = m.vf_;
    const Law& P = m.p_;

    if (!(v(R_f2) > 0.0)) throw HypothesisViolation("H1: v_f(R_f'') > 0", R_f2);
    sample(0.0, R_f2, [&](double r) {
        if (!(v.df(r) <= kFlat)) throw HypothesisViolation("H1: v_f' <= 0", r);
        if (!(v(r) + r * v.df(r) > 0.0)) throw HypothesisViolation("H1: v_f + rho v_f' > 0", r);
        if (!(2.0 * v.df(r) + r * v.d2f(r) <= kFlat)) throw HypothesisViolation("H1: 2 v_f' + rho v_f'' <= 0", r);
    });

    m.V_max_ = v(0.0);
    m.V_f_ = v(R_f2);
    m.W_c_ = P(R_f1) + v(R_f1);
    m.W_max_ = P(R_f2) + m.V_f_;
    m.W_min_ = m.W_c_ + v(R_f1) - m.V_max_;

    // bracket for p^-1 up to W_max, then R_max and R_c
    double hi = 2.0 * R_f2;
    for (int i = 0; i < 200 && P(hi) < m.W_max_; ++i) hi *= 2.0;
    if (!(P(hi) >= m.W_max_)) throw HypothesisViolation("H2: p unbounded below W_max", hi);
    m.p_hi_ = hi;
    sample(R_f1, hi, [&](double r) {
        if (!(P.df(r) > 0.0)) throw HypothesisViolation("H2: p' > 0", r);
    });
    m.R_max_ = num::bisect([&](double r) { return P(r); }, R_f1, hi, m.W_max_);
    m.R_c_ = num::bisect([&](double r) { return P(r); }, R_f1, hi, m.W_c_);
    sample(R_f1, m.R_max_, [&](double r) {
        if (!(P.df(r) > 0.0)) throw HypothesisViolation("H2: p' > 0", r);
        if (!(2.0 * P.df(r) + r * P.d2f(r) > 0.0)) throw HypothesisViolation("H2: 2p' + rho p'' > 0", r);
    });
    sample(R_f1, R_f2, [&](double r) {
        if (!(v.df(r) + P.df(r) > 0.0)) throw HypothesisViolation("H3: v_f + p increasing", r);
        if (!(v(r) < r * P.df(r))) throw HypothesisViolation("H3: v_f < rho p'", r);
    });

    if (!(V_c > 0.0) || !(V_c < m.V_f_)) throw OrderingViolation("need 0 < V_c < V_f");
    if (!(m.R_max_ > R_f2) || !(m.R_c_ > R_f1)) throw OrderingViolation("need R_max > R_f'' and R_c > R_f'");
    if (!(m.W_max_ > m.W_c_) || !(m.W_c_ >= m.W_min_)) throw OrderingViolation("need W_max > W_c >= W_min");
    return m;
}

double density_for_marker(const Law& vf, const Law& p, double w, double rho_hi) {
    auto g = [&](double r) { return vf(r) + p(r); };
    constexpr int N = 4096;
    double prev = rho_hi;
    if (g(prev) < w) throw ConfigError("marker value above v_f + p at the density bound");
    for (int i = N - 1; i >= 1; --i) {
        double r = rho_hi * i / N;
        double gr = g(r);
        if (gr < w) return num::bisect(g, r, prev, w);
        prev = r;
    }
    throw ConfigError("no density realises the requested marker value");
}

ModelLaws build_laws(const LawSpec& s) {
    Law vf, p;
    double rho_hi = 100.0;
    if (s.family == "linear") {
        vf = laws::linear_velocity(s.V_max, s.R);
        rho_hi = 0.5 * s.R;
        p = laws::power_pressure(s.gamma, s.v_ref, s.rho_max);
    } else if (s.family == "constant") {
        vf = laws::constant_velocity(s.V_max);
        p = laws::power_pressure(s.gamma, s.v_ref, s.rho_max);
    } else if (s.family == "custom") {
        if (s.vf_coeffs.empty() || s.p_coeffs.empty()) throw ConfigError("custom family needs vf_coeffs and p_coeffs");
        vf = laws::polynomial(s.vf_coeffs);
        p = laws::polynomial(s.p_coeffs);
    } else {
        throw ConfigError("unknown law family '" + s.family + "'");
    }
    double r1 = s.R_f1, r2 = s.R_f2;
    if (r1 <= 0.0) {
        if (s.W_c <= 0.0) throw ConfigError("need R_f_prime or W_c");
        r1 = density_for_marker(vf, p, s.W_c, rho_hi);
    }
    if (r2 <= 0.0) {
        if (s.W_max <= 0.0) throw ConfigError("need R_f_second or W_max");
        r2 = density_for_marker(vf, p, s.W_max, rho_hi);
    }
    return validate_laws(std::move(vf), std::move(p), r1, r2, s.V_c);
}

}  // namespace wft
