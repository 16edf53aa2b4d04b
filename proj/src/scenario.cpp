#include "wft/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "wft/errors.hpp"
#include "wft/numerics.hpp"

namespace wft {

LawSpec traffic_light_laws(const TrafficLightConfig& cfg) {
    LawSpec s;
    s.family = "linear";
    s.V_max = cfg.V_max;
    s.R = 1.0;
    s.gamma = cfg.gamma;
    s.v_ref = cfg.gamma;
    s.rho_max = 1.0;
    s.W_c = cfg.W_c;
    s.W_max = cfg.W_max;
    s.V_c = cfg.V_c;
    return s;
}

Scenario build_scenario(const TrafficLightConfig& cfg) {
    if (!(cfg.x1 < cfg.x2) || !(cfg.x2 < 0.0)) throw ConfigError("need x1 < x2 < 0");
    if (!(cfg.gamma > 0.0)) throw ConfigError("need gamma > 0");
    Scenario sc{build_laws(traffic_light_laws(cfg)), {}};
    const ModelLaws& m = sc.laws;
    sc.datum.breaks = {cfg.x1, cfg.x2, 0.0};
    sc.datum.values = {m.vacuum(), {m.R_c(), 0.0, Phase::Congested}, {m.R_max(), 0.0, Phase::Congested}, m.vacuum()};
    return sc;
}

PiecewiseDatum random_datum(const ModelLaws& m, std::mt19937_64& rng, int max_jumps, double a, double b) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> J(1, std::max(1, max_jumps));
    int n = J(rng);
    PiecewiseDatum d;
    for (int i = 0; i < n; ++i) d.breaks.push_back(a + (b - a) * U(rng));
    std::sort(d.breaks.begin(), d.breaks.end());
    d.breaks.erase(std::unique(d.breaks.begin(), d.breaks.end()), d.breaks.end());
    for (std::size_t i = 0; i <= d.breaks.size(); ++i) {
        double r = U(rng);
        if (r < 0.1) {
            d.values.push_back(m.vacuum());
        } else if (r < 0.45) {
            d.values.push_back(m.free_state(m.R_f2() * U(rng)));
        } else {
            double v = m.V_c() * U(rng);
            double w = m.W_c() + (m.W_max() - m.W_c()) * U(rng);
            if (r > 0.95) v = m.V_c();
            d.values.push_back(m.congested_state(m.p_inv(w - v), v));
        }
    }
    return d;
}

double ExactReference::Path::operator()(double s) const {
    if (s <= t.front()) return x.front();
    if (s >= t.back()) return x.back();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), s) - t.begin()) - 1;
    double h = t[i + 1] - t[i], u = (s - t[i]) / h;
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * x[i] + h10 * h * dx[i] + h01 * x[i + 1] + h11 * h * dx[i + 1];
}

template <class F, class S>
ExactReference::Path ExactReference::integrate(F&& f, double ta, double xa, S&& stop, int steps) const {
    auto rk = [&](double t, double x, double h) {
        double k1 = f(t, x);
        double k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
        double k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
        double k4 = f(t + h, x + h * k3);
        return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    auto march = [&](double h, Path* out) {
        double t = ta, x = xa;
        auto keep = [&](double s, double y) {
            if (!out) return;
            out->t.push_back(s);
            out->x.push_back(y);
            out->dx.push_back(f(s, y));
        };
        keep(t, x);
        for (long i = 0; i < 10'000'000; ++i) {
            double xn = rk(t, x, h);
            if (stop(t + h, xn) >= 0.0) {
                double lo = 0.0, hi = h;
                while (true) {
                    double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    if (stop(t + mid, rk(t, x, mid)) >= 0.0) hi = mid;
                    else lo = mid;
                }
                keep(t + hi, rk(t, x, hi));
                return t + hi;
            }
            t += h;
            x = xn;
            keep(t, x);
        }
        throw InvariantViolation("curved path never reached its end point");
    };
    double tb = march(std::max(ta, 1.0) / 64.0, nullptr);
    Path p;
    march((tb - ta) / steps, &p);
    return p;
}

double ExactReference::lambda1(double rho, double v) const { return v - rho * laws_.p().df(rho); }

TrafficState ExactReference::fan_left(double xi) const {
    const ModelLaws& m = laws_;
    if (xi <= lam_l_) return {m.R_max(), 0.0, Phase::Congested};
    if (xi >= lam_r_) return {rho_mv_, m.V_c(), Phase::Congested};
    const Law& p = m.p();
    double rho = num::bisect([&](double r) { return p(r) + r * p.df(r); }, rho_mv_, m.R_max(), m.W_max() - xi);
    return {rho, m.W_max() - p(rho), Phase::Congested};
}

double ExactReference::contact_path(double t) const { return c2_(t); }
double ExactReference::transition_path(double t) const { return pt1_(t); }

TrafficState ExactReference::fan_secondary(double t, double x) const {
    const ModelLaws& m = laws_;
    double ta = table_.a2.t, tb = std::min(table_.b2.t, t);
    auto ray = [&](double t0) {
        double xc = c2_(t0);
        double v0 = fan_left(xc / t0).v;
        return xc + (t - t0) * lambda1(m.p_inv(m.W_c() - v0), v0);
    };
    double t0 = tb > ta ? num::bisect(ray, ta, tb, x) : ta;
    double v0 = fan_left(c2_(t0) / t0).v;
    return {m.p_inv(m.W_c() - v0), v0, Phase::Congested};
}

ExactReference::ExactReference(const TrafficLightConfig& cfg, int ode_steps)
    : cfg_(cfg), laws_(build_scenario(cfg).laws) {
    const ModelLaws& m = laws_;
    const double Rm = m.R_max(), Rc = m.R_c(), Rf1 = m.R_f1(), Rf2 = m.R_f2(), Vf = m.V_f(), Vc = m.V_c();
    v1_ = m.vf()(Rf1);
    rho_mv_ = m.p_inv(m.W_max() - Vc);
    rho_cv_ = m.p_inv(m.W_c() - Vc);
    lam_l_ = lambda1(Rm, 0.0);
    lam_r_ = lambda1(rho_mv_, Vc);
    lam_c_ = lambda1(Rc, 0.0);
    lam_cv_ = lambda1(rho_cv_, Vc);
    TrafficState f1 = m.free_state(Rf1), f2 = m.free_state(Rf2);
    sig_a_ = sigma({rho_mv_, Vc, Phase::Congested}, f2);
    sig_s2_ = sigma(f1, f2);
    sig_pt2_ = sigma({rho_cv_, Vc, Phase::Congested}, f1);

    ExactEventTable& T = table_;
    const double x1 = cfg.x1, x2 = cfg.x2, ax2 = std::abs(x2);
    T.a2 = {x2 / lam_l_, x2};
    c2_ = integrate([this](double t, double x) { return fan_left(x / t).v; }, T.a2.t, x2,
                    [this](double t, double x) { return x - t * lam_r_; }, ode_steps);
    T.b2 = {c2_.t.back(), c2_.x.back()};

    T.t_star = Rm * ax2 / (Rf2 * Vf);
    T.c2.t = Rm * ax2 / (Rf2 * (Vf - sig_a_));
    T.c2.x = sig_a_ * T.c2.t;
    T.c2_geometric.t = (T.b2.x - Vc * T.b2.t) / (sig_a_ - Vc);
    T.c2_geometric.x = sig_a_ * T.c2_geometric.t;
    T.t_d2 = T.c2.t - T.c2.x / sig_s2_;
    T.t_d1 = ((x2 - x1) * Rc - x2 * Rm) / (Rf1 * v1_) +
             (1.0 - sig_a_ / sig_s2_) * (1.0 - Rf2 * Vf / (Rf1 * v1_)) * Rm * ax2 / (Rf2 * (Vf - sig_a_));

    T.a1 = {T.a2.t + (x1 - x2) / lam_c_, x1};
    const EventPoint b2 = T.b2;
    pt1_ = integrate([this](double t, double x) { return fan_secondary(t, x).v; }, T.a1.t, x1,
                     [this, b2](double t, double x) { return x - (b2.x + (t - b2.t) * lam_cv_); }, ode_steps);
    T.b1 = {pt1_.t.back(), pt1_.x.back()};
    T.c1.t = (T.c2.x - T.b1.x + Vc * T.b1.t - sig_pt2_ * T.c2.t) / (Vc - sig_pt2_);
    T.c1.x = T.b1.x + Vc * (T.c1.t - T.b1.t);

    T.merge.t = (T.c2.x - T.c1.x + v1_ * T.c1.t - sig_s2_ * T.c2.t) / (v1_ - sig_s2_);
    T.merge.x = T.c1.x + v1_ * (T.merge.t - T.c1.t);
    T.shocks_meet_upstream = T.merge.x < 0.0;
    T.t_last = T.shocks_meet_upstream ? T.merge.t - T.merge.x / Vf : T.c1.t - T.c1.x / v1_;
    window_ = std::max(T.t_d1, T.t_last);
}

ExactEventTable closed_form_table(const TrafficLightConfig& cfg, bool check, int ode_steps) {
    ExactReference ex(cfg, ode_steps);
    if (check && ex.table().shocks_meet_upstream)
        throw StructuralAssumptionViolated("the trailing shock catches the leading one at x = " +
                                           std::to_string(ex.table().merge.x));
    return ex.table();
}

double ExactReference::tail(double t) const {
    const auto& T = table_;
    if (t <= T.a1.t) return cfg_.x1;
    if (t <= T.b1.t) return pt1_(t);
    if (t <= T.c1.t) return T.b1.x + laws_.V_c() * (t - T.b1.t);
    if (t <= T.merge.t) return T.c1.x + v1_ * (t - T.c1.t);
    return T.merge.x + laws_.V_f() * (t - T.merge.t);
}

std::vector<double> ExactReference::jumps(double t) const {
    const auto& T = table_;
    const ModelLaws& m = laws_;
    std::vector<double> j{tail(t)};
    if (t <= 0.0) return {cfg_.x1, cfg_.x2, 0.0};
    if (t < T.c2.t) {
        j.push_back(t <= T.a2.t ? cfg_.x2 : t <= T.b2.t ? c2_(t) : T.b2.x + m.V_c() * (t - T.b2.t));
        j.push_back(sig_a_ * t);
    } else if (t < T.c1.t) {
        j.push_back(T.c2.x + sig_pt2_ * (t - T.c2.t));
    }
    if (t >= T.c2.t && t < T.merge.t) j.push_back(T.c2.x + sig_s2_ * (t - T.c2.t));
    for (double xi : {lam_l_, lam_r_, m.lambda_f(m.R_f2()), m.lambda_f(0.0)}) j.push_back(xi * t);
    if (t > T.a2.t) j.push_back(cfg_.x2 + lam_c_ * (t - T.a2.t));
    if (t > T.b2.t) j.push_back(T.b2.x + lam_cv_ * (t - T.b2.t));
    std::sort(j.begin(), j.end());
    return j;
}

TrafficState ExactReference::operator()(double t, double x) const {
    if (t < 0.0 || t > window_) throw OutOfWindow("time outside the exact construction");
    const auto& T = table_;
    const ModelLaws& m = laws_;
    const TrafficState vac = m.vacuum();
    if (t == 0.0) {
        if (x < cfg_.x1 || x >= 0.0) return vac;
        return {x < cfg_.x2 ? m.R_c() : m.R_max(), 0.0, Phase::Congested};
    }
    if (x < tail(t)) return vac;

    double B = t <= T.c2.t ? sig_a_ * t : T.c2.x + sig_pt2_ * (t - T.c2.t);
    if (t >= T.c1.t || x >= B) {
        if (t > T.c2.t && t < T.merge.t && x < T.c2.x + sig_s2_ * (t - T.c2.t)) return m.free_state(m.R_f1());
        double xi = x / t;
        if (xi < m.lambda_f(m.R_f2())) return m.free_state(m.R_f2());
        if (xi >= m.lambda_f(0.0)) return vac;
        return m.free_state(num::bisect([&](double r) { return m.lambda_f(r); }, 0.0, m.R_f2(), xi));
    }

    double C = t <= T.a2.t   ? cfg_.x2
               : t <= T.b2.t ? c2_(t)
               : t <= T.c2.t ? T.b2.x + m.V_c() * (t - T.b2.t)
                             : std::numeric_limits<double>::infinity();
    if (x >= C) return fan_left(x / t);
    if (t <= T.a2.t || x < cfg_.x2 + lam_c_ * (t - T.a2.t)) return {m.R_c(), 0.0, Phase::Congested};
    if (t > T.b2.t && x >= T.b2.x + lam_cv_ * (t - T.b2.t)) return {rho_cv_, m.V_c(), Phase::Congested};
    return fan_secondary(t, x);
}

std::vector<TrafficState> ExactReference::profile(double t, const std::vector<double>& xs) const {
    std::vector<TrafficState> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back((*this)(t, x));
    return out;
}

std::vector<TrafficState> exact_reference(const TrafficLightConfig& cfg, double t, const std::vector<double>& xs) {
    return ExactReference(cfg).profile(t, xs);
}

double last_passage_time(const RunHistory& h, double x) {
    const GridMesh& g = *h.mesh;
    double best = -std::numeric_limits<double>::infinity();
    for (const Front& f : h.segments) {
        if (g.state(f.left).rho != 0.0 || !(f.speed > 0.0)) continue;
        double tc = f.t0 + (x - f.x0) / f.speed;
        if (tc >= f.t0 && tc <= f.t_end) best = std::max(best, tc);
    }
    if (!std::isfinite(best)) throw NotReached("no vacuum-led front crossed the probe point");
    return best;
}

double l1_error(const RunHistory& h, const ExactReference& ex, double t, double a, double b) {
    static const num::GaussLegendre<8> gl;
    const GridMesh& g = *h.mesh;
    const ModelLaws& m = g.laws();
    Snapshot s = snapshot(h, t);
    std::vector<double> pts{a, b};
    for (double x : s.x)
        if (x > a && x < b) pts.push_back(x);
    for (double x : ex.jumps(t))
        if (x > a && x < b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i + 1] > pts[i])) continue;
        const TrafficState& u = g.state(evaluate_id(s, 0.5 * (pts[i] + pts[i + 1])));
        sum += gl.integrate([&](double x) { return m.dist(u, ex(t, x)); }, pts[i], pts[i + 1]);
    }
    return sum;
}

}  // namespace wft
