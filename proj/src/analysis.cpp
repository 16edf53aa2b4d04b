#include "wft/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wft/errors.hpp"
#include "wft/numerics.hpp"

namespace wft {

RhResidual rh_residual(const ModelLaws& m, const TrafficState& l, const TrafficState& r, double speed) {
    RhResidual res;
    res.mass = speed * (r.rho - l.rho) - (r.rho * r.v - l.rho * l.v);
    double Wl = m.marker_W(l), Wr = m.marker_W(r);
    res.momentum = speed * (r.rho * Wr - l.rho * Wl) - (r.rho * r.v * Wr - l.rho * l.v * Wl);
    res.momentum_applicable =
        m.constant_free_speed() || (l.phase == Phase::Congested && r.phase == Phase::Congested);
    return res;
}

RhResidual rh_residual(const GridMesh& g, const Front& f) {
    return rh_residual(g.laws(), g.state(f.left), g.state(f.right), f.speed);
}

TransitionClass classify_transition(const ModelLaws& m, const TrafficState& um, const TrafficState& up, double tol) {
    if (um.phase == up.phase) throw SamePhase();
    TransitionClass c;
    double w2m = m.to_coords(um).w2, w2p = m.to_coords(up).w2;
    auto low = [&](const TrafficState& u) { return u.phase == Phase::Free && u.rho < m.R_f1(); };
    auto high = [&](const TrafficState& u) { return u.phase == Phase::Free && u.rho >= m.R_f1(); };
    auto g1 = [&](const TrafficState& a, const TrafficState& b, double wb) {
        return low(a) && b.phase == Phase::Congested && std::abs((wb - m.W_c()) * a.rho) <= tol;
    };
    auto g2 = [&](const TrafficState& a, const TrafficState& b, double wa, double wb) {
        return high(a) && b.phase == Phase::Congested && std::abs(wa - wb) <= tol;
    };
    c.G1 = g1(um, up, w2p);
    c.G2 = g2(um, up, w2m, w2p);
    c.G1T = g1(up, um, w2m);
    c.G2T = g2(up, um, w2p, w2m);
    c.G3 = um.phase == Phase::Congested && high(up) && std::abs(w2m - w2p) <= tol && std::abs(um.v - m.V_c()) <= tol;
    c.entropic = c.G1 || c.G2 || c.G3;
    c.weak = std::abs(um.rho * up.rho * (m.marker_W(um) - m.marker_W(up))) <= tol;
    return c;
}

double entropy_production(const ModelLaws& m, const TrafficState& l, const TrafficState& r, double speed, double k) {
    return speed * (m.entropy_E(r, k) - m.entropy_E(l, k)) - (m.entropy_Q(r, k) - m.entropy_Q(l, k));
}

double c_model(const ModelLaws& m) {
    const Law& p = m.p();
    double a = m.p_inv(m.W_c() - m.V_c()), b = m.R_max();
    double best = -std::numeric_limits<double>::infinity();
    const int n = 4096;
    for (int i = 0; i <= n; ++i) {
        double r = a + (b - a) * i / n;
        best = std::max(best, 2.0 + r * p.d2f(r) / p.df(r));
    }
    return best;
}

std::vector<double> default_k_grid(const GridMesh& g) {
    const ModelLaws& m = g.laws();
    std::vector<double> k;
    int n = 2 * g.nv();
    for (int i = 0; i < n; ++i) k.push_back(0.5 * g.eps_v() * i);
    k.push_back(m.V_c());
    k.push_back(0.5 * (m.V_c() + m.V_f()));
    k.push_back(m.V_f());
    return k;
}

EntropyReport entropy_report(const RunHistory& h, std::vector<double> k_grid, bool keep_records) {
    const GridMesh& g = *h.mesh;
    const ModelLaws& m = g.laws();
    EntropyReport rep;
    rep.k_grid = k_grid.empty() ? default_k_grid(g) : std::move(k_grid);
    rep.c_model = c_model(m);
    rep.eps_v = g.eps_v();
    const auto& K = rep.k_grid;
    rep.min_per_k.assign(K.size(), std::numeric_limits<double>::infinity());
    rep.min_admissible = std::numeric_limits<double>::infinity();

    std::unordered_map<NodeId, std::vector<std::pair<double, double>>> eq;
    auto pair_at = [&](NodeId id) -> const std::vector<std::pair<double, double>>& {
        auto it = eq.find(id);
        if (it != eq.end()) return it->second;
        std::vector<std::pair<double, double>> row;
        row.reserve(K.size());
        for (double k : K) row.emplace_back(m.entropy_E(g.state(id), k), m.entropy_Q(g.state(id), k));
        return eq.emplace(id, std::move(row)).first->second;
    };

    for (std::size_t s = 0; s < h.segments.size(); ++s) {
        const Front& f = h.segments[s];
        const auto& El = pair_at(f.left);
        const auto& Er = pair_at(f.right);
        double dur = f.t_end - f.t0;
        bool step = f.kind == WaveKind::RarefactionStep;
        if (step) rep.rarefaction_strength += m.dist(g.state(f.left), g.state(f.right)) * dur;
        for (std::size_t i = 0; i < K.size(); ++i) {
            double y = f.speed * (Er[i].first - El[i].first) - (Er[i].second - El[i].second);
            if (keep_records) rep.records.push_back({s, K[i], y});
            if (step) {
                rep.negative_total += std::min(y, 0.0) * dur;
                rep.positive_total += std::max(y, 0.0) * dur;
            } else {
                rep.min_per_k[i] = std::min(rep.min_per_k[i], y);
                rep.min_admissible = std::min(rep.min_admissible, y);
            }
        }
    }
    return rep;
}

double Bump::b(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double Bump::db(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return b(s) * (-2.0 * s / (q * q));
}

double Bump::operator()(double t, double x) const { return b((t - t0) / rt) * b((x - x0) / rx); }
double Bump::dt(double t, double x) const { return db((t - t0) / rt) / rt * b((x - x0) / rx); }
double Bump::dx(double t, double x) const { return b((t - t0) / rt) * db((x - x0) / rx) / rx; }

WeakResidual weak_residual(const RunHistory& h, const Bump& phi) {
    if (!(phi.rt > 0.0) || !(phi.rx > 0.0)) throw UnsupportedTestFunction("bump radii must be positive");
    if (phi.t0 - phi.rt <= 0.0 || phi.t0 + phi.rt > h.t_end)
        throw UnsupportedTestFunction("test function support leaves the run window");
    const GridMesh& g = *h.mesh;
    const ModelLaws& m = g.laws();
    const auto& gl = num::gl32();
    WeakResidual res;
    for (const Front& f : h.segments) {
        double a = std::max(f.t0, phi.t0 - phi.rt), b = std::min(f.t_end, phi.t0 + phi.rt);
        if (!(b > a)) continue;
        // restrict to the times the front lies inside the spatial support
        double xl = phi.x0 - phi.rx, xr = phi.x0 + phi.rx;
        if (f.speed == 0.0) {
            if (f.x0 <= xl || f.x0 >= xr) continue;
        } else {
            double ta = f.t0 + (xl - f.x0) / f.speed, tb = f.t0 + (xr - f.x0) / f.speed;
            if (ta > tb) std::swap(ta, tb);
            a = std::max(a, ta);
            b = std::min(b, tb);
            if (!(b > a)) continue;
        }
        const TrafficState& l = g.state(f.left);
        const TrafficState& r = g.state(f.right);
        auto rh = rh_residual(m, l, r, f.speed);
        double I = gl.integrate([&](double t) { return phi(t, f.x(t)); }, a, b);
        res.mass += rh.mass * I;
        res.momentum += rh.momentum * I;
    }
    return res;
}

}  // namespace wft
