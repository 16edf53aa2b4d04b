#include "wft/riemann.hpp"

#include <algorithm>
#include <cmath>

#include "wft/errors.hpp"
#include "wft/numerics.hpp"

namespace wft {

namespace {
constexpr double kNull = 1e-12;

Wave jump(WaveKind kind, const TrafficState& l, const TrafficState& r) {
    double s = sigma(l, r);
    return {kind, l, r, s, s, {}};
}

// 1-wave of ARZ from ul to the state with velocity vm on the same w2 curve.
void arz_one_wave(const ModelLaws& m, const TrafficState& ul, const TrafficState& um, WaveFan& fan) {
    if (std::abs(um.v - ul.v) < kNull) return;
    if (um.v < ul.v) {
        fan.waves.push_back(jump(WaveKind::Shock, ul, um));
        return;
    }
    const double w = m.to_coords(ul).w2;
    const ModelLaws* mp = &m;
    Wave r{WaveKind::Rarefaction, ul, um, m.characteristics(ul).lambda1, m.characteristics(um).lambda1, {}};
    double lo = r.speed_lo, hi = r.speed_hi, rm = um.rho, rl = ul.rho;
    r.fan = [mp, w, lo, hi, rm, rl, ul, um](double xi) {
        if (xi <= lo) return ul;
        if (xi >= hi) return um;
        const Law& p = mp->p();
        double rho = num::bisect([&](double q) { return w - p(q) - q * p.df(q); }, rm, rl, xi);
        return TrafficState{rho, w - p(rho), Phase::Congested};
    };
    fan.waves.push_back(std::move(r));
}

void lwr_into(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur, WaveFan& fan) {
    if (ul.rho == ur.rho || m.dist(ul, ur) < kNull) return;
    if (m.constant_free_speed()) {
        fan.waves.push_back(jump(WaveKind::Contact, ul, ur));
        return;
    }
    if (ul.rho < ur.rho) {
        fan.waves.push_back(jump(WaveKind::Shock, ul, ur));
        return;
    }
    double lo = m.lambda_f(ul.rho), hi = m.lambda_f(ur.rho);
    if (hi <= lo) {
        fan.waves.push_back(jump(WaveKind::Contact, ul, ur));
        return;
    }
    const ModelLaws* mp = &m;
    Wave r{WaveKind::Rarefaction, ul, ur, lo, hi, {}};
    r.fan = [mp, lo, hi, ul, ur](double xi) {
        if (xi <= lo) return ul;
        if (xi >= hi) return ur;
        double rho = num::bisect([&](double q) { return mp->lambda_f(q); }, ur.rho, ul.rho, xi);
        return mp->free_state(rho);
    };
    fan.waves.push_back(std::move(r));
}

void arz_into(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur, WaveFan& fan) {
    auto cl = m.to_coords(ul), cr = m.to_coords(ur);
    if (std::abs(cl.w1 - cr.w1) + std::abs(cl.w2 - cr.w2) < kNull) return;
    if (std::abs(cl.w2 - cr.w2) < kNull) {
        arz_one_wave(m, ul, ur, fan);
        return;
    }
    TrafficState um = std::abs(cl.w1 - cr.w1) < kNull ? ul : TrafficState{m.p_inv(cl.w2 - ur.v), ur.v, Phase::Congested};
    arz_one_wave(m, ul, um, fan);
    fan.waves.push_back({WaveKind::Contact, um, ur, ur.v, ur.v, {}});
}
}  // namespace

const char* to_string(WaveKind k) {
    switch (k) {
        case WaveKind::Shock: return "shock";
        case WaveKind::Contact: return "contact";
        case WaveKind::Rarefaction: return "rarefaction";
        case WaveKind::RarefactionStep: return "rarefaction-step";
        case WaveKind::PhaseTransition: return "phase-transition";
    }
    return "?";
}

double sigma(const TrafficState& ul, const TrafficState& ur) {
    if (ul.rho == ur.rho) throw EqualDensities();
    if (ul.v == ur.v) return ul.v;
    return (ur.rho * ur.v - ul.rho * ul.v) / (ur.rho - ul.rho);
}

TrafficState WaveFan::sample(double xi) const {
    TrafficState cur = left;
    for (const auto& w : waves) {
        if (w.kind == WaveKind::Rarefaction) {
            if (xi < w.speed_lo) return cur;
            if (xi <= w.speed_hi) return w.fan(xi);
        } else if (xi < w.speed_lo) {
            return cur;
        }
        cur = w.right;
    }
    return cur;
}

std::vector<double> WaveFan::breakpoints() const {
    std::vector<double> b;
    for (const auto& w : waves) {
        b.push_back(w.speed_lo);
        if (w.speed_hi != w.speed_lo) b.push_back(w.speed_hi);
    }
    return b;
}

WaveFan solve_lwr(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur) {
    WaveFan f{ul, ur, {}};
    lwr_into(m, ul, ur, f);
    return f;
}

WaveFan solve_arz(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur) {
    WaveFan f{ul, ur, {}};
    arz_into(m, ul, ur, f);
    return f;
}

WaveFan solve_coupled(const ModelLaws& m, const TrafficState& ul, const TrafficState& ur) {
    if (ul.phase == Phase::Free && ur.phase == Phase::Free) return solve_lwr(m, ul, ur);
    if (ul.phase == Phase::Congested && ur.phase == Phase::Congested) return solve_arz(m, ul, ur);
    WaveFan f{ul, ur, {}};
    if (ul.phase == Phase::Free) {
        if (ul.rho == 0.0) {
            f.waves.push_back(jump(WaveKind::PhaseTransition, ul, ur));
            return f;
        }
        double wm = std::max(m.W_c(), m.to_coords(ul).w2);
        double wr = m.to_coords(ur).w2;
        TrafficState um = std::abs(wm - wr) < kNull ? ur : TrafficState{m.p_inv(wm - ur.v), ur.v, Phase::Congested};
        f.waves.push_back(jump(WaveKind::PhaseTransition, ul, um));
        if (std::abs(wm - wr) >= kNull) f.waves.push_back({WaveKind::Contact, um, ur, ur.v, ur.v, {}});
        return f;
    }
    double wl = m.to_coords(ul).w2;
    TrafficState um1 = std::abs(ul.v - m.V_c()) < kNull ? ul
                                                         : TrafficState{m.p_inv(wl - m.V_c()), m.V_c(), Phase::Congested};
    TrafficState um2 = m.free_state(m.rho_f(wl));
    if (m.dist(um2, ur) < kNull) um2 = ur;
    arz_one_wave(m, ul, um1, f);
    f.waves.push_back(jump(WaveKind::PhaseTransition, um1, um2));
    lwr_into(m, um2, ur, f);
    return f;
}

bool same_state(const ModelLaws& m, const TrafficState& a, const TrafficState& b, double tol) {
    return a.phase == b.phase && std::abs(a.rho - b.rho) <= tol && m.dist(a, b) <= tol;
}

ConsistencyResult check_consistency(const ModelLaws& m, const TrafficState& ul, const TrafficState& um,
                                    const TrafficState& ur, double xbar, int resolution) {
    ConsistencyResult res;
    WaveFan flr = solve_coupled(m, ul, ur), flm = solve_coupled(m, ul, um), fmr = solve_coupled(m, um, ur);

    std::vector<double> bps;
    for (const WaveFan* f : {&flr, &flm, &fmr})
        for (double b : f->breakpoints()) bps.push_back(b);
    bps.push_back(xbar);
    std::sort(bps.begin(), bps.end());

    std::vector<double> pts;
    double span = bps.back() - bps.front();
    double off = std::max(1e-6, 1e-3 * span);
    pts.push_back(bps.front() - off);
    pts.push_back(bps.back() + off);
    for (std::size_t i = 0; i < bps.size(); ++i) {
        pts.push_back(bps[i] - 1e-9);
        pts.push_back(bps[i] + 1e-9);
        if (i + 1 < bps.size()) pts.push_back(0.5 * (bps[i] + bps[i + 1]));
    }
    for (const WaveFan* f : {&flr, &flm, &fmr})
        for (const auto& w : f->waves)
            if (w.kind == WaveKind::Rarefaction)
                for (int k = 1; k < resolution; ++k)
                    pts.push_back(w.speed_lo + (w.speed_hi - w.speed_lo) * k / resolution);

    auto near_bp = [&](double x) {
        for (double b : bps)
            if (std::abs(x - b) < 1e-11) return true;
        return false;
    };
    auto fail = [&](double x, const char* what) {
        res.pass = false;
        res.witness = x;
        res.detail = what;
        return res;
    };

    res.premise_I = same_state(m, flr.sample(xbar), um);
    res.premise_II = same_state(m, flm.sample(xbar), um) && same_state(m, fmr.sample(xbar), um);
    for (double x : pts) {
        if (near_bp(x)) continue;
        if (res.premise_I) {
            TrafficState want_lm = x <= xbar ? flr.sample(x) : um;
            if (!same_state(m, flm.sample(x), want_lm)) return fail(x, "(I): R[ul,um] mismatch");
            TrafficState want_mr = x < xbar ? um : flr.sample(x);
            if (!same_state(m, fmr.sample(x), want_mr)) return fail(x, "(I): R[um,ur] mismatch");
        }
        if (res.premise_II) {
            TrafficState want = x < xbar ? flm.sample(x) : fmr.sample(x);
            if (!same_state(m, flr.sample(x), want)) return fail(x, "(II): R[ul,ur] mismatch");
        }
    }
    return res;
}

}  // namespace wft
