#include "wft/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "wft/errors.hpp"

namespace wft {

namespace {

struct Cost {
    double tv = 0.0;
    double dist = 0.0;
    bool operator<(const Cost& o) const {
        if (tv < o.tv - 1e-15) return true;
        if (tv > o.tv + 1e-15) return false;
        return dist < o.dist;
    }
};

// Viterbi over candidate lattice values minimising the variation of the chosen sequence.
std::vector<std::size_t> min_tv_choice(const std::vector<std::vector<double>>& cand, const std::vector<double>& target) {
    const std::size_t n = cand.size();
    std::vector<std::vector<Cost>> cost(n);
    std::vector<std::vector<std::size_t>> from(n);
    for (std::size_t i = 0; i < n; ++i) {
        cost[i].assign(cand[i].size(), Cost{});
        from[i].assign(cand[i].size(), 0);
        for (std::size_t a = 0; a < cand[i].size(); ++a) {
            double d = std::abs(cand[i][a] - target[i]);
            if (i == 0) {
                cost[i][a] = {0.0, d};
                continue;
            }
            Cost best{};
            bool have = false;
            for (std::size_t b = 0; b < cand[i - 1].size(); ++b) {
                Cost c{cost[i - 1][b].tv + std::abs(cand[i][a] - cand[i - 1][b]), cost[i - 1][b].dist + d};
                if (!have || c < best) {
                    best = c;
                    from[i][a] = b;
                    have = true;
                }
            }
            cost[i][a] = best;
        }
    }
    std::vector<std::size_t> pick(n, 0);
    if (n == 0) return pick;
    std::size_t a = 0;
    for (std::size_t b = 1; b < cand[n - 1].size(); ++b)
        if (cost[n - 1][b] < cost[n - 1][a]) a = b;
    for (std::size_t i = n; i-- > 0;) {
        pick[i] = a;
        if (i > 0) a = from[i][a];
    }
    return pick;
}

double collision_time(const Front& a, const Front& b, double now) {
    if (!(a.speed > b.speed)) return std::numeric_limits<double>::infinity();
    double t = (b.x0 - a.x0 + a.speed * a.t0 - b.speed * b.t0) / (a.speed - b.speed);
    return std::max(t, now);
}

bool within(double t, double t_star, double tol) { return t <= t_star + tol * std::max(1.0, std::abs(t_star)); }

}  // namespace

MeshDatum approximate_datum(const PiecewiseDatum& d, const GridMesh& g, Rounding r) {
    const ModelLaws& m = g.laws();
    if (d.values.size() != d.breaks.size() + 1) throw ConfigError("datum needs one more value than breaks");
    for (std::size_t i = 1; i < d.breaks.size(); ++i)
        if (!(d.breaks[i] > d.breaks[i - 1])) throw ConfigError("datum breaks must increase");
    for (const auto& u : d.values)
        if (!m.contains(u)) throw OutOfDomain("datum value outside the state space");

    const std::size_t n = d.values.size();
    std::vector<NodeId> ids(n);
    if (r == Rounding::Floor) {
        for (std::size_t i = 0; i < n; ++i) ids[i] = g.snap_id(d.values[i]);
    } else {
        std::vector<std::vector<double>> c1(n), c2(n);
        std::vector<std::vector<int>> j1(n), j2(n);
        std::vector<double> t1(n), t2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = d.values[i];
            auto c = m.to_coords(u);
            t1[i] = c.w1;
            t2[i] = c.w2;
            if (u.phase == Phase::Free) {
                j1[i] = {-1};
                c1[i] = {m.V_f()};
            } else {
                j1[i] = g.v_candidates(u);
                for (int iv : j1[i]) c1[i].push_back(g.v_of(iv));
            }
            if (u.phase == Phase::Free && g.split_low_free() && u.rho < m.R_f1()) {
                j2[i] = {-1};
                c2[i] = {m.W_c()};
            } else {
                j2[i] = g.w2_candidates(u);
                for (int j : j2[i]) c2[i].push_back(g.w_of(j));
            }
        }
        auto p1 = min_tv_choice(c1, t1), p2 = min_tv_choice(c2, t2);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = d.values[i];
            int j = j2[i][p2[i]];
            if (u.phase == Phase::Congested) {
                ids[i] = g.congested_node(j, j1[i][p1[i]]);
            } else if (j < 0) {
                double h = m.R_f1() / g.nv();
                ids[i] = g.free_node(std::clamp(static_cast<int>(std::lround(u.rho / h)), 0, g.nv()));
            } else {
                ids[i] = g.free_node(j - g.jc() + g.nv());
            }
        }
    }
    MeshDatum out;
    out.values.push_back(ids[0]);
    for (std::size_t i = 1; i < n; ++i) {
        if (ids[i] == out.values.back()) continue;
        out.breaks.push_back(d.breaks[i - 1]);
        out.values.push_back(ids[i]);
    }
    return out;
}

FrontDiagram initial_diagram(const MeshDatum& d, const GridMesh& g) {
    FrontDiagram fd;
    fd.far_left = d.values.front();
    for (std::size_t i = 0; i < d.breaks.size(); ++i)
        for (const auto& w : solve_approx_ids(g, d.values[i], d.values[i + 1]))
            fd.fronts.push_back({d.breaks[i], 0.0, w.speed, w.left, w.right, w.kind});
    return fd;
}

double front_tv(const GridMesh& g, NodeId l, NodeId r) {
    const auto& a = g.node(l).c;
    const auto& b = g.node(r).c;
    return std::abs(a.w1 - b.w1) + std::abs(a.w2 - b.w2);
}

double front_temple(const GridMesh& g, NodeId l, NodeId r) {
    const MeshNode& L = g.node(l);
    const MeshNode& R = g.node(r);
    double d2 = std::abs(L.c.w2 - R.c.w2);
    bool delta = L.phase == Phase::Congested && R.phase == Phase::Congested && L.iv == R.iv && L.j - R.j >= 2;
    return std::abs(L.c.w1 - R.c.w1) + (delta ? 2.0 : 1.0) * d2;
}

double tv_coords(const GridMesh& g, const FrontDiagram& d) {
    double s = 0.0;
    for (const auto& f : d.fronts) s += front_tv(g, f.left, f.right);
    return s;
}

double temple_functional(const GridMesh& g, const FrontDiagram& d) {
    double s = 0.0;
    for (const auto& f : d.fronts) s += front_temple(g, f.left, f.right);
    return s;
}

int count_phase_transitions(const FrontDiagram& d) {
    return static_cast<int>(std::count_if(d.fronts.begin(), d.fronts.end(),
                                          [](const Front& f) { return f.kind == WaveKind::PhaseTransition; }));
}

NextEvent next_event(const FrontDiagram& d, double tol) {
    NextEvent ev;
    const auto& F = d.fronts;
    std::vector<double> tc(F.size() > 0 ? F.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < F.size(); ++i) {
        tc[i] = collision_time(F[i], F[i + 1], d.t);
        ev.t = std::min(ev.t, tc[i]);
    }
    if (!std::isfinite(ev.t)) return ev;
    std::size_t i = 0;
    while (i < tc.size() && !within(tc[i], ev.t, tol)) ++i;
    // first run of consecutive colliding pairs at the earliest time
    ev.fronts.push_back(i);
    while (i < tc.size() && within(tc[i], ev.t, tol)) ev.fronts.push_back(++i);
    return ev;
}

std::vector<MeshWave> resolve_interaction(const GridMesh& g, NodeId left, NodeId right) {
    return solve_approx_ids(g, left, right);
}

RunHistory run(const MeshDatum& d, const GridMesh& g, const RunOptions& opt) {
    RunHistory h;
    h.mesh = &g;
    h.datum = d;
    h.t_end = opt.t_end;
    auto& seg = h.segments;
    std::vector<int> prev, next;
    int head = -1;

    auto add = [&](const Front& f) {
        seg.push_back(f);
        prev.push_back(-1);
        next.push_back(-1);
        return static_cast<int>(seg.size()) - 1;
    };

    using Entry = std::tuple<double, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    auto schedule = [&](int a, int b, double now) {
        if (a < 0 || b < 0) return;
        double t = collision_time(seg[a], seg[b], now);
        if (std::isfinite(t)) heap.emplace(t, a, b);
    };
    auto alive = [&](int a) { return std::isinf(seg[a].t_end); };

    FrontDiagram init = initial_diagram(d, g);
    int last = -1;
    double tv = 0.0, temple = 0.0;
    long waves = 0, pts = 0;
    for (const auto& f : init.fronts) {
        int id = add(f);
        if (last < 0) head = id;
        else {
            next[last] = id;
            prev[id] = last;
        }
        last = id;
        tv += front_tv(g, f.left, f.right);
        temple += front_temple(g, f.left, f.right);
        ++waves;
        if (f.kind == WaveKind::PhaseTransition) ++pts;
    }
    for (std::size_t i = 0; i < d.breaks.size(); ++i) h.tv0 += front_tv(g, d.values[i], d.values[i + 1]);
    for (int a = head; a >= 0 && next[a] >= 0; a = next[a]) schedule(a, next[a], 0.0);
    h.log.push_back({0.0, 0.0, tv, temple, waves, pts, 0.0, 0.0, 0, static_cast<int>(waves), 0, static_cast<int>(pts)});

    const double tol = 1e-12;
    while (!heap.empty()) {
        auto [t0, a0, b0] = heap.top();
        heap.pop();
        if (!alive(a0) || !alive(b0) || next[a0] != b0) continue;
        if (t0 > opt.t_end) break;
        const double ts = t0;
        std::set<int> lefts{a0};
        while (!heap.empty() && within(std::get<0>(heap.top()), ts, tol)) {
            auto [t1, a1, b1] = heap.top();
            heap.pop();
            if (alive(a1) && alive(b1) && next[a1] == b1) lefts.insert(a1);
        }
        std::vector<std::vector<int>> runs;
        for (int a : lefts) {
            if (prev[a] >= 0 && lefts.count(prev[a])) continue;
            std::vector<int> r{a, next[a]};
            while (lefts.count(r.back())) r.push_back(next[r.back()]);
            runs.push_back(std::move(r));
        }
        for (const auto& r : runs) {
            if (++h.events > opt.max_events) throw EventOverflow("event cap exceeded");
            EventRecord rec;
            rec.t = ts;
            double xs = 0.0, tv_in = 0.0, tm_in = 0.0;
            for (int id : r) {
                xs += seg[id].x(ts);
                tv_in += front_tv(g, seg[id].left, seg[id].right);
                tm_in += front_temple(g, seg[id].left, seg[id].right);
                if (seg[id].kind == WaveKind::PhaseTransition) ++rec.pts_in;
                seg[id].t_end = ts;
            }
            xs /= static_cast<double>(r.size());
            rec.x = xs;
            rec.waves_in = static_cast<int>(r.size());
            int before = prev[r.front()], after = next[r.back()];
            NodeId L = seg[r.front()].left, R = seg[r.back()].right;
            double tv_out = 0.0, tm_out = 0.0;
            int lastn = before, firstn = -1;
            for (const auto& w : resolve_interaction(g, L, R)) {
                int id = add({xs, ts, w.speed, w.left, w.right, w.kind});
                if (firstn < 0) firstn = id;
                prev[id] = lastn;
                if (lastn >= 0) next[lastn] = id;
                lastn = id;
                tv_out += front_tv(g, w.left, w.right);
                tm_out += front_temple(g, w.left, w.right);
                ++rec.waves_out;
                if (w.kind == WaveKind::PhaseTransition) ++rec.pts_out;
            }
            if (lastn >= 0) next[lastn] = after;
            if (after >= 0) prev[after] = lastn;
            if (before < 0) head = firstn >= 0 ? firstn : after;
            if (before >= 0 && firstn < 0) next[before] = after;
            // new adjacent pairs
            int from = before >= 0 ? before : (firstn >= 0 ? firstn : after);
            for (int a = from; a >= 0 && a != after; a = next[a]) schedule(a, next[a], ts);

            tv += tv_out - tv_in;
            temple += tm_out - tm_in;
            waves += rec.waves_out - rec.waves_in;
            pts += rec.pts_out - rec.pts_in;
            rec.tv = tv;
            rec.temple = temple;
            rec.waves = waves;
            rec.pts = pts;
            rec.d_tv = tv_out - tv_in;
            rec.d_temple = tm_out - tm_in;
            if (opt.strict) {
                std::ostringstream why;
                if (rec.d_tv > opt.slack) why << "total variation increased by " << rec.d_tv;
                else if (opt.strict_temple && rec.d_temple > opt.slack)
                    why << "Temple functional increased by " << rec.d_temple;
                else if (opt.strict_temple && rec.waves_out > rec.waves_in && rec.d_temple > -g.eps_w() + opt.slack)
                    why << "wave count grew without Temple decrease of eps_w";
                else if (rec.pts_out > rec.pts_in || (rec.pts_in - rec.pts_out) % 2 != 0)
                    why << "phase-transition count changed by " << rec.pts_out - rec.pts_in;
                if (!why.str().empty())
                    throw InvariantViolation(why.str() + " at t=" + std::to_string(ts));
            }
            if (opt.keep_history || h.log.empty()) h.log.push_back(rec);
            else h.log.back() = rec;
        }
    }

    h.final.t = opt.t_end;
    h.final.far_left = d.values.front();
    for (int a = head; a >= 0; a = next[a]) h.final.fronts.push_back(seg[a]);
    for (auto& s : seg)
        if (std::isinf(s.t_end)) s.t_end = opt.t_end;
    for (auto& f : h.final.fronts) f.t_end = opt.t_end;
    if (!opt.keep_history) {
        seg.clear();
        seg.shrink_to_fit();
    }
    return h;
}

Snapshot snapshot(const RunHistory& h, double t) {
    if (t < 0.0 || t > h.t_end) throw OutOfWindow("time outside the run window");
    Snapshot s;
    s.t = t;
    s.far_left = h.datum.values.front();
    if (t == 0.0) {
        s.x = h.datum.breaks;
        s.right.assign(h.datum.values.begin() + 1, h.datum.values.end());
        return s;
    }
    if (h.segments.empty() && !h.final.fronts.empty()) throw OutOfWindow("history was not kept");
    struct Item {
        double x, speed;
        std::size_t id;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < h.segments.size(); ++i) {
        const auto& f = h.segments[i];
        if (f.t0 < t && t <= f.t_end) items.push_back({f.x(t), f.speed, i});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.speed != b.speed) return a.speed > b.speed;
        return a.id < b.id;
    });
    for (const auto& it : items) {
        s.x.push_back(it.x);
        s.right.push_back(h.segments[it.id].right);
    }
    return s;
}

NodeId evaluate_id(const Snapshot& s, double x) {
    auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
    if (it == s.x.begin()) return s.far_left;
    return s.right[static_cast<std::size_t>(it - s.x.begin()) - 1];
}

TrafficState evaluate(const RunHistory& h, double t, double x) {
    return h.mesh->state(evaluate_id(snapshot(h, t), x));
}

std::vector<TrafficState> profile(const RunHistory& h, double t, const std::vector<double>& xs) {
    Snapshot s = snapshot(h, t);
    std::vector<TrafficState> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(h.mesh->state(evaluate_id(s, x)));
    return out;
}

double l1_distance(const GridMesh& g, const Snapshot& a, const Snapshot& b) {
    std::vector<double> pts(a.x);
    pts.insert(pts.end(), b.x.begin(), b.x.end());
    std::sort(pts.begin(), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double len = pts[i + 1] - pts[i];
        if (len <= 0.0) continue;
        double mid = 0.5 * (pts[i] + pts[i + 1]);
        s += len * front_tv(g, evaluate_id(a, mid), evaluate_id(b, mid));
    }
    return s;
}

}  // namespace wft
