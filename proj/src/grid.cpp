#include "wft/grid.hpp"

#include <algorithm>
#include <cmath>

#include "wft/errors.hpp"

namespace wft {

namespace {
constexpr double kGuard = 1e-9;
constexpr double kSnap = 1e-12;

int floor_index(double x) { return static_cast<int>(std::floor(x + kGuard)); }
}  // namespace

GridMesh::GridMesh(const ModelLaws& m, int n) : m_(&m), n_(n) {
    if (n < 1 || n > 20) throw ConfigError("refinement level must lie in [1, 20]");
    nv_ = 1 << n;
    eps_v_ = m.V_c() / nv_;
    split_ = m.constant_free_speed();
    if (split_) {
        eps_w_ = (m.W_max() - m.W_c()) / nv_;
        jc_ = 0;
        jtop_ = nv_;
    } else {
        eps_w_ = (m.W_c() - m.W_min()) / nv_;
        jc_ = nv_;
        double r = (m.W_max() - m.W_min()) / eps_w_;
        double rr = std::round(r);
        jtop_ = std::abs(r - rr) < kGuard ? static_cast<int>(rr) : static_cast<int>(std::floor(r)) + 1;
    }
    kf_ = nv_ + (jtop_ - jc_) + 1;

    nodes_.reserve(static_cast<std::size_t>(kf_ + (jtop_ - jc_ + 1) * (nv_ + 1)));
    for (int k = 0; k < kf_; ++k) {
        MeshNode nd;
        nd.phase = Phase::Free;
        nd.k = k;
        nd.j = free_j(k);
        nd.u = make_free(k);
        nd.c = {m.V_f(), nd.j >= 0 ? w_of(nd.j) : m.W_c()};
        nodes_.push_back(nd);
    }
    for (int j = jc_; j <= jtop_; ++j) {
        double w = w_of(j);
        for (int iv = 0; iv <= nv_; ++iv) {
            MeshNode nd;
            nd.phase = Phase::Congested;
            nd.j = j;
            nd.iv = iv;
            double v = v_of(iv);
            double rho = (iv == 0 && j == jtop_) ? m.R_max() : (iv == 0 && j == jc_) ? m.R_c() : m.p_inv(w - v);
            nd.u = {rho, v, Phase::Congested};
            nd.c = {v, w};
            nodes_.push_back(nd);
        }
    }
}

double GridMesh::w_of(int j) const {
    if (j == jtop_) return m_->W_max();
    if (j == jc_) return m_->W_c();
    if (j == 0 && !split_) return m_->W_min();
    return m_->W_c() + (j - jc_) * eps_w_;
}

double GridMesh::v_of(int iv) const { return iv == nv_ ? m_->V_c() : iv * eps_v_; }

int GridMesh::free_j(int k) const {
    if (k >= nv_) return k - nv_ + jc_;
    return split_ ? -1 : k;
}

TrafficState GridMesh::make_free(int k) const {
    const ModelLaws& m = *m_;
    if (k == 0) return m.vacuum();
    if (k == nv_) return m.free_state(m.R_f1());
    if (k == kf_ - 1) return m.free_state(m.R_f2());
    if (k < nv_) {
        if (split_) return m.free_state(m.R_f1() * k / nv_);
        double w = w_of(k);
        double rho = m.vf_inv(m.W_c() + m.vf()(m.R_f1()) - w);
        return m.free_state(std::min(rho, m.R_f1()));
    }
    return m.free_state(m.rho_f(w_of(free_j(k))));
}

NodeId GridMesh::free_node(int k) const {
    if (k < 0 || k >= kf_) throw NotOnMesh("free node index out of range");
    return k;
}

NodeId GridMesh::congested_node(int j, int iv) const {
    if (j < jc_ || j > jtop_ || iv < 0 || iv > nv_) throw NotOnMesh("congested node index out of range");
    return kf_ + (j - jc_) * (nv_ + 1) + iv;
}

int GridMesh::low_free_index(double rho) const {
    return std::clamp(floor_index(rho / (m_->R_f1() / nv_)), 0, nv_ - 1);
}

NodeId GridMesh::snap_id(const TrafficState& u) const {
    const ModelLaws& m = *m_;
    auto c = m.to_coords(u);
    auto wj = [&](int lo) {
        if (c.w2 >= m.W_max() - kSnap * (1.0 + std::abs(c.w2))) return jtop_;
        return std::clamp(floor_index((c.w2 - m.W_c()) / eps_w_) + jc_, lo, jtop_);
    };
    if (u.phase == Phase::Free) {
        if (split_ && u.rho < m.R_f1()) return free_node(low_free_index(u.rho));
        int j = wj(0);
        return free_node(j - jc_ + nv_);
    }
    int iv = c.w1 >= m.V_c() ? nv_ : std::clamp(floor_index(c.w1 / eps_v_), 0, nv_);
    return congested_node(wj(jc_), iv);
}

NodeId GridMesh::locate(const TrafficState& u) const {
    NodeId id = snap_id(u);
    const MeshNode& nd = node(id);
    auto c = m_->to_coords(u);
    if (nd.phase != u.phase || std::abs(nd.u.rho - u.rho) > 1e-12 ||
        std::abs(nd.c.w1 - c.w1) + std::abs(nd.c.w2 - c.w2) > 1e-12)
        throw NotOnMesh("state is not a mesh node");
    return id;
}

std::vector<int> GridMesh::w2_candidates(const TrafficState& u) const {
    const ModelLaws& m = *m_;
    double w = m.to_coords(u).w2;
    int lo = u.phase == Phase::Congested ? jc_ : 0;
    if (w >= m.W_max() - kSnap * (1.0 + std::abs(w))) return {jtop_};
    int j = std::clamp(floor_index((w - m.W_c()) / eps_w_) + jc_, lo, jtop_);
    const double tol = kSnap * (1.0 + std::abs(w));
    if (std::abs(w - w_of(j)) <= tol) return {j};
    if (j + 1 <= jtop_ && std::abs(w_of(j + 1) - w) <= tol) return {j + 1};
    std::vector<int> out{j};
    if (w_of(j) < w && j + 1 <= jtop_) out.push_back(j + 1);
    return out;
}

std::vector<int> GridMesh::v_candidates(const TrafficState& u) const {
    if (u.phase == Phase::Free) return {};
    if (u.v >= m_->V_c()) return {nv_};
    int iv = std::clamp(floor_index(u.v / eps_v_), 0, nv_);
    const double tol = kSnap * (1.0 + std::abs(u.v));
    if (std::abs(u.v - v_of(iv)) <= tol) return {iv};
    if (iv + 1 <= nv_ && std::abs(v_of(iv + 1) - u.v) <= tol) return {iv + 1};
    std::vector<int> out{iv};
    if (v_of(iv) < u.v && iv + 1 <= nv_) out.push_back(iv + 1);
    return out;
}

namespace {
void push(std::vector<MeshWave>& out, const GridMesh& g, WaveKind kind, NodeId l, NodeId r) {
    out.push_back({kind, l, r, sigma(g.state(l), g.state(r))});
}

void free_waves(const GridMesh& g, NodeId l, NodeId r, std::vector<MeshWave>& out) {
    if (l == r) return;
    if (g.split_low_free()) {
        push(out, g, WaveKind::Contact, l, r);
        return;
    }
    int kl = g.node(l).k, kr = g.node(r).k;
    if (kl < kr) {
        push(out, g, WaveKind::Shock, l, r);
        return;
    }
    for (int k = kl; k > kr; --k) push(out, g, WaveKind::RarefactionStep, g.free_node(k), g.free_node(k - 1));
}

void congested_waves(const GridMesh& g, NodeId l, NodeId r, std::vector<MeshWave>& out) {
    if (l == r) return;
    const MeshNode& L = g.node(l);
    const MeshNode& R = g.node(r);
    NodeId m = g.congested_node(L.j, R.iv);
    if (R.iv < L.iv) {
        push(out, g, WaveKind::Shock, l, m);
    } else {
        for (int iv = L.iv; iv < R.iv; ++iv)
            push(out, g, WaveKind::RarefactionStep, g.congested_node(L.j, iv), g.congested_node(L.j, iv + 1));
    }
    if (m != r) push(out, g, WaveKind::Contact, m, r);
}
}  // namespace

std::vector<MeshWave> solve_approx_ids(const GridMesh& g, NodeId l, NodeId r) {
    std::vector<MeshWave> out;
    if (l == r) return out;
    const MeshNode& L = g.node(l);
    const MeshNode& R = g.node(r);
    if (L.phase == Phase::Free && R.phase == Phase::Free) {
        free_waves(g, l, r, out);
    } else if (L.phase == Phase::Congested && R.phase == Phase::Congested) {
        congested_waves(g, l, r, out);
    } else if (L.phase == Phase::Free) {
        if (L.u.rho == 0.0) {
            push(out, g, WaveKind::PhaseTransition, l, r);
        } else {
            NodeId m = g.congested_node(std::max(L.j, g.jc()), R.iv);
            push(out, g, WaveKind::PhaseTransition, l, m);
            if (m != r) push(out, g, WaveKind::Contact, m, r);
        }
    } else {
        NodeId m1 = g.congested_node(L.j, g.nv());
        for (int iv = L.iv; iv < g.nv(); ++iv)
            push(out, g, WaveKind::RarefactionStep, g.congested_node(L.j, iv), g.congested_node(L.j, iv + 1));
        NodeId m2 = g.free_node(L.j - g.jc() + g.nv());
        push(out, g, WaveKind::PhaseTransition, m1, m2);
        free_waves(g, m2, r, out);
    }
    return out;
}

WaveFan solve_approx(const GridMesh& g, const TrafficState& ul, const TrafficState& ur) {
    NodeId l = g.locate(ul), r = g.locate(ur);
    WaveFan f{ul, ur, {}};
    for (const auto& w : solve_approx_ids(g, l, r))
        f.waves.push_back({w.kind, g.state(w.left), g.state(w.right), w.speed, w.speed, {}});
    return f;
}

}  // namespace wft
