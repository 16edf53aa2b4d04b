#pragma once

#include <vector>

#include "wft/model.hpp"
#include "wft/riemann.hpp"

namespace wft {

using NodeId = int;

/// A mesh node: phase, lattice indices, state and coordinates.
struct MeshNode {
    Phase phase = Phase::Free;
    int j = -1;   ///< w2 lattice index (-1 for the low-density free sub-lattice)
    int iv = -1;  ///< velocity index, congested only
    int k = -1;   ///< ordinal among free nodes, increasing in rho
    TrafficState u;
    RiemannCoords c;
};

/// One jump of an approximate fan, expressed on mesh nodes.
struct MeshWave {
    WaveKind kind = WaveKind::Shock;
    NodeId left = -1;
    NodeId right = -1;
    double speed = 0.0;
};

/// The discrete state set with quanta eps_v and eps_w.
///
/// The w2 lattice is anchored at W_c; W_max is its top node, either on the
/// lattice or adjoined. When V_max = V_f all low-density free states share
/// w2 = W_c, so eps_w is taken from [W_c, W_max] and those states are
/// resolved on a density sub-lattice of step R_f'/2^n.
class GridMesh {
public:
    GridMesh(const ModelLaws& m, int n);

    const ModelLaws& laws() const { return *m_; }
    int n() const { return n_; }
    double eps_v() const { return eps_v_; }
    double eps_w() const { return eps_w_; }
    bool split_low_free() const { return split_; }
    int jc() const { return jc_; }
    int jtop() const { return jtop_; }
    int nv() const { return nv_; }
    int free_count() const { return kf_; }
    int size() const { return static_cast<int>(nodes_.size()); }

    /// Lattice value of w2 at index j.
    double w_of(int j) const;
    double v_of(int iv) const;

    NodeId free_node(int k) const;
    NodeId congested_node(int j, int iv) const;
    const MeshNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const TrafficState& state(NodeId id) const { return node(id).u; }

    /// Floor of the coordinates onto the lattice, clamped into the mesh.
    NodeId snap_id(const TrafficState& u) const;
    TrafficState snap(const TrafficState& u) const { return state(snap_id(u)); }
    /// Node equal to u (within 1e-12 in coordinates and density) or NotOnMesh.
    NodeId locate(const TrafficState& u) const;

    /// Coordinate-wise candidate lattice indices bracketing u (floor and ceiling).
    std::vector<int> w2_candidates(const TrafficState& u) const;
    std::vector<int> v_candidates(const TrafficState& u) const;
    int low_free_index(double rho) const;

private:
    int free_j(int k) const;
    TrafficState make_free(int k) const;

    const ModelLaws* m_;
    int n_;
    int nv_;  // 2^n
    double eps_v_, eps_w_;
    bool split_;
    int jc_, jtop_, kf_;
    std::vector<MeshNode> nodes_;
};

/// Approximate solver on mesh nodes: rarefactions become chains of unit steps.
std::vector<MeshWave> solve_approx_ids(const GridMesh& g, NodeId l, NodeId r);
WaveFan solve_approx(const GridMesh& g, const TrafficState& ul, const TrafficState& ur);

}  // namespace wft
