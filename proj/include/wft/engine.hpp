#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "wft/grid.hpp"

namespace wft {

/// Piecewise constant profile: values[i] holds on [breaks[i-1], breaks[i]).
struct PiecewiseDatum {
    std::vector<double> breaks;
    std::vector<TrafficState> values;  ///< size breaks.size() + 1
};

/// A piecewise constant datum with mesh-node values.
struct MeshDatum {
    std::vector<double> breaks;
    std::vector<NodeId> values;
    std::size_t jumps() const { return breaks.size(); }
};

enum class Rounding {
    MinTV,  ///< floor/ceiling per coordinate chosen to minimise total variation
    Floor   ///< coordinate-wise floor
};

/// Approximates a datum on the mesh and drops jumps between equal nodes.
MeshDatum approximate_datum(const PiecewiseDatum& d, const GridMesh& g, Rounding r = Rounding::MinTV);

/// A straight front segment s(t) = x0 + speed (t - t0) on [t0, t_end].
struct Front {
    double x0 = 0.0;
    double t0 = 0.0;
    double speed = 0.0;
    NodeId left = -1;
    NodeId right = -1;
    WaveKind kind = WaveKind::Shock;
    double t_end = std::numeric_limits<double>::infinity();

    double x(double t) const { return x0 + speed * (t - t0); }
};

/// Ordered fronts at a given time plus the constant state on the far left.
struct FrontDiagram {
    double t = 0.0;
    NodeId far_left = -1;
    std::vector<Front> fronts;
};

/// Fronts at t = 0 obtained by solving a Riemann problem at every jump.
FrontDiagram initial_diagram(const MeshDatum& d, const GridMesh& g);

double tv_coords(const GridMesh& g, const FrontDiagram& d);
double temple_functional(const GridMesh& g, const FrontDiagram& d);
int count_phase_transitions(const FrontDiagram& d);

/// Per-front contributions to the functionals.
double front_tv(const GridMesh& g, NodeId l, NodeId r);
double front_temple(const GridMesh& g, NodeId l, NodeId r);

/// Functionals after one resolved interaction (or at t = 0).
struct EventRecord {
    double t = 0.0;
    double x = 0.0;
    double tv = 0.0;
    double temple = 0.0;
    long waves = 0;
    long pts = 0;
    double d_tv = 0.0;       ///< local change of TV
    double d_temple = 0.0;   ///< local change of the Temple functional
    int waves_in = 0;
    int waves_out = 0;
    int pts_in = 0;
    int pts_out = 0;
};

struct RunOptions {
    double t_end = 1.0;
    std::size_t max_events = 10'000'000;
    bool keep_history = true;
    bool strict = false;  ///< throw InvariantViolation at the first failed event check
    bool strict_temple = true;  ///< include the Temple functional checks in strict mode
    double slack = 1e-10;
};

/// Result of a wave-front tracking run.
struct RunHistory {
    const GridMesh* mesh = nullptr;
    MeshDatum datum;
    std::vector<Front> segments;  ///< every front ever created, t_end filled in
    std::vector<EventRecord> log;
    FrontDiagram final;
    double t_end = 0.0;
    std::size_t events = 0;
    double tv0 = 0.0;
};

/// Earliest future collision among adjacent fronts of a diagram.
struct NextEvent {
    double t = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> fronts;  ///< indices of the colliding fronts, grouped
};
NextEvent next_event(const FrontDiagram& d, double tol = 1e-12);

/// Solves the Riemann problem between the outermost states of a colliding group.
std::vector<MeshWave> resolve_interaction(const GridMesh& g, NodeId left, NodeId right);

RunHistory run(const MeshDatum& d, const GridMesh& g, const RunOptions& opt);

/// Sorted front positions and right states at time t (left-continuous in t).
struct Snapshot {
    double t = 0.0;
    NodeId far_left = -1;
    std::vector<double> x;
    std::vector<NodeId> right;
};
Snapshot snapshot(const RunHistory& h, double t);
/// State at (t, x), right-continuous in x.
TrafficState evaluate(const RunHistory& h, double t, double x);
NodeId evaluate_id(const Snapshot& s, double x);
std::vector<TrafficState> profile(const RunHistory& h, double t, const std::vector<double>& xs);

/// L1 distance in the coordinate norm between two snapshots.
double l1_distance(const GridMesh& g, const Snapshot& a, const Snapshot& b);

}  // namespace wft
