#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support.hpp"
#include "wft/errors.hpp"

using namespace wft;
using doctest::Approx;

namespace {

Front front_at(double x, double speed, NodeId l = 0, NodeId r = 1) {
    Front f;
    f.x0 = x;
    f.speed = speed;
    f.left = l;
    f.right = r;
    return f;
}

// TV of a piecewise constant datum in coordinates
double datum_tv(const ModelLaws& m, const PiecewiseDatum& d) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d.values.size(); ++i) s += m.dist(d.values[i], d.values[i + 1]);
    return s;
}

double mesh_tv(const GridMesh& g, const MeshDatum& d) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d.values.size(); ++i) s += g.laws().dist(g.state(d.values[i]), g.state(d.values[i + 1]));
    return s;
}

RunHistory go(const GridMesh& g, const PiecewiseDatum& d, double T, bool strict = false) {
    RunOptions o;
    o.t_end = T;
    o.strict = strict;
    return run(approximate_datum(d, g), g, o);
}

}  // namespace

TEST_CASE("datum approximation") {
    ModelLaws m = testing::light();
    GridMesh g(m, 5);
    SUBCASE("constant") {
        MeshDatum d = approximate_datum({{-1.0, 0.0, 1.0}, {m.free_state(0.2), m.free_state(0.2), m.free_state(0.2), m.free_state(0.2)}}, g);
        CHECK(d.jumps() == 0);
        CHECK(initial_diagram(d, g).fronts.empty());
    }
    SUBCASE("traffic light") {
        Scenario sc = build_scenario(TrafficLightConfig{});
        GridMesh h(sc.laws, 5);
        MeshDatum d = approximate_datum(sc.datum, h);
        REQUIRE(d.jumps() == 3);
        CHECK(d.breaks == std::vector<double>{-10.0, -7.0, 0.0});
        CHECK(h.state(d.values[1]).rho == Approx(sc.laws.R_c()).epsilon(1e-14));
        CHECK(h.state(d.values[2]).rho == Approx(sc.laws.R_max()).epsilon(1e-14));
        CHECK(d.values[3] == h.free_node(0));
    }
    SUBCASE("floor can raise TV where the default rounding does not") {
        double e = g.eps_v();
        double w = m.W_c() + 5 * g.eps_w();
        PiecewiseDatum d{{0.0}, {m.from_coords({0.99 * e, w}, Phase::Congested), m.from_coords({1.01 * e, w}, Phase::Congested)}};
        CHECK(approximate_datum(d, g, Rounding::Floor).jumps() == 1);
        CHECK(approximate_datum(d, g).jumps() == 0);
    }
    SUBCASE("sampled smooth profile keeps its variation bound") {
        const int N = 400;
        PiecewiseDatum d;
        for (int i = 0; i < N; ++i) {
            double x = -1.0 + 2.0 * i / N;
            if (i > 0) d.breaks.push_back(x);
            double v = m.V_c() * (0.5 + 0.45 * std::sin(7 * x));
            double w = m.W_c() + (m.W_max() - m.W_c()) * (0.5 + 0.4 * std::cos(3 * x));
            d.values.push_back(m.from_coords({v, w}, Phase::Congested));
        }
        for (int n : {3, 5, 8}) {
            GridMesh h(m, n);
            CHECK(mesh_tv(h, approximate_datum(d, h)) <= datum_tv(m, d) + 1e-14);
        }
    }
    SUBCASE("random data keep their variation bound") {
        std::mt19937_64 rng(17);
        for (int i = 0; i < 200; ++i) {
            PiecewiseDatum d = random_datum(m, rng, 30);
            CHECK(mesh_tv(g, approximate_datum(d, g)) <= datum_tv(m, d) + 1e-14);
        }
    }
    SUBCASE("values outside the state space are rejected") {
        PiecewiseDatum d{{0.0}, {m.free_state(0.1), {0.3, 0.1, Phase::Congested}}};
        CHECK_THROWS_AS(approximate_datum(d, g), OutOfDomain);
    }
}

TEST_CASE("next event") {
    FrontDiagram d;
    d.fronts = {front_at(0.0, 1.0), front_at(1.0, 0.0)};
    NextEvent e = next_event(d);
    CHECK(e.t == Approx(1.0));
    CHECK(e.fronts == std::vector<std::size_t>{0, 1});

    d.t = 2.0;
    for (auto& f : d.fronts) f.t0 = 2.0;
    CHECK(next_event(d).t == Approx(3.0));

    FrontDiagram same;
    same.fronts = {front_at(0.0, 0.3), front_at(1.0, 0.3), front_at(2.0, 0.3)};
    CHECK(std::isinf(next_event(same).t));
    CHECK(next_event(same).fronts.empty());

    FrontDiagram tri;
    tri.fronts = {front_at(-1.0, 1.0), front_at(0.0, 0.0), front_at(1.0, -1.0), front_at(5.0, 0.0)};
    NextEvent g = next_event(tri);
    CHECK(g.t == Approx(1.0));
    CHECK(g.fronts == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("functionals") {
    ModelLaws m = testing::light();
    GridMesh g(m, 4);
    const int j = g.jc() + 5;
    NodeId a = g.congested_node(j, 9), b = g.congested_node(j, 3);
    CHECK(front_temple(g, a, b) == Approx(6 * g.eps_v()).epsilon(1e-12));
    CHECK(front_tv(g, a, b) == Approx(6 * g.eps_v()).epsilon(1e-12));

    NodeId c = g.congested_node(j, 4), d = g.congested_node(j - 3, 4);
    CHECK(front_temple(g, c, d) == Approx(2 * 3 * g.eps_w()).epsilon(1e-12));
    // a drop of exactly one quantum does not count twice
    CHECK(front_temple(g, c, g.congested_node(j - 1, 4)) == Approx(g.eps_w()).epsilon(1e-12));
    // a rise never counts twice
    CHECK(front_temple(g, d, c) == Approx(3 * g.eps_w()).epsilon(1e-12));

    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        FrontDiagram fd = initial_diagram(approximate_datum(random_datum(m, rng, 30), g), g);
        double tv = tv_coords(g, fd), tm = temple_functional(g, fd);
        CHECK(tv <= tm + 1e-15);
        CHECK(tm <= 2 * tv + 1e-15);
    }
}

TEST_CASE("interaction cases") {
    ModelLaws m = testing::light();
    GridMesh g(m, 4);
    SUBCASE("low free, V_c congested, R_f' gives one shock") {
        NodeId ul = g.free_node(5), um = g.congested_node(g.jc(), g.nv()), ur = g.free_node(g.nv());
        CHECK(g.state(ur).rho == m.R_f1());
        CHECK(g.state(um).rho == Approx(m.p_inv(m.W_c() - m.V_c())));
        auto out = resolve_interaction(g, ul, ur);
        REQUIRE(out.size() == 1);
        CHECK(out[0].kind == WaveKind::Shock);
        CHECK(out[0].left == ul);
        CHECK(out[0].right == ur);
        (void)um;
    }
    SUBCASE("congested V_c to slower state on the same curve gives one shock") {
        const int j = g.jc() + 4;
        auto out = resolve_interaction(g, g.congested_node(j, g.nv()), g.congested_node(j, 3));
        REQUIRE(out.size() == 1);
        CHECK(out[0].kind == WaveKind::Shock);
    }
    SUBCASE("phase transition plus rarefaction lowers the Temple functional by the marker gap") {
        const int jm = g.jc() + 2, jl = jm + 3;
        NodeId ul = g.congested_node(jl, g.nv()), um = g.congested_node(jm, g.nv());
        NodeId ur = g.free_node(jm - g.jc() + g.nv());
        double tin = front_temple(g, ul, um) + front_temple(g, um, ur);
        double tvin = front_tv(g, ul, um) + front_tv(g, um, ur);
        auto out = resolve_interaction(g, ul, ur);
        REQUIRE(out.size() == 4);
        CHECK(out[0].kind == WaveKind::PhaseTransition);
        double tout = 0.0, tvout = 0.0;
        for (const auto& w : out) {
            tout += front_temple(g, w.left, w.right);
            tvout += front_tv(g, w.left, w.right);
        }
        CHECK(tout - tin == Approx(-3 * g.eps_w()).epsilon(1e-9));
        CHECK(std::abs(tvout - tvin) < 1e-15);
    }
}

TEST_CASE("free contact meeting a phase transition under constant free speed") {
    ModelLaws m = testing::flat();
    GridMesh g(m, 4);
    const int jl = 5, jm = 2, iv = 6;
    NodeId ul = g.free_node(jl - g.jc() + g.nv()), um = g.free_node(jm - g.jc() + g.nv());
    NodeId ur = g.congested_node(jm, iv);
    PiecewiseDatum d{{0.0, 0.1}, {g.state(ul), g.state(um), g.state(ur)}};
    RunOptions o;
    o.t_end = 100.0;
    RunHistory h = run(approximate_datum(d, g), g, o);
    REQUIRE(h.log.size() == 2);
    const EventRecord& e = h.log[1];
    CHECK(e.d_tv == Approx(0.0).scale(1e-9));
    // the outgoing congested contact carries a drop of three quanta at equal w1
    CHECK(e.d_temple == Approx(3 * g.eps_w()).epsilon(1e-9));
    o.strict = true;
    CHECK_THROWS_AS(run(approximate_datum(d, g), g, o), InvariantViolation);
    o.strict_temple = false;
    CHECK_NOTHROW(run(approximate_datum(d, g), g, o));
}

TEST_CASE("runs") {
    ModelLaws m = testing::light();
    GridMesh g(m, 5);
    SUBCASE("Riemann datum propagates its fan") {
        NodeId l = g.free_node(3), r = g.congested_node(g.jc() + 7, 11);
        RunHistory h = go(g, {{0.0}, {g.state(l), g.state(r)}}, 10.0);
        CHECK(h.events == 0);
        auto fan = solve_approx_ids(g, l, r);
        REQUIRE(h.final.fronts.size() == fan.size());
        for (std::size_t i = 0; i < fan.size(); ++i) {
            CHECK(h.final.fronts[i].speed == fan[i].speed);
            CHECK(h.final.fronts[i].x(10.0) == Approx(10.0 * fan[i].speed));
        }
    }
    SUBCASE("two free shocks merge") {
        NodeId a = g.free_node(2), b = g.free_node(g.nv() + 2), c = g.free_node(g.nv() + 6);
        const TrafficState &A = g.state(a), &B = g.state(b), &C = g.state(c);
        double s1 = sigma(A, B), s2 = sigma(B, C);
        REQUIRE(s1 > s2);
        RunHistory h = go(g, {{0.0, 0.1}, {A, B, C}}, 20.0, true);
        CHECK(h.events == 1);
        CHECK(h.log[1].t == Approx(0.1 / (s1 - s2)));
        CHECK(h.log[1].waves_in == 2);
        CHECK(h.log[1].waves_out == 1);
        REQUIRE(h.final.fronts.size() == 1);
        CHECK(h.final.fronts[0].speed == Approx(sigma(A, C)).epsilon(1e-14));
    }
    SUBCASE("traffic light keeps TV non-increasing") {
        Scenario sc = build_scenario(TrafficLightConfig{});
        GridMesh h6(sc.laws, 6);
        RunHistory h = go(h6, sc.datum, 400.0, true);
        CHECK(h.events > 50);
        for (std::size_t i = 1; i < h.log.size(); ++i) {
            CHECK(h.log[i].tv <= h.log[i - 1].tv + 1e-10);
            CHECK(h.log[i].pts <= h.log[i - 1].pts);
        }
        CHECK(h.log.back().tv <= h.tv0 + 1e-12);
    }
    SUBCASE("event cap") {
        Scenario sc = build_scenario(TrafficLightConfig{});
        GridMesh h6(sc.laws, 6);
        RunOptions o;
        o.t_end = 400.0;
        o.max_events = 3;
        CHECK_THROWS_AS(run(approximate_datum(sc.datum, h6), h6, o), EventOverflow);
    }
}

TEST_CASE("evaluation") {
    ModelLaws m = testing::light();
    GridMesh g(m, 4);
    TrafficState u = g.state(g.free_node(7));
    RunHistory c = go(g, {{}, {u}}, 5.0);
    for (double x : {-3.0, 0.0, 2.0}) CHECK(evaluate(c, 2.0, x).rho == u.rho);
    CHECK_THROWS_AS(evaluate(c, 6.0, 0.0), OutOfWindow);
    CHECK_THROWS_AS(snapshot(c, -1.0), OutOfWindow);

    std::mt19937_64 rng(5);
    RunHistory h = go(g, random_datum(m, rng, 20), 5.0);
    Snapshot s = snapshot(h, 2.5);
    REQUIRE_FALSE(s.x.empty());
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        CHECK(evaluate_id(s, s.x[i]) == s.right[i]);
        if (i > 0) CHECK(s.x[i] >= s.x[i - 1]);
    }
    std::vector<double> xs;
    for (int i = 0; i <= 100; ++i) xs.push_back(-1.5 + 3.0 * i / 100);
    auto p = profile(h, 2.5, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        TrafficState e = evaluate(h, 2.5, xs[i]);
        CHECK(p[i].rho == e.rho);
        CHECK(p[i].v == e.v);
    }
    // the state at t = 0 is the approximated datum
    CHECK(evaluate_id(snapshot(h, 0.0), -100.0) == h.datum.values.front());
    CHECK(l1_distance(g, s, s) == 0.0);
}

TEST_CASE("a priori bounds") {
    std::mt19937_64 rng(31);
    for (const ModelLaws& m : {testing::light(), testing::steep()}) {
        GridMesh g(m, 5);
        const double L_inf = m.linf_bound();
        for (int i = 0; i < 20; ++i) {
            RunHistory h = go(g, random_datum(m, rng, 30), 10.0, true);
            const double L = h.tv0 * m.max_speed();
            for (const auto& f : h.segments) CHECK(m.norm(g.state(f.right)) <= L_inf + 1e-12);
            for (double t : {0.5, 2.0, 7.0}) {
                Snapshot a = snapshot(h, t), b = snapshot(h, t + 1.3);
                CHECK(l1_distance(g, a, b) <= L * 1.3 + 1e-8);
            }
        }
    }
}
