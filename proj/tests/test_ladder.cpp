#include "relhyp/generators.hpp"
#include "relhyp/ladder.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace relhyp;
namespace orc = test_oracles;

namespace {

// the deterministic far-apart off-member pair used by the harness
std::pair<int, int> far_pair(const MetricGraph& g, const HoroFamily& fam) {
    auto owner = fam.membership(g.n);
    auto rows = all_pairs(g);
    Rat best = -1;
    std::pair<int, int> out{-1, -1};
    for (int u = 0; u < g.n; ++u) {
        if (owner[u] >= 0) continue;
        for (int v = u + 1; v < g.n; ++v) {
            if (owner[v] >= 0) continue;
            if (rows[u][v] > best) {
                best = rows[u][v];
                out = {u, v};
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("geometry params derive D and C") {
    GeometryParams p;
    CHECK_THROWS_AS(p.effective_D(), std::invalid_argument);
    p.delta = ParamValue::measured_on(make_rat(3, 2), "inst");
    CHECK(p.effective_D() == Rat(7));  // 4*delta + 1
    p.D = ParamValue::configured(Rat(2));
    CHECK(p.effective_D() == Rat(2));

    CHECK_THROWS_AS(p.effective_C(), std::invalid_argument);
    p.C1 = ParamValue::measured_on(Rat(1), "inst");
    p.C2 = ParamValue::measured_on(Rat(2), "inst");
    CHECK(p.effective_C() == Rat(3));
    // a configured override wins over measured components
    p.C_override = ParamValue::configured(Rat(5));
    CHECK(p.effective_C() == Rat(5));
    // two configured decompositions must agree exactly
    p.C1 = ParamValue::configured(Rat(1));
    p.C2 = ParamValue::configured(Rat(1));
    CHECK_THROWS_AS(p.effective_C(), std::invalid_argument);
}

TEST_CASE("phi_map follows the association tables") {
    auto tos = generate_instance("segment-identity,path:9,1", 1);
    for (int p = 0; p < 9; ++p) CHECK(phi_map(tos, 1, 0, p) == p);

    auto aut = generate_instance("segment-automorphism,3,a.ba,1", 1);
    const auto& e = aut.espaces[0];
    // table lookup oracle: the image of the inclusion at end 0 flows to the
    // image of the twisted map at end 1
    for (const auto& [x, p] : e.map1) CHECK(phi_map(aut, 1, 0, p) == e.map2.at(x));
    // a vertex outside the edge image is rejected
    int non_image = -1;
    {
        std::vector<char> hit(aut.vspaces.at(0).graph.n, 0);
        for (const auto& [x, p] : e.map1) hit[p] = 1;
        for (int v = 0; v < static_cast<int>(hit.size()); ++v)
            if (!hit[v]) {
                non_image = v;
                break;
            }
    }
    REQUIRE(non_image >= 0);
    CHECK_THROWS_AS(phi_map(aut, 1, 0, non_image), std::domain_error);
}

TEST_CASE("ladder over a single-vertex base tree") {
    auto tos = generate_instance("tree-plain,2,3", 1);
    auto geo = build_tree_geometry(tos, 0);
    auto lam = electric_geodesic_nb(geo.coned(0), 7, 14);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));
    CHECK(lad.T1 == std::set<int>{0});
    CHECK(lad.growth.size() == 1);
    CHECK(lad.B_tc.size() == lam.verts.size());
}

TEST_CASE("identity segment: the ladder carries the geodesic across") {
    auto tos = generate_instance("segment-identity,path:9,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    auto lam = electric_geodesic_nb(geo.coned(0), 0, 8);

    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));
    CHECK(lad.T1 == std::set<int>{0, 1});
    REQUIRE(lad.subpieces.count(0));
    const auto& rec = lad.subpieces.at(0)[0];
    // the maximal pair in the whole-space image is the diameter pair
    CHECK(rec.p_e == 0);
    CHECK(rec.q_e == 8);
    CHECK(rec.coned_separation == Rat(8));
    CHECK(lad.lambda_v.at(1).verts == lam.verts);  // identical copy

    // a too-large threshold stops the descent
    auto lad2 = build_ladder(geo, lam, Rat(100), Rat(0));
    CHECK(lad2.T1 == std::set<int>{0});

    // monotone growth: stages partition the support
    size_t total = 0;
    for (const auto& st : lad.growth) total += st.size();
    CHECK(total == lad.T1.size());

    CHECK_THROWS_AS(build_ladder(geo, lam, Rat(-1), Rat(0)), std::invalid_argument);
}

TEST_CASE("retraction on a tree-shaped root space is the tree projection") {
    auto tos = generate_instance("tree-plain,2,3", 1);
    auto geo = build_tree_geometry(tos, 0);
    auto lam = electric_geodesic_nb(geo.coned(0), 7, 14);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));

    // a point of the segment retracts to itself
    for (int w : lam.verts) CHECK(retract(geo, lad, w) == w);

    auto sweep = measure_retraction_lipschitz(geo, lad);
    CHECK(sweep.C0 <= Rat(1));  // projections in trees are 1-Lipschitz
    CHECK(sweep.K1 == Rat(0));  // single vertex space: no cross-space pairs
    CHECK(sweep.K2 == Rat(0));
}

TEST_CASE("retraction across the identity segment") {
    auto tos = generate_instance("segment-identity,path:9,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    auto lam = electric_geodesic_nb(geo.coned(0), 0, 8);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));

    auto sweep = measure_retraction_lipschitz(geo, lad);
    CHECK(sweep.C0 == Rat(1));
    CHECK(sweep.pairs > 0);
}

TEST_CASE("subpiece constants vanish on the identity segment") {
    auto tos = generate_instance("segment-identity,path:9,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    auto lam = electric_geodesic_nb(geo.coned(0), 0, 8);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));
    auto sc = measure_subpiece_constants(geo, lad);
    CHECK(sc.P2 == Rat(0));
    CHECK(sc.P5 == Rat(0));
    CHECK(sc.P6 == Rat(0));
    CHECK(sc.P7 == Rat(0));
    CHECK(lad.subpieces.at(0)[0].p6 == Rat(0));
}

TEST_CASE("subpiece constants stay bounded on the twisted segment") {
    auto tos = generate_instance("segment-automorphism,3,a.B,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    const auto& vs = tos.vspaces.at(0);
    auto [a, b] = far_pair(vs.graph, vs.fam);
    auto lam = electric_geodesic_nb(geo.coned(0), a, b);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(2));
    REQUIRE(!lad.subpieces.empty());
    auto sc = measure_subpiece_constants(geo, lad);
    CHECK(sc.P6 <= Rat(3));
    CHECK(sc.P7 <= Rat(4));
    CHECK(sc.P2 <= Rat(4));
    CHECK(sc.P5 <= Rat(4));
}

TEST_CASE("vertical rays on the identity segment step along rungs") {
    auto tos = generate_instance("segment-identity,path:9,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    auto lam = electric_geodesic_nb(geo.coned(0), 0, 8);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));

    // trivial ray at the root
    auto r0 = vertical_ray(geo, lad, 0, 4);
    CHECK(r0.tree_path == std::vector<int>{0});
    CHECK(r0.displacement.empty());

    for (int x : lad.lambda_b_v.at(1)) {
        auto ray = vertical_ray(geo, lad, 1, x);
        REQUIRE(ray.displacement.size() == 1);
        CHECK(ray.displacement[0] == Rat(1));                    // one rung
        CHECK(ray.points_X.back() == x);                          // the identical copy
        CHECK(geo.X.space_of[ray.points_X.back()] == 0);
    }

    CHECK_THROWS_AS(vertical_ray(geo, lad, 1, 1000), std::domain_error);
}

TEST_CASE("vertical rays stay within measured bounds on the twisted segment") {
    // the length-preserving twist keeps the edge space boundary-reaching,
    // so the carried segment has off-horoball points and nontrivial rays
    auto tos = generate_instance("segment-automorphism,3,a.B,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    const auto& vs = tos.vspaces.at(0);
    auto [a, b] = far_pair(vs.graph, vs.fam);
    auto lam = electric_geodesic_nb(geo.coned(0), a, b);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(2));
    REQUIRE(lad.T1.size() == 2);

    Rat worst = 0;
    int rays = 0;
    for (int v : lad.T1) {
        if (v == 0) continue;
        for (int x : lad.lambda_b_v.at(v)) {
            auto ray = vertical_ray(geo, lad, v, x);
            for (const auto& d : ray.displacement) {
                CHECK(d >= Rat(1));
                if (d > worst) worst = d;
            }
            ++rays;
        }
    }
    CHECK(rays > 0);
    CHECK(worst <= Rat(8));
}

TEST_CASE("depth escape") {
    auto tos = generate_instance("segment-identity,path:9,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    // a segment clear of the reference point
    auto lam = electric_geodesic_nb(geo.coned(0), 4, 8);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(0));

    for (long long n = 2; n <= 4; ++n) {
        auto res = check_depth_escape(geo, lad, 0, n, Rat(1));
        CHECK(res.pass);
        CHECK(res.bound == make_rat(n, 2));
    }

    // precondition: the root segment must clear the n-ball
    CHECK_THROWS_AS(check_depth_escape(geo, lad, 0, 6, Rat(1)), std::domain_error);
    // reference point inside a member is refused
    auto ball = generate_instance("free-peripheral,2", 1);
    auto geob = build_tree_geometry(ball, 0);
    const auto& fam = ball.vspaces.at(0).fam;
    auto lamb = electric_geodesic_nb(geob.coned(0), far_pair(ball.vspaces.at(0).graph, fam).first,
                                     far_pair(ball.vspaces.at(0).graph, fam).second);
    auto ladb = build_ladder(geob, lamb, Rat(1), Rat(1));
    CHECK_THROWS_AS(check_depth_escape(geob, ladb, fam.member(0).front(), 1, Rat(1)),
                    std::domain_error);
}

TEST_CASE("the ladder is quasiconvex in TC(X)") {
    auto tos = generate_instance("segment-identity,ball:2,1", 1);
    auto geo = build_tree_geometry(tos, 0);
    const auto& vs = tos.vspaces.at(0);
    auto [a, b] = far_pair(vs.graph, vs.fam);
    auto lam = electric_geodesic_nb(geo.coned(0), a, b);
    auto lad = build_ladder(geo, lam, Rat(1), Rat(2));

    auto to_ladder = sssp_multi(geo.TC.graph, lad.B_tc);
    Rat worst = 0;
    int checked = 0;
    for (size_t i = 0; i < lad.B_tc.size() && checked < 30; i += 3)
        for (size_t j = i + 2; j < lad.B_tc.size() && checked < 30; j += 5) {
            auto g = geodesic(geo.TC.graph, lad.B_tc[i], lad.B_tc[j]);
            for (int w : g.verts)
                if (to_ladder[w] > worst) worst = to_ladder[w];
            ++checked;
        }
    CHECK(checked > 0);
    CHECK(worst <= Rat(4));
}
