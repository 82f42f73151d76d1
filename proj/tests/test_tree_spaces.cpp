#include "relhyp/generators.hpp"
#include "relhyp/tree_spaces.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace relhyp;
namespace orc = test_oracles;

namespace {

TreeOfSpaces bad_condition5_instance() {
    // the edge-space member straddles two vertex-space members at one end
    auto y = path_graph(6);
    TreeOfSpaces tos;
    tos.instance_id = "bad5";
    tos.root = 0;
    tos.tree_edges = {{0, 1}};
    VertexSpace v0{y, HoroFamily::build(y, {{"a", {0, 1}}, {"b", {3, 4}}}, Rat(1))};
    VertexSpace v1{y, HoroFamily::build(y, {{"a", {0, 1}}}, Rat(1))};
    tos.vspaces.emplace(0, v0);
    tos.vspaces.emplace(1, v1);
    EdgeSpace e;
    e.v1 = 0;
    e.v2 = 1;
    auto ey = path_graph(6);
    // one edge member whose image covers parts of both members of v0
    e.fam = HoroFamily::build(ey, {{"m", {0, 1, 2, 3}}}, Rat(1));
    e.graph = ey;
    for (int x = 0; x < 6; ++x) {
        e.map1[x] = x;
        e.map2[x] = x;
    }
    tos.espaces.push_back(e);
    return tos;
}

}  // namespace

TEST_CASE("structural validation") {
    auto tos = generate_instance("segment-identity,path:6,1", 1);
    CHECK_NOTHROW(tos.require_well_formed());

    auto broken = tos;
    broken.espaces[0].map1.erase(3);
    CHECK_THROWS_AS(broken.require_well_formed(), std::invalid_argument);

    auto dup = tos;
    dup.espaces[0].map1[3] = dup.espaces[0].map1[2];  // not injective
    CHECK_THROWS_AS(dup.require_well_formed(), std::invalid_argument);
}

TEST_CASE("single-vertex tree validates trivially") {
    auto tos = generate_instance("tree-plain,2,3", 1);
    auto rep = validate(tos);
    CHECK(rep.ok);
    CHECK(rep.map_distortion.empty());
    REQUIRE(rep.properness_X.size() == 1);
    // the identity relation: ambient and intrinsic distances agree
    for (const auto& [M, N] : rep.properness_X[0].rows) CHECK(N <= make_rat(M));
}

TEST_CASE("identity gluings measure as isometries") {
    auto tos = generate_instance("segment-identity,path:6,2", 1);
    auto rep = validate(tos);
    CHECK(rep.ok);
    REQUIRE(rep.map_distortion.size() == 4);
    for (const auto& md : rep.map_distortion) {
        CHECK(md.expansion == Rat(1));
        CHECK(md.contraction == Rat(1));
        CHECK(md.declared_ok);
    }
}

TEST_CASE("automorphism gluings: measured distortion matches an oracle scan") {
    auto tos = generate_instance("segment-automorphism,3,a.ba,1", 1);
    auto rep = validate(tos);
    CHECK(rep.ok);

    const auto& e = tos.espaces[0];
    auto drows = orc::fw_all_pairs(e.graph);
    auto vrows = orc::fw_all_pairs(tos.vspaces.at(1).graph);
    Rat expansion = 0, contraction = 0;
    for (int x = 0; x < e.graph.n; ++x)
        for (int y = x + 1; y < e.graph.n; ++y) {
            Rat dp = vrows[e.map2.at(x)][e.map2.at(y)];
            if (dp / drows[x][y] > expansion) expansion = dp / drows[x][y];
            if (drows[x][y] / dp > contraction) contraction = drows[x][y] / dp;
        }
    bool found = false;
    for (const auto& md : rep.map_distortion)
        if (md.espace_idx == 0 && md.tree_v == 1) {
            CHECK(md.expansion == expansion);
            CHECK(md.contraction == contraction);
            found = true;
        }
    CHECK(found);

    // condition 7: induced coned maps stay uniformly distorted
    CHECK_FALSE(rep.coned_map_distortion.empty());
    for (const auto& md : rep.coned_map_distortion) CHECK(md.expansion <= Rat(6));
}

TEST_CASE("condition-5 violations are itemized") {
    auto rep = validate(bad_condition5_instance());
    CHECK_FALSE(rep.ok);
    CHECK_FALSE(rep.failures.empty());
}

TEST_CASE("assembled total space") {
    auto tos = generate_instance("segment-identity,path:6,1", 1);
    auto X = assemble_total(tos);
    CHECK(X.graph.n == 12);
    // the rung is the shortest route between the two copies of one vertex
    for (int x = 0; x < 6; ++x) CHECK(distance(X.graph, x, X.global_id(1, x)) == Rat(1));

    auto single = generate_instance("tree-plain,2,2", 1);
    auto X1 = assemble_total(single);
    CHECK(X1.graph.n == 7);

    // oracle check on a three-space segment of balls
    auto tri = generate_instance("segment-identity,ball:2,2", 1);
    auto X3 = assemble_total(tri);
    auto want = orc::fw_all_pairs(X3.graph);
    for (int u = 0; u < X3.graph.n; u += 7)
        for (int v = 0; v < X3.graph.n; v += 11) CHECK(distance(X3.graph, u, v) == want[u][v]);
}

TEST_CASE("induced coned tree") {
    // no members anywhere: TC(X) is X itself
    auto plain = generate_instance("segment-identity,path:6,1", 1);
    auto X = assemble_total(plain);
    auto TC = induced_coned_tree(plain);
    CHECK(TC.graph.n == X.graph.n);
    for (int u = 0; u < X.graph.n; u += 2)
        for (int v = 0; v < X.graph.n; v += 3)
            CHECK(distance(TC.graph, u, v) == distance(X.graph, u, v));

    // single vertex: TC(X) is the electrified root space
    auto single = generate_instance("free-peripheral,2", 1);
    auto TC1 = induced_coned_tree(single);
    auto cs = cone_off(single.vspaces.at(0).graph, single.vspaces.at(0).fam);
    CHECK(TC1.graph.n == cs.graph.n);
    for (int u = 0; u < cs.graph.n; u += 3)
        for (int v = 0; v < cs.graph.n; v += 5)
            CHECK(distance(TC1.graph, u, v) == distance(cs.graph, u, v));
}

TEST_CASE("cone locus structure") {
    auto none = generate_instance("segment-identity,path:6,1", 1);
    auto Xn = assemble_total(none);
    CHECK(cone_locus(none, Xn).nodes.empty());

    auto single = generate_instance("free-peripheral,2", 1);
    auto Xs = assemble_total(single);
    auto locus = cone_locus(single, Xs);
    int members = single.vspaces.at(0).fam.member_count();
    CHECK(static_cast<int>(locus.nodes.size()) == members);
    CHECK(locus.edges.empty());
    CHECK(static_cast<int>(locus.components.size()) == members);

    // identity segment: each component pairs the same member on both sides
    auto seg = generate_instance("segment-identity,ball:2,1", 1);
    auto Xg = assemble_total(seg);
    auto lseg = cone_locus(seg, Xg);
    int m = seg.vspaces.at(0).fam.member_count();
    CHECK(static_cast<int>(lseg.components.size()) == m);
    for (const auto& comp : lseg.components) {
        CHECK(comp.nodes.size() == 2);
        CHECK(comp.t_alpha.n == 2);
        // the collapse map sends every member vertex to its tree node
        for (const auto& [gid, t] : comp.g_alpha) {
            CHECK(t >= 0);
            CHECK(t < comp.t_alpha.n);
        }
    }

    // two edge members into one vertex member: the locus would close a loop
    auto y = path_graph(8);
    TreeOfSpaces cyc;
    cyc.instance_id = "cyc";
    cyc.root = 0;
    cyc.tree_edges = {{0, 1}};
    cyc.vspaces.emplace(0, VertexSpace{y, HoroFamily::build(y, {{"a", {0, 1, 2, 3}}}, Rat(1))});
    cyc.vspaces.emplace(1, VertexSpace{y, HoroFamily::build(y, {{"a", {0, 1, 2, 3}}}, Rat(1))});
    EdgeSpace e;
    e.v1 = 0;
    e.v2 = 1;
    e.graph = path_graph(8);
    e.fam = HoroFamily::build(e.graph, {{"m1", {0, 1}}, {"m2", {3}}}, Rat(1));
    for (int x = 0; x < 8; ++x) {
        e.map1[x] = x;
        e.map2[x] = x;
    }
    cyc.espaces.push_back(e);
    CHECK_THROWS_AS(cone_locus(cyc, assemble_total(cyc)), std::domain_error);
}

TEST_CASE("TC(X) agrees with the partial electrocution along the cone subtrees") {
    auto tos = generate_instance("segment-identity,ball:2,1", 1);
    auto X = assemble_total(tos);
    auto TC = induced_coned_tree(tos);
    auto locus = cone_locus(tos, X);
    auto pe = tc_as_partial_electrocution(tos, X, locus);

    Rat two = 2;
    for (int u = 0; u < X.graph.n; u += 3)
        for (int v = u + 1; v < X.graph.n; v += 5) {
            int cu = TC.global_id(X.space_of[u], X.local_of[u]);
            int cv = TC.global_id(X.space_of[v], X.local_of[v]);
            Rat d1 = distance(TC.graph, cu, cv);
            Rat d2 = distance(pe.graph, u, v);
            Rat diff = d1 > d2 ? d1 - d2 : d2 - d1;
            CHECK(diff <= two);
        }
}

TEST_CASE("properness tables are monotone and finite") {
    auto tos = generate_instance("segment-automorphism,3,a.ba,1", 1);
    auto rep = validate(tos);
    CHECK(rep.ok);
    for (const auto& tab : {rep.properness_X, rep.properness_TC})
        for (const auto& t : tab) {
            Rat prev = 0;
            for (const auto& [M, N] : t.rows) {
                CHECK(N >= prev);
                prev = N;
            }
        }
}

TEST_CASE("edge-image quasiconvexity is measurable and small on identity gluings") {
    auto tos = generate_instance("segment-identity,ball:2,1", 1);
    auto geo_gs = glue_cones(tos.vspaces.at(0).graph, tos.vspaces.at(0).fam,
                             default_horoball_depth(tos.vspaces.at(0).graph, tos.vspaces.at(0).fam));
    Rat q = measure_edge_image_quasiconvexity(tos, geo_gs, 0, 0, 200, 3);
    CHECK(q == Rat(0));  // the image is everything
}
