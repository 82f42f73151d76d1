#include "relhyp/electric.hpp"
#include "relhyp/generators.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace relhyp;
namespace orc = test_oracles;

namespace {

// host path with one member covering every vertex
struct PathWithMember {
    MetricGraph host;
    HoroFamily fam;
    PathWithMember(int n)
        : host(path_graph(n)),
          fam(HoroFamily::build(host, {{"all", [n] {
                                            std::vector<int> v(n);
                                            for (int i = 0; i < n; ++i) v[i] = i;
                                            return v;
                                        }()}},
                                Rat(1))) {}
};

}  // namespace

TEST_CASE("family validation") {
    auto p = path_graph(8);
    CHECK_THROWS_AS(HoroFamily::build(p, {{"x", {0, 1}}, {"y", {1, 2}}}, Rat(1)),
                    std::invalid_argument);  // overlap
    CHECK_THROWS_AS(HoroFamily::build(p, {{"x", {0, 1}}, {"y", {2, 3}}}, Rat(2)),
                    std::invalid_argument);  // separation 1 < 2
    CHECK_THROWS_AS(HoroFamily::build(p, {{"x", {}}}, Rat(1)), std::invalid_argument);
    CHECK_NOTHROW(HoroFamily::build(p, {{"x", {0, 1}}, {"y", {3, 4}}}, Rat(2)));
}

TEST_CASE("coning: empty family is the identity, a full member collapses") {
    auto p = path_graph(11);
    auto empty = HoroFamily::build(p, {}, Rat(1));
    auto cs0 = cone_off(p, empty);
    CHECK(cs0.graph.n == p.n);
    for (int u = 0; u < p.n; u += 2)
        for (int v = 0; v < p.n; v += 3) CHECK(distance(cs0.graph, u, v) == distance(p, u, v));

    PathWithMember pm(11);
    auto cs = cone_off(pm.host, pm.fam);
    CHECK(distance(cs.graph, 0, 10) == Rat(1));  // two half edges through the cone
    // coning never increases distances
    for (int u = 0; u < 11; ++u)
        for (int v = 0; v < 11; ++v) CHECK(distance(cs.graph, u, v) <= distance(pm.host, u, v));
}

TEST_CASE("electric distances match an oracle on the explicit coned graph") {
    auto ball = free_group_ball(3);
    auto fam = a_coset_family(ball);
    auto cs = cone_off(ball.graph, fam);
    auto want = orc::fw_all_pairs(cs.graph);
    for (int u = 0; u < cs.graph.n; u += 7)
        for (int v = 0; v < cs.graph.n; v += 5) CHECK(distance(cs.graph, u, v) == want[u][v]);
}

TEST_CASE("standalone horoballs") {
    auto host = MetricGraph::build("seg8", 2, {{0, 1, Rat(8)}});
    auto fam = HoroFamily::build(host, {{"m", {0, 1}}}, Rat(1));

    CHECK_THROWS_AS(build_horoball(host, fam, 0, 0), std::domain_error);

    auto hb = build_horoball(host, fam, 0, 3);
    // up three levels, across at the top, back down
    CHECK(distance(hb, 0, 1) == Rat(7));
    CHECK(distance(hb, 0, 1) == orc::fw_all_pairs(hb)[0][1]);

    // vertical distance to one's own copy is exactly the level gap
    for (int k = 1; k <= 3; ++k) CHECK(distance(hb, 0, 2 * k) == Rat(k));

    // adjacent pair at intrinsic distance 1 keeps its level-0 edge
    auto host2 = path_graph(2);
    auto fam2 = HoroFamily::build(host2, {{"m", {0, 1}}}, Rat(1));
    auto hb2 = build_horoball(host2, fam2, 0, 1);
    CHECK(hb2.edge_length(0, 1) == Rat(1));

    // disconnected member has no intrinsic metric
    auto host3 = path_graph(5);
    auto fam3 = HoroFamily::build(host3, {{"m", {0, 4}}}, Rat(1));
    CHECK_THROWS_AS(build_horoball(host3, fam3, 0, 2), std::domain_error);
}

TEST_CASE("glued spaces: identification and the distance envelope") {
    auto p = path_graph(9);
    auto empty = HoroFamily::build(p, {}, Rat(1));
    auto gs0 = glue_cones(p, empty, 1);
    CHECK(gs0.graph.n == p.n);

    auto ball = free_group_ball(3);
    auto fam = a_coset_family(ball);
    int depth = default_horoball_depth(ball.graph, fam);
    auto gs = glue_cones(ball.graph, fam, depth);
    CHECK(gs.host_n == ball.graph.n);

    // envelope: d(u0, v0) <= 2*depth + ceil(d_H / 2^depth), and >= 1
    for (int mi = 0; mi < fam.member_count(); ++mi) {
        auto mg = member_geometry(ball.graph, fam, mi);
        int m = static_cast<int>(mg.verts.size());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                Rat d = distance(gs.graph, mg.verts[i], mg.verts[j]);
                CHECK(d >= Rat(1));
                Rat hops = mg.dist[i][j] / pow2_rat(depth);
                mpz_class c;
                mpz_cdiv_q(c.get_mpz_t(), hops.get_num().get_mpz_t(), hops.get_den().get_mpz_t());
                CHECK(d <= Rat(2 * depth) + Rat(c));
            }
    }
}

TEST_CASE("electric geodesics avoid returning to members") {
    PathWithMember pm(11);
    auto cs = cone_off(pm.host, pm.fam);
    auto lam = electric_geodesic_nb(cs, 0, 10);
    CHECK(lam.verts == std::vector<int>{0, cs.cone_vertex[0], 10});
    CHECK(lam.length == Rat(1));
    CHECK(lam.quality == Rat(1));

    auto p = path_graph(7);
    auto empty = HoroFamily::build(p, {}, Rat(1));
    auto cs0 = cone_off(p, empty);
    CHECK(electric_geodesic_nb(cs0, 1, 5).verts == geodesic(p, 1, 5).verts);

    auto ball = free_group_ball(3);
    auto fam = a_coset_family(ball);
    auto cs2 = cone_off(ball.graph, fam);
    auto owner = fam.membership(ball.graph.n);
    int checked = 0;
    for (int u = 0; u < ball.graph.n && checked < 40; u += 3)
        for (int v = 1; v < ball.graph.n && checked < 40; v += 5) {
            if (u == v) continue;
            auto g = electric_geodesic_nb(cs2, u, v);
            CHECK_FALSE(penetration_profile_coned(cs2, g).backtracks);
            ++checked;
        }
    CHECK_THROWS_AS(electric_geodesic_nb(cs2, cs2.cone_vertex[0], 0), std::domain_error);
}

TEST_CASE("penetration profiles") {
    auto p = path_graph(12);
    auto fam = HoroFamily::build(p, {{"a", {3, 4, 5}}, {"b", {8, 9}}}, Rat(1));

    auto off = make_path(p, {0, 1, 2});
    auto prof0 = penetration_profile_host(p, fam, off);
    CHECK(prof0.visits.empty());
    CHECK_FALSE(prof0.backtracks);

    auto inside = make_path(p, {3, 4, 5});
    auto prof1 = penetration_profile_host(p, fam, inside);
    REQUIRE(prof1.visits.size() == 1);
    CHECK(prof1.visits[0].entry == 3);
    CHECK(prof1.visits[0].exit == 5);
    CHECK(prof1.visits[0].intrinsic_span == Rat(2));

    auto across = make_path(p, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    auto prof2 = penetration_profile_host(p, fam, across);
    REQUIRE(prof2.visits.size() == 2);
    CHECK(prof2.visits[0].member_name == "a");
    CHECK(prof2.visits[1].member_name == "b");
    CHECK_FALSE(prof2.backtracks);

    auto back = make_path(p, {3, 4, 5, 6, 5, 4});
    auto prof3 = penetration_profile_host(p, fam, back);
    CHECK(prof3.backtracks);

    // membership-scan oracle on electric geodesics of a ball
    auto ball = free_group_ball(3);
    auto bfam = a_coset_family(ball);
    auto cs = cone_off(ball.graph, bfam);
    auto owner = bfam.membership(ball.graph.n);
    auto lam = electric_geodesic_nb(cs, 0, ball.graph.n - 1);
    auto prof = penetration_profile_coned(cs, lam);
    std::vector<int> want_members;
    int prev = -1;
    for (int w : lam.verts) {
        int mi = cs.member_of[w] >= 0 ? cs.member_of[w] : cs.cone_member[w];
        if (mi >= 0 && mi != prev) want_members.push_back(mi);
        prev = mi;
    }
    REQUIRE(prof.visits.size() == want_members.size());
    for (size_t i = 0; i < want_members.size(); ++i) CHECK(prof.visits[i].member_idx == want_members[i]);
}

TEST_CASE("electro-ambient representatives") {
    PathWithMember pm(11);
    auto cs = cone_off(pm.host, pm.fam);
    auto gs = glue_cones(pm.host, pm.fam, default_horoball_depth(pm.host, pm.fam));

    // a path that misses every member survives unchanged
    auto p9 = path_graph(9);
    auto e9 = HoroFamily::build(p9, {}, Rat(1));
    auto cs9 = cone_off(p9, e9);
    auto gs9 = glue_cones(p9, e9, 1);
    auto lam9 = electric_geodesic_nb(cs9, 0, 8);
    auto ea9 = electro_ambient(cs9, gs9, lam9);
    CHECK(ea9.path.verts == lam9.verts);

    // the cone detour of the full-member path is replaced by the horoball
    // geodesic between entry 0 and exit 10, which climbs two levels and
    // crosses in hops of at most four
    auto lam = electric_geodesic_nb(cs, 0, 10);
    auto ea = electro_ambient(cs, gs, lam);
    auto mask = gs.horoball_mask(0);
    auto want = geodesic_restricted(gs.graph, 0, 10, mask);
    CHECK(ea.path.length == want.length);
    CHECK(ea.path.length == Rat(7));
    CHECK(ea.path.verts.front() == 0);
    CHECK(ea.path.verts.back() == 10);
    REQUIRE(ea.segments.size() == 1);
    CHECK(ea.segments[0].used_cone);

    // a backtracking input is rejected
    auto p = path_graph(12);
    auto fam = HoroFamily::build(p, {{"a", {3, 4, 5}}}, Rat(1));
    auto cs2 = cone_off(p, fam);
    auto gs2 = glue_cones(p, fam, 2);
    auto bad = make_path(cs2.graph, {2, 3, 4, 5, 6, 5, 4});
    CHECK_THROWS_AS(electro_ambient(cs2, gs2, bad), std::domain_error);
}

TEST_CASE("electro-ambient quality stays bounded across the ball family") {
    Rat worst = 0;
    for (int radius : {2, 3}) {
        auto ball = free_group_ball(radius);
        auto fam = a_coset_family(ball);
        auto cs = cone_off(ball.graph, fam);
        auto gs = glue_cones(ball.graph, fam, default_horoball_depth(ball.graph, fam));
        int checked = 0;
        for (int u = 0; u < ball.graph.n && checked < 12; u += 5)
            for (int v = 2; v < ball.graph.n && checked < 12; v += 7) {
                if (u == v) continue;
                auto lam = electric_geodesic_nb(cs, u, v);
                auto ea = electro_ambient(cs, gs, lam);
                REQUIRE(ea.path.quality.has_value());
                if (*ea.path.quality > worst) worst = *ea.path.quality;
                ++checked;
            }
    }
    CHECK(worst <= Rat(4));
}

TEST_CASE("tripod tracking stays bounded across the glued ball family") {
    Rat worst = 0;
    for (int radius : {2, 3}) {
        auto ball = free_group_ball(radius);
        auto fam = a_coset_family(ball);
        auto gs = glue_cones(ball.graph, fam, default_horoball_depth(ball.graph, fam));
        auto lam = geodesic(gs.graph, 0, ball.graph.n - 1);
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < gs.graph.n; x += 7)
            for (int y = 3; y < gs.graph.n; y += 11) pairs.emplace_back(x, y);
        Rat c1 = measure_tripod_tracking(gs.graph, lam, Rat(2), pairs);
        if (c1 > worst) worst = c1;
    }
    CHECK(worst <= Rat(3));
}

TEST_CASE("electric geodesics track glued geodesics off horoballs") {
    Rat worst = 0;
    for (int radius : {2, 3}) {
        auto ball = free_group_ball(radius);
        auto fam = a_coset_family(ball);
        auto cs = cone_off(ball.graph, fam);
        auto gs = glue_cones(ball.graph, fam, default_horoball_depth(ball.graph, fam));
        int checked = 0;
        for (int u = 0; u < ball.graph.n && checked < 10; u += 5)
            for (int v = 2; v < ball.graph.n && checked < 10; v += 9) {
                if (u == v) continue;
                auto lam = electric_geodesic_nb(cs, u, v);
                auto glued = geodesic(gs.graph, u, v);
                // shadow the glued geodesic into the coned space and measure
                // how far the electric geodesic strays from it
                std::vector<int> shadow;
                for (int w : glued.verts) shadow.push_back(shadow_to_coned(gs, w));
                auto to_shadow = sssp_multi(cs.graph, shadow);
                for (int w : lam.verts)
                    if (to_shadow[w] > worst) worst = to_shadow[w];
                ++checked;
            }
    }
    CHECK(worst <= Rat(2));
}

TEST_CASE("horoballs are quasiconvex in the glued space") {
    Rat worst = 0;
    for (int radius : {2, 3}) {
        auto ball = free_group_ball(radius);
        auto fam = a_coset_family(ball);
        auto gs = glue_cones(ball.graph, fam, default_horoball_depth(ball.graph, fam));
        for (int mi = 0; mi < std::min(4, fam.member_count()); ++mi) {
            std::vector<int> region;
            for (int v = 0; v < gs.graph.n; ++v)
                if (gs.member_of[v] == mi) region.push_back(v);
            auto to_region = sssp_multi(gs.graph, region);
            for (size_t i = 0; i < region.size(); i += 3)
                for (size_t j = i + 1; j < region.size(); j += 5) {
                    auto g = geodesic(gs.graph, region[i], region[j]);
                    for (int w : g.verts)
                        if (to_region[w] > worst) worst = to_region[w];
                }
        }
    }
    CHECK(worst <= Rat(1));
}

TEST_CASE("electric projection") {
    PathWithMember pm(11);
    auto cs = cone_off(pm.host, pm.fam);
    auto gs = glue_cones(pm.host, pm.fam, default_horoball_depth(pm.host, pm.fam));
    auto lam = electric_geodesic_nb(cs, 0, 10);
    auto mu = electro_ambient(cs, gs, lam);

    CHECK(electric_projection(cs, gs, 0, mu) == 0);  // already on mu

    // a cone over a singleton member projects through its only point
    auto p = path_graph(9);
    auto fam = HoroFamily::build(p, {{"s", {4}}}, Rat(1));
    auto cs2 = cone_off(p, fam);
    auto gs2 = glue_cones(p, fam, 1);
    auto lam2 = electric_geodesic_nb(cs2, 0, 2);
    auto mu2 = electro_ambient(cs2, gs2, lam2);
    CHECK(electric_projection(cs2, gs2, cs2.cone_vertex[0], mu2) ==
          electric_projection(cs2, gs2, 4, mu2));
}

TEST_CASE("cone representatives disagree by a bounded amount") {
    // projections of two member representatives into the coned
    // shadow stay within a small constant
    auto ball = free_group_ball(3);
    auto fam = a_coset_family(ball);
    auto cs = cone_off(ball.graph, fam);
    auto gs = glue_cones(ball.graph, fam, default_horoball_depth(ball.graph, fam));
    auto owner = fam.membership(ball.graph.n);
    int a = -1, b = -1;
    for (int v = ball.graph.n - 1; v >= 0 && (a < 0 || b < 0); --v)
        if (owner[v] < 0) (a < 0 ? a : b) = v;
    auto lam = electric_geodesic_nb(cs, b, a);
    auto mu = electro_ambient(cs, gs, lam);

    Rat p3 = 0;
    for (int mi = 0; mi < std::min(6, fam.member_count()); ++mi) {
        const auto& mem = fam.member(mi);
        std::vector<int> projs;
        for (int z : mem) projs.push_back(shadow_to_coned(gs, electric_projection(cs, gs, z, mu)));
        for (size_t i = 0; i < projs.size(); ++i)
            for (size_t j = i + 1; j < projs.size(); ++j) {
                Rat d = distance(cs.graph, projs[i], projs[j]);
                if (d > p3) p3 = d;
            }
    }
    CHECK(p3 <= Rat(3));
}

TEST_CASE("similar intersection patterns") {
    auto p = path_graph(12);
    auto fam = HoroFamily::build(p, {{"a", {3, 4, 5}}, {"b", {8, 9}}}, Rat(1));

    auto q1 = make_path(p, {1, 2, 3, 4, 5, 6, 7});
    auto prof1 = penetration_profile_host(p, fam, q1);
    CHECK(check_similar_intersections(p, fam, q1, prof1, q1, prof1) == Rat(0));

    auto off1 = make_path(p, {0, 1, 2});
    auto offp = penetration_profile_host(p, fam, off1);
    CHECK(check_similar_intersections(p, fam, off1, offp, off1, offp) == Rat(0));

    // q2 enters the member one step later and leaves one step earlier
    auto host = MetricGraph::build("loop", 8,
                                   {{0, 1, Rat(1)},
                                    {1, 2, Rat(1)},
                                    {2, 3, Rat(1)},
                                    {3, 4, Rat(1)},
                                    {0, 5, Rat(1)},
                                    {5, 6, Rat(1)},
                                    {6, 7, Rat(1)},
                                    {7, 4, Rat(1)}});
    auto r1 = make_path(host, {0, 1, 2, 3, 4});
    auto r2 = make_path(host, {0, 5, 6, 7, 4});

    // a disconnected member has no intrinsic metric, so profiling refuses
    auto hfam = HoroFamily::build(host, {{"m", {1, 2, 3, 6}}}, Rat(1));
    CHECK_THROWS_AS(penetration_profile_host(host, hfam, r1), std::domain_error);

    auto hfam2 = HoroFamily::build(host, {{"m", {1, 2, 3}}}, Rat(1));
    auto pr1b = penetration_profile_host(host, hfam2, r1);
    auto pr2b = penetration_profile_host(host, hfam2, r2);
    // only r1 meets the member: the bound is its intrinsic span
    CHECK(check_similar_intersections(host, hfam2, r1, pr1b, r2, pr2b) == Rat(2));

    CHECK_THROWS_AS(check_similar_intersections(host, hfam2, r1, pr1b, off1, offp),
                    std::domain_error);  // different endpoints
}
