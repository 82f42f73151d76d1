#include "relhyp/tree_spaces.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace relhyp {

// --------------------------------------------------------------------------
// TreeOfSpaces structure
// --------------------------------------------------------------------------

std::vector<int> TreeOfSpaces::tree_vertices() const {
    std::vector<int> vs;
    vs.reserve(vspaces.size());
    for (const auto& [v, _] : vspaces) vs.push_back(v);
    return vs;
}

std::vector<int> TreeOfSpaces::tree_neighbors(int v) const {
    std::vector<int> out;
    for (const auto& [a, b] : tree_edges) {
        if (a == v) out.push_back(b);
        if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int TreeOfSpaces::edge_between(int a, int b) const {
    for (size_t i = 0; i < espaces.size(); ++i) {
        const auto& e = espaces[i];
        if ((e.v1 == a && e.v2 == b) || (e.v1 == b && e.v2 == a)) return static_cast<int>(i);
    }
    return -1;
}

const std::map<int, int>& TreeOfSpaces::map_into(int eidx, int tv) const {
    const auto& e = espaces.at(eidx);
    if (tv == e.v1) return e.map1;
    if (tv == e.v2) return e.map2;
    throw std::domain_error("map_into: tree vertex is not an end of this edge space");
}

void TreeOfSpaces::require_well_formed() const {
    if (!vspaces.count(root)) throw std::invalid_argument("TreeOfSpaces: root has no vertex space");
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : tree_edges) {
        if (a == b) throw std::invalid_argument("TreeOfSpaces: base tree self-loop");
        if (!vspaces.count(a) || !vspaces.count(b))
            throw std::invalid_argument("TreeOfSpaces: base tree edge touches unknown vertex");
        if (!seen.insert(std::minmax(a, b)).second)
            throw std::invalid_argument("TreeOfSpaces: duplicate base tree edge");
    }
    if (tree_edges.size() + 1 != vspaces.size())
        throw std::invalid_argument("TreeOfSpaces: base graph is not a tree");
    // connectivity of the base
    std::set<int> vis{root};
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : tree_neighbors(v))
            if (vis.insert(w).second) stack.push_back(w);
    }
    if (vis.size() != vspaces.size()) throw std::invalid_argument("TreeOfSpaces: base tree is disconnected");

    if (espaces.size() != tree_edges.size())
        throw std::invalid_argument("TreeOfSpaces: need exactly one edge space per base tree edge");
    std::set<std::pair<int, int>> covered;
    for (const auto& e : espaces) {
        auto key = std::minmax(e.v1, e.v2);
        if (!seen.count(key))
            throw std::invalid_argument("TreeOfSpaces: edge space over a non-edge of the base tree");
        if (!covered.insert(key).second)
            throw std::invalid_argument("TreeOfSpaces: duplicate edge space");
        for (int end = 0; end < 2; ++end) {
            int tv = end == 0 ? e.v1 : e.v2;
            const auto& f = end == 0 ? e.map1 : e.map2;
            const auto& target = vspaces.at(tv).graph;
            std::set<int> image;
            for (int x = 0; x < e.graph.n; ++x) {
                auto it = f.find(x);
                if (it == f.end())
                    throw std::invalid_argument("TreeOfSpaces: inclusion map not total on edge space");
                if (!target.has_vertex(it->second))
                    throw std::invalid_argument("TreeOfSpaces: inclusion map image out of range");
                if (!image.insert(it->second).second)
                    throw std::invalid_argument("TreeOfSpaces: inclusion map not injective");
            }
        }
    }
}

// --------------------------------------------------------------------------
// Assembly
// --------------------------------------------------------------------------

AssembledSpace assemble_total(const TreeOfSpaces& tos) {
    tos.require_well_formed();
    AssembledSpace X;
    int next = 0;
    for (int tv : tos.tree_vertices()) {
        const auto& g = tos.vspaces.at(tv).graph;
        X.offset[tv] = next;
        for (int v = 0; v < g.n; ++v) {
            X.space_of.push_back(tv);
            X.local_of.push_back(v);
        }
        next += g.n;
    }
    std::vector<std::tuple<int, int, Rat>> edges;
    for (int tv : tos.tree_vertices()) {
        const auto& g = tos.vspaces.at(tv).graph;
        int off = X.offset[tv];
        for (int e = 0; e < g.edge_count(); ++e)
            edges.emplace_back(off + g.edge_ends[e][0], off + g.edge_ends[e][1], g.edge_len[e]);
    }
    Rat one = 1;
    for (const auto& e : tos.espaces)
        for (int x = 0; x < e.graph.n; ++x)
            edges.emplace_back(X.offset[e.v1] + e.map1.at(x), X.offset[e.v2] + e.map2.at(x), one);
    X.graph = MetricGraph::build("X(" + tos.instance_id + ")", next, edges);
    return X;
}

namespace {

// containing vertex-space member of one edge-space member's image, or -1
// when the image is not inside a single member
int containing_member(const VertexSpace& vs, const std::map<int, int>& f,
                      const std::vector<int>& edge_member) {
    auto owner = vs.fam.membership(vs.graph.n);
    int res = -2;
    for (int x : edge_member) {
        int o = owner[f.at(x)];
        if (o < 0) return -1;
        if (res == -2)
            res = o;
        else if (res != o)
            return -1;
    }
    return res;
}

}  // namespace

bool InducedConedTree::is_cone_vertex(int global) const {
    int tv = space_of[global];
    return local_of[global] >= coned.at(tv).host_n;
}

int InducedConedTree::member_at(int global) const {
    int tv = space_of[global];
    int local = local_of[global];
    const auto& cs = coned.at(tv);
    return local < cs.host_n ? cs.member_of[local] : -1;
}

InducedConedTree induced_coned_tree(const TreeOfSpaces& tos) {
    tos.require_well_formed();
    InducedConedTree tc;
    int next = 0;
    for (int tv : tos.tree_vertices()) {
        const auto& vs = tos.vspaces.at(tv);
        tc.coned.emplace(tv, cone_off(vs.graph, vs.fam));
        const auto& cg = tc.coned.at(tv).graph;
        tc.offset[tv] = next;
        for (int v = 0; v < cg.n; ++v) {
            tc.space_of.push_back(tv);
            tc.local_of.push_back(v);
        }
        next += cg.n;
    }
    std::vector<std::tuple<int, int, Rat>> edges;
    for (int tv : tos.tree_vertices()) {
        const auto& cg = tc.coned.at(tv).graph;
        int off = tc.offset[tv];
        for (int e = 0; e < cg.edge_count(); ++e)
            edges.emplace_back(off + cg.edge_ends[e][0], off + cg.edge_ends[e][1], cg.edge_len[e]);
    }
    Rat one = 1;
    for (const auto& e : tos.espaces) {
        for (int x = 0; x < e.graph.n; ++x)
            edges.emplace_back(tc.offset[e.v1] + e.map1.at(x), tc.offset[e.v2] + e.map2.at(x), one);
        // cone rungs: the cone point over an edge-space member flows to the
        // cone points over the two containing vertex-space members
        for (int b = 0; b < e.fam.member_count(); ++b) {
            int a1 = containing_member(tos.vspaces.at(e.v1), e.map1, e.fam.member(b));
            int a2 = containing_member(tos.vspaces.at(e.v2), e.map2, e.fam.member(b));
            if (a1 < 0 || a2 < 0)
                throw std::invalid_argument(
                    "induced_coned_tree: edge-space member '" + e.fam.name(b) +
                    "' does not map into a single vertex-space member (condition violated)");
            edges.emplace_back(tc.offset[e.v1] + tc.coned.at(e.v1).cone_vertex[a1],
                               tc.offset[e.v2] + tc.coned.at(e.v2).cone_vertex[a2], one);
        }
    }
    tc.graph = MetricGraph::build("TC(" + tos.instance_id + ")", next, edges);
    return tc;
}

// --------------------------------------------------------------------------
// Cone locus
// --------------------------------------------------------------------------

ConeLocus cone_locus(const TreeOfSpaces& tos, const AssembledSpace& X) {
    tos.require_well_formed();
    ConeLocus locus;
    std::map<std::pair<int, int>, int> node_idx;  // (tree_v, member) -> node
    for (int tv : tos.tree_vertices()) {
        const auto& vs = tos.vspaces.at(tv);
        for (int m = 0; m < vs.fam.member_count(); ++m) {
            node_idx[{tv, m}] = static_cast<int>(locus.nodes.size());
            locus.nodes.push_back({tv, m, vs.fam.name(m)});
        }
    }
    for (size_t ei = 0; ei < tos.espaces.size(); ++ei) {
        const auto& e = tos.espaces[ei];
        for (int b = 0; b < e.fam.member_count(); ++b) {
            int a1 = containing_member(tos.vspaces.at(e.v1), e.map1, e.fam.member(b));
            int a2 = containing_member(tos.vspaces.at(e.v2), e.map2, e.fam.member(b));
            if (a1 < 0 || a2 < 0)
                throw std::invalid_argument("cone_locus: edge-space member '" + e.fam.name(b) +
                                            "' does not map into a single vertex-space member");
            locus.edges.push_back({static_cast<int>(ei), b, node_idx.at({e.v1, a1}),
                                   node_idx.at({e.v2, a2})});
        }
    }

    // forest check by union-find
    std::vector<int> parent(locus.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& le : locus.edges) {
        int ra = find(le.node_a), rb = find(le.node_b);
        if (ra == rb)
            throw std::domain_error("cone_locus: cycle detected (two members of one edge space "
                                    "map into the same vertex-space member)");
        parent[ra] = rb;
    }

    // components in node-index order
    std::map<int, std::vector<int>> comps;
    for (size_t i = 0; i < locus.nodes.size(); ++i) comps[find(static_cast<int>(i))].push_back(static_cast<int>(i));
    for (auto& [_, nodes] : comps) {
        ConeLocus::Component comp;
        comp.nodes = nodes;
        std::map<int, int> pos;  // node idx -> position within component
        for (size_t i = 0; i < nodes.size(); ++i) pos[nodes[i]] = static_cast<int>(i);
        std::vector<std::tuple<int, int, Rat>> tedges;
        for (const auto& le : locus.edges)
            if (pos.count(le.node_a))
                tedges.emplace_back(pos.at(le.node_a), pos.at(le.node_b), Rat(1));
        comp.t_alpha = MetricGraph::build("T_alpha", static_cast<int>(nodes.size()), tedges);
        for (int ni : nodes) {
            const auto& node = locus.nodes[ni];
            const auto& vs = tos.vspaces.at(node.tree_v);
            for (int lv : vs.fam.member(node.member_idx)) {
                int gid = X.global_id(node.tree_v, lv);
                comp.c_alpha.push_back(gid);
                comp.g_alpha[gid] = pos.at(ni);
            }
        }
        std::sort(comp.c_alpha.begin(), comp.c_alpha.end());
        locus.components.push_back(std::move(comp));
    }
    return locus;
}

PartialElectroSpace tc_as_partial_electrocution(const TreeOfSpaces& tos, const AssembledSpace& X,
                                                const ConeLocus& locus) {
    Rat sep = 1;
    for (const auto& [_, vs] : tos.vspaces)
        if (vs.fam.member_count() > 0 && vs.fam.separation < sep) sep = vs.fam.separation;

    std::vector<std::pair<std::string, std::vector<int>>> members;
    std::vector<PETarget> targets;
    for (size_t i = 0; i < locus.components.size(); ++i) {
        std::string name = "C" + std::to_string(i);
        members.emplace_back(name, locus.components[i].c_alpha);
        PETarget t;
        t.member_name = name;
        t.L = locus.components[i].t_alpha;
        t.g = locus.components[i].g_alpha;
        targets.push_back(std::move(t));
    }
    auto fam = HoroFamily::build(X.graph, std::move(members), sep);
    return partially_electrocute(X.graph, fam, targets);
}

// --------------------------------------------------------------------------
// Validation
// --------------------------------------------------------------------------

namespace {

MapDistortion measure_map_distortion(const MetricGraph& dom, const MetricGraph& cod,
                                     const std::map<int, int>& f, const Rat& K, const Rat& eps,
                                     int eidx, int tv) {
    MapDistortion md;
    md.espace_idx = eidx;
    md.tree_v = tv;
    md.expansion = 0;
    md.contraction = 0;
    md.declared_ok = true;

    auto drows = all_pairs(dom);
    std::vector<std::vector<Rat>> crows(dom.n);
#pragma omp parallel for schedule(dynamic)
    for (int x = 0; x < dom.n; ++x) crows[x] = sssp(cod, f.at(x));

    for (int x = 0; x < dom.n; ++x)
        for (int y = x + 1; y < dom.n; ++y) {
            const Rat& d = drows[x][y];
            const Rat& dp = crows[x][f.at(y)];
            if (dp / d > md.expansion) md.expansion = dp / d;
            if (d / dp > md.contraction) md.contraction = d / dp;
            if (dp > K * d + eps || d > K * dp + K * eps) md.declared_ok = false;
        }
    return md;
}

PropernessTable properness_table(const MetricGraph& local, const MetricGraph& ambient,
                                 int tv, int offset) {
    // pairs (ambient distance, local distance) over local vertex pairs
    std::vector<std::pair<Rat, Rat>> pts;
    auto lrows = all_pairs(local);
    std::vector<std::vector<Rat>> arows(local.n);
#pragma omp parallel for schedule(dynamic)
    for (int x = 0; x < local.n; ++x) arows[x] = sssp(ambient, offset + x);
    for (int x = 0; x < local.n; ++x)
        for (int y = x + 1; y < local.n; ++y) pts.emplace_back(arows[x][offset + y], lrows[x][y]);
    std::sort(pts.begin(), pts.end());

    PropernessTable tab;
    tab.tree_v = tv;
    Rat run = 0;
    size_t i = 0;
    long long maxM = 0;
    for (const auto& [da, _] : pts) {
        mpz_class c;
        mpz_cdiv_q(c.get_mpz_t(), da.get_num().get_mpz_t(), da.get_den().get_mpz_t());
        if (c.fits_slong_p() && c.get_si() > maxM) maxM = c.get_si();
    }
    for (long long M = 0; M <= maxM; ++M) {
        Rat bound = make_rat(M);
        while (i < pts.size() && pts[i].first <= bound) {
            if (pts[i].second > run) run = pts[i].second;
            ++i;
        }
        tab.rows.emplace_back(M, run);
    }
    return tab;
}

}  // namespace

ValidationReport validate(const TreeOfSpaces& tos) {
    ValidationReport rep;
    try {
        tos.require_well_formed();
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.failures.push_back(e.what());
        return rep;
    }

    // conditions on the peripheral structure (strictly type-preserving)
    for (size_t ei = 0; ei < tos.espaces.size(); ++ei) {
        const auto& e = tos.espaces[ei];
        for (int end = 0; end < 2; ++end) {
            int tv = end == 0 ? e.v1 : e.v2;
            const auto& f = end == 0 ? e.map1 : e.map2;
            const auto& vs = tos.vspaces.at(tv);
            auto owner = vs.fam.membership(vs.graph.n);

            std::vector<int> into_member(vs.fam.member_count(), -1);  // vertex member -> edge member
            for (int b = 0; b < e.fam.member_count(); ++b) {
                int a = containing_member(vs, f, e.fam.member(b));
                if (a < 0) {
                    rep.ok = false;
                    rep.failures.push_back("edge space " + std::to_string(ei) + " member '" +
                                           e.fam.name(b) + "' does not map into a single member of "
                                           "vertex space " + std::to_string(tv));
                    continue;
                }
                // coarse density of the image inside the containing member
                {
                    auto mg = member_geometry(vs.graph, vs.fam, a);
                    std::vector<char> hit(mg.verts.size(), 0);
                    for (int x : e.fam.member(b)) hit[mg.index_of(f.at(x))] = 1;
                    Rat density = 0;
                    for (size_t i = 0; i < mg.verts.size(); ++i) {
                        Rat nearest = -1;
                        for (size_t j = 0; j < mg.verts.size(); ++j)
                            if (hit[j] && (nearest < 0 || mg.dist[i][j] < nearest)) nearest = mg.dist[i][j];
                        if (nearest > density) density = nearest;
                    }
                    rep.image_density.push_back({static_cast<int>(ei), tv, e.fam.name(b),
                                                 vs.fam.name(a), density});
                }
                if (into_member[a] >= 0) {
                    rep.ok = false;
                    rep.failures.push_back("edge space " + std::to_string(ei) +
                                           ": two members map into member '" + vs.fam.name(a) +
                                           "' of vertex space " + std::to_string(tv));
                } else {
                    into_member[a] = b;
                }
            }
            // preimage of each vertex member is empty or exactly one edge member
            auto eowner = e.fam.membership(e.graph.n);
            for (int a = 0; a < vs.fam.member_count(); ++a) {
                std::set<int> pre;
                for (int x = 0; x < e.graph.n; ++x)
                    if (owner[f.at(x)] == a) pre.insert(x);
                if (pre.empty()) continue;
                int b = into_member[a];
                std::set<int> expected;
                if (b >= 0)
                    for (int x : e.fam.member(b)) expected.insert(x);
                if (pre != expected) {
                    rep.ok = false;
                    rep.failures.push_back("edge space " + std::to_string(ei) + ", vertex space " +
                                           std::to_string(tv) + ": preimage of member '" +
                                           vs.fam.name(a) + "' is not exactly one edge-space member");
                }
                (void)eowner;
            }
        }
    }

    // measured distortion per inclusion map, checked against the declaration
    for (size_t ei = 0; ei < tos.espaces.size(); ++ei) {
        const auto& e = tos.espaces[ei];
        for (int end = 0; end < 2; ++end) {
            int tv = end == 0 ? e.v1 : e.v2;
            const auto& f = end == 0 ? e.map1 : e.map2;
            auto md = measure_map_distortion(e.graph, tos.vspaces.at(tv).graph, f, e.declared_K,
                                             e.declared_eps, static_cast<int>(ei), tv);
            if (!md.declared_ok) {
                rep.ok = false;
                rep.failures.push_back("edge space " + std::to_string(ei) + " map into vertex space " +
                                       std::to_string(tv) + " violates its declared (K, eps)");
            }
            rep.map_distortion.push_back(std::move(md));
        }
    }

    // the coned-space constructions only make sense on instances whose
    // peripheral structure is coherent; on failure the report stops at the
    // itemized list
    bool peripheral_ok = rep.ok;

    // condition 7: induced maps between coned spaces
    std::map<int, ConedSpace> coned;
    for (int tv : tos.tree_vertices()) {
        const auto& vs = tos.vspaces.at(tv);
        coned.emplace(tv, cone_off(vs.graph, vs.fam));
    }
    for (size_t ei = 0; peripheral_ok && ei < tos.espaces.size(); ++ei) {
        const auto& e = tos.espaces[ei];
        ConedSpace ce = cone_off(e.graph, e.fam);
        for (int end = 0; end < 2; ++end) {
            int tv = end == 0 ? e.v1 : e.v2;
            const auto& f = end == 0 ? e.map1 : e.map2;
            const auto& cv = coned.at(tv);
            std::map<int, int> fhat(f);
            bool valid = true;
            for (int b = 0; b < e.fam.member_count(); ++b) {
                int a = containing_member(tos.vspaces.at(tv), f, e.fam.member(b));
                if (a < 0) {
                    valid = false;
                    break;
                }
                fhat[ce.cone_vertex[b]] = cv.cone_vertex[a];
            }
            if (!valid) continue;  // already reported above
            rep.coned_map_distortion.push_back(measure_map_distortion(
                ce.graph, cv.graph, fhat, e.declared_K, e.declared_eps, static_cast<int>(ei), tv));
        }
    }

    // uniform properness tables into X and TC(X)
    auto X = assemble_total(tos);
    for (int tv : tos.tree_vertices())
        rep.properness_X.push_back(
            properness_table(tos.vspaces.at(tv).graph, X.graph, tv, X.offset.at(tv)));
    if (peripheral_ok) {
        auto TC = induced_coned_tree(tos);
        for (int tv : tos.tree_vertices())
            rep.properness_TC.push_back(
                properness_table(TC.coned.at(tv).graph, TC.graph, tv, TC.offset.at(tv)));
    }
    return rep;
}

Rat measure_edge_image_quasiconvexity(const TreeOfSpaces& tos, const GluedSpace& gs_v, int eidx,
                                      int tv, int max_pairs, unsigned long long seed) {
    const auto& e = tos.espaces.at(eidx);
    const auto& f = tos.map_into(eidx, tv);
    const auto& vs = tos.vspaces.at(tv);

    // image set: level-0 image of the edge space plus level copies of the
    // images of its members inside the containing horoballs
    std::set<int> image;
    for (int x = 0; x < e.graph.n; ++x) image.insert(f.at(x));
    for (int b = 0; b < e.fam.member_count(); ++b) {
        int a = containing_member(vs, f, e.fam.member(b));
        if (a < 0)
            throw std::domain_error("measure_edge_image_quasiconvexity: malformed member image");
        auto mg = member_geometry(vs.graph, vs.fam, a);
        for (int x : e.fam.member(b)) {
            int pos = mg.index_of(f.at(x));
            for (int k = 1; k <= gs_v.depth; ++k) image.insert(gs_v.level_ids[a][k][pos]);
        }
    }
    std::vector<int> image_v(image.begin(), image.end());
    auto to_image = sssp_multi(gs_v.graph, image_v);

    std::vector<std::pair<int, int>> pairs;
    long long total = static_cast<long long>(image_v.size()) * (static_cast<long long>(image_v.size()) - 1) / 2;
    if (total <= max_pairs) {
        for (size_t i = 0; i < image_v.size(); ++i)
            for (size_t j = i + 1; j < image_v.size(); ++j) pairs.emplace_back(image_v[i], image_v[j]);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<size_t> pick(0, image_v.size() - 1);
        while (pairs.size() < static_cast<size_t>(max_pairs)) {
            size_t i = pick(rng), j = pick(rng);
            if (i != j) pairs.emplace_back(image_v[std::min(i, j)], image_v[std::max(i, j)]);
        }
    }

    Rat worst = 0;
    for (auto [u, v] : pairs) {
        auto path = geodesic(gs_v.graph, u, v);
        for (int w : path.verts)
            if (to_image[w] > worst) worst = to_image[w];
    }
    return worst;
}

}  // namespace relhyp
