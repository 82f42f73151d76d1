#include "relhyp/electric.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace relhyp {

// --------------------------------------------------------------------------
// HoroFamily
// --------------------------------------------------------------------------

HoroFamily HoroFamily::build(const MetricGraph& host,
                             std::vector<std::pair<std::string, std::vector<int>>> members,
                             Rat separation) {
    if (separation <= 0) throw std::invalid_argument("HoroFamily: separation must be > 0");
    HoroFamily fam;
    fam.host_id = host.space_id;
    fam.separation = separation;
    std::sort(members.begin(), members.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::set<std::string> names;
    std::vector<int> owner(host.n, -1);
    for (auto& [name, verts] : members) {
        if (!names.insert(name).second)
            throw std::invalid_argument("HoroFamily: duplicate member name '" + name + "'");
        if (verts.empty()) throw std::invalid_argument("HoroFamily: member '" + name + "' is empty");
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        for (int v : verts) {
            host.require_vertex(v);
            if (owner[v] >= 0)
                throw std::invalid_argument("HoroFamily: members overlap at vertex " + std::to_string(v));
            owner[v] = static_cast<int>(fam.members.size());
        }
        fam.members.emplace_back(name, verts);
    }

    // uniform separation: min cross-member distance must reach `separation`
    int m = fam.member_count();
    for (int i = 0; i < m; ++i) {
        if (i + 1 >= m) break;
        std::vector<Rat> row;
        std::vector<long long> row64;
        if (host.scaled_ok)
            row64 = sssp_i64_multi(host, fam.members[i].second);
        else
            row = sssp_multi(host, fam.members[i].second);
        for (int j = i + 1; j < m; ++j)
            for (int v : fam.members[j].second) {
                Rat d = host.scaled_ok ? make_rat(row64[v], host.scale) : row[v];
                if (d < separation)
                    throw std::invalid_argument("HoroFamily: members '" + fam.members[i].first +
                                                "' and '" + fam.members[j].first +
                                                "' are closer than the separation parameter");
            }
    }
    return fam;
}

int HoroFamily::find(const std::string& nm) const {
    for (int i = 0; i < member_count(); ++i)
        if (members[i].first == nm) return i;
    return -1;
}

std::vector<int> HoroFamily::membership(int host_n) const {
    std::vector<int> owner(host_n, -1);
    for (int i = 0; i < member_count(); ++i)
        for (int v : members[i].second) owner[v] = i;
    return owner;
}

// --------------------------------------------------------------------------
// Member intrinsic geometry
// --------------------------------------------------------------------------

int MemberGeometry::index_of(int host_v) const {
    auto it = std::lower_bound(verts.begin(), verts.end(), host_v);
    if (it == verts.end() || *it != host_v) return -1;
    return static_cast<int>(it - verts.begin());
}

MemberGeometry member_geometry(const MetricGraph& host, const HoroFamily& fam, int member_idx) {
    MemberGeometry mg;
    mg.verts = fam.member(member_idx);
    int m = static_cast<int>(mg.verts.size());
    // induced-subgraph adjacency
    std::vector<std::vector<std::pair<int, Rat>>> iadj(m);
    for (int i = 0; i < m; ++i)
        for (const auto& e : host.neighbors(mg.verts[i])) {
            int j = mg.index_of(e.to);
            if (j >= 0) iadj[i].emplace_back(j, host.edge_len[e.eid]);
        }
    mg.dist.assign(m, std::vector<Rat>(m, Rat(-1)));
    for (int s = 0; s < m; ++s) {
        auto& dist = mg.dist[s];
        dist[s] = 0;
        std::set<std::pair<Rat, int>> pq{{Rat(0), s}};
        while (!pq.empty()) {
            auto [d, v] = *pq.begin();
            pq.erase(pq.begin());
            if (d > dist[v]) continue;
            for (auto& [w, len] : iadj[v]) {
                Rat nd = d + len;
                if (dist[w] < 0 || nd < dist[w]) {
                    pq.erase({dist[w], w});
                    dist[w] = nd;
                    pq.insert({nd, w});
                }
            }
        }
        for (int v = 0; v < m; ++v) {
            if (dist[v] < 0)
                throw std::domain_error("member '" + fam.name(member_idx) +
                                        "' induces a disconnected subgraph; intrinsic metric undefined");
            if (dist[v] > mg.diameter) mg.diameter = dist[v];
        }
    }
    return mg;
}

// --------------------------------------------------------------------------
// Coned space
// --------------------------------------------------------------------------

ConedSpace cone_off(const MetricGraph& host, const HoroFamily& fam) {
    if (fam.host_id != host.space_id)
        throw std::invalid_argument("cone_off: family belongs to host '" + fam.host_id + "'");
    ConedSpace cs;
    cs.host_id = host.space_id;
    cs.host_n = host.n;
    cs.fam = fam;

    std::vector<std::tuple<int, int, Rat>> edges;
    for (int e = 0; e < host.edge_count(); ++e)
        edges.emplace_back(host.edge_ends[e][0], host.edge_ends[e][1], host.edge_len[e]);
    Rat half = make_rat(1, 2);
    int n = host.n;
    cs.cone_vertex.resize(fam.member_count());
    for (int i = 0; i < fam.member_count(); ++i) {
        cs.cone_vertex[i] = n + i;
        for (int v : fam.member(i)) edges.emplace_back(v, n + i, half);
    }
    cs.graph = MetricGraph::build(host.space_id + "^", n + fam.member_count(), edges, host.labels);
    cs.member_of = fam.membership(cs.graph.n);
    cs.cone_member.assign(cs.graph.n, -1);
    for (int i = 0; i < fam.member_count(); ++i) cs.cone_member[cs.cone_vertex[i]] = i;
    return cs;
}

// --------------------------------------------------------------------------
// Horoballs
// --------------------------------------------------------------------------

int default_horoball_depth(const MetricGraph& host, const HoroFamily& fam) {
    Rat maxdiam = 0;
    for (int i = 0; i < fam.member_count(); ++i) {
        auto mg = member_geometry(host, fam, i);
        if (mg.diameter > maxdiam) maxdiam = mg.diameter;
    }
    if (maxdiam <= 0) return 1;
    return ceil_log2(maxdiam) + 1;
}

MetricGraph build_horoball(const MetricGraph& host, const HoroFamily& fam, int member_idx, int depth) {
    if (depth < 1) throw std::domain_error("build_horoball: depth must be >= 1");
    if (depth > 30) throw std::domain_error("build_horoball: depth too large");
    if (member_idx < 0 || member_idx >= fam.member_count())
        throw std::domain_error("build_horoball: unknown member index");
    auto mg = member_geometry(host, fam, member_idx);
    int m = static_cast<int>(mg.verts.size());

    // vertex (pos, level) -> level*m + pos
    std::vector<std::tuple<int, int, Rat>> edges;
    Rat one = 1;
    for (int k = 0; k < depth; ++k)
        for (int p = 0; p < m; ++p) edges.emplace_back(k * m + p, (k + 1) * m + p, one);
    for (int k = 0; k <= depth; ++k) {
        Rat reach = pow2_rat(k);
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q)
                if (mg.dist[p][q] <= reach) edges.emplace_back(k * m + p, k * m + q, one);
    }
    try {
        return MetricGraph::build(host.space_id + "#" + fam.name(member_idx) + "^h",
                                  m * (depth + 1), edges);
    } catch (const std::invalid_argument& e) {
        throw std::domain_error("build_horoball: member '" + fam.name(member_idx) +
                                "' yields an invalid horoball: " + e.what());
    }
}

GluedSpace glue_cones(const MetricGraph& host, const HoroFamily& fam, int depth) {
    if (fam.host_id != host.space_id)
        throw std::invalid_argument("glue_cones: family belongs to host '" + fam.host_id + "'");
    if (depth < 1) throw std::domain_error("glue_cones: depth must be >= 1");
    if (depth > 30) throw std::domain_error("glue_cones: depth too large");

    GluedSpace gs;
    gs.host_id = host.space_id;
    gs.host_n = host.n;
    gs.fam = fam;
    gs.depth = depth;

    std::map<std::pair<int, int>, Rat> edge_map;
    for (int e = 0; e < host.edge_count(); ++e) {
        auto [u, v] = host.edge_ends[e];
        edge_map[std::minmax(u, v)] = host.edge_len[e];
    }
    auto add_unit = [&edge_map](int u, int v) {
        auto key = std::minmax(u, v);
        auto it = edge_map.find(key);
        Rat one = 1;
        if (it == edge_map.end())
            edge_map.emplace(key, one);
        else if (it->second > one)
            it->second = one;  // level-0 horizontal edge supersedes a longer host edge
    };

    int next = host.n;
    gs.level.assign(host.n, 0);
    gs.member_of = fam.membership(host.n);
    gs.base.resize(host.n);
    for (int v = 0; v < host.n; ++v) gs.base[v] = v;
    gs.level_ids.resize(fam.member_count());

    for (int i = 0; i < fam.member_count(); ++i) {
        auto mg = member_geometry(host, fam, i);
        int m = static_cast<int>(mg.verts.size());
        auto& ids = gs.level_ids[i];
        ids.assign(depth + 1, std::vector<int>(m));
        ids[0] = mg.verts;
        for (int k = 1; k <= depth; ++k)
            for (int p = 0; p < m; ++p) {
                ids[k][p] = next++;
                gs.level.push_back(k);
                gs.member_of.push_back(i);
                gs.base.push_back(mg.verts[p]);
            }
        for (int k = 0; k < depth; ++k)
            for (int p = 0; p < m; ++p) add_unit(ids[k][p], ids[k + 1][p]);
        for (int k = 0; k <= depth; ++k) {
            Rat reach = pow2_rat(k);
            for (int p = 0; p < m; ++p)
                for (int q = p + 1; q < m; ++q)
                    if (mg.dist[p][q] <= reach) add_unit(ids[k][p], ids[k][q]);
        }
    }

    std::vector<std::tuple<int, int, Rat>> edges;
    edges.reserve(edge_map.size());
    for (const auto& [key, len] : edge_map) edges.emplace_back(key.first, key.second, len);
    gs.graph = MetricGraph::build(host.space_id + "^h", next, edges, host.labels);
    return gs;
}

std::vector<char> GluedSpace::horoball_mask(int member_idx) const {
    std::vector<char> mask(graph.n, 0);
    for (int v = 0; v < graph.n; ++v)
        if (member_of[v] == member_idx) mask[v] = 1;
    return mask;
}

// --------------------------------------------------------------------------
// Penetration profiles
// --------------------------------------------------------------------------

namespace {

// member index per path position; cone vertices and horoball copies count
// as a stay in their member
PenetrationProfile profile_generic(const MetricGraph& host,
                                   const HoroFamily& fam,
                                   const std::vector<int>& verts,
                                   const std::vector<int>& mem_at,
                                   const std::vector<char>& is_surface) {
    PenetrationProfile prof;
    std::map<int, MemberGeometry> geo;
    std::set<int> seen;
    size_t i = 0;
    while (i < verts.size()) {
        if (mem_at[i] < 0) {
            ++i;
            continue;
        }
        int mi = mem_at[i];
        size_t j = i;
        while (j + 1 < verts.size() && mem_at[j + 1] == mi) ++j;
        // entry/exit are the first/last horosphere points of the stay
        int entry = -1, exit_v = -1;
        for (size_t k = i; k <= j; ++k)
            if (is_surface[k]) {
                if (entry < 0) entry = verts[k];
                exit_v = verts[k];
            }
        if (entry < 0) {
            // stay never touches the horosphere itself (possible only when a
            // path starts or ends deep in a horoball or at a cone point)
            entry = fam.member(mi).front();
            exit_v = entry;
        }
        auto it = geo.find(mi);
        if (it == geo.end()) it = geo.emplace(mi, member_geometry(host, fam, mi)).first;
        const auto& mg = it->second;
        Visit vis;
        vis.member_idx = mi;
        vis.member_name = fam.name(mi);
        vis.entry = entry;
        vis.exit = exit_v;
        vis.intrinsic_span = mg.dist[mg.index_of(entry)][mg.index_of(exit_v)];
        prof.visits.push_back(std::move(vis));
        if (!seen.insert(mi).second) prof.backtracks = true;
        i = j + 1;
    }
    return prof;
}

}  // namespace

PenetrationProfile penetration_profile_host(const MetricGraph& host, const HoroFamily& fam,
                                            const PathWitness& p) {
    auto owner = fam.membership(host.n);
    std::vector<int> mem_at(p.verts.size());
    std::vector<char> surf(p.verts.size());
    for (size_t i = 0; i < p.verts.size(); ++i) {
        mem_at[i] = owner[p.verts[i]];
        surf[i] = mem_at[i] >= 0;
    }
    return profile_generic(host, fam, p.verts, mem_at, surf);
}

PenetrationProfile penetration_profile_coned(const ConedSpace& cs, const PathWitness& p) {
    std::vector<int> mem_at(p.verts.size());
    std::vector<char> surf(p.verts.size());
    for (size_t i = 0; i < p.verts.size(); ++i) {
        int v = p.verts[i];
        mem_at[i] = cs.member_of[v] >= 0 ? cs.member_of[v] : cs.cone_member[v];
        surf[i] = cs.member_of[v] >= 0;
    }
    // intrinsic spans live in the host metric; the host is recoverable from
    // the coned graph by dropping cone vertices, but member_geometry only
    // looks at member-internal edges, which the coned graph shares
    return profile_generic(cs.graph, cs.fam, p.verts, mem_at, surf);
}

PenetrationProfile penetration_profile_glued(const GluedSpace& gs, const PathWitness& p) {
    std::vector<int> mem_at(p.verts.size());
    std::vector<char> surf(p.verts.size());
    for (size_t i = 0; i < p.verts.size(); ++i) {
        int v = p.verts[i];
        mem_at[i] = gs.member_of[v];
        surf[i] = mem_at[i] >= 0 && gs.level[v] == 0;
    }
    return profile_generic(gs.graph, gs.fam, p.verts, mem_at, surf);
}

// --------------------------------------------------------------------------
// Electric geodesics without backtracking
// --------------------------------------------------------------------------

PathWitness electric_geodesic_nb(const ConedSpace& cs, int u, int v) {
    cs.graph.require_vertex(u);
    cs.graph.require_vertex(v);
    if (cs.is_cone(u) || cs.is_cone(v))
        throw std::domain_error("electric_geodesic_nb: endpoints must be ordinary vertices");

    PathWitness p = geodesic(cs.graph, u, v);
    bool spliced = false;
    for (;;) {
        auto mem_at = [&cs](int w) {
            return cs.member_of[w] >= 0 ? cs.member_of[w] : cs.cone_member[w];
        };
        // locate the first member with two separate stays
        std::map<int, std::pair<int, int>> first_last;  // member -> (first entry idx, last exit idx)
        int culprit = -1;
        {
            std::map<int, int> stays;
            size_t i = 0;
            while (i < p.verts.size()) {
                int mi = mem_at(p.verts[i]);
                if (mi < 0) {
                    ++i;
                    continue;
                }
                size_t j = i;
                while (j + 1 < p.verts.size() && mem_at(p.verts[j + 1]) == mi) ++j;
                auto it = first_last.find(mi);
                if (it == first_last.end())
                    first_last[mi] = {static_cast<int>(i), static_cast<int>(j)};
                else
                    it->second.second = static_cast<int>(j);
                if (++stays[mi] == 2 && culprit < 0) culprit = mi;
                i = j + 1;
            }
        }
        if (culprit < 0) break;
        spliced = true;
        auto [fi, lj] = first_last[culprit];
        // trim to actual member vertices (stays cannot start or end at a
        // cone point because endpoints are ordinary)
        while (cs.member_of[p.verts[fi]] != culprit) ++fi;
        while (cs.member_of[p.verts[lj]] != culprit) --lj;
        int x = p.verts[fi], y = p.verts[lj];
        std::vector<int> nv(p.verts.begin(), p.verts.begin() + fi);
        if (x == y) {
            nv.push_back(x);
        } else {
            nv.push_back(x);
            nv.push_back(cs.cone_vertex[culprit]);
            nv.push_back(y);
        }
        nv.insert(nv.end(), p.verts.begin() + lj + 1, p.verts.end());
        p = make_path(cs.graph, std::move(nv));
    }
    if (spliced)
        certify_quasigeodesic(cs.graph, p);
    else
        p.quality = Rat(1);  // untouched shortest path
    return p;
}

// --------------------------------------------------------------------------
// Electro-ambient representatives
// --------------------------------------------------------------------------

ElectroAmbient electro_ambient(const ConedSpace& cs, const GluedSpace& gs, const PathWitness& ep) {
    if (ep.space_id != cs.graph.space_id)
        throw std::domain_error("electro_ambient: path does not live in the coned space");
    if (gs.host_id != cs.host_id)
        throw std::domain_error("electro_ambient: coned and glued spaces have different hosts");
    if (cs.is_cone(ep.verts.front()) || cs.is_cone(ep.verts.back()))
        throw std::domain_error("electro_ambient: endpoints must be ordinary vertices");
    auto prof = penetration_profile_coned(cs, ep);
    if (prof.backtracks) throw std::domain_error("electro_ambient: path backtracks");

    ElectroAmbient ea;
    std::vector<int> out;
    auto mem_at = [&cs](int w) { return cs.member_of[w] >= 0 ? cs.member_of[w] : cs.cone_member[w]; };

    size_t i = 0;
    while (i < ep.verts.size()) {
        int mi = mem_at(ep.verts[i]);
        if (mi < 0) {
            out.push_back(ep.verts[i]);
            ea.ep_index.push_back(static_cast<int>(i));
            ea.segment_of.push_back(-1);
            ++i;
            continue;
        }
        size_t j = i;
        bool used_cone = false;
        while (j + 1 < ep.verts.size() && mem_at(ep.verts[j + 1]) == mi) ++j;
        for (size_t k = i; k <= j; ++k) used_cone |= cs.is_cone(ep.verts[k]);
        int entry = ep.verts[i], exit_v = ep.verts[j];

        auto mask = gs.horoball_mask(mi);
        PathWitness hb = geodesic_restricted(gs.graph, entry, exit_v, mask);

        ElectroAmbient::Segment seg;
        seg.member_idx = mi;
        seg.ep_from = static_cast<int>(i);
        seg.ep_to = static_cast<int>(j);
        seg.used_cone = used_cone;
        seg.first = static_cast<int>(out.size());
        for (size_t k = 0; k < hb.verts.size(); ++k) {
            out.push_back(hb.verts[k]);
            int epi = -1;
            if (k == 0) epi = static_cast<int>(i);
            if (k + 1 == hb.verts.size()) epi = static_cast<int>(j);
            ea.ep_index.push_back(epi);
            ea.segment_of.push_back(static_cast<int>(ea.segments.size()));
        }
        seg.last = static_cast<int>(out.size()) - 1;
        ea.segments.push_back(seg);
        i = j + 1;
    }
    ea.path = make_path(gs.graph, std::move(out));
    certify_quasigeodesic(gs.graph, ea.path);
    return ea;
}

int shadow_to_coned(const GluedSpace& gs, int v) {
    gs.graph.require_vertex(v);
    return gs.base[v];
}

int electric_projection(const ConedSpace& cs, const GluedSpace& gs, int y, const ElectroAmbient& mu) {
    cs.graph.require_vertex(y);
    int z;
    if (cs.is_cone(y)) {
        z = cs.fam.member(cs.cone_member[y]).front();  // smallest-id representative
    } else {
        z = y;
    }
    auto row = sssp(gs.graph, z);
    int best = -1;
    Rat bd = -1;
    for (int w : mu.path.verts)
        if (best < 0 || row[w] < bd || (row[w] == bd && w < best)) {
            best = w;
            bd = row[w];
        }
    return best;
}

// --------------------------------------------------------------------------
// Similar intersection patterns
// --------------------------------------------------------------------------

Rat check_similar_intersections(const MetricGraph& host, const HoroFamily& fam,
                                const PathWitness& p1, const PenetrationProfile& prof1,
                                const PathWitness& p2, const PenetrationProfile& prof2) {
    if (p1.verts.front() != p2.verts.front() || p1.verts.back() != p2.verts.back())
        throw std::domain_error("check_similar_intersections: paths must share endpoints");
    if (prof1.backtracks || prof2.backtracks)
        throw std::domain_error("check_similar_intersections: paths must not backtrack");

    std::map<int, const Visit*> v1, v2;
    for (const auto& v : prof1.visits) v1[v.member_idx] = &v;
    for (const auto& v : prof2.visits) v2[v.member_idx] = &v;

    Rat B = 0;
    std::map<int, MemberGeometry> geo;
    auto mg_of = [&](int mi) -> const MemberGeometry& {
        auto it = geo.find(mi);
        if (it == geo.end()) it = geo.emplace(mi, member_geometry(host, fam, mi)).first;
        return it->second;
    };
    for (const auto& [mi, vis] : v1) {
        auto other = v2.find(mi);
        if (other == v2.end()) {
            if (vis->intrinsic_span > B) B = vis->intrinsic_span;
        } else {
            const auto& mg = mg_of(mi);
            Rat de = mg.dist[mg.index_of(vis->entry)][mg.index_of(other->second->entry)];
            Rat dx = mg.dist[mg.index_of(vis->exit)][mg.index_of(other->second->exit)];
            if (de > B) B = de;
            if (dx > B) B = dx;
        }
    }
    for (const auto& [mi, vis] : v2)
        if (!v1.count(mi) && vis->intrinsic_span > B) B = vis->intrinsic_span;
    return B;
}

}  // namespace relhyp
