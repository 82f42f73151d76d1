#include "relhyp/partial_electro.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace relhyp {

int PartialElectroSpace::target_of(int v) const {
    for (size_t i = 0; i < targets.size(); ++i)
        if (v >= targets[i].offset && v < targets[i].offset + targets[i].size)
            return static_cast<int>(i);
    return -1;
}

PartialElectroSpace partially_electrocute(const MetricGraph& host, const HoroFamily& fam,
                                          const std::vector<PETarget>& targets,
                                          bool halve_cylinders) {
    if (fam.host_id != host.space_id)
        throw std::invalid_argument("partially_electrocute: family belongs to host '" + fam.host_id + "'");

    PartialElectroSpace pe;
    pe.host_id = host.space_id;
    pe.host_n = host.n;
    pe.fam = fam;

    std::vector<std::tuple<int, int, Rat>> edges;
    for (int e = 0; e < host.edge_count(); ++e)
        edges.emplace_back(host.edge_ends[e][0], host.edge_ends[e][1], host.edge_len[e]);

    Rat cyl_len = halve_cylinders ? make_rat(1, 2) : Rat(1);
    int next = host.n;
    for (int i = 0; i < fam.member_count(); ++i) {
        const PETarget* tgt = nullptr;
        for (const auto& t : targets)
            if (t.member_name == fam.name(i)) {
                tgt = &t;
                break;
            }
        if (!tgt)
            throw std::invalid_argument("partially_electrocute: no target for member '" + fam.name(i) + "'");

        PartialElectroSpace::TargetInfo info;
        info.name = fam.name(i);
        info.offset = next;
        info.size = tgt->L.n;
        for (int e = 0; e < tgt->L.edge_count(); ++e)
            edges.emplace_back(next + tgt->L.edge_ends[e][0], next + tgt->L.edge_ends[e][1],
                               tgt->L.edge_len[e]);
        for (int x : fam.member(i)) {
            auto it = tgt->g.find(x);
            if (it == tgt->g.end())
                throw std::invalid_argument("partially_electrocute: map for member '" + fam.name(i) +
                                            "' misses vertex " + std::to_string(x));
            if (it->second < 0 || it->second >= tgt->L.n)
                throw std::invalid_argument("partially_electrocute: map image outside target for member '" +
                                            fam.name(i) + "'");
            info.g[x] = it->second;
            edges.emplace_back(x, next + it->second, cyl_len);
        }

        // measured coarse-Lipschitz constant of g: minimal lam with
        // d_L(gx,gy) <= lam * d_H(x,y) + lam over member pairs
        auto mg = member_geometry(host, fam, i);
        auto lrows = all_pairs(tgt->L);
        Rat lam = 0;
        int m = static_cast<int>(mg.verts.size());
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                Rat v = lrows[info.g[mg.verts[p]]][info.g[mg.verts[q]]] / (mg.dist[p][q] + 1);
                if (v > lam) lam = v;
            }
        info.lipschitz = lam;
        pe.targets.push_back(std::move(info));
        next += tgt->L.n;
    }

    pe.graph = MetricGraph::build(host.space_id + "_pel", next, edges, host.labels);
    return pe;
}

PathWitness pel_geodesic(const PartialElectroSpace& pe, int u, int v) {
    if (u >= pe.host_n || v >= pe.host_n)
        throw std::domain_error("pel_geodesic: endpoints must be host vertices");
    return geodesic(pe.graph, u, v);
}

Rat verify_pel_tracking(const MetricGraph& host, const PartialElectroSpace& pe,
                        const GluedSpace& gs, int u, int v) {
    host.require_vertex(u);
    host.require_vertex(v);
    auto owner = pe.fam.membership(host.n);
    if (owner[u] >= 0 || owner[v] >= 0)
        throw std::domain_error("verify_pel_tracking: endpoints must lie outside members");

    PathWitness gam = geodesic(gs.graph, u, v);
    PathWitness gpel = pel_geodesic(pe, u, v);

    // host-vertex shadows of both paths
    std::vector<int> gam_host, gam_outside;
    for (int w : gam.verts)
        if (w < gs.host_n) {
            gam_host.push_back(w);
            if (owner[w] < 0) gam_outside.push_back(w);
        }
    std::vector<int> pel_host;
    for (int w : gpel.verts)
        if (w < pe.host_n) pel_host.push_back(w);

    // members met by the glued geodesic
    std::vector<int> met_verts;
    {
        auto prof = penetration_profile_glued(gs, gam);
        std::set<int> mids;
        for (const auto& vis : prof.visits) mids.insert(vis.member_idx);
        for (int mi : mids)
            for (int x : pe.fam.member(mi)) met_verts.push_back(x);
    }

    auto to_pel = sssp_multi(host, pel_host);
    auto to_gam = sssp_multi(host, gam_host);
    std::vector<Rat> to_met;
    if (!met_verts.empty()) to_met = sssp_multi(host, met_verts);

    // feasibility of a candidate C
    auto feasible = [&](const Rat& C) {
        for (int a : gam_outside)
            if (to_pel[a] > C) return false;
        for (int a : gam_host)
            if ((met_verts.empty() || to_met[a] > C) && to_pel[a] > C) return false;
        for (int b : pel_host)
            if ((met_verts.empty() || to_met[b] > C) && to_gam[b] > C) return false;
        return true;
    };

    // the minimal feasible C sits where a coverage distance or a
    // met-neighborhood guard flips
    std::set<Rat> cand{Rat(0)};
    for (int a : gam_host) cand.insert(to_pel[a]);
    for (int b : pel_host) cand.insert(to_gam[b]);
    if (!met_verts.empty()) {
        for (int a : gam_host) cand.insert(to_met[a]);
        for (int b : pel_host) cand.insert(to_met[b]);
    }
    for (const Rat& C : cand)
        if (feasible(C)) return C;
    throw std::logic_error("verify_pel_tracking: no feasible constant (unreachable)");
}

}  // namespace relhyp
