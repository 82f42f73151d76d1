#pragma once

#include "relhyp/electric.hpp"
#include "relhyp/metric_graph.hpp"

#include <map>
#include <string>
#include <vector>

namespace relhyp {

/// Target datum for one member: a graph L and a total vertex map g from the
/// member into L.
struct PETarget {
    std::string member_name;
    MetricGraph L;
    std::map<int, int> g;  // host member vertex -> L vertex
};

/// Partially electrocuted space: the host with the mapping cylinder of
/// every g_alpha glued in. Each target graph is embedded disjointly and
/// every member vertex x gains one unit cylinder edge to g_alpha(x).
struct PartialElectroSpace {
    MetricGraph graph;
    std::string host_id;
    int host_n = 0;
    HoroFamily fam;

    struct TargetInfo {
        std::string name;
        int offset;            // first vertex id of the embedded L
        int size;              // |L|
        std::map<int, int> g;  // host vertex -> local L vertex
        Rat lipschitz;         // measured coarse-Lipschitz constant of g
    };
    std::vector<TargetInfo> targets;  // aligned with fam member order

    bool is_host(int v) const { return v < host_n; }
    int target_of(int v) const;  // member idx when v lies in an embedded L, else -1
};

/// Assembles PE(host, fam, targets). `halve_cylinders` builds the variant
/// with 1/2-length cylinder edges, which for point targets is isometric to
/// the Farb coned space.
PartialElectroSpace partially_electrocute(const MetricGraph& host, const HoroFamily& fam,
                                          const std::vector<PETarget>& targets,
                                          bool halve_cylinders = false);

/// Shortest path under d_pel between host vertices.
PathWitness pel_geodesic(const PartialElectroSpace& pe, int u, int v);

/// Smallest C such that the glued-space geodesic from u to v, minus
/// horoballs, lies within C of the pel-geodesic (host metric), and the two
/// paths lie within C of each other outside C-neighborhoods of the members
/// the glued geodesic meets.
Rat verify_pel_tracking(const MetricGraph& host, const PartialElectroSpace& pe,
                        const GluedSpace& gs, int u, int v);

}  // namespace relhyp
