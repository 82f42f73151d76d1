#pragma once

#include "relhyp/metric_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relhyp {

/// A peripheral structure on a host graph: named, pairwise disjoint vertex
/// subsets that are uniformly separated by at least `separation` in the
/// host metric. Members are kept sorted by name.
struct HoroFamily {
    std::string host_id;
    std::vector<std::pair<std::string, std::vector<int>>> members;  // sorted ids inside
    Rat separation = 1;

    static HoroFamily build(const MetricGraph& host,
                            std::vector<std::pair<std::string, std::vector<int>>> members,
                            Rat separation);

    int member_count() const { return static_cast<int>(members.size()); }
    const std::string& name(int idx) const { return members[idx].first; }
    const std::vector<int>& member(int idx) const { return members[idx].second; }
    int find(const std::string& name) const;  // -1 when absent

    /// member index per host vertex, -1 outside every member
    std::vector<int> membership(int host_n) const;
};

/// Per-member intrinsic geometry: the induced-subgraph path metric.
/// Throws std::domain_error when the induced subgraph is disconnected.
struct MemberGeometry {
    std::vector<int> verts;                 // host ids, sorted
    std::vector<std::vector<Rat>> dist;     // intrinsic all-pairs, indexed by position
    Rat diameter = 0;

    int index_of(int host_v) const;  // -1 when absent
};

MemberGeometry member_geometry(const MetricGraph& host, const HoroFamily& fam, int member_idx);

/// Farb electrification: host plus one cone vertex per member, joined to
/// every member vertex by a half-length edge.
struct ConedSpace {
    MetricGraph graph;
    std::string host_id;
    int host_n = 0;
    HoroFamily fam;
    std::vector<int> cone_vertex;   // per member index
    std::vector<int> member_of;     // per vertex: member idx of host vertices, -1 otherwise
    std::vector<int> cone_member;   // per vertex: member idx when vertex is a cone, -1 otherwise

    bool is_cone(int v) const { return cone_member[v] >= 0; }
    bool is_ordinary(int v) const { return v < host_n; }
};

ConedSpace cone_off(const MetricGraph& host, const HoroFamily& fam);

/// Combinatorial horoball over one member, standalone: level-k copies of
/// the member for k = 0..depth, vertical unit edges between consecutive
/// copies of one vertex, horizontal unit edges at level k between copies at
/// intrinsic distance <= 2^k.
MetricGraph build_horoball(const MetricGraph& host, const HoroFamily& fam, int member_idx, int depth);

/// Host with a combinatorial horoball glued onto every member, level-0
/// copies identified with the member vertices.
struct GluedSpace {
    MetricGraph graph;
    std::string host_id;
    int host_n = 0;
    HoroFamily fam;
    int depth = 0;
    std::vector<int> level;      // per vertex; host vertices at level 0
    std::vector<int> member_of;  // member idx for horoball copies and level-0 member vertices, -1 otherwise
    std::vector<int> base;       // host vertex under each vertex (identity on host)
    std::vector<std::vector<std::vector<int>>> level_ids;  // [member][level][pos] -> vertex id

    /// true when v lies in the horoball region of some member (any level,
    /// including the level-0 horosphere itself)
    bool in_horoball_region(int v) const { return member_of[v] >= 0; }

    /// vertices allowed for geodesics inside one member's horoball
    std::vector<char> horoball_mask(int member_idx) const;
};

/// Default depth: ceil(log2(max member intrinsic diameter)) + 1, at least 1.
int default_horoball_depth(const MetricGraph& host, const HoroFamily& fam);

GluedSpace glue_cones(const MetricGraph& host, const HoroFamily& fam, int depth);

/// One maximal stay of a path inside a member (the cone vertex, when the
/// path passes through it, belongs to the stay).
struct Visit {
    int member_idx;
    std::string member_name;
    int entry;           // host vertex, first point in the member
    int exit;            // host vertex, last point in the member
    Rat intrinsic_span;  // intrinsic member distance from entry to exit
};

struct PenetrationProfile {
    std::vector<Visit> visits;  // ordered along the path
    bool backtracks = false;    // some member recurs after being left
};

PenetrationProfile penetration_profile_host(const MetricGraph& host, const HoroFamily& fam,
                                            const PathWitness& p);
PenetrationProfile penetration_profile_coned(const ConedSpace& cs, const PathWitness& p);
PenetrationProfile penetration_profile_glued(const GluedSpace& gs, const PathWitness& p);

/// Shortest path in the coned space between ordinary vertices,
/// post-processed so that no member recurs: the stretch between the first
/// entry and last exit of a recurring member is spliced out and replaced by
/// the two cone edges.
PathWitness electric_geodesic_nb(const ConedSpace& cs, int u, int v);

/// Electro-ambient representative: for every member the electric path
/// penetrates, the stay between first entry and last exit is replaced by a
/// geodesic inside that member's horoball. Bookkeeping records, per vertex
/// of the result, whether it survives from the electric path (and at which
/// index) or was produced for a member stay.
struct ElectroAmbient {
    PathWitness path;  // in the glued space
    struct Segment {
        int member_idx;
        int ep_from, ep_to;      // index range on the electric path that was replaced
        bool used_cone;          // the electric path passed through the cone vertex
        int first, last;         // index range on `path`
    };
    std::vector<int> ep_index;   // per path vertex: index on the electric path, -1 inside segments
    std::vector<int> segment_of; // per path vertex: segment index, -1 outside
    std::vector<Segment> segments;
};

ElectroAmbient electro_ambient(const ConedSpace& cs, const GluedSpace& gs, const PathWitness& ep);

/// Collapse a glued-space vertex to the coned space: horoball copies drop
/// to their base member vertex, host vertices map to themselves.
int shadow_to_coned(const GluedSpace& gs, int v);

/// Electric projection of y (a coned-space vertex; a cone vertex is
/// represented by its smallest member vertex) onto the electro-ambient
/// representative of mu_hat. Returns a vertex of the glued space lying on
/// the representative path.
int electric_projection(const ConedSpace& cs, const GluedSpace& gs, int y, const ElectroAmbient& mu);

/// Measured bounded-penetration constant of two paths sharing endpoints:
/// smallest B satisfying both similar-intersection-pattern conditions
/// (intrinsic span when only one path meets a member, entry-entry and
/// exit-exit intrinsic distances when both do).
Rat check_similar_intersections(const MetricGraph& host, const HoroFamily& fam,
                                const PathWitness& p1, const PenetrationProfile& prof1,
                                const PathWitness& p2, const PenetrationProfile& prof2);

}  // namespace relhyp
