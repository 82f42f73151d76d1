#pragma once

#include "relhyp/electric.hpp"
#include "relhyp/metric_graph.hpp"
#include "relhyp/partial_electro.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relhyp {

struct VertexSpace {
    MetricGraph graph;
    HoroFamily fam;
};

/// One edge space with its two strictly type-preserving inclusion maps
/// (vertex association tables, injective on vertices).
struct EdgeSpace {
    int v1 = -1, v2 = -1;
    MetricGraph graph;
    HoroFamily fam;
    std::map<int, int> map1, map2;  // edge-space vertex -> vertex-space vertex
    Rat declared_K = 1;
    Rat declared_eps = 0;
};

/// A finite tree of relatively hyperbolic graph spaces.
struct TreeOfSpaces {
    std::string instance_id;
    int root = 0;
    std::vector<std::pair<int, int>> tree_edges;
    std::map<int, VertexSpace> vspaces;
    std::vector<EdgeSpace> espaces;

    std::vector<int> tree_vertices() const;  // sorted
    std::vector<int> tree_neighbors(int v) const;
    int edge_between(int a, int b) const;  // index into espaces, -1 when absent
    const std::map<int, int>& map_into(int eidx, int tv) const;

    /// structural sanity: tree is a tree over the declared vertex spaces,
    /// maps are total/injective/in-range, root present
    void require_well_formed() const;
};

// ---------------------------------------------------------------------------
// Assembled total space X: disjoint union of vertex spaces plus one unit
// rung per edge-space vertex joining its two images.
// ---------------------------------------------------------------------------

struct AssembledSpace {
    MetricGraph graph;
    std::map<int, int> offset;       // tree vertex -> first global id
    std::vector<int> space_of;       // global id -> tree vertex
    std::vector<int> local_of;       // global id -> local id

    int global_id(int tv, int local) const { return offset.at(tv) + local; }
};

AssembledSpace assemble_total(const TreeOfSpaces& tos);

// ---------------------------------------------------------------------------
// Induced tree of coned-off spaces TC(X): every vertex space replaced by its
// electrification; ordinary rungs as in X plus one unit rung per edge-space
// member joining the two corresponding cone points.
// ---------------------------------------------------------------------------

struct InducedConedTree {
    MetricGraph graph;
    std::map<int, ConedSpace> coned;  // per tree vertex
    std::map<int, int> offset;
    std::vector<int> space_of;  // global -> tree vertex (P map)
    std::vector<int> local_of;

    int global_id(int tv, int local) const { return offset.at(tv) + local; }
    int P(int global) const { return space_of[global]; }
    bool is_cone_vertex(int global) const;
    /// member index within its vertex space when global is an ordinary
    /// member vertex, -1 otherwise
    int member_at(int global) const;
};

InducedConedTree induced_coned_tree(const TreeOfSpaces& tos);

// ---------------------------------------------------------------------------
// Cone locus: the forest of cone points of TC(X), its components T_alpha,
// and the maximal cone-subtrees of horosphere-like spaces C_alpha with
// their tree-collapse maps g_alpha.
// ---------------------------------------------------------------------------

struct ConeLocus {
    struct Node {
        int tree_v;
        int member_idx;  // within the vertex space family
        std::string member_name;
    };
    struct LocusEdge {
        int espace_idx;
        int member_idx;  // within the edge space family
        int node_a, node_b;
    };
    std::vector<Node> nodes;
    std::vector<LocusEdge> edges;

    struct Component {
        std::vector<int> nodes;             // indices into `nodes`
        MetricGraph t_alpha;                // unit-edge tree on the component nodes
        std::vector<int> c_alpha;           // global X vertex ids of the member union
        std::map<int, int> g_alpha;         // global X vertex -> T_alpha vertex
    };
    std::vector<Component> components;
};

ConeLocus cone_locus(const TreeOfSpaces& tos, const AssembledSpace& X);

/// PE(X, C, G, T): the partial electrocution of the assembled space along
/// the maximal cone-subtrees, collapsing each C_alpha to its T_alpha.
PartialElectroSpace tc_as_partial_electrocution(const TreeOfSpaces& tos, const AssembledSpace& X,
                                                const ConeLocus& locus);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct MapDistortion {
    int espace_idx;
    int tree_v;          // which end
    Rat expansion;       // max d'(fx,fy)/d(x,y)
    Rat contraction;     // max d(x,y)/d'(fx,fy)
    bool declared_ok;    // measured data satisfies the declared (K, eps)
};

struct PropernessTable {
    int tree_v;
    // N(M) for integer M: largest intrinsic distance among pairs whose
    // ambient distance is at most M
    std::vector<std::pair<long long, Rat>> rows;
};

/// How densely the image of an edge-space member sits inside its containing
/// vertex-space member: the largest intrinsic distance from a target-member
/// vertex to the image.
struct MemberImageDensity {
    int espace_idx;
    int tree_v;
    std::string edge_member;
    std::string vertex_member;
    Rat density;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<MapDistortion> map_distortion;        // per edge space, both ends
    std::vector<MapDistortion> coned_map_distortion;  // induced maps, condition 7
    std::vector<PropernessTable> properness_X;        // i_v into X
    std::vector<PropernessTable> properness_TC;       // i-hat_v into TC(X)
    std::vector<MemberImageDensity> image_density;    // per member containment
};

ValidationReport validate(const TreeOfSpaces& tos);

/// Measured quasiconvexity constant of one edge-space image inside the
/// glued vertex space at the `tv` end: max over sampled image pairs of how
/// far the connecting geodesic strays from the image set.
Rat measure_edge_image_quasiconvexity(const TreeOfSpaces& tos, const GluedSpace& gs_v, int eidx,
                                      int tv, int max_pairs, unsigned long long seed);

}  // namespace relhyp
