#pragma once

#include "relhyp/electric.hpp"
#include "relhyp/geometry_params.hpp"
#include "relhyp/metric_graph.hpp"
#include "relhyp/tree_spaces.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace relhyp {

/// Per-instance caches shared by the ladder machinery: the assembled total
/// space, the induced coned tree, and a glued space per vertex space, all
/// built with one common horoball depth.
struct TreeGeometry {
    TreeOfSpaces tos;
    AssembledSpace X;
    InducedConedTree TC;
    std::map<int, GluedSpace> glued;
    std::map<int, int> parent;  // toward the root; root maps to itself
    int depth = 0;

    const ConedSpace& coned(int tv) const { return TC.coned.at(tv); }
};

/// depth 0 picks the largest per-space default so horoballs are uniform.
TreeGeometry build_tree_geometry(const TreeOfSpaces& tos, int depth = 0);

/// The chosen preimage flow across one edge: p in the image of the
/// parent-side inclusion is carried to the corresponding image point on the
/// v side. The preimage is unique for injective maps; the smallest id wins
/// otherwise.
int phi_map(const TreeOfSpaces& tos, int v, int eidx, int p);

/// One descent record of the ladder construction at (parent vertex, edge):
/// the maximal pair found in the C-neighborhood of the electro-ambient
/// representative, and the subpiece geodesic joining it.
struct SubpieceRecord {
    int edge_idx = -1;
    int parent_v = -1;
    int child_v = -1;
    int p_e = -1, q_e = -1;      // parent-space vertices (level 0)
    Rat glued_separation = 0;    // d of the pair in the glued parent space
    Rat coned_separation = 0;    // d-hat of the pair; descent requires > D
    PathWitness mu_hat;          // electric geodesic joining p_e, q_e in the parent
    ElectroAmbient mu;           // its electro-ambient representative
    Rat p6 = 0, p7 = 0;          // filled by measure_subpiece_constants
};

struct Ladder {
    int root = 0;
    Rat D_used, C_used;
    PathWitness lambda_root;
    std::set<int> T1;
    std::map<int, PathWitness> lambda_v;     // electric geodesic per supported vertex
    std::map<int, ElectroAmbient> mu_v;      // its electro-ambient representative
    std::map<int, std::vector<SubpieceRecord>> subpieces;
    std::vector<std::vector<int>> growth;    // tree vertices added per inductive stage
    std::vector<int> B_tc;                   // the ladder inside TC(X), sorted global ids
    std::map<int, std::vector<int>> lambda_b_v;  // per vertex: off-horoball points (local ids)
    std::vector<int> Bb_X;                   // off-horoball subset in X, sorted global ids
};

/// Builds B_lambda by the inductive flow: at each supported vertex, every
/// outward edge whose image meets the C-neighborhood of the electro-ambient
/// representative contributes its maximal pair; the construction descends
/// across the edge when the pair is more than D apart in the coned metric.
Ladder build_ladder(const TreeGeometry& geo, const PathWitness& lambda_hat, const Rat& D, const Rat& C);

/// Retraction of TC(X) onto the ladder: electric projection onto the
/// segment of the same vertex space, after first moving vertices outside
/// the support to the nearest supported point (smallest id among ties).
int retract(const TreeGeometry& geo, const Ladder& ladder, int x_tc);

struct RetractionSweep {
    Rat K0, K1, K2;         // per-case maxima of d(retract x, retract y)
    Rat C0;                 // overall max over pairs at distance <= 1
    long long pairs = 0;
};

/// Exhaustive sweep over all TC(X) vertex pairs at distance <= 1.
RetractionSweep measure_retraction_lipschitz(const TreeGeometry& geo, const Ladder& ladder);

/// Fills p6/p7 of every subpiece and measures P2/P5 style commutation
/// discrepancies; returns the maxima over all subpieces.
struct SubpieceConstants {
    Rat P2, P5, P6, P7;
};
SubpieceConstants measure_subpiece_constants(TreeGeometry& geo, Ladder& ladder);

/// A coarse section of the ladder over the base-tree path to the root.
struct VerticalRay {
    int start_v = -1;
    std::vector<int> tree_path;      // from the start vertex to the root
    std::vector<int> points_X;       // global X ids, one per tree vertex on the path
    std::vector<Rat> displacement;   // per step, in the metric of X
};

VerticalRay vertical_ray(const TreeGeometry& geo, const Ladder& ladder, int v, int x_local);

struct DepthEscapeResult {
    bool pass = true;
    int witness_X = -1;  // a violating point when pass is false
    Rat witness_dist;
    Rat bound;  // n / (C + 1)
};

/// Verifies that every off-horoball ladder point stays n/(C+1) away from p
/// once the root segment's off-horoball part clears the n-ball around p.
DepthEscapeResult check_depth_escape(const TreeGeometry& geo, const Ladder& ladder, int p_local_root,
                                     long long n, const Rat& C);

}  // namespace relhyp
