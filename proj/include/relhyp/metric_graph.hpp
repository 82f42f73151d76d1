#pragma once

#include "relhyp/rational.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace relhyp {

struct Edge {
    int to;
    int eid;
};

/// Finite connected weighted graph with exact rational edge lengths,
/// used as the universal model of a geodesic metric space. Immutable
/// after build(); all queries are safe to run concurrently.
///
/// Alongside the rational lengths a scaled integer view is kept when the
/// least common denominator is small enough that every path length fits
/// comfortably in int64. The hot scan kernels run on the integer view and
/// produce the same exact values as the rational reference path.
struct MetricGraph {
    std::string space_id;
    int n = 0;
    std::vector<std::array<int, 2>> edge_ends;
    std::vector<Rat> edge_len;
    std::vector<std::vector<Edge>> adj;  // sorted by neighbor id
    std::map<int, std::string> labels;

    bool scaled_ok = false;
    long long scale = 1;  // common denominator of all edge lengths
    std::vector<long long> scaled_len;

    static MetricGraph build(std::string space_id,
                             int n,
                             const std::vector<std::tuple<int, int, Rat>>& edges,
                             std::map<int, std::string> labels = {});

    int vertex_count() const { return n; }
    int edge_count() const { return static_cast<int>(edge_ends.size()); }
    bool has_vertex(int v) const { return v >= 0 && v < n; }
    void require_vertex(int v) const;

    const std::vector<Edge>& neighbors(int v) const;
    std::optional<Rat> edge_length(int u, int v) const;
};

/// A concrete path in some space: ordered vertex sequence with consecutive
/// vertices adjacent. `length` is the sum of traversed edge lengths;
/// `quality` is the minimal quasigeodesic constant once certified.
struct PathWitness {
    std::string space_id;
    std::vector<int> verts;
    Rat length = 0;
    std::optional<Rat> quality;
};

/// Validates adjacency and computes the length. Throws std::domain_error
/// on an empty sequence or a non-adjacent consecutive pair.
PathWitness make_path(const MetricGraph& g, std::vector<int> verts);

// ---------------------------------------------------------------------------
// Shortest paths.
//
// sssp/sssp_multi are the exact rational reference implementations.
// sssp_i64 variants require g.scaled_ok and return distances in units of
// 1/g.scale; they are what the OpenMP scan kernels use.
// ---------------------------------------------------------------------------

std::vector<Rat> sssp(const MetricGraph& g, int src);
std::vector<Rat> sssp_multi(const MetricGraph& g, const std::vector<int>& sources);
std::vector<long long> sssp_i64(const MetricGraph& g, int src);
std::vector<long long> sssp_i64_multi(const MetricGraph& g, const std::vector<int>& sources);

/// Dijkstra restricted to an allowed vertex set (source must be allowed).
/// Unreachable/forbidden vertices get a negative sentinel in the i64 form
/// and are absent from paths.
std::vector<Rat> sssp_restricted(const MetricGraph& g, int src, const std::vector<char>& allowed);

Rat distance(const MetricGraph& g, int u, int v);

/// Exact exhaustive all-pairs matrix (row-major n*n). Meant for small
/// graphs; scans on large graphs go through per-source rows instead.
std::vector<std::vector<Rat>> all_pairs(const MetricGraph& g);

/// Max distance from v to any vertex.
Rat eccentricity(const MetricGraph& g, int v);

// ---------------------------------------------------------------------------
// Geodesics.
//
// Deterministic representative of a shortest path: after the distance row
// from u is fixed, every vertex takes as predecessor the smallest-id
// neighbor lying on some shortest path. This realizes the
// smallest-lexicographic predecessor sequence tie-break.
// ---------------------------------------------------------------------------

PathWitness geodesic(const MetricGraph& g, int u, int v);
PathWitness geodesic_restricted(const MetricGraph& g, int u, int v, const std::vector<char>& allowed);

// ---------------------------------------------------------------------------
// Four-point hyperbolicity.
//
// delta = max over 4-tuples of (L - M)/2 where L >= M >= S are the three
// pairings d(x,y)+d(z,w). Exhaustive mode is exact; sampled mode scans all
// 4-tuples of a seeded vertex subset and is a lower bound.
// ---------------------------------------------------------------------------

struct DeltaEstimate {
    Rat value;
    bool exact = true;
    std::string sample_desc;  // nonempty in sampled mode
};

DeltaEstimate four_point_delta_exhaustive(const MetricGraph& g);
DeltaEstimate four_point_delta_exhaustive_serial(const MetricGraph& g);  // reference kernel
DeltaEstimate four_point_delta_sampled(const MetricGraph& g, long long count, unsigned long long seed);

// ---------------------------------------------------------------------------
// Quasigeodesic certification and projections.
// ---------------------------------------------------------------------------

/// Minimal K >= 1 with length(beta) <= K*d(endpoints) + K over every
/// contiguous subsegment beta of p. Stores the result into p.quality.
Rat certify_quasigeodesic(const MetricGraph& g, PathWitness& p);

/// Vertex of `target` minimizing distance to x; smallest id among ties.
int nearest_point_projection(const MetricGraph& g, int x, const PathWitness& target);

/// Same, given a precomputed distance row from x.
int nearest_point_projection_row(const std::vector<Rat>& row_from_x, const PathWitness& target);

Rat hausdorff_distance(const MetricGraph& g, const std::vector<int>& A, const std::vector<int>& B);

/// Directed form: sup over a in A of dist(a, B).
Rat directed_hausdorff(const MetricGraph& g, const std::vector<int>& A, const std::vector<int>& B);

// ---------------------------------------------------------------------------
// Measured projection constants.
// ---------------------------------------------------------------------------

/// Minimal P1 with d(pi(x),pi(y)) <= P1*d(x,y) + P1 over all vertex pairs,
/// pi = nearest-point projection onto lam. Parallel scan; exact.
Rat measure_projection_lipschitz(const MetricGraph& g, const PathWitness& lam);
Rat measure_projection_lipschitz_serial(const MetricGraph& g, const PathWitness& lam);  // reference kernel

/// Tripod tracking constant of the pairs listed in `pairs`: whenever
/// d(pi(x),pi(y)) >= D, the concatenation [x,pi(x)] u [pi(x),pi(y)] u
/// [pi(y),y] must lie near [x,y]; returns the max such deviation seen.
Rat measure_tripod_tracking(const MetricGraph& g,
                            const PathWitness& lam,
                            const Rat& D,
                            const std::vector<std::pair<int, int>>& pairs);

}  // namespace relhyp
