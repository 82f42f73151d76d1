#pragma once

#include "relhyp/electric.hpp"
#include "relhyp/geometry_params.hpp"
#include "relhyp/ladder.hpp"
#include "relhyp/metric_graph.hpp"
#include "relhyp/tree_spaces.hpp"

#include <string>
#include <vector>

namespace relhyp {

/// Electric geodesics in the coned root space whose endpoints and whole
/// off-member part keep host distance >= N from the reference point.
struct AdmissibleSet {
    std::vector<PathWitness> lambdas;
    bool exhaustive = true;
    std::string diagnostic;  // set when the result is empty for a structural reason
};

AdmissibleSet enumerate_admissible(const MetricGraph& host, const ConedSpace& cs, int p,
                                   long long N, long long budget, unsigned long long seed);

struct CTRow {
    long long N = 0;
    Rat M;
    std::pair<int, int> lambda_endpoints;  // local root-space ids
    int witness_vertex = -1;               // global X id
    bool exhaustive = true;
};

/// Measured Cannon-Thurston profile: per N the lower envelope, over
/// admissible segments, of the closest approach of the stripped
/// pel-geodesic to the reference point, in the metric of X. In sampled
/// (non-exhaustive) mode each row is an upper bound on the true envelope.
struct CTProfile {
    std::string instance_id;
    int v0 = 0;
    int p_local = 0;
    long long budget = 0;
    unsigned long long seed = 0;
    int depth = 0;
    std::vector<CTRow> rows;
    std::vector<std::string> diagnostics;
    std::map<std::string, ParamValue> params;
};

CTProfile ct_profile(const TreeGeometry& geo, int p_local, const std::vector<long long>& N_range,
                     long long budget, unsigned long long seed, const GeometryParams& params);

/// Recomputes one row's witness from scratch: the segment must be
/// admissible at its N and the witness point must sit on the stripped
/// pel-geodesic at exactly the stated distance.
bool verify_ct_row(const TreeGeometry& geo, int p_local, const CTRow& row);

/// Off-member vertices of a TC(X) path, as global X ids.
std::vector<int> strip_cone_subtrees(const TreeGeometry& geo, const PathWitness& beta_pel);

/// How far the stripped pel-geodesic strays from the off-horoball part of
/// the ladder, in the metric of X.
Rat pel_to_ladder_tracking(const TreeGeometry& geo, const Ladder& lad, const PathWitness& beta_pel);

}  // namespace relhyp
