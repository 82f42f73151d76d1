#include "relhyp/ct_harness.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace relhyp {

AdmissibleSet enumerate_admissible(const MetricGraph& host, const ConedSpace& cs, int p,
                                   long long N, long long budget, unsigned long long seed) {
    host.require_vertex(p);
    if (budget < 1) throw std::domain_error("enumerate_admissible: budget must be >= 1");
    auto owner = cs.fam.membership(host.n);
    if (owner[p] >= 0) throw std::domain_error("enumerate_admissible: p must lie outside members");

    AdmissibleSet out;
    auto row_p = sssp(host, p);
    Rat nn = make_rat(N);

    // endpoint candidates: ordinary vertices outside members, far enough
    std::vector<int> cand;
    for (int v = 0; v < host.n; ++v)
        if (owner[v] < 0 && row_p[v] >= nn) cand.push_back(v);
    if (cand.size() < 2) {
        out.diagnostic = "no endpoint pair at host distance >= " + std::to_string(N) +
                         " from p=" + std::to_string(p);
        return out;
    }

    long long total = static_cast<long long>(cand.size()) * (static_cast<long long>(cand.size()) - 1) / 2;
    std::vector<std::pair<int, int>> pairs;
    if (total <= budget) {
        for (size_t i = 0; i < cand.size(); ++i)
            for (size_t j = i + 1; j < cand.size(); ++j) pairs.emplace_back(cand[i], cand[j]);
    } else {
        out.exhaustive = false;
        // boundary-pair sampling: prefer endpoints deep away from p
        std::vector<int> by_depth = cand;
        std::sort(by_depth.begin(), by_depth.end(), [&row_p](int a, int b) {
            if (row_p[a] != row_p[b]) return row_p[a] > row_p[b];
            return a < b;
        });
        size_t m = by_depth.size();
        while (m > 2 && static_cast<long long>(m - 1) * static_cast<long long>(m - 2) / 2 >= budget) --m;
        by_depth.resize(m);
        for (size_t i = 0; i < by_depth.size(); ++i)
            for (size_t j = i + 1; j < by_depth.size(); ++j)
                pairs.emplace_back(std::min(by_depth[i], by_depth[j]),
                                   std::max(by_depth[i], by_depth[j]));
        if (static_cast<long long>(pairs.size()) > budget) {
            std::mt19937_64 rng(seed);
            std::shuffle(pairs.begin(), pairs.end(), rng);
            pairs.resize(budget);
        }
        std::sort(pairs.begin(), pairs.end());
    }

    for (auto [a, b] : pairs) {
        PathWitness lam = electric_geodesic_nb(cs, a, b);
        bool ok = true;
        for (int w : lam.verts) {
            if (!cs.is_ordinary(w) || cs.member_of[w] >= 0) continue;  // off-member part only
            if (row_p[w] < nn) {
                ok = false;
                break;
            }
        }
        if (ok) out.lambdas.push_back(std::move(lam));
    }
    if (out.lambdas.empty() && out.diagnostic.empty())
        out.diagnostic = "no admissible segment at N=" + std::to_string(N);
    return out;
}

std::vector<int> strip_cone_subtrees(const TreeGeometry& geo, const PathWitness& beta_pel) {
    std::vector<int> out;
    for (int w : beta_pel.verts) {
        int tv = geo.TC.P(w);
        const auto& cs = geo.coned(tv);
        int local = w - geo.TC.offset.at(tv);
        if (local >= cs.host_n) continue;          // cone point
        if (cs.member_of[local] >= 0) continue;    // inside a horosphere-like set
        out.push_back(geo.X.global_id(tv, local));
    }
    return out;
}

CTProfile ct_profile(const TreeGeometry& geo, int p_local, const std::vector<long long>& N_range,
                     long long budget, unsigned long long seed, const GeometryParams& params) {
    const auto& tos = geo.tos;
    const auto& root_space = tos.vspaces.at(tos.root);
    const auto& cs0 = geo.coned(tos.root);

    CTProfile prof;
    prof.instance_id = tos.instance_id;
    prof.v0 = tos.root;
    prof.p_local = p_local;
    prof.budget = budget;
    prof.seed = seed;
    prof.depth = geo.depth;
    prof.params = params.snapshot();

    int pX = geo.X.global_id(tos.root, p_local);
    auto row_pX = sssp(geo.X.graph, pX);
    int off0 = geo.TC.offset.at(tos.root);

    std::vector<long long> sorted_N(N_range);
    std::sort(sorted_N.begin(), sorted_N.end());
    for (long long N : sorted_N) {
        auto adm = enumerate_admissible(root_space.graph, cs0, p_local, N, budget, seed);
        if (adm.lambdas.empty()) {
            prof.diagnostics.push_back("N=" + std::to_string(N) + ": " +
                                       (adm.diagnostic.empty() ? "empty" : adm.diagnostic));
            continue;
        }
        bool have = false;
        CTRow best;
        best.N = N;
        best.exhaustive = adm.exhaustive;
        for (const auto& lam : adm.lambdas) {
            int a = lam.verts.front(), b = lam.verts.back();
            PathWitness beta = geodesic(geo.TC.graph, off0 + a, off0 + b);
            auto stripped = strip_cone_subtrees(geo, beta);
            if (stripped.empty()) continue;  // cannot happen: endpoints are off-member
            Rat m = -1;
            int wit = -1;
            for (int x : stripped)
                if (m < 0 || row_pX[x] < m || (row_pX[x] == m && x < wit)) {
                    m = row_pX[x];
                    wit = x;
                }
            CTRow cand;
            cand.N = N;
            cand.M = m;
            cand.lambda_endpoints = {a, b};
            cand.witness_vertex = wit;
            cand.exhaustive = adm.exhaustive;
            auto key = [](const CTRow& r) {
                return std::tuple<const Rat&, int, int, int>(r.M, r.lambda_endpoints.first,
                                                             r.lambda_endpoints.second, r.witness_vertex);
            };
            if (!have || key(cand) < key(best)) {
                best = cand;
                have = true;
            }
        }
        if (have) prof.rows.push_back(best);
    }
    return prof;
}

bool verify_ct_row(const TreeGeometry& geo, int p_local, const CTRow& row) {
    const auto& tos = geo.tos;
    const auto& host = tos.vspaces.at(tos.root).graph;
    const auto& cs0 = geo.coned(tos.root);
    auto owner = cs0.fam.membership(host.n);
    auto row_p = sssp(host, p_local);
    Rat nn = make_rat(row.N);

    PathWitness lam = electric_geodesic_nb(cs0, row.lambda_endpoints.first, row.lambda_endpoints.second);
    for (int w : lam.verts) {
        if (!cs0.is_ordinary(w) || cs0.member_of[w] >= 0) continue;
        if (row_p[w] < nn) return false;  // not admissible after all
    }
    int off0 = geo.TC.offset.at(tos.root);
    PathWitness beta = geodesic(geo.TC.graph, off0 + row.lambda_endpoints.first,
                                off0 + row.lambda_endpoints.second);
    auto stripped = strip_cone_subtrees(geo, beta);
    if (!std::count(stripped.begin(), stripped.end(), row.witness_vertex)) return false;
    auto row_pX = sssp(geo.X.graph, geo.X.global_id(tos.root, p_local));
    return row_pX[row.witness_vertex] == row.M;
}

Rat pel_to_ladder_tracking(const TreeGeometry& geo, const Ladder& lad, const PathWitness& beta_pel) {
    auto stripped = strip_cone_subtrees(geo, beta_pel);
    if (stripped.empty()) return Rat(0);
    auto to_ladder = sssp_multi(geo.X.graph, lad.Bb_X);
    Rat worst = 0;
    for (int x : stripped)
        if (to_ladder[x] > worst) worst = to_ladder[x];
    return worst;
}

}  // namespace relhyp
