#include "relhyp/metric_graph.hpp"

#include <omp.h>

#include <algorithm>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace relhyp {

namespace {

// Path lengths in scaled units must stay far from int64 limits; sums of two
// distances appear in the four-point kernels.
constexpr long long kScaledTotalCap = 1LL << 40;
constexpr long long kScaleCap = 1LL << 20;
constexpr long long kUnreached = -1;

}  // namespace

MetricGraph MetricGraph::build(std::string space_id,
                               int n,
                               const std::vector<std::tuple<int, int, Rat>>& edges,
                               std::map<int, std::string> labels) {
    if (n <= 0) throw std::invalid_argument("MetricGraph: need at least one vertex");
    MetricGraph g;
    g.space_id = std::move(space_id);
    g.n = n;
    g.adj.resize(n);
    g.labels = std::move(labels);

    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v, len] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("MetricGraph: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("MetricGraph: self-loop rejected");
        if (len <= 0) throw std::invalid_argument("MetricGraph: edge length must be positive");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second)
            throw std::invalid_argument("MetricGraph: duplicate edge between " + std::to_string(u) +
                                        " and " + std::to_string(v));
        int eid = static_cast<int>(g.edge_ends.size());
        g.edge_ends.push_back({u, v});
        g.edge_len.push_back(len);
        g.adj[u].push_back({v, eid});
        g.adj[v].push_back({u, eid});
    }
    for (auto& a : g.adj)
        std::sort(a.begin(), a.end(), [](const Edge& x, const Edge& y) { return x.to < y.to; });

    // connectivity
    std::vector<char> vis(n, 0);
    std::vector<int> stack{0};
    vis[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const auto& e : g.adj[v])
            if (!vis[e.to]) {
                vis[e.to] = 1;
                ++cnt;
                stack.push_back(e.to);
            }
    }
    if (cnt != n) throw std::invalid_argument("MetricGraph: graph is not connected");

    // scaled integer view
    mpz_class lcm_den(1);
    for (const auto& len : g.edge_len) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), len.get_den().get_mpz_t());
    if (lcm_den.fits_slong_p() && lcm_den.get_si() <= kScaleCap) {
        long long sc = lcm_den.get_si();
        mpz_class total(0);
        bool ok = true;
        std::vector<long long> sl;
        sl.reserve(g.edge_len.size());
        for (const auto& len : g.edge_len) {
            mpz_class s = len.get_num() * (lcm_den / len.get_den());
            if (!s.fits_slong_p()) {
                ok = false;
                break;
            }
            sl.push_back(s.get_si());
            total += s;
        }
        if (ok && total.fits_slong_p() && total.get_si() <= kScaledTotalCap) {
            g.scaled_ok = true;
            g.scale = sc;
            g.scaled_len = std::move(sl);
        }
    }
    return g;
}

void MetricGraph::require_vertex(int v) const {
    if (!has_vertex(v))
        throw std::domain_error("unknown vertex id " + std::to_string(v) + " in space '" + space_id + "'");
}

const std::vector<Edge>& MetricGraph::neighbors(int v) const {
    require_vertex(v);
    return adj[v];
}

std::optional<Rat> MetricGraph::edge_length(int u, int v) const {
    require_vertex(u);
    require_vertex(v);
    const auto& a = adj[u];
    auto it = std::lower_bound(a.begin(), a.end(), v,
                               [](const Edge& e, int t) { return e.to < t; });
    if (it != a.end() && it->to == v) return edge_len[it->eid];
    return std::nullopt;
}

PathWitness make_path(const MetricGraph& g, std::vector<int> verts) {
    if (verts.empty()) throw std::domain_error("make_path: empty vertex sequence");
    PathWitness p;
    p.space_id = g.space_id;
    g.require_vertex(verts.front());
    Rat len = 0;
    for (size_t i = 0; i + 1 < verts.size(); ++i) {
        auto el = g.edge_length(verts[i], verts[i + 1]);
        if (!el)
            throw std::domain_error("make_path: vertices " + std::to_string(verts[i]) + " and " +
                                    std::to_string(verts[i + 1]) + " are not adjacent");
        len += *el;
    }
    p.verts = std::move(verts);
    p.length = len;
    return p;
}

// --------------------------------------------------------------------------
// Dijkstra variants.
// --------------------------------------------------------------------------

namespace {

struct RatQueueItem {
    Rat d;
    int v;
};
struct RatQueueCmp {
    bool operator()(const RatQueueItem& a, const RatQueueItem& b) const {
        if (a.d != b.d) return a.d > b.d;
        return a.v > b.v;
    }
};

std::vector<Rat> dijkstra_rat(const MetricGraph& g,
                              const std::vector<int>& sources,
                              const std::vector<char>* allowed) {
    std::vector<Rat> dist(g.n, Rat(-1));
    std::vector<char> done(g.n, 0);
    std::priority_queue<RatQueueItem, std::vector<RatQueueItem>, RatQueueCmp> pq;
    for (int s : sources) {
        g.require_vertex(s);
        if (allowed && !(*allowed)[s])
            throw std::domain_error("sssp_restricted: source outside allowed set");
        dist[s] = 0;
        pq.push({Rat(0), s});
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (done[v]) continue;
        done[v] = 1;
        for (const auto& e : g.adj[v]) {
            if (allowed && !(*allowed)[e.to]) continue;
            Rat nd = d + g.edge_len[e.eid];
            if (dist[e.to] < 0 || nd < dist[e.to]) {
                dist[e.to] = nd;
                pq.push({nd, e.to});
            }
        }
    }
    return dist;
}

std::vector<long long> dijkstra_i64(const MetricGraph& g,
                                    const std::vector<int>& sources,
                                    const std::vector<char>* allowed) {
    if (!g.scaled_ok) throw std::logic_error("sssp_i64: scaled view unavailable for '" + g.space_id + "'");
    std::vector<long long> dist(g.n, kUnreached);
    using Item = std::pair<long long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int s : sources) {
        g.require_vertex(s);
        if (allowed && !(*allowed)[s])
            throw std::domain_error("sssp_restricted: source outside allowed set");
        dist[s] = 0;
        pq.emplace(0, s);
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (dist[v] != d) continue;
        for (const auto& e : g.adj[v]) {
            if (allowed && !(*allowed)[e.to]) continue;
            long long nd = d + g.scaled_len[e.eid];
            if (dist[e.to] == kUnreached || nd < dist[e.to]) {
                dist[e.to] = nd;
                pq.emplace(nd, e.to);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<Rat> sssp(const MetricGraph& g, int src) { return dijkstra_rat(g, {src}, nullptr); }

std::vector<Rat> sssp_multi(const MetricGraph& g, const std::vector<int>& sources) {
    if (sources.empty()) throw std::domain_error("sssp_multi: empty source set");
    return dijkstra_rat(g, sources, nullptr);
}

std::vector<long long> sssp_i64(const MetricGraph& g, int src) { return dijkstra_i64(g, {src}, nullptr); }

std::vector<long long> sssp_i64_multi(const MetricGraph& g, const std::vector<int>& sources) {
    if (sources.empty()) throw std::domain_error("sssp_i64_multi: empty source set");
    return dijkstra_i64(g, sources, nullptr);
}

std::vector<Rat> sssp_restricted(const MetricGraph& g, int src, const std::vector<char>& allowed) {
    return dijkstra_rat(g, {src}, &allowed);
}

Rat distance(const MetricGraph& g, int u, int v) {
    g.require_vertex(u);
    g.require_vertex(v);
    if (u == v) return Rat(0);
    if (g.scaled_ok) {
        auto row = sssp_i64(g, u);
        return Rat(make_rat(row[v], g.scale));
    }
    return sssp(g, u)[v];
}

std::vector<std::vector<Rat>> all_pairs(const MetricGraph& g) {
    std::vector<std::vector<Rat>> rows(g.n);
    if (g.scaled_ok) {
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < g.n; ++s) {
            auto r = sssp_i64(g, s);
            std::vector<Rat> out(g.n);
            for (int v = 0; v < g.n; ++v) out[v] = make_rat(r[v], g.scale);
            rows[s] = std::move(out);
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < g.n; ++s) rows[s] = sssp(g, s);
    }
    return rows;
}

Rat eccentricity(const MetricGraph& g, int v) {
    auto row = sssp(g, v);
    Rat m = 0;
    for (const auto& d : row)
        if (d > m) m = d;
    return m;
}

// --------------------------------------------------------------------------
// Geodesics: smallest-id predecessor chain over a fixed distance row.
// --------------------------------------------------------------------------

namespace {

PathWitness path_from_row_rat(const MetricGraph& g, const std::vector<Rat>& dist, int u, int v,
                              const std::vector<char>* allowed) {
    if (dist[v] < 0) throw std::domain_error("geodesic: target unreachable within allowed set");
    std::vector<int> rev{v};
    int cur = v;
    while (cur != u) {
        int pred = -1;
        for (const auto& e : g.adj[cur]) {
            if (allowed && !(*allowed)[e.to]) continue;
            if (dist[e.to] < 0) continue;
            if (dist[e.to] + g.edge_len[e.eid] == dist[cur]) {
                pred = e.to;
                break;  // adjacency sorted by id: first hit is the smallest
            }
        }
        if (pred < 0) throw std::logic_error("geodesic: predecessor chain broken");
        rev.push_back(pred);
        cur = pred;
    }
    std::reverse(rev.begin(), rev.end());
    PathWitness p;
    p.space_id = g.space_id;
    p.verts = std::move(rev);
    p.length = dist[v];
    return p;
}

PathWitness path_from_row_i64(const MetricGraph& g, const std::vector<long long>& dist, int u, int v) {
    if (dist[v] == kUnreached) throw std::domain_error("geodesic: target unreachable");
    std::vector<int> rev{v};
    int cur = v;
    while (cur != u) {
        int pred = -1;
        for (const auto& e : g.adj[cur]) {
            if (dist[e.to] == kUnreached) continue;
            if (dist[e.to] + g.scaled_len[e.eid] == dist[cur]) {
                pred = e.to;
                break;
            }
        }
        if (pred < 0) throw std::logic_error("geodesic: predecessor chain broken");
        rev.push_back(pred);
        cur = pred;
    }
    std::reverse(rev.begin(), rev.end());
    PathWitness p;
    p.space_id = g.space_id;
    p.verts = std::move(rev);
    p.length = make_rat(dist[v], g.scale);
    return p;
}

}  // namespace

PathWitness geodesic(const MetricGraph& g, int u, int v) {
    g.require_vertex(u);
    g.require_vertex(v);
    if (u == v) {
        PathWitness p;
        p.space_id = g.space_id;
        p.verts = {u};
        p.length = 0;
        return p;
    }
    if (g.scaled_ok) return path_from_row_i64(g, sssp_i64(g, u), u, v);
    return path_from_row_rat(g, sssp(g, u), u, v, nullptr);
}

PathWitness geodesic_restricted(const MetricGraph& g, int u, int v, const std::vector<char>& allowed) {
    g.require_vertex(u);
    g.require_vertex(v);
    if (u == v) {
        if (!allowed[u]) throw std::domain_error("geodesic_restricted: vertex outside allowed set");
        PathWitness p;
        p.space_id = g.space_id;
        p.verts = {u};
        p.length = 0;
        return p;
    }
    auto dist = dijkstra_rat(g, {u}, &allowed);
    return path_from_row_rat(g, dist, u, v, &allowed);
}

// --------------------------------------------------------------------------
// Four-point delta.
// --------------------------------------------------------------------------

namespace {

// defect*2 of one 4-tuple in scaled units
inline long long defect2_i64(long long dxy, long long dzw, long long dxz, long long dyw,
                             long long dxw, long long dyz) {
    long long s1 = dxy + dzw, s2 = dxz + dyw, s3 = dxw + dyz;
    long long hi = std::max({s1, s2, s3});
    long long mid = s1 + s2 + s3 - hi - std::min({s1, s2, s3});
    return hi - mid;
}

Rat defect2_rat(const Rat& dxy, const Rat& dzw, const Rat& dxz, const Rat& dyw, const Rat& dxw,
                const Rat& dyz) {
    Rat s1 = dxy + dzw, s2 = dxz + dyw, s3 = dxw + dyz;
    Rat hi = std::max({s1, s2, s3});
    Rat mid = s1 + s2 + s3 - hi - std::min({s1, s2, s3});
    return hi - mid;
}

// Exhaustive scan over all 4-subsets of `ids`, rows indexed by position in ids.
long long scan_tuples_i64(const std::vector<std::vector<long long>>& rows, const std::vector<int>& ids) {
    int m = static_cast<int>(ids.size());
    long long best = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : best)
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            long long dab = rows[a][ids[b]];
            for (int c = b + 1; c < m; ++c) {
                long long dac = rows[a][ids[c]];
                long long dbc = rows[b][ids[c]];
                for (int d = c + 1; d < m; ++d) {
                    long long v = defect2_i64(dab, rows[c][ids[d]], dac, rows[b][ids[d]],
                                              rows[a][ids[d]], dbc);
                    if (v > best) best = v;
                }
            }
        }
    }
    return best;
}

}  // namespace

DeltaEstimate four_point_delta_exhaustive(const MetricGraph& g) {
    if (g.n < 4) return {Rat(0), true, ""};
    if (g.scaled_ok) {
        std::vector<int> ids(g.n);
        for (int i = 0; i < g.n; ++i) ids[i] = i;
        std::vector<std::vector<long long>> rows(g.n);
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < g.n; ++s) rows[s] = sssp_i64(g, s);
        long long best = scan_tuples_i64(rows, ids);
        return {make_rat(best, 2 * g.scale), true, ""};
    }
    return four_point_delta_exhaustive_serial(g);
}

DeltaEstimate four_point_delta_exhaustive_serial(const MetricGraph& g) {
    if (g.n < 4) return {Rat(0), true, ""};
    auto rows = all_pairs(g);
    Rat best = 0;
    for (int a = 0; a < g.n; ++a)
        for (int b = a + 1; b < g.n; ++b)
            for (int c = b + 1; c < g.n; ++c)
                for (int d = c + 1; d < g.n; ++d) {
                    Rat v = defect2_rat(rows[a][b], rows[c][d], rows[a][c], rows[b][d], rows[a][d],
                                        rows[b][c]);
                    if (v > best) best = v;
                }
    return {best / 2, true, ""};
}

DeltaEstimate four_point_delta_sampled(const MetricGraph& g, long long count, unsigned long long seed) {
    if (count <= 0) throw std::domain_error("four_point_delta_sampled: count must be positive");
    if (g.n < 4) return {Rat(0), false, "sampled: graph has fewer than 4 vertices"};

    // Subset size s with C(s,4) roughly `count`, clamped to the vertex count.
    int s = 4;
    auto choose4 = [](long long k) { return k * (k - 1) * (k - 2) * (k - 3) / 24; };
    while (s < g.n && choose4(s + 1) <= count) ++s;
    std::vector<int> ids(g.n);
    for (int i = 0; i < g.n; ++i) ids[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(s);
    std::sort(ids.begin(), ids.end());

    std::string desc = "sampled: subset=" + std::to_string(s) + " tuples=" + std::to_string(choose4(s)) +
                       " seed=" + std::to_string(seed);
    if (g.scaled_ok) {
        std::vector<std::vector<long long>> rows(s);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < s; ++i) rows[i] = sssp_i64(g, ids[i]);
        long long best = scan_tuples_i64(rows, ids);
        return {make_rat(best, 2 * g.scale), false, desc};
    }
    std::vector<std::vector<Rat>> rows(s);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < s; ++i) rows[i] = sssp(g, ids[i]);
    Rat best = 0;
    for (int a = 0; a < s; ++a)
        for (int b = a + 1; b < s; ++b)
            for (int c = b + 1; c < s; ++c)
                for (int d = c + 1; d < s; ++d) {
                    Rat v = defect2_rat(rows[a][ids[b]], rows[c][ids[d]], rows[a][ids[c]],
                                        rows[b][ids[d]], rows[a][ids[d]], rows[b][ids[c]]);
                    if (v > best) best = v;
                }
    return {best / 2, false, desc};
}

// --------------------------------------------------------------------------
// Certification, projections, Hausdorff.
// --------------------------------------------------------------------------

Rat certify_quasigeodesic(const MetricGraph& g, PathWitness& p) {
    if (p.space_id != g.space_id)
        throw std::domain_error("certify_quasigeodesic: path belongs to space '" + p.space_id + "'");
    if (p.verts.empty()) throw std::domain_error("certify_quasigeodesic: empty path");

    int m = static_cast<int>(p.verts.size());
    std::vector<Rat> prefix(m);
    prefix[0] = 0;
    for (int i = 1; i < m; ++i) prefix[i] = prefix[i - 1] + *g.edge_length(p.verts[i - 1], p.verts[i]);

    std::map<int, std::vector<Rat>> rows;
    for (int v : p.verts)
        if (!rows.count(v)) rows.emplace(v, sssp(g, v));

    Rat K = 1;
    for (int i = 0; i < m; ++i) {
        const auto& row = rows.at(p.verts[i]);
        for (int j = i + 1; j < m; ++j) {
            Rat len = prefix[j] - prefix[i];
            Rat bound = len / (row[p.verts[j]] + 1);
            if (bound > K) K = bound;
        }
    }
    p.quality = K;
    return K;
}

int nearest_point_projection_row(const std::vector<Rat>& row_from_x, const PathWitness& target) {
    if (target.verts.empty()) throw std::domain_error("nearest_point_projection: empty target");
    int best = -1;
    Rat bd = -1;
    for (int v : target.verts) {
        const Rat& d = row_from_x[v];
        if (best < 0 || d < bd || (d == bd && v < best)) {
            best = v;
            bd = d;
        }
    }
    return best;
}

int nearest_point_projection(const MetricGraph& g, int x, const PathWitness& target) {
    g.require_vertex(x);
    if (target.verts.empty()) throw std::domain_error("nearest_point_projection: empty target");
    return nearest_point_projection_row(sssp(g, x), target);
}

Rat directed_hausdorff(const MetricGraph& g, const std::vector<int>& A, const std::vector<int>& B) {
    if (A.empty() || B.empty()) throw std::domain_error("hausdorff: empty vertex set");
    auto toB = sssp_multi(g, B);
    Rat m = 0;
    for (int a : A)
        if (toB[a] > m) m = toB[a];
    return m;
}

Rat hausdorff_distance(const MetricGraph& g, const std::vector<int>& A, const std::vector<int>& B) {
    return std::max(directed_hausdorff(g, A, B), directed_hausdorff(g, B, A));
}

// --------------------------------------------------------------------------
// Measured projection constants.
// --------------------------------------------------------------------------

namespace {

// max of fractions num/den tracked under exact cross multiplication
struct FracMax {
    long long num = 0, den = 1;
    void update(long long n, long long d) {
        if (static_cast<__int128>(n) * den > static_cast<__int128>(num) * d) {
            num = n;
            den = d;
        }
    }
    void merge(const FracMax& o) { update(o.num, o.den); }
};

}  // namespace

Rat measure_projection_lipschitz(const MetricGraph& g, const PathWitness& lam) {
    if (lam.verts.empty()) throw std::domain_error("measure_projection_lipschitz: empty target");
    if (!g.scaled_ok) return measure_projection_lipschitz_serial(g, lam);

    std::vector<int> lam_verts(lam.verts.begin(), lam.verts.end());
    std::sort(lam_verts.begin(), lam_verts.end());
    lam_verts.erase(std::unique(lam_verts.begin(), lam_verts.end()), lam_verts.end());
    int L = static_cast<int>(lam_verts.size());

    // rows from every lambda vertex give both projections and pairwise
    // distances along lambda
    std::vector<std::vector<long long>> lrows(L);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < L; ++i) lrows[i] = sssp_i64(g, lam_verts[i]);

    std::vector<int> proj(g.n);  // index into lam_verts
    for (int x = 0; x < g.n; ++x) {
        int best = 0;
        long long bd = lrows[0][x];
        for (int i = 1; i < L; ++i)
            if (lrows[i][x] < bd) {
                bd = lrows[i][x];
                best = i;
            }  // lam_verts sorted: first minimum has the smallest id
        proj[x] = best;
    }

    FracMax global;
#pragma omp parallel
    {
        FracMax local;
#pragma omp for schedule(dynamic)
        for (int x = 0; x < g.n; ++x) {
            auto row = sssp_i64(g, x);
            for (int y = x + 1; y < g.n; ++y) {
                long long dpp = lrows[proj[x]][lam_verts[proj[y]]];
                local.update(dpp, row[y] + g.scale);
            }
        }
#pragma omp critical
        global.merge(local);
    }
    return make_rat(global.num, global.den);
}

Rat measure_projection_lipschitz_serial(const MetricGraph& g, const PathWitness& lam) {
    if (lam.verts.empty()) throw std::domain_error("measure_projection_lipschitz: empty target");
    auto rows = all_pairs(g);
    std::vector<int> proj(g.n);
    for (int x = 0; x < g.n; ++x) proj[x] = nearest_point_projection_row(rows[x], lam);
    Rat best = 0;
    for (int x = 0; x < g.n; ++x)
        for (int y = x + 1; y < g.n; ++y) {
            Rat v = rows[proj[x]][proj[y]] / (rows[x][y] + 1);
            if (v > best) best = v;
        }
    return best;
}

Rat measure_tripod_tracking(const MetricGraph& g,
                            const PathWitness& lam,
                            const Rat& D,
                            const std::vector<std::pair<int, int>>& pairs) {
    Rat worst = 0;
    for (auto [x, y] : pairs) {
        auto row_x = sssp(g, x);
        int px = nearest_point_projection_row(row_x, lam);
        auto row_y = sssp(g, y);
        int py = nearest_point_projection_row(row_y, lam);
        if (distance(g, px, py) < D) continue;
        auto leg1 = geodesic(g, x, px);
        auto leg2 = geodesic(g, px, py);
        auto leg3 = geodesic(g, py, y);
        std::vector<int> concat = leg1.verts;
        concat.insert(concat.end(), leg2.verts.begin(), leg2.verts.end());
        concat.insert(concat.end(), leg3.verts.begin(), leg3.verts.end());
        auto base = geodesic(g, x, y);
        Rat dev = directed_hausdorff(g, concat, base.verts);
        if (dev > worst) worst = dev;
    }
    return worst;
}

}  // namespace relhyp
