#include "relhyp/ladder.hpp"

#include <omp.h>

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace relhyp {

namespace {

// Multi-source Dijkstra carrying the achieving source, ties to the smaller
// source id: yields per vertex the lexicographic minimum of
// (distance to target set, target id).
std::pair<std::vector<Rat>, std::vector<int>> nearest_with_label(const MetricGraph& g,
                                                                 const std::vector<int>& targets) {
    if (targets.empty()) throw std::domain_error("nearest_with_label: empty target set");
    std::vector<Rat> dist(g.n, Rat(-1));
    std::vector<int> label(g.n, -1);
    struct Item {
        Rat d;
        int lab;
        int v;
    };
    struct Cmp {
        bool operator()(const Item& a, const Item& b) const {
            if (a.d != b.d) return a.d > b.d;
            if (a.lab != b.lab) return a.lab > b.lab;
            return a.v > b.v;
        }
    };
    std::priority_queue<Item, std::vector<Item>, Cmp> pq;
    for (int t : targets) {
        g.require_vertex(t);
        if (label[t] < 0 || t < label[t]) {
            dist[t] = 0;
            label[t] = t;
            pq.push({Rat(0), t, t});
        }
    }
    auto better = [&](const Rat& d, int lab, int v) {
        if (dist[v] < 0) return true;
        if (d != dist[v]) return d < dist[v];
        return lab < label[v];
    };
    while (!pq.empty()) {
        auto it = pq.top();
        pq.pop();
        if (dist[it.v] != it.d || label[it.v] != it.lab) continue;
        for (const auto& e : g.adj[it.v]) {
            Rat nd = it.d + g.edge_len[e.eid];
            if (better(nd, it.lab, e.to)) {
                dist[e.to] = nd;
                label[e.to] = it.lab;
                pq.push({nd, it.lab, e.to});
            }
        }
    }
    return {std::move(dist), std::move(label)};
}

// argmin of a distance row over a path, ties toward the smaller vertex id
// and then the smaller index; returns the index on the path
int argmin_on_path(const std::vector<Rat>& row, const std::vector<int>& verts) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(verts.size()); ++i) {
        const Rat &d = row[verts[i]], &bd = row[verts[best]];
        if (d < bd || (d == bd && verts[i] < verts[best])) best = i;
    }
    return best;
}

// image of the ladder projection on the electric segment itself
int to_lambda_vertex(const ConedSpace& cs, const PathWitness& lambda, const ElectroAmbient& mu,
                     int mu_idx) {
    if (mu.ep_index[mu_idx] >= 0) return lambda.verts[mu.ep_index[mu_idx]];
    const auto& seg = mu.segments[mu.segment_of[mu_idx]];
    if (seg.used_cone) return cs.cone_vertex[seg.member_idx];
    return (mu_idx - seg.first <= seg.last - mu_idx) ? lambda.verts[seg.ep_from]
                                                     : lambda.verts[seg.ep_to];
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

TreeGeometry build_tree_geometry(const TreeOfSpaces& tos, int depth) {
    tos.require_well_formed();
    TreeGeometry geo;
    geo.tos = tos;
    geo.X = assemble_total(tos);
    geo.TC = induced_coned_tree(tos);
    if (depth <= 0) {
        depth = 1;
        for (const auto& [tv, vs] : tos.vspaces)
            if (vs.fam.member_count() > 0)
                depth = std::max(depth, default_horoball_depth(vs.graph, vs.fam));
    }
    geo.depth = depth;
    for (const auto& [tv, vs] : tos.vspaces)
        geo.glued.emplace(tv, glue_cones(vs.graph, vs.fam, depth));

    geo.parent[tos.root] = tos.root;
    std::vector<int> stack{tos.root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : tos.tree_neighbors(v))
            if (!geo.parent.count(w)) {
                geo.parent[w] = v;
                stack.push_back(w);
            }
    }
    return geo;
}

int phi_map(const TreeOfSpaces& tos, int v, int eidx, int p) {
    const auto& e = tos.espaces.at(eidx);
    if (e.v1 != v && e.v2 != v) throw std::domain_error("phi_map: vertex is not an end of the edge");
    int parent = e.v1 == v ? e.v2 : e.v1;
    const auto& f_from = tos.map_into(eidx, parent);
    const auto& f_to = tos.map_into(eidx, v);
    int x = -1;
    for (const auto& [xe, img] : f_from)
        if (img == p && (x < 0 || xe < x)) x = xe;
    if (x < 0) throw std::domain_error("phi_map: point is not in the image of the inclusion");
    return f_to.at(x);
}

// --------------------------------------------------------------------------
// Ladder construction
// --------------------------------------------------------------------------

Ladder build_ladder(const TreeGeometry& geo, const PathWitness& lambda_hat, const Rat& D, const Rat& C) {
    const auto& tos = geo.tos;
    const auto& cs0 = geo.coned(tos.root);
    if (lambda_hat.space_id != cs0.graph.space_id)
        throw std::domain_error("build_ladder: the segment must live in the coned root space");
    for (int endpoint : {lambda_hat.verts.front(), lambda_hat.verts.back()}) {
        if (cs0.is_cone(endpoint) || cs0.member_of[endpoint] >= 0)
            throw std::domain_error("build_ladder: segment endpoints must lie outside horosphere-like sets");
    }
    if (D < 0 || C < 0) throw std::invalid_argument("build_ladder: D and C must be >= 0");

    Ladder lad;
    lad.root = tos.root;
    lad.D_used = D;
    lad.C_used = C;
    lad.lambda_root = lambda_hat;
    lad.T1.insert(tos.root);

    std::vector<std::pair<int, PathWitness>> stage{{tos.root, lambda_hat}};
    while (!stage.empty()) {
        std::vector<int> added;
        for (const auto& [v, _] : stage) added.push_back(v);
        lad.growth.push_back(std::move(added));

        std::vector<std::pair<int, PathWitness>> next_stage;
        for (auto& [v, lam] : stage) {
            const auto& cs = geo.coned(v);
            const auto& gs = geo.glued.at(v);
            ElectroAmbient mu = electro_ambient(cs, gs, lam);

            std::vector<int> lb;
            for (int w : mu.path.verts)
                if (gs.member_of[w] < 0) lb.push_back(w);
            lad.lambda_b_v[v] = sorted_unique(std::move(lb));

            auto to_mu = sssp_multi(gs.graph, sorted_unique(mu.path.verts));

            for (int w2 : tos.tree_neighbors(v)) {
                if (w2 == geo.parent.at(v)) continue;  // only outward edges
                if (lad.T1.count(w2)) continue;
                int eidx = tos.edge_between(v, w2);
                const auto& f_v = tos.map_into(eidx, v);

                std::vector<int> image;
                image.reserve(f_v.size());
                for (const auto& [_, img] : f_v) image.push_back(img);
                std::sort(image.begin(), image.end());

                std::vector<int> R;
                for (int r : image)
                    if (to_mu[r] <= C) R.push_back(r);
                if (R.size() < 2) continue;

                // exhaustive maximal-pair search over the candidate set
                int nr = static_cast<int>(R.size());
                std::vector<std::vector<long long>> drows;
                std::vector<std::vector<Rat>> qrows;
                if (gs.graph.scaled_ok) {
                    drows.assign(nr, {});
#pragma omp parallel for schedule(dynamic)
                    for (int i = 0; i < nr; ++i) {
                        auto full = sssp_i64(gs.graph, R[i]);
                        auto& slim = drows[i];
                        slim.resize(nr);
                        for (int j = 0; j < nr; ++j) slim[j] = full[R[j]];
                    }
                } else {
                    qrows.assign(nr, {});
#pragma omp parallel for schedule(dynamic)
                    for (int i = 0; i < nr; ++i) {
                        auto full = sssp(gs.graph, R[i]);
                        auto& slim = qrows[i];
                        slim.resize(nr);
                        for (int j = 0; j < nr; ++j) slim[j] = full[R[j]];
                    }
                }
                // maximal glued separation; ties resolved toward the pair
                // with the largest coned separation, then lexicographically
                std::vector<std::pair<int, int>> tied;
                if (gs.graph.scaled_ok) {
                    long long best = -1;
                    for (int i = 0; i < nr; ++i)
                        for (int j = i + 1; j < nr; ++j) {
                            if (drows[i][j] > best) {
                                best = drows[i][j];
                                tied.clear();
                            }
                            if (drows[i][j] == best) tied.emplace_back(i, j);
                        }
                } else {
                    Rat best = -1;
                    for (int i = 0; i < nr; ++i)
                        for (int j = i + 1; j < nr; ++j) {
                            if (qrows[i][j] > best) {
                                best = qrows[i][j];
                                tied.clear();
                            }
                            if (qrows[i][j] == best) tied.emplace_back(i, j);
                        }
                }
                // lexicographic among the tied pairs, but a pair whose coned
                // separation clears the descent threshold always beats one
                // that does not
                std::map<int, std::vector<Rat>> crow;
                for (auto [i, j] : tied)
                    if (!crow.count(R[i])) crow.emplace(R[i], sssp(cs.graph, R[i]));
                int bi = -1, bj = -1;
                Rat bsep = -1;
                for (auto [i, j] : tied) {
                    Rat sep = crow.at(R[i])[R[j]];
                    bool better;
                    if (bi < 0) {
                        better = true;
                    } else if ((sep > D) != (bsep > D)) {
                        better = sep > D;
                    } else {
                        better = std::pair(R[i], R[j]) < std::pair(R[bi], R[bj]);
                    }
                    if (better) {
                        bi = i;
                        bj = j;
                        bsep = sep;
                    }
                }
                int p_e = R[bi], q_e = R[bj];
                Rat glued_sep = gs.graph.scaled_ok ? make_rat(drows[bi][bj], gs.graph.scale)
                                                   : qrows[bi][bj];
                Rat coned_sep = bsep;
                if (!(coned_sep > D)) continue;

                SubpieceRecord rec;
                rec.edge_idx = eidx;
                rec.parent_v = v;
                rec.child_v = w2;
                rec.p_e = p_e;
                rec.q_e = q_e;
                rec.glued_separation = glued_sep;
                rec.coned_separation = coned_sep;
                rec.mu_hat = electric_geodesic_nb(cs, p_e, q_e);
                rec.mu = electro_ambient(cs, gs, rec.mu_hat);

                int p2 = phi_map(tos, w2, eidx, p_e);
                int q2 = phi_map(tos, w2, eidx, q_e);
                PathWitness lam_w = electric_geodesic_nb(geo.coned(w2), p2, q2);

                lad.subpieces[v].push_back(std::move(rec));
                lad.T1.insert(w2);
                next_stage.emplace_back(w2, std::move(lam_w));
            }

            lad.lambda_v.emplace(v, std::move(lam));
            lad.mu_v.emplace(v, std::move(mu));
        }
        stage = std::move(next_stage);
    }

    // flatten into TC(X) and X
    std::vector<int> btc, bbx;
    for (int v : lad.T1) {
        int off_tc = geo.TC.offset.at(v);
        for (int w : lad.lambda_v.at(v).verts) btc.push_back(off_tc + w);
        int off_x = geo.X.offset.at(v);
        for (int w : lad.lambda_b_v.at(v)) bbx.push_back(off_x + w);
    }
    lad.B_tc = sorted_unique(std::move(btc));
    lad.Bb_X = sorted_unique(std::move(bbx));
    return lad;
}

// --------------------------------------------------------------------------
// Retraction
// --------------------------------------------------------------------------

namespace {

int project_in_space(const TreeGeometry& geo, const Ladder& lad, int tv, int local) {
    const auto& cs = geo.coned(tv);
    const auto& gs = geo.glued.at(tv);
    int z = cs.is_cone(local) ? cs.fam.member(cs.cone_member[local]).front() : local;
    const auto& mu = lad.mu_v.at(tv);
    auto row = sssp(gs.graph, z);
    int idx = argmin_on_path(row, mu.path.verts);
    return to_lambda_vertex(cs, lad.lambda_v.at(tv), mu, idx);
}

std::vector<int> supported_tc_vertices(const TreeGeometry& geo, const Ladder& lad) {
    std::vector<int> targets;
    for (int v : lad.T1) {
        int off = geo.TC.offset.at(v);
        int n = geo.coned(v).graph.n;
        for (int i = 0; i < n; ++i) targets.push_back(off + i);
    }
    std::sort(targets.begin(), targets.end());
    return targets;
}

}  // namespace

int retract(const TreeGeometry& geo, const Ladder& lad, int x_tc) {
    geo.TC.graph.require_vertex(x_tc);
    int v = geo.TC.P(x_tc);
    if (!lad.T1.count(v)) {
        auto row = sssp(geo.TC.graph, x_tc);
        int best = -1;
        for (int t : supported_tc_vertices(geo, lad))
            if (best < 0 || row[t] < row[best]) best = t;  // targets ascend: ties keep the smaller id
        x_tc = best;
        v = geo.TC.P(x_tc);
    }
    int local = x_tc - geo.TC.offset.at(v);
    return geo.TC.offset.at(v) + project_in_space(geo, lad, v, local);
}

RetractionSweep measure_retraction_lipschitz(const TreeGeometry& geo, const Ladder& lad) {
    const auto& TC = geo.TC.graph;
    int N = TC.n;

    auto targets = supported_tc_vertices(geo, lad);
    auto [tdist, tlabel] = nearest_with_label(TC, targets);

    std::vector<int> Pi(N);
#pragma omp parallel for schedule(dynamic)
    for (int x = 0; x < N; ++x) {
        int y = lad.T1.count(geo.TC.P(x)) ? x : tlabel[x];
        int v = geo.TC.P(y);
        Pi[x] = geo.TC.offset.at(v) + project_in_space(geo, lad, v, y - geo.TC.offset.at(v));
    }

    // distance rows from the retraction image
    std::vector<int> image = sorted_unique(Pi);
    std::map<int, int> img_idx;
    for (size_t i = 0; i < image.size(); ++i) img_idx[image[i]] = static_cast<int>(i);
    std::vector<std::vector<Rat>> irow(image.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(image.size()); ++i) irow[i] = sssp(TC, image[i]);

    RetractionSweep sweep;
    sweep.K0 = sweep.K1 = sweep.K2 = sweep.C0 = 0;
    long long pairs = 0;
    Rat one = 1;

#pragma omp parallel
    {
        Rat k0 = 0, k1 = 0, k2 = 0;
        long long local_pairs = 0;
#pragma omp for schedule(dynamic)
        for (int x = 0; x < N; ++x) {
            auto row = sssp(TC, x);
            int vx = geo.TC.P(x);
            for (int y = x + 1; y < N; ++y) {
                if (row[y] > one) continue;
                ++local_pairs;
                Rat d = irow[img_idx.at(Pi[x])][Pi[y]];
                int vy = geo.TC.P(y);
                bool in_x = lad.T1.count(vx) > 0, in_y = lad.T1.count(vy) > 0;
                if (!in_x || !in_y) {
                    if (d > k2) k2 = d;
                } else if (vx == vy) {
                    if (d > k0) k0 = d;
                } else {
                    if (d > k1) k1 = d;
                }
            }
        }
#pragma omp critical
        {
            if (k0 > sweep.K0) sweep.K0 = k0;
            if (k1 > sweep.K1) sweep.K1 = k1;
            if (k2 > sweep.K2) sweep.K2 = k2;
            pairs += local_pairs;
        }
    }
    sweep.pairs = pairs;
    sweep.C0 = std::max({sweep.K0, sweep.K1, sweep.K2});
    return sweep;
}

// --------------------------------------------------------------------------
// Subpiece constants
// --------------------------------------------------------------------------

SubpieceConstants measure_subpiece_constants(TreeGeometry& geo, Ladder& lad) {
    SubpieceConstants out{Rat(0), Rat(0), Rat(0), Rat(0)};
    const auto& tos = geo.tos;

    for (auto& [v, recs] : lad.subpieces) {
        const auto& cs = geo.coned(v);
        const auto& gs = geo.glued.at(v);
        const auto& mu1 = lad.mu_v.at(v);
        auto to_mu1 = sssp_multi(gs.graph, sorted_unique(mu1.path.verts));

        for (auto& rec : recs) {
            const auto& f_v = tos.map_into(rec.edge_idx, v);
            std::vector<int> image;
            for (const auto& [_, img] : f_v) image.push_back(img);
            std::sort(image.begin(), image.end());

            auto mu2_verts = sorted_unique(rec.mu.path.verts);
            auto to_mu2 = sssp_multi(gs.graph, mu2_verts);

            // p6: candidates near mu1 inside the image stay near the subpiece
            Rat p6 = 0;
            for (int r : image)
                if (to_mu1[r] <= lad.C_used && to_mu2[r] > p6) p6 = to_mu2[r];
            rec.p6 = p6;
            if (p6 > out.P6) out.P6 = p6;

            // rows from both representatives for projections of image points
            std::map<int, std::vector<Rat>> rows;
            for (int w : sorted_unique(mu1.path.verts)) rows.emplace(w, sssp(gs.graph, w));
            for (int w : mu2_verts)
                if (!rows.count(w)) rows.emplace(w, sssp(gs.graph, w));

            auto project = [&rows](const std::vector<int>& path, int z) {
                int best = path[0];
                for (int w : path) {
                    const Rat &d = rows.at(w)[z], &bd = rows.at(best)[z];
                    if (d < bd || (d == bd && w < best)) best = w;
                }
                return best;
            };

            Rat p7 = 0;
            for (int z : image) {
                int a = project(mu1.path.verts, z);
                int b = project(rec.mu.path.verts, z);
                Rat d = rows.at(a)[b];
                if (d > p7) p7 = d;
            }
            rec.p7 = p7;
            if (p7 > out.P7) out.P7 = p7;

            // P2: nearest-point projections nearly commute with the flow
            const auto& gs_child = geo.glued.at(rec.child_v);
            const auto& mu_child = lad.mu_v.at(rec.child_v);
            auto [idist, ilabel] = nearest_with_label(gs.graph, image);
            std::map<int, std::vector<Rat>> crows;
            for (int w : sorted_unique(mu_child.path.verts)) crows.emplace(w, sssp(gs_child.graph, w));
            auto project_child = [&crows, &mu_child](int z) {
                int best = mu_child.path.verts[0];
                for (int w : mu_child.path.verts) {
                    const Rat &d = crows.at(w)[z], &bd = crows.at(best)[z];
                    if (d < bd || (d == bd && w < best)) best = w;
                }
                return best;
            };
            Rat p2m = 0;
            for (int p : image) {
                int z1 = project(rec.mu.path.verts, p);       // projection in the parent
                int z1s = ilabel[z1];                         // snapped into the image
                int via = phi_map(tos, rec.child_v, rec.edge_idx, z1s);
                int fp = phi_map(tos, rec.child_v, rec.edge_idx, p);
                int z2 = project_child(fp);
                Rat d = crows.count(z2) ? crows.at(z2)[via] : sssp(gs_child.graph, z2)[via];
                if (d > p2m) p2m = d;
            }
            if (p2m > out.P2) out.P2 = p2m;

            // P5: electric projections nearly commute with the induced coned flow
            const auto& cs_child = geo.coned(rec.child_v);
            size_t stride = std::max<size_t>(1, image.size() / 200);
            Rat p5m = 0;
            for (size_t i = 0; i < image.size(); i += stride) {
                int p = image[i];
                int w1 = electric_projection(cs, gs, p, rec.mu);
                int c1 = ilabel[shadow_to_coned(gs, w1)];
                int fc1 = phi_map(tos, rec.child_v, rec.edge_idx, c1);
                int fp = phi_map(tos, rec.child_v, rec.edge_idx, p);
                int w2 = electric_projection(cs_child, gs_child, fp, mu_child);
                int c2 = shadow_to_coned(gs_child, w2);
                Rat d = sssp(cs_child.graph, c2)[fc1];
                if (d > p5m) p5m = d;
            }
            if (p5m > out.P5) out.P5 = p5m;
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// Vertical rays and depth escape
// --------------------------------------------------------------------------

namespace {

// nearest off-horoball vertex on a path, measured from the path vertex at
// index `from_idx`
int nearest_outside_on_path(const GluedSpace& gs, const std::vector<int>& path, int from_idx) {
    std::vector<int> outside;
    for (int w : path)
        if (gs.member_of[w] < 0) outside.push_back(w);
    if (outside.empty()) return -1;
    auto row = sssp(gs.graph, path[from_idx]);
    int best = outside[0];
    for (int w : outside) {
        if (row[w] < row[best] || (row[w] == row[best] && w < best)) best = w;
    }
    return best;
}

}  // namespace

VerticalRay vertical_ray(const TreeGeometry& geo, const Ladder& lad, int v, int x_local) {
    if (!lad.T1.count(v)) throw std::domain_error("vertical_ray: vertex is not in the ladder support");
    const auto& lbv = lad.lambda_b_v.at(v);
    if (!std::binary_search(lbv.begin(), lbv.end(), x_local))
        throw std::domain_error("vertical_ray: the start point must lie on the off-horoball part "
                                "of the ladder segment");

    VerticalRay ray;
    ray.start_v = v;
    ray.tree_path.push_back(v);
    ray.points_X.push_back(geo.X.global_id(v, x_local));

    int cur_v = v;
    int x = x_local;
    while (cur_v != lad.root) {
        int w = geo.parent.at(cur_v);
        int eidx = geo.tos.edge_between(cur_v, w);
        const auto& gs = geo.glued.at(cur_v);
        const auto& gs_w = geo.glued.at(w);
        const auto& mu_cur = lad.mu_v.at(cur_v);

        // maximal off-horoball run of the representative containing x
        int xi = -1;
        for (size_t i = 0; i < mu_cur.path.verts.size(); ++i)
            if (mu_cur.path.verts[i] == x && gs.member_of[x] < 0) {
                xi = static_cast<int>(i);
                break;
            }
        if (xi < 0) throw std::logic_error("vertical_ray: start point lost on the representative");
        int a = xi, b = xi;
        while (a > 0 && gs.member_of[mu_cur.path.verts[a - 1]] < 0) --a;
        while (b + 1 < static_cast<int>(mu_cur.path.verts.size()) &&
               gs.member_of[mu_cur.path.verts[b + 1]] < 0)
            ++b;

        // snap the run endpoints and the point into the edge image
        const auto& f_cur = geo.tos.map_into(eidx, cur_v);
        std::vector<int> image;
        for (const auto& [_, img] : f_cur) image.push_back(img);
        std::sort(image.begin(), image.end());
        auto [idist, ilabel] = nearest_with_label(gs.graph, image);

        int a1 = ilabel[mu_cur.path.verts[a]];
        int b1 = ilabel[mu_cur.path.verts[b]];
        int x1 = ilabel[x];

        // flow across the edge and repair into a glued geodesic
        auto psi = [&](int p) { return phi_map(geo.tos, w, eidx, p); };
        int a2 = psi(a1), b2 = psi(b1), x2 = psi(x1);
        PathWitness big_psi = geodesic(gs_w.graph, a2, b2);

        auto row_x2 = sssp(gs_w.graph, x2);
        int y1 = big_psi.verts[argmin_on_path(row_x2, big_psi.verts)];
        int y1o = nearest_outside_on_path(gs_w, big_psi.verts, argmin_on_path(row_x2, big_psi.verts));
        if (y1o >= 0) y1 = y1o;

        // land on the subpiece representative, stepping off horoballs
        const SubpieceRecord* rec = nullptr;
        for (const auto& r : lad.subpieces.at(w))
            if (r.child_v == cur_v) {
                rec = &r;
                break;
            }
        if (!rec) throw std::logic_error("vertical_ray: missing subpiece record");
        auto row_y1 = sssp(gs_w.graph, y1);
        int y2i = argmin_on_path(row_y1, rec->mu.path.verts);
        int y2 = rec->mu.path.verts[y2i];
        int y2o = nearest_outside_on_path(gs_w, rec->mu.path.verts, y2i);
        if (y2o >= 0) y2 = y2o;

        // land on the parent segment, off horoballs
        const auto& mu_w = lad.mu_v.at(w);
        auto row_y2 = sssp(gs_w.graph, y2);
        int y3i = argmin_on_path(row_y2, mu_w.path.verts);
        int y = nearest_outside_on_path(gs_w, mu_w.path.verts, y3i);
        if (y < 0)
            throw std::domain_error("vertical_ray: the ladder segment at vertex " + std::to_string(w) +
                                    " lies entirely inside horoballs");

        Rat disp = sssp(geo.X.graph, geo.X.global_id(cur_v, x))[geo.X.global_id(w, y)];
        ray.displacement.push_back(disp);
        ray.tree_path.push_back(w);
        ray.points_X.push_back(geo.X.global_id(w, y));
        cur_v = w;
        x = y;
    }
    return ray;
}

DepthEscapeResult check_depth_escape(const TreeGeometry& geo, const Ladder& lad, int p_local_root,
                                     long long n, const Rat& C) {
    const auto& root_graph = geo.tos.vspaces.at(lad.root).graph;
    root_graph.require_vertex(p_local_root);
    auto owner = geo.tos.vspaces.at(lad.root).fam.membership(root_graph.n);
    if (owner[p_local_root] >= 0)
        throw std::domain_error("check_depth_escape: reference point must lie outside members");

    // precondition: the root off-horoball part clears the n-ball
    Rat nn = make_rat(n);
    auto row_p = sssp(root_graph, p_local_root);
    std::string offenders;
    for (int x : lad.lambda_b_v.at(lad.root))
        if (row_p[x] < nn) offenders += (offenders.empty() ? "" : ", ") + std::to_string(x);
    if (!offenders.empty())
        throw std::domain_error("check_depth_escape: off-horoball root points inside the n-ball: " +
                                offenders);

    DepthEscapeResult res;
    res.bound = nn / (C + 1);
    auto row_X = sssp(geo.X.graph, geo.X.global_id(lad.root, p_local_root));
    for (int x : lad.Bb_X)
        if (row_X[x] < res.bound) {
            res.pass = false;
            res.witness_X = x;
            res.witness_dist = row_X[x];
            return res;
        }
    return res;
}

}  // namespace relhyp
