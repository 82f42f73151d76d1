#include "relhyp/report.hpp"

#include "relhyp/generators.hpp"
#include "relhyp/io_json.hpp"
#include "relhyp/ladder.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <random>
#include <stdexcept>

namespace relhyp {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (gen_spec.empty() == input_path.empty())
        throw std::invalid_argument("config: exactly one of --gen and --in must be given");
    if (N_begin > N_end) throw std::invalid_argument("config: empty N range");
    if (budget < 1) throw std::invalid_argument("config: budget must be >= 1");
    if (N_begin < 0) throw std::invalid_argument("config: N must be >= 0");
    if (D_override && *D_override < 0) throw std::invalid_argument("config: D must be >= 0");
    if (C_override && *C_override < 0) throw std::invalid_argument("config: C must be >= 0");
}

bool ReportDocument::all_pass() const {
    for (const auto& s : suites)
        if (!s.pass) return false;
    return true;
}

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        auto t1 = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

// deterministic reference point: smallest-id off-member vertex of the root
// space, preferring positive eccentricity
int default_reference_point(const TreeGeometry& geo) {
    const auto& vs = geo.tos.vspaces.at(geo.tos.root);
    auto owner = vs.fam.membership(vs.graph.n);
    for (int v = 0; v < vs.graph.n; ++v)
        if (owner[v] < 0) return v;
    throw std::domain_error("run: every root vertex lies inside a member; no reference point");
}

// deterministic far-apart off-member pair (diameter pair, smallest lex)
std::pair<int, int> diameter_pair(const MetricGraph& g, const std::vector<int>& owner) {
    Rat best = -1;
    std::pair<int, int> out{-1, -1};
    for (int u = 0; u < g.n; ++u) {
        if (owner[u] >= 0) continue;
        std::vector<long long> row64;
        std::vector<Rat> row;
        if (g.scaled_ok)
            row64 = sssp_i64(g, u);
        else
            row = sssp(g, u);
        for (int v = u + 1; v < g.n; ++v) {
            if (owner[v] >= 0) continue;
            Rat d = g.scaled_ok ? make_rat(row64[v], g.scale) : row[v];
            if (d > best) {
                best = d;
                out = {u, v};
            }
        }
    }
    if (out.first < 0) throw std::domain_error("diameter_pair: no off-member vertices");
    return out;
}

}  // namespace

GeometryParams measure_standing_params(const TreeGeometry& geo, const ExperimentConfig& cfg) {
    GeometryParams params;
    const auto& tos = geo.tos;
    const std::string& inst = tos.instance_id;
    const auto& root_vs = tos.vspaces.at(tos.root);
    const auto& gs0 = geo.glued.at(tos.root);

    // delta of the root glued space
    DeltaEstimate de = gs0.graph.n <= 200 ? four_point_delta_exhaustive(gs0.graph)
                                          : four_point_delta_sampled(gs0.graph, 2000000, cfg.seed);
    params.delta = ParamValue::measured_on(de.value, inst);
    if (cfg.D_override)
        params.D = ParamValue::configured(*cfg.D_override);
    else
        params.D = ParamValue::measured_on(de.value * 4 + 1, inst);

    // C1: tripod tracking against a diameter geodesic of the glued root space
    auto owner = root_vs.fam.membership(root_vs.graph.n);
    auto [du, dv] = diameter_pair(root_vs.graph, owner);
    PathWitness lam = geodesic(gs0.graph, du, dv);
    std::vector<std::pair<int, int>> pairs;
    {
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_int_distribution<int> pick(0, gs0.graph.n - 1);
        int want = std::min(200, gs0.graph.n * (gs0.graph.n - 1) / 2);
        while (static_cast<int>(pairs.size()) < want) {
            int a = pick(rng), b = pick(rng);
            if (a != b) pairs.emplace_back(a, b);
        }
    }
    params.C1 = ParamValue::measured_on(
        measure_tripod_tracking(gs0.graph, lam, params.D->value, pairs), inst);

    // C2: edge-image quasiconvexity in the glued vertex spaces
    Rat c2 = 0;
    for (size_t ei = 0; ei < tos.espaces.size(); ++ei)
        for (int end = 0; end < 2; ++end) {
            int tv = end == 0 ? tos.espaces[ei].v1 : tos.espaces[ei].v2;
            Rat q = measure_edge_image_quasiconvexity(tos, geo.glued.at(tv), static_cast<int>(ei), tv,
                                                      300, cfg.seed + 2);
            if (q > c2) c2 = q;
        }
    params.C2 = ParamValue::measured_on(c2, inst);
    if (cfg.C_override) params.C_override = ParamValue::configured(*cfg.C_override);
    params.depth = geo.depth;
    return params;
}

ReportDocument run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);

    ReportDocument rep;
    Stopwatch watch;

    TreeOfSpaces tos = cfg.gen_spec.empty() ? tos_from_json(load_json_file(cfg.input_path))
                                            : generate_instance(cfg.gen_spec, cfg.seed);
    rep.instance_id = tos.instance_id;
    TreeGeometry geo = build_tree_geometry(tos, cfg.depth);
    rep.timings_sec["build"] = watch.lap();

    rep.params = measure_standing_params(geo, cfg);
    rep.timings_sec["params"] = watch.lap();

    const auto& root_vs = geo.tos.vspaces.at(geo.tos.root);
    auto owner = root_vs.fam.membership(root_vs.graph.n);
    int p = default_reference_point(geo);

    // suite: metric sanity on the root space, over a seeded source subset
    {
        SuiteResult s{"metric-sanity", true, ""};
        const auto& g = root_vs.graph;
        std::mt19937_64 rng(cfg.seed + 3);
        std::vector<int> sources(g.n);
        for (int i = 0; i < g.n; ++i) sources[i] = i;
        std::shuffle(sources.begin(), sources.end(), rng);
        sources.resize(std::min<size_t>(sources.size(), 60));
        std::map<int, std::vector<Rat>> rows;
        for (int v : sources) rows.emplace(v, sssp(g, v));
        std::uniform_int_distribution<size_t> pick(0, sources.size() - 1);
        int checks = 2000;
        for (int i = 0; i < checks && s.pass; ++i) {
            int a = sources[pick(rng)], b = sources[pick(rng)], c = sources[pick(rng)];
            if (rows.at(a)[b] != rows.at(b)[a]) {
                s.pass = false;
                s.detail = "asymmetry";
            }
            if (rows.at(a)[c] > rows.at(a)[b] + rows.at(b)[c]) {
                s.pass = false;
                s.detail = "triangle violation";
            }
        }
        if (s.pass) s.detail = std::to_string(checks) + " sampled triples";
        rep.suites.push_back(s);
        rep.timings_sec["metric-sanity"] = watch.lap();
    }

    // suite: electrification never increases distances and shrinks members
    if (root_vs.fam.member_count() > 0) {
        SuiteResult s{"electric-contraction", true, ""};
        const auto& cs = geo.coned(geo.tos.root);
        std::mt19937_64 rng(cfg.seed + 4);
        std::uniform_int_distribution<int> pick(0, root_vs.graph.n - 1);
        for (int i = 0; i < 200 && s.pass; ++i) {
            int a = pick(rng), b = pick(rng);
            if (distance(cs.graph, a, b) > distance(root_vs.graph, a, b)) {
                s.pass = false;
                s.detail = "coning increased a distance";
            }
        }
        const auto& mem = cs.fam.member(0);
        if (s.pass && mem.size() >= 2 && distance(cs.graph, mem.front(), mem.back()) > 1) {
            s.pass = false;
            s.detail = "member not shrunk to diameter <= 1";
        }
        if (s.pass) s.detail = "200 sampled pairs";
        rep.suites.push_back(s);
        rep.timings_sec["electric-contraction"] = watch.lap();
    }

    // suite: ladder, retraction, vertical rays, depth escape
    Rat C_eff = rep.params.effective_C();
    Rat D_eff = rep.params.effective_D();
    if (!geo.tos.tree_edges.empty()) {
        SuiteResult s{"ladder-rays", true, ""};
        try {
            auto [a, b] = diameter_pair(root_vs.graph, owner);
            PathWitness lam = electric_geodesic_nb(geo.coned(geo.tos.root), a, b);
            Ladder lad = build_ladder(geo, lam, D_eff, C_eff);

            // monotone growth by construction; check stage union == support
            size_t total = 0;
            for (const auto& st : lad.growth) total += st.size();
            if (total != lad.T1.size()) {
                s.pass = false;
                s.detail = "support does not match inductive growth";
            }

            Rat c_ray = 1;
            int rays = 0;
            for (int v : lad.T1) {
                if (!s.pass) break;
                for (int x : lad.lambda_b_v.at(v)) {
                    if (rays >= 50) break;
                    auto ray = vertical_ray(geo, lad, v, x);
                    ++rays;
                    for (const auto& d : ray.displacement) {
                        if (d < 1) {
                            s.pass = false;
                            s.detail = "ray step shorter than a rung";
                        }
                        if (d > c_ray) c_ray = d;
                    }
                }
            }
            rep.params.B = ParamValue::measured_on(c_ray, rep.instance_id);

            if (s.pass) {
                for (long long n = 2; n <= 4 && s.pass; ++n) {
                    try {
                        auto der = check_depth_escape(geo, lad, p, n, c_ray);
                        if (!der.pass) {
                            s.pass = false;
                            s.detail = "depth escape failed at n=" + std::to_string(n);
                        }
                    } catch (const std::domain_error&) {
                        // precondition unmet for this lambda at this n; not a failure
                    }
                }
            }

            if (geo.TC.graph.n <= 2500) {
                auto sweep = measure_retraction_lipschitz(geo, lad);
                rep.params.K0 = ParamValue::measured_on(sweep.K0, rep.instance_id);
                rep.params.K1 = ParamValue::measured_on(sweep.K1, rep.instance_id);
                rep.params.K2 = ParamValue::measured_on(sweep.K2, rep.instance_id);
                rep.params.C0 = ParamValue::measured_on(sweep.C0, rep.instance_id);
            }
            if (!lad.subpieces.empty()) {
                auto sc = measure_subpiece_constants(geo, lad);
                rep.params.P2 = ParamValue::measured_on(sc.P2, rep.instance_id);
                rep.params.P5 = ParamValue::measured_on(sc.P5, rep.instance_id);
                rep.params.P6 = ParamValue::measured_on(sc.P6, rep.instance_id);
                rep.params.P7 = ParamValue::measured_on(sc.P7, rep.instance_id);
                Rat pp = std::max({sc.P2, sc.P5, sc.P6, sc.P7});
                rep.params.PP = ParamValue::measured_on(pp, rep.instance_id);
            }
            if (s.pass)
                s.detail = std::to_string(rays) + " rays, max step " + rat_to_string(c_ray);
        } catch (const std::exception& e) {
            s.pass = false;
            s.detail = e.what();
        }
        rep.suites.push_back(s);
        rep.timings_sec["ladder-rays"] = watch.lap();
    }

    // suite: cross-module agreement of TC(X) with the partial electrocution
    if (!geo.tos.tree_edges.empty()) {
        SuiteResult s{"tc-vs-pel", true, ""};
        try {
            auto locus = cone_locus(geo.tos, geo.X);
            auto pe = tc_as_partial_electrocution(geo.tos, geo.X, locus);
            std::mt19937_64 rng(cfg.seed + 5);
            std::uniform_int_distribution<int> pick(0, geo.X.graph.n - 1);
            Rat two = 2;
            int checks = 200;
            for (int i = 0; i < checks && s.pass; ++i) {
                int a = pick(rng), b = pick(rng);
                // compare between ordinary (non-cone) images
                int tva = geo.X.space_of[a], tvb = geo.X.space_of[b];
                int ca = geo.TC.global_id(tva, geo.X.local_of[a]);
                int cb = geo.TC.global_id(tvb, geo.X.local_of[b]);
                Rat d_tc = distance(geo.TC.graph, ca, cb);
                Rat d_pe = distance(pe.graph, a, b);
                Rat diff = d_tc > d_pe ? d_tc - d_pe : d_pe - d_tc;
                if (diff > two) {
                    s.pass = false;
                    s.detail = "TC and PE disagree by " + rat_to_string(diff);
                }
            }
            if (s.pass) s.detail = std::to_string(checks) + " sampled pairs within 2";
        } catch (const std::exception& e) {
            s.pass = false;
            s.detail = e.what();
        }
        rep.suites.push_back(s);
        rep.timings_sec["tc-vs-pel"] = watch.lap();
    }

    // the profile itself
    {
        std::vector<long long> Ns;
        for (long long n = cfg.N_begin; n <= cfg.N_end; ++n) Ns.push_back(n);
        rep.profile = ct_profile(geo, p, Ns, cfg.budget, cfg.seed, rep.params);
        rep.timings_sec["ct-profile"] = watch.lap();

        SuiteResult s{"ct-envelope", true, ""};
        for (size_t i = 0; i + 1 < rep.profile.rows.size(); ++i) {
            const auto& r0 = rep.profile.rows[i];
            const auto& r1 = rep.profile.rows[i + 1];
            if (r0.exhaustive && r1.exhaustive && r1.M < r0.M) {
                s.pass = false;
                s.detail = "envelope not monotone at N=" + std::to_string(r1.N);
            }
        }
        for (const auto& r : rep.profile.rows)
            if (s.pass && !verify_ct_row(geo, p, r)) {
                s.pass = false;
                s.detail = "witness failed re-verification at N=" + std::to_string(r.N);
            }
        if (s.pass) s.detail = std::to_string(rep.profile.rows.size()) + " rows verified";
        rep.suites.push_back(s);
        rep.timings_sec["ct-envelope"] = watch.lap();
    }

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_text_file(cfg.out_dir + "/report.json", report_to_json(rep).dump(2) + "\n");
        write_text_file(cfg.out_dir + "/profile.csv", profile_to_csv(rep.profile));
        json t;
        for (const auto& [k, v] : rep.timings_sec) t[k] = v;
        write_text_file(cfg.out_dir + "/timings.json", t.dump(2) + "\n");
    }
    return rep;
}

json report_to_json(const ReportDocument& rep) {
    json j;
    j["instance_id"] = rep.instance_id;
    json params = json::object();
    for (const auto& [name, pv] : rep.params.snapshot()) {
        json p;
        p["value"] = rat_to_string(pv.value);
        p["provenance"] = pv.measured ? "measured" : "configured";
        if (pv.measured) p["instance"] = pv.instance;
        params[name] = p;
    }
    params["depth"] = rep.params.depth;
    j["params"] = params;
    json suites = json::array();
    for (const auto& s : rep.suites) {
        json e;
        e["name"] = s.name;
        e["pass"] = s.pass;
        e["detail"] = s.detail;
        suites.push_back(e);
    }
    j["suites"] = suites;
    j["profile"] = profile_to_json(rep.profile);
    return j;
}

}  // namespace relhyp
