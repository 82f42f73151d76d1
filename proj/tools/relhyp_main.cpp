// relhyp: coarse-geometry constructions on finite weighted graphs and the
// measured Cannon-Thurston criterion. Subcommands wrap the library
// one-to-one; every output length is an exact fraction string.

#include "relhyp/ct_harness.hpp"
#include "relhyp/generators.hpp"
#include "relhyp/io_json.hpp"
#include "relhyp/ladder.hpp"
#include "relhyp/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <optional>

using namespace relhyp;
using nlohmann::json;

namespace {

std::string out_or_default(const std::string& out, const std::string& name) {
    if (!out.empty()) return out;
    const char* dir = std::getenv("RELHYP_OUT_DIR");
    if (dir && *dir) return std::string(dir) + "/" + name;
    return "";
}

void emit(const std::string& out, const std::string& name, const std::string& content) {
    std::string path = out_or_default(out, name);
    if (path.empty())
        std::cout << content;
    else
        write_text_file(path, content);
}

std::pair<long long, long long> parse_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
        long long n = std::stoll(s);
        return {n, n};
    }
    return {std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coarse geometry of relatively hyperbolic graph spaces"};
    app.require_subcommand(1);

    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (0 = library default)");

    std::string in_path, out_path, fam_path, format = "json", gen, mode = "exhaustive";
    std::string lambda_arg, member, D_arg, C_arg, n_range = "1..4", p_arg;
    long long count = 100000, budget = 200;
    unsigned long long seed = 1;
    int depth = 0;

    // --seed and --format are part of every subcommand's surface; the
    // structure-emitting ones are deterministic and json-only
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "sampling seed (deterministic subcommands ignore it)");
        cmd->add_option("--format", format, "json | csv");
    };

    auto* cmd_build = app.add_subcommand("build", "validate a graph file and emit its normal form");
    cmd_build->add_option("--in", in_path, "graph json")->required();
    cmd_build->add_option("--out", out_path, "output file (default stdout)");
    add_common(cmd_build);

    auto* cmd_delta = app.add_subcommand("delta", "four-point hyperbolicity constant");
    cmd_delta->add_option("--in", in_path, "graph json")->required();
    cmd_delta->add_option("--mode", mode, "exhaustive | sampled");
    cmd_delta->add_option("--count", count, "sample size for sampled mode");
    cmd_delta->add_option("--seed", seed, "sample seed");
    cmd_delta->add_option("--format", format, "json | csv");
    cmd_delta->add_option("--out", out_path, "output file (default stdout)");

    auto* cmd_cone = app.add_subcommand("cone", "Farb electrification of a graph along a family");
    cmd_cone->add_option("--in", in_path, "host graph json")->required();
    cmd_cone->add_option("--family", fam_path, "family json")->required();
    cmd_cone->add_option("--depth", depth,
                         "cone off the depth-k glued space's horoballs instead of the bare members");
    cmd_cone->add_option("--out", out_path, "output file (default stdout)");
    add_common(cmd_cone);

    auto* cmd_horo = app.add_subcommand("horoball", "glue combinatorial horoballs onto a graph");
    cmd_horo->add_option("--in", in_path, "host graph json")->required();
    cmd_horo->add_option("--family", fam_path, "family json")->required();
    cmd_horo->add_option("--depth", depth, "horoball depth (0 = default)");
    cmd_horo->add_option("--member", member, "emit one member's standalone horoball instead");
    cmd_horo->add_option("--out", out_path, "output file (default stdout)");
    add_common(cmd_horo);

    auto* cmd_tree = app.add_subcommand("tree", "validate a tree of spaces");
    cmd_tree->add_option("--in", in_path, "tree json")->required();
    cmd_tree->add_option("--out", out_path, "output file (default stdout)");
    add_common(cmd_tree);

    auto* cmd_ladder = app.add_subcommand("ladder", "build the ladder over a root segment");
    cmd_ladder->add_option("--in", in_path, "tree json");
    cmd_ladder->add_option("--gen", gen, "generator spec instead of --in");
    cmd_ladder->add_option("--lambda", lambda_arg, "root segment endpoints a,b")->required();
    cmd_ladder->add_option("--D", D_arg, "descent threshold (fraction; default measured)");
    cmd_ladder->add_option("--C", C_arg, "neighborhood radius (fraction; default measured)");
    cmd_ladder->add_option("--depth", depth, "horoball depth (0 = default)");
    cmd_ladder->add_option("--out", out_path, "output file (default stdout)");
    add_common(cmd_ladder);

    auto* cmd_ct = app.add_subcommand("ct-profile", "measure the properness profile M(N)");
    cmd_ct->add_option("--in", in_path, "tree json");
    cmd_ct->add_option("--gen", gen, "generator spec instead of --in");
    cmd_ct->add_option("--N", n_range, "range, e.g. 1..6");
    cmd_ct->add_option("--budget", budget, "max endpoint pairs per N");
    cmd_ct->add_option("--seed", seed, "sampling seed");
    cmd_ct->add_option("--p", p_arg, "reference vertex (default smallest off-member id)");
    cmd_ct->add_option("--depth", depth, "horoball depth (0 = default)");
    cmd_ct->add_option("--format", format, "json | csv");
    cmd_ct->add_option("--out", out_path, "output file (default stdout)");

    auto* cmd_run = app.add_subcommand("run", "full experiment: suites, params, profile");
    cmd_run->add_option("--in", in_path, "tree json");
    cmd_run->add_option("--gen", gen, "generator spec instead of --in");
    cmd_run->add_option("--N", n_range, "range, e.g. 1..6");
    cmd_run->add_option("--budget", budget, "max endpoint pairs per N");
    cmd_run->add_option("--seed", seed, "experiment seed");
    cmd_run->add_option("--D", D_arg, "override D (fraction)");
    cmd_run->add_option("--C", C_arg, "override C (fraction)");
    cmd_run->add_option("--depth", depth, "horoball depth (0 = default)");
    cmd_run->add_option("--out", out_path, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (jobs > 0) omp_set_num_threads(jobs);

        if ((*cmd_build || *cmd_cone || *cmd_horo || *cmd_tree || *cmd_ladder) && format != "json")
            throw CLI::ValidationError("this subcommand emits json only");

        if (*cmd_build) {
            auto g = graph_from_json(load_json_file(in_path));
            json j = graph_to_json(g);
            j["stats"] = {{"vertices", g.n}, {"edges", g.edge_count()}, {"scaled", g.scaled_ok}};
            emit(out_path, "graph.json", j.dump(2) + "\n");
        } else if (*cmd_delta) {
            auto g = graph_from_json(load_json_file(in_path));
            DeltaEstimate de;
            if (mode == "exhaustive")
                de = four_point_delta_exhaustive(g);
            else if (mode == "sampled")
                de = four_point_delta_sampled(g, count, seed);
            else
                throw CLI::ValidationError("--mode must be exhaustive or sampled");
            if (format == "csv") {
                emit(out_path, "delta.csv",
                     "delta,exact\n" + rat_to_string(de.value) + "," + (de.exact ? "1" : "0") + "\n");
            } else {
                json j{{"delta", rat_to_string(de.value)}, {"exact", de.exact}};
                if (!de.sample_desc.empty()) j["sample"] = de.sample_desc;
                emit(out_path, "delta.json", j.dump(2) + "\n");
            }
        } else if (*cmd_cone) {
            auto g = graph_from_json(load_json_file(in_path));
            auto fam = family_from_json(load_json_file(fam_path), g);
            if (depth > 0) {
                // electrify the glued space along the full horoballs; the
                // result contains the plain electrification isometrically
                auto gs = glue_cones(g, fam, depth);
                std::vector<std::pair<std::string, std::vector<int>>> regions;
                for (int i = 0; i < fam.member_count(); ++i) {
                    std::vector<int> verts;
                    for (int v = 0; v < gs.graph.n; ++v)
                        if (gs.member_of[v] == i) verts.push_back(v);
                    regions.emplace_back(fam.name(i), verts);
                }
                // horoball regions can sit closer than the host members did
                Rat sep = fam.separation;
                for (size_t i = 0; i + 1 < regions.size(); ++i) {
                    auto row = sssp_multi(gs.graph, regions[i].second);
                    for (size_t j = i + 1; j < regions.size(); ++j)
                        for (int v : regions[j].second)
                            if (row[v] < sep) sep = row[v];
                }
                auto hfam = HoroFamily::build(gs.graph, regions, sep);
                auto cs = cone_off(gs.graph, hfam);
                emit(out_path, "coned.json", graph_to_json(cs.graph).dump(2) + "\n");
            } else {
                auto cs = cone_off(g, fam);
                emit(out_path, "coned.json", graph_to_json(cs.graph).dump(2) + "\n");
            }
        } else if (*cmd_horo) {
            auto g = graph_from_json(load_json_file(in_path));
            auto fam = family_from_json(load_json_file(fam_path), g);
            int d = depth > 0 ? depth : default_horoball_depth(g, fam);
            if (!member.empty()) {
                int mi = fam.find(member);
                if (mi < 0) throw std::invalid_argument("unknown member '" + member + "'");
                emit(out_path, "horoball.json",
                     graph_to_json(build_horoball(g, fam, mi, d)).dump(2) + "\n");
            } else {
                auto gs = glue_cones(g, fam, d);
                emit(out_path, "glued.json", graph_to_json(gs.graph).dump(2) + "\n");
            }
        } else if (*cmd_tree) {
            auto tos = tos_from_json(load_json_file(in_path));
            auto rep = validate(tos);
            emit(out_path, "validation.json", validation_to_json(rep).dump(2) + "\n");
            return rep.ok ? 0 : 1;
        } else if (*cmd_ladder) {
            if (in_path.empty() == gen.empty())
                throw CLI::ValidationError("ladder needs exactly one of --in / --gen");
            TreeOfSpaces tos = gen.empty() ? tos_from_json(load_json_file(in_path))
                                           : generate_instance(gen, seed);
            TreeGeometry geo = build_tree_geometry(tos, depth);
            auto comma = lambda_arg.find(',');
            if (comma == std::string::npos)
                throw CLI::ValidationError("--lambda expects 'a,b'");
            int a = std::stoi(lambda_arg.substr(0, comma));
            int b = std::stoi(lambda_arg.substr(comma + 1));
            Rat D, C;
            if (!D_arg.empty() && !C_arg.empty()) {
                D = rat_from_string(D_arg);
                C = rat_from_string(C_arg);
            } else {
                ExperimentConfig mcfg;
                mcfg.gen_spec = gen.empty() ? "-" : gen;
                mcfg.seed = seed;
                auto params = measure_standing_params(geo, mcfg);
                D = D_arg.empty() ? params.effective_D() : rat_from_string(D_arg);
                C = C_arg.empty() ? params.effective_C() : rat_from_string(C_arg);
            }
            PathWitness lam = electric_geodesic_nb(geo.coned(tos.root), a, b);
            Ladder lad = build_ladder(geo, lam, D, C);
            emit(out_path, "ladder.json", ladder_to_json(lad).dump(2) + "\n");
        } else if (*cmd_ct) {
            if (in_path.empty() == gen.empty())
                throw CLI::ValidationError("ct-profile needs exactly one of --in / --gen");
            TreeOfSpaces tos = gen.empty() ? tos_from_json(load_json_file(in_path))
                                           : generate_instance(gen, seed);
            TreeGeometry geo = build_tree_geometry(tos, depth);
            ExperimentConfig mcfg;
            mcfg.gen_spec = gen.empty() ? "-" : gen;
            mcfg.seed = seed;
            auto params = measure_standing_params(geo, mcfg);
            int p;
            if (p_arg.empty()) {
                const auto& vs = tos.vspaces.at(tos.root);
                auto owner = vs.fam.membership(vs.graph.n);
                p = -1;
                for (int v = 0; v < vs.graph.n && p < 0; ++v)
                    if (owner[v] < 0) p = v;
                if (p < 0) throw std::invalid_argument("no off-member vertex for the reference point");
            } else {
                p = std::stoi(p_arg);
            }
            auto [n0, n1] = parse_range(n_range);
            std::vector<long long> Ns;
            for (long long n = n0; n <= n1; ++n) Ns.push_back(n);
            auto prof = ct_profile(geo, p, Ns, budget, seed, params);
            if (format == "csv")
                emit(out_path, "profile.csv", profile_to_csv(prof));
            else
                emit(out_path, "profile.json", profile_to_json(prof).dump(2) + "\n");
        } else if (*cmd_run) {
            ExperimentConfig cfg;
            cfg.gen_spec = gen;
            cfg.input_path = in_path;
            if (!D_arg.empty()) cfg.D_override = rat_from_string(D_arg);
            if (!C_arg.empty()) cfg.C_override = rat_from_string(C_arg);
            cfg.depth = depth;
            auto [n0, n1] = parse_range(n_range);
            cfg.N_begin = n0;
            cfg.N_end = n1;
            cfg.budget = budget;
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.out_dir = out_or_default(out_path, "");
            auto rep = run_experiment(cfg);
            for (const auto& s : rep.suites)
                std::cerr << (s.pass ? "[pass] " : "[FAIL] ") << s.name << ": " << s.detail << "\n";
            if (cfg.out_dir.empty()) std::cout << report_to_json(rep).dump(2) << "\n";
            return rep.all_pass() ? 0 : 1;
        }
        return 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
