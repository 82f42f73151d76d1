#include "relhyp/generators.hpp"
#include "relhyp/io_json.hpp"
#include "relhyp/report.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace relhyp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    auto p = fs::temp_directory_path() / "relhyp_test_io";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// runs the CLI binary named by RELHYP_CLI; returns the exit code
int run_cli(const std::string& args, const fs::path& stdout_to) {
    const char* cli = std::getenv("RELHYP_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "RELHYP_CLI must point at the built binary");
    std::string cmd = std::string(cli) + " " + args + " > " + stdout_to.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("graph json round trip") {
    auto g = MetricGraph::build("demo", 4,
                                {{0, 1, make_rat(1, 2)}, {1, 2, Rat(2)}, {2, 3, make_rat(7, 3)}},
                                {{0, "base"}});
    auto j = graph_to_json(g);
    auto g2 = graph_from_json(j);
    CHECK(g2.space_id == g.space_id);
    CHECK(g2.n == g.n);
    CHECK(g2.edge_count() == g.edge_count());
    CHECK(*g2.edge_length(0, 1) == make_rat(1, 2));
    CHECK(*g2.edge_length(2, 3) == make_rat(7, 3));
    CHECK(g2.labels.at(0) == "base");

    auto bad = j;
    bad["vertices"] = std::vector<int>{0, 2, 3, 4};
    CHECK_THROWS_AS(graph_from_json(bad), std::invalid_argument);
}

TEST_CASE("family and tree json round trips") {
    auto tos = generate_instance("segment-automorphism,3,a.ba,1", 1);
    auto j = tos_to_json(tos);
    auto tos2 = tos_from_json(j);
    CHECK(tos2.vspaces.size() == tos.vspaces.size());
    CHECK(tos2.espaces.size() == tos.espaces.size());
    CHECK(tos2.espaces[0].map2 == tos.espaces[0].map2);
    CHECK(tos2.espaces[0].declared_K == tos.espaces[0].declared_K);
    CHECK(tos2.vspaces.at(0).fam.member_count() == tos.vspaces.at(0).fam.member_count());
}

TEST_CASE("profile csv shape") {
    CTProfile prof;
    CTRow r;
    r.N = 2;
    r.M = make_rat(5, 2);
    r.lambda_endpoints = {3, 9};
    r.witness_vertex = 14;
    prof.rows.push_back(r);
    CHECK(profile_to_csv(prof) == "N,M,lambda_endpoints,witness_vertex\n2,5/2,3-9,14\n");
}

TEST_CASE("missing and malformed files raise parse errors") {
    CHECK_THROWS_AS(load_json_file("/nonexistent/x.json"), std::invalid_argument);
    auto dir = tmp_dir();
    write_text_file((dir / "junk.json").string(), "{ not json");
    CHECK_THROWS_AS(load_json_file((dir / "junk.json").string()), std::invalid_argument);
}

TEST_CASE("cli: delta of a tree is zero and matches the api") {
    auto dir = tmp_dir();
    auto tree = bary_tree(2, 3);
    write_text_file((dir / "tree.json").string(), graph_to_json(tree).dump());

    auto out = dir / "delta.json";
    int rc = run_cli("delta --in " + (dir / "tree.json").string() + " --mode exhaustive", out);
    CHECK(rc == 0);
    auto j = json::parse(slurp(out));
    CHECK(j.at("delta").get<std::string>() == "0");
    CHECK(j.at("exact").get<bool>());
}

TEST_CASE("cli: cone then delta stays within the collapsed diameter") {
    auto dir = tmp_dir();
    auto p = path_graph(11);
    write_text_file((dir / "path10.json").string(), graph_to_json(p).dump());
    json fam;
    fam["host"] = p.space_id;
    fam["members"]["all"] = std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    fam["separation"] = "1";
    write_text_file((dir / "all.json").string(), fam.dump());

    auto coned = dir / "coned.json";
    int rc = run_cli("cone --in " + (dir / "path10.json").string() + " --family " +
                         (dir / "all.json").string(),
                     coned);
    CHECK(rc == 0);

    auto out = dir / "delta2.json";
    rc = run_cli("delta --in " + coned.string() + " --mode exhaustive", out);
    CHECK(rc == 0);
    auto j = json::parse(slurp(out));
    Rat delta = rat_from_string(j.at("delta").get<std::string>());
    CHECK(delta <= make_rat(3, 2));  // bounded by the collapsed diameter

    // api equivalence
    auto cs = cone_off(p, family_from_json(fam, p));
    CHECK(delta == four_point_delta_exhaustive(cs.graph).value);
}

TEST_CASE("cli: ct-profile equals the api and reruns byte-identically") {
    auto dir = tmp_dir();
    auto csv1 = dir / "prof1.csv";
    auto csv2 = dir / "prof2.csv";
    std::string args = "ct-profile --gen tree-plain,2,3 --N 1..2 --budget 100000 --seed 5 --format csv";
    CHECK(run_cli(args, csv1) == 0);
    CHECK(run_cli(args, csv2) == 0);
    CHECK(slurp(csv1) == slurp(csv2));

    auto tos = generate_instance("tree-plain,2,3", 5);
    auto geo = build_tree_geometry(tos, 0);
    ExperimentConfig mcfg;
    mcfg.gen_spec = "tree-plain,2,3";
    mcfg.seed = 5;
    auto params = measure_standing_params(geo, mcfg);
    auto prof = ct_profile(geo, 0, {1, 2}, 100000, 5, params);
    CHECK(slurp(csv1) == profile_to_csv(prof));
}

TEST_CASE("cli: run emits deterministic reports with M(N) = N on the plain tree") {
    auto dir = tmp_dir() / "run1";
    auto dir2 = tmp_dir() / "run2";
    fs::remove_all(dir);
    fs::remove_all(dir2);
    auto sink = tmp_dir() / "run.log";
    std::string base = "run --gen tree-plain,2,3 --N 1..2 --budget 100000 --seed 9 --out ";
    CHECK(run_cli(base + dir.string(), sink) == 0);
    CHECK(run_cli(base + dir2.string(), sink) == 0);

    // M(N) = N on the no-member instance
    {
        std::istringstream csv(slurp(dir / "profile.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line == "N,M,lambda_endpoints,witness_vertex");
        std::getline(csv, line);
        CHECK(line.substr(0, 4) == "1,1,");
        std::getline(csv, line);
        CHECK(line.substr(0, 4) == "2,2,");
    }
    CHECK(slurp(dir / "report.json") == slurp(dir2 / "report.json"));
    CHECK(slurp(dir / "profile.csv") == slurp(dir2 / "profile.csv"));
    CHECK(fs::exists(dir / "timings.json"));

    auto rep = json::parse(slurp(dir / "report.json"));
    for (const auto& s : rep.at("suites")) CHECK(s.at("pass").get<bool>());
}

TEST_CASE("cli: usage errors exit with 2") {
    auto sink = tmp_dir() / "err.log";
    CHECK(run_cli("delta", sink) == 2);                     // missing --in
    CHECK(run_cli("no-such-subcommand", sink) == 2);
    CHECK(run_cli("ct-profile --N 1..2", sink) == 2);       // neither --gen nor --in
}
