#include "relhyp/io_json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relhyp {

using nlohmann::json;

MetricGraph graph_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("graph json: expected an object");
    std::string id = j.at("space_id").get<std::string>();
    auto verts = j.at("vertices").get<std::vector<int>>();
    int n = static_cast<int>(verts.size());
    for (int i = 0; i < n; ++i)
        if (verts[i] != i)
            throw std::invalid_argument("graph json: vertices must be dense 0.." + std::to_string(n - 1));
    std::map<int, std::string> labels;
    if (j.contains("labels"))
        for (const auto& [k, v] : j.at("labels").items()) labels[std::stoi(k)] = v.get<std::string>();
    std::vector<std::tuple<int, int, Rat>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument("graph json: each edge must be [u, v, \"num/den\"]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>(), rat_from_string(e[2].get<std::string>()));
    }
    return MetricGraph::build(std::move(id), n, edges, std::move(labels));
}

json graph_to_json(const MetricGraph& g) {
    json j;
    j["space_id"] = g.space_id;
    std::vector<int> verts(g.n);
    for (int i = 0; i < g.n; ++i) verts[i] = i;
    j["vertices"] = verts;
    if (!g.labels.empty()) {
        json labels = json::object();
        for (const auto& [k, v] : g.labels) labels[std::to_string(k)] = v;
        j["labels"] = labels;
    }
    // sorted edge order for byte-stable output
    std::vector<std::array<int, 2>> order(g.edge_ends);
    std::vector<int> idx(g.edge_count());
    for (int i = 0; i < g.edge_count(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&g](int a, int b) {
        auto ka = std::minmax(g.edge_ends[a][0], g.edge_ends[a][1]);
        auto kb = std::minmax(g.edge_ends[b][0], g.edge_ends[b][1]);
        return ka < kb;
    });
    json edges = json::array();
    for (int i : idx) {
        auto [u, v] = std::minmax(g.edge_ends[i][0], g.edge_ends[i][1]);
        edges.push_back(json::array({u, v, rat_to_string(g.edge_len[i])}));
    }
    j["edges"] = edges;
    return j;
}

HoroFamily family_from_json(const json& j, const MetricGraph& host) {
    if (j.at("host").get<std::string>() != host.space_id)
        throw std::invalid_argument("family json: host mismatch ('" + j.at("host").get<std::string>() +
                                    "' vs '" + host.space_id + "')");
    std::vector<std::pair<std::string, std::vector<int>>> members;
    for (const auto& [name, ids] : j.at("members").items())
        members.emplace_back(name, ids.get<std::vector<int>>());
    Rat sep = rat_from_string(j.at("separation").get<std::string>());
    return HoroFamily::build(host, std::move(members), sep);
}

json family_to_json(const HoroFamily& fam) {
    json j;
    j["host"] = fam.host_id;
    json members = json::object();
    for (const auto& [name, ids] : fam.members) members[name] = ids;
    j["members"] = members;
    j["separation"] = rat_to_string(fam.separation);
    return j;
}

std::vector<PETarget> targets_from_json(const json& j) {
    std::vector<PETarget> out;
    for (const auto& [name, spec] : j.items()) {
        PETarget t;
        t.member_name = name;
        t.L = graph_from_json(spec.at("L"));
        for (const auto& [k, v] : spec.at("g").items()) t.g[std::stoi(k)] = v.get<int>();
        out.push_back(std::move(t));
    }
    return out;
}

TreeOfSpaces tos_from_json(const json& j) {
    TreeOfSpaces tos;
    tos.instance_id = j.value("instance_id", std::string("file-instance"));
    tos.root = j.at("tree").at("root").get<int>();
    for (const auto& e : j.at("tree").at("edges"))
        tos.tree_edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    for (const auto& [k, spec] : j.at("vertex_spaces").items()) {
        VertexSpace vs;
        vs.graph = graph_from_json(spec.at("graph"));
        vs.fam = spec.contains("family") ? family_from_json(spec.at("family"), vs.graph)
                                         : HoroFamily::build(vs.graph, {}, Rat(1));
        tos.vspaces.emplace(std::stoi(k), std::move(vs));
    }
    if (j.contains("edge_spaces"))
        for (const auto& [k, spec] : j.at("edge_spaces").items()) {
            EdgeSpace e;
            auto dash = k.find('-');
            if (dash == std::string::npos)
                throw std::invalid_argument("tree json: edge space key must be 'v1-v2', got '" + k + "'");
            e.v1 = std::stoi(k.substr(0, dash));
            e.v2 = std::stoi(k.substr(dash + 1));
            e.graph = graph_from_json(spec.at("graph"));
            e.fam = spec.contains("family") ? family_from_json(spec.at("family"), e.graph)
                                            : HoroFamily::build(e.graph, {}, Rat(1));
            const auto& maps = spec.at("maps");
            for (const auto& [x, v] : maps.at(std::to_string(e.v1)).items())
                e.map1[std::stoi(x)] = v.get<int>();
            for (const auto& [x, v] : maps.at(std::to_string(e.v2)).items())
                e.map2[std::stoi(x)] = v.get<int>();
            if (spec.contains("declared_K")) e.declared_K = rat_from_string(spec.at("declared_K").get<std::string>());
            if (spec.contains("declared_eps"))
                e.declared_eps = rat_from_string(spec.at("declared_eps").get<std::string>());
            tos.espaces.push_back(std::move(e));
        }
    tos.require_well_formed();
    return tos;
}

json tos_to_json(const TreeOfSpaces& tos) {
    json j;
    j["instance_id"] = tos.instance_id;
    j["tree"]["root"] = tos.root;
    json tedges = json::array();
    for (const auto& [a, b] : tos.tree_edges) tedges.push_back(json::array({a, b}));
    j["tree"]["edges"] = tedges;
    json vs = json::object();
    for (const auto& [v, space] : tos.vspaces) {
        json s;
        s["graph"] = graph_to_json(space.graph);
        s["family"] = family_to_json(space.fam);
        vs[std::to_string(v)] = s;
    }
    j["vertex_spaces"] = vs;
    json es = json::object();
    for (const auto& e : tos.espaces) {
        json s;
        s["graph"] = graph_to_json(e.graph);
        s["family"] = family_to_json(e.fam);
        json m1 = json::object(), m2 = json::object();
        for (const auto& [x, v] : e.map1) m1[std::to_string(x)] = v;
        for (const auto& [x, v] : e.map2) m2[std::to_string(x)] = v;
        s["maps"][std::to_string(e.v1)] = m1;
        s["maps"][std::to_string(e.v2)] = m2;
        s["declared_K"] = rat_to_string(e.declared_K);
        s["declared_eps"] = rat_to_string(e.declared_eps);
        es[std::to_string(e.v1) + "-" + std::to_string(e.v2)] = s;
    }
    j["edge_spaces"] = es;
    return j;
}

json ladder_to_json(const Ladder& lad) {
    json j;
    j["root"] = lad.root;
    j["D"] = rat_to_string(lad.D_used);
    j["C"] = rat_to_string(lad.C_used);
    j["support"] = std::vector<int>(lad.T1.begin(), lad.T1.end());
    json growth = json::array();
    for (const auto& stage : lad.growth) growth.push_back(stage);
    j["growth"] = growth;
    json segs = json::object();
    for (const auto& [v, lam] : lad.lambda_v) {
        json s;
        s["vertices"] = lam.verts;
        s["length"] = rat_to_string(lam.length);
        if (lam.quality) s["quality"] = rat_to_string(*lam.quality);
        s["off_horoball"] = lad.lambda_b_v.at(v);
        json recs = json::array();
        auto it = lad.subpieces.find(v);
        if (it != lad.subpieces.end())
            for (const auto& rec : it->second) {
                json r;
                r["edge"] = rec.edge_idx;
                r["child"] = rec.child_v;
                r["p_e"] = rec.p_e;
                r["q_e"] = rec.q_e;
                r["glued_separation"] = rat_to_string(rec.glued_separation);
                r["coned_separation"] = rat_to_string(rec.coned_separation);
                r["mu_hat"] = rec.mu_hat.verts;
                recs.push_back(r);
            }
        s["subpieces"] = recs;
        segs[std::to_string(v)] = s;
    }
    j["segments"] = segs;
    j["ladder_tc"] = lad.B_tc;
    j["off_horoball_X"] = lad.Bb_X;
    return j;
}

json validation_to_json(const ValidationReport& rep) {
    json j;
    j["ok"] = rep.ok;
    j["failures"] = rep.failures;
    auto dist_to_json = [](const std::vector<MapDistortion>& v) {
        json arr = json::array();
        for (const auto& md : v) {
            json m;
            m["edge_space"] = md.espace_idx;
            m["vertex_space"] = md.tree_v;
            m["expansion"] = rat_to_string(md.expansion);
            m["contraction"] = rat_to_string(md.contraction);
            m["declared_ok"] = md.declared_ok;
            arr.push_back(m);
        }
        return arr;
    };
    j["map_distortion"] = dist_to_json(rep.map_distortion);
    j["coned_map_distortion"] = dist_to_json(rep.coned_map_distortion);
    auto tables_to_json = [](const std::vector<PropernessTable>& v) {
        json arr = json::array();
        for (const auto& t : v) {
            json m;
            m["vertex_space"] = t.tree_v;
            json rows = json::array();
            for (const auto& [M, N] : t.rows) rows.push_back(json::array({M, rat_to_string(N)}));
            m["rows"] = rows;
            arr.push_back(m);
        }
        return arr;
    };
    j["properness_X"] = tables_to_json(rep.properness_X);
    j["properness_TC"] = tables_to_json(rep.properness_TC);
    json dens = json::array();
    for (const auto& d : rep.image_density) {
        json m;
        m["edge_space"] = d.espace_idx;
        m["vertex_space"] = d.tree_v;
        m["edge_member"] = d.edge_member;
        m["vertex_member"] = d.vertex_member;
        m["density"] = rat_to_string(d.density);
        dens.push_back(m);
    }
    j["image_density"] = dens;
    return j;
}

std::string profile_to_csv(const CTProfile& prof) {
    std::ostringstream out;
    out << "N,M,lambda_endpoints,witness_vertex\n";
    for (const auto& r : prof.rows)
        out << r.N << "," << rat_to_string(r.M) << "," << r.lambda_endpoints.first << "-"
            << r.lambda_endpoints.second << "," << r.witness_vertex << "\n";
    return out.str();
}

json profile_to_json(const CTProfile& prof) {
    json j;
    j["instance_id"] = prof.instance_id;
    j["v0"] = prof.v0;
    j["p"] = prof.p_local;
    j["budget"] = prof.budget;
    j["seed"] = prof.seed;
    j["depth"] = prof.depth;
    json params = json::object();
    for (const auto& [name, pv] : prof.params) {
        json p;
        p["value"] = rat_to_string(pv.value);
        p["provenance"] = pv.measured ? "measured" : "configured";
        if (pv.measured) p["instance"] = pv.instance;
        params[name] = p;
    }
    j["params"] = params;
    json rows = json::array();
    for (const auto& r : prof.rows) {
        json row;
        row["N"] = r.N;
        row["M"] = rat_to_string(r.M);
        row["lambda"] = json::array({r.lambda_endpoints.first, r.lambda_endpoints.second});
        row["witness"] = r.witness_vertex;
        row["exhaustive"] = r.exhaustive;
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["diagnostics"] = prof.diagnostics;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("parse error in '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << content;
}

}  // namespace relhyp
