#include "relhyp/generators.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace relhyp {

namespace {

const char kGens[4] = {'a', 'A', 'b', 'B'};

char invert(char c) { return std::isupper(c) ? std::tolower(c) : std::toupper(c); }

}  // namespace

std::string reduce_word(std::string w) {
    std::string out;
    for (char c : w) {
        if (!out.empty() && out.back() == invert(c))
            out.pop_back();
        else
            out.push_back(c);
    }
    return out;
}

std::string apply_word_map(const WordMap& wm, const std::string& w) {
    std::string out;
    auto append = [&out](const std::string& img, bool inv) {
        if (!inv) {
            out += img;
        } else {
            for (auto it = img.rbegin(); it != img.rend(); ++it) out.push_back(invert(*it));
        }
    };
    for (char c : w) {
        switch (c) {
            case 'a': append(wm.a_image, false); break;
            case 'A': append(wm.a_image, true); break;
            case 'b': append(wm.b_image, false); break;
            case 'B': append(wm.b_image, true); break;
            default: throw std::invalid_argument("apply_word_map: bad letter in word");
        }
    }
    return reduce_word(out);
}

WordMap parse_word_map(const std::string& spec) {
    auto dot = spec.find('.');
    if (dot == std::string::npos)
        throw std::invalid_argument("word map must be '<imageOfA>.<imageOfB>', e.g. 'a.ba'");
    WordMap wm;
    wm.a_image = reduce_word(spec.substr(0, dot));
    wm.b_image = reduce_word(spec.substr(dot + 1));
    for (char c : wm.a_image + wm.b_image)
        if (c != 'a' && c != 'A' && c != 'b' && c != 'B')
            throw std::invalid_argument("word map images must use letters a, A, b, B");
    if (wm.a_image.empty() || wm.b_image.empty())
        throw std::invalid_argument("word map images must be nontrivial");
    return wm;
}

FreeGroupBall free_group_ball(int radius) {
    if (radius < 1) throw std::invalid_argument("free_group_ball: radius must be >= 1");
    FreeGroupBall ball;
    ball.radius = radius;
    std::queue<std::string> q;
    q.push("");
    ball.index[""] = 0;
    ball.words.push_back("");
    while (!q.empty()) {
        std::string w = q.front();
        q.pop();
        if (static_cast<int>(w.size()) == radius) continue;
        for (char g : kGens) {
            std::string nw = reduce_word(w + g);
            if (static_cast<int>(nw.size()) <= static_cast<int>(w.size())) continue;  // backtrack in the tree
            if (!ball.index.count(nw)) {
                ball.index[nw] = static_cast<int>(ball.words.size());
                ball.words.push_back(nw);
                q.push(nw);
            }
        }
    }
    std::vector<std::tuple<int, int, Rat>> edges;
    Rat one = 1;
    for (size_t i = 0; i < ball.words.size(); ++i)
        for (char g : kGens) {
            std::string nw = reduce_word(ball.words[i] + g);
            auto it = ball.index.find(nw);
            if (it != ball.index.end() && static_cast<int>(i) < it->second)
                edges.emplace_back(static_cast<int>(i), it->second, one);
        }
    ball.graph = MetricGraph::build("F2ball(" + std::to_string(radius) + ")",
                                    static_cast<int>(ball.words.size()), edges);
    return ball;
}

HoroFamily a_coset_family(const FreeGroupBall& ball, int min_size) {
    int n = ball.graph.n;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int v = 0; v < n; ++v) {
        std::string nw = reduce_word(ball.words[v] + 'a');
        auto it = ball.index.find(nw);
        if (it != ball.index.end()) parent[find(v)] = find(it->second);
    }
    std::map<int, std::vector<int>> comps;
    for (int v = 0; v < n; ++v) comps[find(v)].push_back(v);
    std::vector<std::vector<int>> segs;
    for (auto& [_, verts] : comps)
        if (static_cast<int>(verts.size()) >= min_size) {
            std::sort(verts.begin(), verts.end());
            segs.push_back(verts);
        }
    std::sort(segs.begin(), segs.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    std::vector<std::pair<std::string, std::vector<int>>> members;
    int width = static_cast<int>(std::to_string(std::max<size_t>(segs.size(), 1) - 1).size());
    for (size_t i = 0; i < segs.size(); ++i) {
        std::string idx = std::to_string(i);
        members.emplace_back("aH" + std::string(width - idx.size(), '0') + idx, segs[i]);
    }
    return HoroFamily::build(ball.graph, std::move(members), Rat(1));
}

MetricGraph bary_tree(int branching, int depth) {
    if (branching < 1 || depth < 0) throw std::invalid_argument("bary_tree: bad parameters");
    std::vector<std::tuple<int, int, Rat>> edges;
    Rat one = 1;
    int next = 1;
    std::vector<int> frontier{0};
    for (int d = 0; d < depth; ++d) {
        std::vector<int> nf;
        for (int v : frontier)
            for (int c = 0; c < branching; ++c) {
                edges.emplace_back(v, next, one);
                nf.push_back(next++);
            }
        frontier = std::move(nf);
    }
    return MetricGraph::build("tree(" + std::to_string(branching) + "," + std::to_string(depth) + ")",
                              next, edges);
}

MetricGraph path_graph(int n) {
    if (n < 1) throw std::invalid_argument("path_graph: need at least one vertex");
    std::vector<std::tuple<int, int, Rat>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1, Rat(1));
    return MetricGraph::build("path(" + std::to_string(n) + ")", n, edges);
}

MetricGraph random_connected_graph(int n, int extra_edges, unsigned long long seed) {
    if (n < 1) throw std::invalid_argument("random_connected_graph: need at least one vertex");
    std::mt19937_64 rng(seed);
    std::set<std::pair<int, int>> used;
    std::vector<std::tuple<int, int, Rat>> edges;
    auto rand_len = [&rng]() {
        std::uniform_int_distribution<int> num(1, 12), den(1, 6);
        return make_rat(num(rng), den(rng));
    };
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        int u = pick(rng);
        used.insert({u, v});
        edges.emplace_back(u, v, rand_len());
    }
    std::uniform_int_distribution<int> pick(0, n - 1);
    int attempts = 0;
    while (extra_edges > 0 && attempts < 50 * (extra_edges + 1)) {
        ++attempts;
        int u = pick(rng), v = pick(rng);
        if (u == v) continue;
        auto key = std::minmax(u, v);
        if (used.count(key)) continue;
        used.insert(key);
        edges.emplace_back(key.first, key.second, rand_len());
        --extra_edges;
    }
    return MetricGraph::build("rand(" + std::to_string(n) + "," + std::to_string(seed) + ")", n, edges);
}

// --------------------------------------------------------------------------
// Instances
// --------------------------------------------------------------------------

namespace {

VertexSpace ball_space(int radius) {
    auto ball = free_group_ball(radius);
    auto fam = a_coset_family(ball);
    return VertexSpace{std::move(ball.graph), std::move(fam)};
}

VertexSpace parse_space(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("space spec must be 'ball:R' or 'path:N', got '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    int arg = std::stoi(spec.substr(colon + 1));
    if (kind == "ball") return ball_space(arg);
    if (kind == "path") {
        auto g = path_graph(arg);
        auto fam = HoroFamily::build(g, {}, Rat(1));
        return VertexSpace{std::move(g), std::move(fam)};
    }
    throw std::invalid_argument("unknown space kind '" + kind + "'");
}

// measured multiplicative distortion of f on the whole domain, declared as
// (K, 0)
Rat measured_K(const MetricGraph& dom, const MetricGraph& cod, const std::map<int, int>& f) {
    auto drows = all_pairs(dom);
    Rat K = 1;
    for (int x = 0; x < dom.n; ++x) {
        auto row = sssp(cod, f.at(x));
        for (int y = x + 1; y < dom.n; ++y) {
            const Rat& d = drows[x][y];
            const Rat& dp = row[f.at(y)];
            if (dp / d > K) K = dp / d;
            if (d / dp > K) K = d / dp;
        }
    }
    return K;
}

TreeOfSpaces segment_instance(std::vector<VertexSpace> spaces, std::vector<EdgeSpace> es,
                              std::string id) {
    TreeOfSpaces tos;
    tos.instance_id = std::move(id);
    tos.root = 0;
    for (size_t i = 0; i < spaces.size(); ++i) tos.vspaces.emplace(static_cast<int>(i), std::move(spaces[i]));
    for (size_t i = 0; i + 1 < tos.vspaces.size(); ++i)
        tos.tree_edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
    tos.espaces = std::move(es);
    return tos;
}

}  // namespace

TreeOfSpaces generate_instance(const std::string& spec, unsigned long long seed) {
    // accept "name,a,b" and "name(a,b)"
    std::string flat = spec;
    if (auto lp = flat.find('('); lp != std::string::npos) {
        if (flat.back() != ')') throw std::invalid_argument("malformed generator spec '" + spec + "'");
        flat = flat.substr(0, lp) + "," + flat.substr(lp + 1, flat.size() - lp - 2);
    }
    std::vector<std::string> parts;
    std::stringstream ss(flat);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (parts.empty()) throw std::invalid_argument("empty generator spec");
    const std::string& name = parts[0];
    (void)seed;  // all shipped generators are deterministic; the seed is recorded by callers

    if (name == "tree-plain") {
        if (parts.size() != 3) throw std::invalid_argument("tree-plain expects branching,depth");
        TreeOfSpaces tos;
        tos.instance_id = "tree-plain(" + parts[1] + "," + parts[2] + ")";
        tos.root = 0;
        auto g = bary_tree(std::stoi(parts[1]), std::stoi(parts[2]));
        auto fam = HoroFamily::build(g, {}, Rat(1));
        tos.vspaces.emplace(0, VertexSpace{std::move(g), std::move(fam)});
        return tos;
    }
    if (name == "free-peripheral") {
        if (parts.size() != 2) throw std::invalid_argument("free-peripheral expects radius");
        TreeOfSpaces tos;
        tos.instance_id = "free-peripheral(" + parts[1] + ")";
        tos.root = 0;
        tos.vspaces.emplace(0, ball_space(std::stoi(parts[1])));
        return tos;
    }
    if (name == "segment-identity") {
        if (parts.size() != 3) throw std::invalid_argument("segment-identity expects Y,len");
        int len = std::stoi(parts[2]);
        if (len < 1) throw std::invalid_argument("segment-identity: len must be >= 1");
        std::vector<VertexSpace> spaces;
        for (int i = 0; i <= len; ++i) spaces.push_back(parse_space(parts[1]));
        std::vector<EdgeSpace> es;
        for (int i = 0; i < len; ++i) {
            EdgeSpace e;
            e.v1 = i;
            e.v2 = i + 1;
            VertexSpace ycopy = parse_space(parts[1]);
            e.graph = std::move(ycopy.graph);
            e.fam = std::move(ycopy.fam);
            for (int x = 0; x < e.graph.n; ++x) {
                e.map1[x] = x;
                e.map2[x] = x;
            }
            e.declared_K = 1;
            e.declared_eps = 0;
            es.push_back(std::move(e));
        }
        return segment_instance(std::move(spaces), std::move(es),
                                "segment-identity(" + parts[1] + "," + parts[2] + ")");
    }
    if (name == "segment-automorphism") {
        if (parts.size() != 4) throw std::invalid_argument("segment-automorphism expects radius,wordmap,len");
        int radius = std::stoi(parts[1]);
        WordMap wm = parse_word_map(parts[2]);
        if (wm.a_image != "a" && wm.a_image != "A")
            throw std::invalid_argument(
                "segment-automorphism: the word map must send a to a or A so that "
                "a-coset members map into a-coset members");
        int len = std::stoi(parts[3]);
        if (len < 1) throw std::invalid_argument("segment-automorphism: len must be >= 1");

        auto big = free_group_ball(radius);
        // A length-preserving map permutes the ball, so the edge space can
        // be the full ball with the same coset structure. Otherwise the
        // edge radius shrinks until every image keeps one step of slack,
        // so that every image coset still reaches a second ball point.
        bool length_preserving = true;
        for (const auto& w : big.words)
            if (apply_word_map(wm, w).size() != w.size()) {
                length_preserving = false;
                break;
            }
        int er = 0;
        if (length_preserving) {
            er = radius;
        } else {
            for (int r = radius - 1; r >= 1; --r) {
                auto small = free_group_ball(r);
                bool ok = true;
                for (const auto& w : small.words)
                    if (static_cast<int>(apply_word_map(wm, w).size()) > radius - 1) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    er = r;
                    break;
                }
            }
        }
        if (er == 0)
            throw std::invalid_argument("segment-automorphism: word map images escape the ball even "
                                        "for edge radius 1; enlarge the radius");

        std::vector<VertexSpace> spaces;
        for (int i = 0; i <= len; ++i) spaces.push_back(ball_space(radius));

        std::vector<EdgeSpace> es;
        for (int i = 0; i < len; ++i) {
            auto small = free_group_ball(er);
            EdgeSpace e;
            e.v1 = i;
            e.v2 = i + 1;
            // with er < radius, the preimage of a vertex member can be a
            // single coset point; it must itself be a member
            e.fam = a_coset_family(small, er < radius ? 1 : 2);
            for (int x = 0; x < small.graph.n; ++x) {
                e.map1[x] = big.index.at(small.words[x]);
                e.map2[x] = big.index.at(apply_word_map(wm, small.words[x]));
            }
            e.graph = std::move(small.graph);
            Rat K1 = measured_K(e.graph, spaces[i].graph, e.map1);
            Rat K2 = measured_K(e.graph, spaces[i + 1].graph, e.map2);
            e.declared_K = std::max(K1, K2);
            e.declared_eps = 0;
            es.push_back(std::move(e));
        }
        return segment_instance(std::move(spaces), std::move(es),
                                "segment-automorphism(" + parts[1] + "," + parts[2] + "," + parts[3] + ")");
    }
    throw std::invalid_argument("unknown generator '" + name + "'");
}

}  // namespace relhyp
