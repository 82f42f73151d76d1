#pragma once

#include "relhyp/electric.hpp"
#include "relhyp/metric_graph.hpp"
#include "relhyp/tree_spaces.hpp"

#include <map>
#include <string>
#include <vector>

namespace relhyp {

/// Cayley ball of the free group on {a, b}, unit edges. Vertices are
/// reduced words in BFS order ('' first, generator order a, A, b, B).
struct FreeGroupBall {
    int radius = 0;
    MetricGraph graph;
    std::vector<std::string> words;
    std::map<std::string, int> index;
};

FreeGroupBall free_group_ball(int radius);

/// Peripheral structure: maximal <a>-coset segments with at least
/// `min_size` vertices inside the ball, separation 1. Vertex spaces use
/// min_size 2 so that boundary vertices stay outside the peripheral
/// structure; edge spaces strictly smaller than their vertex spaces need
/// min_size 1 so that member preimages are members.
HoroFamily a_coset_family(const FreeGroupBall& ball, int min_size = 2);

/// Letterwise endomorphism of the free group given by generator images,
/// applied with free reduction.
struct WordMap {
    std::string a_image = "a";
    std::string b_image = "ba";
};

std::string reduce_word(std::string w);
std::string apply_word_map(const WordMap& wm, const std::string& w);
WordMap parse_word_map(const std::string& spec);  // "<imageOfA>.<imageOfB>", e.g. "a.ba"

/// Complete b-ary tree of the given depth, unit edges, root 0.
MetricGraph bary_tree(int branching, int depth);

MetricGraph path_graph(int n);

/// Seeded random connected graph: a random spanning tree plus extra random
/// edges, with small random rational lengths.
MetricGraph random_connected_graph(int n, int extra_edges, unsigned long long seed);

/// Named deterministic instances:
///   tree-plain,B,D            one plain b-ary tree vertex space, no members
///   free-peripheral,R         one F2 ball of radius R with a-coset members
///   segment-identity,Y,L      base path of L edges, identity gluings of Y
///                             (Y is "ball:R" or "path:N")
///   segment-automorphism,R,W,L  base path of L edges over F2 balls of
///                             radius R; one end includes, the other applies
///                             the word map W (e.g. "a.ba")
/// Accepts both comma form "name,args" and call form "name(args)".
TreeOfSpaces generate_instance(const std::string& spec, unsigned long long seed);

}  // namespace relhyp
