// Benchmark of the OpenMP scan kernels against their serial reference
// implementations. Both paths are exact; the outputs are compared before
// the timings are printed.

#include "relhyp/electric.hpp"
#include "relhyp/generators.hpp"
#include "relhyp/metric_graph.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>

using namespace relhyp;

namespace {

double now_sec() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct Timed {
    double serial = 0, parallel = 0;
    bool agree = true;
};

void print_row(const char* name, const Timed& t) {
    std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, t.serial, t.parallel,
                t.serial / (t.parallel > 0 ? t.parallel : 1e-9), t.agree ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int n = 120, extra = 60, threads = 0, radius = 4;
    unsigned long long seed = 7;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        auto next = [&]() { return std::stoi(argv[++i]); };
        if (a == "--size") n = next();
        else if (a == "--extra") extra = next();
        else if (a == "--radius") radius = next();
        else if (a == "--threads") threads = next();
        else if (a == "--seed") seed = static_cast<unsigned long long>(next());
        else {
            std::fprintf(stderr, "usage: relhyp-bench [--size N] [--extra E] [--radius R] [--threads T] [--seed S]\n");
            return 2;
        }
    }
    if (threads > 0) omp_set_num_threads(threads);

    std::printf("kernel                            serial   parallel  speedup   check\n");

    {
        auto g = random_connected_graph(n, extra, seed);
        Timed t;
        double t0 = now_sec();
        auto a = four_point_delta_exhaustive_serial(g);
        t.serial = now_sec() - t0;
        t0 = now_sec();
        auto b = four_point_delta_exhaustive(g);
        t.parallel = now_sec() - t0;
        t.agree = a.value == b.value;
        print_row("four_point_delta (random)", t);
    }

    {
        auto ball = free_group_ball(radius);
        auto fam = a_coset_family(ball);
        auto gs = glue_cones(ball.graph, fam, default_horoball_depth(ball.graph, fam));
        auto owner = fam.membership(ball.graph.n);
        int a = -1, b = -1;
        Rat best = -1;
        auto rows = all_pairs(ball.graph);
        for (int u = 0; u < ball.graph.n; ++u)
            for (int v = u + 1; v < ball.graph.n; ++v)
                if (owner[u] < 0 && owner[v] < 0 && rows[u][v] > best) {
                    best = rows[u][v];
                    a = u;
                    b = v;
                }
        auto lam = geodesic(gs.graph, a, b);

        Timed t;
        double t0 = now_sec();
        auto s = measure_projection_lipschitz_serial(gs.graph, lam);
        t.serial = now_sec() - t0;
        t0 = now_sec();
        auto p = measure_projection_lipschitz(gs.graph, lam);
        t.parallel = now_sec() - t0;
        t.agree = s == p;
        print_row("projection_lipschitz (glued)", t);
    }

    {
        auto ball = free_group_ball(radius);
        Timed t;
        double t0 = now_sec();
        int nthreads = omp_get_max_threads();
        omp_set_num_threads(1);
        auto r1 = all_pairs(ball.graph);
        t.serial = now_sec() - t0;
        omp_set_num_threads(nthreads);
        t0 = now_sec();
        auto r2 = all_pairs(ball.graph);
        t.parallel = now_sec() - t0;
        t.agree = r1 == r2;
        print_row("all_pairs (F2 ball)", t);
    }
    return 0;
}
