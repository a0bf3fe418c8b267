// Compares the OpenMP projection / PageRank kernels against the serial
// reference implementations on a planted dataset and checks they agree.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include <omp.h>

#include "copet/bigraph.hpp"
#include "copet/centrality.hpp"
#include "copet/projection.hpp"
#include "copet/synth.hpp"

using namespace copet;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

bool same_edges(const Projection& a, const Projection& b) {
    if (a.edges.size() != b.edges.size()) return false;
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        const ProjectionEdge& l = a.edges[i];
        const ProjectionEdge& r = b.edges[i];
        if (l.a != r.a || l.b != r.b || l.co_count != r.co_count || l.weight != r.weight)
            return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    PlantedSpec spec;
    spec.communities = 20;
    spec.actors_per_community = 500;
    spec.items_per_community = 60;
    spec.p_in = 0.08;
    spec.p_out = 0.002;
    spec.seed = 7;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--actors-per-community"))
            spec.actors_per_community = std::stoul(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--communities"))
            spec.communities = std::stoul(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--items-per-community"))
            spec.items_per_community = std::stoul(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--p-in"))
            spec.p_in = std::stod(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--p-out"))
            spec.p_out = std::stod(argv[i + 1]);
    }

    std::printf("generating %u actors x %u items (seed %llu)\n",
                spec.communities * spec.actors_per_community,
                spec.communities * spec.items_per_community,
                static_cast<unsigned long long>(spec.seed));
    const SynthResult synth = generate(spec);
    const BipartiteGraph graph = build_bigraph(synth.dataset);
    std::printf("bipartite: %u actors, %u items, %llu incidences\n", graph.num_actors(),
                graph.num_items(),
                static_cast<unsigned long long>(graph.incidence_count()));

    for (const Side side : {Side::actor, Side::item}) {
        auto t0 = std::chrono::steady_clock::now();
        Projection serial = project_serial(graph, side);
        const double t_serial = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        Projection parallel = project(graph, side);
        const double t_parallel = seconds_since(t0);

        weigh(serial);
        weigh(parallel);
        const bool ok = same_edges(serial, parallel);
        std::printf("project %-5s: %8zu edges  serial %7.3fs  omp(%d) %7.3fs  "
                    "speedup %.2fx  identical=%s\n",
                    side_name(side), parallel.edges.size(), t_serial,
                    omp_get_max_threads(), t_parallel, t_serial / t_parallel,
                    ok ? "yes" : "NO");
        if (!ok) return 1;

        const Projection filtered = filter(parallel, {0.10, true});
        PagerankOptions opts;
        if (filtered.edges.empty()) continue;

        t0 = std::chrono::steady_clock::now();
        const CentralityScores ser = pagerank_serial(filtered, opts);
        const double p_serial = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const CentralityScores par = pagerank(filtered, opts);
        const double p_parallel = seconds_since(t0);
        bool pr_ok = ser.score.size() == par.score.size();
        for (std::size_t i = 0; pr_ok && i < ser.score.size(); ++i)
            pr_ok = ser.score[i] == par.score[i];
        std::printf("pagerank %-4s: %8zu nodes  serial %7.3fs  omp(%d) %7.3fs  "
                    "speedup %.2fx  bit-identical=%s\n",
                    side_name(side), par.score.size(), p_serial,
                    omp_get_max_threads(), p_parallel, p_serial / p_parallel,
                    pr_ok ? "yes" : "NO");
        if (!pr_ok) return 1;
    }
    return 0;
}
