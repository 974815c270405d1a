#include <benchmark/benchmark.h>

#include <vector>

#include "fadbio/eval.hpp"
#include "fadbio/features.hpp"
#include "fadbio/geo.hpp"
#include "fadbio/learn/tree.hpp"
#include "fadbio/rng.hpp"

using namespace fadbio;

namespace {

void bm_solar_day(benchmark::State& state) {
    const GeoPoint p = GeoPoint::make(-5.25, 55.2);
    Date d{2019, 1, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solar_day(p, d));
        d = date_plus_days(d, 1);
        if (d.year > 2090) d.year = 1960;
    }
}
BENCHMARK(bm_solar_day);

void bm_haversine(benchmark::State& state) {
    Rng rng(1);
    std::vector<GeoPoint> pts;
    for (int i = 0; i < 1024; ++i)
        pts.push_back(GeoPoint::make(rng.uniform(-80.0, 80.0), rng.uniform(-180.0, 180.0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(haversine_nm(pts[i & 1023], pts[(i + 7) & 1023]));
        ++i;
    }
}
BENCHMARK(bm_haversine);

EchoWindow random_window(int w_hours, Rng& rng) {
    EchoWindow w;
    w.w_hours = w_hours;
    w.cols.resize(static_cast<std::size_t>(w_hours));
    for (auto& col : w.cols) {
        if (rng.next_double() < 0.3) continue;
        WindowCell cell;
        for (double& v : cell.layers) v = rng.uniform(0.0, 40.0);
        col = cell;
    }
    return w;
}

void bm_aggregate(benchmark::State& state) {
    Rng rng(2);
    const EchoWindow w = random_window(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(aggregate_matrix(w));
}
BENCHMARK(bm_aggregate)->Arg(24)->Arg(72);

void bm_roc_auc(benchmark::State& state) {
    Rng rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.next_double();
        labels[i] = static_cast<int>(rng.below(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
}
BENCHMARK(bm_roc_auc)->Arg(1000)->Arg(10000);

void bm_fit_tree(benchmark::State& state) {
    Rng rng(4);
    const std::size_t n = static_cast<std::size_t>(state.range(0)), p = 20;
    ColMatrix x;
    x.n = n;
    x.p = p;
    x.v.resize(n * p);
    for (double& v : x.v) v = rng.uniform(0.0, 1.0);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i)
        target[i] = 3.0 * x.at(i, 0) - 2.0 * x.at(i, 5) + rng.uniform(0.0, 0.5);
    const Presorted sorted = presort(x);
    TreeProblem problem;
    problem.criterion = SplitCriterion::Variance;
    problem.target = target;
    TreeGrowth growth;
    growth.max_depth = 6;
    for (auto _ : state) {
        Rng tree_rng(7);
        benchmark::DoNotOptimize(fit_tree(x, sorted, problem, growth, tree_rng));
    }
}
BENCHMARK(bm_fit_tree)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
