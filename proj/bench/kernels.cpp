// Serial versus parallel certificate search and checker replay on a few
// corpus problems. Parallel runs use every hardware thread.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nlv/checker/checker.hpp"
#include "nlv/cli/corpus.hpp"
#include "nlv/search/search.hpp"
#include "nlv/search/transform.hpp"

namespace {

using namespace nlv;

const std::vector<std::string> kProblems = {"magnetism", "two-variable", "heart", "caprasse"};

struct Prepared {
  taylor::CompiledProblem cp;
  search::Box root;
  search::CertificateList list;
};

int hardware_threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

const Prepared& prepared(std::size_t index) {
  static std::vector<std::unique_ptr<Prepared>> cache(kProblems.size());
  auto& slot = cache.at(index);
  if (!slot) {
    const auto entry = cli::find_corpus_entry(kProblems[index]);
    if (!entry) throw std::runtime_error("unknown corpus problem " + kProblems[index]);
    taylor::CompiledProblem cp(entry->problem);
    search::Box root = search::root_box(cp.problem, numeric::Precision{});
    const auto out = search::certificate_search_serial(cp, root, search::SearchParams{});
    if (out.status != search::SearchStatus::verified) throw std::runtime_error(kProblems[index] + " not verified");
    auto list = search::transform_certificate(out.tree, root);
    slot = std::make_unique<Prepared>(Prepared{std::move(cp), std::move(root), std::move(list)});
  }
  return *slot;
}

void search_kernel(benchmark::State& state, bool parallel) {
  const Prepared& p = prepared(static_cast<std::size_t>(state.range(0)));
  search::SearchParams params;
  params.workers = parallel ? hardware_threads() : 1;
  for (auto _ : state) {
    auto out = parallel ? search::certificate_search_parallel(p.cp, p.root, params)
                        : search::certificate_search_serial(p.cp, p.root, params);
    benchmark::DoNotOptimize(out.stats.nodes);
  }
  state.SetLabel(kProblems[static_cast<std::size_t>(state.range(0))]);
}

void check_kernel(benchmark::State& state, bool parallel) {
  const Prepared& p = prepared(static_cast<std::size_t>(state.range(0)));
  checker::CheckOptions options;
  options.workers = parallel ? hardware_threads() : 1;
  for (auto _ : state) {
    // A fresh checker per iteration so operation caches start cold.
    const checker::Checker c(p.cp, options);
    auto report = parallel ? c.check_list_parallel(p.list) : c.check_list_serial(p.list);
    if (!report.accepted) state.SkipWithError("certificate rejected");
    benchmark::DoNotOptimize(report.accepted);
  }
  state.SetLabel(kProblems[static_cast<std::size_t>(state.range(0))]);
}

void BM_SearchSerial(benchmark::State& s) { search_kernel(s, false); }
void BM_SearchParallel(benchmark::State& s) { search_kernel(s, true); }
void BM_CheckSerial(benchmark::State& s) { check_kernel(s, false); }
void BM_CheckParallel(benchmark::State& s) { check_kernel(s, true); }

const auto kRange = static_cast<long>(kProblems.size()) - 1;

BENCHMARK(BM_SearchSerial)->DenseRange(0, kRange)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->DenseRange(0, kRange)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CheckSerial)->DenseRange(0, kRange)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckParallel)->DenseRange(0, kRange)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
