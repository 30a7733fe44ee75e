#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/script.hpp"
#include "bptree/tree.hpp"

// Point-query and lrange-init microbenchmark across split factors and search
// strategies. Wall-clock numbers at desk scale are noisy, so comparison
// counts from the instrumented comparator are reported alongside.
namespace bptree::bench {

struct bench_record {
  search_strategy strategy;
  std::uint32_t k = 0;
  std::size_t n_keys = 0;
  std::string op;
  double mean_ns = 0;
  double median_ns = 0;
  double p99_ns = 0;
  double mean_comparisons = 0;
};

namespace detail {

struct stats {
  double mean = 0, median = 0, p99 = 0;
};

inline stats summarize(std::vector<double>& samples) {
  stats s;
  if (samples.empty()) return s;
  double sum = 0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  s.median = samples[samples.size() / 2];
  s.p99 = samples[std::min(samples.size() - 1,
                           static_cast<std::size_t>(0.99 * static_cast<double>(samples.size())))];
  return s;
}

}  // namespace detail

inline std::vector<bench_record> run_bench(const std::vector<std::uint32_t>& ks,
                                           std::size_t n_keys,
                                           const std::vector<search_strategy>& strategies,
                                           std::size_t reps, std::uint64_t seed = 0xb1a5) {
  using clock = std::chrono::steady_clock;
  std::vector<bench_record> out;

  for (std::uint32_t kv : ks) {
    for (search_strategy strat : strategies) {
      const order k(kv);
      bplus_tree<std::int64_t> tree(k, strat);
      std::mt19937_64 g(seed + kv);
      const std::uint64_t universe = std::max<std::uint64_t>(4, 4 * n_keys);
      for (std::size_t i = 0; i < n_keys; ++i)
        tree.insert(static_cast<std::int64_t>(harness::bounded(g, universe)));

      std::vector<std::int64_t> probes(reps);
      for (auto& p : probes) p = static_cast<std::int64_t>(harness::bounded(g, universe));

      const std::size_t warmup = std::min<std::size_t>(reps, 100);
      for (std::size_t i = 0; i < warmup; ++i) (void)tree.contains(probes[i % probes.size()]);

      {
        std::vector<double> ns(reps);
        tree.reset_comparisons();
        for (std::size_t i = 0; i < reps; ++i) {
          const auto t0 = clock::now();
          volatile bool hit = tree.contains(probes[i]);
          const auto t1 = clock::now();
          (void)hit;
          ns[i] = std::chrono::duration<double, std::nano>(t1 - t0).count();
        }
        const double mean_cmp =
            static_cast<double>(tree.comparisons()) / static_cast<double>(reps);
        auto st = detail::summarize(ns);
        out.push_back({strat, kv, n_keys, "isin", st.mean, st.median, st.p99, mean_cmp});
      }

      {
        std::vector<double> ns(reps);
        tree.reset_comparisons();
        for (std::size_t i = 0; i < reps; ++i) {
          const auto t0 = clock::now();
          auto cursor = tree.lrange(probes[i]);
          const auto t1 = clock::now();
          (void)cursor;
          ns[i] = std::chrono::duration<double, std::nano>(t1 - t0).count();
        }
        const double mean_cmp =
            static_cast<double>(tree.comparisons()) / static_cast<double>(reps);
        auto st = detail::summarize(ns);
        out.push_back({strat, kv, n_keys, "lrange_init", st.mean, st.median, st.p99, mean_cmp});
      }
    }
  }
  return out;
}

inline std::string to_csv(const std::vector<bench_record>& records) {
  std::ostringstream os;
  os << "strategy,k,n_keys,op,mean_ns,median_ns,p99_ns,mean_comparisons\n";
  for (const auto& r : records) {
    os << to_string(r.strategy) << "," << r.k << "," << r.n_keys << "," << r.op << "," << r.mean_ns
       << "," << r.median_ns << "," << r.p99_ns << "," << r.mean_comparisons << "\n";
  }
  return os.str();
}

}  // namespace bptree::bench
