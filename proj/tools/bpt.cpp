// Command-line front end: differential fuzzing, dump checking, strategy
// benchmarking and tree dumping. Exit codes: 0 ok, 1 check/fuzz failure,
// 2 usage or parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bptree/bench.hpp"
#include "bptree/dump.hpp"
#include "bptree/script.hpp"
#include "bptree/tree.hpp"

namespace {

using namespace bptree;

search_strategy strategy_arg(const std::string& name) {
  return *strategy_from_name(name);
}

int cmd_fuzz(std::uint64_t seed, std::uint32_t k, std::size_t ops, const std::string& strategy,
             const std::string& script_file) {
  harness::op_script script;
  if (!script_file.empty()) {
    std::ifstream in(script_file);
    if (!in) {
      std::cerr << "cannot open script: " << script_file << "\n";
      return 2;
    }
    try {
      script = harness::parse_script(in);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  } else {
    script = harness::make_script(seed, k, ops);
  }

  const search_strategy strat = strategy_arg(strategy);
  const auto outcome = harness::run_lockstep(script, strat);
  std::cout << "fuzz seed=" << script.seed << " k=" << script.k << " ops=" << script.ops.size()
            << " strategy=" << to_string(strat) << " mutations=" << outcome.mutations
            << " queries=" << outcome.queries << "\n";
  if (outcome.ok()) {
    std::cout << "result: ok\n";
    return 0;
  }
  std::cout << "result: FAIL at " << outcome.detail << "\n";
  const auto minimized = harness::shrink_script(script, strat);
  std::cout << "minimized failing script (" << minimized.ops.size() << " ops):\n"
            << harness::format_script(minimized);
  return 1;
}

int cmd_check(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open: " << path << "\n";
    return 2;
  }
  try {
    const auto raw = io::parse_dump<std::int64_t>(in);
    const auto result = io::run_checks(raw);
    std::cout << io::render_check_lines(result.lines);
    return result.ok() ? 0 : 1;
  } catch (const io::parse_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

int cmd_bench(const std::vector<std::uint32_t>& ks, std::size_t keys, std::size_t reps,
              const std::string& out_path) {
  const std::vector<search_strategy> strategies{search_strategy::linear,
                                                search_strategy::binary};
  const auto records = bench::run_bench(ks, keys, strategies, reps);
  const std::string csv = bench::to_csv(records);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open for writing: " << out_path << "\n";
      return 2;
    }
    out << csv;
  }
  return 0;
}

int cmd_dump(std::uint64_t seed, std::uint32_t k, std::size_t ops, const std::string& strategy,
             const std::string& out_path) {
  const search_strategy strat = strategy_arg(strategy);
  const auto script = harness::mutations_of(harness::make_script(seed, k, ops));
  bplus_tree<std::int64_t> tree((order(k)), strat);
  for (const auto& o : script.ops) {
    if (o.kind == harness::op_kind::insert) {
      tree.insert(o.key);
    } else {
      tree.erase(o.key);
    }
  }
  try {
    io::write_dump_file(tree, out_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"B+-tree engine harness"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::uint32_t k = 2;
  std::size_t ops = 1000;
  std::string strategy = "binary";
  std::string script_file;
  std::string file;
  std::vector<std::uint32_t> ks{1, 16, 256};
  std::size_t keys = 100000;
  std::size_t reps = 2000;
  std::string out_path;

  auto* fuzz = app.add_subcommand("fuzz", "lockstep differential fuzzing against the oracles");
  fuzz->add_option("--seed", seed, "script seed");
  fuzz->add_option("--k", k, "split factor")->check(CLI::PositiveNumber);
  fuzz->add_option("--ops", ops, "number of operations");
  fuzz->add_option("--strategy", strategy, "intra-node search strategy")
      ->check(CLI::IsMember({"linear", "binary"}));
  fuzz->add_option("--script", script_file, "replay a script file instead of generating");

  auto* check = app.add_subcommand("check", "verify a dump file");
  check->add_option("file", file, "dump file")->required();

  auto* bench = app.add_subcommand("bench", "strategy benchmark, CSV output");
  bench->add_option("--k", ks, "split factors")->delimiter(',');
  bench->add_option("--keys", keys, "number of keys in the tree");
  bench->add_option("--reps", reps, "measured repetitions per op kind");
  bench->add_option("--out", out_path, "CSV output file (stdout if omitted)");

  auto* dump = app.add_subcommand("dump", "build a tree from a seed and write its dump");
  dump->add_option("--seed", seed, "script seed");
  dump->add_option("--k", k, "split factor")->check(CLI::PositiveNumber);
  dump->add_option("--ops", ops, "number of operations");
  dump->add_option("--strategy", strategy, "intra-node search strategy")
      ->check(CLI::IsMember({"linear", "binary"}));
  dump->add_option("--out", out_path, "dump output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (fuzz->parsed()) return cmd_fuzz(seed, k, ops, strategy, script_file);
  if (check->parsed()) return cmd_check(file);
  if (bench->parsed()) return cmd_bench(ks, keys, reps, out_path);
  if (dump->parsed()) return cmd_dump(seed, k, ops, strategy, out_path);
  return 2;
}
