#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "red/contention.hpp"
#include "red/experiment.hpp"
#include "red/scenarios.hpp"
#include "red/workload_io.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(s)};
    const auto a = std::stoull(s.substr(0, dots));
    const auto b = std::stoull(s.substr(dots + 2));
    if (b < a) throw std::invalid_argument(s);
    std::vector<std::uint64_t> out;
    for (auto x = a; x <= b; ++x) out.push_back(x);
    return out;
  } catch (const std::exception&) {
    throw red::Error(red::ErrorCode::ValidationError, "seeds must be N or A..B, got '" + s + "'");
  }
}

std::vector<red::Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<red::Variant> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.assign(red::kAllVariants.begin(), red::kAllVariants.end());
      return out;
    }
    out.push_back(red::parse_variant(n));
  }
  return out;
}

void print_report(const red::ComparisonReport& report) {
  std::printf("%-8s %-8s %-20s %14s %7s %7s %6s\n", "a", "b", "metric", "mean_delta", "win_a", "win_b", "pairs");
  for (const auto& r : report.rows) {
    std::printf("%-8s %-8s %-20s %14.6g %7.3f %7.3f %6zu\n", r.a.c_str(), r.b.c_str(), r.metric.c_str(),
                r.mean_delta, r.win_a, r.win_b, r.pairs);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for deadline-aware multi-DAG DNN scheduling"};
  app.require_subcommand(1);

  std::string file;
  auto* validate = app.add_subcommand("validate", "Parse and validate a workload file");
  validate->add_option("file", file, "Workload file")->required();

  std::string scenario, out_file, deadline = "tight";
  red::ScenarioOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate a built-in scenario");
  gen->add_option("scenario", scenario, "cruise, obstacle, urban, emergency, night, dynamic_mutation, async_pair, "
                                        "burst(P), nonpartitionable(P)")
      ->required();
  gen->add_option("--scale", gen_opts.scale, "Cost multiplier")->capture_default_str();
  gen->add_option("--seed", gen_opts.seed, "Arrival and interference seed")->capture_default_str();
  gen->add_option("--deadline", deadline, "tight or loose")->capture_default_str();
  gen->add_option("--load", gen_opts.load, "Nominal platform utilisation")->capture_default_str();
  gen->add_option("--instances", gen_opts.instances, "Releases per DAG")->capture_default_str();
  gen->add_flag("--interference", gen_opts.interference, "Add seeded interference windows");
  gen->add_flag("--faults", gen_opts.faults, "Inject I/O waits and OOM retries");
  gen->add_option("-o,--output", out_file, "Output file")->required();

  std::vector<std::string> variants{"all"};
  std::string seeds = "0";
  std::string out_dir;
  double lambda = 1.0;
  std::size_t threads = 0;
  auto* run = app.add_subcommand("run", "Run variants over a seed range");
  run->add_option("file", file, "Workload file")->required();
  run->add_option("--variant", variants, "EDF, RED_FG, RED_IDA, RED or all (repeatable)")->capture_default_str();
  run->add_option("--seeds", seeds, "Seed or inclusive range A..B")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--lambda", lambda, "QoE lambda")->capture_default_str();
  run->add_option("--threads", threads, "Worker threads (0 = auto, capped by RED_SIM_THREADS)");

  std::string cmp_dir;
  auto* compare = app.add_subcommand("compare", "Recompute comparison.csv from a run directory");
  compare->add_option("dir", cmp_dir, "Run directory")->required();

  std::string node;
  std::string profile_seeds = "1..3";
  auto* profile = app.add_subcommand("profile", "Profile the contention delay of a node against its heaviest co-runners");
  profile->add_option("file", file, "Workload file")->required();
  profile->add_option("--node", node, "Node as <dag>/<node>")->required();
  profile->add_option("--seeds", profile_seeds, "Seed or inclusive range A..B")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      auto w = red::parse_workload(file);
      std::printf("ok: %zu dag(s), %zu mutation(s), %zu cross dependency(ies)\n", w.dags.size(), w.mutations.size(),
                  w.cross.size());
    } else if (*gen) {
      gen_opts.deadline = red::parse_deadline_mode(deadline);
      red::write_workload(out_file, red::generate_scenario(scenario, gen_opts));
    } else if (*run) {
      auto w = red::parse_workload(file);
      red::ExperimentConfig cfg;
      cfg.variants = parse_variants(variants);
      cfg.seeds = parse_seeds(seeds);
      cfg.out_dir = out_dir;
      cfg.lambda = lambda;
      cfg.threads = threads;
      auto result = red::run_experiment(w, cfg);
      for (const auto& [v, runs] : result.summaries) {
        double rate = 0, resp = 0;
        for (const auto& [_, s] : runs) {
          rate += s.miss_drop_rate;
          resp += s.mean_response_ms;
        }
        const auto n = static_cast<double>(runs.size());
        std::printf("%-8s seeds=%zu miss_drop_rate=%.4f mean_response_ms=%.3f\n", v.c_str(), runs.size(), rate / n,
                    resp / n);
      }
    } else if (*compare) {
      print_report(red::compare_directory(cmp_dir));
    } else if (*profile) {
      auto w = red::parse_workload(file);
      auto slash = node.find('/');
      if (slash == std::string::npos) {
        throw red::Error(red::ErrorCode::ValidationError, "--node must be <dag>/<node>");
      }
      std::vector<red::DagSpec> specs;
      for (const auto& t : w.dags) specs.push_back(t.dag);
      const auto s = parse_seeds(profile_seeds);
      const auto delta = red::profile_contention(node.substr(0, slash), node.substr(slash + 1), specs, w.platform,
                                                 w.exec, s, w.interference);
      std::printf("[{\"node\": \"%s\", \"platform\": \"%s\", \"delay_ms\": %.6f}]\n", node.c_str(),
                  w.platform.name.c_str(), red::to_ms(delta));
    }
  } catch (const red::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
