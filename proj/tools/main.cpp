// rec-apc: command-line front end for the churn-aware recommendation planner.
//
// Subcommands: solve, walk, analyze, simulate, gen, ingest, export-pomdp,
// bench. Exit codes: 0 success, 1 domain error (bad model, budget hit),
// 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recapc/analysis.hpp"
#include "recapc/belief.hpp"
#include "recapc/bench.hpp"
#include "recapc/errors.hpp"
#include "recapc/generator.hpp"
#include "recapc/instance.hpp"
#include "recapc/pomdp.hpp"
#include "recapc/ratings.hpp"
#include "recapc/simulation.hpp"
#include "recapc/solvers.hpp"
#include "recapc/valuation.hpp"

namespace {

using recapc::Instance;

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

std::vector<std::size_t> parse_categories(const Instance& instance, const std::string& list) {
  std::vector<std::size_t> result;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
    while (!name.empty() && name.back() == ' ') name.pop_back();
    if (name.empty()) throw recapc::ValidationError("empty category name in list: " + list);
    result.push_back(instance.category_index(name));
  }
  return result;
}

std::vector<std::string> category_names(const Instance& instance,
                                        const std::vector<std::size_t>& prefix) {
  std::vector<std::string> names;
  names.reserve(prefix.size());
  for (std::size_t k : prefix) names.push_back(instance.categories()[k]);
  return names;
}

/// Writes to a file, or stdout when the path is empty.
void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw recapc::ParseError("cannot open output file: " + path);
  out << text;
}

struct SolveArgs {
  std::string instance_path;
  std::string algorithm = "bnb";
  std::string queue = "best-first";
  double epsilon = 1e-6;
  std::size_t horizon = 0;  // 0: derive from epsilon
  std::size_t steps = 30;
  std::uint64_t node_budget = 0;
  std::string out_path;
};

void cmd_solve(const SolveArgs& args) {
  Instance instance = recapc::load_instance_file(args.instance_path);
  nlohmann::ordered_json report;
  report["algorithm"] = args.algorithm;

  if (args.algorithm == "bnb") {
    recapc::SolveOptions options;
    options.epsilon = args.epsilon;
    options.queue = args.queue == "fifo" ? recapc::QueueDiscipline::Fifo
                                         : recapc::QueueDiscipline::BestFirst;
    options.node_budget = args.node_budget;
    recapc::SolveResult result = recapc::solve_bnb(instance, options);
    std::cout << "value: " << fmt(result.value) << "\n";
    std::cout << "upper_certificate: " << fmt(result.upper_certificate) << "\n";
    std::cout << "prefix:";
    for (std::size_t k : result.prefix) std::cout << ' ' << instance.categories()[k];
    std::cout << (result.prefix.empty() ? " (empty)" : "") << "\n";
    std::cout << "tail: " << instance.categories()[result.extended_policy.tail] << "\n";
    std::cout << "nodes_expanded: " << result.nodes_expanded << "\n";
    std::cout << "wall_time_ms: " << fmt(result.wall_time_ms) << "\n";
    report["value"] = result.value;
    report["upper_certificate"] = result.upper_certificate;
    report["prefix"] = category_names(instance, result.prefix);
    report["tail"] = instance.categories()[result.extended_policy.tail];
    report["nodes_expanded"] = result.nodes_expanded;
    report["wall_time_ms"] = result.wall_time_ms;
  } else if (args.algorithm == "dp" || args.algorithm == "brute") {
    std::size_t horizon =
        args.horizon ? args.horizon : recapc::horizon_for_epsilon(instance, args.epsilon);
    recapc::HorizonSolve result = args.algorithm == "dp"
                                      ? recapc::solve_dp(instance, horizon)
                                      : recapc::solve_bruteforce(instance, horizon);
    std::cout << "horizon: " << horizon << "\n";
    std::cout << "value: " << fmt(result.value) << "\n";
    std::cout << "prefix:";
    for (std::size_t k : result.prefix) std::cout << ' ' << instance.categories()[k];
    std::cout << "\n";
    report["horizon"] = horizon;
    report["value"] = result.value;
    report["prefix"] = category_names(instance, result.prefix);
  } else if (args.algorithm == "myopic") {
    std::vector<std::size_t> prefix = recapc::policy_myopic(instance, args.steps);
    recapc::PrefixEvaluation eval = recapc::prefix_bounds(instance, prefix);
    std::cout << "prefix:";
    for (std::size_t k : prefix) std::cout << ' ' << instance.categories()[k];
    std::cout << "\n";
    std::cout << "value_with_best_tail: " << fmt(eval.lower()) << "\n";
    report["prefix"] = category_names(instance, prefix);
    report["value_with_best_tail"] = eval.lower();
  } else {  // bfa
    std::size_t k = recapc::policy_bfa(instance);
    double value = recapc::value_fixed(instance, recapc::Belief(instance.prior()), k);
    std::cout << "category: " << instance.categories()[k] << "\n";
    std::cout << "value: " << fmt(value) << "\n";
    report["category"] = instance.categories()[k];
    report["value"] = value;
  }
  if (!args.out_path.empty()) write_text(args.out_path, report.dump(2) + "\n");
}

struct WalkArgs {
  std::string instance_path;
  std::string prefix;
  std::string out_path;
};

void cmd_walk(const WalkArgs& args) {
  Instance instance = recapc::load_instance_file(args.instance_path);
  std::vector<std::size_t> prefix = parse_categories(instance, args.prefix);
  recapc::BeliefWalk result = recapc::walk(instance, prefix);

  std::ostringstream csv;
  csv << "round,category,like_prob";
  for (const auto& name : instance.types()) csv << ",belief_" << name;
  csv << "\n";
  for (std::size_t t = 0; t < result.steps.size(); ++t) {
    const recapc::WalkStep& step = result.steps[t];
    const recapc::Belief& posterior =
        t + 1 < result.steps.size() ? result.steps[t + 1].belief : result.end_belief;
    csv << (t + 1) << ',' << instance.categories()[step.category] << ',' << fmt(step.reward);
    for (std::size_t m = 0; m < posterior.size(); ++m) csv << ',' << fmt(posterior[m]);
    csv << "\n";
  }
  write_text(args.out_path, csv.str());
}

struct AnalyzeArgs {
  std::string instance_path;
  double epsilon = 1e-6;
  std::size_t rounds = 30;
  std::size_t max_rounds = 500;
  std::size_t window = 50;
  bool lenient = false;
  std::string curve_path;
  std::string out_path;
};

void cmd_analyze(const AnalyzeArgs& args) {
  Instance instance = recapc::load_instance_file(args.instance_path);
  recapc::InstanceConstants constants = recapc::compute_constants(instance);
  std::cout << "p_max: " << fmt(constants.p_max) << "\n";
  std::cout << "c1: " << fmt(constants.c1) << "\nc2: " << fmt(constants.c2) << "\nc3: "
            << fmt(constants.c3) << "\nc4: " << fmt(constants.c4) << "\n";
  std::cout << "c: " << fmt(constants.c) << "\n";
  std::cout << "delta_default: " << fmt(constants.delta_default) << "\n";

  recapc::ConvergenceOptions options;
  options.epsilon = args.epsilon;
  options.max_rounds = args.max_rounds;
  options.stability_window = args.window;
  options.require_convergence = !args.lenient;
  recapc::ConvergenceReport report = recapc::detect_convergence(instance, options);
  std::cout << "converged: " << (report.converged ? "yes" : "no") << "\n";
  std::cout << "fixation_round: " << report.fixation_round << "\n";
  std::cout << "final_category: " << instance.categories()[report.final_category] << "\n";
  std::cout << "final_type: " << instance.types()[report.final_type] << "\n";
  std::cout << "rounds_run: " << report.rounds_run << "\n";
  if (report.theory_available) {
    std::cout << "unconcentrated_count: " << report.unconcentrated_count << "\n";
    std::cout << "theoretical_bound: " << fmt(report.theoretical_bound) << "\n";
  } else {
    std::cout << "unconcentrated_count: (c = 0, not applicable)\n";
    std::cout << "theoretical_bound: (c = 0, not applicable)\n";
  }

  if (!args.curve_path.empty()) {
    recapc::UncertaintyCurve curve = recapc::uncertainty_curve(instance, args.epsilon, args.rounds);
    std::ofstream out(args.curve_path);
    if (!out) throw recapc::ParseError("cannot open output file: " + args.curve_path);
    recapc::write_uncertainty_csv(curve, instance, out);
  }
  if (!args.out_path.empty()) {
    nlohmann::ordered_json doc;
    doc["p_max"] = constants.p_max;
    doc["c1"] = constants.c1;
    doc["c2"] = constants.c2;
    doc["c3"] = constants.c3;
    doc["c4"] = constants.c4;
    doc["c"] = constants.c;
    doc["delta_default"] = constants.delta_default;
    doc["converged"] = report.converged;
    doc["fixation_round"] = report.fixation_round;
    doc["final_category"] = instance.categories()[report.final_category];
    doc["final_type"] = instance.types()[report.final_type];
    doc["rounds_run"] = report.rounds_run;
    doc["theory_available"] = report.theory_available;
    if (report.theory_available) {
      doc["unconcentrated_count"] = report.unconcentrated_count;
      doc["theoretical_bound"] = report.theoretical_bound;
    }
    write_text(args.out_path, doc.dump(2) + "\n");
  }
}

struct SimulateArgs {
  std::string instance_path;
  std::string prefix;
  std::string tail;
  std::uint64_t sessions = 0;
  std::uint64_t seed = 0;
  std::string per_session_path;
  std::string out_path;
};

void cmd_simulate(const SimulateArgs& args) {
  Instance instance = recapc::load_instance_file(args.instance_path);
  recapc::Policy policy;
  if (!args.prefix.empty()) policy.prefix = parse_categories(instance, args.prefix);
  policy.tail = instance.category_index(args.tail);

  std::unique_ptr<std::ofstream> per_session;
  std::function<void(std::uint64_t, const recapc::SessionOutcome&)> sink;
  if (!args.per_session_path.empty()) {
    per_session = std::make_unique<std::ofstream>(args.per_session_path);
    if (!*per_session)
      throw recapc::ParseError("cannot open output file: " + args.per_session_path);
    *per_session << "session,sampled_type,likes\n";
    sink = [&instance, &per_session](std::uint64_t i, const recapc::SessionOutcome& outcome) {
      *per_session << i << ',' << instance.types()[outcome.sampled_type] << ',' << outcome.likes
                   << "\n";
    };
  }

  recapc::SimulationSummary summary =
      recapc::simulate_many(instance, policy, args.sessions, args.seed, sink);
  std::cout << "sessions: " << summary.sessions << "\n";
  std::cout << "mean_likes: " << fmt(summary.mean_likes) << "\n";
  std::cout << "std_error: " << fmt(summary.std_error) << "\n";
  std::cout << "ci95: [" << fmt(summary.ci95_low) << ", " << fmt(summary.ci95_high) << "]\n";
  if (!args.out_path.empty()) {
    nlohmann::ordered_json doc;
    doc["sessions"] = summary.sessions;
    doc["mean_likes"] = summary.mean_likes;
    doc["std_error"] = summary.std_error;
    doc["ci95_low"] = summary.ci95_low;
    doc["ci95_high"] = summary.ci95_high;
    write_text(args.out_path, doc.dump(2) + "\n");
  }
}

struct GenArgs {
  std::size_t categories = 0;
  std::size_t types = 0;
  double clip = 0.01;
  double prior_std = 0.5;
  std::uint64_t seed = 0;
  std::string out_path;
};

void cmd_gen(const GenArgs& args) {
  recapc::GeneratorConfig config;
  config.n_categories = args.categories;
  config.n_types = args.types;
  config.clip_threshold = args.clip;
  config.prior_logit_std = args.prior_std;
  config.seed = args.seed;
  Instance instance = recapc::generate_instance(config);
  write_text(args.out_path, recapc::instance_to_json(instance));
}

struct IngestArgs {
  std::string ratings_path;
  double rating_max = 5.0;
  std::string mode = "kmeans";
  std::size_t user_clusters = 0;
  std::size_t item_clusters = 0;
  std::string user_assignments;
  std::string item_assignments;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 100;
  std::string out_path;
};

void cmd_ingest(const IngestArgs& args) {
  recapc::RatingsTable table = recapc::load_ratings_csv_file(args.ratings_path, args.rating_max);
  recapc::IngestOptions options;
  options.noise_std = args.noise_std;
  options.seed = args.seed;
  options.max_iterations = args.max_iterations;
  if (args.mode == "external") {
    options.mode = recapc::IngestMode::ExternalAssignments;
    if (args.user_assignments.empty() || args.item_assignments.empty())
      throw recapc::ValidationError(
          "external mode needs --user-assignments and --item-assignments");
    options.user_assignments = recapc::load_assignments_csv_file(args.user_assignments);
    options.item_assignments = recapc::load_assignments_csv_file(args.item_assignments);
  } else {
    options.mode = recapc::IngestMode::AlternatingKMeans;
    options.n_user_clusters = args.user_clusters;
    options.n_item_clusters = args.item_clusters;
  }
  recapc::IngestResult result = recapc::ingest_ratings(table, options);
  std::cerr << "imputed_cells: " << result.imputed_cells << " (fill value "
            << fmt(result.impute_value) << ")\n";
  if (!result.objective.empty()) {
    std::cerr << "kmeans_iterations: " << result.objective.size() << "\n";
    std::cerr << "kmeans_objective: " << fmt(result.objective.back()) << "\n";
    std::cerr << "kmeans_reseeds: " << result.reseed_events << "\n";
  }
  write_text(args.out_path, recapc::instance_to_json(result.instance));
}

struct ExportArgs {
  std::string instance_path;
  std::string out_path;
};

void cmd_export_pomdp(const ExportArgs& args) {
  Instance instance = recapc::load_instance_file(args.instance_path);
  recapc::PomdpModel model = recapc::build_pomdp(instance);
  std::ostringstream text;
  recapc::write_pomdp(model, text);
  write_text(args.out_path, text.str());
}

struct BenchArgs {
  std::string sizes = "2x3,4x3,6x3,8x3";
  std::size_t reps = 50;
  double epsilon = 1e-6;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  double clip = 0.01;
  std::string out_path;
};

void cmd_bench(const BenchArgs& args) {
  recapc::BenchConfig config;
  config.reps = args.reps;
  config.epsilon = args.epsilon;
  config.bootstrap_resamples = args.resamples;
  config.seed = args.seed;
  config.clip_threshold = args.clip;

  std::stringstream ss(args.sizes);
  std::string token;
  while (std::getline(ss, token, ',')) {
    auto x = token.find('x');
    if (x == std::string::npos)
      throw recapc::ValidationError("bench size must look like CATEGORIESxTYPES: " + token);
    recapc::BenchSize size;
    try {
      size.n_categories = std::stoul(token.substr(0, x));
      size.n_types = std::stoul(token.substr(x + 1));
    } catch (const std::exception&) {
      throw recapc::ValidationError("bench size must look like CATEGORIESxTYPES: " + token);
    }
    config.sizes.push_back(size);
  }

  std::vector<recapc::BenchRow> rows = recapc::bench_run(config);
  std::ostringstream csv;
  recapc::write_bench_csv(rows, csv);
  write_text(args.out_path, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Churn-aware recommendation planning toolkit"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Plan an epsilon-optimal recommendation policy");
  solve->add_option("--instance", solve_args.instance_path, "Instance JSON file")->required();
  solve->add_option("--epsilon", solve_args.epsilon, "Optimality slack");
  solve->add_option("--algorithm", solve_args.algorithm, "Planner")
      ->check(CLI::IsMember({"bnb", "dp", "brute", "myopic", "bfa"}));
  solve->add_option("--queue", solve_args.queue, "Search order for bnb")
      ->check(CLI::IsMember({"best-first", "fifo"}));
  solve->add_option("--horizon", solve_args.horizon, "Horizon for dp/brute (default: from epsilon)");
  solve->add_option("--steps", solve_args.steps, "Steps for myopic");
  solve->add_option("--node-budget", solve_args.node_budget, "Node cap for bnb (0: unlimited)");
  solve->add_option("--out", solve_args.out_path, "Write a JSON report here");
  solve->callback([&] { cmd_solve(solve_args); });

  WalkArgs walk_args;
  auto* walk = app.add_subcommand("walk", "Belief trajectory of a recommendation prefix");
  walk->add_option("--instance", walk_args.instance_path, "Instance JSON file")->required();
  walk->add_option("--prefix", walk_args.prefix, "Comma-separated category names")->required();
  walk->add_option("--out", walk_args.out_path, "CSV output file (default: stdout)");
  walk->callback([&] { cmd_walk(walk_args); });

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Separation constants and convergence report");
  analyze->add_option("--instance", analyze_args.instance_path, "Instance JSON file")->required();
  analyze->add_option("--epsilon", analyze_args.epsilon, "Optimality slack for the replayed policy");
  analyze->add_option("--rounds", analyze_args.rounds, "Uncertainty curve length");
  analyze->add_option("--max-rounds", analyze_args.max_rounds, "Convergence round budget");
  analyze->add_option("--window", analyze_args.window, "Stability window (rounds)");
  analyze->add_flag("--lenient", analyze_args.lenient,
                    "Report converged=no instead of failing when the budget runs out");
  analyze->add_option("--curve-out", analyze_args.curve_path, "Write the uncertainty curve CSV here");
  analyze->add_option("--out", analyze_args.out_path, "Write a JSON report here");
  analyze->callback([&] { cmd_analyze(analyze_args); });

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo sessions under a fixed policy");
  simulate->add_option("--instance", simulate_args.instance_path, "Instance JSON file")->required();
  simulate->add_option("--prefix", simulate_args.prefix, "Comma-separated category names");
  simulate->add_option("--tail", simulate_args.tail, "Category repeated after the prefix")
      ->required();
  simulate->add_option("--sessions", simulate_args.sessions, "Number of sessions")->required();
  simulate->add_option("--seed", simulate_args.seed, "Base seed");
  simulate->add_option("--per-session", simulate_args.per_session_path,
                       "Write per-session CSV here");
  simulate->add_option("--out", simulate_args.out_path, "Write a JSON summary here");
  simulate->callback([&] { cmd_simulate(simulate_args); });

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Sample a random instance");
  gen->add_option("--categories", gen_args.categories, "Number of categories")->required();
  gen->add_option("--types", gen_args.types, "Number of user types")->required();
  gen->add_option("--clip", gen_args.clip, "Probability clip threshold");
  gen->add_option("--prior-std", gen_args.prior_std, "Prior logit std-dev");
  gen->add_option("--seed", gen_args.seed, "Seed");
  gen->add_option("--out", gen_args.out_path, "Output file (default: stdout)");
  gen->callback([&] { cmd_gen(gen_args); });

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Aggregate a ratings table into an instance");
  ingest->add_option("--ratings", ingest_args.ratings_path, "Ratings CSV")->required();
  ingest->add_option("--rating-max", ingest_args.rating_max, "Rating scale maximum");
  ingest->add_option("--mode", ingest_args.mode, "Clustering mode")
      ->check(CLI::IsMember({"kmeans", "external"}));
  ingest->add_option("--user-clusters", ingest_args.user_clusters, "User clusters (kmeans)");
  ingest->add_option("--item-clusters", ingest_args.item_clusters, "Item clusters (kmeans)");
  ingest->add_option("--user-assignments", ingest_args.user_assignments,
                     "id,cluster CSV (external)");
  ingest->add_option("--item-assignments", ingest_args.item_assignments,
                     "id,cluster CSV (external)");
  ingest->add_option("--noise-std", ingest_args.noise_std, "Gaussian noise on probabilities");
  ingest->add_option("--seed", ingest_args.seed, "Seed");
  ingest->add_option("--max-iterations", ingest_args.max_iterations, "k-means iteration cap");
  ingest->add_option("--out", ingest_args.out_path, "Output file (default: stdout)");
  ingest->callback([&] { cmd_ingest(ingest_args); });

  ExportArgs export_args;
  auto* export_cmd = app.add_subcommand("export-pomdp", "Write the equivalent discounted POMDP");
  export_cmd->add_option("--instance", export_args.instance_path, "Instance JSON file")->required();
  export_cmd->add_option("--out", export_args.out_path, "Output file (default: stdout)");
  export_cmd->callback([&] { cmd_export_pomdp(export_args); });

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Time the planner across instance sizes");
  bench->add_option("--sizes", bench_args.sizes, "Comma-separated CATEGORIESxTYPES list");
  bench->add_option("--reps", bench_args.reps, "Instances per size");
  bench->add_option("--epsilon", bench_args.epsilon, "Optimality slack");
  bench->add_option("--resamples", bench_args.resamples, "Bootstrap resamples");
  bench->add_option("--seed", bench_args.seed, "Seed");
  bench->add_option("--clip", bench_args.clip, "Generator clip threshold");
  bench->add_option("--out", bench_args.out_path, "CSV output file (default: stdout)");
  bench->callback([&] { cmd_bench(bench_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const recapc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
