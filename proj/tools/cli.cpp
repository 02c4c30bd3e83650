#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gencd/gencd.hpp"

namespace gencd::cli {
namespace {

struct DataFlags {
  std::string path;
  std::optional<Index> n_features;
  std::optional<double> label_threshold;
  bool no_normalize = false;

  void add_to(CLI::App& app) {
    app.add_option("--data", path, "LibSVM input file")->required();
    app.add_option("--n-features", n_features,
                   "Declared feature count (default: largest index seen)");
    app.add_option("--label-threshold", label_threshold,
                   "Map raw labels >= threshold to +1 and the rest to -1");
  }

  Dataset load() const {
    LibsvmOptions opts;
    opts.n_features = n_features;
    if (label_threshold) opts.label_rule = LabelRule::at_least(*label_threshold);
    Dataset data = load_libsvm(path, opts);
    if (!no_normalize) data.x = normalize_columns(data.x).first;
    return data;
  }
};

struct SolveFlags {
  DataFlags data;
  std::string loss = "logistic";
  double lambda = 1e-4;
  std::string algorithm = "thread-greedy";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t seed = 42;
  std::uint64_t max_iters = 0;
  double time_limit = 0.0;
  double tol = 1e-8;
  int refine_steps = 500;
  double refine_tol = 1e-12;
  Index shotgun_p = 0;
  std::string thread_greedy_select = "all";
  std::string color_select = "uniform";
  bool balanced = false;
  double trace_every_secs = 0.1;
  std::uint64_t trace_every_iters = 0;
  bool no_timestamps = false;
  std::string trace_path;
  std::string summary_path;
  std::string weights_path;
};

void write_weights(const std::string& path, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& scale) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write weights '" + path + "'");
  out << std::setprecision(17);
  for (Index j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) out << j + 1 << ' ' << w[j] / scale[j] << '\n';
  }
}

int solve(const SolveFlags& f, std::ostream& out) {
  LibsvmOptions opts;
  opts.n_features = f.data.n_features;
  if (f.data.label_threshold) opts.label_rule = LabelRule::at_least(*f.data.label_threshold);
  Dataset data = load_libsvm(f.data.path, opts);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(data.n_features());
  if (!f.data.no_normalize) std::tie(data.x, scale) = normalize_columns(data.x);

  RunConfig cfg;
  cfg.objective = {LossSpec::of(parse_loss_kind(f.loss)), f.lambda};
  cfg.strategy.kind = parse_strategy_kind(f.algorithm);
  cfg.strategy.threads = f.threads;
  cfg.strategy.rng_seed = f.seed;
  cfg.strategy.shotgun_p = f.shotgun_p;
  cfg.strategy.thread_greedy_select = f.thread_greedy_select == "random"
                                          ? ThreadGreedySelect::random_subset
                                          : ThreadGreedySelect::all;
  cfg.strategy.color_select =
      f.color_select == "weighted" ? ColorSelect::size_weighted : ColorSelect::uniform_color;
  cfg.max_iterations = f.max_iters;
  cfg.time_limit = f.time_limit;
  cfg.convergence_tol = f.tol;
  cfg.refine = {f.refine_steps, f.refine_tol};
  cfg.trace_every_seconds = f.trace_every_secs;
  cfg.trace_every_iterations = f.trace_every_iters;
  cfg.coloring_order = f.balanced ? ColoringOrder::balanced : ColoringOrder::first_fit;

  std::optional<FeatureColoring> coloring;
  if (cfg.strategy.kind == StrategyKind::coloring) {
    coloring = color_features(data.x, cfg.coloring_order);
  }
  if (cfg.strategy.kind == StrategyKind::shotgun && cfg.strategy.shotgun_p == 0) {
    const SpectralEstimate est = power_iteration(data.x);
    cfg.strategy.shotgun_p = est.p_star;
    out << "shotgun subset size P* = " << est.p_star << " (rho = " << est.rho << ")\n";
  }

  RunResult result = run(data, cfg, coloring ? &*coloring : nullptr);
  if (f.no_timestamps) {
    for (auto& r : result.trace) r.wall_time = 0.0;
  }
  const TraceRecord& last = result.trace.back();

  if (!f.trace_path.empty()) write_trace(f.trace_path, result.trace);
  if (!f.weights_path.empty()) write_weights(f.weights_path, result.state.w, scale);
  if (!f.summary_path.empty()) {
    const nlohmann::json summary = {
        {"objective", last.objective},
        {"nnz", last.nnz},
        {"updates", result.updates},
        {"wall_time_s", result.wall_time},
        {"algorithm", std::string(to_string(cfg.strategy.kind))},
        {"lambda", cfg.objective.lambda},
        {"threads", cfg.strategy.threads},
        {"converged", result.converged()},
    };
    std::ofstream s(f.summary_path);
    if (!s) throw IoError("cannot write summary '" + f.summary_path + "'");
    s << summary.dump(2) << '\n';
  }

  char line[256];
  std::snprintf(line, sizeof line,
                "objective %.9f  nnz %lld  updates %llu  iterations %llu  "
                "updates/s %.1f  elapsed %.3f s  %s\n",
                last.objective, static_cast<long long>(last.nnz),
                static_cast<unsigned long long>(result.updates),
                static_cast<unsigned long long>(result.iterations), result.updates_per_second(),
                result.wall_time, result.converged() ? "converged" : "not converged");
  out << line;
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel coordinate descent for l1-regularized loss minimization", "gencd"};
  app.require_subcommand(1);

  SolveFlags sf;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Fit a model and write trace/summary");
  sf.data.add_to(*solve_cmd);
  solve_cmd->add_flag("--no-normalize", sf.data.no_normalize,
                      "Keep raw column scales (default: unit Euclidean norm)");
  solve_cmd->add_option("--loss", sf.loss, "logistic or squared")
      ->check(CLI::IsMember({"logistic", "squared"}))
      ->capture_default_str();
  solve_cmd->add_option("--lambda", sf.lambda, "l1 regularization weight")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd
      ->add_option("--algorithm", sf.algorithm,
                   "cyclic, stochastic, shotgun, greedy, thread-greedy or coloring")
      ->check(CLI::IsMember(
          {"cyclic", "stochastic", "shotgun", "greedy", "thread-greedy", "coloring"}))
      ->capture_default_str();
  solve_cmd->add_option("--threads", sf.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_cmd->add_option("--seed", sf.seed, "RNG seed")->capture_default_str();
  solve_cmd->add_option("--max-iters", sf.max_iters, "Iteration cap (0 = none)")
      ->capture_default_str();
  solve_cmd->add_option("--time-limit", sf.time_limit, "Wall-clock limit in seconds (0 = none)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd
      ->add_option("--tol", sf.tol,
                   "Stop when the relative objective change per sweep drops below this "
                   "(0 = off)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd->add_option("--refine-steps", sf.refine_steps,
                        "Extra quadratic-bound steps per accepted update")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd->add_option("--refine-tol", sf.refine_tol, "Early exit for refinement steps")
      ->capture_default_str();
  solve_cmd->add_option("--shotgun-p", sf.shotgun_p,
                        "Subset size for shotgun / random thread-greedy (0 = P* estimate)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd->add_option("--thread-greedy-select", sf.thread_greedy_select,
                        "all or random coordinates per thread-greedy iteration")
      ->check(CLI::IsMember({"all", "random"}))
      ->capture_default_str();
  solve_cmd->add_option("--color-select", sf.color_select,
                        "uniform color or size-weighted (random feature's color)")
      ->check(CLI::IsMember({"uniform", "weighted"}))
      ->capture_default_str();
  solve_cmd->add_flag("--balanced", sf.balanced, "Balanced coloring heuristic");
  solve_cmd->add_option("--trace-every-secs", sf.trace_every_secs, "Trace sampling period")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve_cmd->add_option("--trace-every-iters", sf.trace_every_iters,
                        "Sample the trace every N iterations instead of by time")
      ->capture_default_str();
  solve_cmd->add_flag("--no-timestamps", sf.no_timestamps,
                      "Write 0 for wall_time_s so traces are comparable byte for byte");
  solve_cmd->add_option("--trace", sf.trace_path, "Trace CSV output path");
  solve_cmd->add_option("--summary", sf.summary_path, "Summary JSON output path");
  solve_cmd->add_option("--weights", sf.weights_path,
                        "Nonzero weights (1-based index, original column scale)");

  DataFlags color_data;
  bool color_balanced = false;
  bool color_csv = false;
  CLI::App* color_cmd = app.add_subcommand("color-stats", "Color the features and summarize");
  color_data.add_to(*color_cmd);
  color_cmd->add_flag("--balanced", color_balanced, "Balanced coloring heuristic");
  color_cmd->add_flag("--csv", color_csv, "CSV output");

  DataFlags spec_data;
  PowerIterationOptions spec_opts;
  CLI::App* spectral_cmd =
      app.add_subcommand("spectral", "Estimate rho(X^T X) and the shotgun bound P*");
  spec_data.add_to(*spectral_cmd);
  spectral_cmd->add_flag("--no-normalize", spec_data.no_normalize, "Keep raw column scales");
  spectral_cmd->add_option("--max-iters", spec_opts.max_iters, "Power iteration cap")
      ->capture_default_str();
  spectral_cmd->add_option("--tol", spec_opts.tol, "Relative eigenvalue tolerance")
      ->capture_default_str();
  spectral_cmd->add_option("--seed", spec_opts.seed, "Start vector seed")->capture_default_str();

  std::string conv_in, conv_out, conv_topics, conv_topic = "CCAT";
  std::optional<Index> conv_features;
  std::optional<double> conv_threshold;
  CLI::App* convert_cmd = app.add_subcommand(
      "convert", "Relabel a LibSVM file to +-1 by topic membership or threshold");
  convert_cmd->add_option("--data", conv_in, "Input LibSVM (labels are document ids with --topics)")
      ->required();
  convert_cmd->add_option("--out", conv_out, "Output LibSVM path")->required();
  auto* topics_opt =
      convert_cmd->add_option("--topics", conv_topics, "Topic file: 'TOPIC docid 1' per line");
  convert_cmd->add_option("--topic", conv_topic, "Topic mapped to +1")->capture_default_str();
  auto* thresh_opt = convert_cmd->add_option("--label-threshold", conv_threshold,
                                             "Map raw labels >= threshold to +1");
  topics_opt->excludes(thresh_opt);
  convert_cmd->add_option("--n-features", conv_features, "Declared feature count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*solve_cmd) return solve(sf, out);

    if (*color_cmd) {
      const Dataset data = color_data.load();
      const auto t0 = std::chrono::steady_clock::now();
      const FeatureColoring c = color_features(
          data.x, color_balanced ? ColoringOrder::balanced : ColoringOrder::first_fit);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const ColoringStats s = coloring_stats(c);
      if (color_csv) {
        out << "num_colors,mean_class_size,min_class_size,max_class_size,seconds\n";
        out << s.num_colors << ',' << s.mean_class_size << ',' << s.min_class_size << ','
            << s.max_class_size << ',' << secs << '\n';
      } else {
        out << "colors " << s.num_colors << "\nmean features/color " << s.mean_class_size
            << "\nmin " << s.min_class_size << "\nmax " << s.max_class_size << "\ntime "
            << secs << " s\n";
      }
      return kOk;
    }

    if (*spectral_cmd) {
      const Dataset data = spec_data.load();
      const SpectralEstimate est = power_iteration(data.x, spec_opts);
      out << std::setprecision(10) << "rho " << est.rho << "\np_star " << est.p_star
          << "\niterations " << est.iterations_used << "\nconverged "
          << (est.converged ? "true" : "false") << '\n';
      return kOk;
    }

    if (*convert_cmd) {
      LibsvmOptions opts;
      opts.n_features = conv_features;
      if (conv_threshold) opts.label_rule = LabelRule::at_least(*conv_threshold);
      Dataset data = load_libsvm(conv_in, opts);
      if (!conv_topics.empty()) {
        std::ifstream in(conv_topics);
        if (!in) throw IoError("cannot open '" + conv_topics + "'");
        const auto members = read_topic_members(in, conv_topic);
        for (Index i = 0; i < data.y.size(); ++i) {
          data.y[i] = members.count(static_cast<long long>(data.y[i])) ? 1.0 : -1.0;
        }
      }
      save_libsvm(conv_out, data);
      out << "wrote " << data.n_samples() << " samples, " << data.n_features()
          << " features to " << conv_out << '\n';
      return kOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kParseError;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace gencd::cli
