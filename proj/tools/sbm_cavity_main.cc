// Copyright 2026 The SBM Cavity Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point. Every subcommand that draws random numbers needs
// an explicit --seed, and every file it writes gets a `.manifest` sibling
// recording the command line, input digests and timing.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbm_cavity/belief_propagation.h"
#include "sbm_cavity/block_model.h"
#include "sbm_cavity/em_learner.h"
#include "sbm_cavity/error.h"
#include "sbm_cavity/exact_oracle.h"
#include "sbm_cavity/experiments.h"
#include "sbm_cavity/graph_io.h"
#include "sbm_cavity/key_value.h"
#include "sbm_cavity/overlap.h"
#include "sbm_cavity/random.h"

namespace sbm_cavity {
namespace {

uint64_t Fnv1a(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

bool EndsWith(const std::string& text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Records inputs and outputs of one invocation; written next to every output.
class RunManifest {
 public:
  RunManifest(int argc, char** argv)
      : start_(std::chrono::steady_clock::now()) {
    for (int i = 0; i < argc; ++i) {
      if (i > 0) command_ += ' ';
      command_ += argv[i];
    }
  }

  std::string Input(const std::string& path) {
    std::string content = ReadFile(path);
    char digest[17];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(Fnv1a(content)));
    inputs_.push_back(path + " fnv1a64=" + digest);
    return content;
  }

  void Set(const std::string& key, const std::string& value) {
    extra_.push_back(key + " = " + value);
  }

  void Output(const std::string& path, std::string_view content) {
    WriteFile(path, content);
    outputs_.push_back(path);
  }

  // For outputs streamed to disk by the caller.
  void Record(const std::string& path) { outputs_.push_back(path); }

  // Writes `<path>.manifest` for every output recorded so far.
  void Finish() const {
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    std::ostringstream out;
    out << "version = " << SBM_CAVITY_VERSION << '\n';
    out << "command = " << command_ << '\n';
    for (const auto& input : inputs_) out << "input = " << input << '\n';
    for (const auto& line : extra_) out << line << '\n';
    out << "started_unix = " << std::time(nullptr) << '\n';
    out << "elapsed_seconds = " << elapsed << '\n';
    for (const auto& path : outputs_) WriteFile(path + ".manifest", out.str());
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::string command_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<std::string> extra_;
};

struct LoadedGraph {
  Graph graph;
  LabelVector labels;  // from GML values, may be empty
};

LoadedGraph LoadGraph(RunManifest& manifest, const std::string& path) {
  const std::string text = manifest.Input(path);
  LoadedGraph loaded;
  int64_t self_loops = 0, duplicates = 0;
  if (EndsWith(path, ".gml")) {
    auto parsed = ParseGml(text);
    loaded.graph = std::move(parsed.graph);
    loaded.labels = std::move(parsed.labels);
    self_loops = parsed.self_loops;
    duplicates = parsed.duplicates;
  } else {
    auto parsed = ParseEdgeList(text);
    loaded.graph = std::move(parsed.graph);
    self_loops = parsed.self_loops;
    duplicates = parsed.duplicates;
  }
  if (self_loops > 0 || duplicates > 0) {
    std::cerr << "warning: dropped " << self_loops << " self-loops and "
              << duplicates << " duplicate edges from " << path << '\n';
  }
  return loaded;
}

int ThreadCount(int requested) {
  if (const char* env = std::getenv("SBM_CAVITY_THREADS")) {
    const int value = std::atoi(env);
    if (value >= 1) return value;
  }
  return requested;
}

void WriteMarginals(RunManifest& manifest, const std::string& path,
                    const std::vector<double>& marginals, int k) {
  std::ostringstream out;
  const size_t n = marginals.size() / k;
  for (size_t i = 0; i < n; ++i) {
    out << i;
    for (int a = 0; a < k; ++a) out << ' ' << FormatDouble(marginals[i * k + a]);
    out << '\n';
  }
  manifest.Output(path, out.str());
}

// Options shared by the subcommands that need block-model parameters.
struct ParamFlags {
  int k = 2;
  std::optional<double> c_in, c_out;
  std::string params_file;

  void Add(CLI::App* app) {
    app->add_option("--k", k, "number of groups")->required();
    app->add_option("--cin", c_in, "diagonal affinity");
    app->add_option("--cout", c_out, "off-diagonal affinity");
    app->add_option("--params-file", params_file, "key=value params (k, q, c)");
  }

  BlockModelParams Resolve(RunManifest& manifest) const {
    if (!params_file.empty()) {
      auto params = ParseParams(manifest.Input(params_file));
      if (params.k != k) {
        throw Error(ErrorKind::kUsage, "--k disagrees with the params file");
      }
      return params;
    }
    if (!c_in || !c_out) {
      throw Error(ErrorKind::kUsage, "give --cin and --cout or --params-file");
    }
    BlockModelParams params;
    params.k = k;
    params.q.assign(k, 1.0 / k);
    params.affinity.assign(static_cast<size_t>(k) * k, *c_out);
    for (int a = 0; a < k; ++a) params.c(a, a) = *c_in;
    params.Validate();
    return params;
  }
};

// Revealed labels: an explicit file, or a random fraction of the truth.
struct RevealFlags {
  std::string reveal_file;
  std::string truth_file;
  std::optional<double> alpha;

  void Add(CLI::App* app) {
    app->add_option("--reveal", reveal_file, "file of revealed `node label`");
    app->add_option("--alpha", alpha, "fraction of truth labels to reveal");
    app->add_option("--truth", truth_file,
                    "true labels (for --alpha and overlap)");
  }

  // Truth from --truth, else from GML values when complete.
  std::optional<LabelVector> Truth(RunManifest& manifest,
                                   const LoadedGraph& loaded, int k) const {
    if (!truth_file.empty()) {
      return ParseLabels(manifest.Input(truth_file),
                         loaded.graph.num_nodes(), k);
    }
    if (!loaded.labels.empty()) {
      for (Label label : loaded.labels) {
        if (label == kUnknownLabel) return std::nullopt;
      }
      return loaded.labels;
    }
    return std::nullopt;
  }

  SeedSet Resolve(RunManifest& manifest, const LoadedGraph& loaded, int k,
                  const std::optional<LabelVector>& truth,
                  uint64_t seed) const {
    if (!reveal_file.empty() && alpha) {
      throw Error(ErrorKind::kUsage, "--reveal and --alpha are exclusive");
    }
    if (!reveal_file.empty()) {
      return SeedSetFromLabels(ParseLabels(manifest.Input(reveal_file),
                                           loaded.graph.num_nodes(), k));
    }
    if (alpha) {
      if (!truth) {
        throw Error(ErrorKind::kUsage, "--alpha needs true labels");
      }
      if (!(*alpha >= 0.0 && *alpha <= 1.0)) {
        throw Error(ErrorKind::kUsage, "--alpha must lie in [0, 1]");
      }
      return RevealLabels(*truth, *alpha, DeriveSeed(seed, {0x5eed}));
    }
    return SeedSet{};
  }
};

void AddBPFlags(CLI::App* app, BPOptions& bp, std::string& init) {
  app->add_option("--init", init, "random | factorized | planted")
      ->capture_default_str();
  app->add_option("--tol", bp.tol, "convergence tolerance")
      ->capture_default_str();
  app->add_option("--max-sweeps", bp.max_sweeps, "sweep cap")
      ->capture_default_str();
  app->add_option("--damping", bp.damping, "damping in [0, 1)")
      ->capture_default_str();
  app->add_option("--perturbation", bp.perturbation,
                  "noise for factorized init")
      ->capture_default_str();
  app->add_option("--random-spread", bp.random_spread,
                  "weight of the uniform-simplex draw in random init")
      ->capture_default_str();
}

int RunGenerate(RunManifest& manifest, const std::string& model, int k,
                NodeId n, double c, std::optional<double> epsilon,
                bool disassortative, uint64_t seed, const std::string& out) {
  BlockModelParams params;
  if (model == "partition") {
    if (!epsilon) throw Error(ErrorKind::kUsage, "partition needs --epsilon");
    params = PlantedPartitionParams(k, c, *epsilon, disassortative);
  } else if (model == "coloring") {
    params = PlantedColoringParams(k, c);
  } else {
    throw Error(ErrorKind::kUsage, "--model must be partition or coloring");
  }
  const auto instance = SamplePlantedInstance(params, n, seed);
  if (EndsWith(out, ".gml")) {
    manifest.Output(out, WriteGml(instance.graph, instance.truth));
  } else {
    manifest.Output(out, WriteEdgeList(instance.graph));
    manifest.Output(out + ".labels", WriteLabels(instance.truth));
  }
  manifest.Output(out + ".params", FormatInstanceMetadata(instance));
  std::cout << "n=" << n << " m=" << instance.graph.num_edges()
            << " c=" << FormatDouble(params.average_degree()) << '\n';
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Belief propagation for semisupervised block-model inference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SBM_CAVITY_VERSION);
  RunManifest manifest(argc, argv);

  // generate
  auto* generate = app.add_subcommand("generate", "sample a planted instance");
  std::string gen_model = "partition", gen_out;
  int gen_k = 2;
  NodeId gen_n = 0;
  double gen_c = 0.0;
  std::optional<double> gen_epsilon;
  bool gen_disassortative = false;
  uint64_t gen_seed = 0;
  generate->add_option("--model", gen_model, "partition | coloring")
      ->capture_default_str();
  generate->add_option("--k", gen_k)->required();
  generate->add_option("--n", gen_n)->required();
  generate->add_option("--c", gen_c, "average degree")->required();
  generate->add_option("--epsilon", gen_epsilon, "c_out / c_in");
  generate->add_flag("--disassortative", gen_disassortative,
                     "allow epsilon > 1");
  generate->add_option("--seed", gen_seed)->required();
  generate->add_option("--out", gen_out,
                       "edge list path (.gml writes GML with labels)")
      ->required();

  // infer
  auto* infer = app.add_subcommand("infer", "run BP on a graph");
  std::string infer_graph, infer_init = "random", infer_marginals,
                           infer_labels;
  ParamFlags infer_params;
  RevealFlags infer_reveal;
  BPOptions infer_bp;
  uint64_t infer_seed = 0;
  infer->add_option("--graph", infer_graph, "edge list or .gml")->required();
  infer_params.Add(infer);
  infer_reveal.Add(infer);
  AddBPFlags(infer, infer_bp, infer_init);
  infer->add_option("--seed", infer_seed)->required();
  infer->add_option("--out-marginals", infer_marginals);
  infer->add_option("--out-labels", infer_labels);

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "exact marginals by enumeration (n <= 16)");
  std::string oracle_graph, oracle_out;
  ParamFlags oracle_params;
  RevealFlags oracle_reveal;
  std::vector<double> oracle_field;
  oracle->add_option("--graph", oracle_graph)->required();
  oracle_params.Add(oracle);
  oracle->add_option("--reveal", oracle_reveal.reveal_file);
  oracle->add_option("--field", oracle_field,
                     "h_0 .. h_{k-1}; default: field of the factorized state");
  oracle->add_option("--out-marginals", oracle_out);

  // learn
  auto* learn = app.add_subcommand("learn", "EM parameter learning");
  std::string learn_graph, learn_init = "random", learn_prefix;
  int learn_k = 2, learn_restarts = 5, learn_threads = 1;
  RevealFlags learn_reveal;
  EMOptions learn_em;
  uint64_t learn_seed = 0;
  learn->add_option("--graph", learn_graph)->required();
  learn->add_option("--k", learn_k)->required();
  learn_reveal.Add(learn);
  learn->add_option("--restarts", learn_restarts)->capture_default_str();
  learn->add_option("--em-iters", learn_em.max_em_iters)->capture_default_str();
  learn->add_option("--param-tol", learn_em.param_tol)->capture_default_str();
  learn->add_flag("--hold-q", learn_em.hold_q, "keep q fixed");
  AddBPFlags(learn, learn_em.bp, learn_init);
  learn->add_option("--threads", learn_threads)->capture_default_str();
  learn->add_option("--seed", learn_seed)->required();
  learn->add_option("--out-prefix", learn_prefix, "output path prefix")
      ->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "phase-diagram sweep");
  std::string sweep_config, sweep_out;
  std::optional<int> sweep_threads;
  sweep->add_option("--config", sweep_config, "key=value sweep document")
      ->required();
  sweep->add_option("--out", sweep_out, "CSV path")->required();
  sweep->add_option("--threads", sweep_threads, "overrides the config");

  // transitions
  auto* transitions = app.add_subcommand(
      "transitions", "detect transition lines in a sweep CSV");
  std::string trans_in, trans_out;
  int trans_k = 0;
  TransitionThresholds trans_thresholds;
  transitions->add_option("--in", trans_in)->required();
  transitions->add_option("--k", trans_k)->required();
  transitions->add_option("--delta", trans_thresholds.delta)
      ->capture_default_str();
  transitions->add_option("--out", trans_out)->required();

  // real-exp
  auto* real = app.add_subcommand("real-exp", "experiment on a real network");
  std::string real_graph, real_truth, real_mode = "given_params", real_out,
                                      real_init = "random";
  RealExperimentSpec real_spec;
  std::string real_alpha = "0:0.5:0.1";
  int real_threads = 1;
  real->add_option("--graph", real_graph, "edge list or .gml")->required();
  real->add_option("--truth", real_truth, "labels (default: GML values)");
  real->add_option("--k", real_spec.k)->required();
  real->add_option("--alpha-grid", real_alpha, "list or start:stop:step")
      ->capture_default_str();
  real->add_option("--mode", real_mode, "given_params | em")
      ->capture_default_str();
  real->add_option("--restarts", real_spec.restarts)->capture_default_str();
  real->add_option("--em-iters", real_spec.em.max_em_iters)
      ->capture_default_str();
  real->add_option("--name", real_spec.network, "network column value");
  AddBPFlags(real, real_spec.bp, real_init);
  real->add_option("--threads", real_threads)->capture_default_str();
  real->add_option("--seed", real_spec.seed)->required();
  real->add_option("--out", real_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCodeFor(ErrorKind::kUsage);
  }

  if (generate->parsed()) {
    const int code = RunGenerate(manifest, gen_model, gen_k, gen_n, gen_c,
                                 gen_epsilon, gen_disassortative, gen_seed,
                                 gen_out);
    manifest.Set("seed", std::to_string(gen_seed));
    manifest.Finish();
    return code;
  }

  if (infer->parsed()) {
    const auto loaded = LoadGraph(manifest, infer_graph);
    const auto params = infer_params.Resolve(manifest);
    const auto truth =
        infer_reveal.Truth(manifest, loaded, infer_params.k);
    const auto seeds =
        infer_reveal.Resolve(manifest, loaded, params.k, truth, infer_seed);
    infer_bp.init = ParseInitMode(infer_init);
    infer_bp.seed = infer_seed;
    const auto result = RunBP(loaded.graph, params, seeds, infer_bp,
                              truth ? &*truth : nullptr);
    std::cout << "converged=" << (result.converged ? "true" : "false")
              << " sweeps=" << result.sweeps_used
              << " free_energy=" << FormatDouble(result.bethe_free_energy)
              << " overlap=";
    if (truth) {
      std::cout << FormatDouble(Overlap(result.predicted, *truth, params.k,
                                        DefaultOverlapMode(seeds)));
    } else {
      std::cout << "nan";
    }
    std::cout << '\n';
    if (!infer_marginals.empty()) {
      WriteMarginals(manifest, infer_marginals, result.state.marginals,
                     params.k);
    }
    if (!infer_labels.empty()) {
      manifest.Output(infer_labels, WriteLabels(result.predicted));
    }
    manifest.Set("seed", std::to_string(infer_seed));
    manifest.Finish();
    return 0;
  }

  if (oracle->parsed()) {
    const auto loaded = LoadGraph(manifest, oracle_graph);
    const auto params = oracle_params.Resolve(manifest);
    const auto seeds =
        oracle_reveal.Resolve(manifest, loaded, params.k, std::nullopt, 0);
    std::vector<double> field = oracle_field;
    if (field.empty()) {
      field = FactorizedState(loaded.graph, params, seeds).field;
    } else if (static_cast<int>(field.size()) != params.k) {
      throw Error(ErrorKind::kUsage, "--field needs k values");
    }
    const auto result = ExactInference(loaded.graph, params, seeds, field);
    std::cout << "log_partition=" << FormatDouble(result.log_partition)
              << '\n';
    if (!oracle_out.empty()) {
      WriteMarginals(manifest, oracle_out, result.marginals, params.k);
    }
    manifest.Finish();
    return 0;
  }

  if (learn->parsed()) {
    const auto loaded = LoadGraph(manifest, learn_graph);
    const auto truth = learn_reveal.Truth(manifest, loaded, learn_k);
    const auto seeds =
        learn_reveal.Resolve(manifest, loaded, learn_k, truth, learn_seed);
    learn_em.bp.init = ParseInitMode(learn_init);
    learn_em.threads = ThreadCount(learn_threads);
    const auto multi =
        EMMultiStart(loaded.graph, seeds, learn_k, learn_restarts, learn_seed,
                     learn_em, truth ? &*truth : nullptr);
    const auto& best = multi.best_result();
    manifest.Output(learn_prefix + "params.txt", FormatParams(best.params));
    std::ostringstream trace;
    trace << "iter";
    for (int a = 0; a < learn_k; ++a) trace << ",q_" << a;
    for (int a = 0; a < learn_k; ++a) {
      for (int b = 0; b < learn_k; ++b) trace << ",c_" << a << b;
    }
    trace << ",free_energy,overlap\n";
    for (size_t it = 0; it < best.trace.size(); ++it) {
      const auto& record = best.trace[it];
      trace << it;
      for (double qa : record.params.q) trace << ',' << FormatDouble(qa);
      for (double cab : record.params.affinity) {
        trace << ',' << FormatDouble(cab);
      }
      trace << ',' << FormatDouble(record.free_energy) << ','
            << (record.overlap ? FormatDouble(*record.overlap) : "nan")
            << '\n';
    }
    manifest.Output(learn_prefix + "trace.csv", trace.str());
    WriteMarginals(manifest, learn_prefix + "marginals.txt",
                   best.bp.state.marginals, learn_k);
    manifest.Output(learn_prefix + "labels.txt",
                    WriteLabels(best.bp.predicted));
    for (size_t index = 0; index < multi.runs.size(); ++index) {
      if (!multi.runs[index].error.empty()) {
        std::cerr << "run " << index << " failed: " << multi.runs[index].error
                  << '\n';
      }
    }
    std::cout << "best_run=" << multi.best
              << " converged=" << (best.converged ? "true" : "false")
              << " em_iters=" << best.trace.size()
              << " free_energy=" << FormatDouble(best.bp.bethe_free_energy)
              << '\n';
    manifest.Set("seed", std::to_string(learn_seed));
    manifest.Finish();
    return 0;
  }

  if (sweep->parsed()) {
    auto spec = SweepSpec::Parse(manifest.Input(sweep_config));
    spec.threads = ThreadCount(sweep_threads.value_or(spec.threads));
    std::ofstream out(sweep_out);
    if (!out) throw Error(ErrorKind::kUsage, "cannot write " + sweep_out);
    out << kSweepCsvHeader << '\n' << std::flush;
    RunSweep(spec, [&](const SweepPoint& point) {
      out << FormatSweepRow(spec, point) << '\n' << std::flush;
    });
    out.close();
    manifest.Record(sweep_out);
    manifest.Set("seed", std::to_string(spec.seed));
    manifest.Set("threads", std::to_string(spec.threads));
    manifest.Output(sweep_out + ".spec", spec.Format());
    manifest.Finish();
    return 0;
  }

  if (transitions->parsed()) {
    const auto points = ParseSweepCsv(manifest.Input(trans_in));
    const auto estimates =
        DetectAllTransitions(points, trans_k, trans_thresholds);
    std::string text = std::string(kTransitionCsvHeader) + "\n";
    for (const auto& estimate : estimates) {
      text += FormatTransitionRow(estimate) + "\n";
    }
    manifest.Output(trans_out, text);
    std::cout << text;
    manifest.Finish();
    return 0;
  }

  if (real->parsed()) {
    const auto loaded = LoadGraph(manifest, real_graph);
    RevealFlags truth_flags;
    truth_flags.truth_file = real_truth;
    const auto truth = truth_flags.Truth(manifest, loaded, real_spec.k);
    if (!truth) throw Error(ErrorKind::kUsage, "real-exp needs complete labels");
    if (real_mode == "given_params") {
      real_spec.source = ParamSource::kGiven;
    } else if (real_mode == "em") {
      real_spec.source = ParamSource::kEM;
    } else {
      throw Error(ErrorKind::kUsage, "--mode must be given_params or em");
    }
    real_spec.alpha_grid = ParseNumberList(real_alpha);
    real_spec.bp.init = ParseInitMode(real_init);
    real_spec.em.bp = real_spec.bp;
    real_spec.threads = ThreadCount(real_threads);
    const auto rows = RunRealNetworkExperiment(loaded.graph, *truth, real_spec);
    std::string text = RealExperimentCsvHeader(real_spec.k) + "\n";
    for (const auto& row : rows) {
      text += FormatRealExperimentRow(real_spec, row) + "\n";
    }
    manifest.Output(real_out, text);
    manifest.Set("seed", std::to_string(real_spec.seed));
    manifest.Finish();
    return 0;
  }
  return ExitCodeFor(ErrorKind::kUsage);
}

}  // namespace
}  // namespace sbm_cavity

int main(int argc, char** argv) {
  try {
    return sbm_cavity::Main(argc, argv);
  } catch (const sbm_cavity::Error& e) {
    std::cerr << "error (" << sbm_cavity::ErrorKindName(e.kind())
              << "): " << e.what() << '\n';
    return sbm_cavity::ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return sbm_cavity::ExitCodeFor(sbm_cavity::ErrorKind::kInternal);
  }
}
