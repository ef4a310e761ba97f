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

#include "sbm_cavity/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <utility>

#include "sbm_cavity/error.h"
#include "sbm_cavity/key_value.h"
#include "sbm_cavity/overlap.h"
#include "sbm_cavity/parallel.h"
#include "sbm_cavity/random.h"

namespace sbm_cavity {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void RequireIncreasing(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) {
    throw Error(ErrorKind::kUsage, std::string(name) + " is empty");
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::kUsage,
                  std::string(name) + " must be strictly increasing");
    }
  }
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double ParseCsvDouble(const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorKind::kParse, "bad number '" + text + "' in sweep CSV");
  }
  return value;
}

double Median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

double Elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

// Smallest grid index whose curve value exceeds `threshold`, skipping NaN.
std::optional<size_t> FirstAbove(const std::vector<double>& curve,
                                 double threshold) {
  for (size_t g = 0; g < curve.size(); ++g) {
    if (!std::isnan(curve[g]) && curve[g] > threshold) return g;
  }
  return std::nullopt;
}

}  // namespace

const char* SweepModelName(SweepModel model) {
  switch (model) {
    case SweepModel::kPartitionEpsilon:
      return "planted_partition_epsilon";
    case SweepModel::kPartitionDegree:
      return "planted_partition_degree";
    case SweepModel::kColoring:
      return "planted_coloring";
  }
  return "unknown";
}

SweepModel ParseSweepModel(const std::string& name) {
  if (name == "planted_partition_epsilon") return SweepModel::kPartitionEpsilon;
  if (name == "planted_partition_degree") return SweepModel::kPartitionDegree;
  if (name == "planted_coloring") return SweepModel::kColoring;
  throw Error(ErrorKind::kUsage, "unknown sweep model '" + name + "'");
}

void SweepSpec::Validate() const {
  if (k < 2) throw Error(ErrorKind::kUsage, "sweep needs k >= 2");
  RequireIncreasing(grid, model == SweepModel::kPartitionEpsilon
                              ? "epsilon_grid"
                              : "c_grid");
  RequireIncreasing(alpha_grid, "alpha_grid");
  for (double alpha : alpha_grid) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw Error(ErrorKind::kUsage, "alpha values must lie in [0, 1]");
    }
  }
  if (n < 2) throw Error(ErrorKind::kUsage, "sweep needs n >= 2");
  if (seeds < 1) throw Error(ErrorKind::kUsage, "seeds must be >= 1");
  if (inits.empty()) throw Error(ErrorKind::kUsage, "no init modes given");
  if (threads < 1) throw Error(ErrorKind::kUsage, "threads must be >= 1");
  bp.Validate();
  // Catch bad model coordinates before any work starts.
  for (double value : grid) ParamsAt(value).Validate();
}

BlockModelParams SweepSpec::ParamsAt(double grid_value) const {
  switch (model) {
    case SweepModel::kPartitionEpsilon:
      return PlantedPartitionParams(k, c, grid_value, true);
    case SweepModel::kPartitionDegree:
      return PlantedPartitionParams(k, grid_value, epsilon, true);
    case SweepModel::kColoring:
      return PlantedColoringParams(k, grid_value);
  }
  throw Error(ErrorKind::kInternal, "unhandled sweep model");
}

SweepSpec SweepSpec::Parse(std::string_view text) {
  const auto doc = KeyValueDocument::Parse(text);
  SweepSpec spec;
  spec.model = ParseSweepModel(doc.GetString("model"));
  spec.k = static_cast<int>(doc.GetInt("k"));
  if (spec.model == SweepModel::kPartitionEpsilon) {
    spec.c = doc.GetDouble("c");
    spec.grid = doc.GetDoubles("epsilon_grid");
  } else {
    spec.grid = doc.GetDoubles("c_grid");
    if (spec.model == SweepModel::kPartitionDegree) {
      spec.epsilon = doc.GetDouble("epsilon");
    }
  }
  spec.alpha_grid = doc.contains("alpha_grid") ? doc.GetDoubles("alpha_grid")
                                               : std::vector<double>{0.0};
  spec.n = static_cast<NodeId>(doc.GetInt("n"));
  spec.seeds = static_cast<int>(doc.GetInt("seeds", 1));
  if (doc.contains("inits")) {
    spec.inits.clear();
    for (const auto& name : doc.GetStrings("inits")) {
      spec.inits.push_back(ParseInitMode(name));
    }
  }
  spec.bp.tol = doc.GetDouble("tol", spec.bp.tol);
  spec.bp.max_sweeps =
      static_cast<int>(doc.GetInt("max_sweeps", spec.bp.max_sweeps));
  spec.bp.damping = doc.GetDouble("damping", spec.bp.damping);
  spec.bp.perturbation = doc.GetDouble("perturbation", spec.bp.perturbation);
  spec.bp.random_spread =
      doc.GetDouble("random_spread", spec.bp.random_spread);
  spec.seed = static_cast<uint64_t>(doc.GetInt("seed"));
  spec.threads = static_cast<int>(doc.GetInt("threads", 1));
  spec.Validate();
  return spec;
}

std::string SweepSpec::Format() const {
  auto list = [](const std::vector<double>& values) {
    std::string out = "[";
    for (size_t i = 0; i < values.size(); ++i) {
      if (i > 0) out += ", ";
      out += FormatDouble(values[i]);
    }
    return out + "]";
  };
  std::ostringstream out;
  out << "model = " << SweepModelName(model) << "\n";
  out << "k = " << k << "\n";
  if (model == SweepModel::kPartitionEpsilon) {
    out << "c = " << FormatDouble(c) << "\n";
    out << "epsilon_grid = " << list(grid) << "\n";
  } else {
    if (model == SweepModel::kPartitionDegree) {
      out << "epsilon = " << FormatDouble(epsilon) << "\n";
    }
    out << "c_grid = " << list(grid) << "\n";
  }
  out << "alpha_grid = " << list(alpha_grid) << "\n";
  out << "n = " << n << "\n";
  out << "seeds = " << seeds << "\n";
  out << "inits = [";
  for (size_t i = 0; i < inits.size(); ++i) {
    out << (i > 0 ? ", " : "") << InitModeName(inits[i]);
  }
  out << "]\n";
  out << "tol = " << FormatDouble(bp.tol) << "\n";
  out << "max_sweeps = " << bp.max_sweeps << "\n";
  out << "damping = " << FormatDouble(bp.damping) << "\n";
  out << "perturbation = " << FormatDouble(bp.perturbation) << "\n";
  out << "random_spread = " << FormatDouble(bp.random_spread) << "\n";
  out << "seed = " << seed << "\n";
  out << "threads = " << threads << "\n";
  return out.str();
}

std::string FormatSweepRow(const SweepSpec& spec, const SweepPoint& point) {
  auto number = [&](double value) {
    return point.ok() ? FormatDouble(value) : std::string("nan");
  };
  std::ostringstream out;
  out << SweepModelName(spec.model) << ',' << spec.k << ',' << spec.n << ','
      << FormatDouble(point.c) << ',' << FormatDouble(point.epsilon) << ','
      << FormatDouble(point.alpha) << ',' << point.seed_index << ','
      << InitModeName(point.init) << ',' << number(point.overlap) << ','
      << number(point.overlap_unrevealed) << ',' << point.sweeps << ','
      << (point.converged ? 1 : 0) << ',' << number(point.free_energy) << ','
      << FormatDouble(point.free_energy_factorized) << ','
      << FormatDouble(std::round(point.runtime_ms * 1000.0) / 1000.0) << ','
      << point.status;
  return out.str();
}

std::vector<SweepPoint> ParseSweepCsv(std::string_view text) {
  std::vector<SweepPoint> points;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kParse, "sweep CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitCsvLine(line);
  std::map<std::string, size_t> column;
  for (size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required :
       {"c", "epsilon", "alpha", "seed", "init", "overlap", "sweeps",
        "converged", "free_energy", "status"}) {
    if (!column.contains(required)) {
      throw Error(ErrorKind::kParse,
                  std::string("sweep CSV lacks column '") + required + "'");
    }
  }
  auto optional_column = [&](const char* name) -> std::optional<size_t> {
    auto it = column.find(name);
    if (it == column.end()) return std::nullopt;
    return it->second;
  };
  const auto unrevealed = optional_column("overlap_unrevealed");
  const auto factorized = optional_column("free_energy_factorized");
  const auto runtime = optional_column("runtime_ms");

  // Grid and alpha indices are reconstructed from the distinct values.
  std::map<double, size_t> c_values, eps_values, alpha_values;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::kParse, "sweep CSV line " +
                                         std::to_string(line_number) +
                                         " has the wrong number of fields");
    }
    SweepPoint point;
    point.c = ParseCsvDouble(fields[column["c"]]);
    point.epsilon = ParseCsvDouble(fields[column["epsilon"]]);
    point.alpha = ParseCsvDouble(fields[column["alpha"]]);
    point.seed_index = std::stoi(fields[column["seed"]]);
    point.init = ParseInitMode(fields[column["init"]]);
    point.overlap = ParseCsvDouble(fields[column["overlap"]]);
    point.overlap_unrevealed =
        unrevealed ? ParseCsvDouble(fields[*unrevealed]) : point.overlap;
    point.sweeps = std::stoi(fields[column["sweeps"]]);
    point.converged = fields[column["converged"]] == "1";
    point.free_energy = ParseCsvDouble(fields[column["free_energy"]]);
    point.free_energy_factorized =
        factorized ? ParseCsvDouble(fields[*factorized]) : kNaN;
    point.runtime_ms = runtime ? ParseCsvDouble(fields[*runtime]) : 0.0;
    point.status = fields[column["status"]];
    c_values.emplace(point.c, 0);
    eps_values.emplace(point.epsilon, 0);
    alpha_values.emplace(point.alpha, 0);
    points.push_back(std::move(point));
  }
  // A c grid varies c; an epsilon grid varies epsilon at fixed c.
  const bool c_grid = c_values.size() > 1 || eps_values.size() == 1;
  auto& grid_values = c_grid ? c_values : eps_values;
  size_t index = 0;
  for (auto& [value, slot] : grid_values) slot = index++;
  index = 0;
  for (auto& [value, slot] : alpha_values) slot = index++;
  for (auto& point : points) {
    point.grid_index = grid_values[c_grid ? point.c : point.epsilon];
    point.alpha_index = alpha_values[point.alpha];
  }
  return points;
}

std::vector<SweepPoint> RunSweep(
    const SweepSpec& spec,
    const std::function<void(const SweepPoint&)>& on_row) {
  spec.Validate();
  const size_t num_alpha = spec.alpha_grid.size();
  const size_t num_seeds = static_cast<size_t>(spec.seeds);
  const size_t num_tasks = spec.grid.size() * num_alpha * num_seeds;
  std::vector<std::vector<SweepPoint>> results(num_tasks);
  std::vector<bool> done(num_tasks, false);
  size_t emitted = 0;
  std::mutex emit_mutex;

  ParallelFor(num_tasks, spec.threads, [&](size_t task) {
    const size_t s = task % num_seeds;
    const size_t a = (task / num_seeds) % num_alpha;
    const size_t g = task / (num_seeds * num_alpha);
    const BlockModelParams params = spec.ParamsAt(spec.grid[g]);
    const double alpha = spec.alpha_grid[a];

    SweepPoint base;
    base.grid_index = g;
    base.alpha_index = a;
    base.alpha = alpha;
    base.seed_index = static_cast<int>(s);
    // Report the requested coordinates, not values recomputed from params.
    if (spec.model == SweepModel::kPartitionEpsilon) {
      base.c = spec.c;
      base.epsilon = spec.grid[g];
    } else {
      base.c = spec.grid[g];
      base.epsilon = spec.model == SweepModel::kPartitionDegree
                         ? spec.epsilon
                         : std::numeric_limits<double>::infinity();
    }

    std::vector<SweepPoint> rows;
    try {
      const auto instance = SamplePlantedInstance(
          params, spec.n, DeriveSeed(spec.seed, {g, s, 0}));
      const SeedSet seeds =
          RevealLabels(instance.truth, alpha, DeriveSeed(spec.seed, {g, s, 1}));
      const OverlapMode mode = DefaultOverlapMode(seeds);
      base.free_energy_factorized =
          FactorizedFreeEnergy(instance.graph, params, seeds);
      for (InitMode init : spec.inits) {
        SweepPoint point = base;
        point.init = init;
        BPOptions options = spec.bp;
        options.init = init;
        options.seed = DeriveSeed(spec.seed, {g, s, 2});
        const auto start = std::chrono::steady_clock::now();
        try {
          const BPResult run =
              RunBP(instance.graph, params, seeds, options, &instance.truth);
          point.overlap = Overlap(run.predicted, instance.truth, params.k, mode);
          point.overlap_unrevealed = Overlap(run.predicted, instance.truth,
                                             params.k, mode, true, &seeds);
          point.sweeps = run.sweeps_used;
          point.converged = run.converged;
          point.free_energy = run.bethe_free_energy;
        } catch (const Error& e) {
          point.status = ErrorKindName(e.kind());
        }
        point.runtime_ms = Elapsed(start);
        rows.push_back(std::move(point));
      }
    } catch (const Error& e) {
      // Instance-level failure: one failed row per init mode.
      for (InitMode init : spec.inits) {
        SweepPoint point = base;
        point.init = init;
        point.status = ErrorKindName(e.kind());
        rows.push_back(std::move(point));
      }
    }

    std::lock_guard<std::mutex> lock(emit_mutex);
    results[task] = std::move(rows);
    done[task] = true;
    while (emitted < num_tasks && done[emitted]) {
      if (on_row) {
        for (const auto& row : results[emitted]) on_row(row);
      }
      ++emitted;
    }
  });

  std::vector<SweepPoint> points;
  points.reserve(num_tasks * spec.inits.size());
  for (auto& rows : results) {
    for (auto& row : rows) points.push_back(std::move(row));
  }
  return points;
}

double ChanceLevel(int k, double alpha) {
  return alpha + (1.0 - alpha) / k;
}

std::vector<double> MedianCurve(const std::vector<SweepPoint>& points,
                                InitMode init, size_t grid_size,
                                double SweepPoint::*field) {
  std::vector<std::vector<double>> values(grid_size);
  for (const auto& point : points) {
    if (point.init != init || !point.ok()) continue;
    if (point.grid_index >= grid_size) {
      throw Error(ErrorKind::kUsage, "grid index out of range");
    }
    values[point.grid_index].push_back(point.*field);
  }
  std::vector<double> curve(grid_size);
  for (size_t g = 0; g < grid_size; ++g) curve[g] = Median(values[g]);
  return curve;
}

TransitionEstimate DetectTransitions(const std::vector<SweepPoint>& points,
                                     int k,
                                     const TransitionThresholds& thresholds) {
  if (points.empty()) throw Error(ErrorKind::kUsage, "no sweep points");
  TransitionEstimate estimate;
  estimate.alpha = points.front().alpha;
  // Grid coordinates by index; every point must share alpha.
  std::map<size_t, double> coordinate;
  bool has_random = false, has_planted = false;
  for (const auto& point : points) {
    if (point.alpha != estimate.alpha) {
      throw Error(ErrorKind::kUsage,
                  "transition detection got mixed alpha values");
    }
    auto [it, inserted] = coordinate.emplace(point.grid_index, point.c);
    if (!inserted && it->second != point.c) {
      throw Error(ErrorKind::kUsage, "inconsistent c for one grid index");
    }
    has_random |= point.init == InitMode::kRandom;
    has_planted |= point.init == InitMode::kPlanted;
  }
  if (!has_random || !has_planted) {
    throw Error(ErrorKind::kUsage,
                "transition detection needs random and planted inits");
  }
  // Compact the grid to the indices present, in increasing c.
  std::vector<double> c_grid;
  std::map<size_t, size_t> compact;
  for (const auto& [index, c] : coordinate) {
    if (!c_grid.empty() && !(c > c_grid.back())) {
      throw Error(ErrorKind::kUsage, "c grid is not increasing");
    }
    compact[index] = c_grid.size();
    c_grid.push_back(c);
  }
  std::vector<SweepPoint> local = points;
  for (auto& point : local) point.grid_index = compact[point.grid_index];
  const size_t size = c_grid.size();

  const double threshold = ChanceLevel(k, estimate.alpha) + thresholds.delta;
  const auto random_curve =
      MedianCurve(local, InitMode::kRandom, size, &SweepPoint::overlap);
  const auto planted_curve =
      MedianCurve(local, InitMode::kPlanted, size, &SweepPoint::overlap);

  // Free-energy gap between the planted branch and the uninformative one it
  // competes with, paired per instance since F itself varies by O(sqrt n)
  // across instances. Without revealed labels the uninformative branch is
  // the factorized state; pinned nodes move that fixed point away from it,
  // and the random-init run on the same instance is the only handle left.
  const bool use_factorized = estimate.alpha == 0.0;
  std::map<std::pair<size_t, int>, double> planted_energy, random_energy;
  for (const auto& point : local) {
    if (!point.ok()) continue;
    const auto key = std::make_pair(point.grid_index, point.seed_index);
    if (point.init == InitMode::kPlanted) {
      planted_energy[key] = point.free_energy;
      if (use_factorized) random_energy[key] = point.free_energy_factorized;
    } else if (point.init == InitMode::kRandom && !use_factorized) {
      random_energy[key] = point.free_energy;
    }
  }
  std::vector<std::vector<double>> gaps(size);
  for (const auto& [key, energy] : planted_energy) {
    const auto it = random_energy.find(key);
    if (it != random_energy.end() && !std::isnan(it->second)) {
      gaps[key.first].push_back(energy - it->second);
    }
  }

  const auto ks_onset = FirstAbove(random_curve, threshold);
  const auto sp_onset = FirstAbove(planted_curve, threshold);
  estimate.ks_saturated = ks_onset && *ks_onset == 0;
  estimate.sp_saturated = sp_onset && *sp_onset == 0;

  // The accurate branch exists where planted init beats random init by more
  // than delta. Revealed labels lift the low branch above chance, so the
  // lines are read off this split rather than off the chance level.
  auto split = [&](size_t g) {
    return !std::isnan(random_curve[g]) && !std::isnan(planted_curve[g]) &&
           planted_curve[g] - random_curve[g] > thresholds.delta;
  };
  std::optional<size_t> sp;
  for (size_t g = 0; g < size && !sp; ++g) {
    if (split(g)) sp = g;
  }
  if (!sp) {
    // Both curves leave chance together, or never do.
    estimate.merged = ks_onset.has_value() || sp_onset.has_value();
    return estimate;
  }
  estimate.sp_valid = true;
  estimate.c_sp = c_grid[*sp];
  size_t end = size;
  for (size_t g = *sp + 1; g < size; ++g) {
    if (!std::isnan(random_curve[g]) && !split(g)) {
      estimate.ks_valid = true;
      estimate.c_ks = c_grid[g];
      end = g;
      break;
    }
  }

  // Free-energy gap between the branches while both exist; c_det is where it
  // first turns non-positive.
  double prev_c = kNaN, prev_gap = kNaN;
  for (size_t g = *sp; g < end; ++g) {
    const double gap = Median(std::move(gaps[g]));
    if (std::isnan(gap)) continue;
    if (gap <= 0.0) {
      estimate.det_valid = true;
      if (std::isnan(prev_gap)) {
        estimate.c_det = c_grid[g];
      } else {
        estimate.c_det = prev_c + (c_grid[g] - prev_c) * prev_gap /
                                      (prev_gap - gap);
      }
      break;
    }
    prev_c = c_grid[g];
    prev_gap = gap;
  }
  return estimate;
}

std::vector<TransitionEstimate> DetectAllTransitions(
    const std::vector<SweepPoint>& points, int k,
    const TransitionThresholds& thresholds) {
  std::map<double, std::vector<SweepPoint>> groups;
  for (const auto& point : points) groups[point.alpha].push_back(point);
  std::vector<TransitionEstimate> estimates;
  for (const auto& [alpha, group] : groups) {
    estimates.push_back(DetectTransitions(group, k, thresholds));
  }
  return estimates;
}

std::string FormatTransitionRow(const TransitionEstimate& estimate) {
  auto value = [](bool valid, double c) {
    return valid ? FormatDouble(c) : std::string("nan");
  };
  std::ostringstream out;
  out << FormatDouble(estimate.alpha) << ','
      << value(estimate.ks_valid, estimate.c_ks) << ','
      << value(estimate.sp_valid, estimate.c_sp) << ','
      << value(estimate.det_valid, estimate.c_det) << ','
      << "ks=" << estimate.ks_valid << ";sp=" << estimate.sp_valid
      << ";det=" << estimate.det_valid << ";merged=" << estimate.merged
      << ";ks_saturated=" << estimate.ks_saturated
      << ";sp_saturated=" << estimate.sp_saturated;
  return out.str();
}

std::vector<RealExperimentRow> RunRealNetworkExperiment(
    const Graph& graph, const LabelVector& truth,
    const RealExperimentSpec& spec) {
  if (static_cast<NodeId>(truth.size()) != graph.num_nodes()) {
    throw Error(ErrorKind::kUsage, "truth does not cover every node");
  }
  if (spec.restarts < 1) throw Error(ErrorKind::kUsage, "restarts must be >= 1");
  RequireIncreasing(spec.alpha_grid, "alpha_grid");
  std::vector<RealExperimentRow> rows;

  if (spec.source == ParamSource::kGiven) {
    const BlockModelParams params =
        ParamsFromSeedEdges(graph, SeedSetFromLabels(truth), spec.k);
    const size_t num_alpha = spec.alpha_grid.size();
    const size_t restarts = static_cast<size_t>(spec.restarts);
    rows.resize(num_alpha * restarts);
    ParallelFor(rows.size(), spec.threads, [&](size_t task) {
      const size_t a = task / restarts;
      const size_t r = task % restarts;
      RealExperimentRow& row = rows[task];
      row.alpha = spec.alpha_grid[a];
      row.restart = static_cast<int>(r);
      row.params = params;
      try {
        // The reveal stream depends only on the restart, so revealed sets
        // grow with alpha.
        const SeedSet seeds =
            RevealLabels(truth, row.alpha, DeriveSeed(spec.seed, {r, 0}));
        BPOptions options = spec.bp;
        options.init = InitMode::kRandom;
        options.seed = DeriveSeed(spec.seed, {r, 1});
        const BPResult run = RunBP(graph, params, seeds, options);
        const OverlapMode mode = DefaultOverlapMode(seeds);
        row.overlap = Overlap(run.predicted, truth, spec.k, mode);
        row.overlap_unrevealed =
            Overlap(run.predicted, truth, spec.k, mode, true, &seeds);
        row.free_energy = run.bethe_free_energy;
        row.sweeps = run.sweeps_used;
        row.converged = run.converged;
      } catch (const Error& e) {
        row.status = ErrorKindName(e.kind());
      }
    });
    return rows;
  }

  for (size_t a = 0; a < spec.alpha_grid.size(); ++a) {
    const double alpha = spec.alpha_grid[a];
    const SeedSet seeds = RevealLabels(truth, alpha, DeriveSeed(spec.seed, {0}));
    EMOptions options = spec.em;
    options.threads = spec.threads;
    try {
      const auto multi =
          EMMultiStart(graph, seeds, spec.k, spec.restarts,
                       DeriveSeed(spec.seed, {a, 1}), options, &truth);
      const OverlapMode mode = DefaultOverlapMode(seeds);
      for (size_t index = 0; index < multi.runs.size(); ++index) {
        const auto& run = multi.runs[index];
        RealExperimentRow row;
        row.alpha = alpha;
        row.restart = static_cast<int>(index);
        row.from_seed_edges = run.from_seed_edges;
        row.best = index == multi.best;
        if (!run.result) {
          row.params = run.init;
          row.status = run.error.substr(0, run.error.find(':'));
          rows.push_back(std::move(row));
          continue;
        }
        const auto& result = *run.result;
        row.params = result.params;
        row.overlap = Overlap(result.bp.predicted, truth, spec.k, mode);
        row.overlap_unrevealed =
            Overlap(result.bp.predicted, truth, spec.k, mode, true, &seeds);
        row.free_energy = result.bp.bethe_free_energy;
        row.sweeps = result.bp.sweeps_used;
        row.converged = result.bp.converged;
        rows.push_back(std::move(row));
      }
    } catch (const Error& e) {
      RealExperimentRow row;
      row.alpha = alpha;
      row.status = ErrorKindName(e.kind());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string RealExperimentCsvHeader(int k) {
  std::string header =
      "network,mode,alpha,restart,from_seed_edges,best,overlap,"
      "overlap_unrevealed,free_energy,sweeps,converged";
  for (int a = 0; a < k; ++a) header += ",q_" + std::to_string(a);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      header += ",c_" + std::to_string(a) + std::to_string(b);
    }
  }
  return header + ",status";
}

std::string FormatRealExperimentRow(const RealExperimentSpec& spec,
                                    const RealExperimentRow& row) {
  std::ostringstream out;
  out << spec.network << ','
      << (spec.source == ParamSource::kGiven ? "given_params" : "em") << ','
      << FormatDouble(row.alpha) << ',' << row.restart << ','
      << row.from_seed_edges << ',' << row.best << ','
      << FormatDouble(row.overlap) << ',' << FormatDouble(row.overlap_unrevealed)
      << ',' << FormatDouble(row.free_energy) << ',' << row.sweeps << ','
      << row.converged;
  const bool has_params = row.params.k == spec.k;
  for (int a = 0; a < spec.k; ++a) {
    out << ',' << (has_params ? FormatDouble(row.params.q[a]) : "nan");
  }
  for (int idx = 0; idx < spec.k * spec.k; ++idx) {
    out << ',' << (has_params ? FormatDouble(row.params.affinity[idx]) : "nan");
  }
  out << ',' << row.status;
  return out.str();
}

}  // namespace sbm_cavity
