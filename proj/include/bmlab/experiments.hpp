// Monte Carlo harness over uniform random markets.
//
// Seeding contract: the replication at position g of the flattened
// (n_values x reps) grid, g = n_index * reps + rep, uses the stream
// Rng(derive_seed(master_seed, g)). From that stream the market is drawn
// first (preferences, then priorities), then the serial dictatorship order.
// Appending a new market size to the end of n_values leaves every existing
// cell's seed unchanged.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bmlab/core.hpp"

namespace bmlab {

enum class Mechanism { kBm, kDa, kRsd, kTtc, kRm };
enum class Behavior { kTruthful, kEqStudentOptimal, kEqSchoolOptimal };

std::string_view to_string(Mechanism m);
std::string_view to_string(Behavior b);
std::optional<Mechanism> parse_mechanism(std::string_view name);
std::optional<Behavior> parse_behavior(std::string_view name);

struct ExperimentConfig {
  std::vector<std::size_t> n_values;
  std::size_t reps = 1;
  std::vector<Mechanism> mechanisms;
  std::vector<Behavior> behaviors;
  std::uint64_t master_seed = 0;
  std::filesystem::path output;  // empty: no file is written
  unsigned threads = 1;
  bool record_timing = false;    // elapsed_ms is 0 unless set
  std::size_t verify_nash_max_n = 6;
};

struct ResultRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  Mechanism mechanism = Mechanism::kBm;
  Behavior behavior = Behavior::kTruthful;
  std::size_t rep = 0;
  double r1 = 0.0;
  double avg_rank = 0.0;
  std::int64_t extra = 0;  // da: proposals; bm: rounds; otherwise 0
  double elapsed_ms = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "seed,n,mechanism,behavior,rep,r1,avg_rank,extra,elapsed_ms";

/// Throws std::invalid_argument describing the first problem found.
void validate_config(const ExperimentConfig& cfg);

/// Pairs actually simulated for this config, in canonical order.
std::vector<std::pair<Mechanism, Behavior>> planned_pairs(const ExperimentConfig& cfg);

/// Runs the whole grid; rows are in (n, mechanism, behavior, rep) order with
/// n in config order. Writes cfg.output when it is non-empty.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Rows for one replication of one market size.
std::vector<ResultRow> run_replication(const ExperimentConfig& cfg, std::size_t n_index,
                                       std::size_t rep);

std::string format_row(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_csv_file(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv_file(const std::filesystem::path& path);

/// Relative paths are placed under $BMLAB_OUTPUT_DIR when that is set.
std::filesystem::path resolve_output_path(const std::filesystem::path& path);

enum class Metric { kR1, kAvgRank };
std::optional<Metric> parse_metric(std::string_view name);

struct GroupSummary {
  std::size_t n = 0;
  Mechanism mechanism = Mechanism::kBm;
  Behavior behavior = Behavior::kTruthful;
  std::size_t count = 0;
  double mean_r1 = 0.0;
  double se_r1 = 0.0;
  double mean_avg_rank = 0.0;
  double se_avg_rank = 0.0;
  double mean_extra = 0.0;
};

/// Per (n, mechanism, behavior) means and standard errors, in first-seen order.
std::vector<GroupSummary> summarize(const std::vector<ResultRow>& rows);

enum class FitModel { kLogN, kInvLogN, kNOverLogN };
std::string_view to_string(FitModel m);
std::optional<FitModel> parse_fit_model(std::string_view name);

/// x(n) for the model: ln n, 1/ln n or n/ln n.
double model_regressor(FitModel model, double n);

struct FitResult {
  FitModel model = FitModel::kLogN;
  double c = 0.0;
  double r2 = 0.0;
};

/// Least squares through the origin, y = c * x(n), on per-n means of
/// `metric`. Needs at least two distinct n values.
FitResult fit_model(const std::vector<ResultRow>& rows, Metric metric, FitModel model);

}  // namespace bmlab
