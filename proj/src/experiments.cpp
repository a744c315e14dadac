#include "bmlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "bmlab/equilibrium.hpp"
#include "bmlab/mechanisms.hpp"
#include "bmlab/randmarket.hpp"

namespace bmlab {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kBm: return "bm";
    case Mechanism::kDa: return "da";
    case Mechanism::kRsd: return "rsd";
    case Mechanism::kTtc: return "ttc";
    case Mechanism::kRm: return "rm";
  }
  return "unknown";
}

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::kTruthful: return "truthful";
    case Behavior::kEqStudentOptimal: return "eq_student_optimal";
    case Behavior::kEqSchoolOptimal: return "eq_school_optimal";
  }
  return "unknown";
}

std::optional<Mechanism> parse_mechanism(std::string_view name) {
  for (auto m : {Mechanism::kBm, Mechanism::kDa, Mechanism::kRsd, Mechanism::kTtc, Mechanism::kRm}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Behavior> parse_behavior(std::string_view name) {
  for (auto b : {Behavior::kTruthful, Behavior::kEqStudentOptimal, Behavior::kEqSchoolOptimal}) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw std::invalid_argument("config: no market sizes given");
  std::set<std::size_t> seen;
  for (std::size_t n : cfg.n_values) {
    if (n == 0) throw std::invalid_argument("config: market size must be >= 1");
    if (!seen.insert(n).second) {
      throw std::invalid_argument("config: market size " + std::to_string(n) + " listed twice");
    }
  }
  if (cfg.reps == 0) throw std::invalid_argument("config: reps must be >= 1");
  if (cfg.mechanisms.empty()) throw std::invalid_argument("config: no mechanisms given");
  if (cfg.behaviors.empty()) throw std::invalid_argument("config: no behaviors given");
  if (cfg.threads == 0) throw std::invalid_argument("config: threads must be >= 1");

  const bool has_bm =
      std::find(cfg.mechanisms.begin(), cfg.mechanisms.end(), Mechanism::kBm) != cfg.mechanisms.end();
  const bool has_truthful = std::find(cfg.behaviors.begin(), cfg.behaviors.end(),
                                      Behavior::kTruthful) != cfg.behaviors.end();
  for (Behavior b : cfg.behaviors) {
    if (b != Behavior::kTruthful && !has_bm) {
      throw std::invalid_argument("config: behavior " + std::string(to_string(b)) +
                                  " only applies to mechanism bm");
    }
  }
  for (Mechanism m : cfg.mechanisms) {
    if (m != Mechanism::kBm && !has_truthful) {
      throw std::invalid_argument("config: mechanism " + std::string(to_string(m)) +
                                  " needs behavior truthful");
    }
    if (m == Mechanism::kRm) {
      for (std::size_t n : cfg.n_values) {
        if (n > kRankMinimizingCap) {
          throw std::invalid_argument("config: rm supports n <= " +
                                      std::to_string(kRankMinimizingCap) + ", got " +
                                      std::to_string(n));
        }
      }
    }
  }
}

std::vector<std::pair<Mechanism, Behavior>> planned_pairs(const ExperimentConfig& cfg) {
  std::vector<std::pair<Mechanism, Behavior>> pairs;
  for (auto m : {Mechanism::kBm, Mechanism::kDa, Mechanism::kRsd, Mechanism::kTtc, Mechanism::kRm}) {
    if (std::find(cfg.mechanisms.begin(), cfg.mechanisms.end(), m) == cfg.mechanisms.end()) continue;
    for (auto b : {Behavior::kTruthful, Behavior::kEqStudentOptimal, Behavior::kEqSchoolOptimal}) {
      if (std::find(cfg.behaviors.begin(), cfg.behaviors.end(), b) == cfg.behaviors.end()) continue;
      if (b != Behavior::kTruthful && m != Mechanism::kBm) continue;
      pairs.emplace_back(m, b);
    }
  }
  return pairs;
}

namespace {

using Clock = std::chrono::steady_clock;

// Boston on the equilibrium profile built from `mu`; on small markets the
// profile is also checked to be a Nash equilibrium that reproduces `mu`.
std::int64_t implement_equilibrium(const Market& m, const Matching& mu, std::size_t verify_max_n) {
  if (m.size() > verify_max_n) return 1;  // every student is placed in round 1
  const StrategyProfile profile = equilibrium_from_stable(m, mu);
  const BostonResult res = boston(m, profile);
  if (res.matching.assignment != mu.assignment) {
    throw std::logic_error("equilibrium profile does not reproduce the selected matching");
  }
  if (!is_nash_profile(m, profile).is_nash) {
    throw std::logic_error("equilibrium profile admits an improving deviation");
  }
  return res.rounds;
}

}  // namespace

std::vector<ResultRow> run_replication(const ExperimentConfig& cfg, std::size_t n_index,
                                       std::size_t rep) {
  const std::size_t n = cfg.n_values.at(n_index);
  const std::uint64_t seed = derive_seed(cfg.master_seed, n_index * cfg.reps + rep);
  Rng rng(seed);
  const Market market = sample_market(n, rng);
  const auto pairs = planned_pairs(cfg);

  std::vector<Student> order;
  const bool needs_order = std::any_of(pairs.begin(), pairs.end(),
                                       [](const auto& p) { return p.first == Mechanism::kRsd; });
  if (needs_order) order = sample_permutation(n, rng);

  std::vector<ResultRow> rows;
  rows.reserve(pairs.size());
  for (const auto& [mech, behavior] : pairs) {
    ResultRow row;
    row.seed = seed;
    row.n = n;
    row.mechanism = mech;
    row.behavior = behavior;
    row.rep = rep;

    const auto start = Clock::now();
    Matching x;
    switch (behavior) {
      case Behavior::kTruthful:
        switch (mech) {
          case Mechanism::kBm: {
            BostonResult res = boston(market, market.preferences());
            row.extra = res.rounds;
            x = std::move(res.matching);
            break;
          }
          case Mechanism::kDa: {
            DeferredAcceptanceResult res = da_students(market, market.preferences());
            row.extra = res.proposals;
            x = std::move(res.matching);
            break;
          }
          case Mechanism::kRsd:
            x = serial_dictatorship(market, order);
            break;
          case Mechanism::kTtc:
            x = ttc(market);
            break;
          case Mechanism::kRm:
            x = rank_minimizing(market);
            break;
        }
        break;
      case Behavior::kEqStudentOptimal:
      case Behavior::kEqSchoolOptimal: {
        const SelectionRule rule = behavior == Behavior::kEqStudentOptimal
                                       ? SelectionRule::kStudentOptimal
                                       : SelectionRule::kSchoolOptimal;
        x = select_equilibrium(market, rule);
        row.extra = implement_equilibrium(market, x, cfg.verify_nash_max_n);
        break;
      }
    }
    const auto stop = Clock::now();

    const MetricPair mp = metrics(market, x);
    row.r1 = mp.r1();
    row.avg_rank = mp.avg_rank();
    if (cfg.record_timing) {
      row.elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::size_t cells = cfg.n_values.size() * cfg.reps;
  std::vector<std::vector<ResultRow>> per_cell(cells);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= cells) return;
      try {
        per_cell[cell] = run_replication(cfg, cell / cfg.reps, cell % cfg.reps);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cells);
        return;
      }
    }
  };

  const unsigned threads = std::min<std::size_t>(cfg.threads, cells);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Canonical order: n (config order), mechanism, behavior, rep.
  const std::size_t pairs = planned_pairs(cfg).size();
  std::vector<ResultRow> rows;
  rows.reserve(cells * pairs);
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    for (std::size_t p = 0; p < pairs; ++p) {
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
        rows.push_back(per_cell[ni * cfg.reps + rep][p]);
      }
    }
  }

  if (!cfg.output.empty()) write_csv_file(cfg.output, rows);
  return rows;
}

std::string format_row(const ResultRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%zu,%s,%s,%zu,%.6f,%.6f,%lld,%.3f",
                static_cast<unsigned long long>(row.seed), row.n,
                std::string(to_string(row.mechanism)).c_str(),
                std::string(to_string(row.behavior)).c_str(), row.rep, row.r1, row.avg_rank,
                static_cast<long long>(row.extra), row.elapsed_ms);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
}

void write_csv_file(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t lineno, std::string_view name) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineno) + ": bad " + std::string(name) +
                             " '" + std::string(field) + "'");
  }
  return value;
}

double parse_double(std::string_view field, std::size_t lineno, std::string_view name) {
  const std::string s(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineno) + ": bad " + std::string(name) +
                             " '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("csv: header does not match " + std::string(kCsvHeader));

  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 9 fields");
    }
    ResultRow row;
    row.seed = parse_number<std::uint64_t>(f[0], lineno, "seed");
    row.n = parse_number<std::size_t>(f[1], lineno, "n");
    auto mech = parse_mechanism(f[2]);
    auto beh = parse_behavior(f[3]);
    if (!mech) throw std::runtime_error("csv line " + std::to_string(lineno) + ": unknown mechanism");
    if (!beh) throw std::runtime_error("csv line " + std::to_string(lineno) + ": unknown behavior");
    row.mechanism = *mech;
    row.behavior = *beh;
    row.rep = parse_number<std::size_t>(f[4], lineno, "rep");
    row.r1 = parse_double(f[5], lineno, "r1");
    row.avg_rank = parse_double(f[6], lineno, "avg_rank");
    row.extra = parse_number<std::int64_t>(f[7], lineno, "extra");
    row.elapsed_ms = parse_double(f[8], lineno, "elapsed_ms");
    rows.push_back(row);
  }
  return rows;
}

std::vector<ResultRow> read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

std::filesystem::path resolve_output_path(const std::filesystem::path& path) {
  if (path.is_absolute()) return path;
  if (const char* dir = std::getenv("BMLAB_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / path;
  }
  return path;
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "r1") return Metric::kR1;
  if (name == "avg_rank") return Metric::kAvgRank;
  return std::nullopt;
}

std::vector<GroupSummary> summarize(const std::vector<ResultRow>& rows) {
  struct Acc {
    GroupSummary g;
    double sum_r1 = 0, sumsq_r1 = 0, sum_ar = 0, sumsq_ar = 0, sum_extra = 0;
  };
  std::vector<Acc> groups;
  std::map<std::tuple<std::size_t, Mechanism, Behavior>, std::size_t> index;
  for (const auto& row : rows) {
    auto key = std::make_tuple(row.n, row.mechanism, row.behavior);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      Acc a;
      a.g.n = row.n;
      a.g.mechanism = row.mechanism;
      a.g.behavior = row.behavior;
      groups.push_back(a);
    }
    Acc& a = groups[it->second];
    ++a.g.count;
    a.sum_r1 += row.r1;
    a.sumsq_r1 += row.r1 * row.r1;
    a.sum_ar += row.avg_rank;
    a.sumsq_ar += row.avg_rank * row.avg_rank;
    a.sum_extra += static_cast<double>(row.extra);
  }
  std::vector<GroupSummary> out;
  out.reserve(groups.size());
  for (auto& a : groups) {
    const double k = static_cast<double>(a.g.count);
    auto se = [k](double sum, double sumsq) {
      if (k < 2) return 0.0;
      const double mean = sum / k;
      const double var = std::max(0.0, (sumsq - k * mean * mean) / (k - 1));
      return std::sqrt(var / k);
    };
    a.g.mean_r1 = a.sum_r1 / k;
    a.g.se_r1 = se(a.sum_r1, a.sumsq_r1);
    a.g.mean_avg_rank = a.sum_ar / k;
    a.g.se_avg_rank = se(a.sum_ar, a.sumsq_ar);
    a.g.mean_extra = a.sum_extra / k;
    out.push_back(a.g);
  }
  return out;
}

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::kLogN: return "c_logn";
    case FitModel::kInvLogN: return "c_inv_logn";
    case FitModel::kNOverLogN: return "c_n_over_logn";
  }
  return "unknown";
}

std::optional<FitModel> parse_fit_model(std::string_view name) {
  for (auto m : {FitModel::kLogN, FitModel::kInvLogN, FitModel::kNOverLogN}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

double model_regressor(FitModel model, double n) {
  const double ln = std::log(n);
  switch (model) {
    case FitModel::kLogN: return ln;
    case FitModel::kInvLogN: return 1.0 / ln;
    case FitModel::kNOverLogN: return n / ln;
  }
  return 0.0;
}

FitResult fit_model(const std::vector<ResultRow>& rows, Metric metric, FitModel model) {
  std::map<std::size_t, std::pair<double, std::size_t>> by_n;
  for (const auto& row : rows) {
    auto& [sum, count] = by_n[row.n];
    sum += metric == Metric::kR1 ? row.r1 : row.avg_rank;
    ++count;
  }
  if (by_n.size() < 2) throw std::invalid_argument("fit_model: need at least two distinct n values");

  std::vector<double> xs, ys;
  for (const auto& [n, acc] : by_n) {
    const double x = model_regressor(model, static_cast<double>(n));
    if (!std::isfinite(x) || x == 0.0) {
      throw std::invalid_argument("fit_model: model " + std::string(to_string(model)) +
                                  " undefined at n=" + std::to_string(n));
    }
    xs.push_back(x);
    ys.push_back(acc.first / static_cast<double>(acc.second));
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += xs[k] * ys[k];
    sxx += xs[k] * xs[k];
  }
  FitResult fit;
  fit.model = model;
  fit.c = sxy / sxx;

  double ybar = 0;
  for (double y : ys) ybar += y;
  ybar /= static_cast<double>(ys.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - fit.c * xs[k];
    ss_res += r * r;
    ss_tot += (ys[k] - ybar) * (ys[k] - ybar);
  }
  // Relative tolerance keeps exact-model inputs at r2 = 1 despite rounding.
  const double scale = std::max(1.0, sxy);
  if (ss_res <= 1e-18 * scale * scale) {
    fit.r2 = 1.0;
  } else if (ss_tot == 0.0) {
    fit.r2 = -std::numeric_limits<double>::infinity();
  } else {
    fit.r2 = 1.0 - ss_res / ss_tot;
  }
  return fit;
}

}  // namespace bmlab
