// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>

#include "bmlab/cli.hpp"
#include "bmlab/equilibrium.hpp"
#include "bmlab/experiments.hpp"
#include "bmlab/mechanisms.hpp"
#include "bmlab/randmarket.hpp"
#include "bmlab/stability.hpp"
#include "oracles.hpp"

using namespace bmlab;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentConfig config(std::vector<std::size_t> n, std::size_t reps, std::vector<Mechanism> mechs,
                        std::vector<Behavior> behs, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.n_values = std::move(n);
  cfg.reps = reps;
  cfg.mechanisms = std::move(mechs);
  cfg.behaviors = std::move(behs);
  cfg.master_seed = seed;
  cfg.threads = workers();
  return cfg;
}

const GroupSummary& group(const std::vector<GroupSummary>& gs, std::size_t n, Mechanism m, Behavior b) {
  for (const auto& g : gs)
    if (g.n == n && g.mechanism == m && g.behavior == b) return g;
  throw std::logic_error("missing group");
}

StrategyProfile random_profile(std::size_t n, Rng& rng) {
  StrategyProfile p(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(p.row(i).begin(), p.row(i).end(), 0);
    shuffle_in_place(p.row(i), rng);
  }
  return p;
}

// Nash by brute force: nobody gains with any of the n! reports.
bool nash_exhaustive(const Market& m, const StrategyProfile& p) {
  const Matching x = bm_outcome(m, p);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int ii = static_cast<int>(i);
    if (oracle::best_attainable_pos(m, p, ii) < oracle::true_pos(m, ii, x.assignment[i])) return false;
  }
  return true;
}

void prop1_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_experiment(config({1000}, 200, {Mechanism::kBm}, {Behavior::kTruthful}, 7));
  const double secs = seconds_since(t0);
  const auto& g = summarize(rows).front();
  const double target = expected_round1_fraction(1000);
  report("bm truthful r1 at n=1000", std::abs(g.mean_r1 - target) <= 0.01 && secs < 10.0,
         fmt("mean %.4f target %.4f +-0.01, %.2f s (limit 10 s)", g.mean_r1, target, secs));
}

void prop1_exact() {
  const auto rows = run_experiment(config({2}, 4096, {Mechanism::kBm}, {Behavior::kTruthful}, 1));
  const auto& g = summarize(rows).front();
  report("bm truthful r1 at n=2", std::abs(g.mean_r1 - 0.75) <= 3 * g.se_r1,
         fmt("mean %.4f se %.4f target 0.75 within 3 se", g.mean_r1, g.se_r1));
}

// One run serves the decay check and the proposal count.
void prop2_and_proposals() {
  const auto rows = run_experiment(config({100, 1000, 10000}, 100, {Mechanism::kBm, Mechanism::kDa},
                                          {Behavior::kTruthful, Behavior::kEqStudentOptimal}, 21));
  const auto gs = summarize(rows);
  std::vector<double> r1, scaled;
  for (std::size_t n : {100, 1000, 10000}) {
    const double v = group(gs, n, Mechanism::kBm, Behavior::kEqStudentOptimal).mean_r1;
    r1.push_back(v);
    scaled.push_back(v * std::log(static_cast<double>(n)));
  }
  const double mean = (scaled[0] + scaled[1] + scaled[2]) / 3;
  double spread = 0;
  for (double s : scaled) spread = std::max(spread, std::abs(s - mean) / mean);
  const bool decreasing = r1[0] > r1[1] && r1[1] > r1[2];
  report("equilibrium r1 decays like 1/ln n", spread <= 0.25 && decreasing,
         fmt("r1 %.4f %.4f %.4f; r1*ln n %.4f %.4f %.4f; max deviation from mean %.1f%% (limit 25%%)",
             r1[0], r1[1], r1[2], scaled[0], scaled[1], scaled[2], 100 * spread));

  const auto& da = group(gs, 1000, Mechanism::kDa, Behavior::kTruthful);
  report("da truthful r1 at n=1000", da.mean_r1 >= 0.10 && da.mean_r1 <= 0.20,
         fmt("mean %.4f in [0.10, 0.20]", da.mean_r1));

  const double per_student = da.mean_extra / 1000.0;
  report("da proposals per student at n=1000", per_student >= 6 && per_student <= 8,
         fmt("mean %.3f in [6, 8]", per_student));
}

void prop3() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_experiment(config({1000}, 200, {Mechanism::kBm},
                                          {Behavior::kEqStudentOptimal, Behavior::kEqSchoolOptimal}, 33));
  const double secs = seconds_since(t0);
  const auto gs = summarize(rows);
  const double lo = group(gs, 1000, Mechanism::kBm, Behavior::kEqStudentOptimal).mean_avg_rank;
  const double hi = group(gs, 1000, Mechanism::kBm, Behavior::kEqSchoolOptimal).mean_avg_rank;
  report("equilibrium avg_rank endpoints at n=1000", lo >= 6 && lo <= 8 && hi >= 120 && hi <= 170 && secs < 120,
         fmt("student-optimal %.3f in [6, 8], school-optimal %.2f in [120, 170], %.1f s (limit 120 s)", lo, hi,
             secs));
}

void comparison_constants() {
  const auto rows = run_experiment(
      config({1000}, 200, {Mechanism::kRsd, Mechanism::kTtc, Mechanism::kRm}, {Behavior::kTruthful}, 45));
  const auto gs = summarize(rows);
  for (Mechanism m : {Mechanism::kRsd, Mechanism::kTtc, Mechanism::kRm}) {
    const auto& g = group(gs, 1000, m, Behavior::kTruthful);
    report(std::string(to_string(m)) + " truthful r1 at n=1000", std::abs(g.mean_r1 - 0.5) <= 0.03,
           fmt("mean %.4f se %.4f target 0.5 +-0.03", g.mean_r1, g.se_r1));
  }
}

void conjecture_ordering() {
  auto rows = run_experiment(
      config({100, 300, 1000}, 100, {Mechanism::kBm, Mechanism::kRsd}, {Behavior::kTruthful}, 57));
  auto only = [&](Mechanism m) {
    std::vector<ResultRow> out;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
                 [m](const ResultRow& r) { return r.mechanism == m; });
    return out;
  };
  const FitResult bm = fit_model(only(Mechanism::kBm), Metric::kAvgRank, FitModel::kLogN);
  const FitResult sd = fit_model(only(Mechanism::kRsd), Metric::kAvgRank, FitModel::kLogN);
  report("avg_rank c_logn bm below rsd", bm.c < sd.c,
         fmt("c(bm) %.4f (r2 %.3f) c(rsd) %.4f (r2 %.3f)", bm.c, bm.r2, sd.c, sd.r2));
}

void nash_equals_stable() {
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0, total = 0;
  for (auto [n, count] : {std::pair<std::size_t, int>{3, 100}, {4, 20}}) {
    for (int k = 0; k < count; ++k, ++total) {
      const Market m = sample_market(n, SeedSpec{1000 + n, static_cast<std::uint64_t>(k)});
      if (enumerate_nash_outcomes(m) != enumerate_stable(m)) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  report("nash outcomes equal stable matchings", mismatches == 0 && secs < 60,
         fmt("%d of %d markets differ, %.1f s (limit 60 s)", mismatches, total, secs));
}

void equilibrium_construction() {
  int checked = 0, bad = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t n = 1 + k % 6;
    const Market m = sample_market(n, SeedSpec{2000, k});
    for (const Matching& mu : enumerate_stable(m)) {
      const StrategyProfile p = equilibrium_from_stable(m, mu);
      ++checked;
      const bool ok = bm_outcome(m, p) == mu && is_nash_profile(m, p).is_nash &&
                      (n > 4 || nash_exhaustive(m, p));
      if (!ok) ++bad;
    }
  }
  // The Nash check must also reject: random profiles against brute force.
  int cross = 0, cross_bad = 0, non_nash = 0;
  for (std::uint64_t k = 0; k < 200; ++k, ++cross) {
    const std::size_t n = 1 + k % 4;
    Rng rng(derive_seed(3000, k));
    const Market m = sample_market(n, rng);
    const StrategyProfile p = random_profile(n, rng);
    const bool expect = nash_exhaustive(m, p);
    if (!expect) ++non_nash;
    if (is_nash_profile(m, p).is_nash != expect) ++cross_bad;
  }
  report("equilibrium construction", bad == 0 && cross_bad == 0,
         fmt("%d of %d stable matchings fail; %d of %d random profiles disagree with exhaustive check (%d non-Nash)",
             bad, checked, cross_bad, cross, non_nash));
}

void best_response() {
  int bad = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 4;
    Rng rng(derive_seed(4000, k));
    const Market m = sample_market(n, rng);
    const StrategyProfile p = random_profile(n, rng);
    const auto i = static_cast<Student>(rng.below(n));
    const BestResponse br = best_response_bm(m, p, i);
    StrategyProfile q = p;
    std::copy(br.witness.begin(), br.witness.end(), q.row(i).begin());
    const bool ok = oracle::true_pos(m, i, br.best) == oracle::best_attainable_pos(m, p, i) &&
                    bm_outcome(m, q).assignment[i] == br.best;
    if (!ok) ++bad;
  }
  report("best response vs exhaustive search", bad == 0, fmt("%d of 200 triples disagree", bad));
}

void determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("bmlab_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto simulate = [&](const std::string& name, const std::string& threads) {
    std::ostringstream out, err;
    const auto path = (dir / name).string();
    const int code = run_cli({"simulate", "--n", "50,200,30", "--reps", "20", "--mechanisms", "bm,da,rsd,ttc,rm",
                              "--behavior", "truthful,eq_student_optimal,eq_school_optimal", "--seed", "99",
                              "--out", path, "--threads", threads},
                             out, err);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return code == 0 ? bytes : std::string();
  };
  const std::string a = simulate("a.csv", "4");
  const std::string b = simulate("b.csv", "4");
  const std::string c = simulate("c.csv", "1");
  std::filesystem::remove_all(dir);
  report("byte-identical csv across runs and thread counts", !a.empty() && a == b && a == c,
         fmt("%zu bytes; parallel repeat %s, serial %s", a.size(), a == b ? "equal" : "differs",
             a == c ? "equal" : "differs"));
}

}  // namespace

int main() {
  std::printf("acceptance run with %u worker threads\n", workers());
  prop1_limit();
  prop1_exact();
  prop2_and_proposals();
  prop3();
  comparison_constants();
  conjecture_ordering();
  nash_equals_stable();
  equilibrium_construction();
  best_response();
  determinism();
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
