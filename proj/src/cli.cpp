#include "bmlab/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bmlab/equilibrium.hpp"
#include "bmlab/experiments.hpp"
#include "bmlab/market_io.hpp"
#include "bmlab/mechanisms.hpp"
#include "bmlab/stability.hpp"

namespace bmlab {

namespace {

void print_matching(std::ostream& out, const Matching& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out << ' ';
    out << x.assignment[i] + 1;
  }
  out << '\n';
}

// Reports file: n lines, line i is student i's submitted list, 1-based.
StrategyProfile read_profile_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file " + path);
  std::vector<std::vector<std::int32_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls(line);
    std::vector<std::int32_t> row;
    std::int32_t v = 0;
    while (ls >> v) row.push_back(v - 1);
    rows.push_back(std::move(row));
  }
  if (auto bad = validate_rows("reports", n, rows)) throw std::runtime_error(bad->describe());
  return RankingTable::from_rows(rows);
}

template <typename T, typename Parse>
std::vector<T> parse_names(const std::vector<std::string>& names, Parse parse, const char* what) {
  std::vector<T> out;
  for (const auto& name : names) {
    auto v = parse(name);
    if (!v) throw CLI::ValidationError(std::string("unknown ") + what + " '" + name + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bmlab: Boston mechanism and comparison mechanisms on random school choice markets"};
  app.name("bmlab");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiment over uniform random markets, CSV output");
  std::vector<std::size_t> sim_n;
  std::size_t sim_reps = 1;
  std::vector<std::string> sim_mechs{"bm"};
  std::vector<std::string> sim_behaviors{"truthful"};
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  std::string sim_format = "csv";
  unsigned sim_threads = 1;
  bool sim_timing = false;
  bool sim_summary = false;
  sim->add_option("--n", sim_n, "Market sizes, comma separated or repeated")->required()->delimiter(',');
  sim->add_option("--reps", sim_reps, "Replications per market size")->required();
  sim->add_option("--mechanisms", sim_mechs, "Subset of bm,da,rsd,ttc,rm")->delimiter(',')->capture_default_str();
  sim->add_option("--behavior,--behaviors", sim_behaviors,
                  "Subset of truthful,eq_student_optimal,eq_school_optimal (eq_* pair with bm only)")
      ->delimiter(',')
      ->capture_default_str();
  sim->add_option("--seed", sim_seed, "Master seed")->required();
  sim->add_option("--out", sim_out, "Output CSV path (relative paths go under $BMLAB_OUTPUT_DIR if set)")
      ->required();
  sim->add_option("--format", sim_format, "Output format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  sim->add_option("--threads", sim_threads, "Worker threads (output does not depend on this)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_flag("--record-timing", sim_timing, "Fill elapsed_ms (makes output run-dependent)");
  sim->add_flag("--summary", sim_summary, "Print per-group means to stdout");

  // trace
  auto* tr = app.add_subcommand("trace", "Print the Boston round trace of a market");
  std::string tr_market;
  std::string tr_profile;
  tr->add_option("--market", tr_market, "Market file")->required()->check(CLI::ExistingFile);
  tr->add_option("--profile", tr_profile, "Reports file (default: truthful)")->check(CLI::ExistingFile);

  // enumerate
  auto* en = app.add_subcommand("enumerate", "List stable matchings or Boston Nash outcomes of a small market");
  std::string en_market;
  std::string en_what = "stable";
  en->add_option("--market", en_market, "Market file")->required()->check(CLI::ExistingFile);
  en->add_option("--what", en_what, "stable (n <= 8) or nash (n <= 4)")
      ->check(CLI::IsMember({"stable", "nash"}))
      ->capture_default_str();

  // best-response
  auto* br = app.add_subcommand("best-response", "Best Boston report for one student");
  std::string br_market;
  std::string br_profile;
  std::size_t br_student = 0;
  br->add_option("--market", br_market, "Market file")->required()->check(CLI::ExistingFile);
  br->add_option("--student", br_student, "Student index (1-based)")->required()->check(CLI::PositiveNumber);
  br->add_option("--profile", br_profile, "Reports of everyone (default: truthful)")->check(CLI::ExistingFile);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit y = c * x(n) to per-n means from a simulate CSV");
  std::string fit_in;
  std::string fit_metric = "avg_rank";
  std::string fit_model_name = "c_logn";
  std::string fit_mech;
  std::string fit_behavior;
  fit->add_option("--in", fit_in, "CSV written by simulate")->required()->check(CLI::ExistingFile);
  fit->add_option("--metric", fit_metric, "r1 or avg_rank")->check(CLI::IsMember({"r1", "avg_rank"}))->capture_default_str();
  fit->add_option("--model", fit_model_name, "c_logn, c_inv_logn or c_n_over_logn")
      ->check(CLI::IsMember({"c_logn", "c_inv_logn", "c_n_over_logn"}))
      ->capture_default_str();
  fit->add_option("--mechanism", fit_mech, "Only rows of this mechanism");
  fit->add_option("--behavior", fit_behavior, "Only rows of this behavior");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "usage: bmlab <simulate|trace|enumerate|best-response|fit> [options]; see --help\n";
    return 2;
  }

  try {
    if (*sim) {
      ExperimentConfig cfg;
      cfg.n_values = sim_n;
      cfg.reps = sim_reps;
      cfg.mechanisms = parse_names<Mechanism>(sim_mechs, parse_mechanism, "mechanism");
      cfg.behaviors = parse_names<Behavior>(sim_behaviors, parse_behavior, "behavior");
      cfg.master_seed = sim_seed;
      cfg.output = resolve_output_path(sim_out);
      cfg.threads = sim_threads;
      cfg.record_timing = sim_timing;
      const auto rows = run_experiment(cfg);
      if (sim_summary) {
        out << "n,mechanism,behavior,count,mean_r1,se_r1,mean_avg_rank,se_avg_rank,mean_extra\n";
        for (const auto& g : summarize(rows)) {
          out << g.n << ',' << to_string(g.mechanism) << ',' << to_string(g.behavior) << ','
              << g.count << ',' << std::fixed << std::setprecision(6) << g.mean_r1 << ','
              << g.se_r1 << ',' << g.mean_avg_rank << ',' << g.se_avg_rank << ','
              << g.mean_extra << '\n';
        }
      }
      err << "wrote " << rows.size() << " rows to " << cfg.output.string() << '\n';
    } else if (*tr) {
      const Market m = read_market_file(tr_market);
      const StrategyProfile reports =
          tr_profile.empty() ? m.preferences() : read_profile_file(tr_profile, m.size());
      const BostonResult res = boston(m, reports, true);
      for (const auto& rec : res.trace) {
        out << "round " << rec.round << " school " << rec.school + 1 << " accepted ";
        if (rec.accepted >= 0) {
          out << rec.accepted + 1;
        } else {
          out << '-';
        }
        out << " applicants";
        for (std::size_t a = 0; a < rec.applicants.size(); ++a) {
          out << (a ? ',' : ' ') << rec.applicants[a] + 1;
        }
        out << '\n';
      }
    } else if (*en) {
      const Market m = read_market_file(en_market);
      const StableSet set = en_what == "nash" ? enumerate_nash_outcomes(m) : enumerate_stable(m);
      for (const auto& x : set) print_matching(out, x);
    } else if (*br) {
      const Market m = read_market_file(br_market);
      if (br_student > m.size()) throw std::out_of_range("student index exceeds n");
      const StrategyProfile reports =
          br_profile.empty() ? m.preferences() : read_profile_file(br_profile, m.size());
      const auto i = static_cast<Student>(br_student - 1);
      const BestResponse res = best_response_bm(m, reports, i);
      const School current = bm_outcome(m, reports).assignment[i];
      out << "student " << br_student << " current " << current + 1 << " (rank "
          << rank_of(m, i, current) << ") best " << res.best + 1 << " (rank "
          << rank_of(m, i, res.best) << ")\n";
      out << "witness";
      for (School s : res.witness) out << ' ' << s + 1;
      out << '\n';
    } else if (*fit) {
      auto rows = read_csv_file(fit_in);
      if (!fit_mech.empty() || !fit_behavior.empty()) {
        std::erase_if(rows, [&](const ResultRow& r) {
          return (!fit_mech.empty() && to_string(r.mechanism) != fit_mech) ||
                 (!fit_behavior.empty() && to_string(r.behavior) != fit_behavior);
        });
      }
      const FitResult res = fit_model(rows, *parse_metric(fit_metric), *parse_fit_model(fit_model_name));
      out << "model " << to_string(res.model) << " c " << std::setprecision(10) << res.c << " r2 "
          << res.r2 << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bmlab
