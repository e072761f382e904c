#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "usdlo/io.hpp"
#include "usdlo/validation.hpp"

namespace {

using usdlo::io::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char *kSeedEnvVar = "USDLO_SEED";

/// Default seed: USDLO_SEED from the environment when set, else a fixed
/// constant. A --seed flag always wins.
std::uint64_t default_seed() {
  if (const char *env = std::getenv(kSeedEnvVar)) {
    try {
      return std::stoull(env);
    } catch (const std::exception &) {
      throw CLI::ValidationError(std::string(kSeedEnvVar) + " is not an integer");
    }
  }
  return 988361;
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output path: " + path);
  out << content;
  if (!out) throw IoError("failed while writing: " + path);
}

void emit(const std::string &out_path, const std::string &content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

/// Fill flag defaults from a saved config (a report's "config" block); flags
/// given on the command line keep their values.
template <typename T>
void maybe_load(const CLI::Option *opt, const json &cfg, const char *key, T &value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

struct CurvesArgs {
  int n = 3;
  double mu_min = 0.0, mu_max = 3.0;
  int points = 61;
  double eta = 1.0;
  long copies = 1000;
  long trials = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "csv";
  std::string out_path;
  std::string config_path;
};

int cmd_curves(const CurvesArgs &args) {
  usdlo::mc::SweepConfig sc;
  sc.n = args.n;
  sc.mu_min = args.mu_min;
  sc.mu_max = args.mu_max;
  sc.points = args.points;
  sc.eta = args.eta;
  sc.copies = args.copies;
  sc.trials = args.trials;
  sc.seed = args.seed;
  sc.threads = args.threads;
  const auto table = usdlo::mc::sweep(sc);

  if (args.format == "csv") {
    std::ostringstream os;
    usdlo::io::write_curve_csv(os, table);
    emit(args.out_path, os.str());
  } else {
    json config{{"n", args.n},       {"mu_min", args.mu_min}, {"mu_max", args.mu_max},
                {"points", args.points}, {"eta", args.eta},   {"m", args.copies},
                {"trials", args.trials}, {"seed", args.seed}, {"format", args.format}};
    const json report = usdlo::io::make_report("curves", config,
                                               usdlo::io::curve_table_to_json(table));
    emit(args.out_path, report.dump(2) + "\n");
  }
  return 0;
}

struct SimulateArgs {
  std::string scheme = "bs4-feedback";
  int n = 4;
  double mu = 1.0;
  double eta = 1.0;
  long copies = 1000;
  long trials = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  double bias_budget = -1.0; ///< <0: default 5/M for feedback schemes
  std::string format = "json";
  std::string out_path;
  std::string config_path;
};

int cmd_simulate(const SimulateArgs &args) {
  const auto scheme = usdlo::mc::parse_scheme(args.scheme);
  usdlo::mc::EstimateConfig ec;
  ec.n = args.n;
  ec.mu = args.mu;
  ec.eta = args.eta;
  ec.copies = args.copies;
  ec.trials = args.trials;
  ec.seed = args.seed;
  ec.threads = args.threads;
  const auto est = usdlo::mc::estimate(scheme, ec);

  const int n = usdlo::mc::scheme_alphabet_size(scheme, args.n);
  const double analytic =
      usdlo::mc::analytic_reference(scheme, n, args.eta * args.mu, args.copies);
  const bool feedback_scheme = args.scheme.find("feedback") != std::string::npos;
  const double budget = args.bias_budget >= 0.0
                            ? args.bias_budget
                            : (feedback_scheme ? 5.0 / static_cast<double>(args.copies) : 0.0);
  const auto cmp = usdlo::mc::compare_to_analytic(est, analytic, budget);

  json config{{"scheme", args.scheme}, {"n", args.n},         {"mu", args.mu},
              {"eta", args.eta},       {"m", args.copies},    {"trials", args.trials},
              {"seed", args.seed},     {"format", args.format}};
  json results = usdlo::io::estimate_to_json(est);
  results["analytic"] = analytic;
  results["z_score"] = cmp.z_score;
  results["bias_budget"] = budget;
  json checks = json::array();
  checks.push_back({{"id", "mc-vs-analytic"},
                    {"pass", cmp.pass},
                    {"difference", cmp.difference},
                    {"tolerance", cmp.tolerance}});

  if (args.format == "text") {
    char line[256];
    std::snprintf(line, sizeof(line),
                  "%s  n=%d mu=%g eta=%g M=%ld trials=%ld\n"
                  "p_hat     = %.6f +/- %.6f\nanalytic  = %.6f\nz         = %+.3f  (%s)\n",
                  args.scheme.c_str(), n, args.mu, args.eta, args.copies, args.trials,
                  est.p_hat, est.stderr_value, analytic, cmp.z_score,
                  cmp.pass ? "pass" : "FAIL");
    emit(args.out_path, line);
  } else {
    emit(args.out_path,
         usdlo::io::make_report("simulate", config, results, checks).dump(2) + "\n");
  }
  return 0;
}

struct QkdArgs {
  long pulses = 100000;
  double mu = 0.5;
  double eta = 1.0;
  long copies = 1000;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out_path;
  std::string config_path;
};

int cmd_qkd(const QkdArgs &args) {
  usdlo::qkd::SessionConfig sc;
  sc.mean_photons = args.mu;
  sc.efficiency = args.eta;
  sc.copies = args.copies;
  const auto stats = usdlo::qkd::run_session(args.pulses, sc, args.seed);

  json config{{"pulses", args.pulses}, {"mu", args.mu},   {"eta", args.eta},
              {"m", args.copies},      {"seed", args.seed}, {"format", args.format}};
  if (args.format == "text") {
    std::ostringstream os;
    os << "pulses " << stats.pulses << "\n";
    for (int s = 0; s <= 3; ++s)
      os << "stage " << s << ": " << stats.stage_counts[static_cast<std::size_t>(s)] << "\n";
    os << "kept: single-photon " << stats.kept_a << ", coinciding-bits " << stats.kept_b
       << ", basis-revealed " << stats.kept_c << ", full-usd " << stats.kept_d << "\n"
       << "coincidence fraction " << stats.coincidence_fraction() << "\n"
       << "QBER " << stats.error_rate() << "\n";
    emit(args.out_path, os.str());
  } else {
    emit(args.out_path,
         usdlo::io::make_report("qkd", config, usdlo::io::session_stats_to_json(stats))
                 .dump(2) +
             "\n");
  }
  return 0;
}

struct ValidateArgs {
  std::string profile = "quick";
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "text";
  std::string out_path;
};

int cmd_validate(const ValidateArgs &args) {
  const auto profile = args.profile == "full" ? usdlo::validation::Profile::Full
                                              : usdlo::validation::Profile::Quick;
  const auto results = usdlo::validation::run_checks(profile, args.seed, args.threads);
  const bool ok = usdlo::validation::all_passed(results);

  json checks = json::array();
  std::ostringstream os;
  for (const auto &r : results) {
    checks.push_back({{"id", r.id},
                      {"description", r.description},
                      {"pass", r.pass},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    char line[256];
    std::snprintf(line, sizeof(line), "[%s] %-20s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL",
                  r.id.c_str(), r.detail.c_str(), r.seconds);
    os << line;
  }
  os << (ok ? "all checks passed\n" : "CHECKS FAILED\n");

  if (args.format == "json") {
    json config{{"profile", args.profile}, {"seed", args.seed}};
    json summary{{"passed", ok}, {"checks_run", results.size()}};
    emit(args.out_path, usdlo::io::make_report("validate", config, summary, checks).dump(2) + "\n");
  } else {
    emit(args.out_path, os.str());
  }
  return ok ? 0 : 3;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Unambiguous state discrimination of symmetric coherent states "
               "with linear optics: closed forms, Monte Carlo simulation and a "
               "BB84 receiver"};
  app.require_subcommand(1);

  CurvesArgs curves;
  SimulateArgs sim;
  QkdArgs qkd;
  ValidateArgs val;

  auto *c = app.add_subcommand("curves", "Tabulate success-probability curves over mu");
  auto *c_n = c->add_option("--n", curves.n, "Alphabet size (2..6)");
  auto *c_lo = c->add_option("--mu-min", curves.mu_min, "Grid start");
  auto *c_hi = c->add_option("--mu-max", curves.mu_max, "Grid end");
  auto *c_pts = c->add_option("--points", curves.points, "Grid points (>= 2)");
  auto *c_eta = c->add_option("--eta", curves.eta, "Detector efficiency");
  auto *c_m = c->add_option("--m", curves.copies, "Copies M for feedback schemes");
  auto *c_tr = c->add_option("--trials", curves.trials, "Monte Carlo trials per point (0 = analytics only)");
  auto *c_seed = c->add_option("--seed", curves.seed, "RNG seed");
  c->add_option("--threads", curves.threads, "Worker threads (0 = auto)");
  c->add_option("--format", curves.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  c->add_option("--out", curves.out_path, "Output path (default stdout)");
  c->add_option("--config", curves.config_path, "Load defaults from a saved report/config");

  auto *s = app.add_subcommand("simulate", "Monte Carlo estimate of one scheme");
  auto *s_scheme = s->add_option("--scheme", sim.scheme,
                                 "bs2, bs3-simple, bs3-feedback, bs4-simple, bs4-feedback, "
                                 "bsn-simple, bsn-feedback");
  auto *s_n = s->add_option("--n", sim.n, "Alphabet size for bsn-* schemes");
  auto *s_mu = s->add_option("--mu", sim.mu, "Mean photon number");
  auto *s_eta = s->add_option("--eta", sim.eta, "Detector efficiency");
  auto *s_m = s->add_option("--m", sim.copies, "Copies M for feedback schemes");
  auto *s_tr = s->add_option("--trials", sim.trials, "Trials");
  auto *s_seed = s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
  s->add_option("--bias-budget", sim.bias_budget,
                "Finite-M bias allowance (default 5/M for feedback schemes)");
  s->add_option("--format", sim.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  s->add_option("--out", sim.out_path, "Output path (default stdout)");
  s->add_option("--config", sim.config_path, "Load defaults from a saved report/config");

  auto *q = app.add_subcommand("qkd", "BB84 session with the 4-step receiver");
  auto *q_p = q->add_option("--pulses", qkd.pulses, "Number of pulses");
  auto *q_mu = q->add_option("--mu", qkd.mu, "Mean photon number");
  auto *q_eta = q->add_option("--eta", qkd.eta, "Detector efficiency");
  auto *q_m = q->add_option("--m", qkd.copies, "Copies M of the receiver");
  auto *q_seed = q->add_option("--seed", qkd.seed, "RNG seed");
  q->add_option("--format", qkd.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  q->add_option("--out", qkd.out_path, "Output path (default stdout)");
  q->add_option("--config", qkd.config_path, "Load defaults from a saved report/config");

  auto *v = app.add_subcommand("validate", "Run the oracle and invariant suites");
  v->add_option("--profile", val.profile, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  auto *v_seed = v->add_option("--seed", val.seed, "RNG seed");
  v->add_option("--threads", val.threads, "Worker threads (0 = auto)");
  v->add_option("--format", val.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  v->add_option("--out", val.out_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c->parsed()) {
      bool seed_set = c_seed->count() > 0;
      if (!curves.config_path.empty()) {
        const json cfg = usdlo::io::load_config_file(curves.config_path);
        maybe_load(c_n, cfg, "n", curves.n);
        maybe_load(c_lo, cfg, "mu_min", curves.mu_min);
        maybe_load(c_hi, cfg, "mu_max", curves.mu_max);
        maybe_load(c_pts, cfg, "points", curves.points);
        maybe_load(c_eta, cfg, "eta", curves.eta);
        maybe_load(c_m, cfg, "m", curves.copies);
        maybe_load(c_tr, cfg, "trials", curves.trials);
        if (!seed_set && cfg.contains("seed")) {
          curves.seed = cfg.at("seed").get<std::uint64_t>();
          seed_set = true;
        }
      }
      if (!seed_set) curves.seed = default_seed();
      return cmd_curves(curves);
    }
    if (s->parsed()) {
      bool seed_set = s_seed->count() > 0;
      if (!sim.config_path.empty()) {
        const json cfg = usdlo::io::load_config_file(sim.config_path);
        maybe_load(s_scheme, cfg, "scheme", sim.scheme);
        maybe_load(s_n, cfg, "n", sim.n);
        maybe_load(s_mu, cfg, "mu", sim.mu);
        maybe_load(s_eta, cfg, "eta", sim.eta);
        maybe_load(s_m, cfg, "m", sim.copies);
        maybe_load(s_tr, cfg, "trials", sim.trials);
        if (!seed_set && cfg.contains("seed")) {
          sim.seed = cfg.at("seed").get<std::uint64_t>();
          seed_set = true;
        }
      }
      if (!seed_set) sim.seed = default_seed();
      return cmd_simulate(sim);
    }
    if (q->parsed()) {
      bool seed_set = q_seed->count() > 0;
      if (!qkd.config_path.empty()) {
        const json cfg = usdlo::io::load_config_file(qkd.config_path);
        maybe_load(q_p, cfg, "pulses", qkd.pulses);
        maybe_load(q_mu, cfg, "mu", qkd.mu);
        maybe_load(q_eta, cfg, "eta", qkd.eta);
        maybe_load(q_m, cfg, "m", qkd.copies);
        if (!seed_set && cfg.contains("seed")) {
          qkd.seed = cfg.at("seed").get<std::uint64_t>();
          seed_set = true;
        }
      }
      if (!seed_set) qkd.seed = default_seed();
      return cmd_qkd(qkd);
    }
    if (v->parsed()) {
      if (v_seed->count() == 0) val.seed = default_seed();
      return cmd_validate(val);
    }
  } catch (const IoError &e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
