#include "taurob/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "taurob/divergences.hpp"
#include "taurob/dynamic_robust.hpp"
#include "taurob/errors.hpp"
#include "taurob/model_io.hpp"
#include "taurob/static_robust.hpp"
#include "taurob/tau_entropy.hpp"

namespace taurob::cli {

namespace {

using io::Json;

constexpr int kMaxEmittedFrequencies = 256;

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string actual_path;
  std::vector<double> taus;
  std::optional<double> c;
  std::optional<double> lambda;
  double rel_tol = robust::kDefaultRelTol;
  std::string output_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  int verify_samples = 0;
  bool full_grid = false;
  double c_min = 0.001;
  double c_max = 0.1;
  int steps = 25;
  double mean = 0.0;
  double var = 1.0;
  int points = 101;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON cannot carry infinities; +inf is emitted as null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_header(const std::string& command, const std::string& columns) {
  return "# taurob v1, command=" + command + ", columns=" + columns + "\n" + columns + "\n";
}

void check_taus(const RunConfig& cfg) {
  if (cfg.taus.empty()) throw ConfigError("--tau list must be nonempty");
  for (double tau : cfg.taus) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("--tau values must lie in [0, 1]");
  }
}

double single_tau(const RunConfig& cfg) {
  check_taus(cfg);
  if (cfg.taus.size() != 1) throw ConfigError("--tau takes exactly one value for " + cfg.command);
  return cfg.taus.front();
}

TauBall make_ball(const RunConfig& cfg) {
  if (cfg.c.has_value() == cfg.lambda.has_value()) {
    throw ConfigError("exactly one of --c or --lambda is required");
  }
  if (cfg.c && !(*cfg.c >= 0.0 && std::isfinite(*cfg.c))) {
    throw ConfigError("--c must be a finite nonnegative number");
  }
  if (cfg.lambda && !(*cfg.lambda > 0.0 && std::isfinite(*cfg.lambda))) {
    throw ConfigError("--lambda must be a finite positive number");
  }
  return cfg.c ? TauBall::hard(single_tau(cfg), *cfg.c) : TauBall::soft(single_tau(cfg), *cfg.lambda);
}

// A path that cannot be opened is a config problem; a file that opens but
// fails validation is not.
io::AnyModel load_any(const std::string& path) {
  if (!std::ifstream(path)) throw ConfigError("cannot open model file " + path);
  return io::load_model(path);
}

template <typename T>
T load_as(const std::string& path, const char* what) {
  io::AnyModel model = load_any(path);
  if (auto* m = std::get_if<T>(&model)) return std::move(*m);
  throw ConfigError(std::string("model file ") + path + " is not a " + what + " model");
}

std::string run_divergence(const RunConfig& cfg) {
  const double tau = single_tau(cfg);
  if (cfg.actual_path.empty()) throw ConfigError("divergence needs --actual");
  const io::AnyModel nominal = load_any(cfg.model_path);
  const io::AnyModel actual = load_any(cfg.actual_path);
  double value = 0.0;
  if (std::holds_alternative<JointGaussian>(nominal) && std::holds_alternative<JointGaussian>(actual)) {
    value = divergence::tau_divergence(std::get<JointGaussian>(actual), std::get<JointGaussian>(nominal), tau);
  } else if (std::holds_alternative<SpectralModel>(nominal) &&
             std::holds_alternative<SpectralModel>(actual)) {
    value = divergence::spectral_tau_divergence(std::get<SpectralModel>(actual),
                                                std::get<SpectralModel>(nominal), tau);
  } else {
    throw ConfigError("divergence needs two static or two spectral models");
  }
  if (cfg.format == "csv") {
    return csv_header("divergence", "tau,divergence") + fmt_double(tau) + "," + fmt_double(value) + "\n";
  }
  return Json{{"tau", tau}, {"divergence", num(value)}}.dump(2) + "\n";
}

std::string run_static(const RunConfig& cfg) {
  const JointGaussian model = load_as<JointGaussian>(cfg.model_path, "static");
  const TauBall ball = make_ball(cfg);
  const auto report = robust::worst_case_static(model, ball, cfg.rel_tol);
  const double recomputed = divergence::tau_divergence(report.worst_joint, model, ball.tau());

  if (cfg.format == "csv") {
    std::string body = csv_header("static", "quantity,row,col,value");
    auto scalar = [&](const char* name, double v) {
      body += std::string(name) + ",0,0," + fmt_double(v) + "\n";
    };
    auto matrix = [&](const char* name, const Matrix& m) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          body += std::string(name) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
                  fmt_double(m(i, j)) + "\n";
    };
    scalar("tau", report.tau);
    scalar("lambda", report.lambda);
    scalar("c", report.c);
    scalar("delta_mse", report.delta_mse);
    matrix("nominal_P", report.nominal_p);
    matrix("worst_P", report.worst_p);
    matrix("worst_cov", report.worst_joint.cov());
    return body;
  }

  Json doc{{"tau", report.tau},
           {"lambda", num(report.lambda)},
           {"c", report.c},
           {"recomputed_c", num(recomputed)},
           {"delta_mse", report.delta_mse},
           {"nominal_P", io::to_json(report.nominal_p)},
           {"worst_P", io::to_json(report.worst_p)},
           {"worst_model", io::to_json(report.worst_joint)}};
  if (cfg.verify_samples > 0 && std::isfinite(report.lambda)) {
    std::mt19937_64 rng(cfg.seed);
    const auto check = entropy::entropy_equivalence_check(model, report.lambda, ball.tau(),
                                                          cfg.verify_samples, rng, report.c);
    doc["verification"] = {{"entropy", check.entropy},
                           {"lagrangian_at_lf", check.lagrangian_at_lf},
                           {"equality_gap", check.equality_gap},
                           {"max_sampled_excess", num(check.max_sampled_excess)},
                           {"samples", check.samples}};
  }
  return doc.dump(2) + "\n";
}

std::vector<int> emitted_frequencies(int grid_size, bool full_grid) {
  const int stride =
      full_grid ? 1 : std::max(1, (grid_size + kMaxEmittedFrequencies - 1) / kMaxEmittedFrequencies);
  std::vector<int> ks;
  for (int k = 0; k < grid_size; k += stride) ks.push_back(k);
  return ks;
}

std::string run_dynamic(const RunConfig& cfg, std::ostream& err) {
  const SpectralModel model = load_as<SpectralModel>(cfg.model_path, "spectral");
  const TauBall ball = make_ball(cfg);
  const auto report = dynamic::worst_case_spectral(model, ball, cfg.rel_tol);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  const auto ks = emitted_frequencies(model.grid_size(), cfg.full_grid);

  if (cfg.format == "csv") {
    std::string body = "# taurob v1, command=dynamic, lambda=" + fmt_double(report.lambda) +
                       ", c=" + fmt_double(report.c) + ", delta_mse=" + fmt_double(report.delta_mse) +
                       "\n";
    const std::string columns = "k,theta,row,col,nominal_se_re,nominal_se_im,worst_se_re,worst_se_im";
    body += "# columns=" + columns + "\n" + columns + "\n";
    for (int k : ks) {
      const auto& a = report.nominal_se[static_cast<std::size_t>(k)];
      const auto& b = report.worst_se[static_cast<std::size_t>(k)];
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          body += std::to_string(k) + "," + fmt_double(model.theta(k)) + "," + std::to_string(i) +
                  "," + std::to_string(j) + "," + fmt_double(a(i, j).real()) + "," +
                  fmt_double(a(i, j).imag()) + "," + fmt_double(b(i, j).real()) + "," +
                  fmt_double(b(i, j).imag()) + "\n";
    }
    return body;
  }

  Json thetas = Json::array();
  Json nominal = Json::array();
  Json worst = Json::array();
  for (int k : ks) {
    thetas.push_back(model.theta(k));
    nominal.push_back(io::to_json(report.nominal_se[static_cast<std::size_t>(k)]));
    worst.push_back(io::to_json(report.worst_se[static_cast<std::size_t>(k)]));
  }
  const double recomputed = divergence::spectral_tau_divergence(report.worst_model, model, ball.tau());
  Json doc{{"tau", report.tau},
           {"lambda", num(report.lambda)},
           {"c", report.c},
           {"recomputed_c", num(recomputed)},
           {"delta_mse", report.delta_mse},
           {"grid_size", model.grid_size()},
           {"theta", std::move(thetas)},
           {"nominal_Se", std::move(nominal)},
           {"worst_Se", std::move(worst)},
           {"worst_model", io::to_json(report.worst_model)}};
  return doc.dump(2) + "\n";
}

struct SweepRow {
  double tau;
  double c;
  double lambda;
  double delta_mse;
};

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_budget(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string run_sweep(const RunConfig& cfg) {
  check_taus(cfg);
  if (!(cfg.c_min > 0.0) || !(cfg.c_max >= cfg.c_min)) {
    throw ConfigError("sweep needs 0 < --c-min <= --c-max");
  }
  if (cfg.steps < 1) throw ConfigError("--steps must be >= 1");
  std::vector<double> cs;
  for (int i = 0; i < cfg.steps; ++i) {
    const double t = cfg.steps == 1 ? 0.0 : static_cast<double>(i) / (cfg.steps - 1);
    cs.push_back(cfg.c_min * std::pow(cfg.c_max / cfg.c_min, t));
  }

  const io::AnyModel model = load_any(cfg.model_path);
  std::vector<SweepRow> rows(cfg.taus.size() * cs.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double tau = cfg.taus[idx / cs.size()];
    const double c = cs[idx % cs.size()];
    const TauBall ball = TauBall::hard(tau, c);
    if (const auto* m = std::get_if<JointGaussian>(&model)) {
      const auto r = robust::worst_case_static(*m, ball, cfg.rel_tol);
      rows[idx] = {tau, c, r.lambda, r.delta_mse};
    } else {
      const auto r = dynamic::worst_case_spectral(std::get<SpectralModel>(model), ball, cfg.rel_tol);
      rows[idx] = {tau, c, r.lambda, r.delta_mse};
    }
  });

  if (cfg.format == "csv") {
    std::string body = csv_header("sweep", "tau,c,lambda,delta_mse");
    for (const auto& r : rows) {
      body += fmt_double(r.tau) + "," + fmt_double(r.c) + "," + fmt_double(r.lambda) + "," +
              fmt_double(r.delta_mse) + "\n";
    }
    return body;
  }
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"tau", r.tau}, {"c", r.c}, {"lambda", num(r.lambda)}, {"delta_mse", r.delta_mse}});
  }
  return Json{{"rows", std::move(out)}}.dump(2) + "\n";
}

std::string run_ball(const RunConfig& cfg) {
  if (!cfg.c || !(*cfg.c > 0.0)) throw ConfigError("ball needs --c > 0");
  if (!(cfg.var > 0.0)) throw ConfigError("--var must be positive");
  if (cfg.points < 2) throw ConfigError("--points must be >= 2");
  const double tau = single_tau(cfg);
  const auto points = robust::ball_boundary_scalar(cfg.mean, cfg.var, tau, *cfg.c, cfg.points);
  if (cfg.format == "csv") {
    std::string body = csv_header("ball", "mean,var");
    for (const auto& p : points) body += fmt_double(p.mean) + "," + fmt_double(p.var) + "\n";
    return body;
  }
  Json pts = Json::array();
  for (const auto& p : points) pts.push_back({p.mean, p.var});
  return Json{{"tau", tau}, {"c", *cfg.c}, {"nominal_mean", cfg.mean}, {"nominal_var", cfg.var},
              {"points", std::move(pts)}}
             .dump(2) +
         "\n";
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-o,--output", cfg.output_path, "Output file (default: stdout)");
  sub->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--rel-tol", cfg.rel_tol, "Solver tolerance on the divergence")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Seed for randomized checks")->capture_default_str();
}

void add_ball_mode(CLI::App* sub, RunConfig& cfg) {
  auto* c = sub->add_option("--c", cfg.c, "Divergence tolerance (hard constraint)");
  auto* l = sub->add_option("--lambda", cfg.lambda, "Fixed Lagrange multiplier (soft constraint)");
  c->excludes(l);
}

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("TAUROB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Worst-case statistics in tau-divergence balls around nominal Gaussian models",
               "taurob"};
  app.require_subcommand(1);

  auto* div = app.add_subcommand("divergence", "D_tau / S_tau between an actual and a nominal model");
  div->add_option("--model", cfg.model_path, "Nominal model file")->required();
  div->add_option("--actual", cfg.actual_path, "Actual model file")->required();
  div->add_option("--tau", cfg.taus, "tau in [0, 1]")->required()->delimiter(',');
  add_common(div, cfg);

  auto* stat = app.add_subcommand("static", "Least favorable statistics for a static model");
  stat->add_option("--model", cfg.model_path, "Nominal model file")->required();
  stat->add_option("--tau", cfg.taus, "tau in [0, 1]")->required()->delimiter(',');
  add_ball_mode(stat, cfg);
  stat->add_option("--verify-samples", cfg.verify_samples,
                   "Randomized Lagrangian samples for the entropy equivalence check");
  add_common(stat, cfg);

  auto* dyn = app.add_subcommand("dynamic", "Least favorable spectrum for a spectral model");
  dyn->add_option("--model", cfg.model_path, "Nominal model file")->required();
  dyn->add_option("--tau", cfg.taus, "tau in [0, 1]")->required()->delimiter(',');
  add_ball_mode(dyn, cfg);
  dyn->add_flag("--full-grid", cfg.full_grid, "Emit every grid frequency");
  add_common(dyn, cfg);

  auto* sweep = app.add_subcommand("sweep", "Delta MSE over a log-spaced tolerance grid");
  sweep->add_option("--model", cfg.model_path, "Nominal model file")->required();
  sweep->add_option("--tau", cfg.taus, "Comma-separated tau values")->required()->delimiter(',');
  sweep->add_option("--c-min", cfg.c_min)->capture_default_str();
  sweep->add_option("--c-max", cfg.c_max)->capture_default_str();
  sweep->add_option("--steps", cfg.steps)->capture_default_str();
  add_common(sweep, cfg);

  auto* ball = app.add_subcommand("ball", "Boundary of a scalar uncertainty ball");
  ball->add_option("--mean", cfg.mean, "Nominal mean")->required();
  ball->add_option("--var", cfg.var, "Nominal variance")->required();
  ball->add_option("--tau", cfg.taus, "tau in [0, 1]")->required()->delimiter(',');
  ball->add_option("--c", cfg.c, "Divergence tolerance")->required();
  ball->add_option("--points", cfg.points, "Mean positions scanned")->capture_default_str();
  add_common(ball, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  }

  // sweep and ball default to CSV unless --format was given.
  for (auto* sub : {sweep, ball}) {
    if (sub->parsed() && sub->count("--format") == 0) cfg.format = "csv";
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    std::string body;
    if (cfg.command == "divergence") body = run_divergence(cfg);
    else if (cfg.command == "static") body = run_static(cfg);
    else if (cfg.command == "dynamic") body = run_dynamic(cfg, err);
    else if (cfg.command == "sweep") body = run_sweep(cfg);
    else body = run_ball(cfg);

    if (cfg.output_path.empty()) {
      out << body;
    } else {
      io::write_file_atomic(cfg.output_path, body);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const InfeasibleMultiplier& e) {
    err << "error: " << e.what() << "\n";
    return kSolverInfeasible;
  } catch (const BracketFailure& e) {
    err << "error: unsatisfiable tolerance: " << e.what() << "\n";
    return kSolverInfeasible;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }
}

}  // namespace taurob::cli
