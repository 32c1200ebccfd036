#include "ergo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "ergo/classify.hpp"
#include "ergo/errors.hpp"
#include "ergo/io.hpp"
#include "ergo/lambdastar.hpp"
#include "ergo/leqg.hpp"
#include "ergo/problem_io.hpp"
#include "ergo/variational.hpp"

namespace ergo {

using nlohmann::json;

namespace {

struct HelpRequested {
  std::string text;
};

bool known_command(const std::string& c) {
  return std::find(std::begin(kCommands), std::end(kCommands), c) != std::end(kCommands);
}

ProblemSpec problem_from_value(const json& v) {
  if (v.is_string()) {
    try {
      return builtin(v.get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, std::string("problem: ") + e.what());
    }
  }
  return problem_from_json(v);
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string(key) + ": " + e.what());
  }
}

}  // namespace

json config_to_json(const RunConfig& cfg) {
  json j;
  j["problem"] = to_json(cfg.problem);
  j["command"] = cfg.command;
  if (cfg.R) j["R"] = *cfg.R;
  if (cfg.n) j["n"] = *cfg.n;
  j["tol"] = cfg.tol;
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  j["dt"] = cfg.dt;
  j["T"] = cfg.T;
  j["paths"] = cfg.paths;
  j["seed"] = cfg.seed;
  j["x0"] = cfg.x0;
  j["plot"] = cfg.plot;
  j["out"] = cfg.out;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config: expected a JSON object");
  RunConfig cfg;
  if (j.contains("problem")) {
    cfg.problem = problem_from_value(j.at("problem"));
    cfg.problem_name = cfg.problem.name;
  }
  if (j.contains("command")) cfg.command = get_field<std::string>(j, "command");
  if (j.contains("R")) cfg.R = get_field<double>(j, "R");
  if (j.contains("n")) cfg.n = get_field<std::size_t>(j, "n");
  if (j.contains("tol")) cfg.tol = get_field<double>(j, "tol");
  if (j.contains("lambda")) {
    const json& l = j.at("lambda");
    cfg.lambda = l.is_number() ? format_double(l.get<double>()) : get_field<std::string>(j, "lambda");
  }
  if (j.contains("dt")) cfg.dt = get_field<double>(j, "dt");
  if (j.contains("T")) cfg.T = get_field<double>(j, "T");
  if (j.contains("paths")) cfg.paths = get_field<std::size_t>(j, "paths");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("x0")) cfg.x0 = get_field<double>(j, "x0");
  if (j.contains("plot")) cfg.plot = get_field<bool>(j, "plot");
  if (j.contains("out")) cfg.out = get_field<std::string>(j, "out");
  return cfg;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Ergodic Bellman equation toolkit"};
  std::string problem, config, command, lambda, out;
  double R = 0, tol = 0, dt = 0, T = 0, x0 = 0;
  std::size_t n = 0, paths = 0;
  std::uint64_t seed = 0;
  bool plot = false;
  auto* o_problem = app.add_option("--problem", problem, "catalog name");
  auto* o_config = app.add_option("--config", config, "JSON config file");
  auto* o_command = app.add_option("--command", command, "validate | lambda-star | solve | classify | simulate | leqg | duality | perturb");
  auto* o_R = app.add_option("--R", R, "domain radius");
  auto* o_n = app.add_option("--n", n, "odd node count");
  auto* o_tol = app.add_option("--tol", tol, "lambda* tolerance");
  auto* o_lambda = app.add_option("--lambda", lambda, "number, star, star+d, star-d or plus");
  auto* o_dt = app.add_option("--dt", dt, "time step");
  auto* o_T = app.add_option("--T", T, "horizon");
  auto* o_paths = app.add_option("--paths", paths, "Monte Carlo paths");
  auto* o_seed = app.add_option("--seed", seed, "RNG seed");
  auto* o_x0 = app.add_option("--x0", x0, "starting point");
  app.add_flag("--plot", plot, "emit SVG plots");
  auto* o_out = app.add_option("--out", out, "output directory");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("ergo");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }

  RunConfig cfg;
  if (*o_config) {
    std::ifstream in(config);
    if (!in) throw Error(ErrorKind::ConfigError, "config: cannot read '" + config + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ConfigError, std::string("config: ") + e.what());
    }
    cfg = config_from_json(j);
  }
  if (*o_problem) {
    cfg.problem = problem_from_value(json(problem));
    cfg.problem_name = problem;
  }
  if (*o_command) cfg.command = command;
  if (*o_R) cfg.R = R;
  if (*o_n) cfg.n = n;
  if (*o_tol) cfg.tol = tol;
  if (*o_lambda) cfg.lambda = lambda;
  if (*o_dt) cfg.dt = dt;
  if (*o_T) cfg.T = T;
  if (*o_paths) cfg.paths = paths;
  if (*o_seed) cfg.seed = seed;
  if (*o_x0) cfg.x0 = x0;
  if (plot) cfg.plot = true;
  if (*o_out) cfg.out = out;

  if (cfg.command.empty()) throw Error(ErrorKind::ConfigError, "missing required field 'command'");
  if (!known_command(cfg.command)) throw Error(ErrorKind::ConfigError, "command: unknown value '" + cfg.command + "'");
  if (cfg.problem_name.empty() && cfg.problem.name.empty()) {
    throw Error(ErrorKind::ConfigError, "missing required field 'problem'");
  }
  if (cfg.R && !(*cfg.R > 0.0)) throw Error(ErrorKind::ConfigError, "R: must be positive");
  if (cfg.n && (*cfg.n < 5 || *cfg.n % 2 == 0)) throw Error(ErrorKind::ConfigError, "n: must be odd and >= 5");
  if (!(cfg.tol > 0.0)) throw Error(ErrorKind::ConfigError, "tol: must be positive");
  if (!(cfg.dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt: must be positive");
  if (!(cfg.T > 0.0)) throw Error(ErrorKind::ConfigError, "T: must be positive");
  if (cfg.paths == 0) throw Error(ErrorKind::ConfigError, "paths: must be positive");
  if (cfg.command != "leqg" && cfg.command != "validate" && !cfg.problem.is_pde()) {
    throw Error(ErrorKind::ConfigError, "problem: command '" + cfg.command + "' needs a 1-D problem");
  }
  if (cfg.command == "solve" && !cfg.lambda) throw Error(ErrorKind::ConfigError, "missing required field 'lambda'");
  return cfg;
}

namespace {

namespace fs = std::filesystem;

struct Context {
  const RunConfig& cfg;
  std::ostream& log;
  fs::path dir;
  json summary;
  std::optional<LambdaStarResult> star;

  std::string path(const std::string& file) const { return (dir / file).string(); }

  const LambdaStarResult& lambda_star_result() {
    if (!star) {
      LambdaStarOptions opts;
      if (cfg.R) {
        std::vector<double> radii;
        for (double r : opts.radii) {
          if (r < *cfg.R) radii.push_back(r);
        }
        radii.push_back(*cfg.R);
        opts.radii = radii;
        if (cfg.n) opts.h = 2.0 * *cfg.R / static_cast<double>(*cfg.n - 1);
      }
      star = lambda_star(cfg.problem, cfg.tol, opts);
    }
    return *star;
  }

  Grid solve_grid() const {
    const double R = cfg.R.value_or(cfg.problem.pde().domain_radius);
    return make_grid(R, cfg.n.value_or(odd_count_for_spacing(R, 0.008)));
  }

  void plot(const std::string& file, const std::string& title, const std::string& ylabel,
            std::vector<PlotSeries> series) const {
    if (cfg.plot) write_file_atomic(path(file), line_plot_svg(title, "x", ylabel, series));
  }
};

struct LambdaChoice {
  double value = 0.0;
  bool is_star = false;
  std::optional<double> plus_K;  // second-branch quadratic boundary data
};

LambdaChoice resolve_lambda(Context& ctx, const std::string& text) {
  LambdaChoice ch;
  if (text == "star") {
    ch.value = ctx.lambda_star_result().lambda_star;
    ch.is_star = true;
    return ch;
  }
  if (text == "plus") {
    const auto view = leqg_view(ctx.cfg.problem.pde());
    if (!view) throw Error(ErrorKind::ConfigError, "lambda: 'plus' needs a linear-quadratic problem");
    const double Kp = riccati_roots_1d(view->D, view->M, view->a, view->ahat).second;
    auto one = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
    const LeqgSolution s = assemble_with(one(Kp), one(view->D), one(view->M), one(view->a), one(view->ahat),
                                         Eigen::VectorXd::Constant(1, view->v));
    ch.value = s.lambda + view->c0;
    ch.plus_K = Kp;
    return ch;
  }
  double offset = 0.0;
  std::string num = text;
  bool relative = false;
  if (text.rfind("star", 0) == 0) {
    relative = true;
    num = text.substr(4);
  }
  try {
    std::size_t used = 0;
    offset = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(num);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "lambda: cannot parse '" + text + "'");
  }
  ch.value = relative ? ctx.lambda_star_result().lambda_star + offset : offset;
  return ch;
}

GridSolution solution_for(Context& ctx, const LambdaChoice& ch) {
  if (ch.is_star) return ctx.lambda_star_result().w_star;
  const Grid g = ctx.solve_grid();
  std::optional<Field> bnd;
  if (ch.plus_K) {
    const double K = *ch.plus_K;
    const auto view = leqg_view(ctx.cfg.problem.pde());
    const double e = -view->v / (view->D + K * view->ahat);
    bnd = sample(g, [K, e](double x) { return 0.5 * K * x * x + e * x; });
  }
  return solve_dirichlet(ctx.cfg.problem, g, ch.value, bnd, bnd);
}

void write_solution(Context& ctx, const GridSolution& sol, double residual_lambda, const std::string& stem) {
  const Field dW = derivative(sol.W);
  const Field res = residual(ctx.cfg.problem, sol.grid, sol.W, residual_lambda);
  CsvTable t({"x", "W", "dW", "residual"});
  for (std::size_t i = 0; i < sol.grid.size(); ++i) t.add_row({sol.grid.x(i), sol.W[i], dW[i], res[i]});
  t.write(ctx.path(stem + ".csv"));
  ctx.plot(stem + ".svg", stem, "W", {{"W", sol.grid.nodes(), sol.W.values}});
}

json classification_json(const Classification& c) {
  auto side = [](const SideEvidence& e) {
    return json{{"tail", e.tail},
                {"scale_inner", e.scale_inner},
                {"scale_outer", e.scale_outer},
                {"speed_inner", e.speed_inner},
                {"speed_outer", e.speed_outer}};
  };
  json j{{"verdict", to_string(c.verdict)},
         {"scale_left", to_string(c.scale_left)},
         {"scale_right", to_string(c.scale_right)},
         {"probe_radius", c.probe_radius},
         {"left", side(c.left)},
         {"right", side(c.right)}};
  j["speed_mass"] = std::isfinite(c.speed_mass) ? json(c.speed_mass) : json("Infinity");
  return j;
}

int cmd_validate(Context& ctx) {
  const AssumptionReport rep = validate_assumptions(ctx.cfg.problem, ctx.cfg.R.value_or(12.0));
  ctx.summary["assumptions"] = to_json(rep);
  ctx.log << "A1 " << rep.a1_passed << "  A2 " << rep.a2_passed << "  A3' " << rep.a3_passed << " (" << rep.a3_note
          << ")\n";
  return rep.all_passed() ? 0 : 1;
}

int cmd_lambda_star(Context& ctx) {
  const LambdaStarResult& r = ctx.lambda_star_result();
  ctx.summary["lambda_star"] = r.lambda_star;
  ctx.summary["method"] = to_string(r.method);
  ctx.summary["kappa"] = r.kappa ? json(*r.kappa) : json(nullptr);
  ctx.summary["converged"] = r.converged;
  ctx.summary["heuristic"] = r.heuristic;
  ctx.summary["trace_monotone"] = r.trace_monotone;
  ctx.summary["polish_lambda"] = r.polish_lambda;
  ctx.summary["w_star_residual_norm"] = r.w_star.residual_norm;
  if (!r.note.empty()) ctx.summary["note"] = r.note;
  CsvTable t({"R", "lambda0"});
  for (const auto& [R, l] : r.R_trace) t.add_row({R, l});
  t.write(ctx.path("r_trace.csv"));
  write_solution(ctx, r.w_star, r.polish_lambda, "w_star");
  if (r.kappa) {
    const double k = *r.kappa;
    std::vector<double> phi;
    for (double w : r.w_star.W.values) phi.push_back(std::exp(k * w));
    ctx.plot("phi.svg", "phi = exp(kappa W*)", "phi", {{"phi", r.w_star.grid.nodes(), phi}});
  }
  ctx.log << "lambda* = " << format_double(r.lambda_star) << " (" << to_string(r.method) << ")\n";
  return 0;
}

int cmd_solve(Context& ctx) {
  const LambdaChoice ch = resolve_lambda(ctx, *ctx.cfg.lambda);
  const GridSolution sol = solution_for(ctx, ch);
  ctx.summary["lambda"] = sol.lambda;
  ctx.summary["residual_norm"] = sol.residual_norm;
  ctx.summary["iterations"] = sol.iterations;
  ctx.summary["offset"] = sol.offset;
  ctx.summary["normalized_at"] = sol.normalized_at;
  write_solution(ctx, sol, ch.is_star ? ctx.lambda_star_result().polish_lambda : sol.lambda, "solution");
  ctx.log << "solved at lambda = " << format_double(sol.lambda) << ", residual " << sol.residual_norm << "\n";
  return 0;
}

int cmd_classify(Context& ctx) {
  const LambdaChoice ch = resolve_lambda(ctx, ctx.cfg.lambda.value_or("star"));
  const GridSolution sol = solution_for(ctx, ch);
  const Classification c = classify_solution(ctx.cfg.problem, sol);
  ctx.summary["lambda"] = ch.value;
  ctx.summary["classification"] = classification_json(c);
  ctx.summary["verdict"] = to_string(c.verdict);
  if (c.invariant_density) {
    write_field_csv(ctx.path("invariant_density.csv"), *c.invariant_density, "density");
    ctx.plot("invariant_density.svg", "invariant density", "p",
             {{"p", c.invariant_density->grid.nodes(), c.invariant_density->values}});
  }
  ctx.log << "verdict: " << to_string(c.verdict) << "\n";
  return 0;
}

int cmd_simulate(Context& ctx) {
  const LambdaChoice ch = resolve_lambda(ctx, ctx.cfg.lambda.value_or("star"));
  const GridSolution sol = solution_for(ctx, ch);
  const DriftField d = drift_of(ctx.cfg.problem, sol);
  const SimulationReport rep = simulate_em(d, ctx.cfg.x0, ctx.cfg.T, ctx.cfg.dt, ctx.cfg.paths, ctx.cfg.seed);
  ctx.summary["lambda"] = ch.value;
  ctx.summary["n_paths"] = rep.n_paths;
  ctx.summary["killed"] = rep.killed;
  ctx.summary["exit_radius"] = rep.exit_radius;
  ctx.summary["exit_fraction_final"] = rep.exit_fraction.back();
  ctx.summary["inside_fraction"] = rep.inside_fraction;
  ctx.summary["drift_extrapolated"] = d.extrapolated;
  write_field_csv(ctx.path("histogram.csv"), rep.occupation, "density");
  CsvTable t({"t", "exit_fraction", "mean"});
  for (std::size_t j = 0; j < rep.times.size(); ++j) t.add_row({rep.times[j], rep.exit_fraction[j], rep.mean_path[j]});
  t.write(ctx.path("exit.csv"));
  std::vector<PlotSeries> hist{{"occupation", rep.occupation.grid.nodes(), rep.occupation.values}};
  if (ch.is_star) {
    try {
      const Measure1D mu = invariant_density(d);
      hist.push_back({"invariant", mu.grid.nodes(), mu.density.values});
      double l1 = 0.0;
      for (std::size_t k = 0; k < rep.occupation.size(); ++k) {
        l1 += std::abs(rep.occupation[k] - mu.density.at(rep.occupation.grid.x(k))) * rep.bin_width;
      }
      ctx.summary["l1_to_invariant"] = l1;
    } catch (const Error& e) {
      ctx.summary["invariant_note"] = e.what();
    }
  }
  ctx.plot("histogram.svg", "occupation density", "density", hist);

  if (!ch.is_star && ch.value > ctx.lambda_star_result().lambda_star) {
    std::vector<double> times;
    const double tmax = std::min(ctx.cfg.T, 6.0);
    for (int k = 1; k <= 12; ++k) times.push_back(tmax * k / 12.0);
    try {
      const DecayFit fit = decay_rate(ctx.cfg.problem, sol, ctx.lambda_star_result().lambda_star, {-1.0, 1.0},
                                      ctx.cfg.x0, times, ctx.cfg.paths, ctx.cfg.dt, ctx.cfg.seed);
      ctx.summary["decay"] = {{"rho", fit.rho}, {"lower_bound", fit.lower_bound}, {"c_low", fit.c_low}};
      CsvTable dt({"t", "estimate", "stderr"});
      std::vector<double> ts, ys, fitted;
      for (const auto& p : fit.points) {
        dt.add_row({p.t, p.estimate, p.stderr_});
        ts.push_back(p.t);
        ys.push_back(p.estimate > 0 ? std::log(p.estimate) : NAN);
      }
      dt.write(ctx.path("decay.csv"));
      if (ctx.cfg.plot) {
        write_file_atomic(ctx.path("decay.svg"),
                          line_plot_svg("decay of E[1_[-1,1](X_t)]", "t", "log estimate", {{"log estimate", ts, ys}}));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientMass) throw;
      ctx.summary["decay_note"] = e.what();
    }
  }
  ctx.log << "simulated " << rep.n_paths << " paths, killed " << rep.killed << "\n";
  return 0;
}

int cmd_leqg(Context& ctx) {
  const ProblemSpec& p = ctx.cfg.problem;
  LeqgSolution s;
  if (p.is_pde()) {
    const auto o = leqg_oracle(p.pde());
    if (!o) throw Error(ErrorKind::ConfigError, "problem: not in the linear-quadratic family");
    s = *o;
  } else {
    s = assemble(p.leqg());
  }
  ctx.summary["K"] = matrix_to_json(s.K);
  ctx.summary["e"] = vector_to_json(s.e);
  ctx.summary["lambda"] = s.lambda;
  ctx.summary["stable"] = s.stable;
  ctx.summary["stability_margin"] = s.stability_margin;
  ctx.summary["riccati_residual"] = s.riccati_residual;
  ctx.summary["linear_residual"] = s.linear_residual;
  ctx.log << "lambda = " << format_double(s.lambda) << "\n";
  return 0;
}

int cmd_duality(Context& ctx) {
  const DualityReport rep = duality_check(ctx.cfg.problem, ctx.cfg.problem.pde().vbar, {}, ctx.cfg.tol);
  ctx.summary["lambda_star_of_V"] = rep.lambda_star_of_V;
  ctx.summary["pairing"] = rep.pairing;
  ctx.summary["J_at_mu_star"] = rep.J_at_mu_star;
  ctx.summary["gap"] = rep.gap;
  ctx.summary["moment_lhs"] = rep.moment_lhs;
  ctx.summary["moment_rhs"] = rep.moment_rhs;
  ctx.summary["truncation_mass"] = rep.truncation_mass;
  ctx.summary["best_test"] = rep.best_test;
  write_field_csv(ctx.path("mu_star.csv"), rep.mu_star.density, "density");
  ctx.plot("mu_star.svg", "invariant measure", "density", {{"mu*", rep.mu_star.grid.nodes(), rep.mu_star.density.values}});
  ctx.log << "gap = " << rep.gap << "\n";
  return 0;
}

int cmd_perturb(Context& ctx) {
  const Pde1D& p = ctx.cfg.problem.pde();
  const CoefficientModel1D base = p.vbar.is_constant() && p.vbar.constant == 0.0 ? CoefficientModel1D::bump(1.0, 0.0, 1.0)
                                                                                  : p.vbar;
  const std::vector<int> ns{1, 2, 4, 8, 16};
  std::vector<CoefficientModel1D> seq;
  for (int k : ns) seq.push_back(base.scaled(1.0 / k));
  const PerturbationTable tab = perturbation_sweep(ctx.cfg.problem, seq, 2.0, ctx.cfg.tol);
  CsvTable t({"n", "lambda", "delta", "sup_distance"});
  json rows = json::array();
  for (const auto& r : tab.rows) {
    const int nn = ns[r.index];
    t.add_row({static_cast<double>(nn), r.lambda, r.delta, r.sup_distance});
    rows.push_back({{"n", nn}, {"lambda", r.lambda}, {"delta", r.delta}, {"sup_distance", r.sup_distance}});
  }
  t.write(ctx.path("perturbation.csv"));
  ctx.summary["lambda_base"] = tab.lambda_base;
  ctx.summary["rows"] = rows;
  ctx.summary["perturbation"] = to_json(base);
  return 0;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log) {
  Context ctx{cfg, log, fs::path(cfg.out), json::object(), std::nullopt};
  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "out: cannot create '" + cfg.out + "': " + ec.message());
  ctx.summary["version"] = ERGO_VERSION;
  ctx.summary["config"] = config_to_json(cfg);

  int status = 0;
  try {
    if (cfg.command == "validate") status = cmd_validate(ctx);
    else if (cfg.command == "lambda-star") status = cmd_lambda_star(ctx);
    else if (cfg.command == "solve") status = cmd_solve(ctx);
    else if (cfg.command == "classify") status = cmd_classify(ctx);
    else if (cfg.command == "simulate") status = cmd_simulate(ctx);
    else if (cfg.command == "leqg") status = cmd_leqg(ctx);
    else if (cfg.command == "duality") status = cmd_duality(ctx);
    else if (cfg.command == "perturb") status = cmd_perturb(ctx);
    else throw Error(ErrorKind::ConfigError, "command: unknown value '" + cfg.command + "'");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    ctx.summary["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    status = 1;
  }
  ctx.summary["status"] = status;
  write_file_atomic(ctx.path("summary.json"), ctx.summary.dump(2) + "\n");
  return status;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_config(args);
    const int status = execute(cfg, out);
    if (status != 0) err << "numerical failure; see " << (fs::path(cfg.out) / "summary.json").string() << "\n";
    return status;
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::UnknownProblem ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ergo
