/*
 Copyright 2026 The impulsive-control Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef IMPULSIVE_CLI_HPP
#define IMPULSIVE_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "impulsive/controllability.hpp"
#include "impulsive/gramian.hpp"
#include "impulsive/io.hpp"
#include "impulsive/propagation.hpp"
#include "impulsive/synthesis.hpp"
#include "impulsive/system_model.hpp"
#include "impulsive/wave_model.hpp"

namespace impulsive::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kValidationError = 2,
  kNotControllable = 3,
  kInconclusive = 4,
};

struct RunConfig {
  std::string subcommand;
  std::string system_path;   // system JSON, or the wave model for wave-demo
  std::string control_path;  // simulate / duality-check
  std::string x0;            // vector literal or file; zero when empty
  std::string target;        // synthesize
  std::string phi;           // adjoint / duality-check
  std::string target_coeffs; // wave-demo
  std::optional<double> epsilon;
  std::optional<double> tolerance;
  std::optional<int> modes;
  bool free_impulses = false;
  bool emit_matrices = false;
  int samples = 101;
  std::filesystem::path output_dir = ".";
  int quadrature_nodes = 64;
  double rank_tol = kDefaultRankTol;
  std::uint64_t seed = kDefaultProbeSeed;
};

namespace detail {

using io::ConfigError;
using io::json;

/// "1,2,3", "[1, 2, 3]" or the path of a file holding a JSON array.
inline Vector parse_vector(const std::string& text, const std::string& flag) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) {
    return io::vector_from_json(io::read_json_file(text), flag);
  }
  std::string body = text;
  if (!body.empty() && body.front() == '[') {
    return io::vector_from_json(io::parse_json_text(body, flag), flag);
  }
  for (char& c : body) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream in(body);
  in.imbue(std::locale::classic());
  std::vector<double> xs;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw ConfigError(flag + ": cannot parse '" + tok + "' as a number");
    }
    xs.push_back(x);
  }
  if (xs.empty()) throw ConfigError(flag + ": empty vector");
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline Vector vector_or_zero(const std::string& text, const std::string& flag,
                             Eigen::Index n) {
  if (text.empty()) return Vector::Zero(n);
  Vector v = parse_vector(text, flag);
  if (v.size() != n) {
    throw ConfigError(flag + ": expected " + std::to_string(n) + " entries, got " +
                      std::to_string(v.size()));
  }
  return v;
}

inline ImpulsiveSystem load_system(const RunConfig& cfg) {
  if (cfg.system_path.empty()) throw ConfigError("--system is required");
  ImpulsiveSystem sys = io::system_from_json(io::read_json_file(cfg.system_path));
  require_valid(sys);
  return sys;
}

inline std::vector<double> uniform_grid(double b, int samples) {
  std::vector<double> grid;
  for (int i = 0; i < samples; ++i) grid.push_back(b * i / (samples - 1));
  grid.back() = b;
  return grid;
}

inline json spectrum(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return io::to_json(Vector(eig.eigenvalues()));
}

inline json control_to_json(const ControlPair& w) {
  json j;
  if (const auto* fb = std::get_if<AdjointFeedback>(&w.distributed)) {
    j["u"] = {{"adjoint_feedback", io::to_json(fb->phi)}};
  } else {
    const auto& pc = std::get<PiecewiseConstant>(w.distributed);
    json grids = json::array();
    json values = json::array();
    for (const auto& cells : pc.cells) {
      grids.push_back(cells.size());
      json vs = json::array();
      for (const auto& u : cells) vs.push_back(io::to_json(u));
      values.push_back(std::move(vs));
    }
    j["u"] = {{"grids", grids}, {"values", values}};
  }
  j["v"] = json::array();
  for (const auto& v : w.impulses) j["v"].push_back(io::to_json(v));
  return j;
}

inline json synthesis_to_json(const SynthesisResult& r) {
  return {{"epsilon", r.epsilon},
          {"phi_hat", io::to_json(r.phi_hat)},
          {"terminal_state", io::to_json(r.terminal_state)},
          {"predicted_error", io::to_json(r.predicted_error)},
          {"achieved_error", io::to_json(r.achieved_error)},
          {"identity_residual", r.identity_residual()},
          {"j_value", r.j_value},
          {"control", control_to_json(r.control)}};
}

inline std::string control_samples_csv(const ImpulsiveSystem& sys,
                                       const ControlLaw& law, int samples) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= sys.input_dim(); ++i) header.push_back("u_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (double t : uniform_grid(sys.horizon, samples)) {
    std::vector<double> row{t};
    const Vector u = control_value(sys, law, t);
    for (Eigen::Index i = 0; i < u.size(); ++i) row.push_back(u(i));
    rows.push_back(std::move(row));
  }
  return io::table_csv(header, rows);
}

inline std::string impulses_csv(const ControlPair& w, const ImpulsiveSystem& sys) {
  std::vector<std::string> header{"k", "t"};
  for (Eigen::Index i = 1; i <= sys.input_dim(); ++i) header.push_back("v_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (int k = 1; k <= sys.num_stages(); ++k) {
    std::vector<double> row{static_cast<double>(k), sys.time(k)};
    const auto& v = w.impulses[static_cast<std::size_t>(k - 1)];
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
    rows.push_back(std::move(row));
  }
  return io::table_csv(header, rows);
}

inline void emit_json(const RunConfig& cfg, const std::string& name, json j) {
  j["schema"] = io::kSchemaVersion;
  const std::string text = j.dump(2) + "\n";
  io::write_file_atomic(cfg.output_dir / name, text);
  std::cout << text;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int run_simulate(const RunConfig& cfg, const QuadratureConfig& q) {
  const auto sys = load_system(cfg);
  const ControlPair w = cfg.control_path.empty()
                            ? zero_control(sys)
                            : io::control_from_json(io::read_json_file(cfg.control_path), sys);
  const Vector x0 = vector_or_zero(cfg.x0, "--x0", sys.state_dim());
  const auto traj = simulate(sys, x0, w, uniform_grid(sys.horizon, cfg.samples), q);
  const auto path = cfg.output_dir / "trajectory.csv";
  io::write_file_atomic(path, io::trajectory_csv(traj, sys.state_dim()));
  std::cout << path.string() << '\n';
  return kOk;
}

inline int run_adjoint(const RunConfig& cfg) {
  const auto sys = load_system(cfg);
  if (cfg.phi.empty()) throw ConfigError("--phi is required");
  const Vector phi = vector_or_zero(cfg.phi, "--phi", sys.state_dim());
  const auto fb = adjoint_feedback(sys, phi);
  Trajectory traj;
  int next_stage = 1;
  for (double t : uniform_grid(sys.horizon, cfg.samples)) {
    while (next_stage <= sys.num_stages() && sys.time(next_stage) < t) {
      const double tk = sys.time(next_stage);
      traj.samples.push_back({tk, Side::kLeft, adjoint_state(sys, fb, tk)});
      traj.samples.push_back(
          {tk, Side::kRight, fb.post_impulse[static_cast<std::size_t>(next_stage - 1)]});
      ++next_stage;
    }
    if (next_stage <= sys.num_stages() && sys.time(next_stage) == t) continue;
    traj.samples.push_back({t, Side::kNone, adjoint_state(sys, fb, t)});
  }
  const auto path = cfg.output_dir / "adjoint.csv";
  io::write_file_atomic(path, io::trajectory_csv(traj, sys.state_dim()));
  std::cout << path.string() << '\n';
  return kOk;
}

inline int run_duality_check(const RunConfig& cfg, const QuadratureConfig& q) {
  const auto sys = load_system(cfg);
  if (cfg.phi.empty()) throw ConfigError("--phi is required");
  const ControlPair w = cfg.control_path.empty()
                            ? zero_control(sys)
                            : io::control_from_json(io::read_json_file(cfg.control_path), sys);
  const Vector x0 = vector_or_zero(cfg.x0, "--x0", sys.state_dim());
  const Vector phi = vector_or_zero(cfg.phi, "--phi", sys.state_dim());
  const auto terms = duality_terms(sys, x0, w, phi, q);
  emit_json(cfg, "duality.json",
            {{"lhs", terms.lhs},
             {"rhs", terms.rhs},
             {"gap", terms.gap()},
             {"relative_gap", std::abs(terms.gap()) / (1.0 + std::abs(terms.terminal_pairing))}});
  return kOk;
}

inline int run_gramian(const RunConfig& cfg, const QuadratureConfig& q) {
  const auto sys = load_system(cfg);
  const auto g = gramian_set(sys, q);
  emit_json(cfg, "gramian.json",
            {{"quadrature_nodes", q.nodes_per_subinterval()},
             {"theta", io::to_json(g.theta)},
             {"gamma", io::to_json(g.gamma)},
             {"theta_tilde", io::to_json(g.theta_tilde)},
             {"gamma_tilde", io::to_json(g.gamma_tilde)},
             {"total", io::to_json(g.total)},
             {"spectra",
              {{"theta", spectrum(g.theta)},
               {"gamma", spectrum(g.gamma)},
               {"theta_tilde", spectrum(g.theta_tilde)},
               {"gamma_tilde", spectrum(g.gamma_tilde)},
               {"total", spectrum(g.total)}}}});
  return kOk;
}

inline int run_check(const RunConfig& cfg, const QuadratureConfig& q) {
  const auto sys = load_system(cfg);
  ControllabilityOptions options;
  options.rank_tol = cfg.rank_tol;
  options.seed = cfg.seed;
  const auto report = controllability_report(sys, q, options);

  json probes = json::array();
  for (const auto& p : report.probes) {
    json samples = json::array();
    for (const auto& s : p.decay.samples) samples.push_back({s.epsilon, s.norm});
    json entry = {{"h", io::to_json(p.h)},
                  {"samples", samples},
                  {"converging", p.decay.converging}};
    entry["plateau"] = p.decay.plateau ? json(*p.decay.plateau) : json(nullptr);
    probes.push_back(std::move(entry));
  }
  json j = {{"verdict", to_string(report.verdict)},
            {"lambda_min", report.total.lambda_min},
            {"lambda_max", report.total.lambda_max},
            {"positive", report.total.positive},
            {"rank_tol", options.rank_tol},
            {"per_gramian_min_eigs",
             {{"theta", report.per_gramian[0].lambda_min},
              {"gamma", report.per_gramian[1].lambda_min},
              {"theta_tilde", report.per_gramian[2].lambda_min},
              {"gamma_tilde", report.per_gramian[3].lambda_min}}},
            {"resolvent_samples", probes},
            {"signals_agree", report.signals_agree}};
  j["kalman_rank"] = report.kalman_rank ? json(*report.kalman_rank) : json(nullptr);
  if (cfg.emit_matrices) {
    j["matrices"] = {{"theta", io::to_json(report.gramians.theta)},
                     {"gamma", io::to_json(report.gramians.gamma)},
                     {"theta_tilde", io::to_json(report.gramians.theta_tilde)},
                     {"gamma_tilde", io::to_json(report.gramians.gamma_tilde)},
                     {"total", io::to_json(report.gramians.total)}};
  }
  emit_json(cfg, "check.json", std::move(j));
  switch (report.verdict) {
    case Verdict::kControllable:
      return kOk;
    case Verdict::kNotControllable:
      return kNotControllable;
    case Verdict::kInconclusive:
      return kInconclusive;
  }
  return kInconclusive;
}

inline int run_synthesize(const RunConfig& cfg, const QuadratureConfig& q) {
  const auto sys = load_system(cfg);
  if (cfg.target.empty()) throw ConfigError("--target is required");
  const Vector h = vector_or_zero(cfg.target, "--target", sys.state_dim());
  const Vector x0 = vector_or_zero(cfg.x0, "--x0", sys.state_dim());

  json j;
  SynthesisResult result;
  if (cfg.tolerance) {
    const auto sched = steer_to_tolerance(sys, q, x0, h, *cfg.tolerance);
    result = sched.final;
    j["schedule"] = {{"epsilons", sched.epsilons},
                     {"errors", sched.errors},
                     {"reached", sched.reached},
                     {"plateau", sched.plateau}};
  } else {
    result = steer(sys, q, x0, h, *cfg.epsilon);
  }
  j["result"] = synthesis_to_json(result);
  if (cfg.samples > 0) {
    io::write_file_atomic(cfg.output_dir / "control.csv",
                          control_samples_csv(sys, result.control.distributed, cfg.samples));
  }
  io::write_file_atomic(cfg.output_dir / "impulses.csv", impulses_csv(result.control, sys));
  emit_json(cfg, "synthesis.json", std::move(j));
  return kOk;
}

inline int run_wave_demo(const RunConfig& cfg, const QuadratureConfig& q) {
  if (cfg.system_path.empty()) throw ConfigError("--model is required");
  WaveModel wm = io::wave_model_from_json(io::read_json_file(cfg.system_path));
  if (cfg.modes) wm = retruncate(std::move(wm), *cfg.modes);
  validate_wave_model(wm);

  WaveCoefficients target{std::vector<double>(static_cast<std::size_t>(wm.modes), 0.0),
                          std::vector<double>(static_cast<std::size_t>(wm.modes), 0.0)};
  if (!cfg.target_coeffs.empty()) {
    std::error_code ec;
    const json tj = std::filesystem::is_regular_file(cfg.target_coeffs, ec)
                        ? io::read_json_file(cfg.target_coeffs)
                        : io::parse_json_text(cfg.target_coeffs, "--target-coeffs");
    target = io::wave_coefficients_from_json(tj, "--target-coeffs");
    target.alpha.resize(static_cast<std::size_t>(wm.modes), 0.0);
    target.beta.resize(static_cast<std::size_t>(wm.modes), 0.0);
  }
  WaveDemoOptions options;
  options.free_impulses = cfg.free_impulses;
  options.rank_tol = cfg.rank_tol;
  const auto r = wave_demo(wm, target, cfg.epsilon.value_or(1e-6), q, options);

  std::vector<std::vector<double>> profile;
  for (const auto& row : r.profile) {
    for (std::size_t i = 0; i < r.thetas.size(); ++i) {
      profile.push_back({row.t, r.thetas[i], row.x[i]});
    }
  }
  io::write_file_atomic(cfg.output_dir / "profile.csv",
                        io::table_csv({"t", "theta", "x"}, profile));
  io::write_file_atomic(cfg.output_dir / "control_trace.csv",
                        control_samples_csv(r.system, r.synthesis.control.distributed,
                                            std::max(cfg.samples, 2)));
  emit_json(cfg, "wave_demo.json",
            {{"modes", wm.modes},
             {"impulse_mode", cfg.free_impulses ? "free" : "fixed"},
             {"gamma_gramian", io::to_json(r.gamma)},
             {"lambda_min_gamma", r.gamma_positivity.lambda_min},
             {"gamma_positive", r.gamma_positivity.positive},
             {"verdict", r.gamma_positivity.positive ? "controllable" : "inconclusive"},
             {"target", io::to_json(r.target)},
             {"final_profile_error", r.final_profile_error},
             {"synthesis", synthesis_to_json(r.synthesis)}});
  return kOk;
}

}  // namespace detail

/// Validates options that do not need any input file.
inline void validate_config(const RunConfig& cfg) {
  if (cfg.quadrature_nodes < 2) throw io::ConfigError("--quadrature-nodes must be >= 2");
  if (!(cfg.rank_tol > 0.0) || !(cfg.rank_tol < 1.0)) {
    throw io::ConfigError("--rank-tol must lie in (0, 1)");
  }
  if (cfg.samples < 0 || cfg.samples == 1) {
    throw io::ConfigError("--samples must be 0 or >= 2");
  }
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw io::ConfigError("--epsilon must be positive");
  if (cfg.tolerance && !(*cfg.tolerance > 0.0)) {
    throw io::ConfigError("--tolerance must be positive");
  }
  if (cfg.subcommand == "synthesize" && cfg.epsilon.has_value() == cfg.tolerance.has_value()) {
    throw io::ConfigError("synthesize needs exactly one of --epsilon or --tolerance");
  }
  if ((cfg.subcommand == "simulate" || cfg.subcommand == "adjoint") && cfg.samples < 2) {
    throw io::ConfigError("--samples must be >= 2 for " + cfg.subcommand);
  }
}

/// Executes one subcommand. Returns the process exit code.
inline int run(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    validate_config(cfg);
    const QuadratureConfig q(cfg.quadrature_nodes);
    if (cfg.subcommand == "simulate") return detail::run_simulate(cfg, q);
    if (cfg.subcommand == "adjoint") return detail::run_adjoint(cfg);
    if (cfg.subcommand == "duality-check") return detail::run_duality_check(cfg, q);
    if (cfg.subcommand == "gramian") return detail::run_gramian(cfg, q);
    if (cfg.subcommand == "check") return detail::run_check(cfg, q);
    if (cfg.subcommand == "synthesize") return detail::run_synthesize(cfg, q);
    if (cfg.subcommand == "wave-demo") {
      const QuadratureConfig wave_q(std::max(cfg.quadrature_nodes, 256));
      return detail::run_wave_demo(cfg, wave_q);
    }
    throw io::ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

/// Parses argv into a RunConfig and runs it.
inline int main_entry(int argc, char** argv) {
  CLI::App app{"Controllability analysis and steering for impulsive linear systems"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--quadrature-nodes", cfg.quadrature_nodes,
                 "Gauss-Legendre nodes per smooth subinterval")
      ->capture_default_str();
  app.add_option("--rank-tol", cfg.rank_tol, "Relative eigenvalue/singular value threshold")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for random resolvent probes")->capture_default_str();
  app.add_option("-o,--output-dir", cfg.output_dir, "Directory for output files")
      ->capture_default_str();

  auto add_system = [&](CLI::App* sub) {
    sub->add_option("--system", cfg.system_path, "System definition JSON")->required();
  };

  auto* simulate = app.add_subcommand("simulate", "Forward trajectory to CSV");
  add_system(simulate);
  simulate->add_option("--control", cfg.control_path, "Control JSON (default: zero control)");
  simulate->add_option("--x0", cfg.x0, "Initial state (literal or file; default 0)");
  simulate->add_option("--samples", cfg.samples, "Uniform time samples on [0,b]");

  auto* adjoint = app.add_subcommand("adjoint", "Adjoint trajectory to CSV");
  add_system(adjoint);
  adjoint->add_option("--phi", cfg.phi, "Terminal adjoint value")->required();
  adjoint->add_option("--samples", cfg.samples, "Uniform time samples on [0,b]");

  auto* duality = app.add_subcommand("duality-check", "Forward/adjoint pairing identity");
  add_system(duality);
  duality->add_option("--control", cfg.control_path, "Control JSON (default: zero control)");
  duality->add_option("--x0", cfg.x0, "Initial state");
  duality->add_option("--phi", cfg.phi, "Terminal adjoint value")->required();

  auto* gramian = app.add_subcommand("gramian", "The four controllability Gramians");
  add_system(gramian);

  auto* check = app.add_subcommand("check", "Approximate controllability verdict");
  add_system(check);
  check->add_flag("--emit-matrices", cfg.emit_matrices, "Include Gramian matrices");

  auto* synth = app.add_subcommand("synthesize", "Regularized minimum-energy steering");
  add_system(synth);
  synth->add_option("--target", cfg.target, "Target state h (literal or file)")->required();
  synth->add_option("--x0", cfg.x0, "Initial state (default 0)");
  synth->add_option("--epsilon", cfg.epsilon, "Regularization parameter");
  synth->add_option("--tolerance", cfg.tolerance, "Walk the epsilon schedule to this error");
  synth->add_option("--samples", cfg.samples, "Control samples in control.csv (0 = none)");

  auto* wave = app.add_subcommand("wave-demo", "Impulsive wave equation example");
  wave->add_option("--model", cfg.system_path, "Wave model JSON")->required();
  wave->add_option("--target-coeffs", cfg.target_coeffs,
                   "Target {\"alpha\": [...], \"beta\": [...]} (literal or file)");
  wave->add_option("--epsilon", cfg.epsilon, "Regularization parameter (default 1e-6)");
  wave->add_option("--modes", cfg.modes, "Truncation order M");
  wave->add_flag("--free-impulses", cfg.free_impulses,
                 "Treat impulse amplitudes as decision variables");
  wave->add_option("--samples", cfg.samples, "Control trace samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  return run(cfg);
}

}  // namespace impulsive::cli

#endif  // IMPULSIVE_CLI_HPP
