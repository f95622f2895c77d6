#include "painwhit/cli.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "painwhit/asymptotics.hpp"
#include "painwhit/laxpair.hpp"
#include "painwhit/whitham.hpp"

namespace painwhit::cli {

namespace {

int log_level() {
  static const int lvl = [] {
    const char* v = std::getenv("PW_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug" || s == "2") return 2;
    if (s == "info" || s == "1") return 1;
    return 0;
  }();
  return lvl;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[painwhit] " << msg << "\n";
}

nlohmann::json params_json(const painleve::ThetaParams& p) {
  return {
      {"theta0", p.theta0}, {"theta1", p.theta1}, {"thetax", p.thetax},
      {"thetainf", p.thetainf}, {"k1", p.k1}, {"k2", p.k2},
      {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta},
  };
}

std::string default_out(Mode m, const std::string& fmt) {
  std::string base = mode_name(m);
  const bool csv_mode = (m == Mode::PiIntegrate || m == Mode::PviIntegrate ||
                         m == Mode::PiWhitham || m == Mode::PviModulate) &&
                        fmt != "json";
  return base + (csv_mode ? ".csv" : ".json");
}

struct ThetaSpec {
  double theta0 = 0, theta1 = 0, thetax = 0;
  std::optional<double> thetainf, k1, k2;
};

// resolve thetas vs (k1, k2); contradictions are config errors
painleve::ThetaParams resolve_thetas(const ThetaSpec& t) {
  const double sum = -(t.theta0 + t.theta1 + t.thetax);
  double tinf;
  if (t.k1 || t.k2) {
    if (!(t.k1 && t.k2)) {
      throw CLI::ValidationError("--k1 and --k2 must be given together");
    }
    if (std::abs(*t.k1 + *t.k2 - sum) > 1e-10 * std::max(1.0, std::abs(sum))) {
      throw CLI::ValidationError("k1 + k2 must equal -(theta0 + theta1 + thetax)");
    }
    tinf = *t.k1 - *t.k2;
    if (t.thetainf && std::abs(*t.thetainf - tinf) > 1e-10 * std::max(1.0, std::abs(tinf))) {
      throw CLI::ValidationError("thetainf contradicts k1 - k2");
    }
  } else if (t.thetainf) {
    tinf = *t.thetainf;
  } else {
    throw CLI::ValidationError("one of --thetainf or (--k1, --k2) is required");
  }
  return painleve::ThetaParams::from_thetas(t.theta0, t.theta1, t.thetax, tinf);
}

void add_theta_options(CLI::App* sub, ThetaSpec& t, bool required_inf = true) {
  sub->add_option("--theta0", t.theta0, "theta_0");
  sub->add_option("--theta1", t.theta1, "theta_1");
  sub->add_option("--thetax", t.thetax, "theta_x");
  auto* o = sub->add_option("--thetainf", [&t](const CLI::results_t& r) {
    t.thetainf = std::stod(r[0]);
    return true;
  }, "theta_inf");
  o->expected(1);
  (void)required_inf;
  sub->add_option("--k1", [&t](const CLI::results_t& r) {
    t.k1 = std::stod(r[0]);
    return true;
  }, "k_1 (with --k2, alternative to --thetainf)")->expected(1);
  sub->add_option("--k2", [&t](const CLI::results_t& r) {
    t.k2 = std::stod(r[0]);
    return true;
  }, "k_2")->expected(1);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

int finish(const RunConfig& cfg, std::ostream& summary_out, const std::string& status,
           const std::string& stop_reason, nlohmann::json metrics) {
  nlohmann::json j;
  j["mode"] = mode_name(cfg.mode);
  j["params"] = params_json(cfg.params);
  j["seed"] = cfg.seed;
  j["status"] = status;
  if (!stop_reason.empty()) j["stop_reason"] = stop_reason;
  j["metrics"] = std::move(metrics);
  summary_out << j.dump(2) << "\n";
  return status == "ok" ? 0 : 1;
}

int run_pi_integrate(const RunConfig& cfg, std::ostream& summary_out) {
  ode::Options oo{cfg.rtol, cfg.atol};
  const painleve::OdeState init{cfg.x0, cfg.y0, cfg.dy0};
  const auto kind = cfg.frozen_X ? painleve::RhsKind::PiFrozen : painleve::RhsKind::PiDriven;
  const double bigX = cfg.frozen_X.value_or(0.0);
  const auto tr = painleve::integrate(kind, init, cfg.params, bigX, cfg.x_end, oo);

  auto os = open_out(cfg.out_path);
  painleve::write_trajectory_csv(os, tr);

  auto f1_at = [&](const painleve::OdeState& s) {
    return painleve::pi_first_integral(s, cfg.frozen_X.value_or(s.x));
  };
  nlohmann::json metrics{
      {"points", tr.size()},
      {"x_reached", tr.x_end()},
      {"F1_initial", f1_at(tr.front())},
      {"F1_final", f1_at(tr.back())},
      {"F1_drift", f1_at(tr.back()) - f1_at(tr.front())},
  };
  const bool ok = tr.stop() == ode::StopReason::Completed;
  return finish(cfg, summary_out, ok ? "ok" : "numerical-stop",
                ok ? "" : ode::to_string(tr.stop()), std::move(metrics));
}

int run_pvi_integrate(const RunConfig& cfg, std::ostream& summary_out) {
  ode::Options oo{cfg.rtol, cfg.atol};
  const painleve::OdeState init{cfg.x0, cfg.y0, cfg.dy0};
  const auto tr =
      painleve::integrate(painleve::RhsKind::Pvi, init, cfg.params, 0.0, cfg.x_end, oo);
  auto os = open_out(cfg.out_path);
  painleve::write_trajectory_csv(os, tr);
  nlohmann::json metrics{
      {"points", tr.size()},
      {"x_reached", tr.x_end()},
      {"y_final", tr.back().y},
      {"ratio_final", tr.back().y / tr.back().x},
  };
  const bool ok = tr.stop() == ode::StopReason::Completed;
  return finish(cfg, summary_out, ok ? "ok" : "numerical-stop",
                ok ? "" : ode::to_string(tr.stop()), std::move(metrics));
}

int run_pi_whitham(const RunConfig& cfg, std::ostream& summary_out) {
  whitham::PiWhithamOptions wo;
  wo.rtol = cfg.rtol;
  wo.atol = cfg.atol;
  const auto run = whitham::solve_pi_whitham({cfg.X0, cfg.F0}, cfg.X_end, wo);
  auto os = open_out(cfg.out_path);
  whitham::write_modulation_csv(os, run);
  nlohmann::json metrics{
      {"points", run.points.size()},
      {"X_reached", run.points.back().X},
      {"F_final", run.points.back().F},
  };
  const bool ok = run.stop == ode::StopReason::Completed;
  return finish(cfg, summary_out, ok ? "ok" : "numerical-stop",
                ok ? "" : ode::to_string(run.stop), std::move(metrics));
}

int run_pvi_modulate(const RunConfig& cfg, std::ostream& summary_out) {
  whitham::PviWhithamOptions wo;
  wo.rtol = cfg.rtol;
  wo.atol = cfg.atol;
  const double F0 = cfg.family_start ? -2.0 * cfg.params.k1 * cfg.params.k2 * cfg.X0 : cfg.F0;
  const auto run = whitham::solve_pvi_whitham({cfg.X0, F0}, cfg.params, cfg.X_end, wo);
  auto os = open_out(cfg.out_path);
  whitham::write_modulation_csv(os, run);
  nlohmann::json metrics{
      {"points", run.points.size()},
      {"X_reached", run.points.back().X},
      {"F_final", run.points.back().F},
  };
  const bool ok = run.stop == ode::StopReason::Completed;
  return finish(cfg, summary_out, ok ? "ok" : "numerical-stop",
                ok ? "" : ode::to_string(run.stop), std::move(metrics));
}

int run_pvi_curve(const RunConfig& cfg, std::ostream& summary_out) {
  const auto curve = whitham::build_curve(cfg.X0, cfg.F6, cfg.params);
  nlohmann::json j;
  j["X"] = curve.X;
  j["F6"] = curve.F6;
  j["a"] = curve.a;
  j["c_coeffs"] = curve.c;
  j["disc_coeffs"] = curve.disc;
  std::string status = "ok";
  std::string reason;
  try {
    const auto bp = whitham::branch_points(curve);
    j["branch_points"] = bp.roots;
    j["ovals"] = nlohmann::json::array();
    for (const auto& o : bp.ovals) {
      const auto av = whitham::cycle_averages(curve, o, bp);
      j["ovals"].push_back({{"ylo", o.first},
                            {"yhi", o.second},
                            {"ybar", av.ybar},
                            {"y2bar", av.y2bar},
                            {"period", av.period},
                            {"degenerate", av.degenerate}});
    }
  } catch (const whitham::NoCycleError& e) {
    status = "numerical-stop";
    reason = "no-cycle";
    j["error"] = e.what();
  }
  auto os = open_out(cfg.out_path);
  os << j.dump(2) << "\n";
  nlohmann::json metrics{{"ovals", j.contains("ovals") ? j["ovals"].size() : 0}};
  return finish(cfg, summary_out, status, reason, std::move(metrics));
}

int run_pvi_lax_verify(const RunConfig& cfg, std::ostream& summary_out) {
  ode::Options oo{cfg.rtol, cfg.atol};
  const painleve::OdeState init{cfg.x0, cfg.y0, cfg.dy0};
  const auto tr =
      painleve::integrate(painleve::RhsKind::Pvi, init, cfg.params, 0.0, cfg.x_end, oo);
  if (tr.stop() != ode::StopReason::Completed) {
    auto os = open_out(cfg.out_path);
    os << nlohmann::json({{"error", "trajectory stopped early"},
                          {"stop_reason", ode::to_string(tr.stop())}})
              .dump(2)
       << "\n";
    return finish(cfg, summary_out, "numerical-stop", ode::to_string(tr.stop()), {});
  }

  const double lo = std::min(tr.x_begin(), tr.x_end());
  const double hi = std::max(tr.x_begin(), tr.x_end());
  const double margin = 0.05 * (hi - lo);
  std::vector<double> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(lo + margin + (hi - lo - 2 * margin) * i / 4.0);

  std::mt19937_64 gen(cfg.seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979324);
  std::vector<std::complex<double>> zs;
  const double zr = 10.0 * std::max(1.0, std::abs(hi));
  for (int i = 0; i < 8; ++i) zs.push_back(std::polar(zr, ang(gen)));

  const auto rep = laxpair::zero_curvature_residual_pvi(tr, cfg.params, xs, zs);

  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["fd_step"] = rep.fd_step;
  j["max_residual"] = rep.max_residual;
  j["threshold"] = cfg.lax_threshold;
  j["records"] = nlohmann::json::array();
  for (const auto& s : rep.samples) {
    j["records"].push_back({{"x", s.x},
                            {"z_re", s.z.real()},
                            {"z_im", s.z.imag()},
                            {"residual_norm", s.residual}});
  }
  auto os = open_out(cfg.out_path);
  os << j.dump(2) << "\n";
  const bool ok = rep.max_residual <= cfg.lax_threshold;
  nlohmann::json metrics{{"max_residual", rep.max_residual},
                         {"threshold", cfg.lax_threshold},
                         {"samples", rep.samples.size()}};
  return finish(cfg, summary_out, ok ? "ok" : "numerical-stop",
                ok ? "" : "zero-curvature-residual-above-threshold", std::move(metrics));
}

int run_pvi_theorem2(const RunConfig& cfg, std::ostream& summary_out) {
  if (cfg.params.thetax != 0.0) {
    log_info("theorem2 run with thetax != 0 (negative control)");
  }
  ode::Options oo{cfg.rtol, cfg.atol};
  const auto rep =
      asymptotics::theorem2_verify(cfg.params, cfg.x0, cfg.x_end, cfg.offsets, oo);
  auto os = open_out(cfg.out_path);
  os << asymptotics::theorem2_report_json(rep) << "\n";
  nlohmann::json metrics{{"pass", rep.pass}, {"inconclusive", rep.inconclusive}};
  for (const auto& m : rep.members) {
    metrics["members"].push_back({{"offset", m.offset},
                                  {"ratio_end", m.ratio_end},
                                  {"C_fit", m.c_fit},
                                  {"pass", m.pass}});
  }
  const std::string status = rep.pass ? "ok" : "numerical-stop";
  return finish(cfg, summary_out, status,
                rep.pass ? "" : (rep.inconclusive ? "inconclusive" : "no-tracking-member"),
                std::move(metrics));
}

int run_degeneracy(const RunConfig& cfg, std::ostream& summary_out) {
  const auto rep = asymptotics::degeneracy_report(cfg.X_list, cfg.params);
  auto os = open_out(cfg.out_path);
  os << asymptotics::degeneracy_report_json(rep) << "\n";
  nlohmann::json metrics{{"slope", rep.slope},
                         {"slope_in_range", rep.slope_in_range},
                         {"double_roots_found", rep.double_roots_found},
                         {"fully_degenerate", rep.fully_degenerate}};
  const bool ok = rep.slope_in_range || rep.fully_degenerate;
  return finish(cfg, summary_out, ok ? "ok" : "numerical-stop",
                ok ? "" : "degeneracy-violation", std::move(metrics));
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::PiIntegrate: return "pi-integrate";
    case Mode::PiWhitham: return "pi-whitham";
    case Mode::PviIntegrate: return "pvi-integrate";
    case Mode::PviLaxVerify: return "pvi-lax-verify";
    case Mode::PviCurve: return "pvi-curve";
    case Mode::PviModulate: return "pvi-modulate";
    case Mode::PviTheorem2: return "pvi-theorem2";
    case Mode::Degeneracy: return "degeneracy";
  }
  return "unknown";
}

ParseResult parse_config(const std::vector<std::string>& args) {
  ParseResult res;
  RunConfig cfg;
  ThetaSpec thetas;

  CLI::App app{"Whitham-averaging toolkit for Painleve I and VI"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.fallthrough();
  app.add_option("--out", cfg.out_path, "output artifact path");
  app.add_option("--format", cfg.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--rtol", cfg.rtol, "relative tolerance");
  app.add_option("--atol", cfg.atol, "absolute tolerance");
  app.add_option("--seed", cfg.seed, "seed for randomized verification samples");

  auto* pi_int = app.add_subcommand("pi-integrate", "integrate y'' = 3y^2 + x (or frozen X)");
  pi_int->add_option("--x0", cfg.x0)->required();
  pi_int->add_option("--y0", cfg.y0)->required();
  pi_int->add_option("--dy0", cfg.dy0)->required();
  pi_int->add_option("--x-end", cfg.x_end)->required();
  pi_int->add_option("--frozen-X", [&cfg](const CLI::results_t& r) {
    cfg.frozen_X = std::stod(r[0]);
    return true;
  }, "hold X constant at this value")->expected(1);

  auto* pi_wh = app.add_subcommand("pi-whitham", "integrate D_X F1 = -2 ybar");
  pi_wh->add_option("--X0", cfg.X0)->required();
  pi_wh->add_option("--F0", cfg.F0)->required();
  pi_wh->add_option("--X-end", cfg.X_end)->required();

  auto* pvi_int = app.add_subcommand("pvi-integrate", "integrate the sixth Painleve equation");
  add_theta_options(pvi_int, thetas);
  pvi_int->add_option("--x0", cfg.x0)->required();
  pvi_int->add_option("--y0", cfg.y0)->required();
  pvi_int->add_option("--dy0", cfg.dy0)->required();
  pvi_int->add_option("--x-end", cfg.x_end)->required();

  auto* lax = app.add_subcommand("pvi-lax-verify", "zero-curvature residual along a PVI arc");
  add_theta_options(lax, thetas);
  lax->add_option("--x0", cfg.x0)->required();
  lax->add_option("--y0", cfg.y0)->required();
  lax->add_option("--dy0", cfg.dy0)->required();
  lax->add_option("--x-end", cfg.x_end)->required();
  lax->add_option("--threshold", cfg.lax_threshold, "residual flag threshold");

  auto* curve = app.add_subcommand("pvi-curve", "genus-one curve, branch points, averages");
  add_theta_options(curve, thetas);
  curve->add_option("--X", cfg.X0)->required();
  curve->add_option("--F6", cfg.F6)->required();

  auto* mod = app.add_subcommand("pvi-modulate", "integrate the PVI modulation equation");
  add_theta_options(mod, thetas);
  mod->add_option("--X0", cfg.X0)->required();
  mod->add_option("--F0", cfg.F0);
  mod->add_flag("--on-family", cfg.family_start, "start with F0 = -2 k1 k2 X0");
  mod->add_option("--X-end", cfg.X_end)->required();

  auto* th2 = app.add_subcommand("pvi-theorem2", "verify y = x + o(x) at desk scale");
  add_theta_options(th2, thetas);
  th2->add_option("--x0", cfg.x0)->default_val(10.0);
  th2->add_option("--x-end", cfg.x_end)->default_val(1e4);
  th2->add_option("--offsets", cfg.offsets, "initial y - x offsets to scan");

  auto* deg = app.add_subcommand("degeneracy", "discriminant degeneracy decay report");
  add_theta_options(deg, thetas);
  deg->add_option("--X-list", cfg.X_list, "X values for the decay fit");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    res.handled = true;
    return res;
  } catch (const CLI::ParseError& e) {
    res.exit_code = 2;
    res.error = std::string("error: ") + e.what();
    return res;
  }

  try {
    if (pi_int->parsed()) cfg.mode = Mode::PiIntegrate;
    else if (pi_wh->parsed()) cfg.mode = Mode::PiWhitham;
    else if (pvi_int->parsed()) cfg.mode = Mode::PviIntegrate;
    else if (lax->parsed()) cfg.mode = Mode::PviLaxVerify;
    else if (curve->parsed()) cfg.mode = Mode::PviCurve;
    else if (mod->parsed()) cfg.mode = Mode::PviModulate;
    else if (th2->parsed()) cfg.mode = Mode::PviTheorem2;
    else if (deg->parsed()) cfg.mode = Mode::Degeneracy;

    const bool needs_thetas = cfg.mode != Mode::PiIntegrate && cfg.mode != Mode::PiWhitham;
    if (needs_thetas) cfg.params = resolve_thetas(thetas);
    if (cfg.rtol <= 0 || cfg.atol <= 0) {
      throw CLI::ValidationError("tolerances must be positive");
    }
    if (cfg.mode == Mode::PviModulate && !cfg.family_start && !mod->count("--F0")) {
      throw CLI::ValidationError("pvi-modulate needs --F0 or --on-family");
    }
    if (cfg.mode == Mode::PviTheorem2 && cfg.offsets.empty()) {
      cfg.offsets = {0.1, 0.5, 1.0};
    }
    if (cfg.mode == Mode::Degeneracy && cfg.X_list.empty()) {
      cfg.X_list = {1e2, 1e3, 1e4, 1e5};
    }
    if (cfg.out_path.empty()) cfg.out_path = default_out(cfg.mode, cfg.format);
  } catch (const CLI::Error& e) {
    res.exit_code = 2;
    res.error = std::string("error: ") + e.what();
    return res;
  }

  res.config = cfg;
  return res;
}

int run(const RunConfig& cfg, std::ostream& summary_out) {
  log_info(std::string("running mode ") + mode_name(cfg.mode));
  try {
    switch (cfg.mode) {
      case Mode::PiIntegrate: return run_pi_integrate(cfg, summary_out);
      case Mode::PiWhitham: return run_pi_whitham(cfg, summary_out);
      case Mode::PviIntegrate: return run_pvi_integrate(cfg, summary_out);
      case Mode::PviLaxVerify: return run_pvi_lax_verify(cfg, summary_out);
      case Mode::PviCurve: return run_pvi_curve(cfg, summary_out);
      case Mode::PviModulate: return run_pvi_modulate(cfg, summary_out);
      case Mode::PviTheorem2: return run_pvi_theorem2(cfg, summary_out);
      case Mode::Degeneracy: return run_degeneracy(cfg, summary_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const ParseResult pr = parse_config(args);
  if (pr.handled) return 0;
  if (pr.exit_code != 0) {
    std::cerr << pr.error << "\n";
    return pr.exit_code;
  }
  return run(*pr.config, std::cout);
}

}  // namespace painwhit::cli
