#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stable_sde/stable_sde.hpp"

namespace stable_sde::cli {

// Exit codes shared by every command.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitStatistical = 3;
inline constexpr int kExitSolver = 4;

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Blowup:
    case ErrorKind::DominationExceeded:
    case ErrorKind::GrowthViolation:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::EvalError:
    case ErrorKind::Overflow:
    case ErrorKind::NonConvergence:
    case ErrorKind::DivergentSequence:
      return kExitSolver;
    default:
      return kExitUsage;
  }
}

namespace cli_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Comma-separated list; the empty string is an empty list.
inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto v = parse_double(rest.substr(0, comma));
    if (!v) fail(ErrorKind::InvalidArgument, flag + " expects comma-separated numbers, got '" + text + "'");
    out.push_back(*v);
    rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
  }
  return out;
}

inline std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

inline MonotoneClass parse_monotone(const std::string& v, const std::string& key) {
  if (v == "none") return MonotoneClass::None;
  if (v == "non-decreasing") return MonotoneClass::NonDecreasing;
  if (v == "non-increasing") return MonotoneClass::NonIncreasing;
  fail(ErrorKind::ConfigError, key + " must be none, non-decreasing or non-increasing, got '" + v + "'");
}

inline std::string_view regime_name(Regime r) {
  return r == Regime::InfiniteVariation ? "infinite-variation" : "finite-variation";
}

/// Output sink: the named file, or the command's stdout when no file is given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty()) {
      out_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) fail(ErrorKind::IoError, "cannot write '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot write '" + path + "'");
  f << text;
}

inline void require_out_for_script(const std::string& script, const std::string& out) {
  if (!script.empty() && out.empty())
    fail(ErrorKind::InvalidArgument, "--gnuplot-script needs --out so the script has a data file to read");
}

/// Everything a config file can describe.
struct Setup {
  Scenario scenario;
  long n_paths = 0;
  bool builtin = false;
  std::optional<std::string> scheme;
};

inline void read_coefficients(RunConfig& cfg, Scenario& s, bool have_builtin) {
  const double alpha = s.params.alpha();
  if (cfg.has_section("coeffs")) {
    auto sigma = cfg.text("coeffs", "sigma");
    auto gamma = cfg.text("coeffs", "gamma");
    const std::string b = unquote(cfg.text("coeffs", "b").value_or("0"));
    if (!sigma && !gamma) fail(ErrorKind::ConfigError, "[coeffs] needs sigma or gamma");
    if (gamma && s.params.regime() != Regime::FiniteVariation)
      fail(ErrorKind::ConfigError, "gamma may only be given for alpha < 1");
    const Evaluator b_fn = evaluator(parse(b));
    CoefficientSet c;
    if (sigma) {
      c = make_coefficients(evaluator(parse(unquote(*sigma))), b_fn, alpha);
      if (gamma) c.gamma = evaluator(parse(unquote(*gamma)));
    } else {
      c = make_coefficients_from_gamma(evaluator(parse(unquote(*gamma))), b_fn, alpha);
    }
    c.label = sigma ? "sigma=" + unquote(*sigma) : "gamma=" + unquote(*gamma);
    c.label += ", b=" + b;
    s.coeffs = std::move(c);
  } else if (!have_builtin) {
    fail(ErrorKind::ConfigError, "missing section [coeffs]");
  } else if (s.coeffs.sigma && cfg.has_section("stable")) {
    // Re-derive gamma for a possibly different alpha, keeping the declarations.
    auto c = make_coefficients(s.coeffs.sigma, s.coeffs.b, alpha);
    c.declared_growth = s.coeffs.declared_growth;
    c.declared_monotone = s.coeffs.declared_monotone;
    c.declared_b_monotone = s.coeffs.declared_b_monotone;
    c.declared_b_constant = s.coeffs.declared_b_constant;
    c.declared_holder = s.coeffs.declared_holder;
    c.label = s.coeffs.label;
    s.coeffs = std::move(c);
  }
  auto& c = s.coeffs;
  if (auto v = cfg.number("coeffs", "growth")) c.declared_growth = *v;
  if (auto v = cfg.text("coeffs", "monotone")) c.declared_monotone = parse_monotone(*v, "monotone");
  if (auto v = cfg.text("coeffs", "b_monotone")) c.declared_b_monotone = parse_monotone(*v, "b_monotone");
  if (auto v = cfg.flag("coeffs", "b_constant")) c.declared_b_constant = *v;
  const auto index = cfg.number("coeffs", "holder_index");
  const auto constant = cfg.number("coeffs", "holder_constant");
  if (constant && !index) fail(ErrorKind::ConfigError, "holder_constant needs holder_index");
  if (index) c.declared_holder = HolderDeclaration{*index, constant.value_or(1.0)};
}

inline void read_sim(RunConfig& cfg, Setup& setup) {
  auto& s = setup.scenario;
  auto& sc = s.config;
  sc.horizon = cfg.number_or("sim", "horizon", sc.horizon);
  sc.euler_step = cfg.number_or("sim", "euler_step", sc.euler_step);
  sc.epsilon = cfg.number_or("sim", "epsilon", sc.epsilon);
  if (auto v = cfg.integer("sim", "seed")) sc.seed = *v;
  if (auto v = cfg.numbers("sim", "checkpoints")) sc.checkpoint_times = *v;
  s.x0 = cfg.number_or("sim", "x0", s.x0);
  s.x0_tilde = cfg.number_or("sim", "x0_tilde", s.x0_tilde);
  if (auto v = cfg.number("sim", "u_bound")) sc.u_bound_policy.initial = *v;
  sc.u_bound_policy.growth = cfg.number_or("sim", "u_growth", sc.u_bound_policy.growth);
  if (auto v = cfg.integer("sim", "max_regenerations")) sc.u_bound_policy.max_regenerations = static_cast<int>(*v);
  if (auto v = cfg.flag("sim", "gaussian_refinement")) sc.gaussian_refinement = *v;
  if (auto v = cfg.flag("sim", "small_jump_drift")) sc.small_jump_drift = *v;
  sc.blowup_guard = cfg.number_or("sim", "blowup_guard", sc.blowup_guard);
  sc.max_expected_events = cfg.number_or("sim", "max_expected_events", sc.max_expected_events);
  if (auto v = cfg.integer("sim", "n_paths")) setup.n_paths = static_cast<long>(*v);
  setup.scheme = cfg.text("sim", "scheme");
  if (setup.scheme) {
    const auto& v = *setup.scheme;
    if (v != "euler" && v != "thinning") fail(ErrorKind::ConfigError, "scheme must be euler or thinning, got '" + v + "'");
    const bool euler = s.params.regime() == Regime::InfiniteVariation;
    if ((v == "euler") != euler)
      fail(ErrorKind::RegimeMismatch, "scheme '" + v + "' does not match alpha=" + format_double(s.params.alpha()) +
                                          " (" + std::string(regime_name(s.params.regime())) + ")");
  }
}

/// Builds the scenario from [experiment] name (a built-in, optional) and the
/// [stable]/[coeffs]/[sim] sections, which override it key by key.
inline Setup load_setup(RunConfig& cfg, long default_paths) {
  Setup setup;
  setup.n_paths = default_paths;
  auto& s = setup.scenario;
  const auto name = cfg.text("experiment", "name");
  if (name) {
    const auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), *name) != names.end()) {
      s = builtin_scenario(*name);
      setup.builtin = true;
    }
    s.name = *name;
  } else {
    s.name = "custom";
  }
  if (cfg.has_section("stable")) {
    s.params = validate_params(cfg.require_number("stable", "alpha"), cfg.require_number("stable", "a_minus"),
                               cfg.require_number("stable", "a_plus"));
  } else if (!setup.builtin) {
    fail(ErrorKind::ConfigError, "missing section [stable]");
  }
  read_coefficients(cfg, s, setup.builtin);
  read_sim(cfg, setup);
  return setup;
}

inline RunConfig open_config(const std::string& path) {
  return RunConfig::parse(read_file(path), {"stable", "coeffs", "sim", "experiment"});
}

inline void print_row(std::ostream& out, std::string_view key, const std::string& value) {
  out << std::left << std::setw(31) << key << ' ' << value << '\n';
}

// ---- commands ---------------------------------------------------------------

struct ExponentArgs {
  double alpha = 0.0;
  std::optional<double> c, a_minus, a_plus;
};

inline int cmd_exponent(const ExponentArgs& a, std::ostream& out) {
  if (a.c && (a.a_minus || a.a_plus)) fail(ErrorKind::InvalidArgument, "give either --c or --a-minus/--a-plus");
  if (!a.c && (!a.a_minus || !a.a_plus)) fail(ErrorKind::InvalidArgument, "give --c or both --a-minus and --a-plus");
  if (a.c && !(*a.c >= 0.0 && *a.c <= 1.0)) fail(ErrorKind::DomainError, "c must lie in [0,1]");
  const StableParams p = a.c ? validate_params(a.alpha, *a.c, 1.0) : validate_params(a.alpha, *a.a_minus, *a.a_plus);
  const double c = std::min(p.a_minus(), p.a_plus()) / std::max(p.a_minus(), p.a_plus());
  const BetaExponent beta =
      p.regime() == Regime::InfiniteVariation ? beta_infinite(p.alpha(), c) : beta_finite(p.alpha(), c);
  print_row(out, "alpha", format_double(p.alpha()));
  print_row(out, "a_minus", format_double(p.a_minus()));
  print_row(out, "a_plus", format_double(p.a_plus()));
  print_row(out, "c", format_double(c));
  print_row(out, "regime", std::string(regime_name(p.regime())));
  print_row(out, "beta", format_double(beta.value));
  const char* coef = p.regime() == Regime::InfiniteVariation ? "sigma" : "gamma";
  for (auto [m, label] : {std::pair{MonotoneClass::None, "none"},
                          {MonotoneClass::NonDecreasing, "non-decreasing"},
                          {MonotoneClass::NonIncreasing, "non-increasing"}})
    print_row(out, std::string("holder_") + coef + "[" + label + "]", format_double(required_holder_index(p, m)));
  return kExitPass;
}

struct IntegralsArgs {
  std::optional<std::string> alpha, beta, a_minus, a_plus;
  std::string beta_fraction = "0.25,0.5,0.75";
  bool critical = false;
  std::string out_path, script;
};

inline int cmd_integrals(const IntegralsArgs& a, std::ostream& out, std::ostream& err) {
  require_out_for_script(a.script, a.out_path);
  if (a.critical && a.beta) fail(ErrorKind::InvalidArgument, "--critical and --beta are exclusive");
  const auto alphas = parse_list(a.alpha.value_or("0.55,0.65,0.75,0.85,0.95,1.1,1.3,1.5,1.7,1.9"), "--alpha");
  const auto minus = parse_list(a.a_minus.value_or(a.critical ? "0,0.1" : "0,0.1,1"), "--a-minus");
  const auto plus = parse_list(a.a_plus.value_or("1"), "--a-plus");
  const auto betas = a.beta ? parse_list(*a.beta, "--beta") : std::vector<double>{};
  const auto fractions = parse_list(a.beta_fraction, "--beta-fraction");
  if (alphas.empty() || minus.empty() || plus.empty() || (a.beta ? betas.empty() : (!a.critical && fractions.empty())))
    fail(ErrorKind::InvalidArgument, "empty grid");

  struct Row {
    double alpha, beta, am, ap, closed, quad, diff;
    bool ok;
  };
  std::vector<Row> rows;
  for (double alpha : alphas)
    for (double am : minus)
      for (double ap : plus) {
        const auto p = validate_params(alpha, am, ap);
        const bool iv = p.regime() == Regime::InfiniteVariation;
        std::vector<double> row_betas;
        if (a.critical) {
          const double c = std::min(am, ap) / std::max(am, ap);
          row_betas.push_back(iv ? beta_infinite(alpha, c).value : beta_finite(alpha, c).value);
        } else if (a.beta) {
          row_betas = betas;
        } else {
          const double lo = iv ? alpha - 1.0 : 0.0;
          const double hi = iv ? 1.0 : alpha;
          for (double f : fractions) row_betas.push_back(lo + f * (hi - lo));
        }
        for (double beta : row_betas) {
          const auto cf = iv ? closed_form_I_tilde_terms(alpha, beta, am, ap) : closed_form_I_terms(alpha, beta, am, ap);
          const auto q = iv ? integral_I_tilde_numeric(alpha, std::max(beta, alpha - 1.0), am, ap)
                            : integral_I_numeric(alpha, beta, am, ap);
          const double diff = std::abs(cf.value - q.value);
          const double tol = std::max({1e-6 * std::abs(cf.value), 1e-10 * cf.scale, q.error, 1e-12});
          rows.push_back({alpha, beta, am, ap, cf.value, q.value, diff, diff <= tol});
        }
      }

  Sink sink(a.out_path, out);
  *sink << "alpha,beta,a_minus,a_plus,closed_form,quadrature,abs_diff\n";
  std::size_t bad = 0;
  for (const auto& r : rows) {
    *sink << format_double(r.alpha) << ',' << format_double(r.beta) << ',' << format_double(r.am) << ','
          << format_double(r.ap) << ',' << format_double(r.closed) << ',' << format_double(r.quad) << ','
          << format_double(r.diff) << '\n';
    if (!r.ok) {
      ++bad;
      err << "identity violation: alpha=" << format_double(r.alpha) << " beta=" << format_double(r.beta)
          << " a_minus=" << format_double(r.am) << " a_plus=" << format_double(r.ap)
          << " abs_diff=" << format_double(r.diff) << '\n';
    }
  }
  if (!a.script.empty())
    write_text(a.script, "set datafile separator ','\nset key autotitle columnhead\nset logscale y\n"
                         "set xlabel 'alpha'\nset ylabel '|closed form - quadrature|'\n"
                         "plot '" + a.out_path + "' using 1:($7 > 0 ? $7 : 1e-17) with points title 'abs_diff'\n");
  err << rows.size() - bad << "/" << rows.size() << " rows agree\n";
  return bad == 0 ? kExitPass : kExitStatistical;
}

struct ConfigArgs {
  std::string config;
  std::string out_path, script;
};

inline std::string path_file_name(long i) {
  std::ostringstream name;
  name << "path_" << std::setw(4) << std::setfill('0') << i << ".csv";
  return name.str();
}

inline int cmd_simulate(const ConfigArgs& a, const std::string& out_dir, std::ostream& out) {
  auto cfg = open_config(a.config);
  auto setup = load_setup(cfg, 1);
  cfg.reject_unused();
  if (setup.n_paths < 1) fail(ErrorKind::InvalidArgument, "n_paths must be at least 1");
  auto& s = setup.scenario;
  SolveConfig base = s.config;
  base.record_path = true;
  validate(base, s.params.regime());

  const auto n = static_cast<std::size_t>(setup.n_paths);
  std::vector<Simulated<PathSkeleton>> paths(n);
  parallel_for(n, [&](std::size_t i) {
    SolveConfig c = base;
    c.seed = sub_seed(base.seed, i);
    paths[i] = simulate_path(s.coeffs, s.params, s.x0, c);
  });

  std::filesystem::create_directories(out_dir);
  Sink sink(a.out_path, out);
  *sink << "path,file,final_value,n_jumps,regenerations\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto file = path_file_name(static_cast<long>(i));
    std::ofstream f(std::filesystem::path(out_dir) / file, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write '" + file + "' in '" + out_dir + "'");
    write_path_csv(f, paths[i].result);
    const auto& jf = paths[i].result.jump_flags;
    *sink << i << ',' << file << ',' << format_double(paths[i].result.final_value) << ','
          << std::count(jf.begin(), jf.end(), true) << ',' << paths[i].regenerations << '\n';
  }
  if (!a.script.empty()) {
    std::string plot = "set datafile separator ','\nset xlabel 't'\nset ylabel 'X_t'\nplot ";
    const std::size_t shown = std::min<std::size_t>(n, 20);
    for (std::size_t i = 0; i < shown; ++i)
      plot += (i ? ", " : "") + std::string("'") + (std::filesystem::path(out_dir) / path_file_name(i)).string() +
              "' using 1:2 every ::1 with steps notitle";
    write_text(a.script, plot + "\n");
  }
  return kExitPass;
}

inline void report_script(const std::string& script, const std::string& data, const std::string& ylabel) {
  if (script.empty()) return;
  write_text(script, "set datafile separator ','\nset xlabel 't'\nset ylabel '" + ylabel +
                         "'\nplot '" + data + "' using 2:4:5 every ::1 with yerrorbars title 'estimate', '" + data +
                         "' using 2:8 every ::1 with lines title 'target'\n");
}

inline int cmd_couple(const ConfigArgs& a, std::ostream& out, std::ostream& err) {
  require_out_for_script(a.script, a.out_path);
  auto cfg = open_config(a.config);
  auto setup = load_setup(cfg, 20000);
  const std::string gate = cfg.text("experiment", "gate").value_or("equality");
  const auto beta = cfg.number("experiment", "beta");
  CouplingOptions opt;
  if (auto v = cfg.integer("experiment", "bias_stride")) opt.bias_stride = static_cast<int>(*v);
  const auto gaps = cfg.numbers("experiment", "gaps");
  const auto horizons = cfg.numbers("experiment", "horizons");
  cfg.reject_unused();
  auto& s = setup.scenario;
  auto require_beta = [&]() {
    if (!beta) fail(ErrorKind::ConfigError, "gate '" + gate + "' needs [experiment] beta");
    return *beta;
  };
  auto forbid = [&](bool present, const char* key) {
    if (present) fail(ErrorKind::ConfigError, std::string("[experiment] ") + key + " does not apply to gate '" + gate + "'");
  };

  Sink sink(a.out_path, out);
  if (gate == "equality") {
    forbid(beta.has_value(), "beta");
    forbid(gaps.has_value(), "gaps");
    forbid(horizons.has_value(), "horizons");
    const auto r = verify_equality_case(s, setup.n_paths, opt);
    write_report_csv(*sink, r);
    report_script(a.script, a.out_path, "E|X_t - X~_t|^beta");
    err << (r.passed() ? "PASS" : "FAIL") << ": equality case, beta=" << format_double(r.beta_used) << '\n';
    return r.passed() ? kExitPass : kExitStatistical;
  }
  if (gate == "bound") {
    forbid(horizons.has_value(), "horizons");
    const auto g = verify_gronwall_bound(s.coeffs, gaps.value_or(std::vector<double>{1.0, 0.1, 0.01}), s.params,
                                         require_beta(), s.config, setup.n_paths, s.x0, s.name);
    write_report_header(*sink);
    for (const auto& r : g.per_gap) write_report_rows(*sink, r);
    report_script(a.script, a.out_path, "E|X_t - X~_t|^beta");
    err << (g.passed() ? "PASS" : "FAIL") << ": bound case, fitted C=" << format_double(g.fitted_c)
        << ", max spread=" << format_double(*std::max_element(g.spread.begin(), g.spread.end()))
        << ", envelope " << (g.envelope_holds ? "holds" : "fails") << ", gaps "
        << (g.continuous ? "ordered" : "out of order") << '\n';
    return g.passed() ? kExitPass : kExitStatistical;
  }
  if (gate == "moment") {
    forbid(gaps.has_value(), "gaps");
    const auto hs = horizons.value_or(s.config.checkpoint_times);
    const auto r = moment_boundedness_study(s.coeffs, s.x0, s.params, require_beta(), hs, setup.n_paths, s.config);
    *sink << "scenario,horizon,beta,half_mean,half_std_error,half_n_paths,mean,std_error,n_paths,stable\n";
    for (const auto& row : r.rows)
      *sink << s.name << ',' << format_double(row.horizon) << ',' << format_double(r.beta) << ','
            << format_double(row.half.mean) << ',' << format_double(row.half.std_error) << ',' << row.half.n_paths
            << ',' << format_double(row.full.mean) << ',' << format_double(row.full.std_error) << ','
            << row.full.n_paths << ',' << (row.stable ? "true" : "false") << '\n';
    if (!a.script.empty())
      write_text(a.script, "set datafile separator ','\nset xlabel 'T'\nset ylabel 'E sup |X_t|^beta'\nplot '" +
                               a.out_path + "' using 2:7:8 every ::1 with yerrorbars title 'estimate'\n");
    err << (r.passed() ? "PASS" : "FAIL") << ": moment study, growth rate " << format_double(r.growth_rate) << '\n';
    return r.passed() ? kExitPass : kExitStatistical;
  }
  fail(ErrorKind::ConfigError, "gate must be equality, bound or moment, got '" + gate + "'");
}

inline int cmd_contract(const ConfigArgs& a, std::ostream& out, std::ostream& err) {
  require_out_for_script(a.script, a.out_path);
  auto cfg = open_config(a.config);
  auto setup = load_setup(cfg, 1000);
  const bool builtin_contraction = setup.builtin && setup.scenario.name == "contraction";
  ContractionConfig cc = builtin_contraction ? builtin_contraction_config() : ContractionConfig{};
  auto& s = setup.scenario;
  cc.coeffs = s.coeffs;
  cc.solver = s.config;
  cc.horizon = s.config.horizon;
  if (auto w = cfg.numbers("experiment", "window_times")) cc.window_times = *w;
  cc.threshold_fraction = cfg.number_or("experiment", "threshold_fraction", cc.threshold_fraction);
  const double alpha = s.params.alpha();
  if (auto rho = cfg.text("experiment", "rho")) {
    if (unquote(*rho) == "none") {
      cc.rho = nullptr;
    } else {
      cc.rho = evaluator(parse(unquote(*rho)));
    }
  } else {
    cc.rho = [alpha](double r) { return std::pow(r, alpha - 1.0); };
  }
  cfg.reject_unused();
  if (cc.window_times.empty())
    for (int k = 0; k <= 10; ++k) cc.window_times.push_back(cc.horizon * k / 10.0);

  const auto r = contraction_study(cc, s.params, s.x0, s.x0_tilde, setup.n_paths);
  Sink sink(a.out_path, out);
  *sink << "scenario,window_start,median_tail_sup,threshold,n_paths\n";
  for (std::size_t j = 0; j < r.window_starts.size(); ++j)
    *sink << s.name << ',' << format_double(r.window_starts[j]) << ',' << format_double(r.median_tail_sup[j]) << ','
          << format_double(r.threshold) << ',' << r.n_paths << '\n';
  if (!a.script.empty())
    write_text(a.script, "set datafile separator ','\nset xlabel 's'\nset ylabel 'median sup_{t>=s} |X_t - X~_t|'\n"
                         "set logscale y\nplot '" + a.out_path + "' using 2:($3 > 0 ? $3 : 1e-17) every ::1 with "
                         "linespoints title 'median', '" + a.out_path + "' using 2:4 every ::1 with lines title 'threshold'\n");
  err << (r.passed() ? "PASS" : "FAIL") << ": contraction, per-path monotone " << (r.per_path_monotone ? "yes" : "no")
      << ", medians monotone " << (r.medians_monotone ? "yes" : "no") << ", terminal median "
      << format_double(r.median_tail_sup.back()) << " vs threshold " << format_double(r.threshold)
      << ", terminal KS " << format_double(r.terminal_ks) << '\n';
  return r.passed() ? kExitPass : kExitStatistical;
}

}  // namespace cli_detail

/// Runs the command line in args (without the program name).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Stable-driven SDE toolkit: critical exponents, integral identities and coupled Monte Carlo"};
  app.name("stable-sde");
  app.require_subcommand(1);

  ExponentArgs ex;
  auto* exponent = app.add_subcommand("exponent", "Critical exponent beta and required Hoelder indices");
  exponent->add_option("--alpha", ex.alpha, "Stability index in (0,2), alpha != 1")->required();
  exponent->add_option("--c", ex.c, "Tail ratio min(a-,a+)/max(a-,a+) in [0,1]");
  exponent->add_option("--a-minus", ex.a_minus, "Intensity of negative jumps");
  exponent->add_option("--a-plus", ex.a_plus, "Intensity of positive jumps");

  IntegralsArgs in;
  auto* integrals = app.add_subcommand("integrals", "Closed form versus quadrature for I and I-tilde");
  integrals->add_option("--alpha", in.alpha, "Comma-separated alpha values");
  integrals->add_option("--beta", in.beta, "Comma-separated beta values");
  integrals->add_option("--beta-fraction", in.beta_fraction,
                        "Positions of beta inside its admissible interval when --beta is not given")
      ->capture_default_str();
  integrals->add_option("--a-minus", in.a_minus, "Comma-separated a- values");
  integrals->add_option("--a-plus", in.a_plus, "Comma-separated a+ values");
  integrals->add_flag("--critical", in.critical, "Use the critical beta for each (alpha, a-, a+)");
  integrals->add_option("--out", in.out_path, "Write the CSV here instead of stdout");
  integrals->add_option("--gnuplot-script", in.script, "Also write a gnuplot script plotting the CSV");

  ConfigArgs sim_args, couple_args, contract_args;
  std::string out_dir = "paths";
  auto add_config = [](CLI::App* cmd, ConfigArgs& a) {
    cmd->add_option("--config", a.config, "Run configuration file")->required();
    cmd->add_option("--out", a.out_path, "Write the CSV here instead of stdout");
    cmd->add_option("--gnuplot-script", a.script, "Also write a gnuplot script plotting the CSV");
  };
  auto* simulate = app.add_subcommand("simulate", "Simulate paths and write one CSV per path");
  add_config(simulate, sim_args);
  simulate->add_option("--out-dir", out_dir, "Directory for path_XXXX.csv files")->capture_default_str();
  auto* couple = app.add_subcommand("couple", "Coupled Monte Carlo: equality, bound or moment gate");
  add_config(couple, couple_args);
  auto* contract = app.add_subcommand("contract", "Long-time contraction of coupled solutions");
  add_config(contract, contract_args);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*exponent) return cmd_exponent(ex, out);
    if (*integrals) return cmd_integrals(in, out, err);
    if (*simulate) return cmd_simulate(sim_args, out_dir, out);
    if (*couple) return cmd_couple(couple_args, out, err);
    return cmd_contract(contract_args, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [IoError]: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace stable_sde::cli
