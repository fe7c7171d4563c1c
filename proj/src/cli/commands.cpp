#include "mhr/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhr/chernoff.hpp"
#include "mhr/cli/io.hpp"
#include "mhr/cli/svg.hpp"
#include "mhr/error.hpp"
#include "mhr/estimator.hpp"
#include "mhr/inference.hpp"
#include "mhr/orders.hpp"
#include "mhr/parallel.hpp"
#include "mhr/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mhr::cli {

namespace {

// Defaults to the THREADS environment variable when it holds a positive
// integer, otherwise to the hardware concurrency.
unsigned env_thread_count() {
  if (const char* env = std::getenv("THREADS")) {
    unsigned v = 0;
    const auto* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && ptr == end && v > 0) return v;
  }
  return default_thread_count();
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) throw InputError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(item, what));
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

TruncationPolicy parse_policy(const std::string& rn) {
  if (rn == "auto") return TruncationPolicy::recommended();
  return TruncationPolicy::fixed(parse_double(rn, "--rn"));
}

std::string csv_cell(double v) { return std::isfinite(v) ? format_number(v) : std::string(); }

void write_manifest(const fs::path& path, const std::string& command, json flags,
                    std::optional<std::uint64_t> seed, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "mhr";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["flags"] = std::move(flags);
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  write_text_file(path, m.dump(2) + "\n");
}

ChernoffTable cached_chernoff(const fs::path& cache_dir, std::size_t reps, unsigned threads,
                              std::ostream& out) {
  ChernoffConfig config;
  config.replications = reps;
  fs::create_directories(cache_dir);
  bool computed = false;
  auto table = load_or_simulate_chernoff(config, chernoff_cache_path(cache_dir, config), threads, &computed);
  if (computed) out << "chernoff table simulated (" << reps << " replications)\n";
  return table;
}

// --- estimate ---------------------------------------------------------------

struct EstimateOptions {
  std::string input;
  double alpha = 0.05;
  std::string ci = "plugin";
  std::size_t splits = 5;
  std::string rn = "auto";
  std::string grid = "auto";
  bool clamp = false;
  std::string out = ".";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string cache_dir = ".mhr-cache";
  std::size_t chernoff_reps = 100000;
  bool no_plot = false;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
  const bool want_plugin = o.ci == "plugin" || o.ci == "both";
  const bool want_split = o.ci == "split" || o.ci == "both";
  const auto policy = parse_policy(o.rn);
  const CensoredSample sample = read_sample_csv(o.input);
  const MhrFit fit = fit_theta(sample, policy);

  std::vector<double> grid;
  if (o.grid == "auto") {
    const int count = 50;
    for (int k = 1; k <= count; ++k) grid.push_back(fit.gamma_n * k / (count + 1));
  } else {
    grid = parse_list(o.grid, "--grid");
  }
  for (double x : grid) {
    if (!(x > 0.0)) throw InputError("--grid: points must be positive");
    if (x > fit.gamma_n && !o.clamp)
      throw DomainError("--grid: x = " + format_number(x) + " lies beyond the truncation time " +
                        format_number(fit.gamma_n) + "; pass --clamp to extend the last estimate");
  }

  std::optional<SplitFit> splits;
  if (want_split) splits = split_fit(sample, o.splits, policy, o.seed);
  std::optional<ScaleEstimator> scale;
  std::optional<ChernoffTable> chernoff;
  if (want_plugin) {
    scale.emplace(fit, sample);
    chernoff = cached_chernoff(o.cache_dir, o.chernoff_reps, o.threads, out);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream csv;
  csv << "x,estimate,lower,upper,method\n";
  std::vector<PlanePoint> lower_band, upper_band;
  auto row = [&](double x, double est, double lo, double hi, const char* method) {
    csv << format_number(x) << ',' << csv_cell(est) << ',' << csv_cell(lo) << ',' << csv_cell(hi) << ','
        << method << '\n';
  };
  if (want_plugin) {
    for (double x : grid) {
      if (x >= fit.gamma_n) {
        row(x, theta_at_clamped(fit, x), nan, nan, "plugin");
        continue;
      }
      try {
        const auto ci = plugin_ci(*scale, x, o.alpha, *chernoff);
        row(x, ci.estimate, ci.lower, ci.upper, "plugin");
        lower_band.push_back({x, ci.lower});
        upper_band.push_back({x, ci.upper});
      } catch (const DegenerateError&) {
        row(x, theta_at(fit, x), nan, nan, "plugin");
      }
    }
  }
  if (want_split) {
    for (double x : grid) {
      try {
        const auto ci = split_ci(*splits, x, o.alpha);
        row(x, ci.estimate, ci.lower, ci.upper, "split");
      } catch (const DomainError&) {
        const auto partial = splits->at(x);
        row(x, partial.estimates.empty() ? nan : partial.pooled, nan, nan, "split");
      }
    }
  }

  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<std::string> outputs{"fit.json", "ci.csv"};
  write_text_file(dir / "fit.json", fit_to_json(fit).dump(2) + "\n");
  write_text_file(dir / "ci.csv", csv.str());
  if (!o.no_plot) {
    SvgPlot plot{"Estimated hazard ratio", "time", "hazard ratio", {}};
    plot.series.push_back({step_polyline(0.0, fit.theta.value_at_zero(), fit.theta.knots(),
                                         fit.theta.values(), fit.gamma_n),
                           "#1f77b4", "monotone estimate", false, false});
    if (!lower_band.empty()) {
      plot.series.push_back({lower_band, "#d62728", "plug-in interval", true, false});
      plot.series.push_back({upper_band, "#d62728", "", true, false});
    }
    write_text_file(dir / "theta.svg", render_svg(plot));
    outputs.push_back("theta.svg");
  }
  outputs.push_back("manifest.json");
  write_manifest(dir / "manifest.json", "estimate",
                 {{"alpha", o.alpha}, {"ci", o.ci}, {"splits", o.splits}, {"rn", o.rn}, {"grid", o.grid},
                  {"clamp", o.clamp}, {"chernoff_reps", o.chernoff_reps}, {"no_plot", o.no_plot}},
                 o.seed, {o.input}, outputs);

  out << "n = " << fit.n << ", r_n = " << format_number(fit.r_n) << ", gamma_n = " << format_number(fit.gamma_n)
      << ", eta_n = " << format_number(fit.eta_n) << "\n"
      << "wrote " << (dir / "fit.json").string() << ", " << (dir / "ci.csv").string()
      << (o.no_plot ? "" : ", " + (dir / "theta.svg").string()) << "\n";
  return kExitOk;
}

// --- diagnose ---------------------------------------------------------------

struct DiagnoseOptions {
  std::string input;
  std::string rn = "auto";
  std::string out = ".";
  bool no_plot = false;
};

int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out) {
  const CensoredSample sample = read_sample_csv(o.input);
  const DiagnosticCurve curve = diagnostic_curve(sample, parse_policy(o.rn));
  const auto gaps = curve.gaps();

  std::ostringstream csv;
  csv << "cumhaz_control,cumhaz_treatment,hull,gap\n";
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    const auto& p = curve.points[k];
    csv << format_number(p.u) << ',' << format_number(p.v) << ',' << format_number(p.v - gaps[k]) << ','
        << format_number(gaps[k]) << '\n';
  }

  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<std::string> outputs{"diagnostic.csv"};
  write_text_file(dir / "diagnostic.csv", csv.str());
  if (!o.no_plot) {
    SvgPlot plot{"Cumulative hazards and convex minorant", "control cumulative hazard",
                 "treatment cumulative hazard", {}};
    plot.series.push_back({curve.points, "#1f77b4", "Nelson-Aalen curve", false, true});
    plot.series.push_back({curve.hull.vertices, "#d62728", "greatest convex minorant", true, false});
    write_text_file(dir / "diagnostic.svg", render_svg(plot));
    outputs.push_back("diagnostic.svg");
  }
  outputs.push_back("manifest.json");
  write_manifest(dir / "manifest.json", "diagnose", {{"rn", o.rn}, {"no_plot", o.no_plot}}, std::nullopt,
                 {o.input}, outputs);
  out << curve.points.size() << " points, max gap to convex minorant = " << format_number(curve.max_gap())
      << "\n";
  return kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateOptions {
  std::string scenario = "linear";
  std::size_t n = 1000;
  std::size_t reps = 100;
  std::string methods = "monotone";
  std::size_t splits = 5;
  double alpha = 0.05;
  std::string grid = "0.5,1,1.5";
  std::string rn = "auto";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";
  std::string cache_dir = ".mhr-cache";
  std::size_t chernoff_reps = 100000;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  StudyConfig config;
  config.shape = parse_shape(o.scenario);
  config.n = o.n;
  config.replications = o.reps;
  config.alpha = o.alpha;
  config.seed = o.seed;
  config.policy = parse_policy(o.rn);
  if (o.grid == "auto") {
    config.grid.clear();
    for (int k = 1; k < 40; ++k) config.grid.push_back(0.05 * k);
  } else {
    config.grid = parse_list(o.grid, "--grid");
  }
  config.methods.clear();
  std::stringstream names(o.methods);
  std::string name;
  while (std::getline(names, name, ',')) {
    if (name == "monotone") config.methods.push_back(StudyMethod::monotone());
    else if (name == "split") config.methods.push_back(StudyMethod::split(o.splits));
    else if (name == "kernel") config.methods.push_back(StudyMethod::kernel());
    else throw InputError("--methods: unknown method '" + name + "'");
  }
  const bool needs_table = std::any_of(config.methods.begin(), config.methods.end(),
                                       [](const auto& m) { return m.kind == StudyMethod::Kind::monotone; });
  // Validate before paying for the Chernoff table; an empty table stands in.
  if (needs_table) config.chernoff = ChernoffTable{};
  config.validate();
  if (needs_table) config.chernoff = cached_chernoff(o.cache_dir, o.chernoff_reps, o.threads, out);

  const StudyMetrics metrics = run_study(config, o.threads);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_text_file(dir / "metrics.csv", metrics_csv(metrics));
  write_text_file(dir / "metrics.json", to_json(metrics).dump(2) + "\n");
  write_manifest(dir / "manifest.json", "simulate",
                 {{"scenario", o.scenario}, {"n", o.n}, {"reps", o.reps}, {"methods", o.methods},
                  {"splits", o.splits}, {"alpha", o.alpha}, {"grid", o.grid}, {"rn", o.rn},
                  {"threads", o.threads}, {"chernoff_reps", o.chernoff_reps}},
                 o.seed, {}, {"metrics.csv", "metrics.json", "manifest.json"});
  out << "wrote " << (dir / "metrics.csv").string() << " and " << (dir / "metrics.json").string() << "\n";
  return kExitOk;
}

// --- order-check ------------------------------------------------------------

struct OrderOptions {
  std::vector<std::string> files;
  bool figure1 = false;
  std::string out;
};

std::string verdict_cell(const OrderVerdict& v) {
  if (v.holds) return "yes";
  return v.witness ? "no@" + std::to_string(*v.witness) : "no";
}

int cmd_order_check(const OrderOptions& o, std::ostream& out) {
  std::vector<std::pair<std::string, OrderReport>> rows;
  if (o.figure1) {
    if (!o.files.empty()) throw InputError("order-check: give either two files or --figure1");
    for (auto& e : figure1_suite()) rows.emplace_back(e.name, e.report);
  } else {
    if (o.files.size() != 2) throw InputError("order-check: expected two mass-function files (S then T)");
    rows.emplace_back("input", check_orders(read_mass_csv(o.files[0]), read_mass_csv(o.files[1])));
  }

  constexpr OrderKind kinds[] = {OrderKind::mhr, OrderKind::hr, OrderKind::st, OrderKind::lr};
  out << std::left << std::setw(26) << "pair";
  for (auto k : kinds) out << std::setw(8) << to_string(k);
  out << "\n";
  std::ostringstream csv;
  csv << "pair,mhr,hr,st,lr\n";
  for (const auto& [name, report] : rows) {
    out << std::setw(26) << name;
    csv << name;
    for (auto k : kinds) {
      out << std::setw(8) << verdict_cell(report[k]);
      csv << ',' << verdict_cell(report[k]);
    }
    out << "\n";
    csv << "\n";
  }
  out << std::right;

  if (!o.out.empty()) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    write_text_file(dir / "orders.csv", csv.str());
    write_manifest(dir / "manifest.json", "order-check", {{"figure1", o.figure1}}, std::nullopt, o.files,
                   {"orders.csv", "manifest.json"});
  }
  return kExitOk;
}

// --- chernoff ---------------------------------------------------------------

struct ChernoffOptions {
  std::string probs = "default";
  std::size_t reps = 100000;
  double half_width = 10.0;
  double step = 0.005;
  std::uint64_t seed = ChernoffConfig{}.seed;
  std::string out = "chernoff_table.json";
  unsigned threads = 1;
};

int cmd_chernoff(const ChernoffOptions& o, std::ostream& out) {
  ChernoffConfig config;
  config.replications = o.reps;
  config.half_width = o.half_width;
  config.step = o.step;
  config.seed = o.seed;
  if (o.probs != "default") config.probabilities = parse_list(o.probs, "--probs");
  config.validate();

  const fs::path path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  bool computed = false;
  const ChernoffTable table = load_or_simulate_chernoff(config, path, o.threads, &computed);
  out << (computed ? "simulated " : "cache hit: ") << path.string() << "\n";
  for (std::size_t k = 0; k < table.probabilities.size(); ++k)
    out << "q(" << format_number(table.probabilities[k]) << ") = " << format_number(table.quantiles[k]) << "\n";
  out << "mean = " << format_number(table.mean) << ", variance = " << format_number(table.variance) << "\n";

  fs::path manifest = path;
  manifest.replace_extension(".manifest.json");
  write_manifest(manifest, "chernoff",
                 {{"probs", o.probs}, {"reps", o.reps}, {"L", o.half_width}, {"delta", o.step}},
                 o.seed, {}, {path.filename().string(), manifest.filename().string()});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monotone hazard ratio estimation and inference for right-censored two-sample data", "mhr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  const unsigned threads = env_thread_count();

  EstimateOptions est;
  est.threads = threads;
  auto* e = app.add_subcommand("estimate", "Fit theta_n and pointwise confidence intervals");
  e->add_option("input", est.input, "CSV with columns time,status,arm")->required();
  e->add_option("--alpha", est.alpha, "One minus the confidence level")->capture_default_str();
  e->add_option("--ci", est.ci, "Interval type")->check(CLI::IsMember({"plugin", "split", "both"}))->capture_default_str();
  e->add_option("--splits", est.splits, "Number of sample splits")->capture_default_str();
  e->add_option("--rn", est.rn, "Truncation fraction: auto or a number in (0, 1)")->capture_default_str();
  e->add_option("--grid", est.grid, "Comma-separated times, or auto")->capture_default_str();
  e->add_flag("--clamp", est.clamp, "Answer times beyond gamma_n with the last estimate");
  e->add_option("--out", est.out, "Output directory")->capture_default_str();
  e->add_option("--seed", est.seed, "Seed for the sample split")->capture_default_str();
  e->add_option("--threads", est.threads, "Worker threads (default: THREADS or hardware)");
  e->add_option("--cache-dir", est.cache_dir, "Directory for Chernoff tables")->capture_default_str();
  e->add_option("--chernoff-reps", est.chernoff_reps, "Replications for the Chernoff table")->capture_default_str();
  e->add_flag("--no-plot", est.no_plot, "Skip theta.svg");

  DiagnoseOptions dia;
  auto* d = app.add_subcommand("diagnose", "Cumulative-hazard curve against its convex minorant");
  d->add_option("input", dia.input, "CSV with columns time,status,arm")->required();
  d->add_option("--rn", dia.rn, "Truncation fraction: auto or a number in (0, 1)")->capture_default_str();
  d->add_option("--out", dia.out, "Output directory")->capture_default_str();
  d->add_flag("--no-plot", dia.no_plot, "Skip diagnostic.svg");

  SimulateOptions sim;
  sim.threads = threads;
  auto* s = app.add_subcommand("simulate", "Monte Carlo study of the estimators");
  s->add_option("--scenario", sim.scenario, "linear, convex or concave")->capture_default_str();
  s->add_option("--n", sim.n, "Sample size")->capture_default_str();
  s->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  s->add_option("--methods", sim.methods, "Comma-separated: monotone, split, kernel")->capture_default_str();
  s->add_option("--splits", sim.splits, "Splits for the split method")->capture_default_str();
  s->add_option("--alpha", sim.alpha, "One minus the confidence level")->capture_default_str();
  s->add_option("--grid", sim.grid, "Comma-separated times in (0, 2), or auto")->capture_default_str();
  s->add_option("--rn", sim.rn, "Truncation fraction: auto or a number in (0, 1)")->capture_default_str();
  s->add_option("--seed", sim.seed, "Study seed")->capture_default_str();
  s->add_option("--threads", sim.threads, "Worker threads (default: THREADS or hardware)");
  s->add_option("--out", sim.out, "Output directory")->capture_default_str();
  s->add_option("--cache-dir", sim.cache_dir, "Directory for Chernoff tables")->capture_default_str();
  s->add_option("--chernoff-reps", sim.chernoff_reps, "Replications for the Chernoff table")->capture_default_str();

  OrderOptions ord;
  auto* oc = app.add_subcommand("order-check", "Compare two discrete laws in the MHR, HR, ST and LR orders");
  oc->add_option("files", ord.files, "Mass-function CSVs (support,mass) for S and T");
  oc->add_flag("--figure1", ord.figure1, "Run the built-in reference pairs");
  oc->add_option("--out", ord.out, "Optional output directory for orders.csv");

  ChernoffOptions chn;
  chn.threads = threads;
  auto* c = app.add_subcommand("chernoff", "Tabulate Chernoff quantiles by simulation");
  c->add_option("--probs", chn.probs, "Comma-separated probabilities, or default")->capture_default_str();
  c->add_option("--reps", chn.reps, "Replications")->capture_default_str();
  c->add_option("--L", chn.half_width, "Half-width of the simulation window")->capture_default_str();
  c->add_option("--delta", chn.step, "Grid spacing")->capture_default_str();
  c->add_option("--seed", chn.seed, "Seed")->capture_default_str();
  c->add_option("--out", chn.out, "Table file; reused when its config matches")->capture_default_str();
  c->add_option("--threads", chn.threads, "Worker threads (default: THREADS or hardware)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (e->parsed()) return cmd_estimate(est, out);
    if (d->parsed()) return cmd_diagnose(dia, out);
    if (s->parsed()) return cmd_simulate(sim, out);
    if (oc->parsed()) return cmd_order_check(ord, out);
    if (c->parsed()) return cmd_chernoff(chn, out);
  } catch (const DegenerateError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitDegenerate;
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const json::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace mhr::cli
