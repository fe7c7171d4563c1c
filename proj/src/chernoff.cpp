#include "mhr/chernoff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "mhr/error.hpp"
#include "mhr/gcm.hpp"
#include "mhr/parallel.hpp"

namespace mhr {

std::vector<double> ChernoffConfig::default_probabilities() {
  std::vector<double> p = {0.001, 0.0025, 0.005, 0.01, 0.025};
  for (int k = 1; k <= 19; ++k) p.push_back(k / 20.0);
  for (double q : {0.975, 0.99, 0.995, 0.9975, 0.999}) p.push_back(q);
  return p;
}

void ChernoffConfig::validate() const {
  if (replications < 2) throw InputError("chernoff: need at least 2 replications");
  if (!(half_width > 0.0) || !(step > 0.0) || step >= half_width) {
    throw InputError("chernoff: need 0 < step < half_width");
  }
  if (probabilities.empty()) throw InputError("chernoff: no probabilities requested");
  for (double p : probabilities) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("chernoff: probabilities must lie in (0, 1)");
  }
}

std::string ChernoffConfig::hash() const {
  const std::string text = to_json(*this).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double ChernoffTable::quantile(double p) const {
  if (probabilities.empty()) throw InputError("chernoff table is empty");
  if (p < probabilities.front() || p > probabilities.back()) {
    throw InputError("chernoff table: probability " + std::to_string(p) +
                     " outside tabulated range");
  }
  auto it = std::lower_bound(probabilities.begin(), probabilities.end(), p);
  const auto k = static_cast<std::size_t>(it - probabilities.begin());
  if (*it == p) return quantiles[k];
  const double w = (p - probabilities[k - 1]) / (probabilities[k] - probabilities[k - 1]);
  return (1.0 - w) * quantiles[k - 1] + w * quantiles[k];
}

// ---------------------------------------------------------------------------

double chernoff_draw(Rng& rng, double half_width, double step) {
  const auto m = static_cast<std::ptrdiff_t>(std::llround(half_width / step));
  std::normal_distribution<double> gauss(0.0, std::sqrt(step));
  std::vector<PlanePoint> path(static_cast<std::size_t>(2 * m + 1));
  const auto centre = static_cast<std::size_t>(m);
  path[centre] = {0.0, 0.0};
  double b = 0.0;
  for (std::ptrdiff_t k = 1; k <= m; ++k) {
    b += gauss(rng);
    const double t = static_cast<double>(k) * step;
    path[centre + static_cast<std::size_t>(k)] = {t, b + t * t};
  }
  b = 0.0;
  for (std::ptrdiff_t k = 1; k <= m; ++k) {
    b += gauss(rng);
    const double t = -static_cast<double>(k) * step;
    path[centre - static_cast<std::size_t>(k)] = {t, b + t * t};
  }
  const auto hull = lower_convex_hull(path);
  return 0.5 * left_slope_at(hull, 0.0);
}

std::vector<double> chernoff_sample(const ChernoffConfig& config, unsigned threads) {
  config.validate();
  std::vector<double> draws(config.replications);
  parallel_for(config.replications, threads, [&](std::size_t r) {
    Rng rng(derive_seed(config.seed, r));
    draws[r] = chernoff_draw(rng, config.half_width, config.step);
  });
  return draws;
}

namespace {

// Type-7 (linear interpolation) quantile of sorted data.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ChernoffTable simulate_chernoff_table(const ChernoffConfig& config, unsigned threads) {
  auto draws = chernoff_sample(config, threads);
  ChernoffTable table;
  table.config = config;
  const double nd = static_cast<double>(draws.size());
  table.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / nd;
  double ss = 0.0;
  for (double d : draws) ss += (d - table.mean) * (d - table.mean);
  table.variance = ss / (nd - 1.0);

  std::sort(draws.begin(), draws.end());
  table.probabilities = config.probabilities;
  std::sort(table.probabilities.begin(), table.probabilities.end());
  table.probabilities.erase(std::unique(table.probabilities.begin(), table.probabilities.end()),
                            table.probabilities.end());
  for (double p : table.probabilities) table.quantiles.push_back(sorted_quantile(draws, p));
  return table;
}

double chernoff_quantile(double p, ChernoffConfig config, unsigned threads) {
  config.probabilities = {p};
  return simulate_chernoff_table(config, threads).quantiles.front();
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const ChernoffConfig& c) {
  return {{"replications", c.replications},
          {"half_width", c.half_width},
          {"step", c.step},
          {"seed", c.seed},
          {"probabilities", c.probabilities}};
}

ChernoffConfig chernoff_config_from_json(const nlohmann::json& j) {
  ChernoffConfig c;
  c.replications = j.at("replications").get<std::size_t>();
  c.half_width = j.at("half_width").get<double>();
  c.step = j.at("step").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.probabilities = j.at("probabilities").get<std::vector<double>>();
  return c;
}

nlohmann::json to_json(const ChernoffTable& t) {
  return {{"config", to_json(t.config)},
          {"config_hash", t.config.hash()},
          {"probabilities", t.probabilities},
          {"quantiles", t.quantiles},
          {"mean", t.mean},
          {"variance", t.variance}};
}

ChernoffTable chernoff_table_from_json(const nlohmann::json& j) {
  ChernoffTable t;
  t.config = chernoff_config_from_json(j.at("config"));
  t.probabilities = j.at("probabilities").get<std::vector<double>>();
  t.quantiles = j.at("quantiles").get<std::vector<double>>();
  t.mean = j.at("mean").get<double>();
  t.variance = j.at("variance").get<double>();
  if (t.probabilities.size() != t.quantiles.size() || t.probabilities.empty()) {
    throw InputError("chernoff table: probabilities and quantiles differ in length");
  }
  return t;
}

std::filesystem::path chernoff_cache_path(const std::filesystem::path& cache_dir,
                                          const ChernoffConfig& config) {
  return cache_dir / ("chernoff_" + config.hash() + ".json");
}

ChernoffTable load_or_simulate_chernoff(const ChernoffConfig& config,
                                        const std::filesystem::path& path, unsigned threads,
                                        bool* computed) {
  config.validate();
  if (std::filesystem::exists(path)) {
    try {
      std::ifstream in(path);
      const auto j = nlohmann::json::parse(in);
      if (j.value("config_hash", std::string{}) == config.hash()) {
        if (computed) *computed = false;
        return chernoff_table_from_json(j);
      }
    } catch (const nlohmann::json::exception&) {
      // unreadable cache entry: regenerate below
    }
  }
  auto table = simulate_chernoff_table(config, threads);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write chernoff table to " + path.string());
  out << to_json(table).dump(2) << '\n';
  if (computed) *computed = true;
  return table;
}

}  // namespace mhr
