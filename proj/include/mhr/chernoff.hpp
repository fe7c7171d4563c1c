#pragma once

// Monte Carlo tabulation of Chernoff's distribution, the law of
// argmax_t {B(t) - t^2} for a standard two-sided Brownian motion B.
//
// Each draw simulates B on the grid {-L, -L + step, ..., L}, takes the lower
// convex hull of t -> B(t) + t^2 and halves its left slope at 0. By the
// switching relation that slope has the law of 2 * argmax{B(t) - t^2}.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhr/rng.hpp"

namespace mhr {

struct ChernoffConfig {
  std::size_t replications = 100000;
  double half_width = 10.0;  // L
  double step = 0.005;       // grid spacing
  std::uint64_t seed = 20230917;
  std::vector<double> probabilities = default_probabilities();

  static std::vector<double> default_probabilities();

  /// Throws InputError on non-positive sizes or probabilities outside (0,1).
  void validate() const;

  /// Stable hex digest of every field; used to name cache files.
  std::string hash() const;
};

struct ChernoffTable {
  ChernoffConfig config;
  std::vector<double> probabilities;  // sorted ascending
  std::vector<double> quantiles;
  double mean = 0.0;
  double variance = 0.0;

  /// Linear interpolation between tabulated probabilities; InputError
  /// outside the tabulated range.
  double quantile(double p) const;
};

/// One Chernoff draw on a fresh grid path from `rng`.
double chernoff_draw(Rng& rng, double half_width, double step);

/// All replications of `config`, in replication order. Replication r uses
/// the stream derive_seed(config.seed, r), so the result does not depend on
/// `threads`.
std::vector<double> chernoff_sample(const ChernoffConfig& config, unsigned threads = 1);

ChernoffTable simulate_chernoff_table(const ChernoffConfig& config, unsigned threads = 1);

/// Single quantile from a fresh simulation of `config`.
double chernoff_quantile(double p, ChernoffConfig config, unsigned threads = 1);

nlohmann::json to_json(const ChernoffConfig& config);
ChernoffConfig chernoff_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChernoffTable& table);
ChernoffTable chernoff_table_from_json(const nlohmann::json& j);

/// Cache file path for `config` inside `cache_dir`.
std::filesystem::path chernoff_cache_path(const std::filesystem::path& cache_dir,
                                          const ChernoffConfig& config);

/// Reads the table from `path` if it exists and was produced by an identical
/// config; otherwise simulates and writes it. `computed` reports which.
ChernoffTable load_or_simulate_chernoff(const ChernoffConfig& config,
                                        const std::filesystem::path& path, unsigned threads,
                                        bool* computed = nullptr);

}  // namespace mhr
