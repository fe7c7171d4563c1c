#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mhr/survival.hpp"

namespace testing {

// Random two-arm censored sample. Times are drawn from a small integer grid
// when `ties` is set so that tied events and censorings occur often.
inline mhr::CensoredSample random_sample(std::mt19937_64& rng, std::size_t n, bool ties = false,
                                         double censor_prob = 0.3) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> grid(1, 12);
  std::vector<mhr::Observation> obs;
  for (std::size_t i = 0; i < n; ++i) {
    const mhr::Arm arm = i % 2 == 0 ? mhr::Arm::control : mhr::Arm::treatment;
    const double t = ties ? grid(rng) * 0.25 : -std::log(unif(rng)) * (arm == mhr::Arm::control ? 1.0 : 0.8);
    obs.push_back({t, unif(rng) >= censor_prob, arm});
  }
  return mhr::CensoredSample(std::move(obs));
}

inline mhr::CensoredSample make_sample(const std::vector<double>& times, const std::vector<int>& status,
                                       const std::vector<int>& arms) {
  std::vector<mhr::Observation> obs;
  for (std::size_t i = 0; i < times.size(); ++i)
    obs.push_back({times[i], status[i] != 0, arms[i] != 0 ? mhr::Arm::treatment : mhr::Arm::control});
  return mhr::CensoredSample(std::move(obs));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mhr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
