#pragma once

// File formats of the command-line tool.
//   sample CSV   header with columns time,status,arm (any order, extra
//                columns ignored); status and arm are 0 or 1
//   mass CSV     header support,mass
//   fit.json     theta_n, the truncation quantities, the hull and both
//                Nelson-Aalen estimates

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mhr/estimator.hpp"
#include "mhr/orders.hpp"
#include "mhr/survival.hpp"

namespace mhr::cli {

/// InputError naming the offending line on malformed input.
CensoredSample parse_sample_csv(const std::string& text);
CensoredSample read_sample_csv(const std::filesystem::path& path);

/// Masses must sum to 1 within 1e-9.
DiscreteDistribution parse_mass_csv(const std::string& text);
DiscreteDistribution read_mass_csv(const std::filesystem::path& path);

nlohmann::json fit_to_json(const MhrFit& fit);
/// Inverse of fit_to_json; InputError on missing or mistyped fields.
MhrFit fit_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Shortest "%.*g" form that reads back to the same double; "nan" and
/// "inf" are spelled out.
std::string format_number(double value);

}  // namespace mhr::cli
