#include "mhr/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "mhr/error.hpp"

namespace mhr::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

Table parse_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (t.header.empty()) {
      if (lineno == 1 && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    t.rows.emplace_back(lineno, std::move(fields));
  }
  if (t.header.empty()) throw InputError("line 1: missing header");
  return t;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t k = 0; k < t.header.size(); ++k)
    if (t.header[k] == name) return k;
  throw InputError("line 1: missing column '" + name + "'");
}

double parse_number(const std::string& field, std::size_t lineno, const std::string& name) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw InputError("line " + std::to_string(lineno) + ": " + name + " '" + field + "' is not a finite number");
  return v;
}

bool parse_flag(const std::string& field, std::size_t lineno, const std::string& name) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw InputError("line " + std::to_string(lineno) + ": " + name + " must be 0 or 1, found '" + field + "'");
}

nlohmann::json step_to_json(const StepFunction& f) {
  return {{"knots", f.knots()}, {"values", f.values()}, {"value_at_zero", f.value_at_zero()}};
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("fit.json: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("fit.json: field '") + key + "' has the wrong type");
  }
}

StepFunction step_from_json(const nlohmann::json& j) {
  return StepFunction(field<std::vector<double>>(j, "knots"), field<std::vector<double>>(j, "values"),
                      field<double>(j, "value_at_zero"));
}

}  // namespace

CensoredSample parse_sample_csv(const std::string& text) {
  const Table t = parse_table(text);
  const auto ct = column(t, "time");
  const auto cs = column(t, "status");
  const auto ca = column(t, "arm");
  std::vector<Observation> obs;
  obs.reserve(t.rows.size());
  for (const auto& [lineno, f] : t.rows) {
    const double time = parse_number(f[ct], lineno, "time");
    if (time < 0.0) throw InputError("line " + std::to_string(lineno) + ": negative time");
    obs.push_back({time, parse_flag(f[cs], lineno, "status"),
                   parse_flag(f[ca], lineno, "arm") ? Arm::treatment : Arm::control});
  }
  if (obs.empty()) throw InputError("no data rows");
  return CensoredSample(std::move(obs));
}

CensoredSample read_sample_csv(const std::filesystem::path& path) {
  return parse_sample_csv(read_text_file(path));
}

DiscreteDistribution parse_mass_csv(const std::string& text) {
  const Table t = parse_table(text);
  const auto cs = column(t, "support");
  const auto cm = column(t, "mass");
  std::vector<double> support, mass;
  for (const auto& [lineno, f] : t.rows) {
    support.push_back(parse_number(f[cs], lineno, "support"));
    mass.push_back(parse_number(f[cm], lineno, "mass"));
  }
  return DiscreteDistribution(std::move(support), std::move(mass), 1e-9);
}

DiscreteDistribution read_mass_csv(const std::filesystem::path& path) {
  return parse_mass_csv(read_text_file(path));
}

nlohmann::json fit_to_json(const MhrFit& fit) {
  nlohmann::json hull_vertices = nlohmann::json::array();
  for (const auto& p : fit.hull.vertices) hull_vertices.push_back({p.u, p.v});
  return {{"n", fit.n},
          {"r_n", fit.r_n},
          {"gamma_n", fit.gamma_n},
          {"eta_n", fit.eta_n},
          {"theta", step_to_json(fit.theta)},
          {"hull", {{"vertices", hull_vertices}, {"slopes", fit.hull.slopes}}},
          {"cumhaz_treatment", step_to_json(fit.lambda_S_hat)},
          {"cumhaz_control", step_to_json(fit.lambda_T_hat)}};
}

MhrFit fit_from_json(const nlohmann::json& j) {
  MhrFit fit;
  fit.n = field<std::size_t>(j, "n");
  fit.r_n = field<double>(j, "r_n");
  fit.gamma_n = field<double>(j, "gamma_n");
  fit.eta_n = field<double>(j, "eta_n");
  fit.theta = step_from_json(field<nlohmann::json>(j, "theta"));
  const auto hull = field<nlohmann::json>(j, "hull");
  for (const auto& v : field<std::vector<std::vector<double>>>(hull, "vertices")) {
    if (v.size() != 2) throw InputError("fit.json: hull vertices must be pairs");
    fit.hull.vertices.push_back({v[0], v[1]});
  }
  fit.hull.slopes = field<std::vector<double>>(hull, "slopes");
  if (fit.hull.vertices.empty() || fit.hull.slopes.size() + 1 != fit.hull.vertices.size())
    throw InputError("fit.json: hull slopes do not match its vertices");
  fit.lambda_S_hat = step_from_json(field<nlohmann::json>(j, "cumhaz_treatment"));
  fit.lambda_T_hat = step_from_json(field<nlohmann::json>(j, "cumhaz_control"));
  return fit;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

}  // namespace mhr::cli
