#pragma once
//
// Scenario / report serialization (JSON via nlohmann::json, CSV by hand) and
// matrix CSV files. Requires vendor/json.hpp on the include path.
//

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmspi/bench.hpp"

namespace rmspi::io {

using Json = nlohmann::json;
using namespace rmspi::bench;

namespace detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json optional_or_null(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  rmspi::detail::require(j.is_object(), where + ": expected a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw InvalidArgument(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(where + ": bad value for '" + key + "': " + e.what());
  }
}

// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// ---------------------------------------------------------------- weights

inline Json to_json(const WeightSpec& w) {
  return {{"mode", w.mode == WeightMode::single ? "single" : "per_direction"},
          {"span", w.span_weights},
          {"complement", w.complement_weights}};
}

inline WeightSpec weight_spec_from_json(const Json& j, const std::string& where) {
  detail::reject_unknown(j, {"mode", "span", "complement"}, where);
  WeightSpec w;
  const auto mode = detail::get<std::string>(j, "mode", where);
  if (mode == "single") w.mode = WeightMode::single;
  else if (mode == "per_direction") w.mode = WeightMode::per_direction;
  else throw InvalidArgument(where + ": unknown weight mode '" + mode + "'");
  w.span_weights = detail::get<std::vector<double>>(j, "span", where);
  w.complement_weights = detail::get<std::vector<double>>(j, "complement", where);
  return w;
}

inline Json to_json(const SideWeights& w) { return {{"column", to_json(w.column)}, {"row", to_json(w.row)}}; }

inline SideWeights side_weights_from_json(const Json& j, const std::string& where) {
  detail::reject_unknown(j, {"column", "row"}, where);
  return {weight_spec_from_json(j.at("column"), where + ".column"),
          weight_spec_from_json(j.at("row"), where + ".row")};
}

// ---------------------------------------------------------------- scenario

inline Json to_json(const Scenario& s) {
  Json solvers = Json::array();
  for (Method m : s.solvers) solvers.push_back(to_string(m));
  return {{"name", s.name},
          {"n", s.n},
          {"rank", s.rank},
          {"operator_kind", to_string(s.operator_kind)},
          {"sampling_ratios", s.sampling_ratios},
          {"noise_level", s.noise_level},
          {"prior_mode", to_string(s.prior_mode)},
          {"theta_u", s.theta_u},
          {"theta_v", s.theta_v},
          {"rmspi_weights", to_json(s.rmspi_weights)},
          {"grmspi_weights", to_json(s.grmspi_weights)},
          {"trials", s.trials},
          {"solvers", solvers},
          {"master_seed", s.master_seed}};
}

/// Missing keys keep the defaults; `preset` starts from a built-in scenario
/// instead. If angles are given without weights, the weights are derived
/// from the angles with angles_to_weights. Unknown keys are rejected.
inline Scenario scenario_from_json(const Json& j) {
  const std::string where = "scenario";
  detail::reject_unknown(j,
                         {"preset", "name", "n", "rank", "operator_kind", "sampling_ratios", "noise_level",
                          "prior_mode", "theta_u", "theta_v", "rmspi_weights", "grmspi_weights", "trials",
                          "solvers", "master_seed"},
                         where);
  Scenario s;
  if (j.contains("preset")) {
    const Preset p = find_preset(detail::get<std::string>(j, "preset", where));
    rmspi::detail::require(p.scenarios.size() == 1, "scenario: preset '" + p.name + "' spans several ranks");
    s = p.scenarios.front();
  }
  if (j.contains("name")) s.name = detail::get<std::string>(j, "name", where);
  if (j.contains("n")) s.n = detail::get<Index>(j, "n", where);
  if (j.contains("rank")) s.rank = detail::get<Index>(j, "rank", where);
  if (j.contains("operator_kind")) {
    s.operator_kind = operator_kind_from_string(detail::get<std::string>(j, "operator_kind", where));
  }
  if (j.contains("sampling_ratios")) s.sampling_ratios = detail::get<std::vector<double>>(j, "sampling_ratios", where);
  if (j.contains("noise_level")) s.noise_level = detail::get<double>(j, "noise_level", where);
  if (j.contains("prior_mode")) s.prior_mode = prior_mode_from_string(detail::get<std::string>(j, "prior_mode", where));
  const bool angles = j.contains("theta_u") || j.contains("theta_v");
  if (j.contains("theta_u")) s.theta_u = detail::get<std::vector<double>>(j, "theta_u", where);
  if (j.contains("theta_v")) s.theta_v = detail::get<std::vector<double>>(j, "theta_v", where);
  if (j.contains("rmspi_weights")) {
    s.rmspi_weights = side_weights_from_json(j.at("rmspi_weights"), "scenario.rmspi_weights");
  } else if (angles) {
    s.rmspi_weights = {angles_to_weights(s.theta_u, WeightMode::single),
                       angles_to_weights(s.theta_v, WeightMode::single)};
  }
  if (j.contains("grmspi_weights")) {
    s.grmspi_weights = side_weights_from_json(j.at("grmspi_weights"), "scenario.grmspi_weights");
  } else if (angles) {
    s.grmspi_weights = {angles_to_weights(s.theta_u, WeightMode::per_direction),
                        angles_to_weights(s.theta_v, WeightMode::per_direction)};
  }
  if (j.contains("trials")) s.trials = detail::get<int>(j, "trials", where);
  if (j.contains("solvers")) {
    s.solvers.clear();
    for (const auto& name : detail::get<std::vector<std::string>>(j, "solvers", where))
      s.solvers.push_back(method_from_string(name));
  }
  if (j.contains("master_seed")) s.master_seed = detail::get<std::uint64_t>(j, "master_seed", where);
  s.validate();
  return s;
}

inline Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("scenario: malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

// ---------------------------------------------------------------- report

inline Json to_json(const TrialResult& t) {
  return {{"solver", to_string(t.solver)},
          {"rank", t.rank},
          {"ratio", t.ratio},
          {"measurements", t.measurements},
          {"trial", t.trial},
          {"operator_seed", t.op_seed},
          {"success", t.success},
          {"iterations", t.iterations},
          {"iterations_to_success", detail::optional_or_null(t.iterations_to_success)},
          {"stop_reason", to_string(t.stop_reason)},
          {"normalized_error", detail::number_or_null(t.normalized_error)},
          {"snr_db", detail::number_or_null(t.snr_db)},
          {"wall_time", t.wall_time},
          {"diagnostic", t.diagnostic}};
}

inline Json to_json(const Aggregate& a) {
  return {{"solver", to_string(a.solver)},
          {"rank", a.rank},
          {"ratio", a.ratio},
          {"measurements", a.measurements},
          {"trials", a.trials},
          {"successes", a.successes},
          {"success_rate", a.success_rate},
          {"mean_snr_db", a.mean_snr_db ? detail::number_or_null(*a.mean_snr_db) : Json(nullptr)},
          {"median_iterations", detail::optional_or_null(a.median_iterations)}};
}

inline Json to_json(const Report& r) {
  Json out{{"scenarios", Json::array()}, {"aggregates", Json::array()}, {"trials", Json::array()}};
  for (const Scenario& s : r.scenarios) out["scenarios"].push_back(to_json(s));
  for (const Aggregate& a : r.aggregates) out["aggregates"].push_back(to_json(a));
  for (const TrialResult& t : r.trials) out["trials"].push_back(to_json(t));
  return out;
}

/// One row per (solver, ratio). A leading rank column is added when the
/// report covers more than one rank.
inline std::string report_csv(const Report& r) {
  std::set<Index> ranks;
  for (const Aggregate& a : r.aggregates) ranks.insert(a.rank);
  const bool with_rank = ranks.size() > 1;
  std::ostringstream os;
  if (with_rank) os << "rank,";
  os << "solver,ratio,success_rate,mean_snr_db,median_iterations,trials\n";
  for (const Aggregate& a : r.aggregates) {
    if (with_rank) os << a.rank << ',';
    os << to_string(a.solver) << ',' << detail::fmt(a.ratio) << ',' << detail::fmt(a.success_rate) << ',';
    if (a.mean_snr_db) os << detail::fmt(*a.mean_snr_db);
    os << ',';
    if (a.median_iterations) os << detail::fmt(*a.median_iterations);
    os << ',' << a.trials << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- RIP survey

inline std::string rip_csv(const std::vector<RipCell>& cells) {
  std::ostringstream os;
  os << "rank,ratio,measurements,samples,delta_a,delta_b,ratio_min_a,ratio_max_a,ratio_min_b,ratio_max_b\n";
  for (const RipCell& c : cells) {
    os << c.rank << ',' << detail::fmt(c.ratio) << ',' << c.measurements << ',' << c.plain.samples << ','
       << detail::fmt(c.plain.delta_hat) << ',' << detail::fmt(c.weighted.delta_hat) << ','
       << detail::fmt(c.plain.ratio_min) << ',' << detail::fmt(c.plain.ratio_max) << ','
       << detail::fmt(c.weighted.ratio_min) << ',' << detail::fmt(c.weighted.ratio_max) << '\n';
  }
  return os.str();
}

inline Json to_json(const std::vector<RipCell>& cells) {
  Json out = Json::array();
  for (const RipCell& c : cells)
    out.push_back({{"rank", c.rank},
                   {"ratio", c.ratio},
                   {"measurements", c.measurements},
                   {"samples", c.plain.samples},
                   {"delta_a", c.plain.delta_hat},
                   {"delta_b", c.weighted.delta_hat},
                   {"ratio_min_a", c.plain.ratio_min},
                   {"ratio_max_a", c.plain.ratio_max},
                   {"ratio_min_b", c.weighted.ratio_min},
                   {"ratio_max_b", c.weighted.ratio_max}});
  return out;
}

// ---------------------------------------------------------------- matrices

/// First line "rows,cols" with the two counts, then one line per matrix row.
inline std::string matrix_csv(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << detail::fmt(m(i, j));
    os << '\n';
  }
  return os.str();
}

inline Matrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto cells = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) out.push_back(c);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  auto number = [](const std::string& c) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(c, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("matrix csv: bad number '" + c + "'");
    }
    while (used < c.size() && std::isspace(static_cast<unsigned char>(c[used]))) ++used;
    if (used != c.size()) throw InvalidArgument("matrix csv: bad number '" + c + "'");
    return v;
  };
  auto next = [&](std::string& l) {
    while (std::getline(in, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      if (!l.empty()) return true;
    }
    return false;
  };
  if (!next(line)) throw InvalidArgument("matrix csv: empty input");
  const auto head = cells(line);
  rmspi::detail::require(head.size() == 2, "matrix csv: header must be 'rows,cols'");
  const double r = number(head[0]), c = number(head[1]);
  rmspi::detail::require(r >= 1 && c >= 1 && r == std::floor(r) && c == std::floor(c),
                         "matrix csv: header must hold two positive integers");
  Matrix m(static_cast<Index>(r), static_cast<Index>(c));
  for (Index i = 0; i < m.rows(); ++i) {
    if (!next(line)) throw InvalidArgument("matrix csv: expected " + std::to_string(m.rows()) + " rows");
    const auto row = cells(line);
    if (static_cast<Index>(row.size()) != m.cols())
      throw InvalidArgument("matrix csv: row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = number(row[static_cast<std::size_t>(j)]);
  }
  if (next(line)) throw InvalidArgument("matrix csv: trailing rows");
  require_finite(m, "matrix csv");
  return m;
}

inline Matrix load_matrix(const std::string& path) { return parse_matrix_csv(read_file(path)); }

}  // namespace rmspi::io
