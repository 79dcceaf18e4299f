#pragma once

// JSON and CSV rendering of library results for the command-line tool.

#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "divcorr/divcorr.hpp"

namespace divcorr::report {

using Json = nlohmann::ordered_json;

inline Json scalar(const Complex& c) { return Json{{"re", c.real()}, {"im", c.imag()}}; }
inline Json scalar(const Rational& q) { return Json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}}; }

inline Json optional_u64(const std::optional<std::uint64_t>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json identity(const IdentityReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  Json j{{"identity", r.identity}, {"params", params}, {"x", r.x}, {"mode", mode_name(r.mode)}};
  if (r.mode == Mode::Exact) {
    j["max_abs_deviation"] = r.max_abs_deviation_exact;
  } else {
    j["max_abs_deviation"] = r.max_abs_deviation;
  }
  j["worst_n"] = optional_u64(r.worst_n);
  j["terms_evaluated"] = r.terms_evaluated;
  j["warnings"] = r.warnings;
  return j;
}

inline Json coefficients(const HBCoefficients& c) {
  Json b = Json::array();
  for (const auto& q : c.b) b.push_back(scalar(q));
  Json a = Json::array();
  for (const auto& [m, q] : c.a) a.push_back(Json{{"m", m}, {"a", scalar(q)}});
  return Json{{"K", c.K}, {"N", c.N}, {"u", c.u}, {"v", c.v}, {"b", b}, {"a", a}};
}

template <Scalar S>
Json friable(const FriableReport<S>& r) {
  return Json{{"sum_total", scalar(r.sum_total)}, {"sum_sigma_i", scalar(r.sum_i)},
              {"sum_sigma_triv", scalar(r.sum_triv)}, {"split_mass", scalar(r.split_mass)},
              {"residual", scalar(r.residual)}, {"count_sigma_i", r.count_i},
              {"count_sigma_triv", r.count_triv}, {"count_split", r.count_split},
              {"max_n1", r.max_n1}};
}

template <Scalar S>
Json partials(const std::vector<std::pair<DirichletCharacter, S>>& ps) {
  Json out = Json::array();
  for (const auto& [chi, v] : ps) {
    out.push_back(Json{{"character", chi.label()}, {"conductor", chi.conductor()}, {"value", scalar(v)}});
  }
  return out;
}

template <Scalar S>
Json correlation(const CorrelationReport<S>& r) {
  return Json{{"d_value", scalar(r.d_value)},
              {"m_value", scalar(r.m_value)},
              {"sigma_value", scalar(r.sigma_value)},
              {"sigma_interval", Json{{"lo", r.sigma_lo}, {"hi", r.sigma_hi}}},
              {"normalized_gap", r.normalized_gap},
              {"m_partials", partials(r.m_partials)}};
}

inline Json euler(const std::string& name, const EulerValue& v) {
  Json j{{"name", name}, {"value", scalar(v.value)}, {"prime_cutoff", v.prime_cutoff}, {"tail_bound", v.tail_bound}};
  j["log_tail_bound"] = v.log_tail_bound ? Json(*v.log_tail_bound) : Json(nullptr);
  return j;
}

inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_leaf(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return csv_double(j.get<double>());
  if (j.is_null()) return "";
  return j.dump();
}

// Flattens a JSON document to "key,value" rows with dotted paths.
inline void csv_flatten(std::ostream& os, const Json& j, const std::string& path) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) csv_flatten(os, v, path.empty() ? k : path + "." + k);
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) csv_flatten(os, v, path + "." + std::to_string(i++));
  } else {
    os << path << ',' << csv_leaf(j) << '\n';
  }
}

// Renders an array of flat records as a table; nested scalars become
// "<key>.re,<key>.im" or "<key>.num,<key>.den" columns.
inline void csv_table(std::ostream& os, const Json& rows) {
  if (rows.empty()) return;
  std::vector<std::string> header;
  auto collect = [&](const Json& row, auto&& self, const std::string& prefix) -> void {
    for (const auto& [k, v] : row.items()) {
      const std::string key = prefix.empty() ? k : prefix + "." + k;
      if (v.is_object()) {
        self(v, self, key);
      } else {
        header.push_back(key);
      }
    }
  };
  collect(rows.front(), collect, "");
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    bool first = true;
    auto emit = [&](const Json& r, auto&& self) -> void {
      for (const auto& [k, v] : r.items()) {
        if (v.is_object()) {
          self(v, self);
          continue;
        }
        os << (first ? "" : ",") << csv_leaf(v);
        first = false;
      }
    };
    emit(row, emit);
    os << '\n';
  }
}

}  // namespace divcorr::report
