#pragma once

// JSON mappings for report types. Non-finite reals are written as null and
// read back as +infinity.

#include <cmath>
#include <limits>

#include <json.hpp>

#include "svloc/certificates.hpp"
#include "svloc/ensemble.hpp"
#include "svloc/localization.hpp"

namespace svloc {

using Json = nlohmann::json;

inline Json real_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline double real_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline void to_json(Json& j, const TailConstants& c) {
  j = Json{{"c_lower", c.c_lower}, {"c_upper", c.c_upper}, {"t0", c.t0}};
}

inline void from_json(const Json& j, TailConstants& c) {
  c.c_lower = j.at("c_lower").get<double>();
  c.c_upper = j.at("c_upper").get<double>();
  c.t0 = j.at("t0").get<double>();
}

inline Json law_json(const TailLaw& law) {
  Json j{{"kind", std::string(to_string(law.kind()))},
         {"alpha", real_json(law.alpha())},
         {"scale", law.scale()},
         {"normalize_variance", law.normalize_variance()},
         {"output_factor", law.output_factor()}};
  j["constants"] = law.constants() ? Json(*law.constants()) : Json(nullptr);
  return j;
}

inline void to_json(Json& j, const MassProfilePoint& p) {
  j = Json{{"epsilon", p.epsilon}, {"kept", p.kept}, {"value", p.value}};
}

inline void from_json(const Json& j, MassProfilePoint& p) {
  p.epsilon = j.at("epsilon").get<double>();
  p.kept = j.at("kept").get<std::size_t>();
  p.value = j.at("value").get<double>();
}

inline void to_json(Json& j, const LocalizationReport& r) {
  j = Json{{"n", r.n},
           {"c_threshold", r.c_threshold},
           {"threshold", r.threshold},
           {"log_base", "e"},
           {"hat_I", r.hat_I},
           {"hat_I_size", r.hat_I.size()},
           {"hat_I_mass", r.hat_I_mass},
           {"cardinality_bound", r.cardinality_bound},
           {"min_mass_profile", r.min_mass_profile},
           {"ipr", r.ipr},
           {"top_mass_nlogn", r.top_mass_nlogn},
           {"degenerate_flag", r.degenerate_flag}};
}

inline void from_json(const Json& j, LocalizationReport& r) {
  r.n = j.at("n").get<std::size_t>();
  r.c_threshold = j.at("c_threshold").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.hat_I = j.at("hat_I").get<IndexSet>();
  r.hat_I_mass = j.at("hat_I_mass").get<double>();
  r.cardinality_bound = j.at("cardinality_bound").get<double>();
  r.min_mass_profile = j.at("min_mass_profile").get<std::vector<MassProfilePoint>>();
  r.ipr = j.at("ipr").get<double>();
  r.top_mass_nlogn = j.at("top_mass_nlogn").get<double>();
  r.degenerate_flag = j.at("degenerate_flag").get<bool>();
}

inline void to_json(Json& j, const CertificateReport& r) {
  j = Json{{"tau", r.tau},
           {"J", r.J},
           {"J_size", r.J_size},
           {"norm_XJ", r.norm_XJ},
           {"smin_XJ", r.smin_XJ},
           {"certified_upper", real_json(r.certified_upper)},
           {"observed_smin", r.observed_smin},
           {"s_max", r.s_max},
           {"valid", r.valid},
           {"note", r.note}};
}

inline void from_json(const Json& j, CertificateReport& r) {
  r.tau = j.at("tau").get<double>();
  r.J = j.at("J").get<IndexSet>();
  r.J_size = j.at("J_size").get<std::size_t>();
  r.norm_XJ = j.at("norm_XJ").get<double>();
  r.smin_XJ = j.at("smin_XJ").get<double>();
  r.certified_upper = real_from(j.at("certified_upper"));
  r.observed_smin = j.at("observed_smin").get<double>();
  r.s_max = j.value("s_max", 0.0);
  r.valid = j.at("valid").get<bool>();
  r.note = j.value("note", std::string());
}

}  // namespace svloc
