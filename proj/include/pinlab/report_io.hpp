#pragma once

// Serialization of model parameters, spectra, and pinning reports. All
// floating-point payloads are rendered as full-precision decimal strings so
// that output is lossless and byte-stable across runs.

#include "pinlab/harmonium.hpp"
#include "pinlab/polytope.hpp"
#include "pinlab/spectrum.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pinlab {

// One sweep result. Numeric fields are preformatted; status is "ok" or the
// failure reason for that point.
struct SweepRow {
  std::string kappa;
  std::string delta;
  std::string d_min;
  std::string argmin_label;
  std::string q_overall;
  std::string hf_distance;
  std::string truncation_error;
  std::string setting;
  std::string status;
};

std::string csv_escape(const std::string& field);
std::string csv_header();
std::string csv_row(const SweepRow& row);

// Canonical text form: two-space indent, sorted keys, trailing newline.
std::string json_text(const nlohmann::json& j);

template <class S>
nlohmann::json params_to_json(const HarmoniumParams<S>& p) {
  nlohmann::json j;
  j["n_particles"] = p.n;
  j["kappa"] = format_full(p.kappa);
  j["delta"] = format_full(p.delta);
  j["scale_ratio"] = format_full(p.scale_ratio);
  j["q"] = format_full(p.q);
  j["basis_scale"] = format_full(p.basis_scale);
  return j;
}

template <class S>
nlohmann::json spectrum_to_json(const OccupationSpectrum<S>& s) {
  nlohmann::json j;
  j["n_particles"] = s.n_particles;
  j["precision_bits"] = s.precision_bits;
  j["tail_bound"] = format_full(s.tail_bound);
  auto& vals = j["values"] = nlohmann::json::array();
  for (int i = 0; i < s.values.size(); ++i)
    vals.push_back(format_full(s.values[i]));
  return j;
}

template <class S>
nlohmann::json report_to_json(const PinningReport<S>& r) {
  nlohmann::json j;
  j["setting"] = r.setting.str();
  auto& dv = j["d_values"] = nlohmann::json::array();
  for (const auto& [label, value] : r.d_values) {
    nlohmann::json e;
    e["label"] = label;
    e["value"] = format_full(value);
    dv.push_back(e);
  }
  j["d_min"] = {{"label", r.argmin_label}, {"value", format_full(r.d_min_value)}};
  auto& qv = j["q_values"] = nlohmann::json::array();
  for (const auto& [label, value] : r.q_values) {
    nlohmann::json e;
    e["label"] = label;
    e["value"] = format_full(value);
    qv.push_back(e);
  }
  j["q_overall"] = format_full(r.q_overall);
  j["truncation"] = {{"r", r.plan.r},
                     {"s", r.plan.s},
                     {"error_bound", format_full(r.plan.error_bound)}};
  j["hf_distance"] = format_full(r.hf_distance_value);
  j["verdict"] = r.verdict;
  return j;
}

}  // namespace pinlab
