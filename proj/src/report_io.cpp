#include "pinlab/report_io.hpp"

namespace pinlab {

std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (char ch : field)
    if (ch == ',' || ch == '"' || ch == '\n') needs_quotes = true;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string csv_header() {
  return "kappa,delta,d_min,argmin_label,q_overall,hf_distance,"
         "truncation_error,setting,status";
}

std::string csv_row(const SweepRow& row) {
  std::string out;
  const std::string* fields[] = {
      &row.kappa,       &row.delta,      &row.d_min,
      &row.argmin_label, &row.q_overall, &row.hf_distance,
      &row.truncation_error, &row.setting, &row.status};
  bool first = true;
  for (const std::string* f : fields) {
    if (!first) out += ',';
    first = false;
    out += csv_escape(*f);
  }
  return out;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace pinlab
