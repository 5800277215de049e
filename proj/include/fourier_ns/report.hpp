#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace fourier_ns {

/// One verification record: the measured quantity against its bound.
struct CheckRecord {
  std::string id;
  std::string claim;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

nlohmann::ordered_json to_json(const CheckRecord& r);

/// Ordered record list, written as JSON Lines (one record per line).
class DiagnosticsReport {
 public:
  CheckRecord& add(CheckRecord r);
  /// Record with margin = bound - measured and pass = measured <= bound.
  CheckRecord& add_upper(std::string id, std::string claim, nlohmann::ordered_json inputs, double measured,
                         double bound);
  /// Record with margin = measured - bound and pass = measured >= bound.
  CheckRecord& add_lower(std::string id, std::string claim, nlohmann::ordered_json inputs, double measured,
                         double bound);
  const std::vector<CheckRecord>& records() const { return records_; }
  bool pass() const;
  int failures() const;
  void write_jsonl(std::ostream& out) const;
  /// Same, preceded by one line holding `header` (run provenance).
  void write_jsonl(std::ostream& out, const nlohmann::ordered_json& header) const;

 private:
  std::vector<CheckRecord> records_;
};

}  // namespace fourier_ns
