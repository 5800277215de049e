#include "fourier_ns/report.hpp"

#include <cmath>
#include <ostream>

namespace fourier_ns {

namespace {

// JSON has no inf/nan; keep them readable instead of null.
nlohmann::ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::ordered_json to_json(const CheckRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["claim"] = r.claim;
  j["inputs"] = r.inputs;
  j["measured"] = number(r.measured);
  j["bound"] = number(r.bound);
  j["margin"] = number(r.margin);
  j["pass"] = r.pass;
  return j;
}

CheckRecord& DiagnosticsReport::add(CheckRecord r) {
  records_.push_back(std::move(r));
  return records_.back();
}

CheckRecord& DiagnosticsReport::add_upper(std::string id, std::string claim, nlohmann::ordered_json inputs,
                                          double measured, double bound) {
  CheckRecord r{std::move(id), std::move(claim), std::move(inputs), measured, bound, bound - measured,
                measured <= bound};
  return add(std::move(r));
}

CheckRecord& DiagnosticsReport::add_lower(std::string id, std::string claim, nlohmann::ordered_json inputs,
                                          double measured, double bound) {
  CheckRecord r{std::move(id), std::move(claim), std::move(inputs), measured, bound, measured - bound,
                measured >= bound};
  return add(std::move(r));
}

bool DiagnosticsReport::pass() const { return failures() == 0; }

int DiagnosticsReport::failures() const {
  int n = 0;
  for (const auto& r : records_) n += r.pass ? 0 : 1;
  return n;
}

void DiagnosticsReport::write_jsonl(std::ostream& out) const {
  for (const auto& r : records_) out << to_json(r).dump() << '\n';
}

void DiagnosticsReport::write_jsonl(std::ostream& out, const nlohmann::ordered_json& header) const {
  out << header.dump() << '\n';
  write_jsonl(out);
}

}  // namespace fourier_ns
