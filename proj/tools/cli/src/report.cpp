#include "mcdt_cli/report.hpp"

#include <cmath>

#include "mcdt/format.hpp"

namespace mcdt::cli {

void Report::set(std::string key, double value) { set(std::move(key), format_double(value)); }

bool Report::check_close(std::string name, double measured, double target, double tolerance, std::string note) {
  const bool ok = std::isfinite(measured) && std::abs(measured - target) <= tolerance;
  checks_.push_back({std::move(name), measured, target, tolerance, ok, std::move(note)});
  return ok;
}

bool Report::check_true(std::string name, bool ok, std::string note) {
  checks_.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, ok, std::move(note)});
  return ok;
}

bool Report::check_at_most(std::string name, double measured, double bound, std::string note) {
  const bool ok = measured <= bound;
  checks_.push_back({std::move(name), measured, bound, 0.0, ok, std::move(note)});
  return ok;
}

std::size_t Report::failures() const noexcept {
  std::size_t n = 0;
  for (const auto& c : checks_) n += !c.pass;
  return n;
}

std::string Report::render() const {
  std::string out = "suite=" + suite_ + "\n";
  for (const auto& [k, v] : header_) out += k + "=" + v + "\n";
  for (const auto& d : details_) out += d + "\n";
  for (const auto& c : checks_) {
    out += "check=" + c.name + " measured=" + format_double(c.measured) + " target=" + format_double(c.target) +
           " tolerance=" + format_double(c.tolerance) + " result=" + (c.pass ? "pass" : "fail");
    if (!c.note.empty()) out += " note=" + c.note;
    out += "\n";
  }
  out += "checks=" + std::to_string(checks_.size()) + "\n";
  out += "failed=" + std::to_string(failures()) + "\n";
  out += std::string("status=") + (passed() ? "pass" : "fail") + "\n";
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += format_double(xs[i]);
  }
  return s;
}

}  // namespace mcdt::cli
