#pragma once

// Plain-text verification reports: header key=value lines, one line per
// check, and a closing status block.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace mcdt::cli {

struct Check {
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

class Report {
 public:
  explicit Report(std::string suite) : suite_(std::move(suite)) {}

  void set(std::string key, std::string value) { header_.emplace_back(std::move(key), std::move(value)); }
  void set(std::string key, double value);
  void detail(std::string line) { details_.push_back(std::move(line)); }

  /// Records |measured - target| <= tolerance.
  bool check_close(std::string name, double measured, double target, double tolerance, std::string note = {});
  /// Records a boolean outcome; measured is 1 or 0 against target 1.
  bool check_true(std::string name, bool ok, std::string note = {});
  /// Records measured <= bound.
  bool check_at_most(std::string name, double measured, double bound, std::string note = {});

  const std::string& suite() const noexcept { return suite_; }
  const std::vector<Check>& checks() const noexcept { return checks_; }
  std::size_t failures() const noexcept;
  bool passed() const noexcept { return failures() == 0; }

  std::string render() const;

 private:
  std::string suite_;
  std::vector<std::pair<std::string, std::string>> header_;
  std::vector<std::string> details_;
  std::vector<Check> checks_;
};

/// Comma list with 17 significant digits.
std::string format_list(const std::vector<double>& xs);

}  // namespace mcdt::cli
