#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dynkc {

/// Result of an audit: an exhaustive list of violation messages.
/// Empty means the checked property holds.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }

  void add(std::string message) { violations.push_back(std::move(message)); }

  void merge(const ValidationReport& other, const std::string& prefix = "") {
    for (const std::string& v : other.violations) violations.push_back(prefix + v);
  }
};

}  // namespace dynkc
