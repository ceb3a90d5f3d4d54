#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coursegate {

enum class Severity { kError, kWarning };

struct Finding {
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  std::string field;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const noexcept { return findings.empty(); }
  bool has_errors() const noexcept;
  std::size_t count(const std::string& code) const noexcept;

  void error(std::string code, std::string message, std::string field = {});
  void warning(std::string code, std::string message, std::string field = {});
};

nlohmann::json to_json(const ValidationReport& report);

}  // namespace coursegate
