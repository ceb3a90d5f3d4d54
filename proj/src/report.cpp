#include "coursegate/report.hpp"

#include <algorithm>

namespace coursegate {

bool ValidationReport::has_errors() const noexcept {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Severity::kError;
  });
}

std::size_t ValidationReport::count(const std::string& code) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(),
      [&](const Finding& f) { return f.code == code; }));
}

void ValidationReport::error(std::string code, std::string message,
                             std::string field) {
  findings.push_back({Severity::kError, std::move(code), std::move(message),
                      std::move(field)});
}

void ValidationReport::warning(std::string code, std::string message,
                               std::string field) {
  findings.push_back({Severity::kWarning, std::move(code), std::move(message),
                      std::move(field)});
}

nlohmann::json to_json(const ValidationReport& report) {
  auto out = nlohmann::json::array();
  for (const auto& f : report.findings) {
    out.push_back({{"severity", f.severity == Severity::kError ? "error" : "warning"},
                   {"code", f.code},
                   {"message", f.message},
                   {"field", f.field}});
  }
  return out;
}

}  // namespace coursegate
