#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fokker {

//! Outcome of one numerical identity check. The two sides must come from
//! methods that share no code path beyond grid/quadrature, and the
//! constructor rejects reports whose sides name the same method.
struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string lhs_method;
  std::string rhs_method;
  std::vector<std::pair<std::string, std::string>> params;

  IdentityReport(std::string name, double lhs, double rhs, double tolerance,
                 std::string lhs_method, std::string rhs_method,
                 std::vector<std::pair<std::string, std::string>> params = {});

  void add_param(const std::string& key, const std::string& value);
  void add_param(const std::string& key, double value);
};

std::string format_double(double v);  // 17 significant digits, locale-free

// Parameter record rendered as one JSON object.
std::string report_params_json(const IdentityReport& report);

// CSV with header name,lhs,rhs,abs_err,rel_err,tolerance,passed,params;
// params is a JSON object rendered as one quoted CSV field.
std::string reports_to_csv(std::span<const IdentityReport> reports);

// Human-readable pass/fail table with a trailing pass count line.
std::string reports_to_summary(std::span<const IdentityReport> reports);

bool all_passed(std::span<const IdentityReport> reports);

}  // namespace fokker
