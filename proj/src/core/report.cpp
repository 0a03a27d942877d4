#include "core/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/errors.hpp"

namespace fokker {

IdentityReport::IdentityReport(std::string name_, double lhs_, double rhs_, double tolerance_,
                               std::string lhs_method_, std::string rhs_method_,
                               std::vector<std::pair<std::string, std::string>> params_)
    : name(std::move(name_)),
      lhs(lhs_),
      rhs(rhs_),
      tolerance(tolerance_),
      lhs_method(std::move(lhs_method_)),
      rhs_method(std::move(rhs_method_)),
      params(std::move(params_)) {
  require(lhs_method != rhs_method, ErrorCode::invalid_argument,
          "identity report '" + name + "': both sides computed by '" + lhs_method + "'");
  require(tolerance > 0.0, ErrorCode::invalid_argument, "identity report needs a positive tolerance");
  abs_err = std::abs(lhs - rhs);
  rel_err = abs_err / std::max(std::max(std::abs(lhs), std::abs(rhs)), 1e-8);
  passed = (abs_err <= tolerance) || (rel_err <= tolerance);
}

void IdentityReport::add_param(const std::string& key, const std::string& value) {
  params.emplace_back(key, value);
}

void IdentityReport::add_param(const std::string& key, double value) {
  params.emplace_back(key, format_double(value));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

std::string report_params_json(const IdentityReport& r) {
  std::string out = "{";
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (i) out += ",";
    out += "\"" + json_escape(r.params[i].first) + "\":\"" + json_escape(r.params[i].second) + "\"";
  }
  out += "}";
  return out;
}

std::string reports_to_csv(std::span<const IdentityReport> reports) {
  std::string out = "name,lhs,rhs,abs_err,rel_err,tolerance,passed,lhs_method,rhs_method,params\n";
  for (const auto& r : reports) {
    out += r.name + "," + format_double(r.lhs) + "," + format_double(r.rhs) + "," +
           format_double(r.abs_err) + "," + format_double(r.rel_err) + "," +
           format_double(r.tolerance) + "," + (r.passed ? "true" : "false") + "," + r.lhs_method +
           "," + r.rhs_method + "," + csv_quote(report_params_json(r)) + "\n";
  }
  return out;
}

std::string reports_to_summary(std::span<const IdentityReport> reports) {
  std::ostringstream out;
  std::size_t npass = 0;
  for (const auto& r : reports) {
    npass += r.passed ? 1 : 0;
    char line[256];
    std::snprintf(line, sizeof(line), "[%s] %-28s lhs=% .6e  rhs=% .6e  rel_err=%.3e  tol=%.1e\n",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.lhs, r.rhs, r.rel_err, r.tolerance);
    out << line;
  }
  out << npass << "/" << reports.size() << " checks passed\n";
  return out.str();
}

bool all_passed(std::span<const IdentityReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

}  // namespace fokker
