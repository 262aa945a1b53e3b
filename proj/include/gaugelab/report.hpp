#pragma once

#include "gaugelab/config.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

namespace gaugelab {

// Thrown by a check whose preconditions do not hold for the configured model.
struct NotApplicable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic per-check result: assertions (value, tolerance, pass) and plain measurements.
class Report {
 public:
  Report(std::string check, std::string operation, std::string statement)
      : check_(std::move(check)), operation_(std::move(operation)), statement_(std::move(statement)) {}

  const std::string& check() const { return check_; }
  bool passed() const { return applicable_ ? pass_ : true; }
  bool applicable() const { return applicable_; }

  void context(const ordered_json& model, std::uint64_t seed) {
    model_ = model;
    seed_ = seed;
  }

  void measure(const std::string& key, double v) { measurements_[key] = finite_or_string(v); }
  void measure(const std::string& key, Index v) { measurements_[key] = static_cast<long long>(v); }
  void measure(const std::string& key, int v) { measurements_[key] = v; }
  void measure(const std::string& key, const std::string& v) { measurements_[key] = v; }
  void measure(const std::string& key, const ordered_json& v) { measurements_[key] = v; }

  // value <= tol
  bool le(const std::string& key, double value, double tol) { return add(key, value, tol, "<=", value <= tol); }
  // value >= bound
  bool ge(const std::string& key, double value, double bound) { return add(key, value, bound, ">=", value >= bound, "bound"); }
  bool equal(const std::string& key, long long value, long long expected) {
    return add(key, static_cast<double>(value), static_cast<double>(expected), "==", value == expected, "expected");
  }
  bool truth(const std::string& key, bool value) { return add(key, value ? 1.0 : 0.0, 1.0, "==", value, "expected"); }
  bool within(const std::string& key, double value, double lo, double hi) {
    ordered_json a;
    a["name"] = key;
    a["value"] = finite_or_string(value);
    a["lower"] = finite_or_string(lo);
    a["upper"] = finite_or_string(hi);
    a["relation"] = "in";
    const bool ok = value >= lo && value <= hi;
    a["pass"] = ok;
    assertions_.push_back(a);
    if (!ok) pass_ = false;
    return ok;
  }

  void note(const std::string& s) { notes_.push_back(s); }
  void not_applicable(const std::string& reason) {
    applicable_ = false;
    notes_.push_back("not applicable: " + reason);
  }
  void error(const std::string& what) {
    pass_ = false;
    notes_.push_back("error: " + what);
  }

  ordered_json to_json() const {
    ordered_json j;
    j["check"] = check_;
    j["operation"] = operation_;
    j["statement"] = statement_;
    j["model"] = model_;
    j["seed"] = seed_;
    j["applicable"] = applicable_;
    j["pass"] = passed();
    j["assertions"] = assertions_.is_null() ? ordered_json::array() : assertions_;
    j["measurements"] = measurements_.is_null() ? ordered_json::object() : measurements_;
    j["notes"] = notes_;
    return j;
  }

  // One row per assertion and measurement: check,kind,name,value,bound,pass.
  std::string to_csv() const {
    std::ostringstream os;
    os << "check,kind,name,value,bound,pass\n";
    for (const auto& a : assertions_) {
      os << check_ << ",assertion," << a["name"].get<std::string>() << "," << a["value"].dump() << ",";
      if (a.contains("tolerance")) os << a["tolerance"].dump();
      else if (a.contains("expected")) os << a["expected"].dump();
      else if (a.contains("bound")) os << a["bound"].dump();
      else os << "[" << a["lower"].dump() << ";" << a["upper"].dump() << "]";
      os << "," << (a["pass"].get<bool>() ? "true" : "false") << "\n";
    }
    for (auto it = measurements_.begin(); it != measurements_.end(); ++it) {
      std::string v = it.value().dump();
      for (char& c : v)
        if (c == ',') c = ';';
      os << check_ << ",measurement," << it.key() << "," << v << ",,\n";
    }
    os << check_ << ",summary,pass," << (passed() ? "true" : "false") << ",," << (applicable_ ? "" : "not_applicable") << "\n";
    return os.str();
  }

 private:
  static ordered_json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  }

  bool add(const std::string& key, double value, double tol, const char* rel, bool ok, const char* tol_key = "tolerance") {
    ordered_json a;
    a["name"] = key;
    a["value"] = finite_or_string(value);
    a[tol_key] = finite_or_string(tol);
    a["relation"] = rel;
    a["pass"] = ok;
    assertions_.push_back(a);
    if (!ok) pass_ = false;
    return ok;
  }

  std::string check_, operation_, statement_;
  ordered_json model_;
  std::uint64_t seed_ = 0;
  bool pass_ = true;
  bool applicable_ = true;
  ordered_json assertions_ = ordered_json::array();
  ordered_json measurements_ = ordered_json::object();
  std::vector<std::string> notes_;
};

}  // namespace gaugelab
