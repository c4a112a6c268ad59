#pragma once

// Sparse mixed-integer linear model and solution types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "regenpool/errors.hpp"

namespace regenpool::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

enum class VarKind { continuous, binary, integer };
enum class RowSense { le, eq, ge };
enum class ObjSense { maximize, minimize };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;

  bool integral() const noexcept { return kind != VarKind::continuous; }
};

struct Term {
  int var = 0;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

class Model {
 public:
  explicit Model(std::string name = "model") : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  int variable_count() const noexcept { return static_cast<int>(vars_.size()); }
  int constraint_count() const noexcept { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<Constraint>& constraints() const noexcept { return rows_; }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  const Constraint& constraint(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& objective() const noexcept { return obj_; }
  ObjSense sense() const noexcept { return sense_; }

  int add_variable(std::string name, VarKind kind, double lower, double upper, double obj = 0.0) {
    if (kind == VarKind::binary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    names_.emplace(name, static_cast<int>(vars_.size()));
    vars_.push_back({std::move(name), kind, lower, upper});
    obj_.push_back(obj);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(std::string name, double obj = 0.0) {
    return add_variable(std::move(name), VarKind::binary, 0.0, 1.0, obj);
  }

  // Repeated variables are merged and zero coefficients dropped; terms end
  // up sorted by variable index.
  int add_constraint(std::string name, std::vector<Term> terms, RowSense sense, double rhs) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const Term& t : terms) {
      if (!merged.empty() && merged.back().var == t.var)
        merged.back().coef += t.coef;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    rows_.push_back({std::move(name), std::move(merged), sense, rhs});
    return static_cast<int>(rows_.size()) - 1;
  }

  void set_sense(ObjSense s) noexcept { sense_ = s; }
  void set_objective(int j, double c) { obj_.at(static_cast<std::size_t>(j)) = c; }
  void set_bounds(int j, double lower, double upper) {
    auto& v = vars_.at(static_cast<std::size_t>(j));
    v.lower = lower;
    v.upper = upper;
  }
  void set_kind(int j, VarKind k) { vars_.at(static_cast<std::size_t>(j)).kind = k; }

  std::optional<int> find_variable(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) return std::nullopt;
    return it->second;
  }

  // Violated model invariants; empty when the model is well formed.
  std::vector<std::string> validate() const {
    std::vector<std::string> out;
    if (names_.size() != vars_.size()) out.push_back("duplicate variable names");
    for (const auto& v : vars_) {
      if (!(v.lower <= v.upper)) out.push_back(v.name + ": lower bound exceeds upper bound");
      if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0)) out.push_back(v.name + ": binary outside [0,1]");
      if (v.integral() && (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
        out.push_back(v.name + ": integer variable needs finite bounds");
    }
    for (const auto& r : rows_) {
      for (const auto& t : r.terms)
        if (t.var < 0 || t.var >= variable_count()) out.push_back(r.name + ": undeclared variable");
      if (!std::isfinite(r.rhs)) out.push_back(r.name + ": non-finite right-hand side");
    }
    return out;
  }

 private:
  std::string name_;
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> obj_;
  ObjSense sense_ = ObjSense::maximize;
  std::unordered_map<std::string, int> names_;
};

enum class Status { optimal, infeasible, unbounded, bound_limit, time_limit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::bound_limit: return "bound-limit";
    case Status::time_limit: return "time-limit";
  }
  return "unknown";
}

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> values;  // empty when no assignment is available
  double objective = 0.0;
  double best_bound = 0.0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;

  bool has_assignment() const noexcept { return !values.empty(); }
  double value(int j) const { return values.at(static_cast<std::size_t>(j)); }
  bool is_one(int j) const { return values.at(static_cast<std::size_t>(j)) > 0.5; }
};

inline double row_activity(const Constraint& r, std::span<const double> x) {
  double s = 0.0;
  for (const auto& t : r.terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

inline double evaluate_objective(const Model& m, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.objective().size(); ++j) s += m.objective()[j] * x[j];
  return s;
}

// Independent re-check of an assignment against the raw model rows.
inline std::vector<std::string> check_feasibility(const Model& m, std::span<const double> x,
                                                  double tol = kFeasibilityTol, bool integrality = true) {
  std::vector<std::string> out;
  if (x.size() != static_cast<std::size_t>(m.variable_count())) {
    out.push_back("assignment size mismatch");
    return out;
  }
  for (int j = 0; j < m.variable_count(); ++j) {
    const auto& v = m.variable(j);
    const double xj = x[static_cast<std::size_t>(j)];
    if (xj < v.lower - tol || xj > v.upper + tol) out.push_back(v.name + ": bound violated");
    if (integrality && v.integral() && std::abs(xj - std::round(xj)) > kIntegralityTol)
      out.push_back(v.name + ": not integral");
  }
  for (const auto& r : m.constraints()) {
    const double a = row_activity(r, x);
    const double scale = tol * std::max(1.0, std::abs(r.rhs));
    const bool ok = r.sense == RowSense::le   ? a <= r.rhs + scale
                    : r.sense == RowSense::ge ? a >= r.rhs - scale
                                              : std::abs(a - r.rhs) <= scale;
    if (!ok) out.push_back(r.name + ": violated");
  }
  return out;
}

inline Model relaxation(Model m) {
  for (int j = 0; j < m.variable_count(); ++j) m.set_kind(j, VarKind::continuous);
  return m;
}

}  // namespace regenpool::milp
