#pragma once

// LP relaxation and best-bound branch-and-bound on top of the dual simplex.
//
// One simplex instance lives for the whole search; a node only stores the
// bounds of the integer columns, and re-solving after a bound change is a
// warm dual simplex from whatever basis the previous node left behind.
// Nodes are taken best bound first, oldest first among equal bounds.
//
// Incumbents also come from a rounding dive started at the root and at
// nodes 10, 100, 1000, ...: fix the most fractional integer column to its
// nearest value (the other value if that is infeasible), re-solve, repeat.
// The dive never changes the tree, only how early pruning can start.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

#include "regenpool/milp/model.hpp"
#include "regenpool/milp/simplex.hpp"

namespace regenpool::milp {

struct Limits {
  double time_limit_s = 600.0;
  std::size_t node_limit = 2'000'000;
  // Per variable; fractional columns of the highest class are branched on
  // first. Empty means one class.
  std::vector<int> priority;
};

namespace detail {

inline std::chrono::steady_clock::time_point deadline_after(double seconds) {
  const auto now = std::chrono::steady_clock::now();
  if (!(seconds < 1e9)) return std::chrono::steady_clock::time_point::max();
  return now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
}

inline void require_valid(const Model& m) {
  const auto problems = m.validate();
  if (problems.empty()) return;
  std::string msg = "invalid model '" + m.name() + "':";
  for (const auto& p : problems) msg += " " + p + ";";
  throw ValidationError(msg);
}

// True when every feasible integer point has an integral objective, so a
// node can be pruned unless it promises at least one more unit.
inline bool integral_objective(const Model& m) {
  for (int j = 0; j < m.variable_count(); ++j) {
    const double c = m.objective()[j];
    if (c == 0.0) continue;
    if (!m.variable(j).integral() || c != std::round(c)) return false;
  }
  return true;
}

}  // namespace detail

inline Solution solve_lp(const Model& model, const Limits& limits = {}) {
  detail::require_valid(model);
  detail::DualSimplex lp(model);
  Solution out;
  switch (lp.solve(detail::deadline_after(limits.time_limit_s))) {
    case detail::DualSimplex::Result::optimal:
      out.status = Status::optimal;
      out.values = lp.structural_values();
      out.objective = lp.objective();
      out.best_bound = out.objective;
      break;
    case detail::DualSimplex::Result::infeasible: out.status = Status::infeasible; break;
    case detail::DualSimplex::Result::unbounded: out.status = Status::unbounded; break;
    case detail::DualSimplex::Result::time_limit: out.status = Status::time_limit; break;
    case detail::DualSimplex::Result::iteration_limit: throw Error("simplex iteration limit reached");
  }
  out.lp_iterations = lp.iterations();
  return out;
}

inline Solution solve_milp(const Model& model, const Limits& limits = {}) {
  detail::require_valid(model);
  if (!limits.priority.empty() && limits.priority.size() != static_cast<std::size_t>(model.variable_count()))
    throw ValidationError("branching priority needs one entry per variable");
  const auto deadline = detail::deadline_after(limits.time_limit_s);
  const double sign = model.sense() == ObjSense::maximize ? 1.0 : -1.0;
  const bool unit_steps = detail::integral_objective(model);

  std::vector<int> ints;
  for (int j = 0; j < model.variable_count(); ++j)
    if (model.variable(j).integral()) ints.push_back(j);

  struct Node {
    double bound;  // internal maximize sense
    std::size_t seq;
    std::vector<double> lo, hi;
  };

  detail::DualSimplex lp(model);
  std::vector<Node> open;
  std::size_t seq = 0;
  {
    Node root{kInf, seq++, {}, {}};
    for (int j : ints) {
      root.lo.push_back(std::ceil(model.variable(j).lower - kIntegralityTol));
      root.hi.push_back(std::floor(model.variable(j).upper + kIntegralityTol));
    }
    open.push_back(std::move(root));
  }

  Solution out;
  bool have_incumbent = false;
  double incumbent = -kInf;  // internal sense
  std::vector<double> best_x;
  Status limit_status = Status::optimal;

  auto prunable = [&](double bound) {
    if (!have_incumbent) return false;
    const double tol = 1e-6 * std::max(1.0, std::abs(incumbent));
    if (unit_steps) return bound < incumbent + 1.0 - tol;
    return bound <= incumbent + tol;
  };

  auto most_fractional = [&](const std::vector<double>& x) {
    int branch = -1, cls = 0;
    double most = 0.0;
    for (std::size_t k = 0; k < ints.size(); ++k) {
      const double v = x[ints[k]];
      const double frac = std::abs(v - std::round(v));
      if (frac <= kIntegralityTol) continue;
      const int c = limits.priority.empty() ? 0 : limits.priority.at(static_cast<std::size_t>(ints[k]));
      if (branch < 0 || c > cls || (c == cls && frac > most + 1e-12)) {
        most = frac;
        cls = c;
        branch = static_cast<int>(k);
      }
    }
    return branch;
  };

  auto offer = [&](std::vector<double> x) {
    for (int j : ints) x[j] = std::round(x[j]);
    if (!check_feasibility(model, x).empty()) return;
    const double obj = sign * evaluate_objective(model, x);
    if (!have_incumbent || obj > incumbent) {
      have_incumbent = true;
      incumbent = obj;
      best_x = std::move(x);
    }
  };

  // starts from the LP state of the node just solved; leaves the simplex
  // bounds dirty, which is fine because every node re-applies all of them
  auto dive = [&](std::vector<double> lo, std::vector<double> hi, std::vector<double> x) {
    const std::size_t budget = 2 * ints.size() + 10;
    std::size_t solves = 0;
    while (solves < budget) {
      const int k = most_fractional(x);
      if (k < 0) {
        offer(std::move(x));
        return;
      }
      const double v = x[ints[k]];
      const double near = std::floor(v + 0.5);
      const double far = near > v ? near - 1.0 : near + 1.0;
      bool ok = false;
      for (double fix : {near, far}) {
        if (fix < lo[k] || fix > hi[k]) continue;
        lp.set_bounds(ints[k], fix, fix);
        ++solves;
        const auto r = lp.solve(deadline);
        if (r == detail::DualSimplex::Result::optimal && !prunable(sign * lp.objective())) {
          lo[k] = hi[k] = fix;
          ok = true;
          break;
        }
        if (r == detail::DualSimplex::Result::time_limit) return;
        lp.set_bounds(ints[k], lo[k], hi[k]);
      }
      if (!ok) return;
      x = lp.structural_values();
    }
  };
  std::size_t next_dive = 1;

  while (!open.empty()) {
    if (out.nodes >= limits.node_limit) {
      limit_status = Status::bound_limit;
      break;
    }
    if (std::chrono::steady_clock::now() > deadline) {
      limit_status = Status::time_limit;
      break;
    }

    std::size_t pick = 0;
    for (std::size_t k = 1; k < open.size(); ++k) {
      const Node& a = open[k];
      const Node& b = open[pick];
      if (a.bound > b.bound || (a.bound == b.bound && a.seq < b.seq)) pick = k;
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    if (prunable(node.bound)) continue;
    ++out.nodes;

    for (std::size_t k = 0; k < ints.size(); ++k) lp.set_bounds(ints[k], node.lo[k], node.hi[k]);
    const auto res = lp.solve(deadline);
    if (res == detail::DualSimplex::Result::time_limit) {
      open.push_back(std::move(node));
      limit_status = Status::time_limit;
      break;
    }
    if (res == detail::DualSimplex::Result::iteration_limit) throw Error("simplex iteration limit reached");
    if (res == detail::DualSimplex::Result::infeasible) continue;
    if (res == detail::DualSimplex::Result::unbounded) {
      out.status = Status::unbounded;
      out.lp_iterations = lp.iterations();
      return out;
    }

    const double z = sign * lp.objective();
    if (prunable(z)) continue;
    std::vector<double> x = lp.structural_values();

    const int branch = most_fractional(x);
    if (branch < 0) {
      offer(std::move(x));
      continue;
    }

    const double v = x[ints[branch]];
    Node down{z, seq++, node.lo, node.hi};
    down.hi[branch] = std::floor(v);
    Node up{z, seq++, std::move(node.lo), std::move(node.hi)};
    up.lo[branch] = std::ceil(v);
    open.push_back(std::move(down));
    open.push_back(std::move(up));
    if (out.nodes == next_dive) {
      next_dive *= 10;
      dive(open[open.size() - 2].lo, open.back().hi, std::move(x));
    }
  }

  out.lp_iterations = lp.iterations();
  double bound = have_incumbent ? incumbent : -kInf;
  for (const Node& n : open)
    if (!prunable(n.bound)) bound = std::max(bound, n.bound);
  if (limit_status == Status::optimal) bound = have_incumbent ? incumbent : -kInf;

  if (limit_status != Status::optimal) {
    out.status = limit_status;
  } else {
    out.status = have_incumbent ? Status::optimal : Status::infeasible;
  }
  if (have_incumbent) {
    out.values = std::move(best_x);
    out.objective = sign * incumbent;
  }
  out.best_bound = std::isfinite(bound) ? sign * bound : sign * kInf;
  return out;
}

}  // namespace regenpool::milp
