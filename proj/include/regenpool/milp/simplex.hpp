#pragma once

// Bounded-variable dual simplex on a dense tableau.
//
// Every row i gets a slack s_i with a_i x + s_i = b_i, so the slack basis is
// the identity. Columns with an infinite bound receive a large artificial box,
// which means every column is finitely bounded and ANY basis can be made dual
// feasible by putting each nonbasic column at the bound its reduced cost
// prefers. The dual simplex then solves the LP from any starting basis; that
// is what makes bound changes inside branch-and-bound cheap to re-solve.
//
// An artificial bound that is active with a nonzero reduced cost at the
// optimum means the true relaxation is unbounded.
//
// Pivoting: largest infeasibility leaves, two-pass Harris ratio test picks the
// entering column. After a run of degenerate pivots the solver switches to
// Bland's rule (lowest basic index leaves, lowest column index among minimum
// ratios enters) for the rest of the solve, which guarantees termination.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

#include "regenpool/milp/model.hpp"

namespace regenpool::milp::detail {

class DualSimplex {
 public:
  enum class Result { optimal, infeasible, unbounded, iteration_limit, time_limit };

  static constexpr double kBox = 1e6;
  static constexpr double kPrimalTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kDropTol = 1e-13;
  static constexpr int kDegenerateRun = 200;

  explicit DualSimplex(const Model& model)
      : m_(model.constraint_count()), n_(model.variable_count()), cols_(n_ + m_) {
    sign_ = model.sense() == ObjSense::maximize ? 1.0 : -1.0;
    tab_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
    c_.assign(cols_, 0.0);
    lb_.assign(cols_, 0.0);
    ub_.assign(cols_, 0.0);
    x_.assign(cols_, 0.0);
    art_lb_.assign(cols_, 0);
    art_ub_.assign(cols_, 0);
    at_upper_.assign(cols_, 0);
    basis_.assign(m_, 0);
    row_of_.assign(cols_, -1);
    rows_.resize(m_);
    rhs_.assign(m_, 0.0);

    double cmax = 1.0;
    for (int j = 0; j < n_; ++j) {
      c_[j] = sign_ * model.objective()[j];
      cmax = std::max(cmax, std::abs(c_[j]));
      set_structural_bounds(j, model.variable(j).lower, model.variable(j).upper);
    }
    dual_tol_ = 1e-9 * cmax;

    for (int i = 0; i < m_; ++i) {
      const Constraint& r = model.constraint(i);
      rows_[i] = r.terms;
      rhs_[i] = r.rhs;
      double lo = 0.0, hi = 0.0;
      for (const Term& t : r.terms) {
        at(i, t.var) = t.coef;
        lo += std::min(t.coef * lb_[t.var], t.coef * ub_[t.var]);
        hi += std::max(t.coef * lb_[t.var], t.coef * ub_[t.var]);
      }
      const int s = n_ + i;
      at(i, s) = 1.0;
      // Implied slack range, widened so it can never bind.
      const double margin = 1.0 + 1e-6 * (std::abs(lo) + std::abs(hi) + std::abs(r.rhs));
      const double s_lo = r.rhs - hi - margin, s_hi = r.rhs - lo + margin;
      lb_[s] = r.sense == RowSense::le ? 0.0 : r.sense == RowSense::ge ? std::min(0.0, s_lo) : 0.0;
      ub_[s] = r.sense == RowSense::le ? std::max(0.0, s_hi) : 0.0;
      basis_[i] = s;
      row_of_[s] = i;
    }

    d_ = c_;
    for (int j = 0; j < n_; ++j) {
      at_upper_[j] = c_[j] > 0.0;
      x_[j] = at_upper_[j] ? ub_[j] : lb_[j];
    }
    recompute_basics_from_scratch_rhs();
  }

  int rows() const noexcept { return m_; }
  int structurals() const noexcept { return n_; }
  std::size_t iterations() const noexcept { return iterations_; }

  double lower(int j) const { return lb_[j]; }
  double upper(int j) const { return ub_[j]; }

  // Replace the bounds of structural column j. Nonbasic columns move with
  // their bound and the basic values are updated incrementally.
  void set_bounds(int j, double lower, double upper) {
    const double old = x_[j];
    set_structural_bounds(j, lower, upper);
    if (row_of_[j] >= 0) return;
    x_[j] = at_upper_[j] ? ub_[j] : lb_[j];
    shift_nonbasic(j, x_[j] - old);
  }

  Result solve(std::chrono::steady_clock::time_point deadline) {
    bland_ = false;
    int degenerate = 0;
    int refreshes = 0;
    const std::size_t cap = 200 * static_cast<std::size_t>(m_ + n_) + 10000;
    std::size_t local = 0;
    make_dual_feasible();

    while (true) {
      if ((local & 63) == 0 && std::chrono::steady_clock::now() > deadline) return Result::time_limit;
      if (++local > cap) return Result::iteration_limit;

      const int r = choose_leaving();
      if (r < 0) {
        if (since_refresh_ > 0 && residual() > 1e-8 && refreshes < 3) {
          ++refreshes;
          reinvert();
          continue;
        }
        return artificial_bound_active() ? Result::unbounded : Result::optimal;
      }

      const int j = choose_entering(r);
      if (j < 0) {
        if (since_refresh_ > 0 && refreshes < 3) {
          ++refreshes;
          reinvert();
          continue;
        }
        return Result::infeasible;
      }

      const double alpha = at(r, j);
      const double ratio = std::abs(d_[j] / alpha);
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      if (degenerate > kDegenerateRun) bland_ = true;

      const int leaving = basis_[r];
      const bool to_upper = x_[leaving] > ub_[leaving];
      const double target = to_upper ? ub_[leaving] : lb_[leaving];
      const double step = (x_[leaving] - target) / alpha;
      for (int i = 0; i < m_; ++i) {
        const double a = at(i, j);
        if (a != 0.0) x_[basis_[i]] -= a * step;
      }
      x_[j] += step;
      x_[leaving] = target;
      at_upper_[leaving] = to_upper;
      pivot(r, j);
      ++iterations_;
      if (++since_refresh_ >= 20000) reinvert();
    }
  }

  // Objective in the model's own sense.
  double objective() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += c_[j] * x_[j];
    return sign_ * s;
  }

  std::vector<double> structural_values() const { return {x_.begin(), x_.begin() + n_}; }

 private:
  double& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }

  void set_structural_bounds(int j, double lower, double upper) {
    art_lb_[j] = !std::isfinite(lower);
    art_ub_[j] = !std::isfinite(upper);
    if (art_lb_[j] && art_ub_[j]) {
      lower = -kBox;
      upper = kBox;
    } else if (art_lb_[j]) {
      lower = std::min(-kBox, upper - kBox);
    } else if (art_ub_[j]) {
      upper = std::max(kBox, lower + kBox);
    }
    lb_[j] = lower;
    ub_[j] = upper;
  }

  void shift_nonbasic(int j, double delta) {
    if (delta == 0.0) return;
    for (int i = 0; i < m_; ++i) {
      const double a = at(i, j);
      if (a != 0.0) x_[basis_[i]] -= a * delta;
    }
  }

  void make_dual_feasible() {
    for (int j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0 || lb_[j] == ub_[j]) continue;
      bool up = at_upper_[j];
      if (d_[j] > dual_tol_) up = true;
      else if (d_[j] < -dual_tol_) up = false;
      const double target = up ? ub_[j] : lb_[j];
      at_upper_[j] = up;
      if (x_[j] != target) {
        const double delta = target - x_[j];
        x_[j] = target;
        shift_nonbasic(j, delta);
      }
    }
  }

  double infeasibility(int col) const {
    const double tol = kPrimalTol * std::max(1.0, std::abs(x_[col]));
    if (x_[col] < lb_[col] - tol) return lb_[col] - x_[col];
    if (x_[col] > ub_[col] + tol) return x_[col] - ub_[col];
    return 0.0;
  }

  int choose_leaving() const {
    int best = -1;
    double best_v = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double v = infeasibility(basis_[i]);
      if (v <= 0.0) continue;
      if (bland_) {
        if (best < 0 || basis_[i] < basis_[best]) best = i;
      } else if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    return best;
  }

  bool eligible(int r, int j, double sigma) const {
    if (row_of_[j] >= 0 || lb_[j] == ub_[j]) return false;
    const double a = sigma * at(r, j);
    return at_upper_[j] ? a > kPivotTol : a < -kPivotTol;
  }

  int choose_entering(int r) const {
    const int leaving = basis_[r];
    const double sigma = x_[leaving] < lb_[leaving] ? 1.0 : -1.0;
    if (bland_) {
      int best = -1;
      double best_ratio = kInf;
      for (int j = 0; j < cols_; ++j) {
        if (!eligible(r, j, sigma)) continue;
        const double ratio = std::abs(d_[j]) / std::abs(at(r, j));
        if (ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          best = j;
        }
      }
      return best;
    }
    // Harris pass 1: the largest step keeping reduced costs within tolerance.
    double bound = kInf;
    for (int j = 0; j < cols_; ++j) {
      if (!eligible(r, j, sigma)) continue;
      bound = std::min(bound, (std::abs(d_[j]) + dual_tol_) / std::abs(at(r, j)));
    }
    if (bound == kInf) return -1;
    // Pass 2: among ratios within that step, take the largest pivot.
    int best = -1;
    double best_a = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (!eligible(r, j, sigma)) continue;
      const double a = std::abs(at(r, j));
      if (std::abs(d_[j]) / a <= bound && a > best_a) {
        best_a = a;
        best = j;
      }
    }
    return best;
  }

  void pivot(int r, int j) {
    double* rowr = &tab_[static_cast<std::size_t>(r) * cols_];
    const double inv = 1.0 / rowr[j];
    nz_.clear();
    for (int k = 0; k < cols_; ++k) {
      if (rowr[k] == 0.0) continue;
      rowr[k] *= inv;
      if (std::abs(rowr[k]) < kDropTol) rowr[k] = 0.0;
      else nz_.push_back(k);
    }
    rowr[j] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * cols_];
      const double f = row[j];
      if (f == 0.0) continue;
      for (int k : nz_) {
        double v = row[k] - f * rowr[k];
        row[k] = std::abs(v) < kDropTol ? 0.0 : v;
      }
      row[j] = 0.0;
    }
    const double f = d_[j];
    if (f != 0.0) {
      for (int k : nz_) d_[k] -= f * rowr[k];
      d_[j] = 0.0;
    }
    row_of_[basis_[r]] = -1;
    basis_[r] = j;
    row_of_[j] = r;
  }

  void recompute_basics_from_scratch_rhs() {
    // Valid only when the basis is the slack identity (construction time).
    for (int i = 0; i < m_; ++i) {
      double s = rhs_[i];
      for (const Term& t : rows_[i]) s -= t.coef * x_[t.var];
      x_[n_ + i] = s;
    }
  }

  double residual() const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      double s = rhs_[i] - x_[n_ + i], scale = std::max(1.0, std::abs(rhs_[i]));
      for (const Term& t : rows_[i]) {
        s -= t.coef * x_[t.var];
        scale = std::max(scale, std::abs(t.coef * x_[t.var]));
      }
      worst = std::max(worst, std::abs(s) / scale);
    }
    return worst;
  }

  bool artificial_bound_active() const {
    for (int j = 0; j < n_; ++j) {
      if (row_of_[j] >= 0) {
        if (std::abs(x_[j]) >= 0.5 * kBox && (art_lb_[j] || art_ub_[j])) return true;
        continue;
      }
      if (at_upper_[j] && art_ub_[j] && d_[j] > dual_tol_) return true;
      if (!at_upper_[j] && art_lb_[j] && d_[j] < -dual_tol_) return true;
    }
    return false;
  }

  // Rebuild B^-1 [A | I], the reduced costs and the basic values from the
  // original rows for the current basis.
  void reinvert() {
    std::fill(tab_.begin(), tab_.end(), 0.0);
    std::vector<double> rhs = rhs_;
    for (int i = 0; i < m_; ++i) {
      for (const Term& t : rows_[i]) at(i, t.var) = t.coef;
      at(i, n_ + i) = 1.0;
    }
    std::vector<int> old_basis = basis_;
    std::sort(old_basis.begin(), old_basis.end());
    std::fill(row_of_.begin(), row_of_.end(), -1);
    std::vector<char> assigned(m_, 0);
    std::vector<int> new_basis(m_, -1);

    auto gauss_pivot = [&](int r, int j) {
      double* rowr = &tab_[static_cast<std::size_t>(r) * cols_];
      const double inv = 1.0 / rowr[j];
      nz_.clear();
      for (int k = 0; k < cols_; ++k) {
        if (rowr[k] == 0.0) continue;
        rowr[k] *= inv;
        nz_.push_back(k);
      }
      rhs[r] *= inv;
      rowr[j] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* row = &tab_[static_cast<std::size_t>(i) * cols_];
        const double f = row[j];
        if (f == 0.0) continue;
        for (int k : nz_) {
          double v = row[k] - f * rowr[k];
          row[k] = std::abs(v) < kDropTol ? 0.0 : v;
        }
        row[j] = 0.0;
        rhs[i] -= f * rhs[r];
      }
      assigned[r] = 1;
      new_basis[r] = j;
      row_of_[j] = r;
    };

    for (int j : old_basis) {
      int best = -1;
      double best_a = 1e-9;
      for (int i = 0; i < m_; ++i) {
        if (assigned[i]) continue;
        const double a = std::abs(at(i, j));
        if (a > best_a) {
          best_a = a;
          best = i;
        }
      }
      if (best >= 0) gauss_pivot(best, j);
    }
    for (int i = 0; i < m_; ++i) {
      if (assigned[i]) continue;
      int best = -1;
      double best_a = 0.0;
      for (int k = n_; k < cols_; ++k) {
        if (row_of_[k] >= 0) continue;
        const double a = std::abs(at(i, k));
        if (a > best_a) {
          best_a = a;
          best = k;
        }
      }
      if (best < 0) throw Error("simplex: singular basis during reinversion");
      gauss_pivot(i, best);
    }
    basis_ = new_basis;

    for (int k = 0; k < cols_; ++k) {
      if (row_of_[k] >= 0) continue;
      if (lb_[k] == ub_[k]) x_[k] = lb_[k];
      else x_[k] = at_upper_[k] ? ub_[k] : lb_[k];
    }
    d_ = c_;
    for (int i = 0; i < m_; ++i) {
      const double cb = c_[basis_[i]];
      double xb = rhs[i];
      const double* row = &tab_[static_cast<std::size_t>(i) * cols_];
      for (int k = 0; k < cols_; ++k) {
        if (row[k] == 0.0) continue;
        if (cb != 0.0) d_[k] -= cb * row[k];
        if (row_of_[k] < 0) xb -= row[k] * x_[k];
      }
      x_[basis_[i]] = xb;
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    since_refresh_ = 0;
    make_dual_feasible();
  }

  int m_, n_, cols_;
  double sign_ = 1.0;
  double dual_tol_ = 1e-9;
  std::vector<double> tab_;
  std::vector<double> c_, d_, lb_, ub_, x_;
  std::vector<char> art_lb_, art_ub_, at_upper_;
  std::vector<int> basis_, row_of_;
  std::vector<std::vector<Term>> rows_;
  std::vector<double> rhs_;
  std::vector<int> nz_;
  bool bland_ = false;
  std::size_t iterations_ = 0;
  std::size_t since_refresh_ = 0;
};

}  // namespace regenpool::milp::detail
