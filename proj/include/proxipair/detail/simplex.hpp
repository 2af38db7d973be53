#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace proxipair::detail {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
};

/// Dense two-phase tableau simplex with Bland's anti-cycling rule.
/// Maximizes c^T x subject to A x <= b, x >= 0. Intended for the tiny
/// programs that arise from polytope validation (a handful of rows/columns).
class TableauSimplex {
 public:
  TableauSimplex(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                 const std::vector<double>& c)
      : m_(b.size()), n_(c.size()), basic_(m_), nonbasic_(n_ + 1),
        table_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) table_[i][j] = a[i][j];
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = static_cast<long>(n_ + i);
      table_[i][n_] = -1.0;
      table_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<long>(j);
      table_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    table_[m_ + 1][n_] = 1.0;
  }

  LpResult solve() {
    LpResult out;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (table_[i][n_ + 1] < table_[r][n_ + 1]) r = i;
    if (m_ > 0 && table_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(1) || table_[m_ + 1][n_ + 1] < -kEps) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        std::size_t s = 0;
        bool found = false;
        for (std::size_t j = 0; j <= n_; ++j) {
          if (!found || table_[i][j] < table_[i][s] ||
              (table_[i][j] == table_[i][s] && nonbasic_[j] < nonbasic_[s])) {
            s = j;
            found = true;
          }
        }
        pivot(i, s);
      }
    }
    if (!run(2)) {
      out.status = LpStatus::Unbounded;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.status = LpStatus::Optimal;
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && static_cast<std::size_t>(basic_[i]) < n_)
        out.x[static_cast<std::size_t>(basic_[i])] = table_[i][n_ + 1];
    out.value = table_[m_][n_ + 1];
    return out;
  }

 private:
  static constexpr double kEps = 1e-10;

  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / table_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0; j < n_ + 2; ++j)
        if (j != s) table_[i][j] -= table_[r][j] * table_[i][s] * inv;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j)
      if (j != s) table_[r][j] *= inv;
    for (std::size_t i = 0; i < m_ + 2; ++i)
      if (i != r) table_[i][s] *= -inv;
    table_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const std::size_t row = phase == 1 ? m_ + 1 : m_;
    for (;;) {
      std::size_t s = 0;
      bool found = false;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasic_[j] == -1) continue;
        if (!found || table_[row][j] < table_[row][s] ||
            (table_[row][j] == table_[row][s] && nonbasic_[j] < nonbasic_[s])) {
          s = j;
          found = true;
        }
      }
      if (table_[row][s] > -kEps) return true;
      std::size_t r = 0;
      bool have_row = false;
      for (std::size_t i = 0; i < m_; ++i) {
        if (table_[i][s] < kEps) continue;
        if (!have_row) {
          r = i;
          have_row = true;
          continue;
        }
        const double lhs = table_[i][n_ + 1] / table_[i][s];
        const double rhs = table_[r][n_ + 1] / table_[r][s];
        if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
      }
      if (!have_row) return false;
      pivot(r, s);
    }
  }

  std::size_t m_, n_;
  std::vector<long> basic_, nonbasic_;
  std::vector<std::vector<double>> table_;
};

/// max c^T x s.t. A x <= b with x free (split as x = x+ - x-).
inline LpResult maximize_free(const std::vector<std::vector<double>>& a,
                              const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<std::vector<double>> split(a.size(), std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      split[i][j] = a[i][j];
      split[i][n + j] = -a[i][j];
    }
  std::vector<double> c2(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    c2[j] = c[j];
    c2[n + j] = -c[j];
  }
  LpResult r = TableauSimplex(split, b, c2).solve();
  if (r.status == LpStatus::Optimal) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = r.x[j] - r.x[n + j];
    r.x = std::move(x);
  }
  return r;
}

}  // namespace proxipair::detail
