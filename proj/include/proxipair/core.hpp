#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace proxipair {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got, const std::string& where)
      : Error(where + ": dimension mismatch (expected " + std::to_string(expected) + ", got " +
              std::to_string(got) + ")") {}
};

/// An iterative method hit its cap without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A point handed to a map or solver is not in the set its orientation requires.
class MembershipError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

/// A point of R^d. Coordinates supplied from outside are checked to be finite;
/// arithmetic results are not re-checked (euclidean_norm rejects NaN).
class Vector {
 public:
  Vector() = default;

  explicit Vector(std::size_t dim, double fill = 0.0) : coords_(dim, fill) { check_finite(); }

  Vector(std::initializer_list<double> coords) : coords_(coords) { check_finite(); }

  explicit Vector(std::vector<double> coords) : coords_(std::move(coords)) { check_finite(); }

  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }

  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  Vector& operator+=(const Vector& o) {
    require_same_dim(o, "Vector::operator+=");
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    require_same_dim(o, "Vector::operator-=");
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (double& c : coords_) c *= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(double s, Vector v) { return v *= s; }
  friend Vector operator*(Vector v, double s) { return v *= s; }
  friend Vector operator-(Vector v) { return v *= -1.0; }

  friend bool operator==(const Vector& a, const Vector& b) { return a.coords_ == b.coords_; }

  void require_same_dim(const Vector& o, const char* where) const {
    if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim(), where);
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(12);
    os << '(';
    for (std::size_t i = 0; i < dim(); ++i) os << (i ? ", " : "") << coords_[i];
    os << ')';
    return os.str();
  }

 private:
  void check_finite() const {
    for (double c : coords_)
      if (!std::isfinite(c)) throw InvalidArgument("Vector: non-finite coordinate");
  }

  std::vector<double> coords_;
};

inline double dot(const Vector& a, const Vector& b) {
  a.require_same_dim(b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

/// sqrt(sum v_i^2). Throws on NaN coordinates.
inline double euclidean_norm(const Vector& v) {
  double s = 0.0;
  for (double c : v.coords()) {
    if (std::isnan(c)) throw InvalidArgument("euclidean_norm: NaN coordinate");
    s += c * c;
  }
  return std::sqrt(s);
}

inline double distance(const Vector& a, const Vector& b) {
  a.require_same_dim(b, "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  if (std::isnan(s)) throw InvalidArgument("distance: NaN coordinate");
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Matrix (small, square, row-major)
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  /// Builds from rows; every row must have `rows.size()` entries.
  explicit Matrix(const std::vector<std::vector<double>>& rows) : Matrix(rows.size()) {
    for (std::size_t r = 0; r < dim_; ++r) {
      if (rows[r].size() != dim_) throw DimensionMismatch(dim_, rows[r].size(), "Matrix row");
      for (std::size_t c = 0; c < dim_; ++c) {
        if (!std::isfinite(rows[r][c])) throw InvalidArgument("Matrix: non-finite entry");
        (*this)(r, c) = rows[r][c];
      }
    }
  }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(const Vector& d) {
    Matrix m(d.dim());
    for (std::size_t i = 0; i < d.dim(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }

  Vector apply(const Vector& v) const {
    if (v.dim() != dim_) throw DimensionMismatch(dim_, v.dim(), "Matrix::apply");
    Vector out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) s += (*this)(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw DimensionMismatch(a.dim_, b.dim_, "Matrix product");
    Matrix out(a.dim_);
    for (std::size_t r = 0; r < a.dim_; ++r)
      for (std::size_t c = 0; c < a.dim_; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.dim_; ++k) s += a(r, k) * b(k, c);
        out(r, c) = s;
      }
    return out;
  }

  Matrix transposed() const {
    Matrix t(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  /// max |(M^T M - I)_{rc}| <= tol
  bool is_orthogonal(double tol) const {
    const Matrix g = transposed() * (*this);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        if (std::abs(g(r, c) - (r == c ? 1.0 : 0.0)) > tol) return false;
    return true;
  }

  /// Frobenius norm; an upper bound on the spectral norm.
  double frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Product space
// ---------------------------------------------------------------------------

/// AcrossB: first is meant to lie in A and second in B. BacrossA: the reverse.
enum class Orientation { AcrossB, BacrossA };

inline Orientation flip(Orientation o) noexcept {
  return o == Orientation::AcrossB ? Orientation::BacrossA : Orientation::AcrossB;
}

inline const char* to_string(Orientation o) noexcept {
  return o == Orientation::AcrossB ? "AxB" : "BxA";
}

/// An ordered pair (x, y) of X x X with the max-of-component-norms norm.
struct ProductPoint {
  Vector first;
  Vector second;
  Orientation orientation = Orientation::AcrossB;

  ProductPoint() = default;
  ProductPoint(Vector x, Vector y, Orientation o = Orientation::AcrossB)
      : first(std::move(x)), second(std::move(y)), orientation(o) {
    first.require_same_dim(second, "ProductPoint");
  }

  std::size_t dim() const noexcept { return first.dim(); }

  /// (y, x) with the opposite orientation.
  ProductPoint swapped() const { return ProductPoint(second, first, flip(orientation)); }

  std::string str() const { return "(" + first.str() + ", " + second.str() + ")"; }
};

/// max(||first||, ||second||)
inline double product_norm(const ProductPoint& p) {
  p.first.require_same_dim(p.second, "product_norm");
  return std::max(euclidean_norm(p.first), euclidean_norm(p.second));
}

/// max(||p.first - q.first||, ||p.second - q.second||); orientation is ignored.
inline double product_distance(const ProductPoint& p, const ProductPoint& q) {
  return std::max(distance(p.first, q.first), distance(p.second, q.second));
}

}  // namespace proxipair
