#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ipbt {

/// Exact rational number in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : v_(value) {}   // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  /// Accepts "n", "-n" and "n/d"; throws std::invalid_argument otherwise.
  static Rational parse(std::string_view text);

  /// "n" when the denominator is 1, else "n/d".
  std::string str() const;
  double to_double() const { return v_.get_d(); }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }
  /// True when the value is an integer representable as int64.
  bool fits_int64() const;
  std::int64_t to_int64() const;

  const mpq_class& raw() const { return v_; }
  mpq_class& raw() { return v_; }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class v_;
};

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

using RationalVector = std::vector<Rational>;

/// Dense row-major matrix of rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols, const Rational& fill = Rational(0))
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Rational& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  RationalVector row(int r) const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  RationalVector data_;
};

}  // namespace ipbt
