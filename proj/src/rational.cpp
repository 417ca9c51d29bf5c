#include "ipbt/rational.hpp"

#include <limits>
#include <stdexcept>

namespace ipbt {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (!is_integer_literal(s)) {
    throw std::invalid_argument("not an integer literal: '" + std::string(s) + "'");
  }
  if (s[0] == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  v_ = mpq_class(num, 1);
  v_ /= den;
  v_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(mpq_class(parse_integer(text)));
  }
  const mpz_class num = parse_integer(text.substr(0, slash));
  const std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) {
    throw std::invalid_argument("denominator must be unsigned: '" + std::string(text) + "'");
  }
  const mpz_class den = parse_integer(den_text);
  if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
  return Rational(mpq_class(num, den));
}

std::string Rational::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

bool Rational::fits_int64() const {
  if (!is_integer()) return false;
  const mpz_class& n = v_.get_num();
  static const mpz_class lo(std::to_string(std::numeric_limits<std::int64_t>::min()));
  static const mpz_class hi(std::to_string(std::numeric_limits<std::int64_t>::max()));
  return n >= lo && n <= hi;
}

std::int64_t Rational::to_int64() const {
  if (!fits_int64()) throw std::range_error("rational is not an int64: " + str());
  return std::stoll(v_.get_num().get_str());
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  v_ /= o.v_;
  return *this;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

RationalVector RationalMatrix::row(int r) const {
  return RationalVector(data_.begin() + static_cast<std::ptrdiff_t>(r) * cols_,
                        data_.begin() + static_cast<std::ptrdiff_t>(r + 1) * cols_);
}

}  // namespace ipbt
