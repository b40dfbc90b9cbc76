#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <string>

#include "speedscale/errors.hpp"

namespace speedscale {

// All quantities are exact rationals. mpq_class keeps values canonical
// (coprime, positive denominator) after every operation.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Canonical text form: "p" when the denominator is 1, else "p/q".
inline std::string to_string(const Rat& value) { return value.get_str(); }

inline std::string to_string(const Int& value) { return value.get_str(); }

// Accepts optional sign, decimal digits, optional "/digits" denominator.
inline Rat parse_rat(const std::string& text) {
  auto fail = [&] { return input_error("malformed rational '" + text + "'"); };
  std::size_t pos = 0;
  auto scan_int = [&](bool allow_sign) -> std::string {
    std::size_t begin = pos;
    if (allow_sign && pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      ++digits;
    }
    if (digits == 0) throw fail();
    return text.substr(begin, pos - begin);
  };
  std::string num = scan_int(true);
  std::string den = "1";
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    den = scan_int(false);
  }
  if (pos != text.size()) throw fail();
  Int d(den);
  if (d == 0) throw input_error("zero denominator in '" + text + "'");
  Rat q(Int(num), d);
  q.canonicalize();
  return q;
}

inline Int rat_ceil(const Rat& value) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

inline Int rat_floor(const Rat& value) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

inline Int pow_int(const Int& base, unsigned long exponent) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

// Rational extended with two infinities. The sentinels stay symbolic so they
// never leak into arithmetic as large finite numbers.
class ExtRat {
 public:
  enum class Kind { neg_inf, finite, pos_inf };

  ExtRat() : kind_(Kind::finite) {}
  ExtRat(Rat value) : kind_(Kind::finite), value_(std::move(value)) {}  // NOLINT: implicit by design
  static ExtRat neg_inf() { return ExtRat(Kind::neg_inf); }
  static ExtRat pos_inf() { return ExtRat(Kind::pos_inf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
  bool is_neg_inf() const { return kind_ == Kind::neg_inf; }

  // Only valid on finite values.
  const Rat& value() const {
    if (!is_finite()) throw internal_error("ExtRat::value() on infinite value");
    return value_;
  }

  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Kind::finite || a.value_ == b.value_;
  }
  friend bool operator!=(const ExtRat& a, const ExtRat& b) { return !(a == b); }
  friend bool operator<(const ExtRat& a, const ExtRat& b) {
    if (a.kind_ == b.kind_) return a.kind_ == Kind::finite && a.value_ < b.value_;
    return rank(a.kind_) < rank(b.kind_);
  }
  friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) { return !(b < a); }
  friend bool operator>=(const ExtRat& a, const ExtRat& b) { return !(a < b); }

  std::string str() const {
    switch (kind_) {
      case Kind::neg_inf: return "-inf";
      case Kind::pos_inf: return "+inf";
      default: return value_.get_str();
    }
  }

 private:
  explicit ExtRat(Kind kind) : kind_(kind) {}
  static int rank(Kind k) { return k == Kind::neg_inf ? 0 : (k == Kind::finite ? 1 : 2); }

  Kind kind_;
  Rat value_;
};

// a - b where a is finite; used for scores like kappa - Delta.
inline ExtRat finite_minus(const Rat& a, const ExtRat& b) {
  if (b.is_pos_inf()) return ExtRat::neg_inf();
  if (b.is_neg_inf()) return ExtRat::pos_inf();
  return ExtRat(a - b.value());
}

}  // namespace speedscale
