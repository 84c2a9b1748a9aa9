#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "aex/errors.hpp"

namespace aex {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using Point = std::vector<Rat>;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Largest integer n with n <= r.
inline BigInt rat_floor(const Rat& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

inline BigInt rat_ceil(const Rat& r) { return -rat_floor(-r); }

// Parses "123", "-0.25", "1e-6", "3/7" into an exact rational.
inline Rat parse_rat(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty number");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rat num = parse_rat(s.substr(0, slash));
    Rat den = parse_rat(s.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
    return num / den;
  }

  bool neg = false;
  size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';

  BigInt mantissa = 0;
  long frac_digits = 0, exponent = 0;
  bool any_digit = false, in_frac = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (in_frac) ++frac_digits;
      any_digit = true;
    } else if (c == '.') {
      if (in_frac) throw ParseError("bad number '" + text + "'");
      in_frac = true;
    } else if (c == 'e' || c == 'E') {
      ++i;
      bool eneg = false;
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
      if (i >= s.size()) throw ParseError("bad exponent in '" + text + "'");
      long e = 0;
      for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ParseError("bad exponent in '" + text + "'");
        e = e * 10 + (s[i] - '0');
        if (e > 100000) throw ParseError("exponent out of range in '" + text + "'");
      }
      exponent = eneg ? -e : e;
      break;
    } else {
      throw ParseError("bad number '" + text + "'");
    }
  }
  if (!any_digit) throw ParseError("bad number '" + text + "'");

  Rat value(mantissa);
  long shift = exponent - frac_digits;
  if (shift > 0) {
    BigInt p = 1;
    for (long k = 0; k < shift; ++k) p *= 10;
    value *= Rat(p);
  } else if (shift < 0) {
    BigInt p = 1;
    for (long k = 0; k < -shift; ++k) p *= 10;
    value /= Rat(p);
  }
  return neg ? Rat(-value) : value;
}

// Exact text form: finite decimal when the reduced denominator is
// 2^a * 5^b, otherwise "num/den".
inline std::string format_rat(const Rat& r) {
  BigInt num = numerator(r), den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  int twos = 0, fives = 0;
  BigInt d = den;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return (neg ? "-" : "") + num.str() + "/" + den.str();

  int digits = twos > fives ? twos : fives;
  BigInt scale = 1;
  for (int k = 0; k < digits; ++k) scale *= 10;
  BigInt scaled = num * (scale / den);
  BigInt whole = scaled / scale, frac = scaled % scale;
  std::string out = (neg ? "-" : "") + whole.str();
  if (digits > 0) {
    std::string f = frac.str();
    f.insert(f.begin(), digits - f.size(), '0');
    while (f.size() > 1 && f.back() == '0') f.pop_back();
    if (!(f.size() == 1 && f[0] == '0')) out += "." + f;
  }
  return out;
}

}  // namespace aex
