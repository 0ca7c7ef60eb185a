// Copyright 2026 The FairLabel Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flc {

// Exact rational with 64-bit numerator/denominator. Denominator is always
// positive and the fraction is kept in lowest terms. Intermediate products
// use 128-bit arithmetic.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den) { Assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double ToDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // floor(this * n) and ceil(this * n), exact.
  std::int64_t FloorTimes(std::int64_t n) const {
    const __int128 p = static_cast<__int128>(num_) * n;
    __int128 q = p / den_;
    if (p % den_ != 0 && p < 0) --q;
    return static_cast<std::int64_t>(q);
  }
  std::int64_t CeilTimes(std::int64_t n) const {
    const __int128 p = static_cast<__int128>(num_) * n;
    __int128 q = p / den_;
    if (p % den_ != 0 && p > 0) ++q;
    return static_cast<std::int64_t>(q);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return FromWide(static_cast<__int128>(a.num_) * b.den_ +
                        static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return FromWide(static_cast<__int128>(a.num_) * b.den_ -
                        static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return FromWide(static_cast<__int128>(a.num_) * b.num_,
                    static_cast<__int128>(a.den_) * b.den_);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  std::string ToString() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "3", "-2", "1/4", "0.125", "1e-3" is rejected. Decimals are
  // converted exactly (0.1 becomes 1/10, not the nearest double).
  static Rational Parse(std::string_view text);

 private:
  static Rational FromWide(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    const __int128 g = a == 0 ? 1 : a;
    num /= g;
    den /= g;
    constexpr __int128 kMax = INT64_MAX;
    if (num > kMax || num < -kMax || den > kMax) {
      throw std::overflow_error("rational: overflow");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  void Assign(std::int64_t num, std::int64_t den) {
    *this = FromWide(num, den);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational Rational::Parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("cannot parse rational '" + std::string(text) +
                                "'");
  };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return fail();
  auto parse_int = [&](std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) return false;
    __int128 v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
      v = v * 10 + (s[i] - '0');
      if (v > INT64_MAX) return false;
    }
    out = static_cast<std::int64_t>(neg ? -v : v);
    return true;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t n = 0;
    std::int64_t d = 0;
    if (!parse_int(text.substr(0, slash), n) ||
        !parse_int(text.substr(slash + 1), d) || d == 0) {
      return fail();
    }
    return Rational(n, d);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
      whole.remove_prefix(1);
    }
    if (frac.size() > 17) return fail();
    std::int64_t w = 0;
    std::int64_t f = 0;
    if (!whole.empty() && !parse_int(whole, w)) return fail();
    if (!frac.empty() && !parse_int(frac, f)) return fail();
    if (whole.empty() && frac.empty()) return fail();
    if (!frac.empty() && (frac[0] == '-' || frac[0] == '+')) return fail();
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational r = Rational(w) + Rational(f, scale);
    return neg ? Rational(0) - r : r;
  }
  std::int64_t n = 0;
  if (!parse_int(text, n)) return fail();
  return Rational(n);
}

}  // namespace flc
