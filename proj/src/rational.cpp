// Copyright 2026 qcat contributors
//
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

#include "qcat/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace qcat {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
    return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
        n = checked_mul(n, -1);
        d = checked_mul(d, -1);
    }
    std::int64_t g = std::gcd(n, d);
    if (g == 0) g = 1;
    num_ = n / g;
    den_ = d / g;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& s) {
    auto bad = [&]() { return std::invalid_argument("cannot parse rational '" + s + "'"); };
    if (s.empty()) throw bad();
    auto to_i64 = [&](const std::string& t) -> std::int64_t {
        if (t.empty()) throw bad();
        std::size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(t, &pos);
        } catch (...) {
            throw bad();
        }
        if (pos != t.size()) throw bad();
        return v;
    };
    auto slash = s.find('/');
    if (slash != std::string::npos) return Rational(to_i64(s.substr(0, slash)), to_i64(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(to_i64(s));
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (fp.empty() || fp.size() > 17) throw bad();
    for (char c : fp)
        if (c < '0' || c > '9') throw bad();
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale = checked_mul(scale, 10);
    std::int64_t whole = (ip.empty() || ip == "-" || ip == "+") ? 0 : to_i64(ip);
    std::int64_t frac = to_i64(fp);
    std::int64_t n = checked_add(checked_mul(whole < 0 ? -whole : whole, scale), frac);
    return Rational(neg ? -n : n, scale);
}

Rational Rational::operator-() const { return Rational(checked_mul(num_, -1), den_); }

Rational& Rational::operator+=(const Rational& o) {
    std::int64_t g = std::gcd(den_, o.den_);
    std::int64_t l = checked_mul(den_ / g, o.den_);
    std::int64_t n = checked_add(checked_mul(num_, l / den_), checked_mul(o.num_, l / o.den_));
    *this = Rational(n, l);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    std::int64_t g1 = std::gcd(num_, o.den_);
    std::int64_t g2 = std::gcd(o.num_, den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    *this = Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return *this *= Rational(o.den_, o.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l < r;
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a.is_zero()) return abs(b);
    if (b.is_zero()) return abs(a);
    // gcd(p/q, r/s) = gcd(p s, r q) / (q s), reduced.
    std::int64_t n = std::gcd(checked_mul(a.num(), b.den()), checked_mul(b.num(), a.den()));
    return Rational(n, checked_mul(a.den(), b.den()));
}

}  // namespace qcat
