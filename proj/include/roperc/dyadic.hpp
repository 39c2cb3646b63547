#pragma once

#include <cmath>
#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace roperc {

/// Exact rational with a power-of-two denominator: numerator / 2^exponent.
/// Kept normalized (odd numerator or exponent 0) so equal values compare equal.
class Dyadic {
public:
    using Integer = boost::multiprecision::cpp_int;

    Dyadic() = default;
    Dyadic(long long value) : num_(value) {}  // NOLINT(google-explicit-constructor)
    Dyadic(Integer numerator, unsigned exponent) : num_(std::move(numerator)), exp_(exponent) { normalize(); }

    /// Exact value of a double whose denominator is at most 2^max_exponent.
    static std::optional<Dyadic> from_double(double x, unsigned max_exponent = 16) {
        if (!std::isfinite(x)) return std::nullopt;
        const double scaled = std::ldexp(x, static_cast<int>(max_exponent));
        if (scaled != std::floor(scaled) || std::fabs(scaled) > 9.0e15) return std::nullopt;
        return Dyadic(Integer(static_cast<long long>(scaled)), max_exponent);
    }

    const Integer& numerator() const noexcept { return num_; }
    unsigned exponent() const noexcept { return exp_; }

    double to_double() const {
        // Shift down to 60 significant bits first so huge numerators convert safely.
        const auto bits = num_ == 0 ? 0u : static_cast<unsigned>(boost::multiprecision::msb(abs(num_))) + 1;
        if (bits <= 60) return std::ldexp(num_.convert_to<double>(), -static_cast<int>(exp_));
        const unsigned drop = bits - 60;
        const Integer top = abs(num_) >> drop;
        const double mag = std::ldexp(top.convert_to<double>(), static_cast<int>(drop) - static_cast<int>(exp_));
        return num_ < 0 ? -mag : mag;
    }

    /// Reduced fraction, e.g. "5/8", "-7/64", "1", "0".
    std::string str() const {
        if (exp_ == 0) return num_.str();
        Integer den = Integer(1) << exp_;
        return num_.str() + "/" + den.str();
    }

    Dyadic& operator+=(const Dyadic& o) {
        if (exp_ >= o.exp_) {
            num_ += o.num_ << (exp_ - o.exp_);
        } else {
            num_ = (num_ << (o.exp_ - exp_)) + o.num_;
            exp_ = o.exp_;
        }
        normalize();
        return *this;
    }
    Dyadic& operator-=(const Dyadic& o) { return *this += -o; }
    Dyadic& operator*=(const Dyadic& o) {
        num_ *= o.num_;
        exp_ += o.exp_;
        normalize();
        return *this;
    }

    friend Dyadic operator-(Dyadic a) {
        a.num_ = -a.num_;
        return a;
    }
    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.exp_ == b.exp_ && a.num_ == b.num_; }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        const unsigned e = std::max(a.exp_, b.exp_);
        const Integer l = a.num_ << (e - a.exp_);
        const Integer r = b.num_ << (e - b.exp_);
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    void normalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        if (exp_ == 0) return;
        const unsigned tz = static_cast<unsigned>(boost::multiprecision::lsb(abs(num_)));
        const unsigned shift = std::min(tz, exp_);
        if (shift != 0) {
            num_ >>= shift;
            exp_ -= shift;
        }
    }

    Integer num_ = 0;
    unsigned exp_ = 0;
};

inline double to_double(double x) noexcept { return x; }
inline double to_double(const Dyadic& x) { return x.to_double(); }

} // namespace roperc
