#ifndef MMLAB_DECIMAL_HPP
#define MMLAB_DECIMAL_HPP

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

#include "mmlab/errors.hpp"

namespace mmlab {

/// Fixed-point decimal with 8 fractional digits, backed by int64.
///
/// All prices, quantities and percentages in the simulator are Decimal so
/// that ledger reconciliation tests can demand exact equality. Multiplication
/// and division round half-to-even at the 8th fractional digit; both are
/// monotone, which the order-sizing code relies on (floorDiv followed by a
/// product never exceeds the budget it was sized from).
class Decimal {
  public:
    static constexpr int kFracDigits = 8;
    static constexpr std::int64_t kScale = 100'000'000;

    constexpr Decimal() : units_(0) {}

    static constexpr Decimal from_units(std::int64_t units) {
        Decimal d;
        d.units_ = units;
        return d;
    }

    static constexpr Decimal from_int(std::int64_t whole) {
        return from_units(whole * kScale);
    }

    constexpr std::int64_t units() const { return units_; }
    constexpr bool is_zero() const { return units_ == 0; }
    constexpr bool is_negative() const { return units_ < 0; }
    constexpr bool is_positive() const { return units_ > 0; }

    /// Parses a plain decimal string: [+-]digits[.digits], no exponents.
    /// More than 8 fractional digits is an error, not silent truncation.
    static Decimal parse(std::string_view text) {
        const std::string_view orig = text;
        if (text.empty()) throw Error("decimal: empty string");
        bool negative = false;
        if (text.front() == '+' || text.front() == '-') {
            negative = text.front() == '-';
            text.remove_prefix(1);
        }
        if (text.empty()) throw Error("decimal: no digits in '" + std::string(orig) + "'");
        std::int64_t whole = 0;
        std::size_t i = 0;
        bool any_digit = false;
        for (; i < text.size() && text[i] != '.'; ++i) {
            if (text[i] < '0' || text[i] > '9')
                throw Error("decimal: invalid character in '" + std::string(orig) + "'");
            if (whole > (INT64_MAX - 9) / 10)
                throw Error("decimal: overflow parsing '" + std::string(orig) + "'");
            whole = whole * 10 + (text[i] - '0');
            any_digit = true;
        }
        std::int64_t frac = 0;
        int frac_digits = 0;
        if (i < text.size()) {  // consume '.'
            ++i;
            for (; i < text.size(); ++i) {
                if (text[i] < '0' || text[i] > '9')
                    throw Error("decimal: invalid character in '" + std::string(orig) + "'");
                if (++frac_digits > kFracDigits)
                    throw Error("decimal: more than 8 fractional digits in '" +
                                std::string(orig) + "'");
                frac = frac * 10 + (text[i] - '0');
                any_digit = true;
            }
        }
        if (!any_digit) throw Error("decimal: no digits in '" + std::string(orig) + "'");
        for (int k = frac_digits; k < kFracDigits; ++k) frac *= 10;
        if (whole > INT64_MAX / kScale || whole * kScale > INT64_MAX - frac)
            throw Error("decimal: overflow parsing '" + std::string(orig) + "'");
        std::int64_t u = whole * kScale + frac;
        return from_units(negative ? -u : u);
    }

    /// Canonical form: minus sign, integer part, fractional part with
    /// trailing zeros trimmed ("1.5", "100", "-0.00000001").
    std::string str() const {
        std::string out;
        std::int64_t u = units_;
        if (u < 0) {
            out.push_back('-');
            u = -u;
        }
        out += std::to_string(u / kScale);
        std::int64_t frac = u % kScale;
        if (frac != 0) {
            std::string f = std::to_string(frac);
            f.insert(0, kFracDigits - f.size(), '0');
            while (!f.empty() && f.back() == '0') f.pop_back();
            out.push_back('.');
            out += f;
        }
        return out;
    }

    /// Fixed display form with `dp` fractional digits, rounding half away
    /// from zero (report tables use 2 dp).
    std::string fixed(int dp) const {
        std::int64_t pow = 1;
        for (int k = 0; k < kFracDigits - dp; ++k) pow *= 10;
        std::int64_t u = units_;
        bool negative = u < 0;
        if (negative) u = -u;
        std::int64_t scaled = (u + pow / 2) / pow;  // half away from zero
        std::int64_t div = 1;
        for (int k = 0; k < dp; ++k) div *= 10;
        std::string out = negative && scaled != 0 ? "-" : "";
        out += std::to_string(scaled / div);
        if (dp > 0) {
            std::string f = std::to_string(scaled % div);
            f.insert(0, dp - f.size(), '0');
            out.push_back('.');
            out += f;
        }
        return out;
    }

    double to_double() const { return static_cast<double>(units_) / kScale; }

    friend constexpr Decimal operator+(Decimal a, Decimal b) {
        std::int64_t r;
        if (__builtin_add_overflow(a.units_, b.units_, &r)) throw Error("decimal: overflow in +");
        return from_units(r);
    }
    friend constexpr Decimal operator-(Decimal a, Decimal b) {
        std::int64_t r;
        if (__builtin_sub_overflow(a.units_, b.units_, &r)) throw Error("decimal: overflow in -");
        return from_units(r);
    }
    constexpr Decimal operator-() const { return from_units(-units_); }
    Decimal& operator+=(Decimal o) { return *this = *this + o; }
    Decimal& operator-=(Decimal o) { return *this = *this - o; }

    /// Product rounded half-to-even at 8 dp.
    friend Decimal operator*(Decimal a, Decimal b) {
        __int128 p = static_cast<__int128>(a.units_) * b.units_;
        return from_units(round_half_even(p, kScale));
    }

    /// Quotient rounded half-to-even at 8 dp.
    friend Decimal operator/(Decimal a, Decimal b) {
        if (b.units_ == 0) throw Error("decimal: division by zero");
        __int128 n = static_cast<__int128>(a.units_) * kScale;
        return from_units(round_half_even(n, b.units_));
    }

    /// floor(a / b) at 8 dp. Used for order sizing so the notional of the
    /// sized order never exceeds the funding balance.
    static Decimal div_floor(Decimal a, Decimal b) {
        if (b.units_ == 0) throw Error("decimal: division by zero");
        __int128 n = static_cast<__int128>(a.units_) * kScale;
        __int128 q = n / b.units_;
        if ((n % b.units_ != 0) && ((n < 0) != (b.units_ < 0))) --q;
        return from_units(clamp128(q));
    }

    /// Rounds down to a multiple of 10^-decimals (bid prices).
    Decimal floor_to(int decimals) const {
        std::int64_t pow = tick_pow(decimals);
        std::int64_t q = units_ / pow;
        if (units_ % pow != 0 && units_ < 0) --q;
        return from_units(q * pow);
    }

    /// Rounds up to a multiple of 10^-decimals (ask prices).
    Decimal ceil_to(int decimals) const {
        std::int64_t pow = tick_pow(decimals);
        std::int64_t q = units_ / pow;
        if (units_ % pow != 0 && units_ > 0) ++q;
        return from_units(q * pow);
    }

    friend constexpr auto operator<=>(Decimal a, Decimal b) = default;

  private:
    static constexpr std::int64_t tick_pow(int decimals) {
        std::int64_t pow = 1;
        for (int k = 0; k < kFracDigits - decimals; ++k) pow *= 10;
        return pow;
    }

    static std::int64_t round_half_even(__int128 numerator, std::int64_t denominator) {
        bool negative = (numerator < 0) != (denominator < 0);
        __int128 n = numerator < 0 ? -numerator : numerator;
        __int128 d = denominator < 0 ? -static_cast<__int128>(denominator) : denominator;
        __int128 q = n / d;
        __int128 r = n % d;
        if (r * 2 > d || (r * 2 == d && (q & 1))) ++q;
        return clamp128(negative ? -q : q);
    }

    static std::int64_t clamp128(__int128 v) {
        if (v > INT64_MAX || v < -static_cast<__int128>(INT64_MAX))
            throw Error("decimal: overflow in * or /");
        return static_cast<std::int64_t>(v);
    }

    std::int64_t units_;
};

inline namespace literals {
/// Test and fixture convenience: dec("1.5").
inline Decimal dec(std::string_view s) { return Decimal::parse(s); }
}  // namespace literals

}  // namespace mmlab

#endif  // MMLAB_DECIMAL_HPP
