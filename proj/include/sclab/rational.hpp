#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "sclab/error.hpp"

namespace sclab {

/// Reduced fraction with 64-bit parts; den > 0.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

namespace detail {
inline __int128 abs128(__int128 x) { return x < 0 ? -x : x; }
inline __int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}
}  // namespace detail

/// Reduces num/den; nullopt when the reduced fraction does not fit in 64 bits.
inline std::optional<Rational> make_rational(__int128 num, __int128 den) {
    require(den != 0, "rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const __int128 g = num == 0 ? den : detail::gcd128(num, den);
    num /= g;
    den /= g;
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (detail::abs128(num) > lim || den > lim) return std::nullopt;
    return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

inline double ratio_to_double(__int128 num, __int128 den) {
    if (auto r = make_rational(num, den)) return r->value();
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace sclab
