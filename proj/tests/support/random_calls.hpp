#pragma once

// Random GisCall generator shared by the property tests and the acceptance
// runner. Strings deliberately contain commas, brackets and parentheses.

#include "geocmd/command_model.hpp"
#include "geocmd/rng.hpp"

#include <string>

namespace geocmd::testing {

inline std::string random_string(Rng& rng, std::size_t max_len = 12) {
    static constexpr std::string_view alphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _-.,()[]/:?&=<>";
    const std::size_t len = rng.below(max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    return s;
}

inline NumberLiteral random_number(Rng& rng) {
    std::string s;
    if (rng.below(2) == 0) s += '-';
    const std::size_t int_digits = 1 + rng.below(4);
    for (std::size_t i = 0; i < int_digits; ++i) s += static_cast<char>('0' + rng.below(10));
    if (rng.below(3) != 0) {
        s += '.';
        const std::size_t frac_digits = 1 + rng.below(6);
        for (std::size_t i = 0; i < frac_digits; ++i) s += static_cast<char>('0' + rng.below(10));
    }
    return NumberLiteral(s);
}

inline std::uint32_t random_levels(Rng& rng) {
    return rng.below(4) == 0 ? static_cast<std::uint32_t>(1 + rng.below(0xFFFFFFFFull))
                             : static_cast<std::uint32_t>(rng.between(1, 10));
}

inline GisCall random_call(Rng& rng) {
    switch (rng.below(10)) {
    case 0: {
        auto label = random_string(rng);
        auto x = random_number(rng);
        auto y = random_number(rng);
        return AddMarker{label, {x, y}};
    }
    case 1: return AddLayer{random_string(rng)};
    case 2: {
        const auto kind = static_cast<GeometryKind>(rng.below(4));
        return AddVector{kind, random_string(rng)};
    }
    case 3: return AddWMS{random_string(rng, 40)};
    case 4: {
        const auto prop = static_cast<CartoProperty>(rng.below(3));
        auto color = random_string(rng);
        std::optional<std::string> extra;
        if (rng.below(2) == 0) extra = random_string(rng);
        return Cartography{prop, color, extra};
    }
    case 5: return Draw{static_cast<DrawShape>(rng.below(3))};
    case 6: {
        auto a = random_number(rng);
        auto b = random_number(rng);
        return Move{a, b};
    }
    case 7: {
        MoveToExtent m;
        for (auto& v : m.bounds) v = random_number(rng);
        return m;
    }
    case 8: return ZoomIn{random_levels(rng)};
    default: return ZoomOut{random_levels(rng)};
    }
}

} // namespace geocmd::testing
