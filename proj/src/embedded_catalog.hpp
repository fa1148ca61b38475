#pragma once

#include <span>
#include <string_view>

namespace hreye::detail {

struct EmbeddedLuceme {
    std::string_view file;
    std::string_view text;
};

// Generated at configure time from catalog/*.luceme.
std::span<const EmbeddedLuceme> embedded_lucemes();

}  // namespace hreye::detail
