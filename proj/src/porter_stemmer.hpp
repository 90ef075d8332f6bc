#pragma once

#include <string>
#include <string_view>

namespace psum {

inline constexpr std::string_view kPorterStemmerId = "porter-1980";

// Original Porter (1980) suffix stripper for lowercase ASCII words.
// Words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace psum
