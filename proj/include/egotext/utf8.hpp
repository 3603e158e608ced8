#pragma once

#include <string>
#include <string_view>

namespace egotext {

// Invalid or truncated sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

}  // namespace egotext
