#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "lookahead/types.hpp"

namespace lookahead {

enum class TokenScheme { bytes, ints };

TokenScheme parse_scheme(std::string_view name);

// bytes: one token per byte (vocab 256). ints: whitespace-separated decimal
// ids, each < vocab_size; a bad field throws Error(parse_error) naming its
// 1-based field index and byte offset.
TokenSeq tokenize(std::string_view text, TokenScheme scheme, std::size_t vocab_size = 256);

// Inverse of tokenize for display: bytes are written raw except for
// non-printable bytes, which become \xHH escapes; ints are space-joined.
std::string detokenize(std::span<const Token> tokens, TokenScheme scheme);

}  // namespace lookahead
