#include "lookahead/tokenizer.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

TokenScheme parse_scheme(std::string_view name) {
  if (name == "bytes") return TokenScheme::bytes;
  if (name == "ints") return TokenScheme::ints;
  throw Error(Errc::parse_error, "unknown tokenizer scheme '" + std::string(name) + "'");
}

TokenSeq tokenize(std::string_view text, TokenScheme scheme, std::size_t vocab_size) {
  TokenSeq out;
  if (scheme == TokenScheme::bytes) {
    out.reserve(text.size());
    for (unsigned char c : text) out.push_back(c);
    return out;
  }

  std::size_t pos = 0;
  std::size_t field = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    ++field;

    const std::string_view word = text.substr(pos, end - pos);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
      throw Error(Errc::parse_error, "field " + std::to_string(field) + " at offset " +
                                         std::to_string(pos) + " is not a token id: '" +
                                         std::string(word) + "'");
    }
    if (value >= vocab_size) {
      throw Error(Errc::parse_error, "field " + std::to_string(field) + " at offset " +
                                         std::to_string(pos) + ": id " + std::to_string(value) +
                                         " >= vocab size " + std::to_string(vocab_size));
    }
    out.push_back(static_cast<Token>(value));
    pos = end;
  }
  return out;
}

std::string detokenize(std::span<const Token> tokens, TokenScheme scheme) {
  std::string out;
  if (scheme == TokenScheme::ints) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(tokens[i]);
    }
    return out;
  }
  for (Token t : tokens) {
    const auto c = static_cast<unsigned char>(t);
    if (t < 256 && c != '\\' && std::isprint(c)) {
      out += static_cast<char>(c);
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02X", static_cast<unsigned>(t & 0xFF));
      out += buf;
    }
  }
  return out;
}

}  // namespace lookahead
