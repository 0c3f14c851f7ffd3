#pragma once

#include <stdexcept>
#include <string>

namespace lookahead {

enum class Errc {
  invalid_ngram,
  invalid_candidate,
  invalid_layout,
  invalid_partition,
  invalid_config,
  degenerate_distribution,
  domain_error,
  parse_error,
  contract_violation,
  io_error,
};

const char* to_string(Errc code);

// All engine failures surface as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lookahead
