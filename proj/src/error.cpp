#include "lookahead/error.hpp"

namespace lookahead {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_ngram: return "invalid n-gram";
    case Errc::invalid_candidate: return "invalid candidate";
    case Errc::invalid_layout: return "invalid layout";
    case Errc::invalid_partition: return "invalid partition";
    case Errc::invalid_config: return "invalid config";
    case Errc::degenerate_distribution: return "degenerate distribution";
    case Errc::domain_error: return "domain error";
    case Errc::parse_error: return "parse error";
    case Errc::contract_violation: return "contract violation";
    case Errc::io_error: return "io error";
  }
  return "error";
}

}  // namespace lookahead
