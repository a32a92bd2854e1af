#include "anonroute/error.hpp"

namespace anonroute {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_size: return "invalid-size";
    case Errc::invalid_partition: return "invalid-partition";
    case Errc::generation_failed: return "generation-failed";
    case Errc::infeasible_budget: return "infeasible-budget";
    case Errc::illegal_action: return "illegal-action";
    case Errc::configuration: return "configuration";
    case Errc::domain: return "domain";
    case Errc::infeasible_delay: return "infeasible-delay";
    case Errc::size_bound_exceeded: return "size-bound-exceeded";
    case Errc::unsupported_strategy: return "unsupported-strategy";
    case Errc::empty_input: return "empty-input";
    case Errc::parse: return "parse";
  }
  return "unknown";
}

}  // namespace anonroute
