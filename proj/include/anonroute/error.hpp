#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anonroute {

enum class Errc {
  invalid_argument,
  invalid_size,
  invalid_partition,
  generation_failed,
  infeasible_budget,
  illegal_action,
  configuration,
  domain,
  infeasible_delay,
  size_bound_exceeded,
  unsupported_strategy,
  empty_input,
  parse,
};

std::string_view to_string(Errc code);

/// All library failures are reported as anonroute::Error; code() identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace anonroute
