#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kreinlab {

enum class Errc {
  range_exceeded,
  domain_error,
  bad_node_count,
  near_singular,
  near_eigenvalue,
  quadrature_unavailable,
  spec_invalid,
  backend_unsupported,
  window_too_wide,
  bracket_singular,
  config_not_found,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::range_exceeded: return "range_exceeded";
    case Errc::domain_error: return "domain_error";
    case Errc::bad_node_count: return "bad_node_count";
    case Errc::near_singular: return "near_singular";
    case Errc::near_eigenvalue: return "near_eigenvalue";
    case Errc::quadrature_unavailable: return "quadrature_unavailable";
    case Errc::spec_invalid: return "spec_invalid";
    case Errc::backend_unsupported: return "backend_unsupported";
    case Errc::window_too_wide: return "window_too_wide";
    case Errc::bracket_singular: return "bracket_singular";
    case Errc::config_not_found: return "config_not_found";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace kreinlab
