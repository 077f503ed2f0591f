#include "urtest/result.hpp"

namespace urtest {

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::adf: return "adf";
    case Method::arb_adf: return "arb-adf";
    case Method::fpp: return "fpp";
    case Method::lpb_pp: return "lpb-pp";
    case Method::cbb_pp: return "cbb-pp";
  }
  return "unknown";
}

std::optional<Method> method_from_name(std::string_view name) noexcept {
  if (name == "adf") return Method::adf;
  if (name == "arb-adf") return Method::arb_adf;
  if (name == "fpp") return Method::fpp;
  if (name == "lpb-pp") return Method::lpb_pp;
  if (name == "cbb-pp") return Method::cbb_pp;
  return std::nullopt;
}

}  // namespace urtest
