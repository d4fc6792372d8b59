#include "corrca/regularization.hpp"

#include <cstdio>
#include <cstdlib>

namespace corrca {

std::string Regularization::to_string() const {
  switch (kind) {
    case Kind::tsvd:
      return "tsvd:" + std::to_string(tsvd_rank);
    case Kind::shrinkage: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "shrinkage:%.17g", shrink_gamma);
      return buf;
    }
    case Kind::none:
    default:
      return "none";
  }
}

Regularization Regularization::parse(const std::string& text) {
  if (text == "none" || text.empty()) return none();
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  char* end = nullptr;
  if (head == "tsvd") {
    const long k = std::strtol(arg.c_str(), &end, 10);
    if (arg.empty() || *end != '\0')
      throw ArgumentError("bad tsvd rank '" + arg + "' in descriptor '" + text + "'");
    return tsvd(static_cast<int>(k));
  }
  if (head == "shrinkage") {
    const double g = std::strtod(arg.c_str(), &end);
    if (arg.empty() || *end != '\0')
      throw ArgumentError("bad shrinkage gamma '" + arg + "' in descriptor '" + text + "'");
    return shrinkage(g);
  }
  throw ArgumentError("unknown regularization descriptor '" + text +
                      "'; expected none, tsvd:K or shrinkage:GAMMA");
}

}  // namespace corrca
