#pragma once

#include <string>

#include "corrca/errors.hpp"

namespace corrca {

/// Regularization of the within-set covariance before the generalized
/// eigenvalue solve. One grammar across the library and the CLI:
/// "none", "tsvd:K", "shrinkage:GAMMA".
struct Regularization {
  enum class Kind { none, tsvd, shrinkage };

  Kind kind = Kind::none;
  int tsvd_rank = 0;         // valid when kind == tsvd
  double shrink_gamma = 0.0; // valid when kind == shrinkage

  static Regularization none() { return {}; }

  static Regularization tsvd(int k) {
    if (k < 1) throw ArgumentError("tsvd rank must be >= 1, got " + std::to_string(k));
    Regularization r;
    r.kind = Kind::tsvd;
    r.tsvd_rank = k;
    return r;
  }

  static Regularization shrinkage(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw ArgumentError("shrinkage gamma must lie in [0,1], got " + std::to_string(gamma));
    Regularization r;
    r.kind = Kind::shrinkage;
    r.shrink_gamma = gamma;
    return r;
  }

  std::string to_string() const;
  static Regularization parse(const std::string& text);

  bool operator==(const Regularization&) const = default;
};

}  // namespace corrca
