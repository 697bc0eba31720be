#pragma once

#include "chemolimit/grid.hpp"

namespace chemolimit {

/// Chemotactic sensitivity chi(v): linear k v, or saturating k v / (1 + v).
struct ChiSpec {
  enum class Kind { linear, saturating };
  Kind kind = Kind::linear;
  double k = 0.0;

  double operator()(double v) const { return kind == Kind::linear ? k * v : k * v / (1.0 + v); }
  double derivative(double v) const {
    if (kind == Kind::linear) return k;
    double s = 1.0 + v;
    return k / (s * s);
  }
  /// Throws DomainError for negative k.
  void validate() const;
};

/// chi applied node-wise.
ScalarField apply_chi(const ChiSpec& chi, const ScalarField& v);

}  // namespace chemolimit
