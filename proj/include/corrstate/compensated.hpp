#pragma once

namespace corrstate {

/// Kahan-compensated accumulator. The running sum stays in `sum` so readers
/// can use it directly without folding in the compensation term.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

// Array form used by the rolling pair-product sums: one compensation slot
// per element, element updates independent (and therefore vectorizable).
inline void kahan_add(double& sum, double& comp, double x) {
  const double y = x - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace corrstate
