#pragma once

#include <functional>
#include <vector>

namespace bridge {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 on [a,b]. Splits the worst interval until the
// summed error estimate meets rel_tol * |integral| + abs_tol or the interval
// budget is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-10, double abs_tol = 0.0,
                              int max_intervals = 4000);

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1,1]
  std::vector<double> weights;
};

// n-node rule via Newton iteration on the Legendre recurrence; deterministic.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace bridge
