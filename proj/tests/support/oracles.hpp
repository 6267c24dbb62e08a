#pragma once

// Reference computations used only by tests. They share no numerical code
// with the library: plain adaptive integration and Monte Carlo straight from
// the model's defining integrals.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

// Adaptive Simpson with Richardson correction; tol is absolute.
double adaptive_simpson(const Fn& f, double a, double b, double tol, int max_depth = 50);

// Adaptive Gauss-Kronrod (7, 15). Stops when the error estimate is below
// max(abs_tol, rel_tol * |integral|).
double adaptive_gk(const Fn& f, double a, double b, double abs_tol = 1e-14, double rel_tol = 1e-12);

double q(double beta, double gamma, double x, double y);

// Chain integrals: t1(x, y) = int Q(x,u) Q(u,y) du, t2 with two intermediates.
double t1(double beta, double gamma, double x, double y);
double t2(double beta, double gamma, double x, double y);

// Z_N for N = 3 and N = 4 by nested adaptive integration of the circular
// Q-product.
double z3_nested(double beta, double gamma);
double z4_nested(double beta, double gamma);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Plain Monte Carlo of int_{[0,1]^4} prod Q over uniform points (std::mt19937_64).
McEstimate z4_monte_carlo(double beta, double gamma, std::size_t samples, std::uint64_t seed);

// int_0^1 exp(-beta/t) dt and int_0^1 t exp(-beta/t) dt.
double single_site_mass(double beta);
double single_site_first_moment(double beta);

// CDF of exp(-beta/y) on (0, 1], tabulated cell by cell with adaptive_gk and
// linearly interpolated.
class SingleSiteCdf {
 public:
  explicit SingleSiteCdf(double beta, std::size_t cells = 4000);
  double operator()(double y) const;
  double mass() const { return table_.back(); }

 private:
  std::vector<double> table_;
  double step_;
};

}  // namespace oracle
