#pragma once

#include <string>
#include <vector>

#include "ktone/matfun.hpp"
#include "ktone/scalar_function.hpp"

namespace ktone {

struct DkResult {
  SymMatrix value;
  /// Same eigenbasis sum with every term replaced by its absolute value.
  double magnitude = 0.0;
};

/// d^k/dt^k f(A + tX) at t = 0 through the eigenbasis divided-difference sum.
SymMatrix directional_derivative_dk(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k);
DkResult directional_derivative_dk_full(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k);

struct FdResult {
  SymMatrix value;
  double h = 0.0;
  std::string stencil;
};

inline constexpr int kFdHalfWidth = 8;
inline constexpr double kFdReach = 0.6;

/// Nodes on each side of the central stencil for order k.
int fd_half_width(int k);

/// Default node spacing: the stencil reaches 0.6 * L / ||X||_2 on each side, where L is the
/// smaller of 1 + ||A||_2 and the distance from the spectrum of A to the domain boundary.
double default_fd_step(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k);

/// Weights of the k-th derivative at 0 for values on the given nodes.
std::vector<double> fornberg_weights(const std::vector<double>& nodes, int k);

/// Central stencil on 2*fd_half_width(k)+1 equispaced nodes of t -> f(A + tX);
/// h <= 0 selects the default spacing.
FdResult directional_derivative_fd_full(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k,
                                        double h = 0.0);
SymMatrix directional_derivative_fd(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k,
                                    double h = 0.0);

/// f(A+X) - sum_{l<k} (1/l!) d^l/dt^l f(A+tX)|_0.
SymMatrix taylor_remainder_gap(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k);

}  // namespace ktone
