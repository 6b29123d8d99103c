#pragma once

#include <cstdint>
#include <vector>

#include "subdiff/initial_data.hpp"
#include "subdiff/solver.hpp"

namespace subdiff {

/// b_j = (j+1)^{1-alpha} - j^{1-alpha}, j = 0..n-1.
std::vector<double> l1_weights(FractionalOrder order, int n);

/// Truncated radial domain [0, r_trunc] (Dirichlet zero at r_trunc) and a
/// uniform or graded time mesh t_n = T (n/steps)^grading.
struct L1Grid {
  int dim = 1;
  FractionalOrder order{0.5};
  double r_trunc = 40.0;
  int n_space = 400;
  double t_final = 1.0;
  int steps = 1000;
  double grading = 1.0;

  std::vector<double> time_nodes() const;
  double h() const { return r_trunc / n_space; }
};

struct L1Options {
  /// steps^2 * n_space above this raises ResourceError.
  double cost_cap = 4e10;
  /// Verify the kernel tail outside r_trunc is negligible at t_final.
  bool check_truncation = true;
};

/// L1 time stepping with an implicit radial Laplacian. Returns one snapshot
/// per requested output time (linear in time between steps).
std::vector<Snapshot> solve_l1(const Datum& d, const L1Grid& grid, const std::vector<double>& output_times,
                               const L1Options& opts = {});

/// Amplitude at time T of the mode cos(kx): the scalar L1 recurrence for
/// D^alpha a = -k^2 a, a(0) = 1.
double solve_l1_eigenmode(FractionalOrder order, double k, double t_final, int steps, double grading = 1.0);

/// Periodic 1-D problem on [0, length) with values u0 on a uniform grid.
std::vector<double> solve_l1_periodic(const std::vector<double>& u0, double length, FractionalOrder order,
                                      double t_final, int steps, double grading = 1.0);

/// Classical heat equation by backward Euler on the same radial grid.
Snapshot solve_heat_backward_euler(const Datum& d, const L1Grid& grid);

}  // namespace subdiff
