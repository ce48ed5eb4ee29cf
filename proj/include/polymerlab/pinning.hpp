#pragma once

// Homogeneous pinning of the difference walk D = S^1 - S^2 (steps -2,0,+2
// with probabilities 1/4,1/2,1/4): exact partition function, free energy
// estimates and a brute-force pair oracle.

#include <vector>

namespace polymerlab {

// ln E^x2 exp(t L_n), L_n = #{i <= n : D_i = 0}; exact O(n^2) recursion
double log_pinning(int n, double t);

// ln E^x2 exp(t L_i) for every i = 1..n in one pass
std::vector<double> log_pinning_curve(int n, double t);

struct PinningEstimate {
  double t = 0.0;
  int n_max = 0;
  double rate_nmax = 0.0;     // log_pinning(n_max, t) / n_max
  double rate_refined = 0.0;  // two-point slope between n_max/2 and n_max
  double f_hat = 0.0;         // rate_refined / 2: free energy per walk step (see below)
  bool low_n_warning = false; // n_max * t^2 < 50, correlation length too close to n_max
};

// The pair chain advances two simple-walk steps per polymer step (D at time n
// is a simple random walk at time 2n), so the pinning free energy per
// underlying walk step is half the per-n rate; that is the quantity with the
// t^2/2 small-t asymptotics and the headline F-hat here.
PinningEstimate pinning_free_energy(double t, int n_max);

// closed form for lim (1/n) log_pinning(n, t), from the first-return
// generating function 1 - sqrt(1-z) of the difference walk:
//   F(t) = 2t - ln(2 e^t - 1).
// The per-walk-step value F_hat(t) is half of this.
double pinning_rate_exact(double t);

// F_n(beta) = (1/2n) log_pinning(n, 2 beta^2), the replica comparison value
double f_n(double beta, int n);

// exact enumeration over all 4^n path pairs (n <= 8)
double brute_force_pinning(int n, double t);

}  // namespace polymerlab
