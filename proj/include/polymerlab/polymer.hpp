#pragma once

// Single-path transfer matrix: ln Z_n, ln W_n, polymer-measure marginals, the
// replica-overlap expectation and a brute-force path oracle.

#include <cstdint>
#include <span>
#include <vector>

#include "polymerlab/env.hpp"
#include "polymerlab/field.hpp"

namespace polymerlab {

// Uniform access to an environment, either materialized or regenerated
// layer-by-layer from (model, seed). Streaming keeps the big Monte Carlo runs
// at O(n) memory; both sides produce identical values by construction.
class FieldView {
 public:
  explicit FieldView(const EnvField& f) : field_(&f), n_(f.n) {}
  FieldView(const EnvModel& m, int n, uint64_t seed) : model_(&m), n_(n), seed_(seed) {}

  int n() const { return n_; }

  void layer(int i, std::span<double> out) const {
    if (field_) {
      const auto& src = field_->layers[static_cast<std::size_t>(i) - 1];
      for (std::size_t j = 0; j < src.size(); ++j) out[j] = src[j];
    } else {
      sample_layer(*model_, seed_, i, out);
    }
  }

 private:
  const EnvField* field_ = nullptr;
  const EnvModel* model_ = nullptr;
  int n_ = 0;
  uint64_t seed_ = 0;
};

// ln Z_n(beta), exact layer recursion with threshold-triggered rescaling
double log_partition(const FieldView& f, double beta);
inline double log_partition(const EnvField& f, double beta) {
  return log_partition(FieldView(f), beta);
}

// ln W_n = ln Z_n - n lambda(beta)
double log_w(const EnvField& f, double beta, const EnvModel& m);
double log_w(const EnvModel& m, int n, uint64_t seed, double beta);  // streamed

// P_{n,beta}(S_i = x) for all admissible (i,x); layer i holds i+1 entries
struct MarginalTable {
  int n = 0;
  std::vector<std::vector<double>> p;
  double at(int i, int x) const { return p[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>((x + i) / 2)]; }
};
MarginalTable marginals(const EnvField& f, double beta);

// E_{n,beta}^x2 L_n = sum_{i,x} P_{n,beta}(S_i=x)^2, in (0, n]
double overlap_expectation(const EnvField& f, double beta);

// exact sum over all 2^n paths (n <= 14)
double brute_force_log_partition(const EnvField& f, double beta);

}  // namespace polymerlab
