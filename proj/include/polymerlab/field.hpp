#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polymerlab {

// One realization of the environment eta(i,x) on the sites an n-step walk can
// reach: 1 <= i <= n, |x| <= i, x = i (mod 2). Layer i holds i+1 values at
// x = 2j - i, j = 0..i.
struct EnvField {
  int n = 0;
  std::vector<std::vector<double>> layers;
  uint64_t seed = 0;
  std::string model_name;

  double at(int i, int x) const {
    check_site(i, x);
    return layers[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>((x + i) / 2)];
  }

  double& at(int i, int x) {
    check_site(i, x);
    return layers[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>((x + i) / 2)];
  }

  std::size_t site_count() const {
    std::size_t s = 0;
    for (const auto& l : layers) s += l.size();
    return s;
  }

 private:
  void check_site(int i, int x) const {
    if (i < 1 || i > n) throw std::out_of_range("EnvField: layer out of range");
    if ((x + i) % 2 != 0 || x < -i || x > i) throw std::out_of_range("EnvField: bad site");
  }
};

}  // namespace polymerlab
