#pragma once

#include <stdexcept>
#include <vector>

namespace wiggen {

/// Photon-number statistics of a state: P(0..n_report) plus the first two
/// moments, which are computed independently of the listed probabilities.
struct PhotonDistribution {
  std::vector<double> p;
  double mean = 0.0;
  double second_moment = 0.0;
  double tail_mass = 0.0;  // 1 - sum of the listed probabilities

  double variance() const { return second_moment - mean * mean; }

  double at(int n) const {
    if (n < 0 || n >= static_cast<int>(p.size()))
      throw std::out_of_range("photon number outside reported range");
    return p[static_cast<size_t>(n)];
  }
};

}  // namespace wiggen
