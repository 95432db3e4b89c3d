#pragma once

#include "pinlab/scalar.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pinlab {

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// A one-body setting: particle count and orbital count of the truncated
// one-particle space.
struct Setting {
  int particles = 0;
  int dim = 0;

  Setting() = default;
  Setting(int n, int d) : particles(n), dim(d) {
    if (particles < 1 || dim < particles)
      throw std::invalid_argument("setting requires d >= N >= 1");
  }

  friend bool operator==(const Setting&, const Setting&) = default;

  std::string str() const {
    return "(" + std::to_string(particles) + "," + std::to_string(dim) + ")";
  }
};

}  // namespace pinlab
