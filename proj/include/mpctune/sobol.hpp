#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace mpctune {

// Gray-code Sobol sequence in up to two dimensions, enough for a
// low-discrepancy design over a (lambda, sigma) box.  The zero point is
// skipped so the first sample is not a box corner.
class Sobol {
 public:
  explicit Sobol(int dim);

  // Next point in [0,1)^dim.
  Eigen::VectorXd next();

 private:
  int dim_;
  std::uint32_t count_ = 0;
  std::uint32_t state_[2] = {0, 0};
  std::uint32_t dirs_[2][32];
};

}  // namespace mpctune
