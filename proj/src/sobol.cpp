#include "mpctune/sobol.hpp"

#include <bit>
#include <stdexcept>

namespace mpctune {

Sobol::Sobol(int dim) : dim_(dim) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("Sobol: dim must be 1 or 2");
  // Dimension 1: van der Corput, all direction integers 1.
  for (int k = 0; k < 32; ++k) dirs_[0][k] = 1u << (31 - k);
  // Dimension 2: degree-1 primitive polynomial seeded with m_1 = 1, giving
  // the direction integers 1, 3, 5, 15, 17, 51, ...
  std::uint32_t m[32];
  m[0] = 1;
  for (int k = 1; k < 32; ++k) m[k] = (m[k - 1] << 1) ^ m[k - 1];
  for (int k = 0; k < 32; ++k) dirs_[1][k] = m[k] << (31 - k);
}

Eigen::VectorXd Sobol::next() {
  // Gray-code update: flip the direction number indexed by the lowest zero
  // bit of the running counter.
  const int c = std::countr_one(count_);
  ++count_;
  Eigen::VectorXd out(dim_);
  for (int d = 0; d < dim_; ++d) {
    state_[d] ^= dirs_[d][c];
    out[d] = static_cast<double>(state_[d]) * 0x1p-32;
  }
  return out;
}

}  // namespace mpctune
