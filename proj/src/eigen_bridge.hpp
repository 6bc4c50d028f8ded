#pragma once

// Internal Eigen <-> ComplexTensor glue; not installed.

#include <mpdc/tensor.hpp>

#include <Eigen/Dense>

namespace mpdc::detail {

using EMat = Eigen::MatrixXcd;
using ERowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline EMat to_eigen(const ComplexTensor& t) {
  if (t.rank() != 2) throw Error("to_eigen: expected a rank-2 tensor");
  const auto r = static_cast<Eigen::Index>(t.extent(0));
  const auto c = static_cast<Eigen::Index>(t.extent(1));
  return Eigen::Map<const ERowMat>(t.data().data(), r, c);
}

inline ComplexTensor from_eigen(const EMat& m) {
  ComplexTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  Eigen::Map<ERowMat>(t.data().data(), m.rows(), m.cols()) = m;
  return t;
}

}  // namespace mpdc::detail
