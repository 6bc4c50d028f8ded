#pragma once

#include <mpdc/models.hpp>

#include <Eigen/Dense>

namespace mpdc::detail {

Eigen::MatrixXd dense_hamiltonian_real(const ModelSpec& spec);

}  // namespace mpdc::detail
