#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpdc {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by contract() when a paired axis disagrees in extent.
struct DimensionMismatch : Error {
  std::size_t axis_a, axis_b, extent_a, extent_b;
  DimensionMismatch(std::size_t aa, std::size_t ab, std::size_t ea, std::size_t eb);
};

// Raised by orthonormal_complement() when the input columns are not orthonormal.
struct IsometryDefect : Error {
  double defect;
  explicit IsometryDefect(double d);
};

// Dense row-major complex tensor. Extents may be zero (an empty tensor is a
// legitimate result, e.g. the orthonormal complement of a square unitary).
class ComplexTensor {
 public:
  ComplexTensor() : data_(1, Complex(0, 0)) {}  // rank-0 scalar zero
  explicit ComplexTensor(std::vector<std::size_t> shape);
  ComplexTensor(std::vector<std::size_t> shape, std::vector<Complex> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  template <typename... Ix>
  Complex& at(Ix... ix) {
    const std::array<std::size_t, sizeof...(Ix)> v{static_cast<std::size_t>(ix)...};
    return data_[offset(v)];
  }
  template <typename... Ix>
  Complex at(Ix... ix) const {
    const std::array<std::size_t, sizeof...(Ix)> v{static_cast<std::size_t>(ix)...};
    return data_[offset(v)];
  }
  Complex& at_index(std::span<const std::size_t> ix) { return data_[offset(ix)]; }
  Complex at_index(std::span<const std::size_t> ix) const { return data_[offset(ix)]; }

  double norm() const;  // Frobenius
  bool all_finite() const;

  // hand the buffer to a new owner (used by reshape); leaves *this moved-from
  std::vector<Complex> release() && { return std::move(data_); }

 private:
  std::size_t offset(std::span<const std::size_t> ix) const;
  std::vector<std::size_t> shape_;
  std::vector<Complex> data_;
};

ComplexTensor reshape(ComplexTensor t, std::vector<std::size_t> shape);
ComplexTensor permute(const ComplexTensor& t, const std::vector<std::size_t>& axes);
ComplexTensor conjugate(ComplexTensor t);
ComplexTensor identity_matrix(std::size_t n);

// Gaussian-filled tensor, used for random test states.
ComplexTensor random_gaussian(std::vector<std::size_t> shape, std::mt19937_64& rng);

// Pairwise tensor contraction: axes[i] = {axis of a, axis of b} are summed
// over; free axes of a (in order) followed by free axes of b form the result.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& axes);

struct SvdResult {
  ComplexTensor left;                    // (rows, k), orthonormal columns
  std::vector<double> singular_values;   // length k, non-increasing
  ComplexTensor right_adjoint;           // (k, cols), orthonormal rows
  double discarded_weight = 0.0;         // sum of dropped s^2 over sum of all s^2
};

inline constexpr double kDefaultSvdCutoff = 1e-12;

// Rank-revealing SVD of a rank-2 tensor. Keeps min(max_rank, #{s_i > cutoff *
// s_max}) values but never fewer than one (a zero matrix yields a single zero
// value). Left-vector phases are fixed so the largest-magnitude entry of each
// column is real positive, which makes the decomposition deterministic.
SvdResult truncated_svd(const ComplexTensor& m, std::size_t max_rank,
                        double cutoff = kDefaultSvdCutoff);

// Columns that extend an (m x r) isometry (m >= r, orthonormal columns within
// 1e-10) to a full unitary. Result is (m x (m-r)); empty when r == m.
ComplexTensor orthonormal_complement(const ComplexTensor& v);

// Spectral norm of (U^H U - I) for a rank-2 square tensor.
double unitarity_defect(const ComplexTensor& u);

}  // namespace mpdc
