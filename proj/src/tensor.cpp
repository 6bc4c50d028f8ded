#include <mpdc/tensor.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eigen_bridge.hpp"

namespace mpdc {

namespace {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

}  // namespace

DimensionMismatch::DimensionMismatch(std::size_t aa, std::size_t ab, std::size_t ea,
                                     std::size_t eb)
    : Error("contract: axis " + std::to_string(aa) + " of the first tensor (extent " +
            std::to_string(ea) + ") does not match axis " + std::to_string(ab) +
            " of the second (extent " + std::to_string(eb) + ")"),
      axis_a(aa),
      axis_b(ab),
      extent_a(ea),
      extent_b(eb) {}

IsometryDefect::IsometryDefect(double d)
    : Error("orthonormal_complement: input columns are not orthonormal (defect " +
            std::to_string(d) + ")"),
      defect(d) {}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), Complex(0, 0)) {}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape, std::vector<Complex> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_))
    throw Error("ComplexTensor: data size " + std::to_string(data_.size()) +
                " does not match shape " + shape_str(shape_));
}

std::size_t ComplexTensor::offset(std::span<const std::size_t> ix) const {
  if (ix.size() != shape_.size()) throw Error("ComplexTensor: wrong number of indices");
  std::size_t off = 0;
  for (std::size_t k = 0; k < ix.size(); ++k) {
    if (ix[k] >= shape_[k])
      throw Error("ComplexTensor: index " + std::to_string(ix[k]) + " out of range for axis " +
                  std::to_string(k) + " with extent " + std::to_string(shape_[k]));
    off = off * shape_[k] + ix[k];
  }
  return off;
}

double ComplexTensor::norm() const {
  double s = 0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexTensor::all_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

ComplexTensor reshape(ComplexTensor t, std::vector<std::size_t> shape) {
  if (shape_size(shape) != t.size())
    throw Error("reshape: cannot view " + shape_str(t.shape()) + " as " + shape_str(shape));
  return ComplexTensor(std::move(shape), std::move(t).release());
}

ComplexTensor permute(const ComplexTensor& t, const std::vector<std::size_t>& axes) {
  const std::size_t r = t.rank();
  if (axes.size() != r) throw Error("permute: axis list length does not match rank");
  std::vector<bool> seen(r, false);
  for (auto a : axes) {
    if (a >= r || seen[a]) throw Error("permute: invalid axis permutation");
    seen[a] = true;
  }
  std::vector<std::size_t> out_shape(r);
  for (std::size_t k = 0; k < r; ++k) out_shape[k] = t.extent(axes[k]);
  ComplexTensor out(out_shape);
  if (out.size() == 0) return out;
  if (r == 0) {
    out.data()[0] = t.data()[0];
    return out;
  }

  // input strides seen through the output axis order
  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t k = r - 1; k-- > 0;) in_strides[k] = in_strides[k + 1] * t.extent(k + 1);
  std::vector<std::size_t> strides(r);
  for (std::size_t k = 0; k < r; ++k) strides[k] = in_strides[axes[k]];

  std::vector<std::size_t> counter(r, 0);
  std::size_t in_off = 0;
  const std::size_t n = out.size();
  auto* src = t.data().data();
  auto* dst = out.data().data();
  for (std::size_t lin = 0;;) {
    dst[lin] = src[in_off];
    if (++lin == n) break;
    for (std::size_t k = r; k-- > 0;) {
      ++counter[k];
      in_off += strides[k];
      if (counter[k] < out_shape[k]) break;
      in_off -= out_shape[k] * strides[k];
      counter[k] = 0;
    }
  }
  return out;
}

ComplexTensor conjugate(ComplexTensor t) {
  for (auto& v : t.data()) v = std::conj(v);
  return t;
}

ComplexTensor identity_matrix(std::size_t n) {
  ComplexTensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

ComplexTensor random_gaussian(std::vector<std::size_t> shape, std::mt19937_64& rng) {
  ComplexTensor t(std::move(shape));
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : t.data()) {
    const double re = g(rng);
    const double im = g(rng);
    v = Complex(re, im);
  }
  return t;
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& axes) {
  std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
  std::size_t k_size = 1;
  for (auto [pa, pb] : axes) {
    if (pa >= a.rank() || pb >= b.rank()) throw Error("contract: axis out of range");
    if (a_used[pa] || b_used[pb]) throw Error("contract: axis contracted twice");
    if (a.extent(pa) != b.extent(pb))
      throw DimensionMismatch(pa, pb, a.extent(pa), b.extent(pb));
    a_used[pa] = true;
    b_used[pb] = true;
    k_size *= a.extent(pa);
  }

  std::vector<std::size_t> a_free, b_free, out_shape;
  std::size_t m_size = 1, n_size = 1;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (!a_used[i]) {
      a_free.push_back(i);
      out_shape.push_back(a.extent(i));
      m_size *= a.extent(i);
    }
  for (std::size_t i = 0; i < b.rank(); ++i)
    if (!b_used[i]) {
      b_free.push_back(i);
      out_shape.push_back(b.extent(i));
      n_size *= b.extent(i);
    }

  // A -> (free..., contracted...), B -> (contracted..., free...)
  std::vector<std::size_t> pa_axes(a_free), pb_axes;
  for (auto [pa, pb] : axes) pa_axes.push_back(pa);
  for (auto [pa, pb] : axes) pb_axes.push_back(pb);
  pb_axes.insert(pb_axes.end(), b_free.begin(), b_free.end());

  auto is_identity = [](const std::vector<std::size_t>& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != i) return false;
    return true;
  };
  const ComplexTensor ap = is_identity(pa_axes) ? a : permute(a, pa_axes);
  const ComplexTensor bp = is_identity(pb_axes) ? b : permute(b, pb_axes);

  ComplexTensor out(out_shape);
  if (out.size() == 0) return out;
  using detail::ERowMat;
  Eigen::Map<const ERowMat> ma(ap.data().data(), static_cast<Eigen::Index>(m_size),
                               static_cast<Eigen::Index>(k_size));
  Eigen::Map<const ERowMat> mb(bp.data().data(), static_cast<Eigen::Index>(k_size),
                               static_cast<Eigen::Index>(n_size));
  Eigen::Map<ERowMat> mo(out.data().data(), static_cast<Eigen::Index>(m_size),
                         static_cast<Eigen::Index>(n_size));
  if (k_size == 0)
    mo.setZero();
  else
    mo.noalias() = ma * mb;
  return out;
}

SvdResult truncated_svd(const ComplexTensor& m, std::size_t max_rank, double cutoff) {
  if (m.rank() != 2) throw Error("truncated_svd: expected a rank-2 tensor");
  if (max_rank == 0) throw Error("truncated_svd: max_rank must be at least 1");
  if (m.size() == 0) throw Error("truncated_svd: input has a zero extent");
  if (!m.all_finite()) throw Error("truncated_svd: input has non-finite entries");

  const auto rows = static_cast<Eigen::Index>(m.extent(0));
  const auto cols = static_cast<Eigen::Index>(m.extent(1));
  detail::EMat mat = detail::to_eigen(m);
  Eigen::BDCSVD<detail::EMat> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index full = s.size();

  double total = 0;
  for (Eigen::Index i = 0; i < full; ++i) total += s(i) * s(i);

  Eigen::Index keep = 0;
  if (full > 0 && s(0) > 0)
    for (Eigen::Index i = 0; i < full; ++i)
      if (s(i) > cutoff * s(0)) ++keep;
  const auto cap = static_cast<Eigen::Index>(
      std::min<std::size_t>(max_rank, static_cast<std::size_t>(full)));
  keep = std::min(keep, cap);
  if (keep == 0) keep = 1;  // degenerate input: keep one (possibly zero) value

  double lost = 0;
  for (Eigen::Index i = keep; i < full; ++i) lost += s(i) * s(i);

  detail::EMat u = svd.matrixU().leftCols(keep);
  detail::EMat vh = svd.matrixV().leftCols(keep).adjoint();

  // deterministic phases: largest-magnitude entry of each left vector -> real positive
  for (Eigen::Index j = 0; j < keep; ++j) {
    Eigen::Index arg = 0;
    double best = -1;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double v = std::abs(u(i, j));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (best > 0) {
      const Complex ph = u(arg, j) / best;
      u.col(j) *= std::conj(ph);
      vh.row(j) *= ph;
    }
  }

  SvdResult out;
  out.left = detail::from_eigen(u);
  out.right_adjoint = detail::from_eigen(vh);
  out.singular_values.assign(s.data(), s.data() + keep);
  out.discarded_weight = total > 0 ? lost / total : 0.0;
  (void)cols;
  return out;
}

ComplexTensor orthonormal_complement(const ComplexTensor& v) {
  if (v.rank() != 2) throw Error("orthonormal_complement: expected a rank-2 tensor");
  const std::size_t m = v.extent(0), r = v.extent(1);
  if (m < r) throw Error("orthonormal_complement: more columns than rows");
  if (!v.all_finite()) throw Error("orthonormal_complement: input has non-finite entries");

  detail::EMat mat = detail::to_eigen(v);
  detail::EMat gram = mat.adjoint() * mat - detail::EMat::Identity(r, r);
  double defect = 0;
  if (r > 0) {
    Eigen::SelfAdjointEigenSolver<detail::EMat> es(gram, Eigen::EigenvaluesOnly);
    defect = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (defect > 1e-10) throw IsometryDefect(defect);

  Eigen::JacobiSVD<detail::EMat> svd(mat, Eigen::ComputeFullU);
  detail::EMat k = svd.matrixU().rightCols(m - r);
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1;
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double val = std::abs(k(i, j));
      if (val > best) {
        best = val;
        arg = i;
      }
    }
    if (best > 0) k.col(j) *= std::conj(k(arg, j) / best);
  }

  ComplexTensor out({m, m - r});
  if (out.size() > 0)
    Eigen::Map<detail::ERowMat>(out.data().data(), k.rows(), k.cols()) = k;
  return out;
}

double unitarity_defect(const ComplexTensor& u) {
  if (u.rank() != 2 || u.extent(0) != u.extent(1))
    throw Error("unitarity_defect: expected a square rank-2 tensor");
  detail::EMat mat = detail::to_eigen(u);
  const auto n = mat.rows();
  detail::EMat dev = mat.adjoint() * mat - detail::EMat::Identity(n, n);
  if (n == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<detail::EMat> es(dev, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace mpdc
