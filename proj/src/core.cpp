#include "decoherence/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace decoherence {

HilbertSpace::HilbertSpace(std::vector<std::size_t> factor_dims, std::vector<std::string> labels)
    : factor_dims_(std::move(factor_dims)), labels_(std::move(labels)) {
  if (factor_dims_.empty()) {
    throw ArgumentError("HilbertSpace needs at least one factor");
  }
  if (!labels_.empty() && labels_.size() != factor_dims_.size()) {
    throw ArgumentError("HilbertSpace label count does not match factor count");
  }
  labels_.resize(factor_dims_.size());
  for (std::size_t d : factor_dims_) {
    if (d == 0) {
      throw ArgumentError("HilbertSpace factor dimension must be >= 1");
    }
    if (dimension_ > kMaxDimension / d) {
      throw ArgumentError("HilbertSpace dimension exceeds cap of " + std::to_string(kMaxDimension));
    }
    dimension_ *= d;
  }
}

HilbertSpace HilbertSpace::single(std::size_t dim, std::string label) {
  return HilbertSpace({dim}, {std::move(label)});
}

HilbertSpace HilbertSpace::subspace(std::span<const std::size_t> keep) const {
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) {
    throw ArgumentError("subspace: keep set is empty");
  }
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("subspace: duplicate factor index");
  }
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  for (std::size_t k : sorted) {
    if (k >= factor_dims_.size()) {
      throw ArgumentError("subspace: factor index " + std::to_string(k) + " out of range");
    }
    dims.push_back(factor_dims_[k]);
    labels.push_back(labels_[k]);
  }
  return HilbertSpace(std::move(dims), std::move(labels));
}

HilbertSpace HilbertSpace::tensor(const HilbertSpace& other) const {
  std::vector<std::size_t> dims = factor_dims_;
  std::vector<std::string> labels = labels_;
  dims.insert(dims.end(), other.factor_dims_.begin(), other.factor_dims_.end());
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  return HilbertSpace(std::move(dims), std::move(labels));
}

Ket::Ket(Vector amplitudes, HilbertSpace space)
    : amplitudes_(std::move(amplitudes)), space_(std::move(space)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != space_.dimension()) {
    throw ArgumentError("Ket length " + std::to_string(amplitudes_.size()) +
                        " does not match space dimension " + std::to_string(space_.dimension()));
  }
}

Ket Ket::normalized() const {
  const double n = amplitudes_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ArgumentError("cannot normalize a zero or non-finite ket");
  }
  return Ket(amplitudes_ / n, space_);
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ArgumentError("hermiticity_defect: matrix not square");
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

DensityMatrix::DensityMatrix(Matrix entries, HilbertSpace space, const DensityValidation& validation)
    : entries_(std::move(entries)), space_(std::move(space)) {
  if (entries_.rows() != entries_.cols()) {
    throw ArgumentError("DensityMatrix: entries not square");
  }
  if (static_cast<std::size_t>(entries_.rows()) != space_.dimension()) {
    throw ArgumentError("DensityMatrix: size does not match space dimension");
  }
  if (!entries_.allFinite()) {
    throw ArgumentError("DensityMatrix: non-finite entries");
  }
  if (hermiticity_defect(entries_) > validation.hermiticity) {
    throw ArgumentError("DensityMatrix: not Hermitian");
  }
  const double tr = entries_.trace().real();
  if (!(tr > 0.0) || tr > 1.0 + validation.trace) {
    throw ArgumentError("DensityMatrix: trace " + std::to_string(tr) + " outside (0, 1]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues().minCoeff();
  if (lowest < -validation.positivity) {
    throw PositivityError("DensityMatrix: eigenvalue " + std::to_string(lowest) + " below tolerance");
  }
}

DensityMatrix DensityMatrix::from_ket(const Ket& psi) {
  const Ket unit = psi.normalized();
  Matrix rho = unit.amplitudes() * unit.amplitudes().adjoint();
  return DensityMatrix(hermitian_part(rho), unit.space());
}

DensityMatrix DensityMatrix::maximally_mixed(const HilbertSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), space);
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw ArgumentError("tensor_product: operands must be square");
  }
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

Vector tensor_product(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

Ket tensor_product(const Ket& a, const Ket& b) {
  return Ket(tensor_product(a.amplitudes(), b.amplitudes()), a.space().tensor(b.space()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const HilbertSpace& space = rho.space();
  const HilbertSpace kept_space = space.subspace(keep);
  const auto dims = space.factor_dims();
  const std::size_t nf = dims.size();

  std::vector<bool> is_kept(nf, false);
  for (std::size_t k : keep) {
    is_kept[k] = true;
  }

  // Strides of each factor in the full product index.
  std::vector<std::size_t> stride(nf, 1);
  for (std::size_t f = nf; f-- > 1;) {
    stride[f - 1] = stride[f] * dims[f];
  }

  // Offset into the full index contributed by a kept (or traced) sub-index.
  auto offsets = [&](bool kept) {
    std::vector<std::size_t> result{0};
    for (std::size_t f = 0; f < nf; ++f) {
      if (is_kept[f] != kept) {
        continue;
      }
      std::vector<std::size_t> next;
      next.reserve(result.size() * dims[f]);
      for (std::size_t base : result) {
        for (std::size_t i = 0; i < dims[f]; ++i) {
          next.push_back(base + i * stride[f]);
        }
      }
      result = std::move(next);
    }
    return result;
  };
  const std::vector<std::size_t> kept_offsets = offsets(true);
  const std::vector<std::size_t> traced_offsets = offsets(false);

  const auto dk = static_cast<Eigen::Index>(kept_offsets.size());
  Matrix reduced = Matrix::Zero(dk, dk);
  const Matrix& m = rho.entries();
  for (Eigen::Index r = 0; r < dk; ++r) {
    for (Eigen::Index c = 0; c < dk; ++c) {
      Complex sum = 0.0;
      for (std::size_t s : traced_offsets) {
        sum += m(static_cast<Eigen::Index>(kept_offsets[r] + s), static_cast<Eigen::Index>(kept_offsets[c] + s));
      }
      reduced(r, c) = sum;
    }
  }
  return DensityMatrix(std::move(reduced), kept_space);
}

namespace {

Vector coherent_amplitudes(Complex alpha, std::size_t n_max) {
  if (n_max < 1) {
    throw ArgumentError("coherent_state: n_max must be >= 1");
  }
  Vector c(static_cast<Eigen::Index>(n_max + 1));
  c(0) = std::exp(-std::norm(alpha) / 2.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    c(static_cast<Eigen::Index>(n)) = c(static_cast<Eigen::Index>(n - 1)) * alpha / std::sqrt(static_cast<double>(n));
  }
  return c;
}

}  // namespace

double coherent_captured_norm(Complex alpha, std::size_t n_max) {
  return coherent_amplitudes(alpha, n_max).squaredNorm();
}

Ket coherent_state(Complex alpha, std::size_t n_max) {
  Vector c = coherent_amplitudes(alpha, n_max);
  const double captured = c.squaredNorm();
  if (!(captured >= 1.0 - 1e-8)) {
    throw TruncationError("coherent_state: n_max=" + std::to_string(n_max) + " captures only " +
                          std::to_string(captured) + " of the norm for |alpha|^2=" +
                          std::to_string(std::norm(alpha)));
  }
  c /= std::sqrt(captured);
  return Ket(std::move(c), HilbertSpace::single(n_max + 1, "field"));
}

RealVector normalized_spectrum(const Matrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw ArgumentError("normalized_spectrum: matrix must be square and nonempty");
  }
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) {
    throw ArgumentError("normalized_spectrum: zero trace");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(rho) / tr, Eigen::EigenvaluesOnly);
  RealVector lambda = solver.eigenvalues();
  if (lambda.minCoeff() < -kPositivityTolerance) {
    throw PositivityError("eigenvalue " + std::to_string(lambda.minCoeff()) + " below -1e-9");
  }
  return lambda;
}

double von_neumann_entropy(const Matrix& rho) {
  const RealVector lambda = normalized_spectrum(rho);
  double s = 0.0;
  for (double l : lambda) {
    if (l > 0.0) {
      s -= l * std::log(l);
    }
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.entries()); }

double purity(const Matrix& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) == 0.0) {
    throw ArgumentError("purity: zero trace");
  }
  // Tr(rho^2) without forming the product.
  const double tr2 = (rho.array() * rho.transpose().array()).sum().real();
  return tr2 / std::norm(tr);
}

double purity(const DensityMatrix& rho) { return purity(rho.entries()); }

}  // namespace decoherence
