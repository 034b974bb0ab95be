#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "dvz/errors.hpp"

namespace dvz {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// A reproducible random stream identified by (master_seed, stream_id).
// Identical identifiers give bit-identical sequences; distinct stream ids are
// seeded through seed_seq and behave as independent streams. A stream is
// single-consumer.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t master_seed, std::uint64_t stream_id = 0);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream determined only by (master_seed, stream_id, index), not by
  // how much of this stream has been consumed.
  RandomSource substream(std::uint64_t index) const;

  // Child stream keyed by the next draw of this stream. Used by routines that
  // fan work out over numbered chunks.
  RandomSource fork();

  std::mt19937_64& engine() { return engine_; }

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  int sign() { return (engine_() >> 63) ? 1 : -1; }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Deterministic 64-bit mixing (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);
// FNV-1a over a string, mixed; used to derive stream ids from grid points.
std::uint64_t hash_stream_id(const std::string& key);

// An n x k matrix with orthonormal columns spanning a k-dimensional subspace.
// A frame with k = n is an orthogonal transformation.
template <typename Scalar = double>
class OrthoFrame {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  // The line spanned by e_1 in R^1; placeholder for members assigned later.
  OrthoFrame() : q_(Matrix::Identity(1, 1)) {}

  // Validates orthonormality; throws InputError if the Gram matrix deviates
  // from the identity by more than tol (about 1.5e-10 for double, 3.5e-6 for float).
  explicit OrthoFrame(Matrix columns, Scalar tol = default_tolerance()) : q_(std::move(columns)) {
    if (q_.cols() < 1 || q_.cols() > q_.rows())
      throw InputError("OrthoFrame: need 1 <= k <= n (n=" + std::to_string(q_.rows()) +
                       ", k=" + std::to_string(q_.cols()) + ")");
    if (gram_error() > tol) throw InputError("OrthoFrame: columns are not orthonormal");
  }

  // Orthonormalizes the columns of a full-rank block with Householder QR,
  // fixing signs so that the triangular factor has a nonnegative diagonal.
  static OrthoFrame orthonormalize(const Matrix& block) {
    const Index n = block.rows();
    const Index k = block.cols();
    if (k < 1 || k > n) throw InputError("OrthoFrame::orthonormalize: need 1 <= k <= n");
    Eigen::HouseholderQR<Matrix> qr(block);
    Matrix q = qr.householderQ() * Matrix::Identity(n, k);
    const Matrix& r = qr.matrixQR();
    for (Index j = 0; j < k; ++j)
      if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
    return OrthoFrame(std::move(q));
  }

  // span(e_i : i in indices) in R^n.
  static OrthoFrame coordinate(Index n, const std::vector<Index>& indices) {
    Matrix q = Matrix::Zero(n, static_cast<Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) q(indices[j], static_cast<Index>(j)) = Scalar(1);
    return OrthoFrame(std::move(q));
  }

  static Scalar default_tolerance() { return std::sqrt(std::numeric_limits<Scalar>::epsilon()) * Scalar(1e-2); }

  Index ambient_dim() const { return q_.rows(); }
  Index dim() const { return q_.cols(); }
  const Matrix& columns() const { return q_; }

  Scalar gram_error() const {
    return (q_.transpose() * q_ - Matrix::Identity(q_.cols(), q_.cols())).cwiseAbs().maxCoeff();
  }

  // Maps section coordinates (a point of R^k) into the ambient space.
  template <typename Derived>
  Vector embed(const Eigen::MatrixBase<Derived>& coeffs) const {
    return q_ * coeffs;
  }

 private:
  Matrix q_;
};

using Frame = OrthoFrame<double>;

template <typename Scalar = double>
VectorX<Scalar> sample_gaussian_vector(Index n, RandomSource& rng) {
  if (n < 1) throw InputError("sample_gaussian_vector: n must be positive");
  VectorX<Scalar> g(n);
  for (Index i = 0; i < n; ++i) g[i] = Scalar(rng.normal());
  return g;
}

// Uniform point on S^{n-1}: a normalized Gaussian vector.
template <typename Scalar = double>
VectorX<Scalar> sample_sphere(Index n, RandomSource& rng) {
  for (;;) {
    VectorX<Scalar> g = sample_gaussian_vector<Scalar>(n, rng);
    const Scalar r = g.norm();
    if (r > Scalar(0)) return g / r;
  }
}

template <typename Scalar = double>
MatrixX<Scalar> sample_gaussian_matrix(Index rows, Index cols, RandomSource& rng) {
  MatrixX<Scalar> g(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = Scalar(rng.normal());
  return g;
}

// Uniformly distributed k-dimensional subspace of R^n: the orthonormalized
// n x k Gaussian block, equal in law to U V0 for Haar U and fixed V0.
template <typename Scalar = double>
OrthoFrame<Scalar> sample_subspace(Index n, Index k, RandomSource& rng) {
  if (n < 1 || k < 1) throw InputError("sample_subspace: n and k must be positive");
  if (k > n) throw InputError("sample_subspace: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  return OrthoFrame<Scalar>::orthonormalize(sample_gaussian_matrix<Scalar>(n, k, rng));
}

// Haar-distributed element of O(n).
template <typename Scalar = double>
OrthoFrame<Scalar> sample_orthogonal(Index n, RandomSource& rng) {
  return sample_subspace<Scalar>(n, n, rng);
}

// m i.i.d. uniform signs.
template <typename Scalar = double>
VectorX<Scalar> sample_signs(Index m, RandomSource& rng) {
  if (m < 1) throw InputError("sample_signs: m must be positive");
  VectorX<Scalar> s(m);
  for (Index i = 0; i < m; ++i) s[i] = Scalar(rng.sign());
  return s;
}

}  // namespace dvz
