#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace bilat {

using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Real matrix-valued function of time. An empty function means the zero matrix.
using MatrixFunction = std::function<RMatrix(double)>;

/// Ordered eigen-structure of a real matrix with simple spectrum.
///
/// Eigenvalues are sorted by real part, largest first, so alphas.front() is the
/// rate of the upper bound equation and alphas.back() the rate of the lower
/// one. Within equal real parts complex-conjugate pairs come before real
/// eigenvalues, pairs are ordered by decreasing |beta|, and each pair is stored
/// as (alpha + i|beta|, alpha - i|beta|) in adjacent slots.
///
/// Columns of V have unit Euclidean norm; the first entry of largest modulus
/// in each column is real and positive.
struct EigenDecomposition {
  std::size_t n = 0;
  std::vector<double> alphas;
  std::vector<double> betas;
  CMatrix V;
  CMatrix V_inv;
  double norm_V = 0.0;
  double norm_V_inv = 0.0;
  std::size_t n1 = 0;  // number of complex-conjugate pairs

  [[nodiscard]] double alpha_max() const { return alphas.front(); }
  [[nodiscard]] double alpha_min() const { return alphas.back(); }
  [[nodiscard]] double condition_number() const { return norm_V * norm_V_inv; }
  [[nodiscard]] CVector eigenvalues() const;
  /// V diag(alpha + i beta) V^-1
  [[nodiscard]] CMatrix reconstruct() const;
};

/// Tolerances used when classifying and separating eigenvalues.
struct SpectralTolerances {
  double realness = 1e-9;     // |Im| < realness * (1 + |lambda|) is treated as real
  double separation = 1e-7;   // eigenvalues closer than separation * |A| coincide
  double max_condition = 1e12;
};

[[nodiscard]] EigenDecomposition eigendecompose(const RMatrix& A_star,
                                                const SpectralTolerances& tol = {});

/// Induced Euclidean norm (largest singular value).
[[nodiscard]] double spectral_norm(const CMatrix& M);
[[nodiscard]] double spectral_norm(const RMatrix& M);

/// Evaluates G(t) = V^-1 G*(t) V and its split g = G - i Im(diag G).
class OffsetSplit {
 public:
  OffsetSplit() = default;
  OffsetSplit(MatrixFunction G_star, const EigenDecomposition& decomp);

  [[nodiscard]] CMatrix G(double t) const;
  [[nodiscard]] CMatrix g(double t) const;
  [[nodiscard]] double g_norm(double t) const;
  /// Imaginary part of diag G(t), the rotation absorbed into the fundamental matrix.
  [[nodiscard]] RVector D(double t) const;
  [[nodiscard]] bool is_zero() const { return !G_star_; }
  [[nodiscard]] std::size_t order() const { return static_cast<std::size_t>(V_.rows()); }

 private:
  MatrixFunction G_star_;
  CMatrix V_;
  CMatrix V_inv_;
};

[[nodiscard]] OffsetSplit offset_split(MatrixFunction G_star, const EigenDecomposition& decomp);

/// Finite-horizon mean (1/T_avg) * integral of B over [t0, t0 + T_avg],
/// composite Simpson rule on `panels` panels (at least 1000).
[[nodiscard]] RMatrix estimate_A_star(const MatrixFunction& B, double t0, double T_avg,
                                      std::size_t panels = 2000);

}  // namespace bilat
