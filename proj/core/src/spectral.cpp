#include "bilat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bilat/error.hpp"

namespace bilat {

namespace {

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

struct Mode {
  std::complex<double> lambda;
  CVector vec;
};

// First entry of largest modulus becomes real positive, column norm becomes one.
void normalize_column(CVector& v) {
  v /= v.norm();
  double max_mod = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) max_mod = std::max(max_mod, std::abs(v(i)));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= max_mod * (1.0 - 1e-12)) {
      const std::complex<double> phase = v(i) / std::abs(v(i));
      v *= std::conj(phase);
      v(i) = std::abs(v(i));
      break;
    }
  }
}

}  // namespace

CVector EigenDecomposition::eigenvalues() const {
  CVector lam(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) lam(static_cast<Eigen::Index>(k)) = {alphas[k], betas[k]};
  return lam;
}

CMatrix EigenDecomposition::reconstruct() const {
  return V * eigenvalues().asDiagonal() * V_inv;
}

double spectral_norm(const CMatrix& M) {
  if (!all_finite(M)) throw Error(ErrorKind::NonFinite, "spectral_norm: non-finite matrix entry");
  if (M.size() == 0) return 0.0;
  if (M.cols() == 1) return M.col(0).norm();
  if (M.rows() == 1) return M.row(0).norm();
  // Largest eigenvalue of M^H M; its relative error is O(eps), unlike the small ones.
  const CMatrix gram = M.cols() <= M.rows() ? CMatrix(M.adjoint() * M) : CMatrix(M * M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

double spectral_norm(const RMatrix& M) {
  if (!all_finite(M)) throw Error(ErrorKind::NonFinite, "spectral_norm: non-finite matrix entry");
  if (M.size() == 0) return 0.0;
  if (M.cols() == 1) return M.col(0).norm();
  if (M.rows() == 1) return M.row(0).norm();
  // Largest eigenvalue of M^H M; its relative error is O(eps), unlike the small ones.
  const RMatrix gram = M.cols() <= M.rows() ? RMatrix(M.adjoint() * M) : RMatrix(M * M.adjoint());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

EigenDecomposition eigendecompose(const RMatrix& A_star, const SpectralTolerances& tol) {
  if (A_star.rows() != A_star.cols() || A_star.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "eigendecompose: matrix must be square with n >= 1");
  }
  if (!all_finite(A_star)) throw Error(ErrorKind::NonFinite, "eigendecompose: non-finite entry");

  const auto n = static_cast<std::size_t>(A_star.rows());
  const double a_norm = spectral_norm(A_star);

  Eigen::EigenSolver<RMatrix> solver(A_star, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonSimpleSpectrum, "eigendecompose: eigen solver did not converge");
  }
  const CVector lam = solver.eigenvalues();
  const CMatrix vecs = solver.eigenvectors();

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (std::abs(lam(ii) - lam(jj)) <= tol.separation * a_norm) {
        std::ostringstream os;
        os << "eigenvalues " << lam(ii) << " and " << lam(jj) << " coincide";
        throw Error(ErrorKind::NonSimpleSpectrum, os.str());
      }
    }
  }

  // Real eigenvalues and the positive-imaginary member of every conjugate pair.
  std::vector<Mode> reals;
  std::vector<Mode> pairs;
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const std::complex<double> l = lam(kk);
    if (std::abs(l.imag()) < tol.realness * (1.0 + std::abs(l))) {
      CVector v = vecs.col(kk).real().cast<std::complex<double>>();
      reals.push_back({{l.real(), 0.0}, std::move(v)});
    } else if (l.imag() > 0.0) {
      pairs.push_back({l, vecs.col(kk)});
    }
  }
  if (reals.size() + 2 * pairs.size() != n) {
    throw Error(ErrorKind::NonSimpleSpectrum, "eigendecompose: unpaired complex eigenvalue");
  }

  struct Unit {
    double alpha;
    double beta;  // > 0 for pairs, 0 for reals
    CVector vec;
  };
  std::vector<Unit> units;
  units.reserve(reals.size() + pairs.size());
  for (auto& p : pairs) units.push_back({p.lambda.real(), p.lambda.imag(), std::move(p.vec)});
  for (auto& r : reals) units.push_back({r.lambda.real(), 0.0, std::move(r.vec)});

  const double tie = 1e-12 * (1.0 + a_norm);
  std::stable_sort(units.begin(), units.end(), [tie](const Unit& a, const Unit& b) {
    if (std::abs(a.alpha - b.alpha) > tie) return a.alpha > b.alpha;
    return a.beta > b.beta;
  });

  EigenDecomposition d;
  d.n = n;
  d.V.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (auto& u : units) {
    normalize_column(u.vec);
    if (u.beta > 0.0) {
      d.alphas.push_back(u.alpha);
      d.betas.push_back(u.beta);
      d.V.col(col++) = u.vec;
      d.alphas.push_back(u.alpha);
      d.betas.push_back(-u.beta);
      d.V.col(col++) = u.vec.conjugate();
      ++d.n1;
    } else {
      d.alphas.push_back(u.alpha);
      d.betas.push_back(0.0);
      d.V.col(col++) = u.vec;
    }
  }
  // Ties broken by beta may leave an O(eps) inversion; snap so the ordering is exact.
  for (std::size_t k = 1; k < n; ++k) d.alphas[k] = std::min(d.alphas[k], d.alphas[k - 1]);

  Eigen::FullPivLU<CMatrix> lu(d.V);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::NonSimpleSpectrum, "eigendecompose: eigenvector matrix is singular");
  }
  d.V_inv = lu.inverse();
  d.norm_V = spectral_norm(d.V);
  d.norm_V_inv = spectral_norm(d.V_inv);
  if (!std::isfinite(d.norm_V_inv) || d.norm_V * d.norm_V_inv > tol.max_condition) {
    throw Error(ErrorKind::NonSimpleSpectrum, "eigendecompose: eigenvector matrix is ill-conditioned");
  }
  return d;
}

OffsetSplit::OffsetSplit(MatrixFunction G_star, const EigenDecomposition& decomp)
    : G_star_(std::move(G_star)), V_(decomp.V), V_inv_(decomp.V_inv) {}

CMatrix OffsetSplit::G(double t) const {
  const auto n = V_.rows();
  if (!G_star_) return CMatrix::Zero(n, n);
  const RMatrix Gs = G_star_(t);
  if (!Gs.allFinite()) throw Error(ErrorKind::NonFinite, "offset_split: G*(t) is not finite");
  if (Gs.rows() != n || Gs.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "offset_split: G*(t) has wrong shape");
  }
  return V_inv_ * Gs.cast<std::complex<double>>() * V_;
}

RVector OffsetSplit::D(double t) const {
  return G(t).diagonal().imag();
}

CMatrix OffsetSplit::g(double t) const {
  CMatrix out = G(t);
  for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) = {out(i, i).real(), 0.0};
  return out;
}

double OffsetSplit::g_norm(double t) const {
  if (!G_star_) return 0.0;
  return spectral_norm(g(t));
}

OffsetSplit offset_split(MatrixFunction G_star, const EigenDecomposition& decomp) {
  return OffsetSplit(std::move(G_star), decomp);
}

RMatrix estimate_A_star(const MatrixFunction& B, double t0, double T_avg, std::size_t panels) {
  if (!(T_avg > 0.0) || !std::isfinite(T_avg)) {
    throw Error(ErrorKind::DegenerateWindow, "estimate_A_star: averaging window must be positive");
  }
  if (!B) throw Error(ErrorKind::InvalidParam, "estimate_A_star: empty matrix function");
  panels = std::max<std::size_t>(panels, 1000);
  const std::size_t intervals = 2 * panels;
  const double h = T_avg / static_cast<double>(intervals);

  RMatrix first = B(t0);
  RMatrix acc = first;
  for (std::size_t k = 1; k < intervals; ++k) {
    const RMatrix v = B(t0 + static_cast<double>(k) * h);
    if (!v.allFinite()) throw Error(ErrorKind::NonFinite, "estimate_A_star: B(t) is not finite");
    acc += (k % 2 == 1 ? 4.0 : 2.0) * v;
  }
  acc += B(t0 + T_avg);
  if (!acc.allFinite()) throw Error(ErrorKind::NonFinite, "estimate_A_star: B(t) is not finite");
  return acc * (h / 3.0) / T_avg;
}

}  // namespace bilat
