#include "evqr/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "evqr/rng.hpp"

namespace evqr {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_symmetric(const Mat& A, const char* name) {
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument(std::string("gaussian: ") + name +
                                " is not symmetric");
}

Mat full_covariance(const GaussianModel& model) {
  const Index dx = model.Sigma_XX.rows(), dy = model.Sigma_YY.rows();
  Mat S(dx + dy, dx + dy);
  S.topLeftCorner(dx, dx) = model.Sigma_XX;
  S.topRightCorner(dx, dy) = model.Sigma_XY;
  S.bottomLeftCorner(dy, dx) = model.Sigma_XY.transpose();
  S.bottomRightCorner(dy, dy) = model.Sigma_YY;
  return S;
}

Mat schur_complement(const GaussianModel& model) {
  Eigen::LLT<Mat> llt(model.Sigma_XX);
  require(llt.info() == Eigen::Success,
          "gaussian: Sigma_XX is not positive definite");
  const Mat W = llt.solve(model.Sigma_XY);
  Mat S = model.Sigma_YY - model.Sigma_XY.transpose() * W;
  S = ((S + S.transpose()) / 2.0).eval();
  return S;
}

}  // namespace

void validate(const GaussianModel& model) {
  const Index dx = model.Sigma_XX.rows(), dy = model.Sigma_YY.rows();
  require(dx > 0 && dy > 0, "gaussian: empty dimensions");
  require(model.Sigma_XX.cols() == dx, "gaussian: Sigma_XX is not square");
  require(model.Sigma_YY.cols() == dy, "gaussian: Sigma_YY is not square");
  require(model.Sigma_XY.rows() == dx && model.Sigma_XY.cols() == dy,
          "gaussian: Sigma_XY has wrong shape");
  require(model.m_Y.size() == dy, "gaussian: m_Y has wrong size");
  require(std::isfinite(model.epsilon) && model.epsilon > 0.0,
          "gaussian: epsilon must be positive");
  require(model.m_Y.allFinite() && model.Sigma_XX.allFinite() &&
              model.Sigma_XY.allFinite() && model.Sigma_YY.allFinite(),
          "gaussian: non-finite model entries");
  check_symmetric(model.Sigma_XX, "Sigma_XX");
  check_symmetric(model.Sigma_YY, "Sigma_YY");

  Eigen::LLT<Mat> full(full_covariance(model));
  require(full.info() == Eigen::Success,
          "gaussian: joint covariance is not positive definite");

  Eigen::SelfAdjointEigenSolver<Mat> es(schur_complement(model));
  require(es.eigenvalues().minCoeff() > 0.0,
          "gaussian: Schur complement is not positive definite");
}

double gaussian_dual_value(const GaussianModel& model) {
  validate(model);
  const double eps = model.epsilon;
  const Index dy = model.Sigma_YY.rows();

  Eigen::SelfAdjointEigenSolver<Mat> es(schur_complement(model));
  const Vec d = es.eigenvalues();

  double tr_lambda = 0.0, logdet = 0.0;
  for (Index k = 0; k < dy; ++k) {
    const double lam = std::sqrt(d(k) + eps * eps / 4.0) - eps / 2.0;
    tr_lambda += lam;
    logdet += std::log(eps * lam / d(k));
  }
  return dy / 2.0 - tr_lambda + model.Sigma_YY.trace() / 2.0 +
         model.m_Y.squaredNorm() / 2.0 - eps / 2.0 * logdet;
}

DiscreteProblem sample_gaussian_problem(const GaussianModel& model, Index m,
                                        Index n, std::uint64_t seed) {
  validate(model);
  require(m > 0 && n > 0, "gaussian: need m > 0 and n > 0");
  const Index dx = model.Sigma_XX.rows(), dy = model.Sigma_YY.rows();

  Eigen::LLT<Mat> llt(full_covariance(model));
  require(llt.info() == Eigen::Success,
          "gaussian: joint covariance is not positive definite");
  const Mat L = llt.matrixL();

  Rng rng(seed);

  // Reference atoms first, then joint atoms; each row coordinate by
  // coordinate. Changing this order changes every sampled problem.
  Mat U(m, dy);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < dy; ++k) U(i, k) = rng.normal();

  Mat X(n, dx), Y(n, dy);
  Vec z(dx + dy);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < dx + dy; ++k) z(k) = rng.normal();
    const Vec w = L * z;
    X.row(j) = w.head(dx).transpose();
    Y.row(j) = (model.m_Y + w.tail(dy)).transpose();
  }

  const Vec a = Vec::Constant(m, 1.0 / static_cast<double>(m));
  const Vec b = Vec::Constant(n, 1.0 / static_cast<double>(n));
  return make_problem(U, a, X, Y, b, model.epsilon);
}

}  // namespace evqr
