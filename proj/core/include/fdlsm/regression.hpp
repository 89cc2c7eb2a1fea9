#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdlsm {

enum class Scheme { LSM, FDLSM };

const char* scheme_name(Scheme scheme);

enum class StateDescriptor {
  Single,      ///< one explanatory variable x
  HestonPair,  ///< (S, nu)
};

/// Regressor family. For Single, `cutoff` is R (number of functions):
///   LSM:    {x^j : 0 <= j <= R-1}
///   FD-LSM: {1, f} u {x^j : 1 <= j <= R-2}
/// For HestonPair, `cutoff` is the maximum total degree D:
///   LSM:    {S^m nu^n : m+n <= D}
///   FD-LSM: {1, f} u {S^m nu^n : 1 <= m+n <= D}
struct BasisSet {
  Scheme scheme = Scheme::LSM;
  int cutoff = 4;
  StateDescriptor descriptor = StateDescriptor::Single;

  std::size_t size() const;
  std::vector<std::string> labels() const;
  void validate() const;
};

/// Column views over N regression samples. `nu` is read for HestonPair and
/// `ansatz` for FD-LSM.
struct RegressionData {
  std::span<const double> x;
  std::span<const double> nu;
  std::span<const double> ansatz;

  std::size_t size() const { return x.size(); }
};

/// Affine normalisation learned on the regression sample.
struct Standardization {
  double x_mean = 0.0, x_scale = 1.0;
  double nu_mean = 0.0, nu_scale = 1.0;
  double ansatz_mean = 0.0;
};

struct RegressionFit {
  std::vector<double> beta;
  std::size_t date = 0;
  std::size_t rank = 0;
  double residual_rms = 0.0;
  bool rank_deficient = false;
  Standardization standardization;
};

struct LeastSquaresSolution {
  Eigen::VectorXd beta;
  std::size_t rank = 0;
  double residual_rms = 0.0;
};

/// Minimum-norm least squares via Householder QR followed by an SVD of R;
/// singular values below threshold * max are dropped.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                                         double threshold = 1e-10);

/// Writes phi(x, nu, f) into `row` (size basis.size()).
void basis_row(const BasisSet& basis, const Standardization& st, double x, double nu, double ansatz,
               std::span<double> row);

Eigen::MatrixXd design_matrix(const BasisSet& basis, const Standardization& st, const RegressionData& data);

RegressionFit fit(const BasisSet& basis, const RegressionData& data, std::span<const double> targets,
                  std::size_t date);

double predict(const RegressionFit& fit, const BasisSet& basis, double x, double nu = 0.0,
               double ansatz = 0.0);

/// date,label,beta rows.
void write_coefficients_csv(const BasisSet& basis, std::span<const RegressionFit> fits, std::ostream& out);

}  // namespace fdlsm
