#include "fdlsm/regression.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include "fdlsm/errors.hpp"

namespace fdlsm {

namespace {

// Monomial exponents (m, n) of total degree in [lo, hi], ordered by degree.
std::vector<std::pair<int, int>> pair_exponents(int lo, int hi) {
  std::vector<std::pair<int, int>> e;
  for (int deg = lo; deg <= hi; ++deg)
    for (int n = 0; n <= deg; ++n) e.emplace_back(deg - n, n);
  return e;
}

void column_moments(std::span<const double> v, double& mean, double& scale) {
  const double n = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  scale = sd > 0.0 ? sd : 1.0;
}

}  // namespace

const char* scheme_name(Scheme scheme) { return scheme == Scheme::LSM ? "LSM" : "FD-LSM"; }

void BasisSet::validate() const {
  if (descriptor == StateDescriptor::Single) {
    if (cutoff < 1 || cutoff > 24) throw ConfigError("basis: cutoff R must lie in [1, 24]");
  } else if (cutoff < 1 || cutoff > 6) {
    throw ConfigError("basis: Heston degree must lie in [1, 6]");
  }
}

std::size_t BasisSet::size() const {
  if (descriptor == StateDescriptor::Single) {
    const auto r = static_cast<std::size_t>(cutoff);
    return scheme == Scheme::LSM ? r : std::max<std::size_t>(2, r);
  }
  const auto d = static_cast<std::size_t>(cutoff);
  const std::size_t full = (d + 1) * (d + 2) / 2;
  return scheme == Scheme::LSM ? full : full + 1;
}

std::vector<std::string> BasisSet::labels() const {
  std::vector<std::string> out;
  if (descriptor == StateDescriptor::Single) {
    if (scheme == Scheme::LSM) {
      for (int j = 0; j < cutoff; ++j) out.push_back(j == 0 ? "1" : "x^" + std::to_string(j));
    } else {
      out = {"1", "f"};
      for (int j = 1; j <= cutoff - 2; ++j) out.push_back("x^" + std::to_string(j));
    }
    return out;
  }
  if (scheme == Scheme::FDLSM) out = {"1", "f"};
  for (auto [m, n] : pair_exponents(scheme == Scheme::LSM ? 0 : 1, cutoff))
    out.push_back("S^" + std::to_string(m) + "nu^" + std::to_string(n));
  return out;
}

void basis_row(const BasisSet& basis, const Standardization& st, double x, double nu, double ansatz,
               std::span<double> row) {
  const double xs = (x - st.x_mean) / st.x_scale;
  std::size_t c = 0;
  if (basis.descriptor == StateDescriptor::Single) {
    if (basis.scheme == Scheme::LSM) {
      double p = 1.0;
      for (int j = 0; j < basis.cutoff; ++j, p *= xs) row[c++] = p;
    } else {
      row[c++] = 1.0;
      row[c++] = ansatz - st.ansatz_mean;
      double p = xs;
      for (int j = 1; j <= basis.cutoff - 2; ++j, p *= xs) row[c++] = p;
    }
    return;
  }
  const double vs = (nu - st.nu_mean) / st.nu_scale;
  double xp[8], vp[8];
  xp[0] = vp[0] = 1.0;
  for (int j = 1; j <= basis.cutoff && j < 8; ++j) {
    xp[j] = xp[j - 1] * xs;
    vp[j] = vp[j - 1] * vs;
  }
  if (basis.scheme == Scheme::FDLSM) {
    row[c++] = 1.0;
    row[c++] = ansatz - st.ansatz_mean;
  }
  for (int deg = basis.scheme == Scheme::LSM ? 0 : 1; deg <= basis.cutoff; ++deg)
    for (int n = 0; n <= deg; ++n) row[c++] = xp[deg - n] * vp[n];
}

Eigen::MatrixXd design_matrix(const BasisSet& basis, const Standardization& st, const RegressionData& data) {
  const std::size_t n = data.size(), p = basis.size();
  Eigen::MatrixXd X(n, p);
  std::vector<double> row(p);
  for (std::size_t i = 0; i < n; ++i) {
    basis_row(basis, st, data.x[i], data.nu.empty() ? 0.0 : data.nu[i],
              data.ansatz.empty() ? 0.0 : data.ansatz[i], row);
    for (std::size_t c = 0; c < p; ++c) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
  }
  return X;
}

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                                         double threshold) {
  const Eigen::Index n = design.rows(), p = design.cols();
  if (targets.size() != n) throw ConfigError("least squares: target count does not match the design");
  if (n <= p) throw ConfigError("least squares: need more samples than basis functions");

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd qty = (qr.householderQ().transpose() * targets).head(p);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(threshold);

  LeastSquaresSolution out;
  out.beta = svd.solve(qty);
  out.rank = static_cast<std::size_t>(svd.rank());
  const Eigen::VectorXd resid = targets - design * out.beta;
  out.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  return out;
}

RegressionFit fit(const BasisSet& basis, const RegressionData& data, std::span<const double> targets,
                  std::size_t date) {
  basis.validate();
  const std::size_t n = data.size();
  if (targets.size() != n) throw ConfigError("regression: target count does not match the state count");
  if (n <= basis.size()) throw ConfigError("regression: N_R must exceed the number of basis functions");
  if (basis.descriptor == StateDescriptor::HestonPair && data.nu.size() != n)
    throw ConfigError("regression: Heston basis needs the variance column");
  if (basis.scheme == Scheme::FDLSM && data.ansatz.size() != n)
    throw ConfigError("regression: FD-LSM basis needs the ansatz column");
  for (double y : targets)
    if (!std::isfinite(y)) throw NumericalError("regression: non-finite target");

  RegressionFit out;
  out.date = date;
  Standardization& st = out.standardization;
  column_moments(data.x, st.x_mean, st.x_scale);
  if (basis.descriptor == StateDescriptor::HestonPair) column_moments(data.nu, st.nu_mean, st.nu_scale);
  if (basis.scheme == Scheme::FDLSM) {
    double unused;
    column_moments(data.ansatz, st.ansatz_mean, unused);
  }

  const Eigen::MatrixXd X = design_matrix(basis, st, data);
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(n));
  const LeastSquaresSolution ls = solve_least_squares(X, y);
  out.beta.assign(ls.beta.data(), ls.beta.data() + ls.beta.size());
  out.rank = ls.rank;
  out.residual_rms = ls.residual_rms;
  out.rank_deficient = ls.rank < basis.size();
  return out;
}

double predict(const RegressionFit& f, const BasisSet& basis, double x, double nu, double ansatz) {
  double row[32];
  const std::size_t p = basis.size();
  basis_row(basis, f.standardization, x, nu, ansatz, std::span<double>(row, p));
  double v = 0.0;
  for (std::size_t c = 0; c < p; ++c) v += f.beta[c] * row[c];
  return v;
}

void write_coefficients_csv(const BasisSet& basis, std::span<const RegressionFit> fits, std::ostream& out) {
  const auto labels = basis.labels();
  out << "date,label,beta\n";
  out.precision(15);
  for (const auto& f : fits)
    for (std::size_t c = 0; c < f.beta.size(); ++c) out << f.date << ',' << labels[c] << ',' << f.beta[c] << '\n';
}

}  // namespace fdlsm
