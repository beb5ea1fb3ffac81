#include "bayrn/gp.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "bayrn/errors.hpp"

namespace bayrn {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double matern52_scaled(double d) {
  return (1.0 + kSqrt5 * d + 5.0 * d * d / 3.0) * std::exp(-kSqrt5 * d);
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const GpHyperparams& hyp) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  const Eigen::RowVectorXd inv_ls = hyp.lengthscales.cwiseInverse().transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = hyp.signal_var;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = (X.row(i) - X.row(j)).cwiseProduct(inv_ls).norm();
      K(i, j) = K(j, i) = hyp.signal_var * matern52_scaled(d);
    }
  }
  return K;
}

// Cholesky of K + (noise + jitter) I with escalating jitter. Returns false
// when even the largest jitter fails.
bool factorize(const Eigen::MatrixXd& K, double noise_var, const GpFitOptions& opts,
               Eigen::LLT<Eigen::MatrixXd>& chol, double& jitter) {
  const Eigen::Index n = K.rows();
  for (jitter = opts.jitter_start; jitter <= opts.jitter_max * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += noise_var + jitter;
    chol.compute(A);
    if (chol.info() == Eigen::Success) {
      const auto& L = chol.matrixLLT();
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) ok = false;
      }
      if (ok) return true;
    }
  }
  return false;
}

double lml_from(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::VectorXd& y,
                Eigen::VectorXd& alpha) {
  alpha = chol.solve(y);
  const auto& L = chol.matrixLLT();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_det_half += std::log(L(i, i));
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(alpha) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n == 1) {
    out.push_back(std::sqrt(lo * hi));
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  return out;
}

// Golden-section maximization of f over [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  std::size_t iterations) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (std::size_t it = 0; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

void GpHyperparams::validate() const {
  if (!(signal_var > 0.0) || !(noise_var > 0.0)) {
    throw Error("gp: signal and noise variance must be positive");
  }
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0)) throw Error("gp: lengthscales must be positive");
  }
}

double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const GpHyperparams& hyp) {
  if (x.size() != y.size() || x.size() != hyp.lengthscales.size()) {
    throw DimensionMismatch("matern52 inputs", static_cast<std::size_t>(hyp.lengthscales.size()),
                            static_cast<std::size_t>(x.size() != hyp.lengthscales.size() ? x.size() : y.size()));
  }
  const double d = (x - y).cwiseQuotient(hyp.lengthscales).norm();
  return hyp.signal_var * matern52_scaled(d);
}

// ---------------------------------------------------------------------------

void BoDataset::add(const Eigen::VectorXd& phi, double target) {
  if (!box_.contains(phi)) throw OutOfBox("dataset row outside the search box");
  if (!std::isfinite(target)) throw Error("dataset target must be finite");
  inputs_.push_back(phi);
  targets_.push_back(target);
}

Eigen::MatrixXd BoDataset::normalized_inputs() const {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(inputs_.size()), box_.dim());
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = normalize_phi(box_, inputs_[i]).transpose();
  }
  return X;
}

BoDataset::Standardization BoDataset::standardization() const {
  const std::size_t n = targets_.size();
  if (n < 2) return {};
  double mean = 0.0;
  for (double t : targets_) mean += t;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double t : targets_) ss += (t - mean) * (t - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, std::max(sd, 1e-8)};
}

// ---------------------------------------------------------------------------

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const GpHyperparams& hyp, const GpFitOptions& opts) {
  Eigen::LLT<Eigen::MatrixXd> chol;
  double jitter = 0.0;
  if (!factorize(gram(X, hyp), hyp.noise_var, opts, chol, jitter)) return kNegInf;
  Eigen::VectorXd alpha;
  const double lml = lml_from(chol, y, alpha);
  return std::isfinite(lml) ? lml : kNegInf;
}

GpModel GpModel::condition(const BoDataset& data, const GpHyperparams& hyp,
                           const GpFitOptions& opts) {
  if (data.size() < 1) throw Error("gp: cannot condition on an empty dataset");
  hyp.validate();
  if (hyp.lengthscales.size() != data.box().dim()) {
    throw DimensionMismatch("gp lengthscales", static_cast<std::size_t>(data.box().dim()),
                            static_cast<std::size_t>(hyp.lengthscales.size()));
  }
  GpModel m;
  m.box_ = data.box();
  m.hyp_ = hyp;
  m.std_ = data.standardization();
  m.X_ = data.normalized_inputs();
  m.y_.resize(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    m.y_[static_cast<Eigen::Index>(i)] = (data.targets()[i] - m.std_.mean) / m.std_.scale;
  }
  if (!factorize(gram(m.X_, hyp), hyp.noise_var, opts, m.chol_, m.jitter_)) {
    throw IllConditioned("kernel matrix not positive definite at jitter " +
                         std::to_string(opts.jitter_max));
  }
  m.lml_ = lml_from(m.chol_, m.y_, m.alpha_);
  return m;
}

GpModel GpModel::fit(const BoDataset& data, const GpFitOptions& opts) {
  if (data.size() < 2) throw Error("gp fit needs at least 2 observations");
  const Eigen::MatrixXd X = data.normalized_inputs();
  const auto st = data.standardization();
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = (data.targets()[i] - st.mean) / st.scale;
  }

  const Box& box = data.box();
  std::vector<Eigen::Index> free_dims;
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    if (!box.is_degenerate(i)) free_dims.push_back(i);
  }

  // z = [log sf2, log l_f (free dims), log sn2]
  const std::size_t nz = free_dims.size() + 2;
  std::vector<double> z_lo(nz), z_hi(nz);
  z_lo[0] = std::log(opts.signal_var_min);
  z_hi[0] = std::log(opts.signal_var_max);
  for (std::size_t k = 0; k < free_dims.size(); ++k) {
    z_lo[k + 1] = std::log(opts.lengthscale_min);
    z_hi[k + 1] = std::log(opts.lengthscale_max);
  }
  z_lo[nz - 1] = std::log(opts.noise_var_min);
  z_hi[nz - 1] = std::log(opts.noise_var_max);

  const auto to_hyp = [&](const std::vector<double>& z) {
    GpHyperparams h;
    h.signal_var = std::exp(z[0]);
    h.lengthscales = Eigen::VectorXd::Ones(box.dim());
    for (std::size_t k = 0; k < free_dims.size(); ++k) h.lengthscales[free_dims[k]] = std::exp(z[k + 1]);
    h.noise_var = std::exp(z[nz - 1]);
    return h;
  };
  const auto objective = [&](const std::vector<double>& z) {
    return bayrn::log_marginal_likelihood(X, y, to_hyp(z), opts);
  };

  std::vector<double> best_z(nz);
  double best = kNegInf;
  for (double sf : logspace(opts.signal_var_min, opts.signal_var_max, opts.grid_signal)) {
    for (double ls : logspace(opts.lengthscale_min, opts.lengthscale_max, opts.grid_lengthscale)) {
      for (double sn : logspace(opts.noise_var_min, opts.noise_var_max, opts.grid_noise)) {
        std::vector<double> z(nz, std::log(ls));
        z[0] = std::log(sf);
        z[nz - 1] = std::log(sn);
        const double v = objective(z);
        if (v > best) {
          best = v;
          best_z = z;
        }
      }
    }
  }
  if (!std::isfinite(best)) throw IllConditioned("no hyperparameter grid point could be factorized");

  for (std::size_t sweep = 0; sweep < opts.refine_sweeps; ++sweep) {
    for (std::size_t j = 0; j < nz; ++j) {
      const double lo = std::max(z_lo[j], best_z[j] - 1.5);
      const double hi = std::min(z_hi[j], best_z[j] + 1.5);
      if (!(hi > lo)) continue;
      std::vector<double> z = best_z;
      const double arg = golden_max(
          [&](double v) {
            z[j] = v;
            return objective(z);
          },
          lo, hi, 30);
      z[j] = arg;
      const double v = objective(z);
      if (v > best) {
        best = v;
        best_z = z;
      }
    }
  }
  return condition(data, to_hyp(best_z), opts);
}

GpPrediction GpModel::predict_unit(const Eigen::VectorXd& u) const {
  if (u.size() != X_.cols()) {
    throw DimensionMismatch("gp query", static_cast<std::size_t>(X_.cols()),
                            static_cast<std::size_t>(u.size()));
  }
  const Eigen::Index n = X_.rows();
  Eigen::VectorXd k(n);
  const Eigen::RowVectorXd inv_ls = hyp_.lengthscales.cwiseInverse().transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (X_.row(i) - u.transpose()).cwiseProduct(inv_ls).norm();
    k[i] = hyp_.signal_var * matern52_scaled(d);
  }
  GpPrediction p;
  p.mean = k.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(k);
  p.var = std::max(0.0, hyp_.signal_var - v.squaredNorm());
  return p;
}

GpPrediction GpModel::posterior(const Eigen::VectorXd& phi) const {
  const GpPrediction p = predict_unit(normalize_phi(box_, phi));
  return {p.mean * std_.scale + std_.mean, p.var * std_.scale * std_.scale};
}

}  // namespace bayrn
