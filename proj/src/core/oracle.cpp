#include "oracle.hpp"

#include "model.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bridge {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Per alpha-node constants of the lambda-integrated prior mixture:
//   c(a) * 0.5 * sum_j f_j^{e_j}/Gamma(e_j) * Gamma(e_j+1/a) * (|b|^a/2+f_j)^{-(e_j+1/a)}
// with c(a) = a / (2^{1/a+1} Gamma(1/a)).
struct AlphaNode {
  double alpha;
  double weight;  // GL weight mapped to [k1,k2], includes 1/(k2-k1)
  double log_c1;  // log of c(a) * 0.5 * f1^e1/G(e1) * G(e1+1/a)
  double log_c2;
  double expo1;   // e1 + 1/a
  double expo2;
};

struct MixturePrior {
  OneDimModel m;
  std::vector<AlphaNode> nodes;

  explicit MixturePrior(const OneDimModel& model) : m(model) {
    m.validate();
    const auto& rule = gauss_legendre(m.alpha_nodes);
    const double half = 0.5 * (m.k2 - m.k1);
    const double mid = 0.5 * (m.k2 + m.k1);
    nodes.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      AlphaNode nd;
      nd.alpha = mid + half * rule.nodes[i];
      nd.weight = rule.weights[i] * half / (m.k2 - m.k1);
      const double inv_a = 1.0 / nd.alpha;
      const double log_c = std::log(nd.alpha) - (inv_a + 1.0) * std::log(2.0) - std::lgamma(inv_a);
      nd.log_c1 = log_c + std::log(0.5) + m.e1 * std::log(m.f1) - std::lgamma(m.e1) +
                  std::lgamma(m.e1 + inv_a);
      nd.log_c2 = log_c + std::log(0.5) + m.e2 * std::log(m.f2) - std::lgamma(m.e2) +
                  std::lgamma(m.e2 + inv_a);
      nd.expo1 = m.e1 + inv_a;
      nd.expo2 = m.e2 + inv_a;
      nodes.push_back(nd);
    }
  }

  // Prior marginal density of beta.
  double density(double beta) const {
    const double ab = std::fabs(beta);
    const double log_ab = ab > 0.0 ? std::log(ab) : 0.0;
    double acc = 0.0;
    for (const auto& nd : nodes) {
      const double pow_ab = ab > 0.0 ? std::exp(nd.alpha * log_ab) : 0.0;
      const double t1 = std::exp(nd.log_c1 - nd.expo1 * std::log(0.5 * pow_ab + m.f1));
      const double t2 = std::exp(nd.log_c2 - nd.expo2 * std::log(0.5 * pow_ab + m.f2));
      acc += nd.weight * (t1 + t2);
    }
    return acc;
  }
};

double integrate_marginal(const MixturePrior& prior, double y, bool weight_by_beta) {
  auto integrand = [&](double b) {
    const double t = b - y;
    const double val = kInvSqrt2Pi * std::exp(-0.5 * t * t) * prior.density(b);
    return weight_by_beta ? b * val : val;
  };
  // The integrand peaks near 0 (prior) and near y (likelihood); integrate on
  // segments split at both points, Gaussian tails truncated at 10 sd.
  const double lo = std::min(0.0, y) - 10.0;
  const double hi = std::max(0.0, y) + 10.0;
  std::vector<double> cuts = {lo, hi};
  if (0.0 > lo && 0.0 < hi) cuts.push_back(0.0);
  if (y > lo && y < hi) cuts.push_back(y);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-14) continue;
    auto r = integrate_adaptive(integrand, cuts[i], cuts[i + 1], 1e-10, 1e-300);
    if (!r.converged)
      throw RuntimeFailure("oracle: quadrature failed to converge on [" +
                           std::to_string(cuts[i]) + "," + std::to_string(cuts[i + 1]) + "]");
    total += r.value;
  }
  return total;
}

}  // namespace

double prior_marginal_1d(double beta, const OneDimModel& m) {
  return MixturePrior(m).density(beta);
}

double marginal_m(double y, const OneDimModel& m) {
  if (!std::isfinite(y)) throw ValidationError("marginal_m: y must be finite");
  return integrate_marginal(MixturePrior(m), y, false);
}

double dlog_marginal_m(double y, const OneDimModel& m) {
  MixturePrior prior(m);
  auto logm = [&](double z) { return std::log(integrate_marginal(prior, z, false)); };
  const double h = std::max(1e-4, 1e-6 * std::fabs(y));
  auto central = [&](double step) { return (logm(y + step) - logm(y - step)) / (2.0 * step); };
  const double d_h = central(h);
  const double d_h2 = central(0.5 * h);
  return (4.0 * d_h2 - d_h) / 3.0;  // Richardson
}

double posterior_mean_1d(double y, const OneDimModel& m) {
  if (!std::isfinite(y)) throw ValidationError("posterior_mean_1d: y must be finite");
  return y + dlog_marginal_m(y, m);
}

double posterior_mean_1d_quad(double y, const OneDimModel& m) {
  MixturePrior prior(m);
  const double num = integrate_marginal(prior, y, true);
  const double den = integrate_marginal(prior, y, false);
  return num / den;
}

RidgePosterior ridge_posterior(const Dataset& d, const Vector& lambda, double gamma) {
  d.validate();
  if (gamma <= 0.0) throw ValidationError("ridge_posterior: gamma must be > 0");
  if (lambda.size() != d.p()) throw ValidationError("ridge_posterior: lambda dimension mismatch");
  Matrix A = d.X.transpose() * d.X;
  A.diagonal() += lambda;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw RuntimeFailure("ridge_posterior: X'X + diag(lambda) is not positive definite");
  RidgePosterior out;
  out.mean = llt.solve(d.X.transpose() * d.y);
  out.cov = llt.solve(Matrix::Identity(d.p(), d.p())) / gamma;
  return out;
}

double GridPosterior::mean(std::size_t axis) const {
  double acc = 0.0;
  if (axes.size() == 1) {
    for (std::size_t i = 0; i < probs.size(); ++i) acc += node_values[0][i] * probs[i];
    return acc;
  }
  const std::size_t n1 = node_values[1].size();
  for (std::size_t i = 0; i < node_values[0].size(); ++i)
    for (std::size_t j = 0; j < n1; ++j)
      acc += probs[i * n1 + j] * (axis == 0 ? node_values[0][i] : node_values[1][j]);
  return acc;
}

GridPosterior grid_posterior(const Dataset& d, const ChainState& fixed, const Hyperparams& h,
                             const std::vector<GridAxis>& axes) {
  if (axes.empty() || axes.size() > 2)
    throw ValidationError("grid_posterior: need 1 or 2 free coordinates");
  GridPosterior out;
  out.axes = axes;
  for (const auto& ax : axes) {
    if (ax.nodes < 1 || !(ax.lo <= ax.hi)) throw ValidationError("grid_posterior: bad axis");
    std::vector<double> vals(ax.nodes);
    for (int i = 0; i < ax.nodes; ++i)
      vals[i] = ax.nodes == 1 ? ax.lo : ax.lo + (ax.hi - ax.lo) * i / (ax.nodes - 1);
    out.node_values.push_back(std::move(vals));
  }

  ChainState s = fixed;
  auto apply = [&](const FreeCoord& c, double v) {
    if (std::holds_alternative<FreeBeta>(c))
      s.beta[std::get<FreeBeta>(c).index] = v;
    else
      s.alpha = v;
  };

  const std::size_t n0 = out.node_values[0].size();
  const std::size_t n1 = axes.size() == 2 ? out.node_values[1].size() : 1;
  std::vector<double> logp(n0 * n1);
  double max_lp = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n0; ++i) {
    apply(axes[0].coord, out.node_values[0][i]);
    for (std::size_t j = 0; j < n1; ++j) {
      if (axes.size() == 2) apply(axes[1].coord, out.node_values[1][j]);
      const double lp = log_posterior(s, d, h);
      logp[i * n1 + j] = lp;
      max_lp = std::max(max_lp, lp);
    }
  }
  double z = 0.0;
  for (double lp : logp) z += std::exp(lp - max_lp);
  out.probs.resize(logp.size());
  for (std::size_t i = 0; i < logp.size(); ++i) out.probs[i] = std::exp(logp[i] - max_lp) / z;

  // Boundary mass check: a beta grid must cover essentially all mass.
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (!std::holds_alternative<FreeBeta>(axes[a].coord)) continue;
    const std::size_t count = out.node_values[a].size();
    if (count < 3) continue;
    double edge = 0.0;
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j) {
        const std::size_t idx = a == 0 ? i : j;
        if (idx == 0 || idx == (a == 0 ? n0 : n1) - 1) edge += out.probs[i * n1 + j];
      }
    if (edge > 1e-8)
      throw RuntimeFailure("grid_posterior: boundary mass " + std::to_string(edge) +
                           " exceeds 1e-8; widen the grid");
  }
  return out;
}

}  // namespace bridge
