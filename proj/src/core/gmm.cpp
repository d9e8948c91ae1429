#include "core/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/rng.hpp"

namespace tg {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kEmptyComponentFloor = 1e-8;
constexpr int kMaxReinits = 5;

void check_component(const GaussianComponent& c) {
  if (!(c.cov.positive_definite()))
    fail(ErrorCode::InvalidArgument,
         "gaussian component covariance must be positive definite");
  if (!std::isfinite(c.mean.x) || !std::isfinite(c.mean.y))
    fail(ErrorCode::InvalidArgument, "gaussian component mean must be finite");
}

/// Kahan-compensated accumulator; keeps long log-likelihood sums stable.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

SymMat2 global_covariance(std::span<const UvPoint> data, double reg_eps) {
  std::size_t n = data.size();
  double mu = 0.0, mv = 0.0;
  for (const UvPoint& p : data) {
    mu += p.u;
    mv += p.v;
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const UvPoint& p : data) {
    double du = p.u - mu;
    double dv = p.v - mv;
    sxx += du * du;
    sxy += du * dv;
    syy += dv * dv;
  }
  double inv_n = 1.0 / static_cast<double>(n);
  return SymMat2{sxx * inv_n + reg_eps, sxy * inv_n, syy * inv_n + reg_eps};
}

std::size_t count_distinct(std::span<const UvPoint> data) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(data.size());
  for (const UvPoint& p : data) pts.emplace_back(p.u, p.v);
  std::sort(pts.begin(), pts.end());
  return static_cast<std::size_t>(
      std::unique(pts.begin(), pts.end()) - pts.begin());
}

}  // namespace

void GmmModel::validate() const {
  if (components.empty())
    fail(ErrorCode::InvalidArgument, "mixture model has no components");
  double weight_sum = 0.0;
  for (const GaussianComponent& c : components) {
    if (!(c.weight > 0.0) || c.weight > 1.0)
      fail(ErrorCode::InvalidArgument,
           "mixture weights must lie in (0, 1]");
    check_component(c);
    weight_sum += c.weight;
  }
  if (std::fabs(weight_sum - 1.0) > 1e-9)
    fail(ErrorCode::InvalidArgument, "mixture weights must sum to 1");
}

double gaussian_log_pdf(const UvPoint& x, const GaussianComponent& c) {
  check_component(c);
  double det = c.cov.det();
  double inv_xx = c.cov.yy / det;
  double inv_xy = -c.cov.xy / det;
  double inv_yy = c.cov.xx / det;
  double du = x.u - c.mean.x;
  double dv = x.v - c.mean.y;
  double q = inv_xx * du * du + 2.0 * inv_xy * du * dv + inv_yy * dv * dv;
  return -kLog2Pi - 0.5 * std::log(det) - 0.5 * q;
}

double gaussian_pdf(const UvPoint& x, const GaussianComponent& c) {
  return std::exp(gaussian_log_pdf(x, c));
}

namespace detail {

PreparedGmm::PreparedGmm(const GmmModel& model) {
  model.validate();
  comp.reserve(model.components.size());
  for (const GaussianComponent& c : model.components) {
    double det = c.cov.det();
    PreparedComponent p;
    p.log_weight = std::log(c.weight);
    p.mean_u = c.mean.x;
    p.mean_v = c.mean.y;
    p.inv_xx = c.cov.yy / det;
    p.inv_xy = -c.cov.xy / det;
    p.inv_yy = c.cov.xx / det;
    p.log_norm = -kLog2Pi - 0.5 * std::log(det);
    comp.push_back(p);
  }
}

double PreparedGmm::log_density(double u, double v) const {
  double best = -std::numeric_limits<double>::infinity();
  double lk[8];
  double* l = comp.size() <= 8 ? lk : nullptr;
  std::vector<double> heap;
  if (!l) {
    heap.resize(comp.size());
    l = heap.data();
  }
  for (std::size_t k = 0; k < comp.size(); ++k) {
    l[k] = comp[k].log_weight + component_log_pdf(static_cast<int>(k), u, v);
    if (l[k] > best) best = l[k];
  }
  if (!std::isfinite(best)) return best;  // all terms underflowed the floor
  double acc = 0.0;
  for (std::size_t k = 0; k < comp.size(); ++k) acc += std::exp(l[k] - best);
  return best + std::log(acc);
}

}  // namespace detail

double gmm_log_density(const UvPoint& x, const GmmModel& model) {
  detail::PreparedGmm prepared(model);
  return prepared.log_density(x.u, x.v);
}

std::pair<ResponsibilityMatrix, double> e_step(std::span<const UvPoint> data,
                                               const GmmModel& model) {
  if (data.empty()) fail(ErrorCode::DegenerateData, "e_step: no data points");
  detail::PreparedGmm prepared(model);
  int n = static_cast<int>(data.size());
  int K = static_cast<int>(prepared.comp.size());

  ResponsibilityMatrix gamma(n, K);
  KahanSum log_likelihood;
  std::vector<double> logs(K);

  for (int i = 0; i < n; ++i) {
    double u = data[i].u;
    double v = data[i].v;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      logs[k] = prepared.comp[k].log_weight + prepared.component_log_pdf(k, u, v);
      if (logs[k] > best) best = logs[k];
    }
    double* row = &gamma.values[static_cast<std::size_t>(i) * K];
    if (!std::isfinite(best)) {
      // Every component underflowed (unreachable for finite inputs and a
      // valid model, kept as a safeguard): fall back to a uniform row.
      for (int k = 0; k < K; ++k) row[k] = 1.0 / K;
      log_likelihood.add(best);
      continue;
    }
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
      row[k] = std::exp(logs[k] - best);
      acc += row[k];
    }
    double inv = 1.0 / acc;
    for (int k = 0; k < K; ++k) row[k] *= inv;
    log_likelihood.add(best + std::log(acc));
  }
  return {std::move(gamma), log_likelihood.sum};
}

ResponsibilityMatrix responsibilities(std::span<const UvPoint> data,
                                      const GmmModel& model) {
  return e_step(data, model).first;
}

GmmModel m_step(std::span<const UvPoint> data, const ResponsibilityMatrix& gamma,
                double reg_eps) {
  std::size_t n = data.size();
  if (n == 0) fail(ErrorCode::DegenerateData, "m_step: no data points");
  if (gamma.rows != static_cast<int>(n) || gamma.cols < 1)
    fail(ErrorCode::InvalidArgument,
         "m_step: responsibility matrix does not match data");
  int K = gamma.cols;

  GmmModel model;
  model.components.resize(K);
  for (int k = 0; k < K; ++k) {
    double nk = 0.0;
    double su = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double g = gamma.values[i * K + k];
      nk += g;
      su += g * data[i].u;
      sv += g * data[i].v;
    }
    if (nk < kEmptyComponentFloor) throw EmptyComponentError(k);

    double mu = su / nk;
    double mv = sv / nk;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double g = gamma.values[i * K + k];
      double du = data[i].u - mu;
      double dv = data[i].v - mv;
      sxx += g * du * du;
      sxy += g * du * dv;
      syy += g * dv * dv;
    }
    GaussianComponent& c = model.components[k];
    c.weight = nk / static_cast<double>(n);
    c.mean = {mu, mv};
    c.cov = {sxx / nk + reg_eps, sxy / nk, syy / nk + reg_eps};
  }
  return model;
}

GmmModel init_model(std::span<const UvPoint> data, int modes, std::uint64_t seed,
                    double reg_eps) {
  if (modes < 1) fail(ErrorCode::InvalidArgument, "init_model: modes must be >= 1");
  if (data.empty()) fail(ErrorCode::DegenerateData, "init_model: no data points");
  if (count_distinct(data) < static_cast<std::size_t>(modes))
    fail(ErrorCode::DegenerateData,
         "init_model: fewer distinct points than mixture modes");

  std::size_t n = data.size();
  Rng rng(seed);

  // k-means++: first center uniform, then distance-squared weighting.
  std::vector<Vec2> centers;
  centers.reserve(modes);
  std::size_t first = rng.index(n);
  centers.push_back({data[first].u, data[first].v});

  std::vector<double> d2(n);
  auto refresh = [&](const Vec2& c) {
    for (std::size_t i = 0; i < n; ++i) {
      double du = data[i].u - c.x;
      double dv = data[i].v - c.y;
      double d = du * du + dv * dv;
      if (centers.size() == 1 || d < d2[i]) d2[i] = d;
    }
  };
  refresh(centers.back());

  while (static_cast<int>(centers.size()) < modes) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;  // sentinel
    if (total > 0.0) {
      double r = rng.uniform01() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        // Floating-point edge: walk back to the last positive-weight point.
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick == n)
      fail(ErrorCode::DegenerateData,
           "init_model: could not place all mixture modes");
    centers.push_back({data[pick].u, data[pick].v});
    refresh(centers.back());
  }

  SymMat2 cov = global_covariance(data, reg_eps);
  GmmModel model;
  model.components.resize(modes);
  for (int k = 0; k < modes; ++k) {
    model.components[k].weight = 1.0 / modes;
    model.components[k].mean = centers[k];
    model.components[k].cov = cov;
  }
  return model;
}

std::pair<GmmModel, FitReport> em_fit(std::span<const UvPoint> data,
                                      const FitConfig& config,
                                      const FitObserver& observer) {
  if (config.modes < 1)
    fail(ErrorCode::InvalidArgument, "em_fit: modes must be >= 1");
  if (!(config.rel_tol > 0.0))
    fail(ErrorCode::InvalidArgument, "em_fit: rel_tol must be > 0");
  if (config.max_iters < 1)
    fail(ErrorCode::InvalidArgument, "em_fit: max_iters must be >= 1");
  if (!(config.reg_eps > 0.0))
    fail(ErrorCode::InvalidArgument, "em_fit: reg_eps must be > 0");

  GmmModel model = init_model(data, config.modes, config.seed, config.reg_eps);
  SymMat2 fallback_cov = global_covariance(data, config.reg_eps);
  Rng reinit_rng = Rng(config.seed).fork(0x7EB17ull);

  FitReport report;
  int e_steps = 0;

  while (e_steps < config.max_iters) {
    auto [gamma, ll] = e_step(data, model);
    ++e_steps;
    report.trace.push_back(ll);
    if (observer) observer(e_steps, gamma, ll);

    if (report.trace.size() >= 2) {
      double prev = report.trace[report.trace.size() - 2];
      double denom = std::max(std::fabs(ll), 1e-12);
      if (std::fabs(ll - prev) / denom < config.rel_tol) {
        report.converged = true;
        break;
      }
    }
    if (e_steps >= config.max_iters) break;

    try {
      model = m_step(data, gamma, config.reg_eps);
    } catch (const EmptyComponentError& e) {
      if (++report.reinitializations > kMaxReinits)
        fail(ErrorCode::FitFailure,
             "em_fit: empty-component reinitialization exhausted");
      GaussianComponent& c = model.components[e.component()];
      std::size_t pick = reinit_rng.index(data.size());
      c.mean = {data[pick].u, data[pick].v};
      c.cov = fallback_cov;
      c.weight = 1.0 / config.modes;
      double sum = 0.0;
      for (const GaussianComponent& cc : model.components) sum += cc.weight;
      for (GaussianComponent& cc : model.components) cc.weight /= sum;
      // The trace restarts: log-likelihood may legitimately drop across a
      // reinitialization, and the monotonicity contract applies within the
      // segment that produced the returned model.
      report.trace.clear();
    }
  }

  report.iterations = e_steps;
  report.final_log_likelihood = report.trace.back();
  return {std::move(model), std::move(report)};
}

}  // namespace tg
