#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "core/raster.hpp"
#include "core/vec2.hpp"

namespace tg {

struct GaussianComponent {
  double weight = 1.0;
  Vec2 mean;
  SymMat2 cov{1.0, 0.0, 1.0};
};

struct GmmModel {
  std::vector<GaussianComponent> components;

  int mode_count() const { return static_cast<int>(components.size()); }

  /// Throws InvalidArgument unless every component has weight in (0, 1],
  /// weights summing to 1 within 1e-9, and a positive-definite covariance.
  void validate() const;
};

struct FitConfig {
  int modes = 1;
  double rel_tol = 1e-6;
  int max_iters = 500;
  double reg_eps = 1e-6;
  std::uint64_t seed = 0;
};

/// Dense row-major responsibilities: rows index data points, cols components.
struct ResponsibilityMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  ResponsibilityMatrix() = default;
  ResponsibilityMatrix(int r, int c)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int n, int k) { return values[static_cast<std::size_t>(n) * cols + k]; }
  double at(int n, int k) const {
    return values[static_cast<std::size_t>(n) * cols + k];
  }
};

struct FitReport {
  int iterations = 0;                // E-steps performed, including any
                                     // discarded by a reinitialization
  double final_log_likelihood = 0.0;
  bool converged = false;
  int reinitializations = 0;
  std::vector<double> trace;         // log-likelihood per E-step since the
                                     // last reinitialization; non-decreasing
};

/// Density of one Gaussian component at x (weight ignored).
double gaussian_pdf(const UvPoint& x, const GaussianComponent& c);
double gaussian_log_pdf(const UvPoint& x, const GaussianComponent& c);

/// log sum_k w_k N(x | mu_k, Sigma_k), evaluated in the log domain with a
/// max shift so distant points cannot underflow to -inf spuriously.
double gmm_log_density(const UvPoint& x, const GmmModel& model);

/// Posterior component responsibilities for each point. Rows sum to 1.
ResponsibilityMatrix responsibilities(std::span<const UvPoint> data,
                                      const GmmModel& model);

/// One E-step: responsibilities plus the total log-likelihood of the data.
std::pair<ResponsibilityMatrix, double> e_step(std::span<const UvPoint> data,
                                               const GmmModel& model);

/// Thrown by m_step when a component's effective count N_k falls below 1e-8;
/// em_fit catches it and reinitializes that component.
class EmptyComponentError : public Error {
public:
  explicit EmptyComponentError(int component)
      : Error(ErrorCode::DegenerateData, "mixture component lost all support"),
        component_(component) {}
  int component() const { return component_; }

private:
  int component_;
};

/// One M-step: maximum-likelihood weights, means and covariances from the
/// responsibilities, with reg_eps added to each covariance diagonal.
GmmModel m_step(std::span<const UvPoint> data, const ResponsibilityMatrix& gamma,
                double reg_eps);

/// k-means++-style initialization: seeded, deterministic for a given
/// (data, modes, seed). Covariances start at the global data covariance.
GmmModel init_model(std::span<const UvPoint> data, int modes, std::uint64_t seed,
                    double reg_eps);

using FitObserver =
    std::function<void(int iteration, const ResponsibilityMatrix& gamma,
                       double log_likelihood)>;

/// Full EM loop: init, alternate E/M until the relative log-likelihood
/// change falls below rel_tol or max_iters E-steps have run. Empty
/// components are reinitialized (at most 5 times) and the trace restarts.
std::pair<GmmModel, FitReport> em_fit(std::span<const UvPoint> data,
                                      const FitConfig& config,
                                      const FitObserver& observer = {});

namespace detail {

/// Per-component constants reused across many density evaluations.
struct PreparedComponent {
  double log_weight;
  double mean_u, mean_v;
  double inv_xx, inv_xy, inv_yy;  // inverse covariance
  double log_norm;                // -log(2*pi) - 0.5*log(det)
};

struct PreparedGmm {
  std::vector<PreparedComponent> comp;

  /// Validates the model once; evaluation afterwards skips all checks.
  explicit PreparedGmm(const GmmModel& model);

  double component_log_pdf(int k, double u, double v) const {
    const PreparedComponent& c = comp[k];
    double du = u - c.mean_u;
    double dv = v - c.mean_v;
    double q = c.inv_xx * du * du + 2.0 * c.inv_xy * du * dv + c.inv_yy * dv * dv;
    return c.log_norm - 0.5 * q;
  }

  /// log-density including weights, max-shifted.
  double log_density(double u, double v) const;
};

}  // namespace detail

}  // namespace tg
