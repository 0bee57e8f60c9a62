#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plgl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

/// Bad user input (files, configs, inconsistent tensors). Maps to exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Left the germ domain (factorization / chart / gauge singularities).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Deterministic RNG. We avoid std::*_distribution on purpose: their output is
// implementation-defined and reports must reproduce bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // xorshift64*; plenty for sampling test points.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  double uniform() {  // in [0,1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian();

  /// Uniform on the unit sphere of dimension n.
  Vec unit_vector(int n);

  /// Uniform in the ball of given radius.
  Vec ball_point(int n, double radius);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [0,1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes/weights computed by Newton iteration on Legendre polynomials,
/// shifted to [0,1]; cached per order.
const Quadrature& gauss_legendre(int n);

// ---------------------------------------------------------------------------
// Central finite differences. Step scaling per the chart norm of the point.
inline double fd_step(double base, const Vec& x) {
  return base * std::max(1.0, x.norm());
}

/// d/ds f(x + s*v) at s=0 by central differences.
Vec directional_derivative(const std::function<Vec(const Vec&)>& f, const Vec& x,
                           const Vec& v, double h);

/// Jacobian of f at x by central differences, column i = df/dx_i.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h);

// ---------------------------------------------------------------------------
// Deterministic parallel map: fills out[i] = fn(i) for i in [0,n) using a
// small worker pool; results land in index order regardless of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Global worker count (set once by the CLI / config; default hw concurrency).
int default_threads();
void set_default_threads(int n);

// ---------------------------------------------------------------------------
// Logging to stderr, gated by PLGL_LOG (0=quiet default, 1=info, 2=debug).
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace plgl
