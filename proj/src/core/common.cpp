#include "core/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace plgl {

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on our own uniforms keeps the stream reproducible.
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Vec Rng::unit_vector(int n) {
  Vec v(n);
  double nrm = 0.0;
  do {
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    nrm = v.norm();
  } while (nrm < 1e-12);
  return v / nrm;
}

Vec Rng::ball_point(int n, double radius) {
  // radius * u^{1/n} * (unit vector) is uniform in the ball.
  double u = uniform();
  return unit_vector(n) * (radius * std::pow(u, 1.0 / n));
}

const Quadrature& gauss_legendre(int n) {
  static std::mutex mtx;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess on [-1,1], then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // shift [-1,1] -> [0,1]
    q.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
  return cache.emplace(n, std::move(q)).first->second;
}

Vec directional_derivative(const std::function<Vec(const Vec&)>& f, const Vec& x,
                           const Vec& v, double h) {
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Vec e = Vec::Zero(n);
  Mat jac;
  for (int i = 0; i < n; ++i) {
    e[i] = 1.0;
    Vec col = directional_derivative(f, x, e, h);
    if (i == 0) jac.resize(col.size(), n);
    jac.col(i) = col;
    e[i] = 0.0;
  }
  return jac;
}

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_default_threads(int n) { g_threads.store(n); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = default_threads();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mtx;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mtx);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

int log_level() {
  static int lvl = [] {
    const char* v = std::getenv("PLGL_LOG");
    return v ? std::atoi(v) : 0;
  }();
  return lvl;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[plgl] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[plgl:debug] " << msg << "\n";
}

}  // namespace plgl
