#include "subtv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subtv/mittag_leffler.hpp"
#include "subtv/quadrature.hpp"

namespace subtv {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 5-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr std::array<double, 5> kGauss5X = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGauss5W = {0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};

}  // namespace

double EigenBasis::eval(int idx, double x, double y) const {
  const auto& m = modes[static_cast<std::size_t>(idx)];
  if (dim == 1) {
    return std::sqrt(2.0) * std::sin(m[0] * kPi * x);
  }
  return 2.0 * std::sin(m[0] * kPi * x) * std::sin(m[1] * kPi * y);
}

EigenBasis interval_basis(int mode_count) {
  if (mode_count < 1) {
    throw std::invalid_argument("interval_basis: need at least one mode");
  }
  EigenBasis basis;
  basis.dim = 1;
  basis.eigenvalues.reserve(static_cast<std::size_t>(mode_count));
  basis.modes.reserve(static_cast<std::size_t>(mode_count));
  for (int j = 1; j <= mode_count; ++j) {
    basis.eigenvalues.push_back(j * kPi * j * kPi);
    basis.modes.push_back({j, 0});
  }
  return basis;
}

EigenBasis square_basis(int mode_count) {
  if (mode_count < 1) {
    throw std::invalid_argument("square_basis: need at least one mode");
  }
  const int bound = static_cast<int>(std::ceil(std::sqrt(4.0 * mode_count / kPi))) + 2;
  std::vector<std::array<int, 2>> candidates;
  candidates.reserve(static_cast<std::size_t>(bound) * bound);
  for (int m = 1; m <= bound; ++m) {
    for (int n = 1; n <= bound; ++n) {
      candidates.push_back({m, n});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    const long la = static_cast<long>(a[0]) * a[0] + static_cast<long>(a[1]) * a[1];
    const long lb = static_cast<long>(b[0]) * b[0] + static_cast<long>(b[1]) * b[1];
    if (la != lb) return la < lb;
    return a < b;
  });
  EigenBasis basis;
  basis.dim = 2;
  for (int j = 0; j < mode_count; ++j) {
    const auto& m = candidates[static_cast<std::size_t>(j)];
    basis.eigenvalues.push_back((static_cast<double>(m[0]) * m[0] + static_cast<double>(m[1]) * m[1]) * kPi * kPi);
    basis.modes.push_back(m);
  }
  return basis;
}

std::vector<double> project_function(const EigenBasis& basis,
                                     const std::function<double(double, double)>& f, int J) {
  J = std::min(J, basis.count());
  std::vector<double> coefs(static_cast<std::size_t>(J), 0.0);
  if (basis.dim == 1) {
    int max_mode = 1;
    for (int j = 0; j < J; ++j) max_mode = std::max(max_mode, basis.modes[static_cast<std::size_t>(j)][0]);
    const int cells = std::max(600, 12 * max_mode);
    const double h = 1.0 / cells;
    for (int c = 0; c < cells; ++c) {
      const double mid = (c + 0.5) * h;
      for (int q = 0; q < 5; ++q) {
        const double x = mid + 0.5 * h * kGauss5X[static_cast<std::size_t>(q)];
        const double w = 0.5 * h * kGauss5W[static_cast<std::size_t>(q)];
        const double fx = f(x, 0.0) * w;
        for (int j = 0; j < J; ++j) {
          coefs[static_cast<std::size_t>(j)] += fx * basis.eval(j, x);
        }
      }
    }
    return coefs;
  }

  // 2D: evaluate f on a tensor Gauss grid once, then contract with the sine
  // factors dimension by dimension.
  int max_mode = 1;
  for (int j = 0; j < J; ++j) {
    max_mode = std::max({max_mode, basis.modes[static_cast<std::size_t>(j)][0],
                         basis.modes[static_cast<std::size_t>(j)][1]});
  }
  const int cells = std::max(120, 8 * max_mode);
  const int pts = cells * 3;
  constexpr std::array<double, 3> g3x = {-0.7745966692414834, 0.0, 0.7745966692414834};
  constexpr std::array<double, 3> g3w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> xs(static_cast<std::size_t>(pts)), ws(static_cast<std::size_t>(pts));
  const double h = 1.0 / cells;
  for (int c = 0; c < cells; ++c) {
    for (int q = 0; q < 3; ++q) {
      xs[static_cast<std::size_t>(c * 3 + q)] = (c + 0.5) * h + 0.5 * h * g3x[static_cast<std::size_t>(q)];
      ws[static_cast<std::size_t>(c * 3 + q)] = 0.5 * h * g3w[static_cast<std::size_t>(q)];
    }
  }
  // partial[n][ix] = sum_y f(x,y) sin(n pi y) w_y
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(max_mode) + 1,
                                           std::vector<double>(static_cast<std::size_t>(pts), 0.0));
  std::vector<double> frow(static_cast<std::size_t>(pts));
  for (int iy = 0; iy < pts; ++iy) {
    const double y = xs[static_cast<std::size_t>(iy)];
    const double wy = ws[static_cast<std::size_t>(iy)];
    for (int ix = 0; ix < pts; ++ix) {
      frow[static_cast<std::size_t>(ix)] = f(xs[static_cast<std::size_t>(ix)], y);
    }
    for (int n = 1; n <= max_mode; ++n) {
      const double sy = std::sin(n * kPi * y) * wy;
      auto& row = partial[static_cast<std::size_t>(n)];
      for (int ix = 0; ix < pts; ++ix) {
        row[static_cast<std::size_t>(ix)] += frow[static_cast<std::size_t>(ix)] * sy;
      }
    }
  }
  for (int j = 0; j < J; ++j) {
    const int m = basis.modes[static_cast<std::size_t>(j)][0];
    const int n = basis.modes[static_cast<std::size_t>(j)][1];
    const auto& row = partial[static_cast<std::size_t>(n)];
    double acc = 0.0;
    for (int ix = 0; ix < pts; ++ix) {
      acc += row[static_cast<std::size_t>(ix)] * std::sin(m * kPi * xs[static_cast<std::size_t>(ix)]) *
             ws[static_cast<std::size_t>(ix)];
    }
    coefs[static_cast<std::size_t>(j)] = 2.0 * acc;
  }
  return coefs;
}

std::vector<double> spectral_coefficients(const Mesh& mesh, const NodalField& f,
                                          const EigenBasis& basis, int J) {
  if (f.size() != mesh.node_count()) {
    throw std::invalid_argument("spectral_coefficients: field size does not match node count");
  }
  J = std::min(J, basis.count());
  std::vector<double> coefs(static_cast<std::size_t>(J), 0.0);
  if (mesh.dim == 1) {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const double a = mesh.nodes[static_cast<std::size_t>(nodes[0])][0];
      const double b = mesh.nodes[static_cast<std::size_t>(nodes[1])][0];
      const double h = b - a;
      for (int q = 0; q < 5; ++q) {
        const double s = 0.5 * (1.0 + kGauss5X[static_cast<std::size_t>(q)]);
        const double x = a + s * h;
        const double w = 0.5 * h * kGauss5W[static_cast<std::size_t>(q)];
        const double fv = (1.0 - s) * f[nodes[0]] + s * f[nodes[1]];
        for (int j = 0; j < J; ++j) {
          coefs[static_cast<std::size_t>(j)] += w * fv * basis.eval(j, x);
        }
      }
    }
  } else {
    for (Index e = 0; e < mesh.element_count(); ++e) {
      const auto nodes = mesh.element(e);
      const auto& p0 = mesh.nodes[static_cast<std::size_t>(nodes[0])];
      const auto& p1 = mesh.nodes[static_cast<std::size_t>(nodes[1])];
      const auto& p2 = mesh.nodes[static_cast<std::size_t>(nodes[2])];
      const double w = mesh.element_measure[static_cast<std::size_t>(e)] / 3.0;
      // edge-midpoint rule, degree-2 exact
      const std::array<std::array<double, 3>, 3> bary = {
          {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
      for (const auto& lambda : bary) {
        const double x = lambda[0] * p0[0] + lambda[1] * p1[0] + lambda[2] * p2[0];
        const double y = lambda[0] * p0[1] + lambda[1] * p1[1] + lambda[2] * p2[1];
        const double fv = lambda[0] * f[nodes[0]] + lambda[1] * f[nodes[1]] + lambda[2] * f[nodes[2]];
        for (int j = 0; j < J; ++j) {
          coefs[static_cast<std::size_t>(j)] += w * fv * basis.eval(j, x, y);
        }
      }
    }
  }
  return coefs;
}

double source_time_integral(double alpha, double T, double lambda,
                            const std::function<double(double)>& mu) {
  // substitute y = s^alpha: (1/alpha) int_0^{T^alpha} E_{a,a}(-lambda y) mu(T - y^{1/alpha}) dy
  const double ymax = std::pow(T, alpha);
  const auto integrand = [&](double y) {
    const double s = std::pow(y, 1.0 / alpha);
    return mittag_leffler(alpha, alpha, -lambda * y) * mu(T - s);
  };
  return adaptive_simpson(integrand, 0.0, ymax, 1e-14) / alpha;
}

double source_time_integral_const(double alpha, double T, double lambda) {
  const double ta = std::pow(T, alpha);
  return ta * mittag_leffler(alpha, alpha + 1.0, -lambda * ta);
}

namespace {

NodalField expand_final_state(const EigenBasis& basis, const std::vector<double>& coefs,
                              const std::function<double(double, int)>& time_factor, int J,
                              const Mesh& mesh) {
  NodalField out = NodalField::Zero(mesh.node_count());
  double peak = 0.0;
  int quiet = 0;
  for (int j = 0; j < J; ++j) {
    const double amp = coefs[static_cast<std::size_t>(j)] *
                       time_factor(basis.eigenvalues[static_cast<std::size_t>(j)], j);
    peak = std::max(peak, std::abs(amp));
    if (peak > 0.0 && std::abs(amp) < 1e-12 * peak) {
      if (++quiet >= 8) break;  // coefficient tail below the truncation floor
    } else {
      quiet = 0;
    }
    if (amp == 0.0) continue;
    for (Index i = 0; i < mesh.node_count(); ++i) {
      const auto& p = mesh.nodes[static_cast<std::size_t>(i)];
      out[i] += amp * basis.eval(j, p[0], p[1]);
    }
  }
  return out;
}

}  // namespace

NodalField spectral_final_state(const EigenBasis& basis, double alpha, double T,
                                const std::function<double(double)>& mu,
                                const std::function<double(double, double)>& f, int J,
                                const Mesh& mesh) {
  J = std::min(J, basis.count());
  const auto coefs = project_function(basis, f, J);
  const auto factor = [&](double lambda, int) { return source_time_integral(alpha, T, lambda, mu); };
  return expand_final_state(basis, coefs, factor, J, mesh);
}

NodalField spectral_final_state(const EigenBasis& basis, double alpha, double T, double mu_const,
                                const std::function<double(double, double)>& f, int J,
                                const Mesh& mesh) {
  J = std::min(J, basis.count());
  const auto coefs = project_function(basis, f, J);
  const auto factor = [&](double lambda, int) {
    return mu_const * source_time_integral_const(alpha, T, lambda);
  };
  return expand_final_state(basis, coefs, factor, J, mesh);
}

}  // namespace subtv
