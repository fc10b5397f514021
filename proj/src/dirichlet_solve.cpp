#include "fl/dirichlet_solve.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fl {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

void check_same_domain(const Domain& a, const Domain& b, const char* who) {
  const bool same = a.kind == b.kind && a.dimension == b.dimension &&
                    a.a == b.a && a.b == b.b && a.radius == b.radius &&
                    a.center == b.center;
  if (!same)
    throw std::invalid_argument(std::string(who) +
                                ": grid was built for a different domain");
}

void check_lambda(double lambda, const Domain& d, const char* who) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(std::string(who) + ": requires lambda >= 0");
  if (lambda == 0.0 && !bounded(d))
    throw std::invalid_argument(
        std::string(who) + ": lambda = 0 needs a bounded domain");
}

// lambda W - S: symmetric positive definite under the operator invariants
// (S negative definite through the exterior killing)
Mat shifted_form(const DirichletOperator& op, double lambda) {
  const std::size_t n = op.grid->nodes.size();
  Mat A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      A(i, j) = -op.matrix[i * n + j];
  for (std::size_t i = 0; i < n; ++i)
    A(i, i) += lambda * op.grid->weights[i];
  return A;
}

Vec nodal_forcing(const std::function<std::vector<double>(double)>& forcing,
                  double t, std::size_t n) {
  if (!forcing) return Vec::Zero(n);
  const std::vector<double> f = forcing(t);
  if (f.size() != n)
    throw std::invalid_argument(
        "solve_parabolic: forcing returned wrong length");
  return Eigen::Map<const Vec>(f.data(), n);
}

}  // namespace

GridFunction solve_elliptic(const EllipticProblem& p) {
  if (!p.f.grid || p.f.grid->nodes.empty())
    throw std::invalid_argument("solve_elliptic: empty grid");
  if (p.f.values.size() != p.f.grid->nodes.size())
    throw std::invalid_argument("solve_elliptic: f size mismatch");
  check_same_domain(p.domain, p.f.grid->domain, "solve_elliptic");
  check_lambda(p.lambda, p.domain, "solve_elliptic");
  const DirichletOperator op =
      build_dirichlet_operator(p.domain, p.f.grid, p.alpha);
  const std::size_t n = p.f.grid->nodes.size();
  const Mat A = shifted_form(op, p.lambda);
  Vec rhs(n);
  for (std::size_t i = 0; i < n; ++i)
    rhs(i) = -p.f.grid->weights[i] * p.f.values[i];
  const Eigen::LDLT<Mat> fac(A);
  if (fac.info() != Eigen::Success)
    throw std::runtime_error("solve_elliptic: singular system");
  const Vec u = fac.solve(rhs);
  GridFunction out;
  out.grid = p.f.grid;
  out.values.assign(u.data(), u.data() + n);
  return out;
}

GreenFunction green_function(const Domain& d, double alpha, double lambda,
                             const GridPtr& grid) {
  if (!grid || grid->nodes.empty())
    throw std::invalid_argument("green_function: empty grid");
  check_same_domain(d, grid->domain, "green_function");
  check_lambda(lambda, d, "green_function");
  const DirichletOperator op = build_dirichlet_operator(d, grid, alpha);
  const std::size_t n = grid->nodes.size();
  const Mat A = shifted_form(op, lambda);
  const Eigen::LDLT<Mat> fac(A);
  if (fac.info() != Eigen::Success)
    throw std::runtime_error("green_function: singular system");
  const Mat G = fac.solve(Mat::Identity(n, n));
  GreenFunction out;
  out.grid = grid;
  out.lambda = lambda;
  out.n = n;
  out.values.assign(G.data(), G.data() + n * n);  // symmetric, order moot
  return out;
}

Trajectory solve_parabolic(const ParabolicProblem& p, int n_steps,
                           bool crank_nicolson) {
  if (!p.u0.grid || p.u0.grid->nodes.empty())
    throw std::invalid_argument("solve_parabolic: empty grid");
  if (p.u0.values.size() != p.u0.grid->nodes.size())
    throw std::invalid_argument("solve_parabolic: u0 size mismatch");
  check_same_domain(p.domain, p.u0.grid->domain, "solve_parabolic");
  if (!(p.T > 0.0) || !std::isfinite(p.T))
    throw std::invalid_argument("solve_parabolic: requires T > 0");
  if (n_steps < 1)
    throw std::invalid_argument("solve_parabolic: need at least one step");
  const DirichletOperator op =
      build_dirichlet_operator(p.domain, p.u0.grid, p.alpha);
  const std::size_t n = p.u0.grid->nodes.size();
  const double dt = p.T / n_steps;
  const Vec w = Eigen::Map<const Vec>(p.u0.grid->weights.data(), n);

  // W - dt S (implicit Euler) or W - dt/2 S (Crank-Nicolson); one
  // factorization serves every step
  Mat S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) S(i, j) = op.matrix[i * n + j];
  const double h = crank_nicolson ? 0.5 * dt : dt;
  Mat M = -h * S;
  M.diagonal() += w;
  const Eigen::LDLT<Mat> fac(M);
  if (fac.info() != Eigen::Success)
    throw std::runtime_error("solve_parabolic: singular system");

  Trajectory tr;
  tr.grid = p.u0.grid;
  tr.times.reserve(n_steps + 1);
  tr.states.reserve(n_steps + 1);
  Vec u = Eigen::Map<const Vec>(p.u0.values.data(), n);
  tr.times.push_back(0.0);
  tr.states.emplace_back(u.data(), u.data() + n);
  for (int k = 1; k <= n_steps; ++k) {
    const double t1 = dt * k;
    Vec rhs;
    if (crank_nicolson) {
      const Vec fmid = nodal_forcing(p.forcing, t1 - 0.5 * dt, n);
      rhs = 0.5 * dt * (S * u) + w.cwiseProduct(u + dt * fmid);
    } else {
      const Vec f1 = nodal_forcing(p.forcing, t1, n);
      rhs = w.cwiseProduct(u + dt * f1);
    }
    u = fac.solve(rhs);
    if (!u.allFinite())
      throw std::runtime_error(
          "solve_parabolic: non-finite state at step " + std::to_string(k));
    tr.times.push_back(t1);
    tr.states.emplace_back(u.data(), u.data() + n);
  }
  return tr;
}

double weak_residual(const Trajectory& u, const GridFunction& u0,
                     const std::function<std::vector<double>(double)>& forcing,
                     const std::function<double(double)>& test, double alpha,
                     std::ostream* warnings) {
  if (!u.grid || u.times.empty() || u.states.size() != u.times.size())
    throw std::invalid_argument("weak_residual: malformed trajectory");
  if (!u0.grid || u0.values.size() != u.grid->nodes.size())
    throw std::invalid_argument("weak_residual: u0 does not match the grid");
  if (!test) throw std::invalid_argument("weak_residual: missing test");
  const Grid& g = *u.grid;
  const std::size_t n = g.nodes.size();

  std::vector<double> phi(n), aphi(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = test(g.nodes[i]);
    aphi[i] = apply_pv(test, alpha, g.nodes[i]);
  }
  if (warnings) {
    const std::size_t edge = std::min<std::size_t>(8, n / 2);
    bool touches = false;
    for (std::size_t k = 0; k < edge; ++k)
      if (phi[k] != 0.0 || phi[n - 1 - k] != 0.0) touches = true;
    if (touches)
      *warnings << "weak_residual: test support touches the boundary layer; "
                   "quadrature degrades\n";
  }

  const auto dot = [&](const std::vector<double>& a,
                       const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += g.weights[i] * a[i] * b[i];
    return s;
  };

  const double head = dot(u0.values, phi);
  const std::size_t m = u.times.size();
  std::vector<double> integrand(m);
  for (std::size_t k = 0; k < m; ++k) {
    double fk = 0.0;
    if (forcing) {
      const std::vector<double> f = forcing(u.times[k]);
      if (f.size() != n)
        throw std::invalid_argument(
            "weak_residual: forcing returned wrong length");
      fk = dot(f, phi);
    }
    integrand[k] = dot(u.states[k], aphi) + fk;
  }
  double acc = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (k > 0)
      acc += 0.5 * (u.times[k] - u.times[k - 1]) *
             (integrand[k] + integrand[k - 1]);
    worst = std::max(worst, std::fabs(dot(u.states[k], phi) - head - acc));
  }
  return worst;
}

std::vector<double> heat_kernel_matrix(const DirichletOperator& op, double t) {
  if (!op.grid || op.grid->nodes.empty())
    throw std::invalid_argument("heat_kernel_matrix: empty operator");
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("heat_kernel_matrix: requires t > 0");
  const std::size_t n = op.grid->nodes.size();
  Mat S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) S(i, j) = op.matrix[i * n + j];
  Mat W = Mat::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) W(i, i) = op.grid->weights[i];
  // S v = mu W v with V^T W V = I; then e^{t A_h} W^{-1} = V e^{t mu} V^T,
  // the symmetric density samples p(t, x_i, x_j)
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(S, W);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("heat_kernel_matrix: eigensolve failed");
  const Vec scale = (t * es.eigenvalues().array()).exp().matrix();
  const Mat P =
      es.eigenvectors() * scale.asDiagonal() * es.eigenvectors().transpose();
  return std::vector<double>(P.data(), P.data() + n * n);
}

void dump_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  if (!tr.grid) throw std::invalid_argument("dump_trajectory_csv: empty");
  os << "t,x,u\n";
  char buf[128];
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (std::size_t i = 0; i < tr.grid->nodes.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", tr.times[k],
                    tr.grid->nodes[i], tr.states[k][i]);
      os << buf;
    }
}

void dump_green_csv(std::ostream& os, const GreenFunction& g) {
  if (!g.grid) throw std::invalid_argument("dump_green_csv: empty");
  os << "x,y,g\n";
  char buf[128];
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                    g.grid->nodes[i], g.grid->nodes[j],
                    g.values[i * g.n + j]);
      os << buf;
    }
}

}  // namespace fl
