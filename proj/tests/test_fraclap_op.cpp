#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fl/domain.hpp"
#include "fl/fraclap.hpp"

namespace {

const double kPi = 3.14159265358979323846;

// Delta^{alpha/2} (1-x^2)_+^{alpha/2} is constant inside the unit interval
double getoor_rhs(double alpha) {
  return -std::pow(2.0, alpha) * std::tgamma(1.0 + 0.5 * alpha) *
         std::tgamma(0.5 * (1.0 + alpha)) / std::tgamma(0.5);
}

double getoor_profile(double y, double alpha) {
  const double s = 1.0 - y * y;
  return s > 0.0 ? std::pow(s, 0.5 * alpha) : 0.0;
}

double bump(double x, double center, double halfwidth) {
  const double t = (x - center) / halfwidth;
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

TEST_CASE("normalization constant") {
  CHECK(fl::c_d_constant(1.0, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  for (int d = 1; d <= 3; ++d)
    for (double alpha : {0.1, 0.5, 1.0, 1.5, 1.9}) {
      const double c = fl::c_d_constant(alpha, d);
      CHECK(c > 0.0);
      CHECK(std::isfinite(c));
    }
  CHECK_THROWS_AS(fl::c_d_constant(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fl::c_d_constant(2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fl::c_d_constant(1.0, 4), std::invalid_argument);
}

TEST_CASE("apply_pv kills constants and reproduces the Getoor identity") {
  auto cst = [](double) { return 3.7; };
  CHECK(fl::apply_pv(cst, 0.7, 0.3) == 0.0);

  for (double alpha : {0.5, 1.0, 1.5}) {
    const double want = getoor_rhs(alpha);
    for (double x : {0.0, 0.5}) {
      const double got = fl::apply_pv(
          [alpha](double y) { return getoor_profile(y, alpha); }, alpha, x,
          8.0);
      CHECK(got == doctest::Approx(want).epsilon(1e-7));
    }
  }
  // strong-singularity end of the range
  const double got = fl::apply_pv(
      [](double y) { return getoor_profile(y, 1.9); }, 1.9, 0.0, 8.0);
  CHECK(got == doctest::Approx(getoor_rhs(1.9)).epsilon(1e-6));
}

TEST_CASE("apply_pv is linear") {
  const double alpha = 0.8;
  auto u1 = [](double y) { return bump(y, 0.0, 1.0); };
  auto u2 = [](double y) { return bump(y, 0.4, 0.6); };
  auto mix = [&](double y) { return 1.3 * u1(y) - 0.7 * u2(y); };
  const double x = 0.2;
  const double lhs = fl::apply_pv(mix, alpha, x, 16.0);
  const double rhs = 1.3 * fl::apply_pv(u1, alpha, x, 16.0) -
                     0.7 * fl::apply_pv(u2, alpha, x, 16.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("apply_pv recovers the Fourier symbol on a windowed plane wave") {
  // validates the c_d normalization at alpha = 1/2 against -|xi|^alpha
  const double L = 40.0, xi = 3.0, alpha = 0.5;
  auto wave = [L, xi](double y) {
    return std::cos(xi * y) * smoothstep((L - std::abs(y)) / (0.5 * L));
  };
  for (double x : {0.0, 0.7}) {
    const double got = fl::apply_pv(wave, alpha, x, 2.0 * L);
    const double want = -std::pow(xi, alpha) * std::cos(xi * x);
    CHECK(std::abs(got - want) <= 1e-5);
  }
}

TEST_CASE("apply_pv is nonpositive at a positive maximum") {
  auto f = [](double y) {
    return bump(y, 0.0, 1.0) + 0.5 * bump(y, 0.6, 0.7);
  };
  double best = 0.0, bx = 0.0;
  for (int i = -200; i <= 200; ++i) {
    const double x = i / 100.0;
    if (f(x) > best) {
      best = f(x);
      bx = x;
    }
  }
  REQUIRE(best > 0.0);
  CHECK(fl::apply_pv(f, 0.7, bx, 16.0) <= 0.0);
  CHECK(fl::apply_pv([](double y) { return bump(y, 0.3, 0.8); }, 1.3, 0.3,
                     16.0) <= 0.0);
}

TEST_CASE("operator structure: symmetry, signs, row sums, killing") {
  const fl::Domain iv = fl::Domain::Interval(-1.0, 1.0);
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(iv, 256, 2.0));
  const fl::DirichletOperator op = fl::build_dirichlet_operator(iv, grid, 1.0);
  const size_t n = 256;
  REQUIRE(op.matrix.size() == n * n);
  REQUIRE(op.killing.size() == n);

  for (size_t i = 0; i < n; ++i) {
    CHECK(op.killing[i] > 0.0);
    CHECK(op.matrix[i * n + i] < 0.0);
    for (size_t j = 0; j < n; ++j) {
      if (j != i) CHECK(op.matrix[i * n + j] >= 0.0);
      CHECK(std::abs(op.matrix[i * n + j] - op.matrix[j * n + i]) <= 1e-15);
    }
    double row = 0.0;
    for (size_t j = 0; j < n; ++j) row += op.matrix[i * n + j];
    const double want = -grid->weights[i] * op.killing[i];
    CHECK(row == doctest::Approx(want).epsilon(1e-10));
  }

  // constants feel only the exterior killing
  std::vector<double> ones(n, 1.0);
  const std::vector<double> a1 = fl::apply_operator(op, ones);
  for (size_t i = 0; i < n; ++i)
    CHECK(a1[i] == doctest::Approx(-op.killing[i]).epsilon(1e-10));

  // exterior rate has the closed form c_1 ((x-a)^{-alpha} + (b-x)^{-alpha})/alpha
  const double c = fl::c_d_constant(1.0, 1);
  for (size_t i = 0; i < n; i += 37) {
    const double x = grid->nodes[i];
    const double want = c * (1.0 / (x + 1.0) + 1.0 / (1.0 - x));
    CHECK(op.killing[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("operator converges on the Getoor profile under refinement") {
  const fl::Domain iv = fl::Domain::Interval(-1.0, 1.0);
  const double want = getoor_rhs(1.0);
  std::vector<double> errs;
  for (int n : {256, 512, 1024, 2048}) {
    const auto grid =
        std::make_shared<const fl::Grid>(fl::graded_grid(iv, n, 2.0));
    const fl::DirichletOperator op =
        fl::build_dirichlet_operator(iv, grid, 1.0);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = getoor_profile(grid->nodes[i], 1.0);
    const std::vector<double> au = fl::apply_operator(op, u);
    double emax = 0.0;
    for (int i = 0; i < n; ++i)
      if (grid->dist[i] >= 0.05) emax = std::max(emax, std::abs(au[i] - want));
    errs.push_back(emax);
  }
  for (size_t k = 1; k < errs.size(); ++k) CHECK(errs[k] < errs[k - 1]);
  CHECK(errs.back() <= 5e-6);

  // single-level spot checks across alpha
  for (double alpha : {0.5, 1.5}) {
    const auto grid =
        std::make_shared<const fl::Grid>(fl::graded_grid(iv, 1024, 2.0));
    const fl::DirichletOperator op =
        fl::build_dirichlet_operator(iv, grid, alpha);
    std::vector<double> u(1024);
    for (int i = 0; i < 1024; ++i)
      u[i] = getoor_profile(grid->nodes[i], alpha);
    const std::vector<double> au = fl::apply_operator(op, u);
    double emax = 0.0;
    for (int i = 0; i < 1024; ++i)
      if (grid->dist[i] >= 0.05)
        emax = std::max(emax, std::abs(au[i] - getoor_rhs(alpha)));
    CHECK(emax <= (alpha < 1.0 ? 5e-6 : 2e-3));
  }
}

TEST_CASE("operator is negative definite and works on the half-line") {
  const fl::Domain iv = fl::Domain::Interval(-1.0, 1.0);
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(iv, 256, 2.0));
  const fl::DirichletOperator op = fl::build_dirichlet_operator(iv, grid, 1.0);
  Eigen::Map<const Eigen::MatrixXd> S(op.matrix.data(), 256, 256);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(es.eigenvalues()(255) < -1e-3);

  const fl::Domain hl = fl::Domain::HalfLine();
  const auto hg =
      std::make_shared<const fl::Grid>(fl::graded_grid(hl, 256, 2.0, 32.0));
  const fl::DirichletOperator hop = fl::build_dirichlet_operator(hl, hg, 0.8);
  std::vector<double> ones(256, 1.0);
  const std::vector<double> a1 = fl::apply_operator(hop, ones);
  for (size_t i = 0; i < 256; ++i)
    CHECK(a1[i] == doctest::Approx(-hop.killing[i]).epsilon(1e-10));
}

TEST_CASE("operator assembly rejects unsupported inputs") {
  const fl::Domain iv = fl::Domain::Interval(-1.0, 1.0);
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(iv, 64, 2.0));
  CHECK_THROWS_AS(fl::build_dirichlet_operator(iv, nullptr, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::build_dirichlet_operator(iv, grid, 2.5),
                  std::invalid_argument);
  const fl::Domain ball = fl::Domain::Ball({0.0, 0.0, 0.0}, 1.0, 2);
  const auto bg =
      std::make_shared<const fl::Grid>(fl::graded_grid(ball, 64, 2.0));
  CHECK_THROWS_AS(fl::build_dirichlet_operator(ball, bg, 1.0),
                  std::invalid_argument);
  const auto big =
      std::make_shared<const fl::Grid>(fl::graded_grid(iv, 8192, 2.0));
  CHECK_THROWS_AS(fl::build_dirichlet_operator(iv, big, 1.0),
                  std::invalid_argument);
  std::vector<double> wrong(63, 0.0);
  const fl::DirichletOperator op = fl::build_dirichlet_operator(iv, grid, 1.0);
  CHECK_THROWS_AS(fl::apply_operator(op, wrong), std::invalid_argument);
}

TEST_CASE("spectral reference agrees with apply_pv on smooth bumps") {
  const fl::Domain box = fl::Domain::Interval(-256.0, 256.0);
  const int n = 1 << 14;
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(box, n, 1.0));

  for (double alpha : {0.5, 1.0, 1.5}) {
    fl::GridFunction u;
    u.grid = grid;
    u.values.resize(n);
    for (int i = 0; i < n; ++i) u.values[i] = bump(grid->nodes[i], 0.3, 2.0);
    const fl::GridFunction ref = fl::spectral_reference(u, alpha, nullptr);
    // compare near the bump; far afield the periodic images take over
    for (int i = 7936; i <= 8448; i += 64) {
      const double x = grid->nodes[i];
      const double pv = fl::apply_pv(
          [](double y) { return bump(y, 0.3, 2.0); }, alpha, x, 40.0);
      CHECK(std::abs(pv - ref.values[i]) <= 1e-4);
    }
  }
}

TEST_CASE("spectral reference symbol and zero behavior") {
  const fl::Domain box = fl::Domain::Interval(-32.0, 32.0);
  const int n = 1 << 14;
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(box, n, 1.0));

  fl::GridFunction z;
  z.grid = grid;
  z.values.assign(n, 0.0);
  const fl::GridFunction rz = fl::spectral_reference(z, 1.0, nullptr);
  for (double v : rz.values) CHECK(v == 0.0);

  // windowed on-grid mode: recover -|xi0|^alpha on the plateau
  const double xi0 = 2.0 * kPi * 24.0 / 64.0;
  fl::GridFunction w;
  w.grid = grid;
  w.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid->nodes[i];
    w.values[i] =
        std::cos(xi0 * x) * smoothstep((16.0 - std::abs(x)) / 8.0);
  }
  const fl::GridFunction rw = fl::spectral_reference(w, 1.2, nullptr);
  for (int i = 0; i < n; ++i) {
    const double x = grid->nodes[i];
    if (std::abs(x) > 4.0) continue;
    const double want = -std::pow(xi0, 1.2) * std::cos(xi0 * x);
    CHECK(std::abs(rw.values[i] - want) <= 1e-3);
  }
}

TEST_CASE("spectral reference warns on wide support and validates input") {
  const fl::Domain box = fl::Domain::Interval(-32.0, 32.0);
  const int n = 4096;
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(box, n, 1.0));

  fl::GridFunction wide;
  wide.grid = grid;
  wide.values.resize(n);
  for (int i = 0; i < n; ++i) wide.values[i] = bump(grid->nodes[i], 0.0, 20.0);
  std::ostringstream warn;
  fl::spectral_reference(wide, 1.0, &warn);
  CHECK(!warn.str().empty());

  fl::GridFunction narrow;
  narrow.grid = grid;
  narrow.values.resize(n);
  for (int i = 0; i < n; ++i)
    narrow.values[i] = bump(grid->nodes[i], 0.0, 2.0);
  std::ostringstream quiet;
  fl::spectral_reference(narrow, 1.0, &quiet);
  CHECK(quiet.str().empty());

  const fl::Domain iv = fl::Domain::Interval(-1.0, 1.0);
  const auto graded =
      std::make_shared<const fl::Grid>(fl::graded_grid(iv, 64, 2.0));
  fl::GridFunction g;
  g.grid = graded;
  g.values.assign(64, 0.0);
  CHECK_THROWS_AS(fl::spectral_reference(g, 1.0, nullptr),
                  std::invalid_argument);
  fl::GridFunction mismatch;
  mismatch.grid = grid;
  mismatch.values.assign(11, 0.0);
  CHECK_THROWS_AS(fl::spectral_reference(mismatch, 1.0, nullptr),
                  std::invalid_argument);
}

TEST_CASE("operator csv dump is deterministic") {
  const fl::Domain iv = fl::Domain::Interval(-1.0, 1.0);
  const auto grid =
      std::make_shared<const fl::Grid>(fl::graded_grid(iv, 16, 2.0));
  const fl::DirichletOperator op = fl::build_dirichlet_operator(iv, grid, 1.2);
  std::ostringstream first;
  fl::dump_operator_csv(first, op);
  const std::string s = first.str();
  std::istringstream lines(s);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "i,j,entry");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 16 * 16);
  std::ostringstream second;
  fl::dump_operator_csv(second, op);
  CHECK(second.str() == s);
}
