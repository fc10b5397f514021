#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fl/chebyshev.hpp"
#include "fl/quadrature.hpp"

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("smooth integrands to near machine precision") {
  fl::QuadOptions opt;
  CHECK(fl::integrate([](double x) { return x * x; }, 0.0, 1.0, opt) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(fl::integrate([](double x) { return std::sin(x); }, 0.0, kPi, opt) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(fl::integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0,
                      opt) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
}

TEST_CASE("panel splitting tames a damped oscillation") {
  fl::QuadOptions opt;
  const double a = 0.1;
  const double L = 100.0 * kPi;
  std::vector<double> pts;
  for (int j = 0; j <= 100; ++j) pts.push_back(j * kPi);
  const double got = fl::integrate_panels(
      [&](double x) { return std::exp(-a * x) * std::sin(x); }, pts, opt);
  const double want = (1.0 - std::exp(-a * L)) / (1.0 + a * a);
  CHECK(got == doctest::Approx(want).epsilon(1e-11));
}

TEST_CASE("integrable endpoint singularities") {
  fl::QuadOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-10;
  CHECK(fl::integrate([](double x) { return std::log(x); }, 0.0, 1.0, opt) ==
        doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(fl::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                      opt) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("a divergent integrand exhausts the budget and throws") {
  fl::QuadOptions opt;
  CHECK_THROWS_AS(fl::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0,
                                opt),
                  fl::QuadratureError);
}

TEST_CASE("graded breakpoints cluster toward the singular end") {
  const auto pts = fl::graded_breakpoints(0.0, 8.0, 20);
  REQUIRE(pts.size() >= 3);
  CHECK(pts.front() == 0.0);
  CHECK(pts.back() == 8.0);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
  // spacing grows away from the singularity
  CHECK(pts[1] - pts[0] < pts[pts.size() - 1] - pts[pts.size() - 2]);
}

TEST_CASE("chebyshev interpolation of analytic functions") {
  fl::ChebInterp e([](double x) { return std::exp(x); }, 0.0, 1.0, 24);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    worst = std::max(worst, std::abs(e(x) - std::exp(x)));
  }
  CHECK(worst < 1e-13);
  CHECK(e.tail_estimate() < 1e-12);

  fl::ChebInterp r([](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, -1.0,
                   1.0, 96);
  worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + i / 100.0;
    worst = std::max(worst, std::abs(r(x) - 1.0 / (1.0 + 25.0 * x * x)));
  }
  CHECK(worst < 1e-7);
}
