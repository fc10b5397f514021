#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fl/domain.hpp"
#include "fl/weighted_norms.hpp"

namespace {

const double kPi = 3.14159265358979323846;

using Profile = std::function<double(double rho, double x)>;

fl::GridFunction sample(const fl::Domain& d, int n, double grading,
                        const Profile& f, double trunc = 0.0) {
  auto grid = std::make_shared<const fl::Grid>(
      bounded(d) ? fl::graded_grid(d, n, grading)
                 : fl::graded_grid(d, n, grading, trunc));
  fl::GridFunction u;
  u.grid = grid;
  u.values.resize(grid->nodes.size());
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = f(grid->dist[i], grid->nodes[i]);
  return u;
}

const Profile one = [](double, double) { return 1.0; };
const Profile sqrho = [](double r, double) { return std::sqrt(r); };
const Profile getoor = [](double, double x) { return std::sqrt(1.0 - x * x); };

}  // namespace

TEST_CASE("exact norm values") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  const fl::WeightSpec s{2.0, 1.0, 0.0};

  // ||1||_{2,1} = (int_D rho^0)^{1/2} = sqrt(2): cell measures sum exactly
  auto u1 = sample(I, 512, 2.0, one);
  CHECK(fl::weighted_lp_norm(u1, s) == doctest::Approx(std::sqrt(2.0))
                                           .epsilon(1e-13));

  // ||rho^{1/2}||_{2,1}^2 = int_D rho = 1
  auto u2 = sample(I, 512, 2.0, sqrho);
  CHECK(fl::weighted_lp_norm(u2, s) == doctest::Approx(1.0).epsilon(1e-5));

  // disc, u == 1, theta = d: norm = sqrt(pi R^2)
  const fl::Domain B = fl::Domain::Ball({0.0, 0.0, 0.0}, 1.0, 2);
  auto ub = sample(B, 256, 2.0, one);
  CHECK(fl::weighted_lp_norm(ub, fl::WeightSpec{2.0, 2.0, 0.0}) ==
        doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));

  // half-line, u = rho^{1/2} e^{-rho}: int_0^inf rho e^{-2rho} = 1/4
  const fl::Domain H = fl::Domain::HalfLine();
  auto uh = sample(H, 1024, 2.0,
                   [](double r, double) { return std::sqrt(r) * std::exp(-r); },
                   40.0);
  CHECK(fl::weighted_lp_norm(uh, s) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("norm axioms") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  const fl::WeightSpec s{2.5, 1.3, -0.3};
  auto ua = sample(I, 512, 2.0, sqrho);
  auto ub = sample(I, 512, 2.0, [](double r, double x) {
    return std::cos(3.0 * x) * (1.0 - r * r);
  });

  fl::GridFunction usum = ua;
  for (std::size_t i = 0; i < usum.values.size(); ++i)
    usum.values[i] += ub.values[i];
  const double na = fl::weighted_lp_norm(ua, s);
  const double nb = fl::weighted_lp_norm(ub, s);
  const double ns = fl::weighted_lp_norm(usum, s);
  CHECK(na > 0.0);
  CHECK(ns <= na + nb + 1e-10 * (na + nb));

  fl::GridFunction uscaled = ua;
  for (auto& v : uscaled.values) v *= -7.25;
  CHECK(fl::weighted_lp_norm(uscaled, s) ==
        doctest::Approx(7.25 * na).epsilon(1e-12));

  fl::GridFunction uzero = ua;
  for (auto& v : uzero.values) v = 0.0;
  CHECK(fl::weighted_lp_norm(uzero, s) == 0.0);
  CHECK(fl::besov_seminorm(uzero, 0.4, s) == 0.0);

  // besov homogeneity and vanishing on constants
  auto uc = sample(I, 256, 2.0, one);
  CHECK(fl::besov_seminorm(uc, 0.5, fl::WeightSpec{2.0, 1.0, 0.0}) == 0.0);
  auto va = sample(I, 256, 2.0, sqrho);
  fl::GridFunction vb = va;
  for (auto& v : vb.values) v *= 3.5;
  CHECK(fl::besov_seminorm(vb, 0.4, fl::WeightSpec{2.0, 1.0, 0.0}) ==
        doctest::Approx(3.5 *
                        fl::besov_seminorm(va, 0.4,
                                           fl::WeightSpec{2.0, 1.0, 0.0}))
            .epsilon(1e-12));
}

TEST_CASE("refinement ladder at the integrability boundary") {
  // theta - d = -0.98 keeps the weighted integral finite, -1.02 loses it.
  // The midpoint rule on a power-graded grid cannot settle either one at
  // this node count (the first-cell sample sits a factor 2^g below the cell
  // top), so both climb under grading escalation and both flag; the only
  // surviving directional signal is that the non-integrable side climbs
  // faster at every rung.
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  const std::vector<double> ladder = {2.0, 4.0, 6.0};

  const auto norms = [&](double theta) {
    std::vector<double> v;
    for (double g : ladder) {
      auto u = sample(I, 512, g, sqrho);
      v.push_back(
          fl::weighted_lp_norm(u, fl::WeightSpec{2.0, theta, -0.5}));
    }
    return v;
  };
  const std::vector<double> conv = norms(0.02);
  const std::vector<double> divg = norms(-0.02);

  CHECK(conv[0] == doctest::Approx(7.43563).epsilon(1e-5));
  CHECK(conv[1] == doctest::Approx(10.9178).epsilon(1e-5));
  CHECK(conv[2] == doctest::Approx(16.4941).epsilon(1e-5));
  CHECK(divg[0] == doctest::Approx(8.67449).epsilon(1e-5));
  CHECK(divg[1] == doctest::Approx(15.9601).epsilon(1e-5));
  CHECK(divg[2] == doctest::Approx(33.0056).epsilon(1e-5));

  const auto rc = fl::assess_ladder(conv);
  const auto rd = fl::assess_ladder(divg);
  CHECK(rc.divergent);
  CHECK(rd.divergent);
  for (std::size_t k = 0; k < rc.ratios.size(); ++k)
    CHECK(rd.ratios[k] > rc.ratios[k]);

  // far from the boundary exponent the same ladder is quiet
  std::vector<double> stable;
  for (double g : ladder) {
    auto u = sample(I, 512, g, sqrho);
    stable.push_back(
        fl::weighted_lp_norm(u, fl::WeightSpec{2.0, 1.0, -0.5}));
  }
  CHECK_FALSE(fl::assess_ladder(stable).divergent);
}

TEST_CASE("sobolev norms") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  const fl::WeightSpec s{2.0, 1.0, 0.0};

  // constants: the derivative terms vanish identically
  auto c1 = sample(I, 512, 2.0, one);
  CHECK(fl::weighted_sobolev_norm(c1, 1, s) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(fl::weighted_sobolev_norm(c1, 2, s) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  // rho^{1/2}: ||u|| + ||rho u'|| = 1 + 1/2, stable under refinement
  auto ua = sample(I, 512, 2.0, sqrho);
  auto ub = sample(I, 1024, 2.0, sqrho);
  const double n1a = fl::weighted_sobolev_norm(ua, 1, s);
  const double n1b = fl::weighted_sobolev_norm(ub, 1, s);
  CHECK(n1a == doctest::Approx(1.49708).epsilon(1e-4));
  CHECK(n1b == doctest::Approx(1.49854).epsilon(1e-4));
  CHECK(std::fabs(n1b - n1a) / n1a < 2e-3);

  // its distributional second derivative carries a line mass at the center
  // kink, and the n = 2 norm honestly grows under refinement
  const double n2a = fl::weighted_sobolev_norm(ua, 2, s);
  const double n2b = fl::weighted_sobolev_norm(ub, 2, s);
  CHECK(n2a == doctest::Approx(9.46992).epsilon(1e-4));
  CHECK(n2b / n2a > 1.2);

  // smooth boundary-decay profile: all orders settle, psi-weighted
  const fl::WeightSpec sg{2.0, 1.0, -0.5};
  auto ga = sample(I, 512, 2.0, getoor);
  auto gb = sample(I, 1024, 2.0, getoor);
  const double g1a = fl::weighted_sobolev_norm(ga, 1, sg);
  const double g1b = fl::weighted_sobolev_norm(gb, 1, sg);
  const double g2a = fl::weighted_sobolev_norm(ga, 2, sg);
  const double g2b = fl::weighted_sobolev_norm(gb, 2, sg);
  CHECK(g1a == doctest::Approx(3.25967).epsilon(1e-4));
  CHECK(g2a == doctest::Approx(4.44246).epsilon(1e-4));
  CHECK(std::fabs(g1b - g1a) / g1a < 1e-3);
  CHECK(std::fabs(g2b - g2a) / g2a < 1e-3);
}

TEST_CASE("besov seminorms") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  const fl::WeightSpec s{2.0, 1.0, 0.0};

  // rho^{1/2} at theta = d: the weight rho^{gamma p} compensates the
  // quotient for every gamma < 1, and both exponents settle under
  // N-refinement at fixed grading
  const auto run = [&](double gam) {
    std::vector<double> v;
    for (int n : {128, 256, 512})
      v.push_back(fl::besov_seminorm(sample(I, n, 2.0, sqrho), gam, s));
    return v;
  };
  const auto b4 = run(0.4);
  const auto b6 = run(0.6);
  CHECK(b4[0] == doctest::Approx(0.593136).epsilon(1e-5));
  CHECK(b4[2] == doctest::Approx(0.596352).epsilon(1e-5));
  CHECK(b6[0] == doctest::Approx(0.640909).epsilon(1e-5));
  CHECK(b6[2] == doctest::Approx(0.657179).epsilon(1e-5));
  CHECK_FALSE(fl::assess_ladder(b4).divergent);
  CHECK_FALSE(fl::assess_ladder(b6).divergent);

  // a genuinely non-integrable pair corner ignites the ladder:
  // rho^{0.1} with theta - d + p beta = -1.3 < -1
  const fl::WeightSpec sd{2.0, -0.5, 0.0};
  std::vector<double> v;
  for (double g : {2.0, 6.0, 18.0})
    v.push_back(fl::besov_seminorm(
        sample(I, 256, g, [](double r, double) { return std::pow(r, 0.1); }),
        0.3, sd));
  CHECK(v[0] == doctest::Approx(11.0665).epsilon(1e-4));
  CHECK(v[1] / v[0] > 10.0);
  CHECK(v[2] / v[1] > 10.0);
  CHECK(fl::assess_ladder(v).divergent);
}

TEST_CASE("holder norms") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);

  // u == 1, a = 0: quotient term vanishes, sup term is exactly 1
  auto u1 = sample(I, 512, 2.0, one);
  CHECK(fl::weighted_holder_norm(u1, fl::HolderSpec{0.5, 0.0}) == 1.0);

  // rho^{1/2} with a = -1/2: sup psi^{-1/2} rho^{1/2} lands inside the
  // psi/rho bracket and the delta = 1/2 quotient contributes about 1
  auto u2 = sample(I, 512, 2.0, sqrho);
  auto u2b = sample(I, 1024, 2.0, sqrho);
  const double h2 = fl::weighted_holder_norm(u2, fl::HolderSpec{0.5, -0.5});
  const double h2b = fl::weighted_holder_norm(u2b, fl::HolderSpec{0.5, -0.5});
  CHECK(h2 == doctest::Approx(2.86174).epsilon(1e-4));
  CHECK(std::fabs(h2b - h2) / h2 < 1e-3);
  CHECK(h2 > 1.0);
  CHECK(h2 < 1.0 + std::sqrt(1.0 / 0.25));  // sup0 <= bracket^{1/2}, sup1 <= 1

  // negative total weight power a + delta: the pair supremum against
  // interior points climbs like psi_min^{a+delta} as the grid resolves the
  // boundary, and the norm as specified has no finite continuum value
  auto u3 = sample(I, 512, 2.0, getoor);
  auto u3b = sample(I, 1024, 2.0, getoor);
  const double h3 = fl::weighted_holder_norm(u3, fl::HolderSpec{0.05, -0.45});
  const double h3b =
      fl::weighted_holder_norm(u3b, fl::HolderSpec{0.05, -0.45});
  CHECK(h3 == doctest::Approx(240.592).epsilon(1e-4));
  CHECK(h3b / h3 > 1.2);

  // positive total weight power: finite and refinement-stable
  const fl::HolderSpec hp{0.45, -0.40};  // a + delta = +0.05
  const double p3 = fl::weighted_holder_norm(u3, hp);
  const double p3b = fl::weighted_holder_norm(u3b, hp);
  CHECK(std::fabs(p3b - p3) / p3 < 2e-2);
}

TEST_CASE("boundary decay fits") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  auto u2 = sample(I, 1024, 2.0, sqrho);
  auto u3 = sample(I, 1024, 2.0, getoor);
  auto u75 = sample(I, 1024, 2.0,
                    [](double r, double) { return std::pow(r, 0.75); });
  CHECK(fl::fit_boundary_decay(u2, 1e-3, 1e-1) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fl::fit_boundary_decay(u75, 1e-3, 1e-1) ==
        doctest::Approx(0.75).epsilon(1e-9));
  CHECK(fl::fit_boundary_decay(u3, 1e-3, 1e-1) ==
        doctest::Approx(0.5).epsilon(0.02));

  const fl::Domain H = fl::Domain::HalfLine();
  auto uh = sample(H, 1024, 2.0,
                   [](double r, double) { return std::sqrt(r) * std::exp(-r); },
                   40.0);
  CHECK(fl::fit_boundary_decay(uh, 1e-3, 1e-1) ==
        doctest::Approx(0.478187).epsilon(1e-3));

  // an asymmetric profile: the shallower side wins
  auto ua = sample(I, 1024, 2.0, [](double r, double x) {
    return x < 0.0 ? std::pow(r, 0.3) : std::pow(r, 0.9);
  });
  CHECK(fl::fit_boundary_decay(ua, 1e-3, 1e-1) ==
        doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("weight shift comparability") {
  // {p, theta, d0} against {p, theta + d p, d0 - d}: the integrands differ
  // by (rho/psi)^{d p}, so the two norms sit inside the psi/rho bracket
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  auto u = sample(I, 512, 2.0, sqrho);
  const double d0 = -0.5, dd = 0.5, p = 2.0;
  const double va =
      fl::weighted_lp_norm(u, fl::WeightSpec{p, 1.0, d0});
  const double vb =
      fl::weighted_lp_norm(u, fl::WeightSpec{p, 1.0 + dd * p, d0 - dd});
  const double r = vb / va;
  CHECK(r == doctest::Approx(1.46783).epsilon(1e-5));
  CHECK(r > 1.0);
  CHECK(r < std::pow(4.0, dd));  // bracket psi/rho in [1/4, 4]
}

TEST_CASE("ladder assessment semantics") {
  const auto quiet = fl::assess_ladder({1.0, 1.05, 1.02});
  CHECK_FALSE(quiet.divergent);
  CHECK(quiet.ratios.size() == 2);
  CHECK(quiet.ratios[0] == doctest::Approx(1.05));

  CHECK(fl::assess_ladder({1.0, 1.2, 1.21}).divergent);
  CHECK(fl::assess_ladder({1.0, 0.85, 0.86}).divergent);  // either direction
  CHECK_FALSE(fl::assess_ladder({0.0, 0.0}).divergent);
  CHECK(fl::assess_ladder({0.0, 0.5}).divergent);
  CHECK_FALSE(fl::assess_ladder({5.0}).divergent);
  CHECK_FALSE(fl::assess_ladder({1.0, 1.3}, 0.5).divergent);
  CHECK_THROWS_AS(fl::assess_ladder({1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fl::assess_ladder({1.0, 2.0}, 0.0), std::invalid_argument);
}

TEST_CASE("argument validation") {
  const fl::Domain I = fl::Domain::Interval(-1.0, 1.0);
  auto u = sample(I, 64, 2.0, sqrho);

  CHECK_THROWS_AS(fl::weighted_lp_norm(u, fl::WeightSpec{1.0, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::weighted_lp_norm(u, fl::WeightSpec{0.5, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::weighted_sobolev_norm(u, 3, fl::WeightSpec{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::weighted_sobolev_norm(u, -1, fl::WeightSpec{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::besov_seminorm(u, 0.0, fl::WeightSpec{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::besov_seminorm(u, 1.0, fl::WeightSpec{}),
                  std::invalid_argument);
  // weight integrability precondition: theta - d + gamma p <= -1
  CHECK_THROWS_AS(fl::besov_seminorm(u, 0.3, fl::WeightSpec{2.0, -0.7, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::weighted_holder_norm(u, fl::HolderSpec{0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::weighted_holder_norm(u, fl::HolderSpec{1.5, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::fit_boundary_decay(u, 0.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::fit_boundary_decay(u, 0.2, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fl::fit_boundary_decay(u, 1e-3, 0.6),  // beyond inradius/2
                  std::invalid_argument);
  // too few usable window nodes
  CHECK_THROWS_AS(fl::fit_boundary_decay(u, 1e-3, 2e-3),
                  std::invalid_argument);

  fl::GridFunction bad = u;
  bad.values.pop_back();
  CHECK_THROWS_AS(fl::weighted_lp_norm(bad, fl::WeightSpec{}),
                  std::invalid_argument);
  fl::GridFunction empty;
  CHECK_THROWS_AS(fl::weighted_lp_norm(empty, fl::WeightSpec{}),
                  std::invalid_argument);

  // besov is restricted to 1-d grids
  const fl::Domain B = fl::Domain::Ball({0.0, 0.0, 0.0}, 1.0, 2);
  auto ub = sample(B, 64, 2.0, one);
  CHECK_THROWS_AS(fl::besov_seminorm(ub, 0.4, fl::WeightSpec{2.0, 2.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("norm table csv") {
  std::vector<fl::NormRow> rows(2);
  rows[0] = {"lp", 2.0, 1.0, -0.5, 1.25, 1.5, false};
  rows[1] = {"besov", 2.0, -0.5, 0.0, 11.5, 132.25, true};
  std::ostringstream a, b;
  fl::dump_norm_table_csv(a, rows);
  fl::dump_norm_table_csv(b, rows);
  const std::string sa = a.str();
  CHECK(sa == b.str());
  CHECK(sa.substr(0, 67) ==
        "norm_kind,p,theta,psi_power,value,refinement_ratio,"
        "divergence_flag\n");
  CHECK(sa.find("lp,2,1,-0.5,1.25,1.5,0\n") != std::string::npos);
  CHECK(sa.find("besov,2,-0.5,0,11.5,132.25,1\n") != std::string::npos);
  std::ostringstream c;
  fl::dump_norm_table_csv(c, {});
  CHECK(c.str() ==
        "norm_kind,p,theta,psi_power,value,refinement_ratio,"
        "divergence_flag\n");
}
