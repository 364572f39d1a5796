#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "taxis/integrator.hpp"
#include "taxis/operators.hpp"

using namespace taxis;
using std::numbers::pi;

namespace {

Field<double> random_field(const GridSpec& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(g.size());
  for (auto& x : v) x = dist(rng);
  return Field<double>(g, v);
}

double dot(const Field<double>& a, const Field<double>& b) { return a.values().dot(b.values()); }

}  // namespace

TEST_CASE("laplacian of constants and cosines") {
  const GridSpec g = GridSpec::line(256);
  CHECK(norm_lp(laplacian_neumann(Field<double>::constant(g, 3.0)), Norm::Linf) == 0.0);

  const auto f = Field<double>::sample(g, [](double x) { return std::cos(pi * x); });
  const auto exact = Field<double>::sample(g, [](double x) { return -pi * pi * std::cos(pi * x); });
  CHECK(norm_lp(laplacian_neumann(f) - exact, Norm::Linf) <= 1e-3);

  const GridSpec g2 = GridSpec::rect(64, 64);
  const auto f2 = Field<double>::sample(g2, [](double x, double y) { return std::cos(pi * x) * std::cos(2 * pi * y); });
  const auto e2 = Field<double>::sample(
      g2, [](double x, double y) { return -5 * pi * pi * std::cos(pi * x) * std::cos(2 * pi * y); });
  CHECK(norm_lp(laplacian_neumann(f2) - e2, Norm::Linf) <= 0.05);
}

TEST_CASE("laplacian is symmetric and conservative") {
  std::mt19937_64 rng(11);
  for (const GridSpec& g : {GridSpec::line(40, 2.0), GridSpec::rect(12, 9, 1.0, 0.7)}) {
    const auto f = random_field(g, rng, -1, 1), h = random_field(g, rng, -1, 1);
    CHECK(dot(laplacian_neumann(f), h) == doctest::Approx(dot(f, laplacian_neumann(h))).epsilon(1e-12));
    CHECK(dot(laplacian_neumann(f), f) <= 0.0);
    CHECK(std::abs(integrate(laplacian_neumann(f))) <= 1e-12 * norm_lp(f, Norm::L2) / (g.min_spacing() * g.min_spacing()));
  }
}

TEST_CASE("upwind taxis worked example") {
  const GridSpec g = GridSpec::line(3, 3.0);  // h = 1
  Eigen::Vector3d u{1, 2, 1}, w{0, 1, 0};
  const auto out = taxis_divergence(Field<double>(g, u), Field<double>(g, w), 1.0, +1);

  // Independent face bookkeeping: the term is +chi div(u grad w), so
  // material moves down grad w, out of the middle cell, carrying its density.
  // face (0,1): grad w = 1, material moves left, donor = cell 1, flux 2
  // face (1,2): grad w = -1, material moves right, donor = cell 1, flux -2
  const double f01 = 1.0 * 2.0, f12 = -1.0 * 2.0;
  const Eigen::Vector3d expect{f01, f12 - f01, -f12};
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(expect[i]));
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(-4.0));
  CHECK(out[2] == doctest::Approx(2.0));

  // attraction moves material towards the peak
  const auto att = taxis_divergence(Field<double>(g, u), Field<double>(g, w), 1.0, -1);
  CHECK(att[0] == doctest::Approx(-1.0));
  CHECK(att[1] == doctest::Approx(2.0));
  CHECK(att[2] == doctest::Approx(-1.0));
}

TEST_CASE("taxis divergence properties") {
  const GridSpec g = GridSpec::line(16);
  const auto u = Field<double>::constant(g, 1.0);
  const auto flat = Field<double>::constant(g, 5.0);
  CHECK(norm_lp(taxis_divergence(u, flat, 2.0, 1), Norm::Linf) == 0.0);
  CHECK(norm_lp(taxis_divergence(u, u, 0.0, 1), Norm::Linf) == 0.0);

  Eigen::VectorXd neg = Eigen::VectorXd::Ones(16);
  neg[4] = -1e-6;
  CHECK_THROWS_AS(taxis_divergence(Field<double>(g, neg), u, 1.0, 1), DomainError);
  neg[4] = -1e-13;  // within tolerance
  CHECK_NOTHROW(taxis_divergence(Field<double>(g, neg), u, 1.0, 1));
  CHECK_THROWS_AS(taxis_divergence(u, u, 1.0, 2), DomainError);
}

TEST_CASE("explicit upwind update preserves positivity under the CFL bound") {
  std::mt19937_64 rng(3);
  for (const GridSpec& g : {GridSpec::line(50), GridSpec::rect(15, 15)}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto u = random_field(g, rng, 0.0, 2.0);
      const auto w = random_field(g, rng, 0.0, 3.0);
      for (int sign : {1, -1}) {
        const double vmax = max_face_velocity(w, 1.5);
        const double dt = 0.5 * g.min_spacing() / (g.dim() * vmax);
        const auto next = u + dt * taxis_divergence(u, w, 1.5, sign);
        CHECK(next.min() >= -1e-14);
      }
    }
  }
}

TEST_CASE("divergence operators conserve mass on random fields") {
  std::mt19937_64 rng(2024);
  int worst_fail = 0;
  for (int k = 0; k < 1000; ++k) {
    const GridSpec g = k % 2 ? GridSpec::line(64) : GridSpec::rect(16, 12, 1.0, 2.0);
    const auto f = random_field(g, rng, 0.0, 1.0);
    const auto w = random_field(g, rng, 0.0, 1.0);
    const double scale = norm_lp(f, Norm::L2);
    if (std::abs(integrate(laplacian_neumann(f))) > 1e-12 * scale) ++worst_fail;
    if (std::abs(integrate(taxis_divergence(f, w, 1.0, k % 3 ? 1 : -1))) > 1e-12 * scale) ++worst_fail;
  }
  CHECK(worst_fail == 0);
}

TEST_CASE("kinetics") {
  CompetitionParams p;
  const auto [a, b] = kinetics(p, 2.0 / 3.0, 2.0 / 3.0);
  CHECK(std::abs(a) < 1e-15);
  CHECK(std::abs(b) < 1e-15);
  const auto [c, d] = kinetics(p, 0.5, 0.2);
  CHECK(c == doctest::Approx(0.5 * (1 - 0.5 - 0.1)));
  CHECK(d == doctest::Approx(0.2 * (1 - 0.2 - 0.25)));

  PredPreyParams q;
  const auto [z, v] = kinetics(q, 1.0, 1.0);
  CHECK(z == doctest::Approx(-0.2 - 0.5 + 0.5));
  CHECK(v == doctest::Approx(0.0 - 0.5));
  CHECK_THROWS_AS(kinetics(q, 1.0, -1e-3), DomainError);
}

TEST_CASE("cfl_dt examples") {
  const GridSpec g = GridSpec::line(100);  // h = 0.01
  const auto zero = Field<double>::constant(g, 0.0);
  const auto w = Field<double>::sample(g, [](double x) { return 2.0 * x; });  // face slope 2
  TimeSpec ts;
  ts.dt_max = 1.0;
  CompetitionParams p;
  CHECK(cfl_dt(zero, zero, w, p, ts) == doctest::Approx(2.5e-3));
  p.chi = 2.0;
  CHECK(cfl_dt(zero, zero, w, p, ts) == doctest::Approx(1.25e-3));

  // no velocity, small reactions -> dt_max
  ts.dt_max = 1e-2;
  CHECK(cfl_dt(zero, zero, Field<double>::constant(g, 0.7), ModelParams{p}, ts) == 1e-2);
}
