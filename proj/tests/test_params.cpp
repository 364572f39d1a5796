#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "taxis/params.hpp"

using namespace taxis;

TEST_CASE("functional response values") {
  FunctionalResponse f{ResponseKind::Holling2, 1.0, 1.0};
  CHECK(f(1.0) == doctest::Approx(0.5));
  CHECK(f(0.0) == 0.0);
  CHECK_THROWS_AS(f(-0.1), DomainError);

  FunctionalResponse h1{ResponseKind::Holling1, 2.0, 0.0};
  CHECK(h1(3.0) == doctest::Approx(6.0));

  FunctionalResponse h3{ResponseKind::Holling3, 1.0, 1.0};
  CHECK(h3(2.0) == doctest::Approx(4.0 / 5.0));
}

TEST_CASE("functional response validation") {
  CHECK_THROWS_AS((FunctionalResponse{ResponseKind::Holling3, 1.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((FunctionalResponse{ResponseKind::Holling2, 0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((FunctionalResponse{ResponseKind::Holling2, 1.0, -1.0}.validate()), ConfigError);
  CHECK_NOTHROW((FunctionalResponse{ResponseKind::Holling1, 1.0, 0.0}.validate()));
}

TEST_CASE("sampled Lipschitz and growth constants") {
  for (auto kind : {ResponseKind::Holling1, ResponseKind::Holling2, ResponseKind::Holling3}) {
    for (double m : {0.1, 1.0, 4.0}) {
      const FunctionalResponse f{kind, 1.5, m};
      double max_slope = 0.0, max_ratio = 0.0;
      const double dv = 1e-4;
      for (double v = dv; v < 50.0; v += dv) {
        max_slope = std::max(max_slope, std::abs(f(v + dv) - f(v)) / dv);
        max_ratio = std::max(max_ratio, f(v) / v);
        // derivative agrees with a centered difference
        const double fd = (f(v + 1e-6) - f(v - std::min(v, 1e-6))) / (1e-6 + std::min(v, 1e-6));
        CHECK(std::abs(fd - f.derivative(v)) < 1e-4);
        if (v > 0.05) v += 10 * dv;
      }
      CAPTURE(to_string(kind));
      CAPTURE(m);
      CHECK(max_slope <= f.lipschitz() + 1e-9);
      CHECK(max_slope >= 0.99 * f.lipschitz());
      CHECK(max_ratio <= f.growth_bound() + 1e-9);
      CHECK(max_ratio >= 0.99 * f.growth_bound());
    }
  }
}

TEST_CASE("parameter validation") {
  CompetitionParams p;
  CHECK_NOTHROW(p.validate());
  p.eps = 2.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.eps = 1.0;
  CHECK_NOTHROW(p.validate());
  p.eps = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  PredPreyParams q;
  CHECK_NOTHROW(q.validate());
  q.mu1 = -3.0;  // any sign allowed
  CHECK_NOTHROW(q.validate());
  q.mu1_prime = 0.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("model parameter helpers") {
  ModelParams c = CompetitionParams{};
  ModelParams q = PredPreyParams{};
  CHECK(taxis_sign_of(c) == 1);
  CHECK(taxis_sign_of(q) == -1);
  CHECK(epsilon_of(with_epsilon(q, 0.25)) == 0.25);
  CHECK(is_competition(c));
  CHECK_FALSE(is_competition(q));
  CHECK(chi_of(c) == 1.0);
}
