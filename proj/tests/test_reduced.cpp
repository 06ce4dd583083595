#include <doctest.h>

#include <cmath>
#include <random>

#include "bohm/reduced.hpp"
#include "support.hpp"

using namespace bohm;

TEST_CASE("reduced parameters carry Xi sqrt(N) and a single particle") {
  for (const std::size_t n : {1u, 4u, 9u, 16u, 10000u}) {
    const auto p = test::fig4_with_n(n);
    const auto r = reduced_params(p);
    const auto direct = with_single_pointer(p, 10.0 * std::sqrt(static_cast<double>(n)), 1);
    CHECK(r == direct);  // bit-for-bit
    CHECK(r.n_particles() == 1);
  }
  CHECK_THROWS_AS(reduced_params(test::fig_params("fig7")), ModeError);
}

TEST_CASE("reduced velocity equals the full field's collective velocity") {
  for (const std::size_t n : {2u, 5u, 12u}) {
    const auto p = test::fig4_with_n(n);
    const double root_n = std::sqrt(static_cast<double>(n));
    std::mt19937_64 rng(31 + n);
    for (int k = 0; k < 100; ++k) {
      const auto c = test::random_support(p, rng);
      const auto v = velocity_analytic(c, p);
      const auto [dx, ds] = reduced_velocity({c.t, c.x, c.sigma_hat()}, p);
      CHECK(dx == doctest::Approx(v.dx).epsilon(1e-11).scale(p.velocity_scale_x()));
      CHECK(ds == doctest::Approx(v.dz.sum() / root_n).epsilon(1e-11).scale(p.velocity_scale_z()));
    }
  }
}

TEST_CASE("pointer spreading") {
  const auto p = test::fig_params("fig4");
  CHECK(pointer_spreading(0.0, p) == 1.0);
  const double k = p.velocity_scale_z();
  CHECK(pointer_spreading(3.0, p) == doctest::Approx(std::sqrt(1.0 + 4.0 * k * k * 9.0)));
}

TEST_CASE("reconstructed pointers match a full N = 5 integration") {
  const auto p = test::fig4_with_n(5);
  Eigen::VectorXd z0(5);
  z0 << 0.31, -0.42, 0.05, 0.77, -0.18;
  Configuration init;
  init.x = 3.0;
  init.z = z0;
  const auto shared = share(p);
  const IntegratorOptions opts;
  const auto full = integrate_trajectory(init, shared, opts, Backend::FullAnalytic);
  const auto red = integrate_trajectory(init, shared, opts, Backend::Reduced);
  REQUIRE(full.size() == red.size());
  REQUIRE(red.has_pointers());
  CHECK((full.z - red.z).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(red.z.row(0).transpose() == z0);  // exact at t′ = 0

  // Closure: the rebuilt particles sum back to Σ̂′.
  double closure = 0.0;
  for (Eigen::Index i = 0; i < red.z.rows(); ++i) {
    closure = std::max(closure, std::abs(red.z.row(i).sum() / std::sqrt(5.0) - red.sigma_hat[i]));
  }
  CHECK(closure <= 1e-12);
}

TEST_CASE("reconstruction rejects inconsistent initial data") {
  const auto p = test::fig4_with_n(3);
  const std::vector<double> t{0.0, 0.5}, s{0.0, 0.1};
  Eigen::VectorXd z0(3);
  z0 << 0.5, 0.0, 0.0;
  CHECK_THROWS_AS(reconstruct_pointers(t, s, z0, p), ConfigError);
}

TEST_CASE("sqrt(N) law: reduced trajectories depend on N only through Xi sqrt(N)") {
  // Same Ξ√N from (Ξ, N) = (10, 4) and (20, 1) gives bit-identical runs.
  auto base = test::fig_params("fig4");
  const auto a = with_single_pointer(base, 10.0, 4);
  const auto b = with_single_pointer(base, 20.0, 1);
  Configuration ia, ib;
  ia.x = ib.x = 2.6;
  ia.z = Eigen::VectorXd::Constant(4, 0.05);
  ib.z = Eigen::VectorXd::Constant(1, 0.1);  // same Σ̂′ = 0.1
  const IntegratorOptions opts;
  const auto ta = integrate_trajectory(ia, share(a), opts, Backend::Reduced, false);
  const auto tb = integrate_trajectory(ib, share(b), opts, Backend::Reduced, false);
  CHECK(ta.x == tb.x);
  CHECK(ta.sigma_hat == tb.sigma_hat);
}
