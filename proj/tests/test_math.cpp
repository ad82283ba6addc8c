#include <doctest.h>

#include <cmath>

#include "fairaudit/math.hpp"

using namespace fairaudit;

TEST_CASE("chisq_sf matches closed forms for even df") {
  // df=2: exp(-x/2); df=4: exp(-x/2) * (1 + x/2).
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 11.98, 30.0, 100.0}) {
    CHECK(chisq_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    CHECK(chisq_sf(x, 4.0) ==
          doctest::Approx(std::exp(-x / 2.0) * (1.0 + x / 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("chisq_sf matches erfc form for df=1") {
  for (double x : {0.01, 0.5, 1.0, 3.84, 6.63, 12.5, 25.0, 60.0})
    CHECK(chisq_sf(x, 1.0) == doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-12));
}

TEST_CASE("chisq_sf edge behavior") {
  CHECK(chisq_sf(0.0, 1.0) == 1.0);
  CHECK(chisq_sf(-3.0, 4.0) == 1.0);
  CHECK(chisq_sf(1e4, 1.0) >= 0.0);
  CHECK(chisq_sf(1e4, 1.0) < 1e-300);  // deep tail underflows cleanly
  CHECK_THROWS(chisq_sf(1.0, 0.0));
}

TEST_CASE("gamma_p and gamma_q are complementary") {
  for (double a : {0.5, 1.0, 2.0, 5.5})
    for (double x : {0.01, 0.5, 1.0, 4.0, 12.0})
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric eigendecomposition reconstructs small matrices") {
  // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
  const auto eig = symmetric_eigen({2.0, 1.0, 1.0, 2.0}, 2);
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("pseudo-inverse quadratic form handles rank deficiency") {
  // diag(2, 0): rank 1, d = (3, 5) -> 3^2 / 2.
  const auto qf = pseudo_inverse_quadratic({2.0, 0.0, 0.0, 0.0}, 2, {3.0, 5.0});
  CHECK(qf.rank == 1);
  CHECK(qf.value == doctest::Approx(4.5).epsilon(1e-12));

  // Full-rank identity: value = |d|^2.
  const auto full = pseudo_inverse_quadratic({1.0, 0.0, 0.0, 1.0}, 2, {3.0, 4.0});
  CHECK(full.rank == 2);
  CHECK(full.value == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
