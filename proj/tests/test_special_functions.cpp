#include <cmath>

#include "dirireg/errors.hpp"
#include "dirireg/special_functions.hpp"
#include "doctest.h"

using namespace dirireg;

TEST_CASE("digamma matches high-precision reference values") {
    // Reference values from a 40-digit arbitrary-precision evaluation.
    CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-12));
    CHECK(std::abs(digamma(0.1) - (-10.423754940411077)) < 1e-10);
    CHECK(std::abs(digamma(3.7) - 1.1671535393615114) < 1e-10);
    CHECK(std::abs(digamma(15.25) - 2.6914344449562922) < 1e-10);
    CHECK(std::abs(digamma(250.5) - 5.5214615845270464) < 1e-10);
    CHECK_THROWS_AS(digamma(0.0), DomainError);
    CHECK_THROWS_AS(digamma(-1.5), DomainError);
}

TEST_CASE("trigamma matches high-precision reference values") {
    CHECK(std::abs(trigamma(1.0) - 1.6449340668482264) < 1e-10);  // pi^2/6
    CHECK(std::abs(trigamma(0.1) - 101.43329915079276) < 1e-8);
    CHECK(std::abs(trigamma(3.7) - 0.3100378576700383) < 1e-10);
    CHECK(std::abs(trigamma(15.25) - 0.06777068354404792) < 1e-10);
    CHECK(std::abs(trigamma(250.5) - 0.003999994666696533) < 1e-12);
    CHECK_THROWS_AS(trigamma(0.0), DomainError);
}

TEST_CASE("inverse_digamma round-trips") {
    CHECK(std::abs(inverse_digamma(-0.5772156649015329) - 1.0) < 1e-10);
    for (double x : {0.1, 1.0, 10.0, 100.0}) {
        CHECK(std::abs(inverse_digamma(digamma(x)) - x) < 1e-8 * (1.0 + x));
    }
}

TEST_CASE("normal tail helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_two_sided_p(0.0) == doctest::Approx(1.0));
    CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-6));
}
