#include <cmath>
#include <vector>

#include <doctest.h>

#include "conproc/account.hpp"
#include "conproc/errors.hpp"
#include "test_util.hpp"

using namespace conproc;

namespace {

// Random regular consumption: pick fractions and convert to rates.
AccountState random_regular(testutil::Rng& rng, std::size_t epochs) {
    std::vector<double> s(epochs);
    s[0] = rng.uniform(100.0, 10000.0);
    for (std::size_t k = 1; k < epochs; ++k)
        s[k] = s[k - 1] * rng.uniform(0.6, 1.5);
    std::vector<double> z(epochs);
    for (std::size_t k = 0; k < epochs; ++k) z[k] = rng.uniform(0.0, 0.9);
    return absolute_from_relative(s, z);
}

}  // namespace

TEST_SUITE("account") {

TEST_CASE("one step of the account recursion") {
    const std::vector<double> s{10000.0, 10200.0};
    const std::vector<double> x{999.90};
    const std::vector<double> a = evolve_account(s, x);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == 10000.0);
    CHECK(std::abs(a[1] - 9180.10) <= 0.02);
}

TEST_CASE("account satisfies the product closed form") {
    testutil::Rng rng(1001);
    for (int trial = 0; trial < 50; ++trial) {
        const AccountState st =
            random_regular(rng, static_cast<std::size_t>(rng.uniform_int(1, 12)));
        const std::vector<double> a = evolve_account(st.s, st.x);
        double consumed = 0.0;  // sum of x_i / s_i
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double closed = (1.0 - consumed) * st.s[k];
            CHECK(std::abs(a[k] - closed) <= 1e-12 * st.s[0] + 1e-9 * std::abs(closed));
            consumed += st.x[k] / st.s[k];
        }
    }
}

TEST_CASE("terminal rate does not move the account") {
    const std::vector<double> s{100.0, 110.0, 121.0};
    const std::vector<double> x_short{10.0, 20.0};
    const std::vector<double> x_full{10.0, 20.0, 77.0};
    CHECK(evolve_account(s, x_short) == evolve_account(s, x_full));
}

TEST_CASE("input validation") {
    const std::vector<double> s{100.0, 110.0};
    CHECK_THROWS_AS(evolve_account(std::vector<double>{100.0, 0.0},
                                   std::vector<double>{1.0}),
                    domain_error);
    CHECK_THROWS_AS(evolve_account(std::vector<double>{100.0, -5.0},
                                   std::vector<double>{1.0}),
                    domain_error);
    CHECK_THROWS_AS(evolve_account(std::vector<double>{}, std::vector<double>{}),
                    input_error);
    CHECK_THROWS_AS(evolve_account(s, std::vector<double>{1.0, 2.0, 3.0}), input_error);
    CHECK_THROWS_AS(evolve_account(s, std::vector<double>{}), input_error);
}

TEST_CASE("regularity bounds with scaled tolerance") {
    const std::vector<double> s{1000.0, 1000.0};
    CHECK(is_regular(s, std::vector<double>{1000.0, 0.0}));
    CHECK(is_regular(s, std::vector<double>{-1000.0 * 1e-10, 0.0}));
    CHECK_FALSE(is_regular(s, std::vector<double>{-1000.0 * 1e-8, 0.0}));
    CHECK_FALSE(is_regular(s, std::vector<double>{1000.0 + 1000.0 * 1e-8, 0.0}));
    CHECK(is_regular(s, std::vector<double>{1000.0 + 1000.0 * 1e-10, 0.0}));
    CHECK_THROWS_AS(require_regular(s, std::vector<double>{2000.0, 0.0}),
                    regularity_error);
}

TEST_CASE("exhaustion absorbs the account") {
    const std::vector<double> s{100.0, 120.0, 150.0};
    const std::vector<double> x{100.0, 0.0, 0.0};
    const std::vector<double> a = evolve_account(s, x);
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK(is_regular(s, x));
    // Any further consumption breaks regularity.
    CHECK_FALSE(is_regular(s, std::vector<double>{100.0, 1.0, 0.0}));
}

TEST_CASE("relative rates from absolute rates") {
    const std::vector<double> s{10000.0, 10200.0};
    const std::vector<double> x{999.90, 1000.0};
    const RelativeRates r = relative_from_absolute(s, x);
    REQUIRE(r.z.size() == 2);
    CHECK(std::abs(r.z[0] - 0.09999) <= 1e-12);
}

TEST_CASE("exhausted account consumes at rate zero") {
    const std::vector<double> s{100.0, 120.0, 150.0};
    const std::vector<double> x{100.0, 0.0, 0.0};
    const RelativeRates r = relative_from_absolute(s, x);
    CHECK(r.z[0] == 1.0);
    CHECK(r.z[1] == 0.0);
    CHECK(r.z[2] == 0.0);
}

TEST_CASE("absolute rates from relative rates") {
    const std::vector<double> s{100.0, 100.0};
    const AccountState st = absolute_from_relative(s, std::vector<double>{0.5, 1.0});
    CHECK(st.x == std::vector<double>{50.0, 50.0});
    CHECK(st.a == std::vector<double>{100.0, 50.0});
    CHECK_THROWS_AS(absolute_from_relative(s, std::vector<double>{0.5, 1.5}),
                    input_error);
    CHECK_THROWS_AS(absolute_from_relative(s, std::vector<double>{-0.1, 0.5}),
                    input_error);
    CHECK_THROWS_AS(absolute_from_relative(s, std::vector<double>{0.5}), input_error);
}

TEST_CASE("rates round trip both ways") {
    testutil::Rng rng(1002);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t epochs = static_cast<std::size_t>(rng.uniform_int(1, 12));
        const AccountState st = random_regular(rng, epochs);

        const RelativeRates r = relative_from_absolute(st.s, st.x);
        const AccountState back = absolute_from_relative(st.s, r.z);
        for (std::size_t k = 0; k < epochs; ++k) {
            CHECK(std::abs(back.x[k] - st.x[k]) <= 1e-12 * st.s[0]);
            CHECK(std::abs(back.a[k] - st.a[k]) <= 1e-12 * st.s[0]);
        }
    }
}

TEST_CASE("product of survival fractions matches the sum identity") {
    testutil::Rng rng(1003);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t epochs = static_cast<std::size_t>(rng.uniform_int(1, 12));
        const AccountState st = random_regular(rng, epochs);
        const RelativeRates r = relative_from_absolute(st.s, st.x);
        double survival = 1.0, consumed = 0.0;
        for (std::size_t k = 0; k < epochs; ++k) {
            CHECK(std::abs(survival * (1.0 - r.z[k]) -
                           (1.0 - consumed - st.x[k] / st.s[k])) <= 1e-10);
            survival *= 1.0 - r.z[k];
            consumed += st.x[k] / st.s[k];
        }
    }
}

TEST_CASE("rescaling commutes with the account recursion") {
    const std::vector<double> f{1.0, 2.0, 4.0};
    const std::vector<double> s{100.0, 100.0, 100.0};
    const std::vector<double> x{10.0, 10.0, 90.0};
    const RescaledAccount scaled = rescale(f, s, x);
    CHECK(scaled.s == std::vector<double>{100.0, 200.0, 400.0});
    CHECK(scaled.x == std::vector<double>{10.0, 20.0, 360.0});
    CHECK(scaled.a == evolve_account(scaled.s, scaled.x));

    testutil::Rng rng(1004);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t epochs = static_cast<std::size_t>(rng.uniform_int(1, 10));
        const AccountState st = random_regular(rng, epochs);
        std::vector<double> factors(epochs);
        for (double& v : factors) v = rng.uniform(0.2, 5.0);
        const RescaledAccount sc = rescale(factors, st.s, st.x);
        const std::vector<double> direct = evolve_account(sc.s, sc.x);
        for (std::size_t k = 0; k < epochs; ++k)
            CHECK(std::abs(sc.a[k] - direct[k]) <=
                  1e-9 * std::max(1.0, std::abs(direct[k])));
    }
}

TEST_CASE("rescaling preserves regularity in both directions") {
    testutil::Rng rng(1005);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t epochs = static_cast<std::size_t>(rng.uniform_int(1, 8));
        std::vector<double> s(epochs), x(epochs), f(epochs);
        s[0] = rng.uniform(100.0, 1000.0);
        for (std::size_t k = 1; k < epochs; ++k) s[k] = s[k - 1] * rng.uniform(0.6, 1.5);
        // Half the trials draw wild rates that usually break regularity.
        const bool wild = trial % 2 == 1;
        for (std::size_t k = 0; k < epochs; ++k) {
            x[k] = wild ? rng.uniform(-50.0, 500.0) : rng.uniform(0.0, 20.0);
            f[k] = rng.uniform(0.2, 5.0);
        }
        const RescaledAccount sc = rescale(f, s, x);
        CHECK(is_regular(s, x) == is_regular(sc.s, sc.x));
    }
}

TEST_CASE("rescaling validates the factor process") {
    const std::vector<double> s{100.0, 100.0};
    const std::vector<double> x{10.0, 10.0};
    CHECK_THROWS_AS(rescale(std::vector<double>{1.0, 0.0}, s, x), domain_error);
    CHECK_THROWS_AS(rescale(std::vector<double>{1.0}, s, x), input_error);
}

TEST_CASE("path process validation") {
    PathProcess p = PathProcess::from_values({1.0, 2.0, 3.0});
    CHECK(p.times == std::vector<int>{0, 1, 2});
    CHECK_NOTHROW(p.validate());
    p.times = {0, 2, 2};
    CHECK_THROWS_AS(p.validate(), input_error);
    p.times = {0, 1};
    CHECK_THROWS_AS(p.validate(), input_error);
}

}  // TEST_SUITE
