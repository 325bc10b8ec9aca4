#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "bhlab/ksz.hpp"

using bhlab::KszRecord;
using bhlab::SupNormBudgets;

namespace {

SupNormBudgets light() {
    SupNormBudgets b;
    b.restarts = 8;
    b.samples_per_restart = 64;
    return b;
}

}  // namespace

TEST_CASE("ksz denominator and the n=1 closed form", "[ksz]") {
    CHECK(bhlab::ksz_denominator(1, 2) == Catch::Approx(std::sqrt(std::log(2.0))).epsilon(1e-15));
    CHECK(bhlab::ksz_denominator(2, 2) ==
          Catch::Approx(std::pow(2.0, 1.5) * std::sqrt(std::log(2.0))).epsilon(1e-15));
    CHECK_THROWS_AS(bhlab::ksz_denominator(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(bhlab::ksz_denominator(2, 1), std::invalid_argument);

    // n=1: the polynomial is a single +-1 monomial, so the sup is exactly 1
    auto r = bhlab::ksz_record(1, 2, 9, light());
    CHECK(r.sup_estimate == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.ksz_bound_denominator == Catch::Approx(std::sqrt(std::log(2.0))).epsilon(1e-15));
    CHECK(r.constant_estimate == Catch::Approx(1.2011224087864498).margin(1e-12));
}

TEST_CASE("ksz record fields satisfy their identities", "[ksz]") {
    auto r = bhlab::ksz_record(2, 2, 5, light());
    const double n3 = std::sqrt(3.0);
    CHECK(r.n == 2);
    CHECK(r.m == 2);
    CHECK(r.seed == 5);
    CHECK(r.sup_estimate >= n3 - 1e-6);
    CHECK(r.sup_estimate <= 3.0 + 1e-9);
    CHECK(r.constant_estimate * r.ksz_bound_denominator ==
          Catch::Approx(r.sup_estimate).epsilon(1e-12));

    auto again = bhlab::ksz_record(2, 2, 5, light());
    CHECK(r.sup_estimate == again.sup_estimate);
    CHECK(r.constant_estimate == again.constant_estimate);

    CHECK_THROWS_AS(bhlab::ksz_record(2, 1, 0, light()), std::invalid_argument);
}

TEST_CASE("best_sign_search selects the minimal sup over derived trials", "[ksz]") {
    auto single = bhlab::best_sign_search(3, 2, 1, 11, light());
    REQUIRE(single.records.size() == 1);
    REQUIRE(single.constant_estimates.size() == 1);
    auto direct = bhlab::ksz_record(3, 2, bhlab::derive_seed(11, 0), light());
    CHECK(single.best.sup_estimate == direct.sup_estimate);
    CHECK(single.best.seed == direct.seed);

    auto batch = bhlab::best_sign_search(4, 2, 20, 0, light());
    REQUIRE(batch.records.size() == 20);
    const double mean =
        std::accumulate(batch.constant_estimates.begin(), batch.constant_estimates.end(), 0.0) / 20.0;
    CHECK(batch.best.constant_estimate <= mean);
    for (const KszRecord& rec : batch.records) {
        CHECK(batch.best.sup_estimate <= rec.sup_estimate);
        const double root_n = std::sqrt(static_cast<double>(bhlab::multi_index_count(4, 2)));
        CHECK(rec.sup_estimate >= root_n - 1e-6);
        CHECK(rec.sup_estimate <= static_cast<double>(bhlab::multi_index_count(4, 2)) + 1e-9);
    }

    auto rerun = bhlab::best_sign_search(4, 2, 20, 0, light());
    CHECK(batch.best.constant_estimate == rerun.best.constant_estimate);
    CHECK(batch.best.seed == rerun.best.seed);

    CHECK_THROWS_AS(bhlab::best_sign_search(4, 2, 0, 0, light()), std::invalid_argument);
}

TEST_CASE("minimum sup is non-increasing in the trial budget", "[ksz]") {
    double prev = std::numeric_limits<double>::infinity();
    for (int trials : {1, 2, 4, 8}) {
        auto r = bhlab::best_sign_search(3, 3, trials, 42, light());
        CHECK(r.best.sup_estimate <= prev);
        prev = r.best.sup_estimate;
    }
}

TEST_CASE("constants stay positive, finite, and tame across n", "[ksz]") {
    // scaled-down cousin of the full scaling check; the acceptance gate runs
    // the full-size version with default budgets
    double at4 = 0.0, at16 = 0.0;
    for (int n : {4, 8, 16}) {
        auto r = bhlab::best_sign_search(n, 2, 6, 0, light());
        for (double c : r.constant_estimates) {
            CHECK(c > 0.0);
            CHECK(std::isfinite(c));
        }
        if (n == 4) at4 = r.best.constant_estimate;
        if (n == 16) at16 = r.best.constant_estimate;
    }
    CHECK(at16 <= 4.0 * at4);
    CHECK(at4 <= 4.0 * at16);
}
