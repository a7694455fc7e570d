#include <doctest.h>

#include "marlin/forecast/predictor.hpp"

using namespace marlin;

TEST_CASE("ewma: cold start forecasts zero") {
    EwmaPredictor p(0.3, 8);
    CHECK(p.cold());
    CHECK(p.predict() == 0.0);
}

TEST_CASE("ewma: renormalized geometric weighting over the window") {
    EwmaPredictor p(0.3, 8);
    p.update(10.0);
    p.update(20.0);
    p.update(30.0);
    // Recent-first weights 1, 0.7, 0.49 normalized:
    // (30 + 0.7*20 + 0.49*10) / 2.19 = 48.9 / 2.19.
    CHECK(p.predict() == doctest::Approx(22.328767123287673).epsilon(1e-12));
}

TEST_CASE("ewma: a single observation is forecast verbatim") {
    EwmaPredictor p(0.3, 8);
    p.update(57.0);
    CHECK(p.predict() == doctest::Approx(57.0).epsilon(1e-12));
}

TEST_CASE("ewma: constant history forecasts the constant exactly") {
    // The weights are renormalized, so the forecast is a convex combination
    // of history and must reproduce a flat series with no bias.
    for (double alpha : {0.1, 0.3, 0.9}) {
        EwmaPredictor p(alpha, 8);
        for (int i = 0; i < 20; ++i) p.update(123.5);
        CHECK(p.predict() == doctest::Approx(123.5).epsilon(1e-12));
    }
}

TEST_CASE("ewma: forecast stays inside the history envelope") {
    EwmaPredictor p(0.3, 8);
    double lo = 1e300, hi = -1e300;
    const double obs[] = {5, 90, 40, 7, 66, 13, 81, 29, 55, 2, 94};
    for (double o : obs) {
        p.update(o);
        lo = std::min(lo, o);
        hi = std::max(hi, o);
        CHECK(p.predict() >= lo - 1e-12);
        CHECK(p.predict() <= hi + 1e-12);
    }
}

TEST_CASE("ewma: window eviction forgets old observations entirely") {
    EwmaPredictor p(0.3, 3);
    p.update(1000.0);  // will be evicted
    p.update(10.0);
    p.update(20.0);
    p.update(30.0);
    CHECK(p.history().size() == 3);
    EwmaPredictor fresh(0.3, 3);
    fresh.update(10.0);
    fresh.update(20.0);
    fresh.update(30.0);
    CHECK(p.predict() == doctest::Approx(fresh.predict()).epsilon(1e-12));
}

TEST_CASE("ewma: recent observations weigh more than older ones") {
    EwmaPredictor rising(0.4, 8);
    EwmaPredictor falling(0.4, 8);
    rising.update(10.0);
    rising.update(90.0);
    falling.update(90.0);
    falling.update(10.0);
    // Same multiset of observations, different order: the forecast must
    // lean toward whichever value arrived last.
    CHECK(rising.predict() > 50.0);
    CHECK(falling.predict() < 50.0);
    CHECK(rising.predict() + falling.predict() == doctest::Approx(100.0));
}

TEST_CASE("forecast bank: per-series isolation and row-major layout") {
    ForecastBank bank(2, 3, 0.3, 8);
    CHECK(bank.num_models() == 2);
    CHECK(bank.num_regions() == 3);

    std::vector<double> observed(6, 0.0);
    observed[0 * 3 + 1] = 40.0;  // model 0, region 1
    observed[1 * 3 + 2] = 70.0;  // model 1, region 2
    bank.update_all(observed);

    const auto f = bank.predict_all();
    REQUIRE(f.size() == 6);
    CHECK(f[1] == doctest::Approx(40.0));
    CHECK(f[5] == doctest::Approx(70.0));
    // Untouched series saw a zero observation, not a cold start.
    CHECK(f[0] == 0.0);
    CHECK_FALSE(bank.series(0, 0).cold());

    // Series evolve independently.
    bank.update_all({0.0, 80.0, 0.0, 0.0, 0.0, 70.0});
    const auto g = bank.predict_all();
    CHECK(g[1] == doctest::Approx((80.0 + 0.7 * 40.0) / 1.7).epsilon(1e-12));
    CHECK(g[5] == doctest::Approx(70.0).epsilon(1e-12));
}
