#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "marlin/bench/scenarios.hpp"
#include "marlin/core/plan.hpp"
#include "marlin/core/scenario.hpp"
#include "marlin/core/types.hpp"
#include "marlin/sim/env.hpp"
#include "marlin/util/csv.hpp"
#include "marlin/util/rng.hpp"

using namespace marlin;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("marlin_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("scheduling plan: uniform rows are simplex-valid") {
    const auto p = SchedulingPlan::uniform(2, 3, 4);
    CHECK(p.models() == 2);
    CHECK(p.regions() == 3);
    CHECK(p.dcs() == 4);
    CHECK(p.size() == 24);
    CHECK(p.simplex_valid());
    for (int m = 0; m < 2; ++m)
        for (int r = 0; r < 3; ++r)
            for (int d = 0; d < 4; ++d) CHECK(p.at(m, r, d) == doctest::Approx(0.25));
}

TEST_CASE("scheduling plan: constructor rejects invalid tensors") {
    CHECK_THROWS_AS(SchedulingPlan::from_routing(1, 1, 2, {0.5, 0.5, 0.5}),
                    std::invalid_argument);  // size mismatch
    CHECK_THROWS_AS(SchedulingPlan::from_routing(1, 1, 2, {0.7, 0.7}),
                    std::invalid_argument);  // row sums to 1.4
    CHECK_THROWS_AS(SchedulingPlan::from_routing(1, 1, 2, {-0.1, 1.1}),
                    std::invalid_argument);  // negative fraction
    CHECK_NOTHROW(SchedulingPlan::from_routing(1, 1, 2, {0.3, 0.7}));
}

TEST_CASE("scheduling plan: row and flat views alias the same storage") {
    const auto p = SchedulingPlan::from_routing(1, 2, 2, {0.3, 0.7, 1.0, 0.0});
    const auto row0 = p.row(0, 0);
    const auto row1 = p.row(0, 1);
    CHECK(row0[0] == 0.3);
    CHECK(row0[1] == 0.7);
    CHECK(row1[0] == 1.0);
    CHECK(row1[1] == 0.0);
    CHECK(p.flat().size() == 4);
    CHECK(p.flat()[1] == 0.7);
}

TEST_CASE("dominance: minimization, strict somewhere") {
    const MetricsVector a{1.0, 2.0, 3.0, 4.0};
    const MetricsVector b{1.0, 2.0, 3.0, 5.0};
    const MetricsVector c{2.0, 1.0, 3.0, 4.0};
    CHECK(dominates(a, b));
    CHECK_FALSE(dominates(b, a));
    CHECK_FALSE(dominates(a, a));  // equal vectors do not dominate
    CHECK_FALSE(dominates(a, c));  // incomparable
    CHECK_FALSE(dominates(c, a));
}

TEST_CASE("objective weights: validity and basis vectors") {
    ObjectiveWeights w;
    CHECK(w.valid());
    for (int j = 0; j < kNumObjectives; ++j) {
        const auto basis = ObjectiveWeights::single(j);
        CHECK(basis.valid());
        CHECK(basis.w[static_cast<std::size_t>(j)] == 1.0);
    }
    w.w = {0.5, 0.5, 0.5, -0.5};
    CHECK_FALSE(w.valid());
    w.w = {0.5, 0.5, 0.5, 0.5};
    CHECK_FALSE(w.valid());
}

TEST_CASE("weighted objective: scalarization against reference scales") {
    Normalizers n;
    n.ref = {2.0, 4.0, 8.0, 16.0};
    const MetricsVector m{1.0, 1.0, 1.0, 1.0};
    ObjectiveWeights w;  // quarter each
    CHECK(weighted_objective(m, w, n) ==
          doctest::Approx(0.25 * (0.5 + 0.25 + 0.125 + 0.0625)));
    CHECK(weighted_objective(m, ObjectiveWeights::single(2), n) ==
          doctest::Approx(0.125));
}

TEST_CASE("largest-remainder split: exact cases and tie-breaking") {
    {
        const std::vector<double> f{0.3, 0.3, 0.4};
        const auto c = split_largest_remainder(10, f);
        CHECK(c == std::vector<int>{3, 3, 4});
    }
    {
        // Equal remainders: the lower index wins the leftover unit.
        const std::vector<double> f{0.5, 0.5};
        const auto c = split_largest_remainder(1, f);
        CHECK(c == std::vector<int>{1, 0});
    }
    {
        const std::vector<double> f{1.0, 0.0};
        const auto c = split_largest_remainder(7, f);
        CHECK(c == std::vector<int>{7, 0});
    }
    CHECK(split_largest_remainder(0, std::vector<double>{0.5, 0.5}) ==
          std::vector<int>{0, 0});
}

TEST_CASE("largest-remainder split: conservation and proximity fuzz") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(12));
        const auto f = rng.dirichlet_flat(static_cast<std::size_t>(d));
        const int total = static_cast<int>(rng.below(10000));
        const auto c = split_largest_remainder(total, f);
        int sum = 0;
        for (int i = 0; i < d; ++i) {
            CHECK(c[i] >= 0);
            // Largest-remainder rounding never strays more than one unit
            // from the exact share.
            CHECK(std::abs(c[i] - total * f[i]) < 1.0 + 1e-9);
            sum += c[i];
        }
        CHECK(sum == total);
    }
}

TEST_CASE("scenario validation: a valid world has no violations") {
    const auto s = default_scenario(4, 8);
    CHECK(validate_scenario(s).empty());
    CHECK_NOTHROW(require_valid(s));
}

TEST_CASE("scenario validation: every class of violation is reported") {
    auto s = default_scenario(2, 8);

    SUBCASE("empty model list") {
        s.models.clear();
        const auto errs = validate_scenario(s);
        CHECK(!errs.empty());
        CHECK_THROWS_AS(require_valid(s), std::invalid_argument);
    }
    SUBCASE("non-ascending p-states") {
        s.node_types[0].pstate_fractions = {0.5, 0.2, 1.0};
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("p-state above 1") {
        s.node_types[0].pstate_fractions = {0.1, 1.5};
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("gpu count not in {2,4,8}") {
        s.node_types[0].gpu_count = 3;
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("non-positive cop") {
        s.datacenters[0].cop = 0.0;
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("phi outside [0,1)") {
        s.datacenters[0].phi = 1.0;
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("intensity series shorter than the horizon") {
        s.datacenters[0].ci_series.resize(3);
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("missing hop count") {
        s.datacenters[0].hop_counts.erase(s.regions[0]);
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("unknown node type index") {
        s.datacenters[0].node_counts[0].first = 99;
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("missing exec profile for a used GPU kind") {
        s.models[0].exec_ms_per_token.clear();
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("missing region coordinates") {
        s.network.region_coords.erase(s.regions[0]);
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("non-positive epoch duration") {
        s.epoch_hours = 0.0;
        CHECK(!validate_scenario(s).empty());
    }
    SUBCASE("several violations are all collected") {
        s.datacenters[0].cop = -1.0;
        s.models[0].mem_footprint_gb = 0.0;
        s.sla_ttft_s = 0.0;
        CHECK(validate_scenario(s).size() >= 3);
    }
}

TEST_CASE("scenario JSON round-trip preserves every field") {
    const auto dir = temp_dir("scenario_json");
    const auto s = default_scenario(3, 12);
    const auto path = (dir / "world.json").string();
    save_scenario(s, path);
    const auto t = load_scenario(path);

    CHECK(t.epochs == s.epochs);
    CHECK(t.epoch_hours == s.epoch_hours);
    CHECK(t.sla_ttft_s == s.sla_ttft_s);
    CHECK(t.regions == s.regions);
    REQUIRE(t.models.size() == s.models.size());
    for (std::size_t m = 0; m < s.models.size(); ++m) {
        CHECK(t.models[m].id == s.models[m].id);
        CHECK(t.models[m].mem_footprint_gb == s.models[m].mem_footprint_gb);
        CHECK(t.models[m].kv_per_token_mb == s.models[m].kv_per_token_mb);
        CHECK(t.models[m].exec_ms_per_token == s.models[m].exec_ms_per_token);
    }
    REQUIRE(t.node_types.size() == s.node_types.size());
    for (std::size_t n = 0; n < s.node_types.size(); ++n) {
        CHECK(t.node_types[n].id == s.node_types[n].id);
        CHECK(t.node_types[n].gpu_kind == s.node_types[n].gpu_kind);
        CHECK(t.node_types[n].gpu_count == s.node_types[n].gpu_count);
        CHECK(t.node_types[n].mem_total_gb == s.node_types[n].mem_total_gb);
        CHECK(t.node_types[n].bandwidth_gbps == s.node_types[n].bandwidth_gbps);
        CHECK(t.node_types[n].tdp_kw == s.node_types[n].tdp_kw);
        CHECK(t.node_types[n].pstate_fractions == s.node_types[n].pstate_fractions);
    }
    REQUIRE(t.datacenters.size() == s.datacenters.size());
    for (std::size_t d = 0; d < s.datacenters.size(); ++d) {
        const auto& a = s.datacenters[d];
        const auto& b = t.datacenters[d];
        CHECK(b.id == a.id);
        CHECK(b.location.lat == a.location.lat);
        CHECK(b.location.lon == a.location.lon);
        CHECK(b.node_counts == a.node_counts);
        CHECK(b.cop == a.cop);
        CHECK(b.gi_l_per_kwh == a.gi_l_per_kwh);
        CHECK(b.phi == a.phi);
        CHECK(b.ci_series == a.ci_series);
        CHECK(b.tou_series == a.tou_series);
        CHECK(b.hop_counts == a.hop_counts);
    }
    CHECK(t.network.lambda_media_ms_per_km == s.network.lambda_media_ms_per_km);
    CHECK(t.network.sigma_hop_ms == s.network.sigma_hop_ms);
    REQUIRE(t.network.region_coords.size() == s.network.region_coords.size());
    for (const auto& [name, c] : s.network.region_coords) {
        CHECK(t.network.region_coords.at(name).lat == c.lat);
        CHECK(t.network.region_coords.at(name).lon == c.lon);
    }
    CHECK(t.constants.j_water_mj_per_l == s.constants.j_water_mj_per_l);
    CHECK(t.constants.ei_pot_kwh_per_l == s.constants.ei_pot_kwh_per_l);
    CHECK(t.constants.ei_waste_kwh_per_l == s.constants.ei_waste_kwh_per_l);
    CHECK(t.constants.cooling_multiplier == s.constants.cooling_multiplier);
    CHECK(t.constants.infra_fraction == s.constants.infra_fraction);
    std::filesystem::remove_all(dir);
}

TEST_CASE("scenario round-trip with external intensity-series CSVs") {
    const auto dir = temp_dir("scenario_csv");
    const auto s = default_scenario(2, 16);
    const auto path = (dir / "world.json").string();
    save_scenario(s, path, /*series_as_csv=*/true);
    const auto t = load_scenario(path);
    REQUIRE(t.datacenters.size() == s.datacenters.size());
    for (std::size_t d = 0; d < s.datacenters.size(); ++d) {
        CHECK(t.datacenters[d].ci_series == s.datacenters[d].ci_series);
        CHECK(t.datacenters[d].tou_series == s.datacenters[d].tou_series);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv: shortest round-trip double formatting") {
    for (double v : {0.0, 0.1, -0.25, 1.0 / 3.0, 12596.0, 1e-17, 6.5e8,
                     0.06945335578201152, -3.716726556e-10}) {
        const std::string text = fmt_double(v);
        CHECK(std::stod(text) == v);
    }
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(2.0) == "2");
}

TEST_CASE("csv: series files are dense and round-trip exactly") {
    const auto dir = temp_dir("series_csv");
    const std::vector<double> values{0.1, 0.2, 1.0 / 3.0, 0.4};
    const auto path = (dir / "series.csv").string();
    save_series_csv(path, values);
    CHECK(load_series_csv(path) == values);

    std::ofstream out(path);
    out << "epoch,value\n0,1.5\n2,2.5\n";  // gap at epoch 1
    out.close();
    CHECK_THROWS_AS(load_series_csv(path), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("rng: deterministic streams and distribution sanity") {
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // Tagged streams differ from the base and from each other.
    Rng s1 = Rng::stream(7, 1);
    Rng s2 = Rng::stream(7, 2);
    CHECK(s1.next_u64() != s2.next_u64());

    Rng u(3);
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(mean / 10000 == doctest::Approx(0.5).epsilon(0.02));

    // Poisson mean tracks the parameter through both sampling branches.
    Rng p(11);
    double small_sum = 0.0, big_sum = 0.0;
    for (int i = 0; i < 20000; ++i) small_sum += static_cast<double>(p.poisson(5.0));
    for (int i = 0; i < 20000; ++i) big_sum += static_cast<double>(p.poisson(500.0));
    CHECK(small_sum / 20000 == doctest::Approx(5.0).epsilon(0.05));
    CHECK(big_sum / 20000 == doctest::Approx(500.0).epsilon(0.05));

    // Flat Dirichlet points live on the simplex.
    Rng d(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = d.dirichlet_flat(6);
        double sum = 0.0;
        for (double x : v) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}
