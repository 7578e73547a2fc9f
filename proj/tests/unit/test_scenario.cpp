#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "ebcs/scenario.hpp"

using namespace ebcs;

TEST_CASE("scenario defaults and validation") {
    ScenarioConfig c;
    CHECK(c.region_side_m == 300.0);
    CHECK(c.num_bss == 2);
    CHECK(c.total_stas == 100);
    CHECK(c.frames_per_step == 5);
    CHECK(c.stas_per_bss == std::vector<std::size_t>{50, 50});
    CHECK_NOTHROW(c.validate());

    auto bad = c;
    bad.frames_per_step = 101;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.stas_per_bss = {50, 49};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.distance_b_m = 151.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.bss_radius_m = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("even split") {
    CHECK(even_split(100, 2) == std::vector<std::size_t>{50, 50});
    CHECK(even_split(10, 3) == std::vector<std::size_t>{4, 3, 3});
}

TEST_CASE("zero radius puts every STA on its AP") {
    ScenarioConfig c;
    c.distance_b_m = 40.0;
    c.bss_radius_m = 0.0;
    Rng rng(7);
    const Deployment d = generate_deployment(c, rng);
    for (const Station& s : d.stations) CHECK(s.position == d.ap_positions[s.bss - 1]);
}

TEST_CASE("deployment structure over many seeds") {
    ScenarioConfig c;
    c.num_bss = 3;
    c.stas_per_bss = {40, 35, 25};
    c.distance_b_m = 90.0;
    c.bss_radius_m = 30.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed);
        const Deployment d = generate_deployment(c, rng);
        REQUIRE(d.num_bss() == 3);
        CHECK(d.ebcs_ap == Point{150.0, 150.0});
        CHECK(std::abs(distance_b(d) - 90.0) < 1e-6);
        CHECK(std::abs(distance(d.ebcs_ap, d.ap_positions[0]) - 90.0) < 1e-6);
        std::vector<std::size_t> counts(3, 0);
        for (const Station& s : d.stations) {
            REQUIRE(s.bss >= 1);
            REQUIRE(s.bss <= 3);
            ++counts[s.bss - 1];
            CHECK(d.contains(s.position));
        }
        CHECK(counts == c.stas_per_bss);
        for (const Point& ap : d.ap_positions) {
            CHECK(d.contains(ap));
            CHECK(distance(d.ebcs_ap, ap) <= 90.0 + 1e-9);
        }
    }
}

TEST_CASE("per-axis scatter matches the configured radius") {
    ScenarioConfig c;
    c.num_bss = 1;
    c.total_stas = 10'000;
    c.stas_per_bss = {10'000};
    c.distance_b_m = 0.0;
    c.bss_radius_m = 10.0;
    c.frames_per_step = 5;
    Rng rng(2024);
    const Deployment d = generate_deployment(c, rng);
    auto stddev = [&](auto coord) {
        double mean = 0, ss = 0;
        for (const Station& s : d.stations) mean += coord(s.position);
        mean /= static_cast<double>(d.stations.size());
        for (const Station& s : d.stations) ss += std::pow(coord(s.position) - mean, 2);
        return std::sqrt(ss / static_cast<double>(d.stations.size() - 1));
    };
    const double sx = stddev([](Point p) { return p.x; });
    const double sy = stddev([](Point p) { return p.y; });
    CHECK(sx >= 9.7);
    CHECK(sx <= 10.3);
    CHECK(sy >= 9.7);
    CHECK(sy <= 10.3);
}

TEST_CASE("generation is reproducible") {
    ScenarioConfig c;
    Rng a(99), b(99);
    CHECK(generate_deployment(c, a) == generate_deployment(c, b));
    CHECK(sample_uplink_stas(100, 5, a) == sample_uplink_stas(100, 5, b));
}

TEST_CASE("distance B") {
    Deployment d;
    d.ebcs_ap = {0, 0};
    d.ap_positions = {{30, 0}, {0, -40}};
    CHECK(distance_b(d) == doctest::Approx(40.0));
    d.ap_positions = {{3, 4}};
    CHECK(distance_b(d) == doctest::Approx(5.0));
    d.ap_positions = {{0, 0}, {0, 0}};
    CHECK(distance_b(d) == 0.0);
    d.ap_positions.clear();
    CHECK_THROWS_AS(distance_b(d), std::domain_error);
}

TEST_CASE("uplink sampling") {
    Rng rng(5);
    auto all = sample_uplink_stas(100, 100, rng);
    CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 100);

    auto five = sample_uplink_stas(100, 5, rng);
    REQUIRE(five.size() == 5);
    CHECK(std::set<std::size_t>(five.begin(), five.end()).size() == 5);
    for (auto i : five) CHECK(i < 100);

    CHECK_THROWS_AS(sample_uplink_stas(4, 5, rng), std::domain_error);
}

TEST_CASE("uplink sampling is uniform") {
    Rng rng(11);
    std::vector<std::size_t> hits(100, 0);
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i)
        for (auto idx : sample_uplink_stas(100, 5, rng)) ++hits[idx];
    for (auto h : hits) {
        const double freq = static_cast<double>(h) / draws;
        CHECK(freq == doctest::Approx(0.05).epsilon(0.003 / 0.05));
    }
}

TEST_CASE("deployment file round trip") {
    ScenarioConfig c;
    c.bss_radius_m = 17.3;
    std::vector<LabeledDeployment> worlds;
    for (std::uint64_t s = 0; s < 3; ++s) {
        Rng rng(s);
        worlds.push_back({"w" + std::to_string(s), generate_deployment(c, rng)});
    }
    std::stringstream buf;
    write_deployments(buf, worlds);
    const auto back = read_deployments(buf);
    REQUIRE(back.size() == worlds.size());
    for (std::size_t i = 0; i < worlds.size(); ++i) {
        CHECK(back[i].label == worlds[i].label);
        CHECK(back[i].deployment == worlds[i].deployment);
    }
}

TEST_CASE("deployment file errors") {
    std::istringstream missing_header("deployment a 300\nend\n");
    CHECK_THROWS(read_deployments(missing_header));
    std::istringstream bad_bss("ebcs-deployments 1\ndeployment a 300\nebcs_ap 1 1\nap 1 2 2\nsta 3 1 1\nend\n");
    CHECK_THROWS(read_deployments(bad_bss));
    std::istringstream open_block("ebcs-deployments 1\ndeployment a 300\nebcs_ap 1 1\n");
    CHECK_THROWS(read_deployments(open_block));
}
