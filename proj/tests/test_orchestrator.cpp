#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "molstore/errors.hpp"
#include "molstore/sim_orchestrator.hpp"

using namespace molstore;

namespace {

Scenario quiet_scenario() {
    Scenario sc;
    sc.acq.noise_coefficient_pa_per_um2 = 0.0;
    sc.acq.filter_bandwidth_khz = 0.0;
    return sc;
}

DataBlock block_of(std::vector<std::uint8_t> bytes, std::uint64_t id) {
    DataBlock b;
    b.payload = std::move(bytes);
    b.block_id = id;
    return b;
}

} // namespace

TEST_CASE("run-length encoding expands each symbol into a resolvable run") {
    const auto strand = run_length_encode(block_of({0x1B}, 0), 120);
    REQUIRE(strand.size() == 480);
    CHECK(strand.front() == Base::A);
    CHECK(strand[119] == Base::A);
    CHECK(strand[120] == Base::C);
    CHECK(strand[239] == Base::C);
    CHECK(strand[240] == Base::G);
    CHECK(strand[360] == Base::T);
    CHECK(strand.back() == Base::T);

    CHECK(run_length_encode(block_of({0xE4}, 0), 1) == sequence_from_string("TGCA"));
    CHECK_THROWS_AS(run_length_encode(block_of({1}, 0), 0), ConfigError);
}

TEST_CASE("an empty workload produces an idle report") {
    const auto report = run(quiet_scenario());
    CHECK(report.commands.empty());
    CHECK(report.total_time_s == 0.0);
    CHECK(report.aggregate_data_rate_bps == 0.0);
    REQUIRE(report.station_utilization.size() == 1);
    CHECK(report.station_utilization[0] == 0.0);
    CHECK(report.all_payloads_ok);
    CHECK(report.bits_per_base_effective == doctest::Approx(2.0 / 120.0));
}

TEST_CASE("stored blocks come back byte for byte on a quiet channel") {
    auto sc = quiet_scenario();
    sc.workload = {
        StoreCommand{block_of({0xde, 0xad, 0xbe, 0xef}, 0)},
        StoreCommand{block_of({0x00, 0xff, 0x10, 0x01}, 1)},
        StoreCommand{block_of({0x42}, 2)},
        FetchCommand{0},
        FetchCommand{1},
        FetchCommand{2},
    };
    const auto report = run(sc);
    REQUIRE(report.commands.size() == 6);
    CHECK(report.all_payloads_ok);
    for (std::size_t i = 3; i < 6; ++i) {
        const auto& c = report.commands[i];
        CHECK(c.kind == "fetch");
        CHECK(c.error.empty());
        REQUIRE(c.payload_ok.has_value());
        CHECK(*c.payload_ok);
        CHECK(c.address == i - 3);
    }
    CHECK(report.aggregate_data_rate_bps > 0.0);
    CHECK(report.aggregate_data_rate_bps <= report.station_parallel_ceiling_bps);
}

TEST_CASE("the noisy filtered channel still decodes exactly") {
    Scenario sc; // stock noise and 20 kHz filter
    sc.workload = {
        StoreCommand{block_of({0xa5, 0x3c}, 0)},
        FetchCommand{0},
    };
    const auto report = run(sc);
    CHECK(report.all_payloads_ok);
    REQUIRE(report.commands[1].payload_ok.has_value());
    CHECK(*report.commands[1].payload_ok);
}

TEST_CASE("noisy round trips hold across seeds and random payloads") {
    std::mt19937_64 prng(424242);
    std::uniform_int_distribution<int> byte(0, 255);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Scenario sc; // stock noise and 20 kHz filter
        sc.layout.spot_count = 16;
        sc.seed = seed;
        for (std::uint64_t i = 0; i < 4; ++i) {
            sc.workload.push_back(StoreCommand{block_of({static_cast<std::uint8_t>(byte(prng)),
                                                         static_cast<std::uint8_t>(byte(prng)),
                                                         static_cast<std::uint8_t>(byte(prng))},
                                                        i)});
        }
        for (std::uint64_t i = 0; i < 4; ++i) sc.workload.push_back(FetchCommand{i});
        const auto report = run(sc);
        INFO("seed ", seed);
        CHECK(report.all_payloads_ok);
        for (const auto& c : report.commands) CHECK(c.error.empty());
    }
}

TEST_CASE("failed commands are recorded without aborting the run") {
    auto sc = quiet_scenario();
    sc.workload = {
        StoreCommand{block_of({0x11}, 0)},
        EraseCommand{0},
        FetchCommand{0},  // now empty
        EraseCommand{3},  // never written
        FetchCommand{99}, // outside the address space
        StoreCommand{block_of({0x22}, 5)},
        FetchCommand{0}, // reuses the freed spot
    };
    const auto report = run(sc);
    REQUIRE(report.commands.size() == 7);
    CHECK(report.commands[1].error.empty());
    CHECK_FALSE(report.commands[2].error.empty());
    CHECK(report.commands[2].payload_ok == std::optional<bool>(false));
    CHECK_FALSE(report.commands[3].error.empty());
    CHECK_FALSE(report.commands[4].error.empty());
    CHECK(report.commands[5].error.empty());
    CHECK(report.commands[5].address == 0); // lowest spot is free again
    CHECK(report.commands[6].error.empty());
    CHECK(*report.commands[6].payload_ok);
    CHECK_FALSE(report.all_payloads_ok);

    // failed commands cost no station time
    CHECK(report.commands[2].latency_s == 0.0);
    CHECK(report.commands[4].latency_s == 0.0);
}

TEST_CASE("stores beyond the spot count report a full chip") {
    auto sc = quiet_scenario();
    sc.layout.spot_count = 2;
    sc.workload = {
        StoreCommand{block_of({1}, 0)},
        StoreCommand{block_of({2}, 1)},
        StoreCommand{block_of({3}, 2)},
    };
    const auto report = run(sc);
    CHECK(report.commands[0].error.empty());
    CHECK(report.commands[1].error.empty());
    CHECK_FALSE(report.commands[2].error.empty());
}

TEST_CASE("runs are deterministic for a fixed seed") {
    Scenario sc;
    sc.seed = 77;
    sc.workload = {StoreCommand{block_of({0x5a, 0x99}, 0)}, FetchCommand{0}, EraseCommand{0}};

    std::vector<double> samples_a, samples_b, samples_c;
    const auto grab = [](std::vector<double>& into) {
        return [&into](std::size_t, const CurrentTrace& trace) { into = trace.samples_pa; };
    };
    const auto a = report_to_json(run(sc, grab(samples_a))).dump();
    const auto b = report_to_json(run(sc, grab(samples_b))).dump();
    CHECK(a == b);
    CHECK(samples_a == samples_b);

    sc.seed = 78;
    run(sc, grab(samples_c));
    CHECK(samples_a != samples_c); // readout noise re-seeds with the scenario
}

TEST_CASE("latency decomposes into legs, readout and overhead") {
    auto sc = quiet_scenario();
    sc.station_overhead_s = 0.5;
    sc.layout.valve_switch_latency_s = 1e-3; // 4 address lines on 16 spots
    sc.workload = {StoreCommand{block_of({0x0f}, 0)}, FetchCommand{0}, EraseCommand{0}};

    std::map<std::size_t, double> readout_s;
    const auto report = run(sc, [&](std::size_t index, const CurrentTrace& trace) {
        const auto& ann = trace.annotations.front();
        readout_s[index] = ann.end_s - ann.start_s;
    });

    const double leg_s = 4 * 1e-3 + 1e-3; // valve switching plus 1 cm at 10 m/s
    CHECK(report.commands[0].latency_s == doctest::Approx(leg_s + 0.5));
    REQUIRE(readout_s.count(1) == 1);
    CHECK(report.commands[1].latency_s == doctest::Approx(2 * leg_s + readout_s[1] + 0.5));
    CHECK(report.commands[2].latency_s == doctest::Approx(leg_s + 0.5));

    CHECK(report.min_latency_s == doctest::Approx(leg_s + 0.5));
    CHECK(report.max_latency_s == doctest::Approx(2 * leg_s + readout_s[1] + 0.5));
    CHECK(report.mean_latency_s ==
          doctest::Approx((2 * (leg_s + 0.5) + report.commands[1].latency_s) / 3.0));
}

TEST_CASE("station bookkeeping: serial runs saturate one station") {
    auto sc = quiet_scenario();
    sc.workload = {StoreCommand{block_of({1}, 0)}, FetchCommand{0}, FetchCommand{0}};
    const auto report = run(sc);
    REQUIRE(report.station_utilization.size() == 1);
    CHECK(report.station_utilization[0] == doctest::Approx(1.0));
    CHECK(report.total_time_s ==
          doctest::Approx(report.commands[0].latency_s + report.commands[1].latency_s +
                          report.commands[2].latency_s));

    // commands on one station start where the previous one finished
    CHECK(report.commands[1].start_s == doctest::Approx(report.commands[0].finish_s));
    CHECK(report.commands[2].start_s == doctest::Approx(report.commands[1].finish_s));
}

TEST_CASE("spots partition round-robin across stations") {
    auto sc = quiet_scenario();
    sc.layout.station_count = 4;
    sc.workload = {
        StoreCommand{block_of({1}, 0)},
        StoreCommand{block_of({2}, 1)},
        StoreCommand{block_of({3}, 2)},
        StoreCommand{block_of({4}, 3)},
    };
    const auto report = run(sc);
    for (std::size_t i = 0; i < 4; ++i) CHECK(report.commands[i].station == i);
    REQUIRE(report.station_utilization.size() == 4);
    for (double u : report.station_utilization) {
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
    // equal-latency stores run fully in parallel
    CHECK(report.total_time_s == doctest::Approx(report.commands[0].latency_s));
}

TEST_CASE("rate ceilings come from the shortest dwell and station count") {
    const auto report = run(quiet_scenario());
    CHECK(report.dwell_limited_rate_bps == doctest::Approx(2.0 / 1.5e-6));
    CHECK(report.station_parallel_ceiling_bps == doctest::Approx(report.dwell_limited_rate_bps));
    CHECK(report.bits_per_base_ceiling == 2.0);

    CHECK(parallel_station_rate_bps(1, 5.0) == 5.0);
    CHECK(parallel_station_rate_bps(8, 4.0 / 3.0e-6) ==
          doctest::Approx(8.0 * 4.0 / 3.0e-6));
    CHECK_THROWS_AS(parallel_station_rate_bps(0, 1.0), DomainError);
    CHECK_THROWS_AS(parallel_station_rate_bps(2, -1.0), DomainError);
}

TEST_CASE("scenarios parse from config text") {
    const auto cfg = KeyValueConfig::parse_text(
        "spot_count = 16\n"
        "block_bytes = 64\n"
        "seed = 9\n"
        "run_length = 60\n"
        "station_overhead_s = 0.25\n"
        "noise_coefficient_pa_per_um2 = 0\n"
        "filter_bandwidth_khz = 0\n"
        "[workload]\n"
        "store hex:0a0b\n"
        "store random:4\n"
        "fetch 0\n"
        "fetch 1\n"
        "erase 0\n");
    const auto sc = Scenario::from_config(cfg);
    CHECK(sc.seed == 9);
    CHECK(sc.run_length == 60);
    CHECK(sc.station_overhead_s == 0.25);
    REQUIRE(sc.workload.size() == 5);
    CHECK(std::get<StoreCommand>(sc.workload[0]).block.payload ==
          std::vector<std::uint8_t>{0x0a, 0x0b});
    CHECK(std::get<StoreCommand>(sc.workload[1]).block.payload.size() == 4);
    CHECK(std::get<FetchCommand>(sc.workload[3]).address == 1);

    const auto report = run(sc);
    CHECK(report.all_payloads_ok);

    CHECK_THROWS_AS(Scenario::from_config(KeyValueConfig::parse_text(
                        "[workload]\nstore hex:0a\nrewind 3\n")),
                    ConfigError);
    CHECK_THROWS_AS(Scenario::from_config(KeyValueConfig::parse_text("run_length = 10\n")),
                    ConfigError);
    CHECK_THROWS_AS(Scenario::from_config(KeyValueConfig::parse_text(
                        "[workload]\nstore hex:0q\n")),
                    ConfigError);
}
