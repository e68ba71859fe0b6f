#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "migsim/trace_io.hpp"

using namespace migsim;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        path = std::string("/tmp/migsim_trace_") + std::to_string(rand()) + ".txt";
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("parse_trace basics") {
    TempFile ok("50\n60\n");
    auto t = parse_trace(ok.path);
    REQUIRE(t.samples.size() == 2);
    CHECK(t.samples[0] == doctest::Approx(0.5));
    CHECK(t.samples[1] == doctest::Approx(0.6));
    CHECK(t.interval_s == 300);

    TempFile bad("101\n");
    CHECK_THROWS_AS(parse_trace(bad.path), std::runtime_error);

    TempFile nonnum("abc\n");
    CHECK_THROWS_AS(parse_trace(nonnum.path), std::runtime_error);

    TempFile empty("");
    CHECK_THROWS_AS(parse_trace(empty.path), std::runtime_error);

    CHECK_THROWS_AS(parse_trace("/tmp/definitely_missing_file_42"), std::runtime_error);
}

TEST_CASE("lb scenario: counts and ranges") {
    Scenario sc = synth_lb_scenario(1, 1);
    CHECK(sc.managed_hosts.size() == 8);
    CHECK(sc.vms.size() == 38);
    CHECK(sc.fat_tree_k == 8);

    DataCenter dc = sc.build_data_center();
    Placement p = sc.initial_placement();
    CHECK(dc.topo.hosts().size() == 128);
    for (const auto& h : sc.managed_hosts) {
        double u = host_cpu_util(dc, p, h);
        CHECK(u >= 0.10 - 1e-9);
        CHECK(u <= 0.90 + 1e-9);
    }
    for (const auto& v : sc.vms) {
        double frac = v.spec.cpu_demand_mips / sc.host_spec.cpu_total_mips;
        CHECK(frac >= 0.04 - 1e-9);
        CHECK(frac <= 0.20 + 1e-9);
        CHECK(v.spec.memory_bytes >= 2'000'000'000);
        CHECK(v.spec.memory_bytes <= 16'000'000'000);
    }

    Scenario multi4 = synth_lb_scenario(1, 4);
    CHECK(multi4.managed_hosts.size() == 32);
    CHECK(multi4.vms.size() == 152);

    CHECK_THROWS_AS(synth_lb_scenario(1, 5), std::invalid_argument);
}

TEST_CASE("lb scenario: same seed reproduces, different seed permutes") {
    Scenario a = synth_lb_scenario(9, 2);
    Scenario b = synth_lb_scenario(9, 2);
    CHECK(a.to_json() == b.to_json());
    Scenario c = synth_lb_scenario(10, 2);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("energy scenario: flavors cycle and dirty-rate anchor") {
    Scenario sc = synth_energy_scenario(3, 8, 8, 7200);
    REQUIRE(sc.vms.size() == 8);
    // Flavor cycle: 2500/2000/1000/1000 MIPS and 2/4/4/2 GB.
    CHECK(sc.vms[0].spec.cpu_demand_mips == 2500);
    CHECK(sc.vms[1].spec.cpu_demand_mips == 2000);
    CHECK(sc.vms[2].spec.cpu_demand_mips == 1000);
    CHECK(sc.vms[3].spec.cpu_demand_mips == 1000);
    CHECK(sc.vms[4].spec.cpu_demand_mips == 2500);
    CHECK(sc.vms[0].spec.memory_bytes == 2'000'000'000);
    CHECK(sc.vms[1].spec.memory_bytes == 4'000'000'000);

    // 16 GB at 0.001/s dirties 128 Mbps.
    VmSpec big;
    big.id = "x";
    big.memory_bytes = 16'000'000'000;
    big.dirty_rate_factor = 0.001;
    big.compression = 0.8;
    CHECK(big.dirty_rate() == doctest::Approx(128e6));

    // Horizon 7200 s at 300 s cadence: 24 samples per trace.
    for (const auto& v : sc.vms) CHECK(v.trace_values.size() == 24);

    // 32 managed hosts need a k=6 tree (54 hosts).
    Scenario sc32 = synth_energy_scenario(3, 32, 64, 3600);
    CHECK(sc32.fat_tree_k == 6);
}

TEST_CASE("scenario JSON round trip is identity") {
    for (Scenario sc : {synth_lb_scenario(5, 2), synth_energy_scenario(6, 8, 16, 3600)}) {
        auto j = sc.to_json();
        Scenario back = Scenario::from_json(j);
        CHECK(back.to_json() == j);
        CHECK(back.to_json().dump() == j.dump());
    }
}

TEST_CASE("scenario save/load through files") {
    Scenario sc = synth_lb_scenario(8, 1);
    std::string path = "/tmp/migsim_scenario_test.json";
    save_scenario(sc, path);
    Scenario back = load_scenario(path);
    CHECK(back.to_json() == sc.to_json());
    std::remove(path.c_str());
}

TEST_CASE("traces: inline values validated, constant when absent") {
    Scenario sc = synth_lb_scenario(8, 1); // no traces on lb VMs
    CHECK(sc.traces(".").empty());

    Scenario en = synth_energy_scenario(4, 8, 8, 1200);
    auto traces = en.traces(".");
    CHECK(traces.size() == en.vms.size());

    en.vms[0].trace_values[0] = 1.5;
    CHECK_THROWS_AS(en.traces("."), std::invalid_argument);
}
