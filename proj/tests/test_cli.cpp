#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "migsim/cli_commands.hpp"
#include "migsim/mip_oracle.hpp"

using namespace migsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cmd_topo writes the fat tree and rejects bad k") {
    CHECK(cmd_topo(4, 1'000'000'000, "/tmp/migsim_topo.json") == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/migsim_topo.json"));
    CHECK(j["hosts"].size() == 16);
    CHECK(j["switches"].size() == 20);
    std::remove("/tmp/migsim_topo.json");

    CHECK(cmd_topo(3, 1'000'000'000, "") == 2);
}

TEST_CASE("cmd_plan produces a rounds trace and validates selectors") {
    SynthSpec synth;
    synth.kind = "lb";
    synth.multiplier = 1;
    system("mkdir -p /tmp/migsim_cli");
    CHECK(cmd_plan("", synth, 3, "camig", "/tmp/migsim_cli") == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/migsim_cli/plan.json"));
    CHECK(j.contains("rounds"));
    CHECK(j.contains("migrations"));

    CHECK(cmd_plan("", synth, 3, "definitely-not-a-selector", "/tmp/migsim_cli") == 2);
    CHECK(cmd_plan("/nonexistent/scenario.json", synth, 3, "camig", "/tmp/migsim_cli") == 2);
}

TEST_CASE("cmd_run emits deterministic json and csv") {
    SynthSpec synth;
    synth.kind = "energy";
    synth.hosts = 8;
    synth.vms = 16;
    synth.horizon_s = 1200;
    system("mkdir -p /tmp/migsim_cli_a /tmp/migsim_cli_b");
    CHECK(cmd_run("", synth, 5, "camig", "/tmp/migsim_cli_a", {"json", "csv"}) == 0);
    CHECK(cmd_run("", synth, 5, "camig", "/tmp/migsim_cli_b", {"json", "csv"}) == 0);
    CHECK(slurp("/tmp/migsim_cli_a/report.json") == slurp("/tmp/migsim_cli_b/report.json"));
    CHECK(slurp("/tmp/migsim_cli_a/report.csv") == slurp("/tmp/migsim_cli_b/report.csv"));
    auto j = nlohmann::json::parse(slurp("/tmp/migsim_cli_a/report.json"));
    CHECK(j["totals"].contains("sum_total_migration_time_s"));
    std::string csv = slurp("/tmp/migsim_cli_a/report.csv");
    CHECK(csv.rfind("#schema=v1", 0) == 0);

    CHECK(cmd_run("", synth, 5, "camig", "", {"yaml"}) == 2);
}

TEST_CASE("one-by-one run reports total equal to the exec sum") {
    SynthSpec synth;
    synth.kind = "lb";
    synth.multiplier = 1;
    system("mkdir -p /tmp/migsim_cli_ob");
    CHECK(cmd_run("", synth, 3, "one-by-one", "/tmp/migsim_cli_ob", {"json"}) == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/migsim_cli_ob/report.json"));
    double total = j["totals"]["sum_total_migration_time_s"].get<double>();
    double sum = j["totals"]["sum_exec_time_s"].get<double>();
    CHECK(total == doctest::Approx(sum));
}

TEST_CASE("cmd_compare row counts") {
    SynthSpec synth;
    synth.kind = "lb";
    synth.multiplier = 1;
    system("mkdir -p /tmp/migsim_cmp");
    CHECK(cmd_compare("", synth, {"native", "native+sch"}, 2, 3, "/tmp/migsim_cmp") == 0);
    std::string csv = slurp("/tmp/migsim_cmp/comparison.csv");
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + 2 * 2 + 2); // header + per-seed rows + aggregate rows

    CHECK(cmd_compare("", synth, {"native"}, 0, 3, "") == 2);
    CHECK(cmd_compare("", synth, {}, 2, 3, "") == 2);
}

TEST_CASE("cmd_oracle solves an instance file") {
    MipInstance inst;
    inst.host_capacity = {{"A", 1.0}, {"B", 1.0}};
    inst.vms.push_back({"v1", "A", 0.4, {"A", "B"}});
    inst.exec_time[{"v1", "A"}] = 0.0;
    inst.exec_time[{"v1", "B"}] = 0.5;
    inst.objective.form = MipObjective::Form::pairwise_band;
    inst.objective.epsilon = 0.05;
    inst.dependent = [](const auto&, const auto&) { return false; };
    {
        std::ofstream out("/tmp/migsim_instance.json");
        out << inst.to_json().dump(2);
    }
    CHECK(cmd_oracle("/tmp/migsim_instance.json", "/tmp/migsim_oracle_out.json") == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/migsim_oracle_out.json"));
    // Only the balanced split satisfies the 0.05 band.
    CHECK(j["found"].get<bool>() == false);

    CHECK(cmd_oracle("/missing/instance.json", "") == 2);
    std::remove("/tmp/migsim_instance.json");
    std::remove("/tmp/migsim_oracle_out.json");
}

TEST_CASE("cmd_validate exports the dependency graph debug view") {
    SynthSpec synth;
    synth.kind = "lb";
    synth.multiplier = 1;
    system("mkdir -p /tmp/migsim_val");
    CHECK(cmd_validate("", synth, 3, "/tmp/migsim_val") == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/migsim_val/validate.json"));
    CHECK(j["hosts"] == 128);
    CHECK(j["switches"] == 80);
    CHECK(j["placement_feasible"] == true);
    CHECK(j["dep_graph"].contains("nodes"));
    CHECK(j["dep_graph"].contains("edges"));
    CHECK(j["dep_graph"].contains("cliques"));
}
