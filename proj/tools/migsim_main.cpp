#include <CLI11.hpp>

#include "migsim/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"migsim: concurrency-aware VM migration planning and simulation"};
    app.require_subcommand(1);

    std::string scenario, out, instance, selector;
    std::vector<std::string> formats, selectors;
    uint64_t seed = 42;
    int seeds = 10;
    int fat_tree_k = 8;
    int64_t link_bw = 1'000'000'000;
    migsim::SynthSpec synth;

    auto add_scenario_opts = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "scenario JSON file");
        cmd->add_option("--synth", synth.kind, "synthetic scenario kind (lb|energy)");
        cmd->add_option("--multiplier", synth.multiplier, "lb scenario scale (1..4)");
        cmd->add_option("--hosts", synth.hosts, "energy scenario managed host count");
        cmd->add_option("--vms", synth.vms, "energy scenario VM count");
        cmd->add_option("--horizon", synth.horizon_s, "energy scenario horizon in seconds");
        cmd->add_option("--seed", seed, "seed for synthetic scenarios");
    };

    auto* topo = app.add_subcommand("topo", "emit a fat-tree topology as JSON");
    topo->add_option("--fat-tree", fat_tree_k, "fat-tree arity k (even, >= 4)")->required();
    topo->add_option("--link-bw", link_bw, "link bandwidth in bits/second");
    topo->add_option("--out", out, "output file (stdout when omitted)");

    auto* plan = app.add_subcommand("plan", "run the selector once and emit the plan");
    add_scenario_opts(plan);
    plan->add_option("--selector", selector,
                     "nomig|native|one-by-one|native+sch|hosthits|camig");
    plan->add_option("--out", out, "output directory (stdout when omitted)");

    auto* run = app.add_subcommand("run", "full pipeline: plan, schedule, simulate");
    add_scenario_opts(run);
    run->add_option("--selector", selector,
                    "nomig|native|one-by-one|native+sch|hosthits|camig");
    run->add_option("--out", out, "output directory (stdout when omitted)");
    run->add_option("--format", formats, "output formats (json, csv)")->delimiter(',');

    auto* compare = app.add_subcommand("compare", "run several selectors over several seeds");
    add_scenario_opts(compare);
    compare->add_option("--selectors", selectors, "selectors to compare")
        ->delimiter(',')
        ->required();
    compare->add_option("--seeds", seeds, "number of seeds");
    compare->add_option("--out", out, "output directory (stdout when omitted)");

    auto* oracle = app.add_subcommand("oracle", "solve a small placement instance exactly");
    oracle->add_option("--instance", instance, "instance JSON file")->required();
    oracle->add_option("--out", out, "output file (stdout when omitted)");

    auto* validate = app.add_subcommand("validate", "check a scenario and export debug graphs");
    add_scenario_opts(validate);
    validate->add_option("--out", out, "output directory (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (topo->parsed()) return migsim::cmd_topo(fat_tree_k, link_bw, out);
    if (plan->parsed()) return migsim::cmd_plan(scenario, synth, seed, selector, out);
    if (run->parsed()) return migsim::cmd_run(scenario, synth, seed, selector, out, formats);
    if (compare->parsed()) return migsim::cmd_compare(scenario, synth, selectors, seeds, seed, out);
    if (oracle->parsed()) return migsim::cmd_oracle(instance, out);
    if (validate->parsed()) return migsim::cmd_validate(scenario, synth, seed, out);
    return 2;
}
