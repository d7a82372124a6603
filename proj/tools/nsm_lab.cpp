// nsm_lab: command-line driver for the outflow experiments.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "nsm/nsm.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::string out;
    std::int64_t seed = -1;
};

nsm::ScenarioConfig load(const std::string& path, const Overrides& o) {
    nsm::ScenarioConfig c = path.empty() ? nsm::ScenarioConfig{} : nsm::load_config(path);
    if (!o.out.empty()) c.out_dir = o.out;
    if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
    return c;
}

void report(const nsm::ScenarioResult& r) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    if (r.verdict == nsm::Verdict::error) {
        std::cerr << "error: " << r.error << '\n';
        return;
    }
    for (const auto& s : r.reasons) std::cout << "  " << s << '\n';
    std::cout << nsm::to_string(r.scenario) << ": " << nsm::to_string(r.verdict) << " (" << r.out_dir.string()
              << ")\n";
}

int cmd_profile(const std::string& path, const Overrides& o, double t) {
    const nsm::ScenarioConfig c = load(path, o);
    const nsm::ScenarioSetup s = nsm::build_setup(c);
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
    const fs::path dir = c.out_dir;
    if (s.layer) {
        auto os = nsm::io::open_output(dir / "layer.csv");
        nsm::write_layer_csv(os, *s.layer);
        std::cout << "layer: " << nsm::to_string(s.layer->tag()) << ", strength " << s.layer->strength() << '\n';
        if (!s.layer->exists()) {
            std::cout << "  " << s.layer->message() << '\n';
            return 1;
        }
    }
    std::vector<double> xs;
    for (std::size_t i = 0; i < s.grid.nodes(); ++i) xs.push_back(s.grid.x(i));
    if (s.rare) {
        auto os = nsm::io::open_output(dir / "rarefaction.csv");
        nsm::write_rarefaction_csv(os, *s.rare, t, xs);
        std::cout << "rarefaction: delta_r " << s.rare->wave().delta_r() << '\n';
    }
    if (s.profile) {
        auto os = nsm::io::open_output(dir / "composite.csv");
        nsm::write_composite_csv(os, *s.profile, t, xs);
    }
    std::cout << "profiles written to " << dir.string() << '\n';
    return 0;
}

int cmd_batch(const std::vector<std::string>& paths, const Overrides& o, unsigned workers) {
    std::vector<nsm::BatchItem> items;
    for (const auto& p : paths) {
        nsm::BatchItem it;
        it.name = p;
        try {
            nsm::ScenarioConfig c = nsm::load_config(p);
            if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
            // --out collects every run under one root, one directory per config
            if (!o.out.empty()) c.out_dir = (fs::path(o.out) / fs::path(p).stem()).string();
            it.config = c;
        } catch (const std::exception& e) {
            it.load_error = e.what();
        }
        items.push_back(std::move(it));
    }
    const auto entries = nsm::run_batch(items, workers);
    const fs::path report_path = fs::path(o.out.empty() ? "." : o.out) / "batch_report.csv";
    {
        auto os = nsm::io::open_output(report_path);
        nsm::write_batch_report(os, entries);
    }
    int worst = 0;
    for (const auto& e : entries) {
        std::cout << nsm::to_string(e.verdict) << "  " << e.name;
        if (!e.message.empty()) std::cout << "  (" << e.message << ')';
        std::cout << '\n';
        worst = std::max(worst, nsm::exit_code(e.verdict));
    }
    std::cout << "report: " << report_path.string() << '\n';
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outflow experiments for the compressible Navier-Stokes-Maxwell system"};
    app.require_subcommand(1);
    Overrides o;
    std::string config;
    unsigned workers = 1;
    double t_profile = 0.0;

    auto* profile = app.add_subcommand("profile", "write the wave profiles of a scenario");
    profile->add_option("--config", config, "config file (defaults apply when omitted)");
    profile->add_option("--out", o.out, "output directory");
    profile->add_option("--time", t_profile, "time at which the rarefaction is sampled");

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", config, "config file (defaults apply when omitted)");
    run->add_option("--out", o.out, "output directory");
    run->add_option("--seed", o.seed, "perturbation phase seed");

    std::vector<std::string> batch_configs;
    auto* batch = app.add_subcommand("batch", "run several scenarios concurrently");
    batch->add_option("--config,configs", batch_configs, "config files")->required();
    batch->add_option("--out", o.out, "root directory for outputs and batch_report.csv");
    batch->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
    batch->add_option("--seed", o.seed, "perturbation phase seed for every scenario");

    std::int64_t check_seed = 1;
    auto* check = app.add_subcommand("check", "run the invariant suites");
    check->add_option("--seed", check_seed, "sampling seed");

    auto* reduce = app.add_subcommand("reduce", "print the table of reduced systems");
    app.add_subcommand("schema", "print every config key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*profile) return cmd_profile(config, o, t_profile);
        if (*run) {
            const nsm::ScenarioResult r = nsm::run_scenario(load(config, o));
            report(r);
            return r.exit_code();
        }
        if (*batch) return cmd_batch(batch_configs, o, workers);
        if (*check) {
            bool all = true;
            for (const auto& c : nsm::run_checks(static_cast<std::uint64_t>(check_seed))) {
                std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << '\n';
                all = all && c.pass;
            }
            return all ? 0 : 1;
        }
        if (*reduce) {
            nsm::write_reduction_table(std::cout);
            return 0;
        }
        nsm::write_schema(std::cout);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
