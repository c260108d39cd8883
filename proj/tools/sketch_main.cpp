//
// Project     : aerosketch
// Module      : sketch_main.cpp
// Description : benchmark command-line entry point
//

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <string>

#include "aero/bench.hpp"

int main(int argc, char** argv) {
    CLI::App app{"aerosketch benchmark harness"};

    std::string scenario;
    aero::RunConfig config;
    std::string gen = "uniform";
    std::string input;
    std::string out;
    std::string baseline;
    double delta = 0.0;
    std::int64_t window = 0;

    const std::map<std::string, aero::Scenario> scenarios{
        {"fd", aero::Scenario::Fd},       {"sw", aero::Scenario::Sw},
        {"attp", aero::Scenario::Attp},   {"amm", aero::Scenario::Amm},
        {"dist", aero::Scenario::Dist},   {"dist-sw", aero::Scenario::DistSw},
    };

    app.add_option("scenario", scenario, "one of: fd, sw, attp, amm, dist, dist-sw")
        ->required()
        ->check(CLI::IsMember({"fd", "sw", "attp", "amm", "dist", "dist-sw"}));
    app.add_option("--eps", config.eps, "error bound in (0,1]");
    app.add_option("--dim", config.dim, "stream dimension")->required();
    app.add_option("--dim-y", config.dim_y, "second stream dimension (amm)");
    app.add_option("--window", window, "sliding-window size");
    app.add_option("--rmax", config.r_max, "squared-norm upper bound R (sw)");
    app.add_option("--sites", config.sites, "site count (dist, dist-sw)");
    app.add_option("--delta", delta, "amplification failure bound in (0, 1)");
    app.add_option("--seed", config.seed, "RNG seed");
    app.add_option("--query-every", config.query_every, "probe interval in steps");
    auto* opt_input = app.add_option("--input", input, "input stream file (CSV or .aero)");
    auto* opt_gen = app.add_option("--gen", gen, "synthetic generator: uniform | noisy")
                        ->check(CLI::IsMember({"uniform", "noisy"}));
    app.add_option("--rows", config.rows, "synthetic stream length");
    app.add_option("--zeta", config.zeta, "noise scale for --gen noisy");
    app.add_option("--out", out, "metrics CSV output path");
    app.add_flag("--normalize", config.normalize, "rescale so min squared norm is 1");
    app.add_option("--baseline", baseline, "comparator: svd")
        ->check(CLI::IsMember({"svd"}));
    app.add_option("--oracle-cap", config.oracle_cap, "exact-oracle row cap");
    opt_input->excludes(opt_gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // config error
    }

    try {
        config.scenario = scenarios.at(scenario);
        config.window = window;
        if (delta > 0.0) config.delta = delta;
        if (!input.empty()) {
            config.input_path = input;
            config.input_format = input.size() > 5 && input.substr(input.size() - 5) == ".aero"
                                      ? aero::StreamFormat::Aero
                                      : aero::StreamFormat::Csv;
        }
        config.gen_kind = (gen == "noisy") ? aero::GenKind::RandomNoisy
                                           : aero::GenKind::UniformRandom;
        config.baseline_svd = (baseline == "svd");
        if (!out.empty()) config.out_path = out;

        const auto reports = aero::run_scenario(config);
        if (out.empty()) {  // no file requested: print to stdout
            std::printf("%s\n", aero::kCsvHeader);
            for (const auto& r : reports) std::printf("%s\n", aero::csv_line(r).c_str());
        }
        return 0;
    } catch (const aero::InvalidInput& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}
