// Command-line front-end: closed-form rate curves, seeded Monte-Carlo
// experiments, and axis sweeps emitted as plot-ready CSV/JSON tables.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cachesim/analytics.hpp"
#include "cachesim/montecarlo.hpp"
#include "cachesim/output.hpp"

namespace {

using namespace cachesim;

struct CommonOptions {
    std::uint32_t num_caches = 0;
    std::uint32_t library_size = 0;
    std::uint32_t cache_capacity = 0;
    std::uint32_t delta = 1;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--K", opts.num_caches, "Number of caches")->required();
    cmd.add_option("--N", opts.library_size, "Number of files in the library")->required();
    cmd.add_option("--M", opts.cache_capacity, "Cache capacity in files")->required();
    cmd.add_option("--delta", opts.delta, "Subfiles per file (1 = whole files)")
        ->capture_default_str();
}

CliqueOdeVariant parse_variant(const std::string& name) {
    if (name == "balanced") return CliqueOdeVariant::balanced_inflow;
    if (name == "additive") return CliqueOdeVariant::additive_inflow;
    throw CLI::ValidationError("--ode-variant", "expected 'balanced' or 'additive'");
}

std::vector<std::uint32_t> parse_values(const std::string& csv) {
    std::vector<std::uint32_t> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    if (values.empty()) throw CLI::ValidationError("--values", "no values given");
    return values;
}

double uncoded_reference(const CacheNetworkConfig& cfg) {
    return rate_uncoded_analytic(cfg.num_caches, cfg.library_size, cfg.cache_capacity);
}

int cmd_analytic(const CommonOptions& common, const std::string& scheme_name,
                 double ode_step, CliqueOdeVariant variant) {
    const CacheNetworkConfig cfg(common.num_caches, common.library_size,
                                 common.cache_capacity, common.delta);
    const Rational q = cfg.storage_fraction();

    RatePoint point;
    point.source = RateSource::analytic;
    point.num_caches = cfg.num_caches;
    point.library_size = cfg.library_size;
    point.cache_capacity = cfg.cache_capacity;
    point.subfiles_per_file = cfg.subfiles_per_file;

    if (scheme_name == "cfcm") {
        point.scheme = Scheme::cfcm;
        point.rate = rate_cfcm_analytic(cfg.num_caches, q);
    } else if (scheme_name == "cfcc") {
        point.scheme = Scheme::cfcc;
        point.rate = rate_cfcc_analytic(cfg.num_caches, q, ode_step, variant);
    } else if (scheme_name == "cscc-approx") {
        point.scheme = Scheme::cscc;
        point.rate = rate_cscc_approx(cfg.num_caches, q, cfg.subfiles_per_file, variant);
    } else if (scheme_name == "uncoded") {
        point.scheme = Scheme::uncoded;
        point.rate = uncoded_reference(cfg);
    } else if (scheme_name == "csc-opt") {
        point.scheme = Scheme::csc_opt;
        point.rate = rate_csc_opt_analytic(cfg.num_caches, cfg.library_size,
                                           cfg.cache_capacity);
    } else {
        throw CLI::ValidationError("--scheme", "unknown analytic scheme " + scheme_name);
    }

    std::vector<OutputRow> rows{make_output_row(point, uncoded_reference(cfg))};
    write_csv(std::cout, rows);
    return 0;
}

int cmd_simulate(const CommonOptions& common, const std::string& scheme_name,
                 std::uint64_t trials, std::uint64_t seed, const std::string& source_name,
                 const std::string& dump_path) {
    ExperimentSpec spec{CacheNetworkConfig(common.num_caches, common.library_size,
                                           common.cache_capacity, common.delta),
                        parse_scheme(scheme_name), trials, seed, GraphSource::exact};
    if (source_name == "asymptotic")
        spec.graph_source = GraphSource::asymptotic;
    else if (source_name != "exact")
        throw CLI::ValidationError("--source", "expected 'exact' or 'asymptotic'");

    std::vector<TrialRecord> records;
    const Estimate est = run_experiment(spec, dump_path.empty() ? nullptr : &records);

    RatePoint point{base_scheme(spec.scheme),
                    RateSource::monte_carlo,
                    spec.cfg.num_caches,
                    spec.cfg.library_size,
                    spec.cfg.cache_capacity,
                    spec.cfg.subfiles_per_file,
                    est.mean,
                    est.stderr_,
                    est.trials,
                    std::nullopt};
    if (base_scheme(spec.scheme) != Scheme::uncoded)
        point.large_clique_coverage = est.large_clique_coverage_mean;

    std::vector<OutputRow> rows{make_output_row(point, uncoded_reference(spec.cfg))};
    write_csv(std::cout, rows);

    if (!dump_path.empty()) {
        std::ofstream out(dump_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open dump file: " + dump_path);
        write_trial_csv(out, spec, records);
    }
    return 0;
}

int cmd_sweep(const CommonOptions& common, const std::string& axis_name,
              const std::string& values_csv, const std::string& schemes_csv,
              std::uint64_t trials, std::uint64_t seed, const std::string& source_name,
              const std::string& out_path, const std::string& format) {
    SweepAxis axis;
    if (axis_name == "M")
        axis = SweepAxis::capacity;
    else if (axis_name == "K")
        axis = SweepAxis::caches;
    else if (axis_name == "delta")
        axis = SweepAxis::subfiles;
    else
        throw CLI::ValidationError("--axis", "expected 'M', 'K' or 'delta'");
    if (format != "csv" && format != "json")
        throw CLI::ValidationError("--format", "expected 'csv' or 'json'");

    const std::vector<std::uint32_t> values = parse_values(values_csv);
    std::vector<Scheme> schemes;
    {
        std::stringstream ss(schemes_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) schemes.push_back(parse_scheme(item));
        if (schemes.empty()) throw CLI::ValidationError("--schemes", "no schemes given");
    }

    GraphSource source = GraphSource::exact;
    if (source_name == "asymptotic")
        source = GraphSource::asymptotic;
    else if (source_name != "exact")
        throw CLI::ValidationError("--source", "expected 'exact' or 'asymptotic'");

    const CacheNetworkConfig base_cfg(common.num_caches, common.library_size,
                                      common.cache_capacity, common.delta);
    std::vector<OutputRow> rows;
    for (Scheme scheme : schemes) {
        ExperimentSpec base{base_cfg, scheme, trials, seed, source};
        for (const SweepEntry& entry : run_sweep(base, axis, values)) {
            double uncoded = 0.0;
            try {
                uncoded = rate_uncoded_analytic(entry.point.num_caches,
                                                entry.point.library_size,
                                                entry.point.cache_capacity);
            } catch (const std::exception&) {
                uncoded = 0.0;
            }
            rows.push_back(make_output_row(entry.point, uncoded, entry.error));
        }
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    if (format == "csv")
        write_csv(out, rows, /*with_error=*/true);
    else
        write_json(out, rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized coded caching: analytic rates and Monte-Carlo simulation"};
    app.set_config("--config", "", "Read options from a key=value file");
    app.require_subcommand(1);

    CommonOptions common;
    std::string scheme;
    std::string source = "exact";
    std::string variant_name = "balanced";
    double ode_step = 0.0;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    std::string dump_path;
    std::string axis_name;
    std::string values_csv;
    std::string schemes_csv = "cfcm,cfcc,uncoded,csc-opt";
    std::string out_path;
    std::string format = "csv";

    CLI::App* analytic = app.add_subcommand("analytic", "Evaluate closed-form rates");
    add_common(*analytic, common);
    analytic->add_option("--scheme", scheme, "cfcm|cfcc|csc-opt|uncoded|cscc-approx")
        ->required();
    analytic->add_option("--ode-step", ode_step, "Fixed integration step (default 1/(50K))");
    analytic->add_option("--ode-variant", variant_name,
                         "Clique-growth drift convention: balanced|additive")
        ->capture_default_str();

    CLI::App* simulate = app.add_subcommand("simulate", "Run one Monte-Carlo experiment");
    add_common(*simulate, common);
    simulate->add_option("--scheme", scheme, "cfcm|cfcc|cscc|uncoded")->required();
    simulate->add_option("--trials", trials, "Number of trials")->capture_default_str();
    simulate->add_option("--seed", seed, "Master seed")->capture_default_str();
    simulate->add_option("--source", source, "Graph source: exact|asymptotic")
        ->capture_default_str();
    simulate->add_option("--dump-trials", dump_path, "Write per-trial CSV to this path");

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep one axis and write a table");
    add_common(*sweep, common);
    sweep->add_option("--axis", axis_name, "Sweep axis: M|K|delta")->required();
    sweep->add_option("--values", values_csv, "Comma-separated axis values")->required();
    sweep->add_option("--schemes", schemes_csv, "Comma-separated schemes")
        ->capture_default_str();
    sweep->add_option("--trials", trials, "Trials per point")->capture_default_str();
    sweep->add_option("--seed", seed, "Master seed")->capture_default_str();
    sweep->add_option("--source", source, "Graph source: exact|asymptotic")
        ->capture_default_str();
    sweep->add_option("--out", out_path, "Output file path")->required();
    sweep->add_option("--format", format, "Output format: csv|json")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (analytic->parsed())
            return cmd_analytic(common, scheme, ode_step, parse_variant(variant_name));
        if (simulate->parsed())
            return cmd_simulate(common, scheme, trials, seed, source, dump_path);
        return cmd_sweep(common, axis_name, values_csv, schemes_csv, trials, seed, source,
                         out_path, format);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
