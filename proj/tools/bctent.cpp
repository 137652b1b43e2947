#include <algorithm>
#include <iostream>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bct/baselines.hpp"
#include "bct/chain_io.hpp"
#include "bct/context_tree.hpp"
#include "bct/entropy.hpp"
#include "bct/error.hpp"
#include "bct/posterior.hpp"
#include "bct/report.hpp"
#include "bct/sequence.hpp"
#include "bct/simulator.hpp"

namespace {

using namespace bct;

struct CoreOpts {
    std::string input;
    std::string out;
    std::uint32_t alphabet = 0;
    std::uint32_t depth = 10;
    double beta = -1.0;  // negative = 1 - 2^{-(m-1)} default
    std::uint64_t samples = 100000;
    std::uint64_t mc_length = 1000000;
    std::uint64_t seed = 0;
    double level = 0.95;
    std::uint32_t bins = 50;
};

double effective_beta(const CoreOpts& o) {
    return o.beta < 0.0 ? PriorConfig::default_beta(o.alphabet) : o.beta;
}

void validate_core(const CoreOpts& o, bool needs_input) {
    if (needs_input && o.input.empty()) throw usage_error("--input is required");
    if (o.alphabet < 2) throw usage_error("--alphabet must be >= 2");
    if (o.beta >= 0.0 && !(o.beta > 0.0 && o.beta < 1.0))
        throw usage_error("--beta must lie strictly between 0 and 1");
    if (o.samples < 2) throw usage_error("--samples must be >= 2");
    if (o.mc_length < 1) throw usage_error("--mc-length must be >= 1");
    if (!(o.level > 0.0 && o.level < 1.0))
        throw usage_error("--level must lie strictly between 0 and 1");
    if (o.bins < 1) throw usage_error("--bins must be >= 1");
}

PriorConfig prior_config(const CoreOpts& o) {
    return PriorConfig(o.alphabet, o.depth, effective_beta(o));
}

void add_core_options(CLI::App* cmd, CoreOpts& o, bool with_input) {
    if (with_input)
        cmd->add_option("--input", o.input, "Input sequence file");
    cmd->add_option("--alphabet", o.alphabet, "Alphabet size m (symbols are 0..m-1)")
        ->required();
    cmd->add_option("--depth", o.depth, "Context depth bound D")->capture_default_str();
    cmd->add_option("--beta", o.beta, "Prior branching weight (default 1 - 2^{-(m-1)})");
    cmd->add_option("--samples", o.samples, "Posterior sample count N")->capture_default_str();
    cmd->add_option("--mc-length", o.mc_length, "Path length M for Monte Carlo entropy")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    cmd->add_option("--level", o.level, "Credible interval level")->capture_default_str();
    cmd->add_option("--bins", o.bins, "Histogram bin count")->capture_default_str();
    cmd->add_option("--out", o.out, "Write the report here instead of stdout");
}

void echo_core(Report& r, const std::string& command, const CoreOpts& o, const Sequence* x) {
    r.add("command", command);
    if (!o.input.empty()) r.add("input", o.input);
    r.add("alphabet", static_cast<std::uint64_t>(o.alphabet));
    if (x != nullptr) r.add("n", static_cast<std::uint64_t>(x->size()));
    r.add("depth", static_cast<std::uint64_t>(o.depth));
    r.add("beta", effective_beta(o));
    r.add("samples", o.samples);
    r.add("mc-length", o.mc_length);
    r.add("seed", o.seed);
    r.add("level", o.level);
    r.add("bins", static_cast<std::uint64_t>(o.bins));
}

void deliver(const std::string& out, const std::string& content) {
    if (out.empty())
        std::cout << content;
    else
        write_text_file(out, content);
}

Sequence load_sequence(const CoreOpts& o) {
    return parse_sequence(read_text_file(o.input), o.alphabet);
}

struct BctRun {
    PosteriorSampleSet set{Alphabet{2}, 0, {}};
    FillReport fill;
    EntropySummary summary;
    std::vector<double> values;
};

BctRun run_bct(const ContextTree& tree, const CoreOpts& o) {
    BctRun run;
    SampleSetOptions sopts;
    sopts.count = o.samples;
    sopts.seed = o.seed;
    run.set = sample_joint(tree, sopts);

    EntropyPolicy policy;
    policy.mc_length = o.mc_length;
    policy.seed = o.seed;
    run.fill = fill_entropy(run.set, policy);

    run.values.reserve(run.set.samples.size());
    for (const JointSample& s : run.set.samples)
        if (s.method != EntropyMethod::Failed) run.values.push_back(s.entropy);
    if (run.values.size() < 2)
        throw data_error("too few posterior samples survived entropy evaluation (" +
                         std::to_string(run.values.size()) + ")");
    run.summary = summarize(run.values, o.level, o.bins);
    return run;
}

void add_fill_counts(Report& r, const std::string& prefix, const FillReport& fill) {
    r.add(prefix + "fill-exact", fill.exact);
    r.add(prefix + "fill-mc", fill.mc);
    r.add(prefix + "fill-failed", fill.failed);
}

// ---- estimate

const std::vector<std::string> kEstimatorOrder{"bct", "ctw", "ppm", "lz", "plugin"};

struct EstimateOpts {
    CoreOpts core;
    std::vector<std::string> estimators = kEstimatorOrder;
    std::vector<std::uint32_t> plugin_k{5, 6, 7};
};

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

void cmd_estimate(const EstimateOpts& eo) {
    validate_core(eo.core, true);
    std::set<std::string> wanted(eo.estimators.begin(), eo.estimators.end());
    for (const auto& name : wanted)
        if (std::find(kEstimatorOrder.begin(), kEstimatorOrder.end(), name) ==
            kEstimatorOrder.end())
            throw usage_error("unknown estimator '" + name +
                              "' (known: bct, ctw, ppm, lz, plugin)");
    if (wanted.empty()) throw usage_error("--estimators selected nothing");
    std::vector<std::uint32_t> ks(eo.plugin_k);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (wanted.count("plugin") && ks.empty()) throw usage_error("--plugin-k selected nothing");

    const Sequence x = load_sequence(eo.core);
    Report r;
    echo_core(r, "estimate", eo.core, &x);
    std::vector<std::string> selected;
    for (const auto& name : kEstimatorOrder)
        if (wanted.count(name)) selected.push_back(name);
    r.add("estimators", join(selected, ','));
    if (wanted.count("plugin")) {
        std::vector<std::string> kstr;
        for (const auto k : ks) kstr.push_back(std::to_string(k));
        r.add("plugin-k", join(kstr, ','));
    }

    if (wanted.count("bct") || wanted.count("ctw")) {
        ContextTree tree = ContextTree::build(x, prior_config(eo.core));
        tree.compute_weighted();
        if (wanted.count("bct")) {
            const BctRun run = run_bct(tree, eo.core);
            r.add("bct.mean", run.summary.mean);
            r.add("bct.sd", run.summary.sd);
            r.add("bct.ci-lo", run.summary.ci_lo);
            r.add("bct.ci-hi", run.summary.ci_hi);
            add_fill_counts(r, "bct.", run.fill);
        }
        if (wanted.count("ctw")) r.add("ctw.value", tree.ctw_entropy_estimate());
    }
    if (wanted.count("ppm")) {
        r.add("ppm.variant", "interpolated-smoothing");
        r.add("ppm.value", ppm_estimate(x, eo.core.depth));
    }
    if (wanted.count("lz")) {
        r.add("lz.variant", "increasing-window");
        r.add("lz.n0", static_cast<std::uint64_t>(std::max<std::size_t>(2, (x.size() + 9) / 10)));
        r.add("lz.value", lz_estimate(x));
    }
    if (wanted.count("plugin"))
        for (const auto k : ks)
            r.add("plugin:" + std::to_string(k) + ".value", plugin_estimate(x, k));

    deliver(eo.core.out, r.to_text());
}

// ---- posterior / prior

struct PosteriorOpts {
    CoreOpts core;
    std::string csv;
    std::string dump_samples;
    std::string dump_values;
};

void emit_posterior_outputs(const PosteriorOpts& po, Report& r, const BctRun& run,
                            std::uint32_t m) {
    add_fill_counts(r, "", run.fill);
    add_summary(r, run.summary);
    deliver(po.core.out, r.to_text());
    if (!po.csv.empty()) write_text_file(po.csv, summary_to_csv(run.summary));
    if (!po.dump_samples.empty()) {
        std::string lines;
        for (const JointSample& s : run.set.samples) {
            lines += sample_to_line(s, m);
            lines += '\n';
        }
        write_text_file(po.dump_samples, lines);
    }
    if (!po.dump_values.empty()) {
        std::string lines;
        for (const double v : run.values) {
            lines += format_double(v);
            lines += '\n';
        }
        write_text_file(po.dump_values, lines);
    }
}

void cmd_posterior(const PosteriorOpts& po) {
    validate_core(po.core, true);
    const Sequence x = load_sequence(po.core);
    ContextTree tree = ContextTree::build(x, prior_config(po.core));
    tree.compute_weighted();
    const BctRun run = run_bct(tree, po.core);

    Report r;
    echo_core(r, "posterior", po.core, &x);
    r.add("log-prior-predictive", tree.log_prior_predictive());
    emit_posterior_outputs(po, r, run, po.core.alphabet);
}

void cmd_prior(const PosteriorOpts& po) {
    validate_core(po.core, false);
    const ContextTree tree = ContextTree::prior_only(Alphabet{po.core.alphabet},
                                                     prior_config(po.core));
    const BctRun run = run_bct(tree, po.core);

    Report r;
    echo_core(r, "prior", po.core, nullptr);
    emit_posterior_outputs(po, r, run, po.core.alphabet);
}

// ---- simulate / convergence helpers

struct SourceOpts {
    std::string fixture;
    std::string chain;
};

void add_source_options(CLI::App* cmd, SourceOpts& s) {
    const auto names = join(fixture_names(), ',');
    cmd->add_option("--fixture", s.fixture, "Fixture chain name (" + names + ")");
    cmd->add_option("--chain", s.chain, "Chain spec file");
}

// spec plus its pinned entropy when one is known
ChainFile load_source(const SourceOpts& s, bool need_entropy) {
    if (s.fixture.empty() == s.chain.empty())
        throw usage_error("give exactly one of --fixture or --chain");
    ChainFile file;
    if (!s.fixture.empty()) {
        Fixture fix = fixture_chain(s.fixture);
        file.spec = std::move(fix.spec);
        file.entropy = fix.entropy;
        return file;
    }
    file = read_chain_file(s.chain);
    if (!file.entropy) {
        try {
            file.entropy = entropy_rate_exact(file.spec);
        } catch (const Error&) {
            if (need_entropy)
                throw data_error("chain file '" + s.chain +
                                 "' pins no entropy and the exact solve is out of budget");
        }
    }
    return file;
}

struct SimulateOpts {
    SourceOpts source;
    std::uint64_t length = 0;
    std::uint64_t seed = 0;
    std::string context;
    std::string out;
    std::string sidecar;
};

void cmd_simulate(const SimulateOpts& so) {
    if (so.length < 1) throw usage_error("--length must be >= 1");
    const ChainFile source = load_source(so.source, false);

    SimulationRequest req;
    req.spec = source.spec;
    req.length = so.length;
    req.seed = so.seed;
    if (!so.context.empty()) {
        req.policy = InitialContextPolicy::Given;
        req.context = parse_sequence(so.context, source.spec.alphabet.m).symbols;
    }
    const Sequence x = generate(req);

    deliver(so.out, serialize_sequence(x));
    std::string sidecar = so.sidecar;
    if (sidecar.empty() && !so.out.empty()) sidecar = so.out + ".chain";
    if (!sidecar.empty()) {
        ChainFile side;
        side.spec = source.spec;
        side.entropy = source.entropy;
        side.seed = so.seed;
        side.length = so.length;
        write_chain_file(sidecar, side);
    }
}

// ---- convergence

struct ConvergenceOpts {
    SourceOpts source;
    CoreOpts core;  // alphabet is taken from the chain, not a flag
    std::vector<std::uint64_t> n_grid;
    std::uint32_t seeds = 10;
    std::vector<std::string> estimators = kEstimatorOrder;
    std::vector<std::uint32_t> plugin_k{5, 6, 7};
    std::string out;
};

double evaluate_estimator(const std::string& name, std::uint32_t k, const Sequence& x,
                          const CoreOpts& core) {
    if (name == "bct") {
        ContextTree tree = ContextTree::build(x, prior_config(core));
        tree.compute_weighted();
        return run_bct(tree, core).summary.mean;
    }
    if (name == "ctw") {
        ContextTree tree = ContextTree::build(x, prior_config(core));
        tree.compute_weighted();
        return tree.ctw_entropy_estimate();
    }
    if (name == "ppm") return ppm_estimate(x, core.depth);
    if (name == "lz") return lz_estimate(x);
    return plugin_estimate(x, k);
}

void cmd_convergence(const ConvergenceOpts& co) {
    if (co.n_grid.empty()) throw usage_error("--n-grid is required");
    for (const auto n : co.n_grid)
        if (n < 2) throw usage_error("--n-grid entries must be >= 2");
    if (co.seeds < 1) throw usage_error("--seeds must be >= 1");
    std::set<std::string> wanted(co.estimators.begin(), co.estimators.end());
    for (const auto& name : wanted)
        if (std::find(kEstimatorOrder.begin(), kEstimatorOrder.end(), name) ==
            kEstimatorOrder.end())
            throw usage_error("unknown estimator '" + name + "'");

    const ChainFile source = load_source(co.source, true);
    const double truth = *source.entropy;

    CoreOpts core = co.core;
    core.alphabet = source.spec.alphabet.m;

    // estimator column labels in canonical order
    std::vector<std::pair<std::string, std::uint32_t>> columns;
    for (const auto& name : kEstimatorOrder) {
        if (!wanted.count(name)) continue;
        if (name == "plugin") {
            std::vector<std::uint32_t> ks(co.plugin_k);
            std::sort(ks.begin(), ks.end());
            ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
            for (const auto k : ks) columns.emplace_back("plugin:" + std::to_string(k), k);
        } else {
            columns.emplace_back(name, 0);
        }
    }

    std::string csv = "n,seed,estimator,value,abs_error\n";
    for (const auto n : co.n_grid) {
        std::vector<std::vector<double>> cell_values(columns.size());
        std::vector<std::vector<double>> cell_errors(columns.size());
        for (std::uint32_t s = 0; s < co.seeds; ++s) {
            const std::uint64_t run_seed = core.seed + s;
            SimulationRequest req;
            req.spec = source.spec;
            req.length = n;
            req.seed = run_seed;
            // estimators see the sequence cold, without the simulator's
            // realized initial context
            const Sequence sim = generate(req);
            const Sequence x(sim.alphabet, sim.symbols);

            CoreOpts run_core = core;
            run_core.seed = run_seed;
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const auto& [label, k] = columns[c];
                const std::string base = label.substr(0, label.find(':'));
                const double value = evaluate_estimator(base, k, x, run_core);
                const double err = std::abs(value - truth);
                cell_values[c].push_back(value);
                cell_errors[c].push_back(err);
                csv += std::to_string(n) + "," + std::to_string(run_seed) + "," + label + "," +
                       format_double(value) + "," + format_double(err) + "\n";
            }
        }
        for (std::size_t c = 0; c < columns.size(); ++c) {
            std::sort(cell_values[c].begin(), cell_values[c].end());
            std::sort(cell_errors[c].begin(), cell_errors[c].end());
            csv += std::to_string(n) + ",median," + columns[c].first + "," +
                   format_double(sorted_quantile(cell_values[c], 0.5)) + "," +
                   format_double(sorted_quantile(cell_errors[c], 0.5)) + "\n";
        }
    }
    deliver(co.out, csv);
}

// ---- quantize / fixture / tree

struct QuantizeOpts {
    std::string input;
    std::string out;
};

void cmd_quantize(const QuantizeOpts& qo) {
    if (qo.input.empty()) throw usage_error("--input is required");
    const auto values = parse_value_series(read_text_file(qo.input));
    deliver(qo.out, serialize_sequence(quantize_ternary(values)));
}

struct FixtureOpts {
    std::string name;
    std::string out;
    std::string write_all;
    bool list = false;
};

void cmd_fixture(const FixtureOpts& fo) {
    if (fo.list) {
        std::string out;
        for (const auto& name : fixture_names()) out += name + "\n";
        std::cout << out;
        return;
    }
    if (!fo.write_all.empty()) {
        for (const auto& name : fixture_names()) {
            const Fixture fix = fixture_chain(name);
            write_chain_file(fo.write_all + "/" + name + ".chain", fix.spec, fix.entropy);
        }
        return;
    }
    if (fo.name.empty()) throw usage_error("give --name, --list, or --write-all");
    const Fixture fix = fixture_chain(fo.name);
    deliver(fo.out, chain_to_text(fix.spec, fix.entropy));
}

struct TreeOpts {
    CoreOpts core;
};

void cmd_tree(const TreeOpts& to) {
    validate_core(to.core, true);
    const Sequence x = load_sequence(to.core);
    ContextTree tree = ContextTree::build(x, prior_config(to.core));
    tree.compute_weighted();

    Report r;
    r.add("command", "tree");
    r.add("input", to.core.input);
    r.add("alphabet", static_cast<std::uint64_t>(to.core.alphabet));
    r.add("n", static_cast<std::uint64_t>(x.size()));
    r.add("depth", static_cast<std::uint64_t>(to.core.depth));
    r.add("beta", effective_beta(to.core));
    r.add("scored", tree.scored());
    r.add("context-consumed", tree.context_consumed() ? "yes" : "no");
    r.add("nodes", static_cast<std::uint64_t>(tree.node_count()));
    r.add("log-prior-predictive", tree.log_prior_predictive());
    r.add("ctw.value", tree.ctw_entropy_estimate());

    std::ostringstream nodes;
    tree.dump(nodes);
    std::istringstream lines(nodes.str());
    std::string line;
    while (std::getline(lines, line)) r.add_raw("node " + line);
    deliver(to.core.out, r.to_text());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian context-tree entropy estimation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file");
    app.footer("Environment: BCTENT_THREADS caps the worker thread count.");

    EstimateOpts eo;
    auto* est = app.add_subcommand("estimate", "Run the selected entropy estimators on a sequence");
    add_core_options(est, eo.core, true);
    est->add_option("--estimators", eo.estimators,
                    "Comma-separated subset of bct,ctw,ppm,lz,plugin")
        ->delimiter(',');
    est->add_option("--plugin-k", eo.plugin_k, "Plug-in block lengths")->delimiter(',');
    est->callback([&eo] { cmd_estimate(eo); });

    PosteriorOpts po;
    auto* post = app.add_subcommand("posterior", "Posterior sample of the entropy rate");
    add_core_options(post, po.core, true);
    post->add_option("--csv", po.csv, "Write the histogram as CSV here");
    post->add_option("--dump-samples", po.dump_samples, "Write raw (T, theta, H) records here");
    post->add_option("--dump-values", po.dump_values, "Write raw H values here");
    post->callback([&po] { cmd_posterior(po); });

    PosteriorOpts pro;
    auto* pri = app.add_subcommand("prior", "Sample the induced prior on the entropy rate");
    add_core_options(pri, pro.core, false);
    pri->add_option("--csv", pro.csv, "Write the histogram as CSV here");
    pri->add_option("--dump-samples", pro.dump_samples, "Write raw (T, theta, H) records here");
    pri->add_option("--dump-values", pro.dump_values, "Write raw H values here");
    pri->callback([&pro] { cmd_prior(pro); });

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Generate a sequence from a chain spec");
    add_source_options(sim, so.source);
    sim->add_option("--length", so.length, "Sequence length")->required();
    sim->add_option("--seed", so.seed, "Random seed")->capture_default_str();
    sim->add_option("--context", so.context, "Initial context (time order); default burn-in");
    sim->add_option("--out", so.out, "Sequence file (stdout if omitted)");
    sim->add_option("--sidecar", so.sidecar, "Spec sidecar path (default <out>.chain)");
    sim->callback([&so] { cmd_simulate(so); });

    ConvergenceOpts co;
    auto* conv = app.add_subcommand("convergence", "Estimator error versus sample size");
    add_source_options(conv, co.source);
    conv->add_option("--n-grid", co.n_grid, "Comma-separated sequence lengths")
        ->required()
        ->delimiter(',');
    conv->add_option("--seeds", co.seeds, "Number of seeds per cell")->capture_default_str();
    conv->add_option("--depth", co.core.depth, "Context depth bound D")->capture_default_str();
    conv->add_option("--beta", co.core.beta, "Prior branching weight");
    conv->add_option("--samples", co.core.samples, "Posterior sample count N")->capture_default_str();
    conv->add_option("--mc-length", co.core.mc_length, "Monte Carlo path length")->capture_default_str();
    conv->add_option("--seed", co.core.seed, "Base seed")->capture_default_str();
    conv->add_option("--estimators", co.estimators, "Estimator subset")->delimiter(',');
    conv->add_option("--plugin-k", co.plugin_k, "Plug-in block lengths")->delimiter(',');
    conv->add_option("--out", co.out, "CSV output path (stdout if omitted)");
    conv->callback([&co] { cmd_convergence(co); });

    QuantizeOpts qo;
    auto* quant = app.add_subcommand("quantize", "Quantize a real-valued series to ternary");
    quant->add_option("--input", qo.input, "One real value per line")->required();
    quant->add_option("--out", qo.out, "Sequence output (stdout if omitted)");
    quant->callback([&qo] { cmd_quantize(qo); });

    FixtureOpts fo;
    auto* fix = app.add_subcommand("fixture", "Inspect or regenerate the pinned fixture chains");
    fix->add_option("--name", fo.name, "Fixture name");
    fix->add_option("--out", fo.out, "Chain file output (stdout if omitted)");
    fix->add_option("--write-all", fo.write_all, "Regenerate every fixture file in this directory");
    fix->add_flag("--list", fo.list, "List fixture names");
    fix->callback([&fo] { cmd_fixture(fo); });

    TreeOpts to;
    auto* tre = app.add_subcommand("tree", "Dump the weighted count tree for a sequence");
    add_core_options(tre, to.core, true);
    tre->callback([&to] { cmd_tree(to); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
