// SPDX-License-Identifier: Apache-2.0
#include "isac/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "isac/allocator.hpp"
#include "isac/config_file.hpp"
#include "isac/csv.hpp"
#include "isac/errors.hpp"
#include "isac/harness.hpp"
#include "isac/selftest.hpp"
#include "isac/socp.hpp"
#include "isac/urllc.hpp"

namespace isac {

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    long long seed = -1;
    int trials = 100;
    std::string modes;  // empty: command default
    std::string sweep;
    std::string blocklengths;
    std::string gamma_s_db;
    std::string out_path;
    std::string symbols = "expected";
    bool serial = false;
    int threads = 0;
    int multi_start = 1;
    long long trial = 0;
    std::string dump_socp;
    std::string link_stats;
};

SystemConfig load(const Options& o)
{
    SystemConfig cfg;
    if (!o.config_path.empty()) {
        cfg = load_config_file(o.config_path);
    }
    for (const std::string& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed >= 0) {
        cfg.rng_seed = static_cast<std::uint64_t>(o.seed);
    }
    cfg.validate();
    return cfg;
}

std::vector<AllocationMode> parse_modes(const std::string& text)
{
    if (text.empty() || text == "all") {
        return {std::begin(kAllModes), std::end(kAllModes)};
    }
    std::vector<AllocationMode> modes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        modes.push_back(parse_mode(item));
    }
    if (modes.empty()) {
        throw ConfigError("empty --mode list");
    }
    return modes;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    if (text.empty()) {
        return out;
    }
    for (double v : parse_number_list(text)) {
        if (v != std::floor(v) || v < 1.0 || v > 1e7) {
            throw ConfigError("blocklengths must be positive integers");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

HarnessOptions harness_options(const Options& o)
{
    HarnessOptions h;
    h.exec = o.serial ? Execution::serial : Execution::parallel;
    if (o.symbols == "realized") {
        h.symbols = SymbolMode::realized;
    } else if (o.symbols != "expected") {
        throw ConfigError("--symbols must be expected or realized");
    }
    if (o.multi_start < 1) {
        throw ConfigError("--multi-start must be at least 1");
    }
    h.allocator.multi_start = o.multi_start;
    return h;
}

// Writes to --out when given, otherwise to `fallback`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw ConfigError("cannot open output file '" + path + "'");
            }
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

int availability_like(const Options& o, std::ostream& out, const char* default_sweep, int min_trials)
{
    const SystemConfig cfg = load(o);
    if (o.trials < min_trials) {
        throw ConfigError("--trials must be at least " + std::to_string(min_trials));
    }
    const SweepSpec sweep = parse_sweep(o.sweep.empty() ? default_sweep : o.sweep);
    std::vector<double> gammas;
    if (!o.gamma_s_db.empty()) {
        gammas = parse_number_list(o.gamma_s_db);
    }
    const std::vector<SweepPoint> points = make_points(cfg, sweep, parse_int_list(o.blocklengths), gammas);
    const GridResult grid = run_grid(cfg, parse_modes(o.modes), points, o.trials, harness_options(o));
    Sink sink(o.out_path, out);
    write_availability_csv(sink.get(), sweep.variable, summarize(grid));
    return kExitOk;
}

int ee_sweep(const Options& o, std::ostream& out)
{
    const SystemConfig cfg = load(o);
    if (o.trials < 1) {
        throw ConfigError("--trials must be positive");
    }
    const SweepSpec sweep = parse_sweep(o.sweep.empty() ? "L=100:20:180" : o.sweep);
    const std::vector<double> gammas =
        o.gamma_s_db.empty() ? std::vector<double>{3.0, 10.0} : parse_number_list(o.gamma_s_db);
    const std::vector<SweepPoint> points = make_points(cfg, sweep, parse_int_list(o.blocklengths), gammas);
    const GridResult grid = run_grid(cfg, parse_modes(o.modes), points, o.trials, harness_options(o));
    Sink sink(o.out_path, out);
    write_ee_csv(sink.get(), ee_table(grid));
    return kExitOk;
}

int single(const Options& o, std::ostream& out)
{
    const SystemConfig cfg = load(o);
    if (o.trial < 0) {
        throw ConfigError("--trial must be non-negative");
    }
    const auto trial = static_cast<std::uint64_t>(o.trial);
    const Scenario scenario = build_scenario(cfg);
    const HarnessOptions h = harness_options(o);

    if (!o.link_stats.empty()) {
        std::ofstream f(o.link_stats);
        if (!f) {
            throw ConfigError("cannot open '" + o.link_stats + "'");
        }
        write_link_stats_csv(f, scenario, trial);
    }

    const TrialData data = prepare_trial(scenario, trial, h.exec);
    if (!data.ok) {
        out << "trial " << trial << ": statistics failed: " << data.error << '\n';
        return kExitOk;
    }
    const UrllcTargets urllc = urllc_targets(cfg);
    const AllocationTargets targets = allocation_targets(cfg, urllc);
    Engine symbols = make_stream(cfg.rng_seed, Stage::symbols, trial, static_cast<std::uint64_t>(cfg.blocklength));
    const SensingQuadratics quad = sensing_quadratics(data.sensing, data.antennas, data.n_rx, cfg.data_len(),
                                                      cfg.noise_power, h.symbols, &symbols);

    if (!o.dump_socp.empty()) {
        const AllocationMode mode = parse_modes(o.modes).front();
        const VectorXd rho0 = initial_rho(data.comm, cfg.max_ap_power, mode);
        const Subproblem sp = build_subproblem(data.comm, quad, targets, rho0, has_sensing_constraint(mode), mode,
                                               cfg.sca.penalty);
        std::ofstream f(o.dump_socp);
        if (!f) {
            throw ConfigError("cannot open '" + o.dump_socp + "'");
        }
        write_problem(f, sp.problem);
    }

    out << std::setprecision(6);
    out << "trial " << trial << "  L=" << cfg.blocklength << "  gamma_c=" << targets.gamma_c(0)
        << "  gamma_s_db=" << linear_to_db(targets.gamma_s) << "  mc_inner=" << data.comm.realizations
        << "  clamped=" << data.comm.clamped << '\n';
    out << "b:";
    for (int i = 0; i < data.comm.n_ues(); ++i) {
        out << ' ' << data.comm.b(i);
    }
    out << '\n';

    std::unique_ptr<std::ofstream> csv_file;
    std::unique_ptr<CsvWriter> csv;
    if (!o.out_path.empty()) {
        csv_file = std::make_unique<std::ofstream>(o.out_path);
        if (!*csv_file) {
            throw ConfigError("cannot open output file '" + o.out_path + "'");
        }
        csv = std::make_unique<CsvWriter>(*csv_file);
        csv->header({"trial", "mode", "L", "gamma_s_db", "status", "p_total_w", "iterations", "min_sinr_margin",
                     "min_dep_margin", "sensing_margin", "min_ap_margin"});
    }

    for (AllocationMode mode : parse_modes(o.modes)) {
        const PowerAllocation a = fpp_sca(data.comm, quad, targets, mode, cfg.sca, h.allocator);
        out << '\n' << to_string(mode) << ": " << to_string(a.status);
        if (!a.diagnostic.empty()) {
            out << " (" << a.diagnostic << ")";
        }
        out << "\n  iterations " << a.iterations << ", solver iterations " << a.solver_iterations
            << ", monotone " << (a.monotone ? "yes" : "no") << '\n';
        out << "  P_total " << a.total_power << " W, chi " << a.chi << '\n';
        out << "  rho:";
        for (int j = 0; j < a.rho.size(); ++j) {
            out << ' ' << a.rho(j);
        }
        out << "\n  trace:";
        for (double f : a.objective_trace) {
            out << ' ' << f;
        }
        out << '\n';
        const ConstraintReport& r = a.report;
        const bool have = r.sinr.size() > 0;
        if (have) {
            out << "  min SINR margin " << r.sinr_margin.minCoeff() << ", min DEP margin " << r.dep_margin.minCoeff()
                << ", sensing SINR " << r.sensing_sinr << ", min AP margin " << r.ap_margin.minCoeff() << '\n';
        }
        if (a.status == AllocationStatus::feasible) {
            out << "  EE " << energy_efficiency(a.rho, urllc) << " bit/J\n";
        }
        if (csv) {
            csv->field(static_cast<unsigned long long>(trial)).field(to_string(mode)).field(cfg.blocklength);
            csv->field(linear_to_db(targets.gamma_s)).field(to_string(a.status)).field(a.total_power);
            csv->field(a.iterations);
            csv->field(have ? r.sinr_margin.minCoeff() : std::nan(""));
            csv->field(have ? r.dep_margin.minCoeff() : std::nan(""));
            csv->field(have ? r.sensing_margin : std::nan(""));
            csv->field(have ? r.ap_margin.minCoeff() : std::nan(""));
            csv->end_row();
        }
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cell-free ISAC/URLLC power allocation simulator", "isac"};
    app.require_subcommand(1);
    Options o;

    auto* availability = app.add_subcommand("availability", "network availability vs. a sweep variable");
    auto* ee = app.add_subcommand("ee-sweep", "energy efficiency vs. blocklength");
    auto* dep = app.add_subcommand("dep-sweep", "network availability vs. DEP threshold");
    auto* one = app.add_subcommand("single", "one trial with full diagnostics");
    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

    for (CLI::App* sub : {availability, ee, dep, one}) {
        sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", o.overrides, "override one config key (key=value), repeatable");
        sub->add_option("--seed", o.seed, "RNG seed (overrides rng_seed)")->check(CLI::NonNegativeNumber);
        sub->add_option("--mode", o.modes, "all, or a comma list of SeURLLC+, SeURLLC, URLLC_only");
        sub->add_option("--out", o.out_path, "write CSV here instead of stdout");
        sub->add_option("--symbols", o.symbols, "sensing symbol statistics: expected or realized");
        sub->add_flag("--serial", o.serial, "use the serial reference path");
        sub->add_option("--threads", o.threads, "OpenMP thread count (0 = runtime default)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--multi-start", o.multi_start, "initial points tried per allocation");
    }
    for (CLI::App* sub : {availability, ee, dep}) {
        sub->add_option("--trials", o.trials, "Monte Carlo trials (UE drops)");
        sub->add_option("--sweep", o.sweep, "sweep spec, e.g. L=100:20:180, gamma_s=3,10, eps=1e-7:1e-3");
        sub->add_option("--L", o.blocklengths, "comma list of blocklengths when L is not swept");
        sub->add_option("--gamma-s", o.gamma_s_db, "comma list of sensing SINR thresholds in dB");
    }
    one->add_option("--trial", o.trial, "trial (UE drop) index");
    one->add_option("--dump-socp", o.dump_socp, "write the first convex subproblem to this file");
    one->add_option("--link-stats", o.link_stats, "write per-link large-scale parameters as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
#ifdef _OPENMP
        if (o.threads > 0) {
            omp_set_num_threads(o.threads);
        }
#endif
        if (selftest->parsed()) {
            return run_selftest(out) ? kExitOk : kExitInternal;
        }
        if (availability->parsed()) {
            Options a = o;
            if (a.gamma_s_db.empty()) {
                a.gamma_s_db = "3,10";
            }
            return availability_like(a, out, "L=100:20:180", 20);
        }
        if (dep->parsed()) {
            Options d = o;
            if (d.blocklengths.empty()) {
                d.blocklengths = "140,160,180";
            }
            if (d.modes.empty()) {
                d.modes = "SeURLLC+";
            }
            return availability_like(d, out, "eps=1e-7:1e-3", 20);
        }
        if (ee->parsed()) {
            return ee_sweep(o, out);
        }
        if (one->parsed()) {
            return single(o, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace isac
