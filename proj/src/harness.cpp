// SPDX-License-Identifier: Apache-2.0
#include "isac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>

#include "isac/csv.hpp"
#include "isac/errors.hpp"
#include "isac/propagation.hpp"
#include "isac/urllc.hpp"

namespace isac {

TrialData prepare_trial(const Scenario& scenario, std::uint64_t trial, Execution exec)
{
    TrialData d;
    d.trial = trial;
    try {
        const Geometry geometry = drop_ues(scenario, trial);
        NetworkStats net = build_network_stats(scenario, geometry, trial);
        d.antennas = net.antennas;
        d.n_rx = net.n_rx;
        const MonteCarloModel model(scenario, std::move(net), trial);
        TrialStatistics ts = collect_statistics(model, scenario.config().mc_inner, exec);
        d.comm = std::move(ts.comm);
        d.sensing = std::move(ts.sensing);
        d.ok = true;
    } catch (const NumericalError& e) {
        d.ok = false;
        d.error = e.what();
    }
    return d;
}

std::vector<TrialData> prepare_trials(const Scenario& scenario, int n_trials, Execution exec)
{
    std::vector<TrialData> out(static_cast<std::size_t>(n_trials));
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int t = 0; t < n_trials; ++t) {
            out[static_cast<std::size_t>(t)] = prepare_trial(scenario, static_cast<std::uint64_t>(t), Execution::serial);
        }
    } else {
        for (int t = 0; t < n_trials; ++t) {
            out[static_cast<std::size_t>(t)] = prepare_trial(scenario, static_cast<std::uint64_t>(t), Execution::serial);
        }
    }
    return out;
}

const char* to_string(FailureClass f)
{
    switch (f) {
        case FailureClass::none:
            return "none";
        case FailureClass::delay:
            return "delay";
        case FailureClass::comm:
            return "comm";
        case FailureClass::sensing:
            return "sensing";
        case FailureClass::power:
            return "power";
        case FailureClass::solver:
            return "solver";
        case FailureClass::error:
            return "error";
    }
    return "unknown";
}

namespace {

SystemConfig config_at(const SystemConfig& base, const SweepPoint& point)
{
    SystemConfig cfg = base;
    cfg.blocklength = point.blocklength;
    cfg.sensing_sinr_threshold = point.gamma_s;
    if (point.dep_threshold > 0.0) {
        cfg.dep_threshold = {point.dep_threshold};
    }
    return cfg;
}

FailureClass classify(const PowerAllocation& a)
{
    if (a.status == AllocationStatus::feasible) {
        return FailureClass::none;
    }
    if (a.status == AllocationStatus::max_iter) {
        return FailureClass::solver;
    }
    if (a.report.sinr.size() == 0 || !a.report.comm_ok()) {
        return FailureClass::comm;
    }
    if (!a.report.power_ok()) {
        return FailureClass::power;
    }
    return FailureClass::sensing;
}

}  // namespace

TrialOutcome evaluate(const SystemConfig& config, const TrialData& data, const SweepPoint& point,
                      AllocationMode mode, const HarnessOptions& options)
{
    TrialOutcome out;
    if (!data.ok) {
        out.failure = FailureClass::error;
        return out;
    }
    const SystemConfig cfg = config_at(config, point);
    const UrllcTargets urllc = urllc_targets(cfg);
    if (cfg.blocklength > max_blocklength(urllc)) {
        out.status = AllocationStatus::infeasible;
        out.failure = FailureClass::delay;
        return out;
    }
    const AllocationTargets targets = allocation_targets(cfg, urllc);

    Engine symbols = make_stream(cfg.rng_seed, Stage::symbols, data.trial, static_cast<std::uint64_t>(cfg.blocklength));
    const SensingQuadratics quad = sensing_quadratics(data.sensing, data.antennas, data.n_rx, cfg.data_len(),
                                                      cfg.noise_power, options.symbols, &symbols);

    PowerAllocation alloc;
    try {
        alloc = fpp_sca(data.comm, quad, targets, mode, cfg.sca, options.allocator);
    } catch (const NumericalError&) {
        out.failure = FailureClass::error;
        return out;
    }
    out.status = alloc.status;
    out.failure = classify(alloc);
    out.iterations = alloc.iterations;
    if (alloc.rho.size() == data.comm.n_streams()) {
        out.total_power = alloc.rho.squaredNorm();
        out.sensing_sinr = sensing_sinr(alloc.rho, quad);
        out.sensing_capable = out.sensing_sinr >= targets.gamma_s * (1.0 - 1e-6);
    }
    if (out.feasible() && out.total_power > 0.0) {
        out.ee = energy_efficiency(alloc.rho, urllc);
    }
    return out;
}

GridResult run_grid(const SystemConfig& config, const std::vector<AllocationMode>& modes,
                    const std::vector<SweepPoint>& points, int n_trials, const HarnessOptions& options)
{
    if (n_trials < 1) {
        throw ConfigError("number of trials must be positive");
    }
    if (modes.empty() || points.empty()) {
        throw ConfigError("sweep grid and mode list must be nonempty");
    }
    for (const SweepPoint& p : points) {
        const SystemConfig cfg = config_at(config, p);
        if (p.blocklength <= cfg.pilot_len) {
            throw ConfigError("blocklength " + std::to_string(p.blocklength) + " does not exceed pilot_len");
        }
        if (!(p.gamma_s >= 0.0)) {
            throw ConfigError("sensing threshold must be non-negative");
        }
        for (int i = 0; i < cfg.n_ues; ++i) {
            const double eps = cfg.dep_threshold_of(i);
            if (!(eps > 0.0 && eps < 0.5)) {
                throw ConfigError("DEP thresholds must lie in (0, 0.5)");
            }
        }
        max_blocklength(urllc_targets(cfg));
    }

    const Scenario scenario = build_scenario(config);
    const std::vector<TrialData> trials = prepare_trials(scenario, n_trials, options.exec);

    GridResult grid;
    grid.points = points;
    grid.modes = modes;
    grid.n_trials = n_trials;
    grid.outcomes.resize(points.size() * modes.size() * static_cast<std::size_t>(n_trials));

    const int n_points = static_cast<int>(points.size());
    const int n_modes = static_cast<int>(modes.size());
    auto run_trial = [&](int t) {
        for (int p = 0; p < n_points; ++p) {
            for (int m = 0; m < n_modes; ++m) {
                const std::size_t idx =
                    (static_cast<std::size_t>(p) * modes.size() + static_cast<std::size_t>(m)) *
                        static_cast<std::size_t>(n_trials) +
                    static_cast<std::size_t>(t);
                grid.outcomes[idx] = evaluate(config, trials[static_cast<std::size_t>(t)],
                                              points[static_cast<std::size_t>(p)],
                                              modes[static_cast<std::size_t>(m)], options);
            }
        }
    };

    if (options.exec == Execution::parallel) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
        for (int t = 0; t < n_trials; ++t) {
            try {
                run_trial(t);
            } catch (...) {
#pragma omp critical(isac_harness_failure)
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    } else {
        for (int t = 0; t < n_trials; ++t) {
            run_trial(t);
        }
    }
    return grid;
}

WilsonInterval wilson_interval(int successes, int trials, double z)
{
    if (trials <= 0) {
        return {0.0, 1.0};
    }
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes <= 0) w.low = 0.0;
    if (successes >= trials) w.high = 1.0;
    return w;
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return std::nan("");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PointSummary> summarize(const GridResult& grid)
{
    std::vector<PointSummary> rows;
    for (int p = 0; p < static_cast<int>(grid.points.size()); ++p) {
        for (int m = 0; m < static_cast<int>(grid.modes.size()); ++m) {
            PointSummary s;
            s.point = grid.points[static_cast<std::size_t>(p)];
            s.mode = grid.modes[static_cast<std::size_t>(m)];
            s.trials = grid.n_trials;
            double ee = 0.0;
            double power = 0.0;
            std::vector<double> powers;
            for (int t = 0; t < grid.n_trials; ++t) {
                const TrialOutcome& o = grid.at(p, m, t);
                ++s.failures[static_cast<int>(o.failure)];
                if (o.sensing_capable) {
                    ++s.sensing_capable;
                }
                if (o.feasible()) {
                    ++s.feasible;
                    ee += o.ee;
                    power += o.total_power;
                    powers.push_back(o.total_power);
                }
            }
            s.availability = static_cast<double>(s.feasible) / s.trials;
            s.interval = wilson_interval(s.feasible, s.trials);
            s.mean_ee = s.feasible > 0 ? ee / s.feasible : std::nan("");
            s.mean_power = s.feasible > 0 ? power / s.feasible : std::nan("");
            s.median_power = median(powers);
            rows.push_back(s);
        }
    }
    return rows;
}

std::vector<EeRow> ee_table(const GridResult& grid)
{
    std::vector<EeRow> rows;
    const int n_modes = static_cast<int>(grid.modes.size());
    for (int p = 0; p < static_cast<int>(grid.points.size()); ++p) {
        std::vector<bool> paired(static_cast<std::size_t>(grid.n_trials), true);
        for (int t = 0; t < grid.n_trials; ++t) {
            for (int m = 0; m < n_modes; ++m) {
                if (!grid.at(p, m, t).feasible()) {
                    paired[static_cast<std::size_t>(t)] = false;
                }
            }
        }
        for (int m = 0; m < n_modes; ++m) {
            EeRow r;
            r.point = grid.points[static_cast<std::size_t>(p)];
            r.mode = grid.modes[static_cast<std::size_t>(m)];
            r.trials = grid.n_trials;
            double ee = 0.0;
            double ee_paired = 0.0;
            double power = 0.0;
            std::vector<double> powers;
            for (int t = 0; t < grid.n_trials; ++t) {
                const TrialOutcome& o = grid.at(p, m, t);
                if (!o.feasible()) {
                    continue;
                }
                ++r.feasible;
                ee += o.ee;
                power += o.total_power;
                powers.push_back(o.total_power);
                if (paired[static_cast<std::size_t>(t)]) {
                    ++r.paired_trials;
                    ee_paired += o.ee;
                }
            }
            r.mean_ee = r.feasible > 0 ? ee / r.feasible : std::nan("");
            r.paired_mean_ee = r.paired_trials > 0 ? ee_paired / r.paired_trials : std::nan("");
            r.mean_power = r.feasible > 0 ? power / r.feasible : std::nan("");
            r.median_power = median(powers);
            rows.push_back(r);
        }
    }
    return rows;
}

std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
            throw ConfigError("not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError("empty list");
    }
    return out;
}

SweepSpec parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("sweep must look like var=spec, got '" + text + "'");
    }
    SweepSpec s;
    s.variable = text.substr(0, eq);
    if (s.variable == "gamma_s_db") {
        s.variable = "gamma_s";
    } else if (s.variable == "dep" || s.variable == "epsilon") {
        s.variable = "eps";
    }
    if (s.variable != "L" && s.variable != "gamma_s" && s.variable != "eps") {
        throw ConfigError("unknown sweep variable '" + s.variable + "' (expected L, gamma_s or eps)");
    }
    const std::string spec = text.substr(eq + 1);
    if (spec.find(':') == std::string::npos) {
        s.values = parse_number_list(spec);
        return s;
    }
    std::string parts_text = spec;
    std::replace(parts_text.begin(), parts_text.end(), ':', ',');
    const std::vector<double> parts = parse_number_list(parts_text);
    if (parts.size() == 3) {
        const double lo = parts[0];
        const double step = parts[1];
        const double hi = parts[2];
        if (!(step > 0.0) || hi < lo) {
            throw ConfigError("range needs lo <= hi and a positive step");
        }
        const auto count = static_cast<long>(std::floor((hi - lo) / step * (1.0 + 1e-12))) + 1;
        if (count > 100000) {
            throw ConfigError("range has too many points");
        }
        for (long i = 0; i < count; ++i) {
            s.values.push_back(lo + static_cast<double>(i) * step);
        }
    } else if (parts.size() == 2 && s.variable == "eps") {
        const double lo = parts[0];
        const double hi = parts[1];
        if (!(lo > 0.0) || hi < lo) {
            throw ConfigError("log range needs 0 < lo <= hi");
        }
        const double decades = std::log10(hi / lo);
        const auto count = static_cast<long>(std::floor(decades + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            s.values.push_back(lo * std::pow(10.0, static_cast<double>(i)));
        }
    } else {
        throw ConfigError("range must be lo:step:hi (or lo:hi for eps)");
    }
    return s;
}

std::vector<SweepPoint> make_points(const SystemConfig& config, const SweepSpec& sweep,
                                    const std::vector<int>& blocklengths, const std::vector<double>& gamma_s_db)
{
    std::vector<double> ls;
    if (sweep.variable == "L") {
        ls = sweep.values;
    } else if (!blocklengths.empty()) {
        ls.assign(blocklengths.begin(), blocklengths.end());
    } else {
        ls = {static_cast<double>(config.blocklength)};
    }
    std::vector<double> gammas;
    if (sweep.variable == "gamma_s") {
        for (double db : sweep.values) {
            gammas.push_back(db_to_linear(db));
        }
    } else if (!gamma_s_db.empty()) {
        for (double db : gamma_s_db) {
            gammas.push_back(db_to_linear(db));
        }
    } else {
        gammas = {config.sensing_sinr_threshold};
    }
    std::vector<double> deps = sweep.variable == "eps" ? sweep.values : std::vector<double>{0.0};

    std::vector<SweepPoint> points;
    for (double l : ls) {
        if (l != std::floor(l) || l < 1.0 || l > 1e7) {
            throw ConfigError("blocklength must be a positive integer");
        }
        for (double g : gammas) {
            for (double e : deps) {
                points.push_back({static_cast<int>(l), g, e});
            }
        }
    }
    return points;
}

void write_availability_csv(std::ostream& out, const std::string& variable, const std::vector<PointSummary>& rows)
{
    CsvWriter w(out);
    w.header({"sweep", "value", "L", "gamma_s_db", "dep_threshold", "mode", "trials", "feasible", "availability",
              "ci_low", "ci_high", "mean_ee_bit_per_j", "mean_power_w", "median_power_w", "sensing_capable",
              "fail_delay", "fail_comm", "fail_sensing", "fail_power", "fail_solver", "fail_error"});
    for (const PointSummary& r : rows) {
        const double gamma_db = linear_to_db(r.point.gamma_s);
        double value = r.point.blocklength;
        if (variable == "gamma_s") {
            value = gamma_db;
        } else if (variable == "eps") {
            value = r.point.dep_threshold;
        }
        w.field(variable).field(value).field(r.point.blocklength).field(gamma_db);
        if (r.point.dep_threshold > 0.0) {
            w.field(r.point.dep_threshold);
        } else {
            w.field("config");
        }
        w.field(to_string(r.mode)).field(r.trials).field(r.feasible).field(r.availability);
        w.field(r.interval.low).field(r.interval.high).field(r.mean_ee).field(r.mean_power).field(r.median_power);
        w.field(r.sensing_capable);
        for (FailureClass f : {FailureClass::delay, FailureClass::comm, FailureClass::sensing, FailureClass::power,
                               FailureClass::solver, FailureClass::error}) {
            w.field(r.failures_of(f));
        }
        w.end_row();
    }
}

void write_ee_csv(std::ostream& out, const std::vector<EeRow>& rows)
{
    CsvWriter w(out);
    w.header({"L", "gamma_s_db", "mode", "trials", "feasible", "mean_ee_bit_per_j", "paired_trials",
              "paired_mean_ee_bit_per_j", "mean_power_w", "median_power_w"});
    for (const EeRow& r : rows) {
        w.field(r.point.blocklength).field(linear_to_db(r.point.gamma_s)).field(to_string(r.mode));
        w.field(r.trials).field(r.feasible).field(r.mean_ee).field(r.paired_trials).field(r.paired_mean_ee);
        w.field(r.mean_power).field(r.median_power);
        w.end_row();
    }
}

void write_link_stats_csv(std::ostream& out, const Scenario& scenario, std::uint64_t trial)
{
    const Geometry g = drop_ues(scenario, trial);
    const NetworkStats net = build_network_stats(scenario, g, trial);
    CsvWriter w(out);
    w.header({"trial", "ue", "ap", "distance_3d_m", "los", "beta", "beta_db", "rician_k"});
    for (int i = 0; i < net.n_ues; ++i) {
        for (int k = 0; k < net.n_tx; ++k) {
            const LinkStats& l = net.link(i, k);
            const double d = distance_3d(g.tx_aps[static_cast<std::size_t>(k)], g.ap_height,
                                         g.ues[static_cast<std::size_t>(i)], g.ue_height);
            w.field(static_cast<unsigned long long>(trial)).field(i).field(k).field(d).field(l.is_los ? 1 : 0);
            w.field(l.beta).field(linear_to_db(l.beta)).field(l.rician_k);
            w.end_row();
        }
    }
}

}  // namespace isac
