// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/allocator.hpp"
#include "isac/scenario.hpp"
#include "isac/stats.hpp"

namespace isac {

/// Statistics of one drop that do not depend on L, the DEP target or the
/// sensing threshold.
struct TrialData {
    std::uint64_t trial = 0;
    bool ok = false;
    std::string error;
    CommStatistics comm;
    SensingCovariances sensing;
    int antennas = 0;
    int n_rx = 0;
};

TrialData prepare_trial(const Scenario& scenario, std::uint64_t trial, Execution exec = Execution::serial);

/// Runs prepare_trial for trials 0..n-1, in parallel across trials when
/// exec is parallel.
std::vector<TrialData> prepare_trials(const Scenario& scenario, int n_trials, Execution exec);

struct SweepPoint {
    int blocklength = 0;
    double gamma_s = 0.0;        // linear
    double dep_threshold = 0.0;  // applied to every UE; <= 0 keeps the configured list
};

enum class FailureClass { none, delay, comm, sensing, power, solver, error };

const char* to_string(FailureClass f);

struct TrialOutcome {
    AllocationStatus status = AllocationStatus::max_iter;
    FailureClass failure = FailureClass::error;
    double total_power = 0.0;
    double ee = 0.0;
    double sensing_sinr = 0.0;
    bool sensing_capable = false;  // sensing SINR meets gamma_s at the returned powers
    int iterations = 0;

    bool feasible() const { return status == AllocationStatus::feasible; }
};

struct GridResult {
    std::vector<SweepPoint> points;
    std::vector<AllocationMode> modes;
    int n_trials = 0;
    std::vector<TrialOutcome> outcomes;  // [point][mode][trial]

    const TrialOutcome& at(int point, int mode, int trial) const
    {
        return outcomes[(static_cast<std::size_t>(point) * modes.size() + static_cast<std::size_t>(mode)) *
                            static_cast<std::size_t>(n_trials) +
                        static_cast<std::size_t>(trial)];
    }
};

struct HarnessOptions {
    Execution exec = Execution::parallel;
    SymbolMode symbols = SymbolMode::expected;
    AllocatorOptions allocator{};
};

/// Evaluates one trial at one sweep point for one mode.
TrialOutcome evaluate(const SystemConfig& config, const TrialData& data, const SweepPoint& point,
                      AllocationMode mode, const HarnessOptions& options = {});

GridResult run_grid(const SystemConfig& config, const std::vector<AllocationMode>& modes,
                    const std::vector<SweepPoint>& points, int n_trials, const HarnessOptions& options = {});

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

WilsonInterval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct PointSummary {
    SweepPoint point;
    AllocationMode mode = AllocationMode::seurllc_plus;
    int trials = 0;
    int feasible = 0;
    double availability = 0.0;
    WilsonInterval interval;
    double mean_ee = 0.0;        // over feasible trials
    double mean_power = 0.0;     // over feasible trials
    double median_power = 0.0;   // over feasible trials
    int sensing_capable = 0;
    int failures[7] = {};        // indexed by FailureClass

    int failures_of(FailureClass f) const { return failures[static_cast<int>(f)]; }
};

std::vector<PointSummary> summarize(const GridResult& grid);

struct EeRow {
    SweepPoint point;
    AllocationMode mode = AllocationMode::seurllc_plus;
    int trials = 0;
    int feasible = 0;
    double mean_ee = 0.0;
    int paired_trials = 0;       // trials feasible under every mode at this point
    double paired_mean_ee = 0.0;
    double mean_power = 0.0;
    double median_power = 0.0;
};

std::vector<EeRow> ee_table(const GridResult& grid);

double median(std::vector<double> values);

/// `var=spec` where spec is a comma list, `lo:step:hi`, or (eps only)
/// `lo:hi` expanded to one point per decade.
struct SweepSpec {
    std::string variable;  // "L", "gamma_s" (dB values) or "eps"
    std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& text);

std::vector<double> parse_number_list(const std::string& text);

/// Cartesian grid over the sweep variable and the fixed lists.
std::vector<SweepPoint> make_points(const SystemConfig& config, const SweepSpec& sweep,
                                    const std::vector<int>& blocklengths, const std::vector<double>& gamma_s_db);

void write_availability_csv(std::ostream& out, const std::string& variable, const std::vector<PointSummary>& rows);
void write_ee_csv(std::ostream& out, const std::vector<EeRow>& rows);

/// Per-link large-scale parameters of one drop.
void write_link_stats_csv(std::ostream& out, const Scenario& scenario, std::uint64_t trial);

}  // namespace isac
