// SPDX-License-Identifier: Apache-2.0
#include "isac/urllc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isac/errors.hpp"
#include "isac/scenario.hpp"

namespace isac {

double UrllcTargets::max_dep_threshold() const
{
    return dep_threshold.empty() ? 0.0 : *std::max_element(dep_threshold.begin(), dep_threshold.end());
}

double UrllcTargets::total_packet_bits() const
{
    double total = 0.0;
    for (double b : packet_bits) total += b;
    return total;
}

UrllcTargets urllc_targets(const SystemConfig& config)
{
    UrllcTargets t;
    for (int i = 0; i < config.n_ues; ++i) {
        t.packet_bits.push_back(config.packet_bits_of(i));
        t.dep_threshold.push_back(config.dep_threshold_of(i));
        t.delay_threshold.push_back(config.delay_threshold_of(i));
    }
    t.blocklength = config.blocklength;
    t.pilot_len = config.pilot_len;
    t.bandwidth = config.bandwidth;
    return t;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation of the standard normal quantile; relative
// error about 1e-9, polished by Halley steps below.
double normal_quantile_seed(double p)
{
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double q_inverse(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("q_inverse: probability must lie in (0, 1)");
    }
    // Q(x) = p  <=>  Phi(-x) = p
    double x = -normal_quantile_seed(p);
    for (int iter = 0; iter < 3; ++iter) {
        const double err = q_function(x) - p;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        if (pdf == 0.0) break;
        // Halley step for f(x) = Q(x) - p, f' = -pdf, f'' = x * pdf
        const double u = -err / pdf;
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double dep_upper_bound(double sinr, int blocklength, int pilot_len, double bits)
{
    const double data = static_cast<double>(blocklength - pilot_len);
    const double arg = std::sqrt(data) * (std::log1p(sinr) - bits * std::numbers::ln2 / data);
    return q_function(arg);
}

double sinr_threshold(double dep_threshold, int blocklength, int pilot_len, double bits)
{
    const double data = static_cast<double>(blocklength - pilot_len);
    return std::expm1(q_inverse(dep_threshold) / std::sqrt(data) + bits * std::numbers::ln2 / data);
}

double delay_upper_bound(int blocklength, double bandwidth, double dep_threshold)
{
    if (dep_threshold >= 1.0) {
        throw std::domain_error("delay_upper_bound: DEP threshold must be below 1");
    }
    return static_cast<double>(blocklength) / (bandwidth * (1.0 - dep_threshold));
}

int max_blocklength(const UrllcTargets& targets)
{
    double limit = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < targets.delay_threshold.size(); ++i) {
        limit = std::min(limit,
                         targets.delay_threshold[i] * targets.bandwidth * (1.0 - targets.dep_threshold[i]));
    }
    const int l_max = static_cast<int>(std::floor(limit));
    if (l_max <= targets.pilot_len) {
        throw ConfigError("delay budget leaves no room for data symbols (L_max <= L_p)");
    }
    return l_max;
}

double energy_efficiency(const Eigen::VectorXd& rho, const UrllcTargets& targets)
{
    const double power = rho.squaredNorm();
    if (!(power > 0.0)) {
        throw std::invalid_argument("energy_efficiency: total power must be positive");
    }
    return targets.bandwidth * targets.total_packet_bits() * (1.0 - targets.max_dep_threshold()) /
           (static_cast<double>(targets.data_len()) * power);
}

}  // namespace isac
