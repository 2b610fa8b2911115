#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fdilag/error.hpp"
#include "fdilag/lagcorr.hpp"

namespace fdilag {

struct RankedEntry {
    std::size_t rank;  // 1-based
    std::string country_id;
    double value;

    bool operator==(const RankedEntry&) const = default;
};

/// Cross-country coefficients for one lag, largest first.
struct RankedCoefficients {
    std::size_t lag = 0;
    std::vector<RankedEntry> entries;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(entries.size());
        for (const auto& e : entries) v.push_back(e.value);
        return v;
    }
};

/// Sorts the lag-k coefficients in descending order; equal values are ranked
/// by ascending country_id.
[[nodiscard]] inline RankedCoefficients rank_coefficients(std::span<const LagCorrelationRow> rows, std::size_t lag) {
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no coefficients to rank");
    RankedCoefficients out{lag, {}};
    out.entries.reserve(rows.size());
    for (const auto& row : rows) out.entries.push_back({0, row.country_id, row.at(lag).rho});
    std::sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.country_id < b.country_id;
    });
    for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].rank = i + 1;
    return out;
}

/// Extended rank-size law parameters: amplitude m1, low-rank exponent m2,
/// high-rank exponent m3.
struct RankSizeParams {
    double m1 = 1.0;
    double m2 = 0.1;
    double m3 = 0.2;

    [[nodiscard]] std::array<double, 3> as_array() const noexcept { return {m1, m2, m3}; }
    static RankSizeParams from_array(const std::array<double, 3>& a) noexcept { return {a[0], a[1], a[2]}; }
    bool operator==(const RankSizeParams&) const = default;
};

/// y(r) = -1 + m1 * N^-m2 * r^-m2 * (N + 1 - r)^m3, defined for 1 <= r <= N.
[[nodiscard]] inline double eval_model(double r, std::size_t n_ranks, const RankSizeParams& p) {
    const double n = static_cast<double>(n_ranks);
    if (!(r >= 1.0 && r <= n))
        throw Error(ErrorCode::DomainError, "rank " + std::to_string(r) + " outside 1.." + std::to_string(n_ranks));
    return -1.0 + p.m1 * std::pow(n * r, -p.m2) * std::pow(n + 1.0 - r, p.m3);
}

/// Partial derivatives of eval_model with respect to (m1, m2, m3).
[[nodiscard]] inline std::array<double, 3> model_gradient(double r, std::size_t n_ranks, const RankSizeParams& p) {
    const double n = static_cast<double>(n_ranks);
    if (!(r >= 1.0 && r <= n))
        throw Error(ErrorCode::DomainError, "rank " + std::to_string(r) + " outside 1.." + std::to_string(n_ranks));
    const double shape = std::pow(n * r, -p.m2) * std::pow(n + 1.0 - r, p.m3);
    const double g = p.m1 * shape;
    return {shape, -g * std::log(n * r), g * std::log(n + 1.0 - r)};
}

struct FitConfig {
    RankSizeParams initial{1.0, 0.1, 0.2};
    double sse_tolerance = 1e-12;   // relative SSE improvement
    double step_tolerance = 1e-10;  // relative parameter step
    std::size_t max_iterations = 1000;
    double initial_damping = 1e-3;
    double damping_factor = 10.0;
};

struct RankSizeFit {
    RankSizeParams params;
    std::array<double, 3> std_errors{};
    double r_squared = 0.0;
    double sse = 0.0;
    std::size_t n = 0;
    std::size_t iterations = 0;
    bool converged = false;
    /// False when any fitted parameter is <= 0; parameters are never clamped.
    bool all_positive = true;
};

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Cholesky solve of a symmetric positive definite 3x3 system.
inline bool solve_spd(const Mat3& a, const Vec3& b, Vec3& x) {
    Mat3 l{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Vec3 y{};
    for (int i = 0; i < 3; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    for (int i = 2; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < 3; ++k) s -= l[k][i] * x[k];
        x[i] = s / l[i][i];
    }
    return true;
}

inline bool invert_spd(const Mat3& a, Mat3& inv) {
    for (int c = 0; c < 3; ++c) {
        Vec3 e{}, col{};
        e[c] = 1.0;
        if (!solve_spd(a, e, col)) return false;
        for (int r = 0; r < 3; ++r) inv[r][c] = col[r];
    }
    return true;
}

struct Normal {
    Mat3 jtj{};
    Vec3 jtr{};  // J^T (y - f)
    double sse = 0.0;
};

inline double sse_at(std::span<const double> y, const RankSizeParams& p) {
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double res = y[i] - eval_model(static_cast<double>(i + 1), y.size(), p);
        sse += res * res;
    }
    return sse;
}

inline Normal normal_equations(std::span<const double> y, const RankSizeParams& p) {
    Normal ne;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = static_cast<double>(i + 1);
        const double res = y[i] - eval_model(r, y.size(), p);
        const auto g = model_gradient(r, y.size(), p);
        ne.sse += res * res;
        for (int a = 0; a < 3; ++a) {
            ne.jtr[a] += g[a] * res;
            for (int b = 0; b < 3; ++b) ne.jtj[a][b] += g[a] * g[b];
        }
    }
    return ne;
}

}  // namespace detail

/// Least-squares fit of the extended rank-size law to values ordered by rank
/// (values[0] is rank 1) using Levenberg-Marquardt with the analytic Jacobian
/// and Marquardt diagonal scaling.
[[nodiscard]] inline RankSizeFit fit_ranksize(std::span<const double> values, const FitConfig& config = {}) {
    using namespace detail;
    const std::size_t n = values.size();
    if (n < 5) throw Error(ErrorCode::EmptyInput, "rank-size fit needs N >= 5, got " + std::to_string(n));
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
        throw Error(ErrorCode::DegenerateData, "all ranked values are equal");

    RankSizeParams p = config.initial;
    double lambda = config.initial_damping;
    Normal ne = normal_equations(values, p);
    if (!std::isfinite(ne.sse)) throw Error(ErrorCode::DomainError, "model is not finite at the initial guess");

    RankSizeFit fit;
    fit.n = n;
    std::size_t it = 0;
    bool converged = false;
    while (it < config.max_iterations && !converged) {
        ++it;
        Mat3 damped = ne.jtj;
        for (int a = 0; a < 3; ++a) damped[a][a] += lambda * ne.jtj[a][a];
        Vec3 step{};
        if (!solve_spd(damped, ne.jtr, step))
            throw Error(ErrorCode::SingularJacobian, "normal matrix is singular at iteration " + std::to_string(it));

        const auto cur = p.as_array();
        std::array<double, 3> trial_arr{};
        double step_norm = 0.0, param_norm = 0.0;
        for (int a = 0; a < 3; ++a) {
            trial_arr[a] = cur[a] + step[a];
            step_norm += step[a] * step[a];
            param_norm += cur[a] * cur[a];
        }
        const bool tiny_step =
            std::sqrt(step_norm) < config.step_tolerance * (std::sqrt(param_norm) + config.step_tolerance);

        const auto trial = RankSizeParams::from_array(trial_arr);
        const double trial_sse = sse_at(values, trial);
        const double rel_change = ne.sse > 0.0 ? (ne.sse - trial_sse) / ne.sse : 0.0;

        if (std::isfinite(trial_sse) && trial_sse <= ne.sse) {
            p = trial;
            ne = normal_equations(values, p);
            lambda = std::max(lambda / config.damping_factor, 1e-300);
            converged = rel_change < config.sse_tolerance || tiny_step;
        } else {
            // A rejected step that changes SSE only at rounding level means
            // we are already sitting on the minimum.
            converged = (std::isfinite(trial_sse) && std::fabs(rel_change) < config.sse_tolerance) || tiny_step;
            lambda *= config.damping_factor;
            if (!std::isfinite(lambda)) break;
        }
    }
    if (!converged)
        throw Error(ErrorCode::NoConvergence, "no convergence after " + std::to_string(it) + " iterations");

    // The SSE test can fire while the parameters are still ~1e-9 off (SSE is
    // quadratic in the error). Undamped Gauss-Newton steps close that gap so a
    // refit from the result lands on the same point.
    for (int polish = 0; polish < 3; ++polish) {
        Vec3 step{};
        if (!solve_spd(ne.jtj, ne.jtr, step)) break;
        const auto cur = p.as_array();
        std::array<double, 3> next{};
        double step_norm = 0.0, param_norm = 0.0;
        for (int a = 0; a < 3; ++a) {
            next[a] = cur[a] + step[a];
            step_norm += step[a] * step[a];
            param_norm += cur[a] * cur[a];
        }
        if (std::sqrt(step_norm) < config.step_tolerance * (std::sqrt(param_norm) + config.step_tolerance)) break;
        const auto trial = RankSizeParams::from_array(next);
        const double trial_sse = sse_at(values, trial);
        // near the minimum SSE differences are rounding noise; the step itself
        // comes from the gradient, which is still accurate there
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * ne.sse;
        if (!std::isfinite(trial_sse) || trial_sse > ne.sse + slack) break;
        p = trial;
        ne = normal_equations(values, p);
        ++it;
    }

    fit.params = p;
    fit.sse = ne.sse;
    fit.iterations = it;
    fit.converged = true;
    fit.all_positive = p.m1 > 0.0 && p.m2 > 0.0 && p.m3 > 0.0;

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double sst = 0.0;
    for (double v : values) sst += (v - mean) * (v - mean);
    fit.r_squared = 1.0 - fit.sse / sst;

    Mat3 cov{};
    if (!invert_spd(ne.jtj, cov)) throw Error(ErrorCode::SingularJacobian, "J^T J is singular at the optimum");
    const double sigma2 = n > 3 ? fit.sse / static_cast<double>(n - 3) : std::numeric_limits<double>::quiet_NaN();
    for (int a = 0; a < 3; ++a) fit.std_errors[a] = std::sqrt(sigma2 * cov[a][a]);
    return fit;
}

[[nodiscard]] inline RankSizeFit fit_ranksize(const RankedCoefficients& ranked, const FitConfig& config = {}) {
    const auto v = ranked.values();
    return fit_ranksize(std::span<const double>(v), config);
}

/// Observed and fitted value per rank, for plotting.
struct RankSizePoint {
    std::size_t rank;
    std::string country_id;
    double observed;
    double fitted;
};

[[nodiscard]] inline std::vector<RankSizePoint> fitted_curve(const RankedCoefficients& ranked, const RankSizeFit& fit) {
    std::vector<RankSizePoint> out;
    out.reserve(ranked.size());
    for (const auto& e : ranked.entries)
        out.push_back({e.rank, e.country_id, e.value, eval_model(static_cast<double>(e.rank), ranked.size(), fit.params)});
    return out;
}

}  // namespace fdilag
