#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "error.hpp"
#include "time_series.hpp"

namespace tprune {

struct GmmOptions {
    double variance_floor = 0.25;
    std::size_t max_iterations = 200;
    /// Stop once |L_t - L_{t-1}| < tolerance * |L_{t-1}|.
    double tolerance = 1e-6;
    /// Independent seedings per fit; the highest likelihood wins.
    std::size_t restarts = 3;
};

/// One-dimensional Gaussian mixture fitted by EM.
struct GmmFit {
    std::size_t K = 0;
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;
    double log_likelihood = 0.0;
    double bic = 0.0;
    /// Log-likelihood before the first M-step and after every iteration.
    std::vector<double> trace;
    bool converged = false;
};

/// Free parameters of a K-component 1-D mixture: K means, K variances and
/// K-1 mixing weights.
inline double gmm_parameter_count(std::size_t K)
{
    return 3.0 * static_cast<double>(K) - 1.0;
}

inline double bic_score(double log_likelihood, std::size_t K, double n)
{
    return -2.0 * log_likelihood + gmm_parameter_count(K) * std::log(n);
}

namespace detail {

inline double log_normal(double x, double mean, double var)
{
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

class WeightedEm {
public:
    WeightedEm(std::span<const double> x, std::span<const double> w, std::size_t K, const GmmOptions& opt)
        : m_x(x), m_w(w), m_K(K), m_opt(opt), m_resp(x.size() * K)
    {
        for (auto wi : w) {
            m_n += wi;
        }
    }

    GmmFit run(std::mt19937_64& rng)
    {
        GmmFit fit;
        fit.K = m_K;
        initialise(rng, fit);
        double prev = e_step(fit);
        fit.trace.push_back(prev);
        for (std::size_t it = 0; it < m_opt.max_iterations; ++it) {
            m_step(fit);
            double cur = e_step(fit);
            fit.trace.push_back(cur);
            if (std::abs(cur - prev) < m_opt.tolerance * std::abs(prev)) {
                fit.converged = true;
                break;
            }
            prev = cur;
        }
        fit.log_likelihood = fit.trace.back();
        fit.bic = bic_score(fit.log_likelihood, m_K, m_n);
        return fit;
    }

private:
    // k-means++ seeding followed by a few weighted Lloyd rounds; the final
    // hard assignment provides the starting parameters.
    void initialise(std::mt19937_64& rng, GmmFit& fit)
    {
        const auto n = m_x.size();
        std::vector<double> centers;
        std::vector<double> d2(n, std::numeric_limits<double>::infinity());
        std::vector<double> pick(n);
        for (std::size_t k = 0; k < m_K; ++k) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                pick[i] = k == 0 ? m_w[i] : m_w[i] * d2[i];
                total += pick[i];
            }
            if (total <= 0.0) {
                std::copy(m_w.begin(), m_w.end(), pick.begin());
            }
            std::discrete_distribution<std::size_t> choose(pick.begin(), pick.end());
            double c = m_x[choose(rng)];
            centers.push_back(c);
            for (std::size_t i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], (m_x[i] - c) * (m_x[i] - c));
            }
        }
        std::vector<std::size_t> assign(n);
        for (int round = 0; round < 10; ++round) {
            std::vector<double> sum(m_K, 0.0);
            std::vector<double> mass(m_K, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t best = 0;
                for (std::size_t k = 1; k < m_K; ++k) {
                    if (std::abs(m_x[i] - centers[k]) < std::abs(m_x[i] - centers[best])) {
                        best = k;
                    }
                }
                assign[i] = best;
                sum[best] += m_w[i] * m_x[i];
                mass[best] += m_w[i];
            }
            for (std::size_t k = 0; k < m_K; ++k) {
                if (mass[k] > 0.0) {
                    centers[k] = sum[k] / mass[k];
                }
            }
        }
        double global_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            global_mean += m_w[i] * m_x[i];
        }
        global_mean /= m_n;
        double global_var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            global_var += m_w[i] * (m_x[i] - global_mean) * (m_x[i] - global_mean);
        }
        global_var = std::max(m_opt.variance_floor, global_var / m_n);

        fit.weights.assign(m_K, 0.0);
        fit.means = centers;
        fit.variances.assign(m_K, 0.0);
        std::vector<double> mass(m_K, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            mass[assign[i]] += m_w[i];
            fit.variances[assign[i]] += m_w[i] * (m_x[i] - centers[assign[i]]) * (m_x[i] - centers[assign[i]]);
        }
        double wsum = 0.0;
        for (std::size_t k = 0; k < m_K; ++k) {
            if (mass[k] > 0.0) {
                fit.weights[k] = mass[k] / m_n;
                fit.variances[k] = std::max(m_opt.variance_floor, fit.variances[k] / mass[k]);
            } else {
                fit.weights[k] = 1.0 / static_cast<double>(m_K);
                fit.variances[k] = global_var;
            }
            wsum += fit.weights[k];
        }
        for (auto& pi : fit.weights) {
            pi /= wsum;
        }
    }

    // Fills responsibilities and returns the log-likelihood of the current parameters.
    double e_step(const GmmFit& fit)
    {
        double ll = 0.0;
        std::vector<double> lp(m_K);
        for (std::size_t i = 0; i < m_x.size(); ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < m_K; ++k) {
                lp[k] = fit.weights[k] > 0.0
                            ? std::log(fit.weights[k]) + log_normal(m_x[i], fit.means[k], fit.variances[k])
                            : -std::numeric_limits<double>::infinity();
                mx = std::max(mx, lp[k]);
            }
            double s = 0.0;
            for (std::size_t k = 0; k < m_K; ++k) {
                s += std::exp(lp[k] - mx);
            }
            const double log_px = mx + std::log(s);
            for (std::size_t k = 0; k < m_K; ++k) {
                m_resp[i * m_K + k] = std::exp(lp[k] - log_px);
            }
            ll += m_w[i] * log_px;
        }
        return ll;
    }

    void m_step(GmmFit& fit)
    {
        for (std::size_t k = 0; k < m_K; ++k) {
            double nk = 0.0;
            double sx = 0.0;
            for (std::size_t i = 0; i < m_x.size(); ++i) {
                const double r = m_w[i] * m_resp[i * m_K + k];
                nk += r;
                sx += r * m_x[i];
            }
            if (nk <= 0.0) {
                // Dead component: contributes nothing to the likelihood.
                fit.weights[k] = 0.0;
                continue;
            }
            const double mu = sx / nk;
            double sv = 0.0;
            for (std::size_t i = 0; i < m_x.size(); ++i) {
                sv += m_w[i] * m_resp[i * m_K + k] * (m_x[i] - mu) * (m_x[i] - mu);
            }
            fit.weights[k] = nk / m_n;
            fit.means[k] = mu;
            fit.variances[k] = std::max(m_opt.variance_floor, sv / nk);
        }
        double wsum = 0.0;
        for (auto pi : fit.weights) {
            wsum += pi;
        }
        for (auto& pi : fit.weights) {
            pi /= wsum;
        }
    }

    std::span<const double> m_x;
    std::span<const double> m_w;
    std::size_t m_K;
    GmmOptions m_opt;
    double m_n = 0.0;
    std::vector<double> m_resp;
};

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a),
                      static_cast<std::uint32_t>(b)};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// EM for a weighted 1-D sample (`x[i]` observed `w[i]` times).
inline GmmFit fit_gmm(std::span<const double> x,
                      std::span<const double> w,
                      std::size_t K,
                      std::uint64_t seed,
                      const GmmOptions& opt = {})
{
    double n = 0.0;
    for (auto wi : w) {
        n += wi;
    }
    if (K == 0) {
        throw invalid_argument_error("mixture needs at least one component");
    }
    if (x.size() != w.size() || x.empty()) {
        throw invalid_argument_error("mixture data must be non-empty with one weight per point");
    }
    if (static_cast<double>(K) > n) {
        throw invalid_argument_error("more mixture components than observations");
    }
    detail::WeightedEm em(x, w, K, opt);
    GmmFit best;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, opt.restarts); ++r) {
        auto rng = detail::seeded_rng(seed, K, r);
        auto fit = em.run(rng);
        if (r == 0 || fit.log_likelihood > best.log_likelihood) {
            best = std::move(fit);
        }
    }
    return best;
}

namespace detail {

struct SeriesSample {
    std::vector<double> x;
    std::vector<double> w;
};

inline SeriesSample sample_of(const TermTimeSeries& s)
{
    SeriesSample out;
    for (const auto& [day, c] : s.counts) {
        out.x.push_back(day);
        out.w.push_back(static_cast<double>(c));
    }
    return out;
}

}  // namespace detail

inline GmmFit fit_gmm(const TermTimeSeries& s, std::size_t K, std::uint64_t seed, const GmmOptions& opt = {})
{
    if (s.n_points < K || K == 0) {
        throw invalid_argument_error("term '" + s.term + "' has fewer observations than components");
    }
    auto sample = detail::sample_of(s);
    return fit_gmm(sample.x, sample.w, K, seed, opt);
}

/// Fits K = 1..min(K_max, distinct values) and keeps the smallest BIC
/// (the smaller K on ties).
inline GmmFit select_k_bic(std::span<const double> x,
                           std::span<const double> w,
                           std::size_t K_max,
                           std::uint64_t seed,
                           const GmmOptions& opt = {})
{
    if (K_max == 0) {
        throw invalid_argument_error("K_max must be at least 1");
    }
    std::vector<double> distinct(x.begin(), x.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto upper = std::min(K_max, distinct.size());
    GmmFit best;
    for (std::size_t K = 1; K <= upper; ++K) {
        auto fit = fit_gmm(x, w, K, seed, opt);
        if (K == 1 || fit.bic < best.bic) {
            best = std::move(fit);
        }
    }
    return best;
}

inline GmmFit select_k_bic(const TermTimeSeries& s, std::size_t K_max, std::uint64_t seed, const GmmOptions& opt = {})
{
    if (s.empty()) {
        throw invalid_argument_error("term '" + s.term + "' has an empty time series");
    }
    auto sample = detail::sample_of(s);
    return select_k_bic(sample.x, sample.w, K_max, seed, opt);
}

}  // namespace tprune
