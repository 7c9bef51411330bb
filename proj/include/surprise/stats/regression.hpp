#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "surprise/error.hpp"
#include "surprise/stats/descriptive.hpp"
#include "surprise/stats/hypothesis.hpp"
#include "surprise/stats/special.hpp"

namespace surprise::stats {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RegressionFit {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    /// t statistics for OLS, Wald z for the GLMs.
    std::vector<double> statistics;
    std::vector<double> p_values;
    std::vector<Interval> ci_95;
    /// exp(coefficient): odds ratios (logistic) or incidence rate ratios (NB).
    std::optional<std::vector<double>> exponentiated;
    /// R^2 for OLS, McFadden pseudo-R^2 for the GLMs.
    double fit_stat = 0.0;
    std::size_t n = 0;
    double df_residual = 0.0;
    bool converged = true;
    int iterations = 0;
    /// NB2 dispersion alpha (variance mu + alpha mu^2).
    std::optional<double> dispersion;
    double log_likelihood = std::numeric_limits<double>::quiet_NaN();

    std::size_t index(const std::string& name) const {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw InvalidInput("no coefficient named " + name);
        return static_cast<std::size_t>(it - names.begin());
    }
};

/// Column-stacks an intercept and the given regressors.
inline Matrix with_intercept(const std::vector<std::vector<double>>& columns) {
    const std::size_t n = columns.empty() ? 0 : columns[0].size();
    Matrix x(n, columns.size() + 1);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        require(columns[j].size() == n, "design columns differ in length");
        for (std::size_t i = 0; i < n; ++i) x(i, j + 1) = columns[j][i];
    }
    return x;
}

namespace detail {

inline std::vector<std::string> default_names(const Matrix& x, std::vector<std::string> names) {
    if (names.empty()) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j));
    }
    require(names.size() == static_cast<std::size_t>(x.cols()), "one name per design column required");
    return names;
}

/// Throws Degenerate listing each column that lies in the span of the columns before it.
inline void check_full_rank(const Matrix& x, const std::vector<std::string>& names) {
    std::vector<Eigen::Index> kept;
    std::string dependent;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Matrix candidate(x.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
        for (std::size_t k = 0; k < kept.size(); ++k) {
            const double norm = x.col(kept[k]).norm();
            candidate.col(static_cast<Eigen::Index>(k)) = x.col(kept[k]) / norm;
        }
        const double norm = x.col(j).norm();
        bool independent = norm > 0.0;
        if (independent) {
            candidate.col(candidate.cols() - 1) = x.col(j) / norm;
            Eigen::ColPivHouseholderQR<Matrix> qr(candidate);
            qr.setThreshold(1e-10);
            independent = qr.rank() == candidate.cols();
        }
        if (independent) {
            kept.push_back(j);
        } else {
            if (!dependent.empty()) dependent += ", ";
            dependent += names[static_cast<std::size_t>(j)];
        }
    }
    if (!dependent.empty()) throw Degenerate("rank-deficient design; dependent columns: " + dependent);
}

inline bool has_constant_column(const Matrix& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x.col(j).maxCoeff() == x.col(j).minCoeff() && x(0, j) != 0.0) return true;
    }
    return false;
}

/// (X'WX)^{-1} from the R factor of sqrt(W) X.
inline Matrix inverse_gram(const Matrix& weighted_x) {
    Eigen::HouseholderQR<Matrix> qr(weighted_x);
    const Eigen::Index p = weighted_x.cols();
    const Matrix r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
    return r_inv * r_inv.transpose();
}

inline Vector weighted_solve(const Matrix& x, const Vector& w, const Vector& z) {
    const Vector sw = w.array().sqrt();
    const Matrix wx = sw.asDiagonal() * x;
    const Vector wz = sw.cwiseProduct(z);
    return wx.householderQr().solve(wz);
}

inline void fill_wald(RegressionFit& fit, const Matrix& cov, bool exponentiate) {
    const auto p = fit.coefficients.size();
    fit.standard_errors.resize(p);
    fit.statistics.resize(p);
    fit.p_values.resize(p);
    fit.ci_95.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double se = std::sqrt(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
        const double b = fit.coefficients[j];
        fit.standard_errors[j] = se;
        fit.statistics[j] = b / se;
        fit.p_values[j] = std::clamp(normal_two_sided(b / se), 0.0, 1.0);
        fit.ci_95[j] = Interval{b - z_975 * se, b + z_975 * se};
    }
    if (exponentiate) {
        std::vector<double> e(p);
        for (std::size_t j = 0; j < p; ++j) e[j] = std::exp(fit.coefficients[j]);
        fit.exponentiated = e;
    }
}

inline Vector to_vector(std::span<const double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

} // namespace detail

/// Ordinary least squares with classical standard errors and t-based 95% CIs.
/// R^2 is centred when the design holds a constant column; a response with no
/// variation reports R^2 = 0.
inline RegressionFit fit_linear(std::span<const double> y, const Matrix& x, std::vector<std::string> names = {}) {
    const auto n = static_cast<Eigen::Index>(y.size());
    require(x.rows() == n, "response and design differ in length");
    require(n > x.cols(), "fit_linear needs more observations than columns");
    names = detail::default_names(x, std::move(names));
    detail::check_full_rank(x, names);

    const Vector yv = detail::to_vector(y);
    Eigen::HouseholderQR<Matrix> qr(x);
    const Vector beta = qr.solve(yv);
    const Vector resid = yv - x * beta;
    const double rss = resid.squaredNorm();
    const double df = static_cast<double>(n - x.cols());
    const double sigma2 = rss / df;

    RegressionFit fit;
    fit.names = std::move(names);
    fit.n = static_cast<std::size_t>(n);
    fit.df_residual = df;
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    const Matrix cov = sigma2 * detail::inverse_gram(x);
    const double tcrit = student_t_quantile(0.975, df);
    const auto p = fit.coefficients.size();
    fit.standard_errors.resize(p);
    fit.statistics.resize(p);
    fit.p_values.resize(p);
    fit.ci_95.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double se = std::sqrt(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
        const double b = fit.coefficients[j];
        fit.standard_errors[j] = se;
        if (se > 0.0) {
            fit.statistics[j] = b / se;
            fit.p_values[j] = std::clamp(student_t_two_sided(b / se, df), 0.0, 1.0);
        } else {
            fit.statistics[j] = b == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
            fit.p_values[j] = b == 0.0 ? 1.0 : 0.0;
        }
        fit.ci_95[j] = Interval{b - tcrit * se, b + tcrit * se};
    }
    const bool centred = detail::has_constant_column(x);
    const double ybar = centred ? yv.mean() : 0.0;
    const double tss = (yv.array() - ybar).square().sum();
    const double scale = yv.cwiseAbs().maxCoeff();
    const double negligible = static_cast<double>(n) * (1e-12 * scale) * (1e-12 * scale);
    fit.fit_stat = tss <= negligible ? 0.0 : std::clamp(1.0 - rss / tss, 0.0, 1.0);
    return fit;
}

struct GlmOptions {
    int max_iterations = 100;
    double tolerance = 1e-8;
};

namespace detail {

inline double logistic_loglik(const Vector& y, const Vector& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        // log(1 + e^eta) computed stably
        const double e = eta(i);
        const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += y(i) * e - log1pexp;
    }
    return ll;
}

} // namespace detail

/// Logistic regression by iteratively reweighted least squares with step
/// halving. Odds ratios, Wald 95% CIs and McFadden's pseudo-R^2 are reported.
/// Diverging coefficients (complete or quasi-separation) raise Degenerate("separation").
inline RegressionFit fit_logistic(std::span<const double> y, const Matrix& x, std::vector<std::string> names = {},
                                  const GlmOptions& options = {}) {
    const auto n = static_cast<Eigen::Index>(y.size());
    require(x.rows() == n, "response and design differ in length");
    require(n > x.cols(), "fit_logistic needs more observations than columns");
    std::size_t ones = 0;
    for (const double v : y) {
        require(v == 0.0 || v == 1.0, "logistic outcomes must be 0 or 1");
        ones += v == 1.0;
    }
    if (ones == 0 || ones == y.size()) throw InvalidInput("logistic outcome has a single class");
    names = detail::default_names(x, std::move(names));
    detail::check_full_rank(x, names);

    const Vector yv = detail::to_vector(y);
    Vector beta = Vector::Zero(x.cols());
    Vector eta = x * beta;
    double ll = detail::logistic_loglik(yv, eta);
    bool converged = false;
    int iter = 0;
    for (iter = 1; iter <= options.max_iterations; ++iter) {
        Vector w(n), z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mu = 1.0 / (1.0 + std::exp(-eta(i)));
            const double wi = std::max(mu * (1.0 - mu), 1e-300);
            w(i) = wi;
            z(i) = eta(i) + (yv(i) - mu) / wi;
        }
        Vector proposal = detail::weighted_solve(x, w, z);
        Vector step = proposal - beta;
        double new_ll = detail::logistic_loglik(yv, x * proposal);
        for (int halving = 0; halving < 30 && !(new_ll >= ll - 1e-12 * std::fabs(ll)); ++halving) {
            step *= 0.5;
            proposal = beta + step;
            new_ll = detail::logistic_loglik(yv, x * proposal);
        }
        const double change = step.cwiseAbs().maxCoeff();
        beta = proposal;
        eta = x * beta;
        ll = new_ll;
        if (change < options.tolerance) {
            converged = true;
            break;
        }
    }
    const double max_eta = eta.cwiseAbs().maxCoeff();
    if (!converged && max_eta > 15.0) throw Degenerate("separation: coefficients diverge");
    if (converged && max_eta > 30.0) throw Degenerate("separation: fitted probabilities saturate");

    RegressionFit fit;
    fit.names = std::move(names);
    fit.n = static_cast<std::size_t>(n);
    fit.df_residual = static_cast<double>(n - x.cols());
    fit.converged = converged;
    fit.iterations = std::min(iter, options.max_iterations);
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    Vector sw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = 1.0 / (1.0 + std::exp(-eta(i)));
        sw(i) = std::sqrt(mu * (1.0 - mu));
    }
    detail::fill_wald(fit, detail::inverse_gram(sw.asDiagonal() * x), true);
    const double ybar = static_cast<double>(ones) / static_cast<double>(n);
    const double ll0 = static_cast<double>(n) * (ybar * std::log(ybar) + (1.0 - ybar) * std::log1p(-ybar));
    fit.log_likelihood = ll;
    fit.fit_stat = 1.0 - ll / ll0;
    return fit;
}

namespace detail {

inline double negbin_loglik(const Vector& y, const Vector& mu, double alpha) {
    double ll = 0.0;
    if (alpha < 1e-12) {
        for (Eigen::Index i = 0; i < y.size(); ++i) ll += y(i) * std::log(mu(i)) - mu(i) - log_gamma(y(i) + 1.0);
        return ll;
    }
    const double r = 1.0 / alpha;
    const double lg_r = log_gamma(r);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double am = alpha * mu(i);
        ll += log_gamma(y(i) + r) - lg_r - log_gamma(y(i) + 1.0) - r * std::log1p(am) +
              (y(i) > 0.0 ? y(i) * std::log(am / (1.0 + am)) : 0.0);
    }
    return ll;
}

inline Vector exp_linear(const Matrix& x, const Vector& beta, const Vector& offset) {
    return (x * beta + offset).array().exp().matrix();
}

// Pearson moment condition sum (y - mu)^2 / (mu (1 + alpha mu)) = n - p, solved for alpha >= 0.
inline double moment_dispersion(const Vector& y, const Vector& mu, double df) {
    auto excess = [&](double alpha) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double d = y(i) - mu(i);
            s += d * d / (mu(i) * (1.0 + alpha * mu(i)));
        }
        return s - df;
    };
    if (excess(0.0) <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (excess(hi) > 0.0 && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// IRLS for beta at fixed alpha; returns iterations used.
inline int negbin_irls(const Vector& y, const Matrix& x, const Vector& offset, double alpha, Vector& beta,
                       const GlmOptions& options) {
    Vector mu = exp_linear(x, beta, offset);
    double ll = negbin_loglik(y, mu, alpha);
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Vector w(y.size()), z(y.size());
        const Vector eta = x * beta;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            w(i) = mu(i) / (1.0 + alpha * mu(i));
            z(i) = eta(i) + (y(i) - mu(i)) / mu(i);
        }
        Vector proposal = weighted_solve(x, w, z);
        Vector step = proposal - beta;
        Vector new_mu = exp_linear(x, proposal, offset);
        double new_ll = negbin_loglik(y, new_mu, alpha);
        for (int halving = 0; halving < 30 && !(new_ll >= ll - 1e-12 * std::fabs(ll)); ++halving) {
            step *= 0.5;
            proposal = beta + step;
            new_mu = exp_linear(x, proposal, offset);
            new_ll = negbin_loglik(y, new_mu, alpha);
        }
        beta = proposal;
        mu = new_mu;
        ll = new_ll;
        if (step.cwiseAbs().maxCoeff() < options.tolerance * 1e-2) return iter;
    }
    return options.max_iterations;
}

struct NegbinCore {
    Vector beta;
    Vector mu;
    double alpha = 0.0;
    int outer = 0;
    int inner_total = 0;
};

inline NegbinCore negbin_core(const Vector& y, const Matrix& x, const Vector& offset, const GlmOptions& options,
                              int max_outer) {
    NegbinCore core;
    // Start from a least-squares fit to log((y + ybar) / 2) - offset.
    const double ybar = y.mean();
    Vector z0(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) z0(i) = std::log(0.5 * (y(i) + ybar)) - offset(i);
    core.beta = x.householderQr().solve(z0);
    core.alpha = 0.0;
    for (core.outer = 1; core.outer <= max_outer; ++core.outer) {
        const Vector previous = core.beta;
        core.inner_total += negbin_irls(y, x, offset, core.alpha, core.beta, options);
        core.mu = exp_linear(x, core.beta, offset);
        const double alpha = moment_dispersion(y, core.mu, static_cast<double>(y.size() - x.cols()));
        const double alpha_change = std::fabs(alpha - core.alpha);
        const double beta_change = (core.beta - previous).cwiseAbs().maxCoeff();
        core.alpha = alpha;
        if (core.outer > 1 && alpha_change <= options.tolerance * std::max(1.0, alpha) &&
            beta_change < options.tolerance) {
            core.inner_total += negbin_irls(y, x, offset, core.alpha, core.beta, options);
            core.mu = exp_linear(x, core.beta, offset);
            return core;
        }
    }
    throw NotConverged("negative binomial fit did not converge after " + std::to_string(max_outer) +
                       " outer iterations (alpha = " + std::to_string(core.alpha) + ")");
}

} // namespace detail

struct NegbinOptions {
    GlmOptions glm{};
    int max_outer = 200;
};

/// NB2 regression with log link and an offset: IRLS for the coefficients at
/// fixed dispersion, alternating with a moment update of the dispersion.
/// Incidence rate ratios exp(beta), Wald CIs, and McFadden pseudo-R^2 against
/// the intercept-plus-offset model.
inline RegressionFit fit_negbin(std::span<const double> y, const Matrix& x, std::span<const double> offset,
                                std::vector<std::string> names = {}, const NegbinOptions& options = {}) {
    const auto n = static_cast<Eigen::Index>(y.size());
    require(x.rows() == n && static_cast<Eigen::Index>(offset.size()) == n,
            "response, design and offset differ in length");
    require(n > x.cols(), "fit_negbin needs more observations than columns");
    double total = 0.0;
    for (const double v : y) {
        require(v >= 0.0 && std::isfinite(v), "counts must be finite and nonnegative");
        total += v;
    }
    for (const double o : offset) require(std::isfinite(o), "offset must be finite");
    if (total == 0.0) throw InvalidInput("negative binomial response is all zero");
    names = detail::default_names(x, std::move(names));
    detail::check_full_rank(x, names);

    const Vector yv = detail::to_vector(y);
    const Vector off = detail::to_vector(offset);
    const auto core = detail::negbin_core(yv, x, off, options.glm, options.max_outer);

    RegressionFit fit;
    fit.names = std::move(names);
    fit.n = static_cast<std::size_t>(n);
    fit.df_residual = static_cast<double>(n - x.cols());
    fit.converged = true;
    fit.iterations = core.outer;
    fit.dispersion = core.alpha;
    fit.coefficients.assign(core.beta.data(), core.beta.data() + core.beta.size());
    Vector sw(n);
    for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(core.mu(i) / (1.0 + core.alpha * core.mu(i)));
    detail::fill_wald(fit, detail::inverse_gram(sw.asDiagonal() * x), true);
    fit.log_likelihood = detail::negbin_loglik(yv, core.mu, core.alpha);

    const bool intercept_only = x.cols() == 1 && detail::has_constant_column(x);
    if (intercept_only) {
        fit.fit_stat = 0.0;
    } else {
        const Matrix ones = Matrix::Ones(n, 1);
        const auto null = detail::negbin_core(yv, ones, off, options.glm, options.max_outer);
        const double ll0 = detail::negbin_loglik(yv, null.mu, null.alpha);
        fit.fit_stat = 1.0 - fit.log_likelihood / ll0;
    }
    return fit;
}

/// White's test for a single regressor: regress squared OLS residuals of
/// y on (1, x) against (1, x, x^2); statistic n R^2 ~ chi^2(2).
inline TestResult white_test(std::span<const double> y, std::span<const double> x) {
    require(y.size() == x.size(), "white_test needs equal-length inputs");
    require(y.size() >= 10, "white_test needs at least 10 observations");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) throw InvalidInput("white_test regressor is constant");
    std::vector<double> xs(x.begin(), x.end());
    const auto base = fit_linear(y, with_intercept({xs}), {"const", "x"});
    std::vector<double> e2(y.size());
    std::vector<double> x2(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - base.coefficients[0] - base.coefficients[1] * x[i];
        e2[i] = e * e;
        x2[i] = x[i] * x[i];
    }
    TestResult r;
    r.method = "white";
    r.df = {2.0};
    // Squared residuals that are numerically constant carry no heteroskedasticity;
    // rounding noise from an exact fit counts as constant.
    const double e2_mean = mean(e2);
    double spread = 0.0, y_scale = 0.0;
    for (const double v : e2) spread = std::max(spread, std::fabs(v - e2_mean));
    for (const double v : y) y_scale = std::max(y_scale, std::fabs(v));
    const double noise = 1e-10 * std::max(y_scale, 1.0);
    if (spread <= 1e-9 * e2_mean || spread <= noise * noise) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    const auto aux = fit_linear(e2, with_intercept({xs, x2}), {"const", "x", "x2"});
    r.statistic = static_cast<double>(y.size()) * aux.fit_stat;
    r.p_value = std::clamp(chi2_sf(r.statistic, 2.0), 0.0, 1.0);
    return r;
}

} // namespace surprise::stats
