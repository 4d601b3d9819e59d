#include "fanneal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fanneal/parallel.hpp"
#include "fanneal/random.hpp"
#include "fanneal/stats.hpp"

namespace fanneal {

namespace {

/// Delete-one jackknife standard error of f(mean of column 0, mean of column 1, ...).
template <class F>
double jackknife_error(const std::vector<std::vector<double>>& samples, F&& f) {
    const std::size_t n = samples.front().size();
    if (n < 2) return 0.0;
    const std::size_t k = samples.size();
    std::vector<double> totals(k);
    for (std::size_t c = 0; c < k; ++c) totals[c] = pairwise_sum(samples[c]);
    std::vector<double> loo(n);
    std::vector<double> means(k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) means[c] = (totals[c] - samples[c][i]) / static_cast<double>(n - 1);
        loo[i] = f(means);
    }
    const double bar = pairwise_sum(loo) / static_cast<double>(n);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = (loo[i] - bar) * (loo[i] - bar);
    return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * pairwise_sum(dev));
}

void check_coupled(const PathEnsemble& a, const PathEnsemble& b) {
    if (!(a.grid == b.grid)) throw InvalidArgument("ensembles live on different grids");
    if (a.size() != b.size()) throw InvalidArgument("ensembles have different replicate counts");
    if (a.size() < 2) throw InvalidArgument("an L2 estimate needs at least two replicates");
    if (a.seeds != b.seeds) throw CouplingError("ensembles are not coupled: replicate seeds differ");
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (a.paths[r].rows() != b.paths[r].rows() || a.paths[r].cols() != b.paths[r].cols() ||
            a.paths[r].rows() != static_cast<Eigen::Index>(a.grid.nodes())) {
            throw InvalidArgument("ensemble paths have mismatched shapes");
        }
    }
}

L2Estimate l2_from_squares(double t, const std::vector<double>& sq) {
    L2Estimate est;
    est.t = t;
    est.replicates = sq.size();
    const MeanEstimate m = sq.size() > kBatchMeansThreshold ? batch_means(sq, 100) : mean_with_error(sq);
    est.mean_sq = m.mean;
    est.std_error = m.std_error;
    est.rms = std::sqrt(std::max(0.0, est.mean_sq));
    if (sq.size() > kBatchMeansThreshold) {
        est.rms_std_error = est.rms > 0.0 ? est.std_error / (2.0 * est.rms) : 0.0;
    } else {
        est.rms_std_error =
            jackknife_error(std::vector<std::vector<double>>{sq},
                            [](const std::vector<double>& mu) { return std::sqrt(std::max(0.0, mu[0])); });
    }
    return est;
}

L2Estimate l2_impl(const PathEnsemble& a, const PathEnsemble& b, double t, long coordinate) {
    check_coupled(a, b);
    const auto n = static_cast<Eigen::Index>(a.grid.index_of(t));
    std::vector<double> sq(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        const Eigen::RowVectorXd diff = a.paths[r].row(n) - b.paths[r].row(n);
        if (coordinate < 0) {
            sq[r] = diff.squaredNorm();
        } else {
            if (coordinate >= diff.size()) throw InvalidArgument("coordinate outside the paths");
            sq[r] = diff(coordinate) * diff(coordinate);
        }
    }
    return l2_from_squares(t, sq);
}

}  // namespace

std::uint64_t WienerEnsemble::seed(std::size_t r) const noexcept { return derive_seed(master_seed, r); }

WienerPath WienerEnsemble::path(std::size_t r) const { return sample_wiener(grid, dims, seed(r)); }

PathEnsemble fbm_ensemble(const WienerEnsemble& w, const HurstParam& hurst, double epsilon, std::size_t dim_index,
                          unsigned threads) {
    PathEnsemble out{w.grid, std::vector<std::uint64_t>(w.replicates), std::vector<Eigen::MatrixXd>(w.replicates)};
    parallel_for(w.replicates, threads, [&](std::size_t r) {
        const auto b = fbm_from_wiener(w.path(r), hurst, epsilon, dim_index);
        out.seeds[r] = w.seed(r);
        out.paths[r] = Eigen::Map<const Eigen::VectorXd>(b.values.data(), static_cast<Eigen::Index>(b.values.size()));
    });
    return out;
}

PathEnsemble linear_ensemble(const LinearModel& model, std::span<const HurstParam> hurst,
                             std::span<const double> epsilon, const WienerEnsemble& w, unsigned threads) {
    const std::size_t d = model.dim();
    if (hurst.size() != d || epsilon.size() != d) throw InvalidArgument("need one H and one eps per dimension");
    if (w.dims < d) throw InvalidArgument("Wiener ensemble has fewer dimensions than the model");
    PathEnsemble out{w.grid, std::vector<std::uint64_t>(w.replicates), std::vector<Eigen::MatrixXd>(w.replicates)};
    parallel_for(w.replicates, threads, [&](std::size_t r) {
        const WienerPath path = w.path(r);
        std::vector<FbmPath> driving;
        driving.reserve(d);
        for (std::size_t j = 0; j < d; ++j) driving.push_back(fbm_from_wiener(path, hurst[j], epsilon[j], j));
        out.seeds[r] = w.seed(r);
        out.paths[r] = linear_solution(model, driving).values;
    });
    return out;
}

L2Estimate l2_distance(const PathEnsemble& a, const PathEnsemble& b, double t) { return l2_impl(a, b, t, -1); }

L2Estimate l2_distance(const PathEnsemble& a, const PathEnsemble& b, double t, std::size_t coordinate) {
    return l2_impl(a, b, t, static_cast<long>(coordinate));
}

double RateReport::prefactor() const { return std::exp(intercept); }

RateReport rate_regression(std::span<const double> eps_values, std::span<const double> errors) {
    if (eps_values.size() != errors.size()) throw InvalidArgument("eps and error lists differ in length");
    if (eps_values.size() < 4) throw InvalidArgument("rate regression needs at least 4 points");
    std::vector<std::size_t> order(eps_values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i : order) {
        if (!(eps_values[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(eps_values[i]) ||
            !std::isfinite(errors[i])) {
            throw InvalidArgument("rate regression needs finite positive eps and error values");
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps_values[a] > eps_values[b]; });
    RateReport rep;
    const std::size_t n = order.size();
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        rep.eps_values.push_back(eps_values[order[k]]);
        rep.errors.push_back(errors[order[k]]);
        x[k] = std::log(eps_values[order[k]]);
        y[k] = std::log(errors[order[k]]);
    }
    const double xm = pairwise_sum(x) / static_cast<double>(n);
    const double ym = pairwise_sum(y) / static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - xm) * (x[k] - xm);
        sxy += (x[k] - xm) * (y[k] - ym);
        syy += (y[k] - ym) * (y[k] - ym);
    }
    if (sxx == 0.0) throw InvalidArgument("rate regression needs at least two distinct eps values");
    rep.slope = sxy / sxx;
    rep.intercept = ym - rep.slope * xm;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = y[k] - (rep.intercept + rep.slope * x[k]);
        sse += r * r;
    }
    rep.r_squared = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
    return rep;
}

QuadratureRate quadrature_rate(const HurstParam& hurst, double t, std::span<const double> eps_ladder) {
    if (hurst.alpha() == 0.0) {
        throw InvalidArgument("H = 1/2: B^{H,eps} - B^H is identically zero, there is no rate to fit");
    }
    std::vector<double> var(eps_ladder.size());
    std::vector<double> rms(eps_ladder.size());
    for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
        var[k] = eps_diff_variance(t, hurst, eps_ladder[k]);
        rms[k] = std::sqrt(var[k]);
    }
    return {rate_regression(eps_ladder, var), rate_regression(eps_ladder, rms)};
}

GronwallConstants gronwall_constants(const LinearModel& model) {
    if (!model.closed_form) throw InvalidArgument("Gronwall constants are defined for 2x2 models");
    const double a1 = std::abs(model.a1());
    const double b1 = std::abs(model.b1());
    const double a2 = std::abs(model.a2());
    const double b2 = std::abs(model.b2());
    return {std::max({a1 / 2.0, a2 / 2.0, b1 / 2.0, b2 / 2.0}), std::max(a1 + b1, a2 + b2)};
}

GronwallReport gronwall_from_squares(const LinearModel& model, std::span<const HurstParam> hurst,
                                     std::span<const double> epsilon, std::span<const double> t_checkpoints,
                                     std::span<const double> fitted_variance_prefactor,
                                     const std::vector<std::array<std::vector<double>, 2>>& squares) {
    const GronwallConstants mc = gronwall_constants(model);
    if (hurst.size() != 2 || epsilon.size() != 2 || fitted_variance_prefactor.size() != 2) {
        throw InvalidArgument("Gronwall check needs two H, two eps and two fitted constants");
    }
    if (squares.size() != t_checkpoints.size()) throw InvalidArgument("one sample block per checkpoint expected");
    GronwallReport rep;
    rep.M_paper = mc.M_paper;
    rep.M_safe = mc.M_safe;
    rep.epsilon = {epsilon[0], epsilon[1]};
    double c = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        if (!(fitted_variance_prefactor[j] >= 0.0)) throw InvalidArgument("fitted constants must be >= 0");
        c += std::sqrt(fitted_variance_prefactor[j] * std::pow(epsilon[j], 2.0 * hurst[j].H()));
    }
    rep.C_alpha_eps = std::sqrt(2.0 * model.temperature) * c;

    const auto norm_sum = [](const std::vector<double>& mu) {
        return std::sqrt(std::max(0.0, mu[0])) + std::sqrt(std::max(0.0, mu[1]));
    };
    for (std::size_t k = 0; k < t_checkpoints.size(); ++k) {
        const std::vector<std::vector<double>> sq{squares[k][0], squares[k][1]};
        if (sq[0].size() < 2 || sq[0].size() != sq[1].size()) {
            throw InvalidArgument("Gronwall check needs at least two replicates per coordinate");
        }
        const auto reps = static_cast<double>(sq[0].size());
        const double t = t_checkpoints[k];
        rep.t_checkpoints.push_back(t);
        rep.measured.push_back(norm_sum({pairwise_sum(sq[0]) / reps, pairwise_sum(sq[1]) / reps}));
        rep.measured_se.push_back(jackknife_error(sq, norm_sum));
        rep.bound_paper.push_back(rep.C_alpha_eps * std::exp(rep.M_paper * t));
        rep.bound_safe.push_back(rep.C_alpha_eps * std::exp(rep.M_safe * t));
    }
    return rep;
}

GronwallReport gronwall_check(const LinearModel& model, std::span<const HurstParam> hurst,
                              std::span<const double> epsilon, const PathEnsemble& exact,
                              const PathEnsemble& approx, std::span<const double> t_checkpoints,
                              std::span<const double> fitted_variance_prefactor) {
    check_coupled(exact, approx);
    if (exact.paths.front().cols() != 2) throw InvalidArgument("Gronwall check needs two-dimensional paths");
    const std::size_t reps = exact.size();
    std::vector<std::array<std::vector<double>, 2>> squares;
    for (double t : t_checkpoints) {
        const auto n = static_cast<Eigen::Index>(exact.grid.index_of(t));
        std::array<std::vector<double>, 2> block{std::vector<double>(reps), std::vector<double>(reps)};
        for (std::size_t r = 0; r < reps; ++r) {
            for (Eigen::Index j = 0; j < 2; ++j) {
                const double d = exact.paths[r](n, j) - approx.paths[r](n, j);
                block[static_cast<std::size_t>(j)][r] = d * d;
            }
        }
        squares.push_back(std::move(block));
    }
    return gronwall_from_squares(model, hurst, epsilon, t_checkpoints, fitted_variance_prefactor, squares);
}

GronwallReport gronwall_check(const LinearModel& model, std::span<const HurstParam> hurst,
                              std::span<const double> epsilon, const WienerEnsemble& w,
                              std::span<const double> t_checkpoints,
                              std::span<const double> fitted_variance_prefactor, unsigned threads) {
    const std::vector<double> zeros(epsilon.size(), 0.0);
    const PathEnsemble exact = linear_ensemble(model, hurst, zeros, w, threads);
    const PathEnsemble approx = linear_ensemble(model, hurst, epsilon, w, threads);
    return gronwall_check(model, hurst, epsilon, exact, approx, t_checkpoints, fitted_variance_prefactor);
}

std::vector<double> default_checkpoints(const TimeGrid& grid) {
    std::vector<double> out;
    for (double f : {0.25, 0.5, 0.75, 1.0}) out.push_back(f * grid.t_end());
    return out;
}

double hurst_estimate(std::span<const double> values) {
    if (values.size() < 257) throw InvalidArgument("Hurst estimate needs a path with at least 256 steps");
    const std::size_t steps = values.size() - 1;
    std::vector<double> inc(steps);
    for (std::size_t k = 0; k < steps; ++k) inc[k] = values[k + 1] - values[k];
    std::vector<double> scales;
    std::vector<double> moments;
    for (std::size_t m = 1; steps / m >= 16; m *= 2) {
        const std::size_t blocks = steps / m;
        std::vector<double> sq(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            double s = 0.0;
            for (std::size_t i = b * m; i < (b + 1) * m; ++i) s += inc[i];
            sq[b] = s * s;
        }
        const double v = pairwise_sum(sq) / static_cast<double>(blocks);
        if (!(v > 0.0)) throw InvalidArgument("Hurst estimate needs a non-constant path");
        scales.push_back(static_cast<double>(m));
        moments.push_back(v);
    }
    return 0.5 * rate_regression(scales, moments).slope;
}

double hurst_estimate(const FbmPath& path) { return hurst_estimate(path.values); }

}  // namespace fanneal
