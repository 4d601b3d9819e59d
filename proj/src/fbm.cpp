#include "fanneal/fbm.hpp"

#include <cmath>
#include <string>

#include "fanneal/random.hpp"

namespace fanneal {

namespace {

constexpr std::uint64_t kBridgeStream = 0x62726964676500ULL;  // "bridge"

void check_epsilon(double epsilon, bool strictly_positive) {
    if (!std::isfinite(epsilon) || epsilon < 0.0 || (strictly_positive && epsilon == 0.0)) {
        throw InvalidArgument(std::string("epsilon must be ") + (strictly_positive ? "> 0" : ">= 0") +
                              ", got " + std::to_string(epsilon));
    }
}

void check_dim(const WienerPath& w, std::size_t dim_index) {
    if (dim_index >= w.dims()) {
        throw InvalidArgument("dimension index " + std::to_string(dim_index) + " outside Wiener path with " +
                              std::to_string(w.dims()) + " dimensions");
    }
}

KernelTable power_kernel(const TimeGrid& grid, double exponent, double epsilon) {
    KernelTable k{grid, std::vector<double>(grid.nodes())};
    k.weights[0] = epsilon > 0.0 ? std::pow(epsilon, exponent) : (exponent == 0.0 ? 1.0 : 0.0);
    for (std::size_t m = 1; m < k.weights.size(); ++m) {
        k.weights[m] = exponent == 0.0 ? 1.0 : std::pow(grid.node(m) + epsilon, exponent);
    }
    return k;
}

}  // namespace

WienerPath sample_wiener(const TimeGrid& grid, std::size_t dims, std::uint64_t seed) {
    if (dims == 0) throw InvalidArgument("Wiener path needs at least one dimension");
    const auto rows = static_cast<Eigen::Index>(grid.steps());
    WienerPath w{grid, Eigen::MatrixXd(rows, static_cast<Eigen::Index>(dims)), seed, 0};
    const double scale = std::sqrt(grid.dt());
    for (std::size_t j = 0; j < dims; ++j) {
        NormalStream normal(derive_seed(seed, j));
        auto col = w.increments.col(static_cast<Eigen::Index>(j));
        for (Eigen::Index i = 0; i < rows; ++i) col(i) = scale * normal();
    }
    return w;
}

WienerPath bridge_refine(const WienerPath& w) {
    const TimeGrid fine = w.grid.refined(2);
    const auto rows = w.increments.rows();
    WienerPath out{fine, Eigen::MatrixXd(2 * rows, w.increments.cols()), w.seed, w.level + 1};
    // Midpoint of an interval of length dt given its endpoints:
    // W_mid = (W_a + W_b)/2 + sqrt(dt)/2 * Z.
    const double half_sd = 0.5 * std::sqrt(w.grid.dt());
    const std::uint64_t level_seed = derive_seed(w.seed, kBridgeStream + w.level);
    for (Eigen::Index j = 0; j < w.increments.cols(); ++j) {
        NormalStream normal(derive_seed(level_seed, static_cast<std::uint64_t>(j)));
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double half = 0.5 * w.increments(i, j);
            const double jitter = half_sd * normal();
            out.increments(2 * i, j) = half + jitter;
            out.increments(2 * i + 1, j) = half - jitter;
        }
    }
    return out;
}

KernelTable liouville_kernel(const TimeGrid& grid, const HurstParam& hurst, double epsilon) {
    check_epsilon(epsilon, false);
    return power_kernel(grid, hurst.alpha(), epsilon);
}

KernelTable phi_kernel(const TimeGrid& grid, const HurstParam& hurst, double epsilon) {
    check_epsilon(epsilon, true);
    return power_kernel(grid, hurst.alpha() - 1.0, epsilon);
}

double convolve_at(const KernelTable& kernel, std::span<const double> dw, std::size_t n) {
    if (n > dw.size() || n >= kernel.weights.size()) throw InvalidArgument("node index outside the path");
    const double* k = kernel.weights.data();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += k[n - i] * dw[i];
    return acc;
}

std::vector<double> convolve(const KernelTable& kernel, std::span<const double> dw) {
    if (dw.size() + 1 != kernel.weights.size()) throw InvalidArgument("kernel and increments disagree on the grid");
    std::vector<double> out(kernel.weights.size(), 0.0);
    for (std::size_t n = 1; n < out.size(); ++n) out[n] = convolve_at(kernel, dw, n);
    return out;
}

FbmPath fbm_from_wiener(const WienerPath& w, const HurstParam& hurst, double epsilon, std::size_t dim_index) {
    check_epsilon(epsilon, false);
    check_dim(w, dim_index);
    const auto dw = w.column(dim_index);
    FbmPath out{w.grid, hurst, epsilon, {}, w.seed};
    if (hurst.alpha() == 0.0) {
        // Kernel is identically one: plain running sum.
        out.values.assign(w.grid.nodes(), 0.0);
        for (std::size_t n = 1; n < out.values.size(); ++n) out.values[n] = out.values[n - 1] + dw[n - 1];
        return out;
    }
    out.values = convolve(liouville_kernel(w.grid, hurst, epsilon), dw);
    return out;
}

FbmPath phi_eps(const WienerPath& w, const HurstParam& hurst, double epsilon, std::size_t dim_index) {
    check_epsilon(epsilon, true);
    check_dim(w, dim_index);
    FbmPath out{w.grid, hurst, epsilon, {}, w.seed};
    out.values = convolve(phi_kernel(w.grid, hurst, epsilon), w.column(dim_index));
    return out;
}

double liouville_covariance_discrete(const TimeGrid& grid, std::size_t n, std::size_t m, const HurstParam& hurst,
                                     double epsilon) {
    if (n > grid.steps() || m > grid.steps()) throw InvalidArgument("node index outside the grid");
    const auto k = liouville_kernel(grid, hurst, epsilon);
    const std::size_t lo = std::min(n, m);
    double acc = 0.0;
    for (std::size_t i = 0; i < lo; ++i) acc += k.weights[n - i] * k.weights[m - i];
    return acc * grid.dt();
}

double mandelbrot_covariance(double t, double s, const HurstParam& hurst) {
    if (!(t >= 0.0) || !(s >= 0.0)) throw InvalidArgument("covariance needs t, s >= 0");
    const double e = 2.0 * hurst.H();
    return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

double eps_diff_variance_discrete(const TimeGrid& grid, std::size_t n, const HurstParam& hurst, double epsilon) {
    check_epsilon(epsilon, true);
    if (n > grid.steps()) throw InvalidArgument("node index outside the grid");
    const auto exact = liouville_kernel(grid, hurst, 0.0);
    const auto approx = liouville_kernel(grid, hurst, epsilon);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = approx.weights[n - i] - exact.weights[n - i];
        acc += d * d;
    }
    return acc * grid.dt();
}

}  // namespace fanneal
