#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fanneal/grid.hpp"

namespace fanneal {

/// Discretized standard Brownian increments, one column per noise dimension.
/// Row i holds W_{t_{i+1}} - W_{t_i}.
struct WienerPath {
    TimeGrid grid;
    Eigen::MatrixXd increments;
    std::uint64_t seed = 0;
    /// Number of Brownian-bridge refinements applied since sampling.
    unsigned level = 0;

    [[nodiscard]] std::size_t dims() const noexcept { return static_cast<std::size_t>(increments.cols()); }
    [[nodiscard]] std::span<const double> column(std::size_t j) const {
        return {increments.col(static_cast<Eigen::Index>(j)).data(), static_cast<std::size_t>(increments.rows())};
    }
};

/// Values of B^{H,eps} (eps == 0: exact Liouville fBm) at every grid node.
struct FbmPath {
    TimeGrid grid;
    HurstParam hurst;
    double epsilon = 0.0;
    std::vector<double> values;
    std::uint64_t source_seed = 0;
};

/// Draws N(0, dt) increments. Column j comes from the stream
/// derive_seed(seed, j) (see random.hpp), so columns are independent and a
/// wider path extends a narrower one with the same seed.
WienerPath sample_wiener(const TimeGrid& grid, std::size_t dims, std::uint64_t seed);

/// Doubles the resolution of `w` by sampling every interval midpoint from
/// the Brownian bridge. The coarse path is recovered by summing increment
/// pairs, so a sequence of refinements describes one fixed Brownian path.
WienerPath bridge_refine(const WienerPath& w);

/// Kernel weights on the uniform lag set: weights[m] = k(m * dt) for m = 1..N.
/// weights[0] holds k(0) when it is finite and is otherwise unused.
struct KernelTable {
    TimeGrid grid;
    std::vector<double> weights;
};

/// k(u) = (u + eps)^alpha.
KernelTable liouville_kernel(const TimeGrid& grid, const HurstParam& hurst, double epsilon);
/// k(u) = (u + eps)^(alpha - 1); requires eps > 0.
KernelTable phi_kernel(const TimeGrid& grid, const HurstParam& hurst, double epsilon);

/// Left-endpoint convolution sum_{i<n} weights[n-i] * dw[i] at node n.
double convolve_at(const KernelTable& kernel, std::span<const double> dw, std::size_t n);
/// The same sum at every node 0..N (O(N^2)).
std::vector<double> convolve(const KernelTable& kernel, std::span<const double> dw);

/// B^{H,eps} at every node, left-endpoint (Ito) discretization of
/// int_0^t (t - s + eps)^alpha dW_s. values[0] == 0; for H = 1/2 the result
/// is the running sum of the increments, bit for bit.
FbmPath fbm_from_wiener(const WienerPath& w, const HurstParam& hurst, double epsilon, std::size_t dim_index);

/// phi^eps_t = int_0^t (t - s + eps)^(alpha - 1) dW_s at every node.
FbmPath phi_eps(const WienerPath& w, const HurstParam& hurst, double epsilon, std::size_t dim_index);

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

/// E[B_t B_s] for the continuous process: int_0^min(t,s) (t-u+eps)^a (s-u+eps)^a du.
double liouville_covariance(double t, double s, const HurstParam& hurst, double epsilon,
                            const QuadratureOptions& opts = {});

/// Covariance of the discretized sampler between nodes n and m.
double liouville_covariance_discrete(const TimeGrid& grid, std::size_t n, std::size_t m,
                                     const HurstParam& hurst, double epsilon);

/// Mandelbrot fBm covariance 1/2 (t^2H + s^2H - |t - s|^2H).
double mandelbrot_covariance(double t, double s, const HurstParam& hurst);

/// E|B^{H,eps}_t - B^H_t|^2 = int_0^t [(u + eps)^a - u^a]^2 du.
double eps_diff_variance(double t, const HurstParam& hurst, double epsilon,
                         const QuadratureOptions& opts = {1e-12, 1e-8});

/// The same quantity for the discretized sampler at node n.
double eps_diff_variance_discrete(const TimeGrid& grid, std::size_t n, const HurstParam& hurst, double epsilon);

}  // namespace fanneal
