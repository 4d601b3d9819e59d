#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fanneal/fbm.hpp"
#include "fanneal/steady.hpp"

namespace fanneal {

/// Lazily generated ensemble of Wiener paths: replicate r has seed
/// derive_seed(master_seed, r). Two consumers holding the same descriptor
/// see identical paths, which is what coupled comparisons rely on.
struct WienerEnsemble {
    TimeGrid grid;
    std::size_t dims = 1;
    std::uint64_t master_seed = 0;
    std::size_t replicates = 0;

    [[nodiscard]] std::uint64_t seed(std::size_t r) const noexcept;
    [[nodiscard]] WienerPath path(std::size_t r) const;
};

/// Paths of equal shape, one per replicate, each (N+1) x dim.
struct PathEnsemble {
    TimeGrid grid;
    std::vector<std::uint64_t> seeds;
    std::vector<Eigen::MatrixXd> paths;

    [[nodiscard]] std::size_t size() const noexcept { return paths.size(); }
};

/// B^{H,eps} for one noise dimension of every replicate (dim = 1 paths).
PathEnsemble fbm_ensemble(const WienerEnsemble& w, const HurstParam& hurst, double epsilon, std::size_t dim_index,
                          unsigned threads = 1);

/// Linear solution U (general-mode exponential) for every replicate, driven
/// per coordinate by B^{H_j, eps_j} built from the replicate's Wiener path.
PathEnsemble linear_ensemble(const LinearModel& model, std::span<const HurstParam> hurst,
                             std::span<const double> epsilon, const WienerEnsemble& w, unsigned threads = 1);

/// Monte Carlo estimate of E|a_t - b_t|^2 over coupled replicates.
struct L2Estimate {
    double t = 0.0;
    double mean_sq = 0.0;
    double std_error = 0.0;
    std::size_t replicates = 0;
    /// sqrt(mean_sq), the L2(Omega) norm, with its jackknife standard error.
    double rms = 0.0;
    double rms_std_error = 0.0;
};

/// Ensembles larger than this use batch means instead of the jackknife.
inline constexpr std::size_t kBatchMeansThreshold = 1'000'000;

/// Throws InvalidArgument on shape or grid mismatch or an off-grid t, and
/// CouplingError when the replicate seeds differ.
L2Estimate l2_distance(const PathEnsemble& a, const PathEnsemble& b, double t);

/// Same, restricted to one coordinate of the paths.
L2Estimate l2_distance(const PathEnsemble& a, const PathEnsemble& b, double t, std::size_t coordinate);

/// Power-law fit error ~ C eps^slope by least squares in log-log coordinates.
struct RateReport {
    std::vector<double> eps_values;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;  ///< log C
    double r_squared = 0.0;

    [[nodiscard]] double prefactor() const;
};

/// Needs >= 4 strictly positive pairs. Output lists are ordered by decreasing eps.
RateReport rate_regression(std::span<const double> eps_values, std::span<const double> errors);

/// Rate of E|B^{H,eps}_t - B^H_t|^2 (variance) and of its square root (RMS)
/// over an eps ladder, from the deterministic quadrature.
struct QuadratureRate {
    RateReport variance;
    RateReport rms;
};

/// Throws InvalidArgument for H = 1/2, where the difference vanishes identically.
QuadratureRate quadrature_rate(const HurstParam& hurst, double t, std::span<const double> eps_ladder);

/// Measured coupled distance between U and U^eps against the Gronwall bound
/// C(alpha, eps) exp(M t).
///
/// measured(t) = |U^1_t - U^{1,eps}_t| + |U^2_t - U^{2,eps}_t| in L2(Omega).
/// C(alpha, eps) = sqrt(2T) * sum_j sqrt(C_j eps_j^{2 H_j}), with C_j the fitted
/// variance prefactors, i.e. the sum of the fitted L2 norms of B - B^eps.
struct GronwallReport {
    double M_paper = 0.0;  ///< max(|a1|, |a2|, |b1|, |b2|) / 2
    double M_safe = 0.0;   ///< max(|a1| + |b1|, |a2| + |b2|)
    double C_alpha_eps = 0.0;
    std::array<double, 2> epsilon{};
    std::vector<double> t_checkpoints;
    std::vector<double> measured;
    std::vector<double> measured_se;
    std::vector<double> bound_paper;
    std::vector<double> bound_safe;
};

struct GronwallConstants {
    double M_paper = 0.0;
    double M_safe = 0.0;
};

GronwallConstants gronwall_constants(const LinearModel& model);

/// From prebuilt coupled ensembles (exact and eps-driven). `fitted_variance_prefactor`
/// holds C_j for each coordinate (0 when H_j = 1/2).
GronwallReport gronwall_check(const LinearModel& model, std::span<const HurstParam> hurst,
                              std::span<const double> epsilon, const PathEnsemble& exact,
                              const PathEnsemble& approx, std::span<const double> t_checkpoints,
                              std::span<const double> fitted_variance_prefactor);

/// Core of the check: `squares[k][j][r]` is the squared deviation of
/// coordinate j at checkpoint k in replicate r (coupled replicates).
GronwallReport gronwall_from_squares(const LinearModel& model, std::span<const HurstParam> hurst,
                                     std::span<const double> epsilon, std::span<const double> t_checkpoints,
                                     std::span<const double> fitted_variance_prefactor,
                                     const std::vector<std::array<std::vector<double>, 2>>& squares);

/// Builds both ensembles from `w` and runs the check above.
GronwallReport gronwall_check(const LinearModel& model, std::span<const HurstParam> hurst,
                              std::span<const double> epsilon, const WienerEnsemble& w,
                              std::span<const double> t_checkpoints,
                              std::span<const double> fitted_variance_prefactor, unsigned threads = 1);

/// {0.25, 0.5, 0.75, 1.0} * t_end.
std::vector<double> default_checkpoints(const TimeGrid& grid);

/// Aggregated-variance Hurst estimate: the mean square of block sums of the
/// increments grows like m^{2H} in the block size m. Block sizes are dyadic
/// with at least 16 blocks; the result is half the log-log slope. A smooth
/// (linear) path saturates at 1. Needs >= 256 steps.
double hurst_estimate(std::span<const double> values);
double hurst_estimate(const FbmPath& path);

}  // namespace fanneal
