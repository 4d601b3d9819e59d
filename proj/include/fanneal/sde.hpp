#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fanneal/energy.hpp"
#include "fanneal/fbm.hpp"

namespace fanneal {

/// Parameters of dX = -grad g(X) dt + sqrt(2T) dB^H.
///
/// temperature == 0 is accepted as a zero-noise mode: the integrator then
/// reduces to plain gradient descent.
struct AnnealingConfig {
    double temperature = 0.0;
    std::vector<HurstParam> hurst_per_dim;
    std::vector<double> epsilon_per_dim;
    Eigen::VectorXd initial_state;
    TimeGrid grid{1.0, 1};

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(initial_state.size()); }
    /// Throws InvalidArgument on a negative temperature or mismatched lengths.
    void validate() const;
};

/// Trajectory X_{t_n}; row n is the state at node n.
struct StatePath {
    TimeGrid grid;
    Eigen::MatrixXd values;

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Explicit Euler scheme driven by precomputed fBm values:
/// X_{n+1} = X_n - grad g(X_n) dt + sqrt(2T) (B_{n+1} - B_n).
/// Throws DivergenceError (tagged with `replicate`) at the first non-finite state.
StatePath euler_maruyama(const EnergyFunction& g, const AnnealingConfig& cfg, std::span<const FbmPath> driving,
                         long replicate = -1);

/// Euler scheme using the semimartingale form of the eps-approximation,
/// dB^{H,eps} = alpha phi^eps dt + eps^alpha dW, per dimension. Requires every
/// epsilon_per_dim > 0.
StatePath euler_semimartingale(const EnergyFunction& g, const AnnealingConfig& cfg, const WienerPath& w,
                               long replicate = -1);

}  // namespace fanneal
