#include "fanneal/sde.hpp"

#include <cmath>
#include <string>

namespace fanneal {

namespace {

void check_energy(const EnergyFunction& g, const AnnealingConfig& cfg) {
    cfg.validate();
    if (g.dim != cfg.dim()) {
        throw InvalidArgument("energy '" + g.name + "' has dimension " + std::to_string(g.dim) +
                              " but the initial state has " + std::to_string(cfg.dim()));
    }
}

/// Shared recursion; noise(n, j) returns the driving increment of dimension j
/// over [t_n, t_{n+1}].
template <class Noise>
StatePath integrate(const EnergyFunction& g, const AnnealingConfig& cfg, Noise&& noise, long replicate) {
    const std::size_t steps = cfg.grid.steps();
    const auto d = static_cast<Eigen::Index>(cfg.dim());
    const double dt = cfg.grid.dt();
    const double amplitude = std::sqrt(2.0 * cfg.temperature);
    StatePath path{cfg.grid, Eigen::MatrixXd(static_cast<Eigen::Index>(steps + 1), d)};
    path.values.row(0) = cfg.initial_state.transpose();
    Eigen::VectorXd x = cfg.initial_state;
    Eigen::VectorXd db(d);
    for (std::size_t n = 0; n < steps; ++n) {
        for (Eigen::Index j = 0; j < d; ++j) db(j) = noise(n, static_cast<std::size_t>(j));
        x = x - g.gradient(x) * dt + amplitude * db;
        if (!x.allFinite()) {
            throw DivergenceError(n + 1, replicate,
                                  "state became non-finite at step " + std::to_string(n + 1) +
                                      (replicate >= 0 ? " of replicate " + std::to_string(replicate) : std::string()) +
                                      " (energy '" + g.name + "', dt = " + std::to_string(dt) + ")");
        }
        path.values.row(static_cast<Eigen::Index>(n + 1)) = x.transpose();
    }
    return path;
}

}  // namespace

void AnnealingConfig::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw InvalidArgument("temperature must be finite and >= 0");
    }
    if (initial_state.size() == 0) throw InvalidArgument("initial state is empty");
    if (!initial_state.allFinite()) throw InvalidArgument("initial state must be finite");
    if (hurst_per_dim.size() != dim() || epsilon_per_dim.size() != dim()) {
        throw InvalidArgument("hurst_per_dim and epsilon_per_dim must have one entry per dimension");
    }
    for (double e : epsilon_per_dim) {
        if (!(e >= 0.0) || !std::isfinite(e)) throw InvalidArgument("epsilon values must be finite and >= 0");
    }
}

StatePath euler_maruyama(const EnergyFunction& g, const AnnealingConfig& cfg, std::span<const FbmPath> driving,
                         long replicate) {
    check_energy(g, cfg);
    if (driving.size() != cfg.dim()) {
        throw InvalidArgument("need one driving path per dimension, got " + std::to_string(driving.size()));
    }
    for (const auto& b : driving) {
        if (!(b.grid == cfg.grid) || b.values.size() != cfg.grid.nodes()) {
            throw InvalidArgument("driving path grid does not match the configuration grid");
        }
    }
    return integrate(
        g, cfg, [&](std::size_t n, std::size_t j) { return driving[j].values[n + 1] - driving[j].values[n]; },
        replicate);
}

StatePath euler_semimartingale(const EnergyFunction& g, const AnnealingConfig& cfg, const WienerPath& w,
                               long replicate) {
    check_energy(g, cfg);
    if (!(w.grid == cfg.grid)) throw InvalidArgument("Wiener path grid does not match the configuration grid");
    if (w.dims() < cfg.dim()) throw InvalidArgument("Wiener path has fewer dimensions than the state");
    const std::size_t d = cfg.dim();
    std::vector<std::vector<double>> phi(d);
    std::vector<double> drift_scale(d);
    std::vector<double> noise_scale(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double eps = cfg.epsilon_per_dim[j];
        if (!(eps > 0.0)) throw InvalidArgument("semimartingale scheme needs every epsilon > 0");
        const auto& h = cfg.hurst_per_dim[j];
        phi[j] = phi_eps(w, h, eps, j).values;
        drift_scale[j] = h.alpha() * cfg.grid.dt();
        noise_scale[j] = std::pow(eps, h.alpha());
    }
    return integrate(
        g, cfg,
        [&](std::size_t n, std::size_t j) {
            return drift_scale[j] * phi[j][n] + noise_scale[j] * w.increments(static_cast<Eigen::Index>(n),
                                                                              static_cast<Eigen::Index>(j));
        },
        replicate);
}

}  // namespace fanneal
