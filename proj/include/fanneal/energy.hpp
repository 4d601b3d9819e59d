#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fanneal {

/// Annealing landscape g with analytic first and second derivatives.
struct EnergyFunction {
    std::string name;
    std::size_t dim = 0;
    std::vector<double> params;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

/// Built-in families:
///   quadratic    params = Q (d*d, row-major) then m (d); g = 1/2 (x-m)^T Q (x-m), Q SPD
///   double_well  params = {kappa};  g = (x1^2 - 1)^2 + kappa x2^2
///   rosenbrock   params = {a, b};   g = (a - x1)^2 + b (x2 - x1^2)^2
///   zero         params = {d};      g = 0 on R^d
EnergyFunction builtin_energy(const std::string& name, std::span<const double> params);

/// Names accepted by builtin_energy.
std::vector<std::string> builtin_energy_names();

}  // namespace fanneal
