#include "fanneal/energy.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "fanneal/error.hpp"

namespace fanneal {

namespace {

void expect_arity(const std::string& name, std::span<const double> params, std::size_t n) {
    if (params.size() != n) {
        throw InvalidArgument(name + " expects " + std::to_string(n) + " parameters, got " +
                              std::to_string(params.size()));
    }
}

EnergyFunction quadratic(std::span<const double> params) {
    // d^2 + d parameters.
    const auto n = params.size();
    std::size_t d = 0;
    while ((d + 1) * (d + 1) + (d + 1) <= n) ++d;
    if (d == 0 || d * d + d != n) {
        throw InvalidArgument("quadratic expects d*d + d parameters (Q row-major, then m), got " +
                              std::to_string(n));
    }
    const auto di = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd q(di, di);
    for (Eigen::Index r = 0; r < di; ++r)
        for (Eigen::Index c = 0; c < di; ++c) q(r, c) = params[static_cast<std::size_t>(r * di + c)];
    Eigen::VectorXd m(di);
    for (Eigen::Index r = 0; r < di; ++r) m(r) = params[d * d + static_cast<std::size_t>(r)];
    if (!q.allFinite() || !m.allFinite()) throw InvalidArgument("quadratic parameters must be finite");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("quadratic Q must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(q);
    if (llt.info() != Eigen::Success) throw InvalidArgument("quadratic Q must be positive definite");

    EnergyFunction g;
    g.name = "quadratic";
    g.dim = d;
    g.params.assign(params.begin(), params.end());
    g.value = [q, m](const Eigen::VectorXd& x) {
        const Eigen::VectorXd r = x - m;
        return 0.5 * r.dot(q * r);
    };
    g.gradient = [q, m](const Eigen::VectorXd& x) -> Eigen::VectorXd { return q * (x - m); };
    g.hessian = [q](const Eigen::VectorXd&) -> Eigen::MatrixXd { return q; };
    return g;
}

EnergyFunction double_well(std::span<const double> params) {
    expect_arity("double_well", params, 1);
    const double kappa = params[0];
    EnergyFunction g;
    g.name = "double_well";
    g.dim = 2;
    g.params = {kappa};
    g.value = [kappa](const Eigen::VectorXd& x) {
        const double w = x(0) * x(0) - 1.0;
        return w * w + kappa * x(1) * x(1);
    };
    g.gradient = [kappa](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd out(2);
        out << 4.0 * x(0) * (x(0) * x(0) - 1.0), 2.0 * kappa * x(1);
        return out;
    };
    g.hessian = [kappa](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::MatrixXd h(2, 2);
        h << 12.0 * x(0) * x(0) - 4.0, 0.0, 0.0, 2.0 * kappa;
        return h;
    };
    return g;
}

EnergyFunction rosenbrock(std::span<const double> params) {
    expect_arity("rosenbrock", params, 2);
    const double a = params[0];
    const double b = params[1];
    EnergyFunction g;
    g.name = "rosenbrock";
    g.dim = 2;
    g.params = {a, b};
    g.value = [a, b](const Eigen::VectorXd& x) {
        const double u = a - x(0);
        const double v = x(1) - x(0) * x(0);
        return u * u + b * v * v;
    };
    g.gradient = [a, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const double v = x(1) - x(0) * x(0);
        Eigen::VectorXd out(2);
        out << -2.0 * (a - x(0)) - 4.0 * b * x(0) * v, 2.0 * b * v;
        return out;
    };
    g.hessian = [b](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::MatrixXd h(2, 2);
        const double off = -4.0 * b * x(0);
        h << 2.0 - 4.0 * b * (x(1) - 3.0 * x(0) * x(0)), off, off, 2.0 * b;
        return h;
    };
    return g;
}

EnergyFunction zero(std::span<const double> params) {
    expect_arity("zero", params, 1);
    const double d = params[0];
    if (!(d >= 1.0) || d != std::floor(d)) throw InvalidArgument("zero energy needs a positive integer dimension");
    const auto di = static_cast<Eigen::Index>(d);
    EnergyFunction g;
    g.name = "zero";
    g.dim = static_cast<std::size_t>(d);
    g.params = {d};
    g.value = [](const Eigen::VectorXd&) { return 0.0; };
    g.gradient = [di](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(di); };
    g.hessian = [di](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(di, di); };
    return g;
}

}  // namespace

EnergyFunction builtin_energy(const std::string& name, std::span<const double> params) {
    if (name == "quadratic") return quadratic(params);
    if (name == "double_well") return double_well(params);
    if (name == "rosenbrock") return rosenbrock(params);
    if (name == "zero") return zero(params);
    throw InvalidArgument("unknown energy '" + name + "'");
}

std::vector<std::string> builtin_energy_names() { return {"quadratic", "double_well", "rosenbrock", "zero"}; }

}  // namespace fanneal
