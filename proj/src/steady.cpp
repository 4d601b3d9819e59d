#include "fanneal/steady.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/MatrixFunctions>

namespace fanneal {

namespace {

struct Step {
    Eigen::VectorXd x;
    bool accepted = false;
};

Step newton_step(const EnergyFunction& g, const Eigen::VectorXd& x, const Eigen::VectorXd& grad, double gnorm,
                 int max_halvings) {
    const Eigen::MatrixXd h = g.hessian(x);
    // Indefinite Hessians get the smallest diagonal shift (by decades) that
    // makes them positive definite, so the step stays a descent direction.
    const auto n = h.rows();
    const double scale = 1.0 + h.cwiseAbs().maxCoeff();
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    for (double mu = 1e-8 * scale; llt.info() != Eigen::Success && mu < 1e8 * scale; mu *= 10.0) {
        llt.compute(h + mu * Eigen::MatrixXd::Identity(n, n));
    }
    if (llt.info() != Eigen::Success) return {x, false};
    const Eigen::VectorXd p = -llt.solve(grad);
    if (!p.allFinite()) return {x, false};
    const double g0 = g.value(x);
    double t = 1.0;
    for (int k = 0; k <= max_halvings; ++k, t *= 0.5) {
        Eigen::VectorXd trial = x + t * p;
        if (g.value(trial) < g0 || g.gradient(trial).norm() < gnorm) return {std::move(trial), true};
    }
    return {x, false};
}

Step gradient_step(const EnergyFunction& g, const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                   int max_halvings) {
    const double g0 = g.value(x);
    double t = 1.0;
    for (int k = 0; k <= max_halvings; ++k, t *= 0.5) {
        Eigen::VectorXd trial = x - t * grad;
        if (g.value(trial) < g0) return {std::move(trial), true};
    }
    return {x, false};
}

void require_closed_form(const LinearModel& model) {
    if (!model.closed_form) throw InvalidArgument("closed-form exponential needs a 2x2 model");
}

}  // namespace

SteadyState find_steady_state(const EnergyFunction& g, const Eigen::VectorXd& x_init,
                              const SteadyStateOptions& opts) {
    if (!(opts.tol > 0.0)) throw InvalidArgument("steady-state tolerance must be > 0");
    if (static_cast<std::size_t>(x_init.size()) != g.dim) {
        throw InvalidArgument("initial point dimension does not match energy '" + g.name + "'");
    }
    Eigen::VectorXd x = x_init;
    Eigen::VectorXd best = x;
    double best_norm = g.gradient(x).norm();
    for (int iter = 0;; ++iter) {
        const Eigen::VectorXd grad = g.gradient(x);
        const double gnorm = grad.norm();
        if (!std::isfinite(gnorm)) break;
        if (gnorm < best_norm) {
            best = x;
            best_norm = gnorm;
        }
        if (gnorm <= opts.tol) return {x, gnorm, iter};
        if (iter == opts.max_iter) break;
        Step step = newton_step(g, x, grad, gnorm, opts.max_halvings);
        if (!step.accepted) step = gradient_step(g, x, grad, opts.max_halvings);
        if (!step.accepted) {
            throw ConvergenceError("steady-state search stalled: no step reduces the energy or |grad g| (|grad g| = " +
                                       std::to_string(best_norm) + ")",
                                   best, best_norm);
        }
        x = std::move(step.x);
    }
    throw ConvergenceError("steady-state search did not converge in " + std::to_string(opts.max_iter) +
                               " iterations (best |grad g| = " + std::to_string(best_norm) + ")",
                           best, best_norm);
}

LinearModel linearize(const EnergyFunction& g, const SteadyState& steady, double temperature, double steady_tol) {
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw InvalidArgument("temperature must be >= 0");
    if (static_cast<std::size_t>(steady.point.size()) != g.dim) {
        throw InvalidArgument("steady state dimension does not match the energy");
    }
    const double gnorm = g.gradient(steady.point).norm();
    if (!(gnorm <= steady_tol)) {
        throw InvalidArgument("point is not a steady state: |grad g| = " + std::to_string(gnorm));
    }
    const Eigen::MatrixXd hess = g.hessian(steady.point);
    const double scale = std::max(1.0, hess.cwiseAbs().maxCoeff());
    if ((hess - hess.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidArgument("Hessian at the steady state is not symmetric");
    }
    LinearModel model = linear_model_from_matrix(-hess, temperature);
    model.steady = steady;
    return model;
}

LinearModel linear_model_from_matrix(const Eigen::MatrixXd& A, double temperature) {
    if (A.rows() != A.cols() || A.rows() == 0) throw InvalidArgument("drift matrix must be square and non-empty");
    LinearModel model;
    model.A = A;
    model.temperature = temperature;
    model.steady.point = Eigen::VectorXd::Zero(A.rows());
    if (A.rows() == 2) {
        model.closed_form = true;
        model.lambda = -model.b2() / 2.0;
        model.xi_paper = std::abs(model.a2() - model.b2() * model.b2() / 4.0);
        model.xi_sqrt = std::sqrt(model.xi_paper);
    }
    return model;
}

Eigen::MatrixXd expm_general(const Eigen::MatrixXd& A, double tau) {
    if (!std::isfinite(tau)) throw InvalidArgument("expm needs a finite tau");
    if (A.rows() != A.cols()) throw InvalidArgument("expm needs a square matrix");
    const Eigen::MatrixXd scaled = A * tau;
    return scaled.exp();
}

ClosedFormExpm expm_paper(const LinearModel& model, double tau, XiChoice xi) {
    require_closed_form(model);
    return expm_paper(model, tau, xi == XiChoice::paper ? model.xi_paper : model.xi_sqrt);
}

ClosedFormExpm expm_paper(const LinearModel& model, double tau, double xi) {
    require_closed_form(model);
    if (!(tau >= 0.0)) throw InvalidArgument("closed-form exponential needs tau >= 0");
    if (xi == 0.0) throw InvalidArgument("closed-form exponential is undefined for xi = 0");
    const double lam = model.lambda;
    const double s = std::sin(xi * tau);
    const double c = std::cos(xi * tau);
    Eigen::MatrixXd out(2, 2);
    out(0, 0) = xi * c + (lam + model.a1()) * s;  // A1
    out(0, 1) = model.b1() * s;                   // B1
    out(1, 0) = model.a2() * s;                   // A2
    out(1, 1) = xi * c + (lam + model.b2()) * s;  // B2
    // Divide before scaling so that tau = 0 yields the identity exactly.
    out /= xi;
    out *= std::exp(-lam * tau);
    const double dev = (out - expm_general(model.A, tau)).norm();
    return {std::move(out), dev};
}

LinearSolutionPath linear_solution(const LinearModel& model, std::span<const FbmPath> driving,
                                   const LinearSolutionOptions& opts) {
    const std::size_t d = model.dim();
    if (driving.size() != d) throw InvalidArgument("need one driving path per dimension");
    const TimeGrid grid = driving[0].grid;
    for (const auto& b : driving) {
        if (!(b.grid == grid) || b.values.size() != grid.nodes()) {
            throw InvalidArgument("driving paths do not share a grid");
        }
    }
    const auto di = static_cast<Eigen::Index>(d);
    const auto nodes = static_cast<Eigen::Index>(grid.nodes());
    const double amplitude = std::sqrt(2.0 * model.temperature);

    // B relative to its starting value, node-major.
    Eigen::MatrixXd b(di, nodes);
    for (Eigen::Index j = 0; j < di; ++j) {
        const auto& v = driving[static_cast<std::size_t>(j)].values;
        for (Eigen::Index n = 0; n < nodes; ++n) b(j, n) = v[static_cast<std::size_t>(n)] - v[0];
    }

    LinearSolutionPath out{grid, Eigen::MatrixXd::Zero(nodes, di), {}};
    for (const auto& p : driving) out.epsilon.push_back(p.epsilon);

    if (opts.mode == ExpmMode::general) {
        // Summation by parts of sum_{i<n} E^{n-i} (B_{i+1} - B_i) with B_0 = 0:
        //   left lag:  E B_n + (E - I) S_n,  S_{n+1} = E (S_n + B_n)
        //   right lag:   B_n + (E - I) S_n,  S_{n+1} = E S_n + B_n
        const Eigen::MatrixXd E = expm_general(model.A, grid.dt());
        const Eigen::MatrixXd EmI = E - Eigen::MatrixXd::Identity(di, di);
        Eigen::VectorXd S = Eigen::VectorXd::Zero(di);
        for (Eigen::Index n = 1; n < nodes; ++n) {
            const Eigen::VectorXd bn = b.col(n);
            Eigen::VectorXd u;
            if (opts.lag == LagConvention::left) {
                u = E * bn + EmI * S;
                S = E * (S + bn);
            } else {
                u = bn + EmI * S;
                S = E * S + bn;
            }
            out.values.row(n) = (amplitude * u).transpose();
        }
        return out;
    }

    if (d != 2) throw InvalidArgument("paper-mode exponential needs a 2x2 model");
    const double xi = opts.xi == XiChoice::paper ? model.xi_paper : model.xi_sqrt;
    std::vector<Eigen::Matrix2d> lag(static_cast<std::size_t>(nodes));
    for (std::size_t m = 0; m < lag.size(); ++m) lag[m] = expm_paper(model, grid.node(m), xi).value;
    const std::size_t shift = opts.lag == LagConvention::left ? 0 : 1;
    std::vector<Eigen::Vector2d> inc(static_cast<std::size_t>(nodes - 1));
    for (std::size_t i = 0; i < inc.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        inc[i] = b.col(ii + 1) - b.col(ii);
    }
    for (std::size_t n = 1; n < static_cast<std::size_t>(nodes); ++n) {
        Eigen::Vector2d acc = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < n; ++i) acc += lag[n - i - shift] * inc[i];
        out.values.row(static_cast<Eigen::Index>(n)) = (amplitude * acc).transpose();
    }
    return out;
}

StatePath reconstruct_state(const SteadyState& steady, const LinearSolutionPath& u) {
    if (steady.point.size() != u.values.cols()) throw InvalidArgument("steady state and solution dimensions differ");
    StatePath out{u.grid, u.values};
    out.values.rowwise() += steady.point.transpose();
    return out;
}

}  // namespace fanneal
