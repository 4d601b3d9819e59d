#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fanneal/energy.hpp"
#include "fanneal/fbm.hpp"
#include "fanneal/sde.hpp"

namespace fanneal {

struct SteadyState {
    Eigen::VectorXd point;
    double gradient_norm = 0.0;
    int iterations = 0;
};

/// Steady-state search gave up; carries the best iterate seen.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd best, double gradient_norm)
        : Error(what), best_(std::move(best)), gradient_norm_(gradient_norm) {}
    [[nodiscard]] const char* category() const noexcept override { return "convergence"; }
    [[nodiscard]] const Eigen::VectorXd& best() const noexcept { return best_; }
    [[nodiscard]] double gradient_norm() const noexcept { return gradient_norm_; }

private:
    Eigen::VectorXd best_;
    double gradient_norm_;
};

struct SteadyStateOptions {
    double tol = 1e-10;
    int max_iter = 100;
    int max_halvings = 30;
};

/// Newton iteration on grad g = 0. An indefinite Hessian is shifted by a
/// multiple of the identity until positive definite; a step is accepted at
/// the first halving that lowers g or |grad g|, with backtracking gradient
/// descent on g as the fallback. The search
/// therefore settles into the minimum whose descent basin contains x_init.
SteadyState find_steady_state(const EnergyFunction& g, const Eigen::VectorXd& x_init,
                              const SteadyStateOptions& opts = {});

/// Linearization dU = A U dt + sqrt(2T) dB around a steady state, with
/// A = -Hessian(g)(X*).
///
/// For d = 2 the closed-form parameters are filled in with the entry names
/// A = [[a1, b1], [a2, b2]]:
///   lambda   = -b2 / 2
///   xi_paper = |a2 - b2^2 / 4|
///   xi_sqrt  = sqrt(|a2 - b2^2 / 4|)
struct LinearModel {
    SteadyState steady;
    Eigen::MatrixXd A;
    double temperature = 0.0;
    bool closed_form = false;
    double lambda = 0.0;
    double xi_paper = 0.0;
    double xi_sqrt = 0.0;

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(A.rows()); }
    [[nodiscard]] double a1() const { return A(0, 0); }
    [[nodiscard]] double b1() const { return A(0, 1); }
    [[nodiscard]] double a2() const { return A(1, 0); }
    [[nodiscard]] double b2() const { return A(1, 1); }
};

/// Throws InvalidArgument if the steady state misses its tolerance or the
/// Hessian is not symmetric to 1e-10 relative.
LinearModel linearize(const EnergyFunction& g, const SteadyState& steady, double temperature,
                      double steady_tol = 1e-10);

/// Model built directly from a drift matrix (no energy), steady state at the origin.
LinearModel linear_model_from_matrix(const Eigen::MatrixXd& A, double temperature);

/// exp(A tau) by scaling and squaring with a Pade approximant.
Eigen::MatrixXd expm_general(const Eigen::MatrixXd& A, double tau);

enum class XiChoice { paper, sqrt };
enum class ExpmMode { general, paper };
/// Which lag weights increment i at node n: t_n - t_i (left) or t_n - t_{i+1} (right).
enum class LagConvention { left, right };

struct ClosedFormExpm {
    Eigen::MatrixXd value;
    /// Frobenius norm of (value - expm_general(A, tau)).
    double deviation = 0.0;
};

/// Trigonometric closed form
///   (e^{-lambda tau} / xi) [ (xi cos(xi tau) + lambda sin(xi tau)) I + A sin(xi tau) ]
/// evaluated entrywise. Requires a 2x2 model, tau >= 0 and xi != 0.
ClosedFormExpm expm_paper(const LinearModel& model, double tau, XiChoice xi = XiChoice::paper);
/// Same expression with an explicit frequency.
ClosedFormExpm expm_paper(const LinearModel& model, double tau, double xi);

struct LinearSolutionPath {
    TimeGrid grid;
    Eigen::MatrixXd values;
    std::vector<double> epsilon;
};

struct LinearSolutionOptions {
    ExpmMode mode = ExpmMode::general;
    XiChoice xi = XiChoice::paper;
    LagConvention lag = LagConvention::left;
};

/// U_{t_n} = sum_{i<n} e^{A (t_n - t_i)} sqrt(2T) (B_{i+1} - B_i).
///
/// General mode uses powers of E = exp(A dt) through an O(N) recursion on
/// the summed-by-parts form, so A = 0 reproduces sqrt(2T) B exactly. Paper
/// mode tabulates the closed form on the lag set and convolves in O(N^2).
LinearSolutionPath linear_solution(const LinearModel& model, std::span<const FbmPath> driving,
                                   const LinearSolutionOptions& opts = {});

/// X = X* + U row by row.
StatePath reconstruct_state(const SteadyState& steady, const LinearSolutionPath& u);

}  // namespace fanneal
