// Deterministic covariance and variance oracles for the Liouville kernel.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fanneal/fbm.hpp"

namespace fanneal {

namespace {

/// Integrates f over [a, b] split at the given interior breakpoints. Each
/// piece uses tanh-sinh, which clusters nodes at both ends and therefore
/// copes with integrable endpoint singularities.
template <class F>
double integrate_pieces(const F& f, std::vector<double> cuts, const QuadratureOptions& opts) {
    // integrate() is non-const in this Boost and grows its tables lazily, so
    // each thread keeps its own rule.
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0.0;
    double err_total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        double err = 0.0;
        double l1 = 0.0;
        total += rule.integrate(f, cuts[p], cuts[p + 1], opts.rel_tol * 1e-2, &err, &l1);
        err_total += err * l1;
    }
    if (!(err_total <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)))) {
        throw Error("quadrature did not reach the requested tolerance (error estimate " +
                    std::to_string(err_total) + ")");
    }
    return total;
}

/// Breakpoints 0, eps, 4 eps, 16 eps, ... , upper: resolves the boundary
/// layer of width eps near the kernel singularity.
std::vector<double> layer_cuts(double upper, double scale) {
    std::vector<double> cuts{0.0, upper};
    if (scale > 0.0) {
        for (double c = scale; c < upper; c *= 4.0) cuts.push_back(c);
    }
    return cuts;
}

}  // namespace

double liouville_covariance(double t, double s, const HurstParam& hurst, double epsilon,
                            const QuadratureOptions& opts) {
    if (!(t >= 0.0) || !(s >= 0.0)) throw InvalidArgument("covariance needs t, s >= 0");
    if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
    const double m = std::min(t, s);
    if (m == 0.0) return 0.0;
    const double a = hurst.alpha();
    if (a == 0.0) return m;
    // w = m - u runs over [0, m]; the singular factor sits at w = 0.
    const double dt_ = t - m;
    const double ds_ = s - m;
    if (epsilon == 0.0 && a < 0.0) {
        // w = v^p with p = 1/(1 + 2a) absorbs the w^(2a) singularity. One of
        // the offsets is zero, so its factor w^a folds into the Jacobian
        // power and the integrand stays finite at v = 0.
        const double p = 1.0 / (1.0 + 2.0 * a);
        const double off = dt_ + ds_;
        const auto f = [=](double v) {
            if (off == 0.0) return p * std::pow(v, p * (1.0 + 2.0 * a) - 1.0);
            return p * std::pow(v, p * (1.0 + a) - 1.0) * std::pow(off + std::pow(v, p), a);
        };
        return integrate_pieces(f, {0.0, std::pow(m, 1.0 / p)}, opts);
    }
    const auto f = [=](double w) { return std::pow(dt_ + w + epsilon, a) * std::pow(ds_ + w + epsilon, a); };
    return integrate_pieces(f, layer_cuts(m, epsilon), opts);
}

double eps_diff_variance(double t, const HurstParam& hurst, double epsilon, const QuadratureOptions& opts) {
    if (!(t > 0.0)) throw InvalidArgument("eps_diff_variance needs t > 0");
    if (!(epsilon > 0.0)) throw InvalidArgument("eps_diff_variance needs epsilon > 0");
    const double a = hurst.alpha();
    if (a == 0.0) return 0.0;
    // (u + eps)^a - u^a = u^a expm1(a log1p(eps / u)), free of cancellation
    // for u >= eps; below that the direct difference is well conditioned.
    const auto diff = [=](double u) {
        if (u < epsilon) return std::pow(u + epsilon, a) - std::pow(u, a);
        return std::pow(u, a) * std::expm1(a * std::log1p(epsilon / u));
    };
    if (a < 0.0) {
        // u = v^p, p = 1/(1 + 2a), removes the u^(2a) endpoint singularity:
        // diff(u)^2 p v^(p-1) = p r(u)^2 with r = (1 + eps/u)^a - 1.
        const double p = 1.0 / (1.0 + 2.0 * a);
        const auto f = [=](double v) {
            const double r = std::expm1(a * std::log1p(epsilon / std::pow(v, p)));
            return p * r * r;
        };
        auto cuts = layer_cuts(t, epsilon);
        for (auto& c : cuts) c = std::pow(c, 1.0 / p);
        return integrate_pieces(f, cuts, opts);
    }
    const auto f = [=](double u) {
        const double d = diff(u);
        return d * d;
    };
    return integrate_pieces(f, layer_cuts(t, epsilon), opts);
}

}  // namespace fanneal
