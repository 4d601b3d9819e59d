#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fanneal/error.hpp"

namespace fanneal {

/// Hurst exponent H in (0, 1) together with the kernel exponent alpha = H - 1/2.
class HurstParam {
public:
    explicit HurstParam(double h) : h_(h), alpha_(h - 0.5) {
        if (!(h > 0.0 && h < 1.0)) {
            throw InvalidArgument("Hurst exponent must lie in (0, 1), got " + std::to_string(h));
        }
    }

    [[nodiscard]] double H() const noexcept { return h_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

    friend bool operator==(const HurstParam&, const HurstParam&) = default;

private:
    double h_;
    double alpha_;
};

/// Uniform time grid 0 = t_0 < t_1 < ... < t_N = t_end.
class TimeGrid {
public:
    TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_(n_steps) {
        if (!(t_end > 0.0) || !std::isfinite(t_end)) {
            throw InvalidArgument("time grid needs a positive finite t_end");
        }
        if (n_steps == 0) {
            throw InvalidArgument("time grid needs at least one step");
        }
    }

    [[nodiscard]] double t_end() const noexcept { return t_end_; }
    [[nodiscard]] std::size_t steps() const noexcept { return n_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return n_ + 1; }
    [[nodiscard]] double dt() const noexcept { return t_end_ / static_cast<double>(n_); }

    /// t_n, computed as t_end * n / N so that the last node is exactly t_end.
    [[nodiscard]] double node(std::size_t n) const noexcept {
        return t_end_ * static_cast<double>(n) / static_cast<double>(n_);
    }

    [[nodiscard]] std::vector<double> node_values() const {
        std::vector<double> out(nodes());
        for (std::size_t n = 0; n < out.size(); ++n) out[n] = node(n);
        return out;
    }

    /// Index of the node equal to t (relative tolerance 1e-12 of t_end).
    /// Throws InvalidArgument when t is not a grid node.
    [[nodiscard]] std::size_t index_of(double t) const {
        const double pos = t / dt();
        const double rounded = std::round(pos);
        if (!(rounded >= 0.0 && rounded <= static_cast<double>(n_)) ||
            std::abs(node(static_cast<std::size_t>(rounded)) - t) > 1e-12 * t_end_) {
            throw InvalidArgument("time " + std::to_string(t) + " is not a grid node");
        }
        return static_cast<std::size_t>(rounded);
    }

    /// Grid with `factor` times as many steps on the same horizon.
    [[nodiscard]] TimeGrid refined(std::size_t factor) const { return TimeGrid(t_end_, n_ * factor); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_end_;
    std::size_t n_;
};

}  // namespace fanneal
