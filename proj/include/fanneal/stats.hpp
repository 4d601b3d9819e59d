#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fanneal {

/// Pairwise (cascade) summation with a fixed split order.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Sample mean and its standard error. For the mean, the delete-one
/// jackknife standard error coincides with s / sqrt(n), so that form is used.
inline MeanEstimate mean_with_error(std::span<const double> xs) {
    MeanEstimate out;
    out.count = xs.size();
    if (xs.empty()) return out;
    const double n = static_cast<double>(xs.size());
    out.mean = pairwise_sum(xs) / n;
    if (xs.size() < 2) return out;
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - out.mean;
        dev[i] = d * d;
    }
    const double var = pairwise_sum(dev) / (n - 1.0);
    out.std_error = std::sqrt(var / n);
    return out;
}

/// Batch-means standard error of the mean (contiguous batches, remainder
/// folded into the last batch).
inline MeanEstimate batch_means(std::span<const double> xs, std::size_t batches) {
    MeanEstimate out;
    out.count = xs.size();
    if (xs.empty()) return out;
    out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    if (batches < 2 || xs.size() < batches) return mean_with_error(xs);
    const std::size_t size = xs.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * size;
        const std::size_t hi = (b + 1 == batches) ? xs.size() : lo + size;
        means[b] = pairwise_sum(xs.subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
    }
    out.std_error = mean_with_error(means).std_error;
    return out;
}

}  // namespace fanneal
