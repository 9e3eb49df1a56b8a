#pragma once

// Small statistics utilities shared by the experiment runners.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace involab {

// one-sample Kolmogorov-Smirnov distance against a continuous cdf;
// values must be sorted ascending
inline double ks_distance(const std::vector<double>& sorted_values,
                          const std::function<double(double)>& cdf) {
    if (sorted_values.empty()) throw std::invalid_argument("ks_distance: no samples");
    const auto N = static_cast<double>(sorted_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_values.size(); ++i) {
        const double F = cdf(sorted_values[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / N - F);
        d = std::max(d, F - static_cast<double>(i) / N);
    }
    return d;
}

// empirical P(X <= x) in a sorted sample
inline double empirical_cdf(const std::vector<double>& sorted_values, double x) {
    const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
    return static_cast<double>(it - sorted_values.begin()) /
           static_cast<double>(sorted_values.size());
}

struct MeanVar {
    std::int64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    void add(double x) {
        ++count;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const MeanVar& o) {
        count += o.count;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return sum / static_cast<double>(count); }
    double variance() const {
        const double m = mean();
        return sum_sq / static_cast<double>(count) - m * m;
    }
    double standard_error() const { return std::sqrt(variance() / static_cast<double>(count)); }
};

}  // namespace involab
