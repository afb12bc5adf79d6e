// Small shared helpers: compensated summation, hashing, numeric formatting.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace sscl {

// Kahan-Babuska compensated accumulator. Reductions over paths and nodes
// use this so results are insensitive to summation order at the 1e-12 level.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double ksum(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    int n = 0;
};

// Sample mean and standard error of the mean.
inline MeanStderr mean_stderr(std::span<const double> xs) {
    MeanStderr r;
    r.n = static_cast<int>(xs.size());
    if (r.n == 0) return r;
    r.mean = ksum(xs) / r.n;
    if (r.n < 2) return r;
    KahanSum var;
    for (double x : xs) var.add((x - r.mean) * (x - r.mean));
    r.stderr_ = std::sqrt(var.value() / (r.n - 1) / r.n);
    return r;
}

// FNV-1a, used for config hashes in run manifests.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Shortest round-trip decimal for doubles; locale-independent.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace sscl
