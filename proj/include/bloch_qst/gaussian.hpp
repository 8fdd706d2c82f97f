#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace bloch_qst {

/// Input packet A * sum_{|n - center| <= delta} exp(-beta (n - center)^2) |n>.
class TruncatedGaussianSpec {
public:
    TruncatedGaussianSpec(double beta, int delta, int center = 0) : beta_(beta), delta_(delta), center_(center) {
        if (!(beta > 0.0) || !std::isfinite(beta)) throw ChainError("Gaussian width beta must be positive");
        if (delta < 0) throw ChainError("truncation delta must be non-negative");
        double sum = 0.0;
        // symmetric accumulation from the edges inward keeps the sum exact to rounding
        for (int k = delta; k >= 1; --k) sum += 2.0 * std::exp(-2.0 * beta * k * k);
        sum += 1.0;
        normalization_ = 1.0 / std::sqrt(sum);
    }

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] int delta() const noexcept { return delta_; }
    [[nodiscard]] int center() const noexcept { return center_; }
    /// A = [sum_{n=-delta}^{delta} exp(-2 beta n^2)]^{-1/2}
    [[nodiscard]] double normalization() const noexcept { return normalization_; }
    [[nodiscard]] int support_first() const noexcept { return center_ - delta_; }
    [[nodiscard]] int support_last() const noexcept { return center_ + delta_; }

    /// Normalized amplitude at absolute site n (zero outside the support).
    [[nodiscard]] double amplitude(int site) const noexcept {
        const int offset = site - center_;
        if (offset < -delta_ || offset > delta_) return 0.0;
        return normalization_ * std::exp(-beta_ * offset * offset);
    }

private:
    double beta_;
    int delta_;
    int center_;
    double normalization_;
};

}  // namespace bloch_qst
