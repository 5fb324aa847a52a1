#pragma once

// Preamble-peak template bank.  Each template is the magnitude of a Dirichlet
// kernel of width M sampled on K = 15 integer bins around the peak, with the
// peak itself shifted by s/(4·max(Nδ,Nf)) bins for s in {-2..2} to cover
// sub-grid misalignment.  Templates and extracted segments are unit-norm, so
// the correlation score is a cosine similarity in [0, 1].

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lzn {

/// |sin(πx)/(M·sin(πx/M))| with the removable singularity at integer
/// multiples of M handled; x in bins.
inline double dirichlet_magnitude(double x_bins, unsigned m) {
    const double r = std::remainder(x_bins, double(m));
    if (std::abs(r) < 1e-12) return 1.0;
    return std::abs(std::sin(M_PI * x_bins) / (m * std::sin(M_PI * x_bins / m)));
}

class TemplateBank {
public:
    /// Bank of 2*max_shift_steps+1 templates; the default covers residual
    /// misalignment up to a quarter bin (coarse stage), max_shift_steps = 1
    /// covers the eighth-bin residuals left after fine refinement.
    TemplateBank(unsigned m, unsigned grid_max, unsigned half_width = 7,
                 int max_shift_steps = 2)
        : half_width_(half_width) {
        if (grid_max < 1) throw std::invalid_argument("grid_max must be >= 1");
        const int k = int(half_width);
        for (int s = -max_shift_steps; s <= max_shift_steps; ++s) {
            const double shift = double(s) / (4.0 * grid_max);
            std::vector<double> t;
            t.reserve(2 * k + 1);
            double norm = 0.0;
            for (int n = -k; n <= k; ++n) {
                const double v = dirichlet_magnitude(shift - n, m);
                t.push_back(v);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (double& v : t) v /= norm;
            bank_.push_back(std::move(t));
        }
    }

    unsigned half_width() const { return half_width_; }
    std::size_t size() const { return bank_.size(); }
    const std::vector<double>& operator[](std::size_t i) const { return bank_[i]; }

    /// Best cosine similarity between the (normalized) segment and any
    /// template.  Zero-energy segments score 0.
    double best_score(const std::vector<double>& segment) const {
        double energy = 0.0;
        for (double v : segment) energy += v * v;
        if (energy <= 0.0) return 0.0;
        const double inv = 1.0 / std::sqrt(energy);
        double best = 0.0;
        for (const auto& t : bank_) {
            double acc = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) acc += segment[i] * t[i];
            best = std::max(best, acc * inv);
        }
        return best;
    }

private:
    unsigned half_width_;
    std::vector<std::vector<double>> bank_;
};

/// Extracts the K-bin circular segment of z centered on `bin` and scores it
/// against the bank.
inline double correlate_segment(const std::vector<double>& z, int bin,
                                const TemplateBank& bank) {
    const int m = int(z.size());
    const int k = int(bank.half_width());
    if (m < 2 * k + 1) throw std::invalid_argument("spectrum shorter than template");
    std::vector<double> seg;
    seg.reserve(2 * k + 1);
    for (int n = -k; n <= k; ++n) seg.push_back(z[std::size_t(((bin + n) % m + m) % m)]);
    return bank.best_score(seg);
}

} // namespace lzn
