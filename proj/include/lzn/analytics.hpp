#pragma once

// Detection-probability models: order statistics of the spectral
// intersection.  Noise bins are minima of L Rayleigh draws, the signal bin is
// the minimum of L Rician draws, and the success probability is
//   P(S) = ∫ [1 - e^{-L z²}]^{M-1} · f_Zm(z) dz
// with f_Zm the density of the Rician minimum (Marcum-Q tail to the power L).
// Monte Carlo twins for the single-user and two-user (Dirichlet interference)
// scenarios validate the models and cover the collision regime where the
// closed form is intractable.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "lzn/parallel.hpp"
#include "lzn/rng.hpp"
#include "lzn/spectral.hpp"

namespace lzn::model {

/// Exponentially scaled modified Bessel I0: e^{-x} I0(x), stable for large x.
inline double i0e(double x) {
    x = std::abs(x);
    if (x < 500.0) return std::exp(-x) * std::cyl_bessel_i(0.0, x);
    // asymptotic series, relative error < 1e-12 at x >= 500
    const double r = 1.0 / (8.0 * x);
    const double s = 1.0 + r * (1.0 + r * (4.5 + r * 37.5));
    return s / std::sqrt(2.0 * M_PI * x);
}

/// First-order Marcum Q: Q1(a,b) = P[Rician(ν=a, σ=1) > b], computed as the
/// Poisson mixture  Σ_k pois(k; a²/2) · P[Pois(b²/2) <= k].  Accurate to
/// ~1e-10 for a <= 34, b <= 36; beyond that (outside every use in this
/// project) a normal-tail asymptote takes over.
inline double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw std::domain_error("marcum_q1 needs a,b >= 0");
    if (b == 0.0) return 1.0;
    const double lambda = 0.5 * a * a;
    const double mu = 0.5 * b * b;
    if (lambda > 580.0 || mu > 650.0) {
        return 0.5 * std::erfc((b - a) / std::sqrt(2.0));
    }
    if (lambda == 0.0) return std::exp(-mu);

    const double sd = std::sqrt(lambda);
    const long k_lo = std::max(0L, long(std::floor(lambda - 40.0 * sd - 20.0)));
    const long k_hi = long(std::ceil(lambda + 40.0 * sd + 20.0));

    // Poisson(lambda) pmf at k_lo via logs, then forward recurrence.
    double logp = double(k_lo) * std::log(lambda) - lambda - std::lgamma(double(k_lo) + 1.0);
    double p = std::exp(logp);
    double q = boost::math::gamma_q(double(k_lo) + 1.0, mu); // P[Pois(mu) <= k_lo]
    double pois_mu = std::exp(double(k_lo) * std::log(mu) - mu -
                              std::lgamma(double(k_lo) + 1.0));
    double sum = p * q;
    for (long k = k_lo + 1; k <= k_hi; ++k) {
        p *= lambda / double(k);
        pois_mu *= mu / double(k);
        q += pois_mu; // P[Pois(mu) <= k]
        if (q > 1.0) q = 1.0;
        sum += p * q;
        if (p < 1e-18 && k > long(lambda)) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}

/// CDF of the minimum over L i.i.d. Rayleigh(σ² = 1/2) noise bins.
inline double noise_min_cdf(double z, unsigned L) {
    if (z < 0.0) return 0.0;
    return 1.0 - std::exp(-double(L) * z * z);
}

/// Density of the minimum over L i.i.d. Rician(ν = sqrt(M·Es), σ² = 1/2)
/// signal-bin draws: L·Q1(a, √2 z)^{L-1} · f_Rician(z).
inline double signal_min_pdf(double z, unsigned L, unsigned M, double Es) {
    if (z <= 0.0) return 0.0;
    const double nu = std::sqrt(double(M) * Es);
    const double a = std::sqrt(2.0) * nu;
    // Rician pdf with σ = 1/√2, scaled-Bessel form.
    const double d = z - nu;
    const double pdf = 2.0 * z * std::exp(-d * d) * i0e(2.0 * nu * z);
    if (L == 1) return pdf;
    const double tail = marcum_q1(a, std::sqrt(2.0) * z);
    return double(L) * std::pow(tail, double(L) - 1.0) * pdf;
}

namespace detail {

/// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

/// Analytical success probability of identifying the preamble peak after an
/// L-deep spectral intersection at the given SNR.
inline double single_user_success(double snr_db, unsigned sf, unsigned L) {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    const unsigned M = 1u << sf;
    const double Es = std::pow(10.0, snr_db / 10.0);
    const double nu = std::sqrt(double(M) * Es);
    const double hi = nu + 10.0;
    const auto integrand = [&](double z) {
        const double noise = std::pow(noise_min_cdf(z, L), double(M - 1));
        return noise <= 0.0 ? 0.0 : noise * signal_min_pdf(z, L, M, Es);
    };
    const double p = detail::integrate(integrand, 0.0, hi, 1e-6);
    return std::min(1.0, std::max(0.0, p));
}

/// SNR (dB) at which the model reaches the target probability; bisection on
/// the monotone curve.
inline double single_user_threshold(unsigned sf, unsigned L, double target = 0.99,
                                    double lo = -30.0, double hi = 0.0) {
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (single_user_success(mid, sf, L) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Monte Carlo twin of the model: L dechirped tone-plus-AWGN windows,
/// min-intersected, argmax compared against the tone bin.
inline double preamble_mc_detection(SpectralEngine& engine, double snr_db, unsigned sf,
                                    unsigned L, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const unsigned M = 1u << sf;
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    std::size_t hits = 0;
    std::vector<cplx> window(M);
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = make_rng(seed, t, 0x70726d63);
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
        std::vector<double> z;
        for (unsigned i = 0; i < L; ++i) {
            for (unsigned n = 0; n < M; ++n) {
                // dechirped preamble tone at bin 0 plus unit-variance noise
                window[n] = cplx{amp + gauss(rng), gauss(rng)};
            }
            std::vector<double> mag = magnitudes(engine.dft_full(window));
            for (auto& v : mag) v /= std::sqrt(double(M));
            z = i == 0 ? std::move(mag) : spectral_intersection({z, mag});
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < z.size(); ++k)
            if (z[k] > z[best]) best = k;
        if (best == 0) ++hits;
    }
    return double(hits) / double(trials);
}

enum class TwoUserMode { model, preamble };

/// Two-user collision Monte Carlo.  `model` draws independent interference
/// per window (two clipped complex exponentials with random phases, offsets
/// and split point, exactly the spectrum model); `preamble` simulates a
/// contiguous interferer symbol stream across the L windows so adjacent
/// windows share boundary symbols.
///
/// SIR normalization: the two interference segments inside a window share the
/// interference power budget E_i (per-segment per-sample power E_i/2).
inline double two_user_success_mc(SpectralEngine& engine, double sir_db, unsigned sf,
                                  unsigned L, std::size_t trials, std::uint64_t seed,
                                  TwoUserMode mode = TwoUserMode::model) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const unsigned M = 1u << sf;
    const double Es = 1.0;
    const double Ei = Es * std::pow(10.0, -sir_db / 10.0);
    const double As = std::sqrt(Es); // desired tone amplitude per sample
    const double Ai = std::sqrt(Ei / 2.0);

    std::size_t hits = 0;
    std::vector<cplx> window(M);
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = make_rng(seed, t, 0x32757372);
        std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
        std::uniform_real_distribution<double> ubin(0.0, double(M));
        std::uniform_int_distribution<unsigned> usplit(0, M);

        std::vector<double> z;
        double stream_offset = 0.0, w1 = 0.0, w2 = 0.0, ph1 = 0.0, ph2 = 0.0;
        unsigned boundary = 0;
        if (mode == TwoUserMode::preamble) {
            boundary = usplit(rng) % M; // interferer symbol boundary inside each window
            w1 = ubin(rng);
            ph1 = uphase(rng);
            w2 = w1;
            ph2 = ph1;
            stream_offset = 0.0;
        }
        for (unsigned i = 0; i < L; ++i) {
            if (mode == TwoUserMode::model) {
                const unsigned split = usplit(rng);
                const double f1 = ubin(rng), f2 = ubin(rng);
                const double p1 = uphase(rng), p2 = uphase(rng);
                for (unsigned n = 0; n < M; ++n) {
                    const double df = n < split ? f1 : f2;
                    const double ph = n < split ? p1 : p2;
                    const double arg = ph + 2.0 * M_PI * df * n / M;
                    window[n] = cplx{As, 0.0} * std::polar(1.0, 2.0 * M_PI * 0.0) +
                                Ai * std::polar(1.0, arg);
                }
            } else {
                // contiguous stream: a new interferer symbol starts at
                // `boundary` inside every window
                for (unsigned n = 0; n < M; ++n) {
                    if (n == boundary) {
                        w2 = ubin(rng);
                        ph2 = uphase(rng);
                    }
                    const bool before = n < boundary;
                    const double df = before ? w1 : w2;
                    const double ph = before ? ph1 : ph2;
                    const double arg = ph + 2.0 * M_PI * df * (stream_offset + n) / M;
                    window[n] = cplx{As, 0.0} + Ai * std::polar(1.0, arg);
                }
                w1 = w2;
                ph1 = ph2;
                stream_offset += M;
            }
            std::vector<double> mag = magnitudes(engine.dft_full(window));
            z = i == 0 ? std::move(mag) : spectral_intersection({z, mag});
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < z.size(); ++k)
            if (z[k] > z[best]) best = k;
        if (best == 0) ++hits;
    }
    return double(hits) / double(trials);
}

/// Worst-case SNR below which an opposite-slope interferer can mask the
/// preamble peak: 10·log10((2√2)²/M).
inline double opposite_chirp_threshold(unsigned sf) {
    if (sf < 7 || sf > 12) throw std::domain_error("sf out of range");
    const double M = double(1u << sf);
    return 10.0 * std::log10(8.0 / M);
}

/// Monte Carlo 99%-threshold search: coarse scan then refinement, linear
/// interpolation of the crossing.
inline double mc_threshold(const std::function<double(double)>& prob_at, double lo,
                           double hi, double step, double target = 0.99) {
    double prev_x = lo, prev_p = prob_at(lo);
    if (prev_p >= target) return lo;
    for (double x = lo + step; x <= hi + 1e-9; x += step) {
        const double p = prob_at(x);
        if (p >= target) {
            const double f = (target - prev_p) / std::max(1e-12, p - prev_p);
            return prev_x + f * (x - prev_x);
        }
        prev_x = x;
        prev_p = p;
    }
    return hi;
}

} // namespace lzn::model
