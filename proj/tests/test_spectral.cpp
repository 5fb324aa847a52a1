#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lzn/rng.hpp"
#include "lzn/spectral.hpp"

using namespace lzn;

namespace {

std::vector<cplx> random_window(std::size_t n, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> w(n);
    for (auto& v : w) v = cplx{gauss(rng), gauss(rng)};
    return w;
}

/// Test oracle: direct O(M^2) DFT, independent of the FFT path.
std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            out[k] += x[i] * std::polar(1.0, -2.0 * M_PI * double(k) * double(i) / double(n));
    return out;
}

std::vector<cplx> tone(std::size_t n, double bin) {
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::polar(1.0, 2.0 * M_PI * bin * double(i) / double(n));
    return x;
}

} // namespace

TEST_CASE("full DFT of a pure tone concentrates at its bin") {
    SpectralEngine engine;
    const std::size_t m = 256;
    const auto spec = engine.dft_full(tone(m, 3.0));
    CHECK(std::abs(spec[3]) == Catch::Approx(double(m)).margin(1e-9));
    for (std::size_t k = 0; k < m; ++k)
        if (k != 3) CHECK(std::abs(spec[k]) < 1e-7);
    CHECK(engine.counter().full_ffts == 1);
}

TEST_CASE("full DFT of zeros is zero") {
    SpectralEngine engine;
    const auto spec = engine.dft_full(std::vector<cplx>(64, cplx{0.0, 0.0}));
    for (const auto& v : spec) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("full DFT matches the naive oracle") {
    SpectralEngine engine;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto w = random_window(128, seed);
        const auto fast = engine.dft_full(w);
        const auto slow = naive_dft(w);
        for (std::size_t k = 0; k < w.size(); ++k)
            CHECK(std::abs(fast[k] - slow[k]) <= 1e-9 * std::abs(slow[k]) + 1e-9);
    }
}

TEST_CASE("Parseval holds on random windows") {
    SpectralEngine engine;
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const auto w = random_window(256, seed);
        double time_e = 0.0;
        for (const auto& v : w) time_e += std::norm(v);
        const auto spec = engine.dft_full(w);
        double freq_e = 0.0;
        for (const auto& v : spec) freq_e += std::norm(v);
        CHECK(freq_e / double(w.size()) == Catch::Approx(time_e).epsilon(1e-9));
    }
}

TEST_CASE("restricted bins equal the full DFT") {
    SpectralEngine engine;
    std::vector<int> bins{-5, -2, -1, 0, 1, 2, 7, 100, -90};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto w = random_window(256, 1000 + seed);
        const auto full = engine.dft_full(w);
        const auto sparse = engine.dft_bins(w, bins);
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const int k = ((bins[i] % 256) + 256) % 256;
            CHECK(std::abs(sparse[i] - full[k]) <=
                  1e-6 * std::abs(full[k]) + 1e-8);
        }
    }
    CHECK(engine.counter().sparse_bin_evals == 100 * bins.size());
}

TEST_CASE("restricted bins find a small tone peak") {
    SpectralEngine engine;
    const auto sparse = engine.dft_bins(tone(256, 1.0), {-2, -1, 0, 1, 2});
    std::size_t best = 0;
    for (std::size_t i = 1; i < sparse.size(); ++i)
        if (std::abs(sparse[i]) > std::abs(sparse[best])) best = i;
    CHECK(best == 3); // bin +1
}

TEST_CASE("empty bin set yields empty result") {
    SpectralEngine engine;
    CHECK(engine.dft_bins(random_window(64, 5), {}).empty());
}

TEST_CASE("zoomed spectrum localizes a fractional tone") {
    SpectralEngine engine;
    const auto points = engine.zoom_dft(tone(256, 3.375), 3.0, 2.0, 8);
    REQUIRE(points.size() == 33);
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (std::abs(points[i].value) > std::abs(points[best].value)) best = i;
    CHECK(points[best].bin == Catch::Approx(3.375));
    CHECK(engine.counter().zoom_ffts == 1);
}

TEST_CASE("zoom at integer offsets equals full DFT bins") {
    SpectralEngine engine;
    const auto w = random_window(128, 77);
    const auto full = engine.dft_full(w);
    const auto points = engine.zoom_dft(w, 0.0, 3.0, 1);
    for (const auto& p : points) {
        const int k = ((int(std::lround(p.bin)) % 128) + 128) % 128;
        CHECK(std::abs(p.value - full[k]) <= 1e-6 * std::abs(full[k]) + 1e-8);
    }
}

TEST_CASE("zoom with resolution 1 matches restricted bins") {
    SpectralEngine engine;
    const auto w = random_window(64, 99);
    const auto points = engine.zoom_dft(w, 0.0, 2.0, 1);
    const auto sparse = engine.dft_bins(w, {-2, -1, 0, 1, 2});
    REQUIRE(points.size() == sparse.size());
    for (std::size_t i = 0; i < sparse.size(); ++i)
        CHECK(std::abs(points[i].value - sparse[i]) <= 1e-6 * std::abs(sparse[i]) + 1e-8);
}

TEST_CASE("frequency shift moves a tone and preserves energy") {
    const auto x = tone(128, 5.0);
    const auto shifted = freq_shift(x, 1.0);
    SpectralEngine engine;
    const auto spec = engine.dft_full(shifted);
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.size(); ++k)
        if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
    CHECK(best == 4);

    double e0 = 0.0, e1 = 0.0;
    for (const auto& v : x) e0 += std::norm(v);
    for (const auto& v : shifted) e1 += std::norm(v);
    CHECK(e1 == Catch::Approx(e0).epsilon(1e-12));
}

TEST_CASE("shift by f then -f is the identity") {
    const auto x = random_window(64, 3);
    const auto back = freq_shift(freq_shift(x, 0.37), -0.37);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(back[i] - x[i]) < 1e-12);
}

TEST_CASE("shift by zero is the identity") {
    const auto x = random_window(32, 4);
    const auto y = freq_shift(x, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == y[i]);
}

TEST_CASE("spectral intersection is an element-wise lower bound") {
    auto rng = make_rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows(5, std::vector<double>(64));
    for (auto& r : rows)
        for (auto& v : r) v = u(rng);
    const auto z = spectral_intersection(rows);
    for (const auto& r : rows)
        for (std::size_t k = 0; k < r.size(); ++k) CHECK(z[k] <= r[k]);

    auto shuffled = rows;
    std::swap(shuffled[0], shuffled[3]);
    CHECK(spectral_intersection(shuffled) == z);
}

TEST_CASE("counters merge by summation") {
    FftCounter a, b;
    a.full_ffts = 3;
    a.sparse_bin_evals = 10;
    b.full_ffts = 2;
    b.zoom_ffts = 1;
    a.merge(b);
    CHECK(a.full_ffts == 5);
    CHECK(a.sparse_bin_evals == 10);
    CHECK(a.zoom_ffts == 1);
    CHECK(a.full_fft_equivalents(100) == Catch::Approx(6.1));
}
