#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lzn/peaks.hpp"
#include "lzn/rng.hpp"
#include "lzn/templates.hpp"

using namespace lzn;

namespace {

std::vector<double> rayleigh_spectrum(std::size_t m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<double> z(m);
    for (auto& v : z) v = std::hypot(gauss(rng), gauss(rng));
    return z;
}

} // namespace

TEST_CASE("median handles odd and even lengths") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("all-zero spectrum is never prominent") {
    CHECK_FALSE(is_prominent(std::vector<double>(64, 0.0), 5.0));
}

TEST_CASE("pure-noise windows rarely pass the rho gate") {
    auto rng = make_rng(7);
    int passes = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t)
        if (is_prominent(rayleigh_spectrum(256, rng), 5.0)) ++passes;
    CHECK(double(passes) / trials <= 0.01);
}

TEST_CASE("intersected preamble at -12 dB passes the gate") {
    // min over L=7 windows, SF8-sized spectrum, tone in bin 0
    auto rng = make_rng(8);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    const double nu = std::sqrt(256.0 * std::pow(10.0, -1.2));
    int passes = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> z(256, 1e30);
        for (int l = 0; l < 7; ++l)
            for (int k = 0; k < 256; ++k) {
                const double re = (k == 0 ? nu : 0.0) + gauss(rng);
                const double im = gauss(rng);
                z[k] = std::min(z[k], std::hypot(re, im));
            }
        if (is_prominent(z, 5.0)) ++passes;
    }
    CHECK(double(passes) / trials >= 0.99);
}

TEST_CASE("modified z-score flags the single spike") {
    const auto mask = modified_zscore_outliers({1, 1, 1, 1, 10}, 3.5);
    CHECK(mask == std::vector<bool>{false, false, false, false, true});
}

TEST_CASE("constant vector has no outliers") {
    const auto mask = modified_zscore_outliers(std::vector<double>(8, 3.0), 3.5);
    for (bool b : mask) CHECK_FALSE(b);
}

TEST_CASE("gaussian samples are flagged at most ~1%") {
    auto rng = make_rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(1000);
    for (auto& x : v) x = gauss(rng);
    const auto mask = modified_zscore_outliers(v, 3.5);
    int flagged = 0;
    for (bool b : mask) flagged += b;
    CHECK(double(flagged) / v.size() <= 0.01);
}

TEST_CASE("a injected Dirichlet peak in noise is detected alone") {
    GridConfig cfg;
    auto rng = make_rng(10);
    auto z = rayleigh_spectrum(256, rng);
    const double med = median(std::vector<double>(z));
    // peak ~10 dB over the median, with its kernel shape
    for (int n = -3; n <= 3; ++n)
        z[(100 + n + 256) % 256] += 3.16 * med * 256 * dirichlet_magnitude(double(-n), 256);
    const auto peaks = detect_peaks(z, cfg);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].bin == 100);
}

TEST_CASE("pure noise yields no peaks in >=99% of windows") {
    GridConfig cfg;
    auto rng = make_rng(11);
    int empty = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t)
        if (detect_peaks(rayleigh_spectrum(256, rng), cfg).empty()) ++empty;
    CHECK(double(empty) / trials >= 0.99);
}

TEST_CASE("two distant equal peaks are both returned") {
    GridConfig cfg;
    auto rng = make_rng(12);
    auto z = rayleigh_spectrum(256, rng);
    const double med = median(std::vector<double>(z));
    z[40] = 20.0 * med;
    z[70] = 20.0 * med;
    const auto peaks = detect_peaks(z, cfg);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].bin == 40);
    CHECK(peaks[1].bin == 70);
}

TEST_CASE("consolidate keeps the argmax grid point per bin") {
    std::vector<Peak> cands{{5, 1.0, 0.0, 0.0},
                            {5, 3.0, 0.25, 0.0},
                            {5, 2.0, 0.0, 0.25},
                            {9, 1.5, 0.25, 0.25}};
    const auto out = consolidate(cands);
    REQUIRE(out.size() == 2);
    CHECK(out[0].bin == 5);
    CHECK(out[0].magnitude == 3.0);
    CHECK(out[0].delta == 0.25);
    CHECK(out[1].bin == 9);
}

TEST_CASE("consolidate breaks magnitude ties toward the smallest grid point") {
    std::vector<Peak> cands{{5, 2.0, 0.25, 0.25}, {5, 2.0, 0.0, 0.25}, {5, 2.0, 0.0, 0.0}};
    const auto out = consolidate(cands);
    REQUIRE(out.size() == 1);
    CHECK(out[0].delta == 0.0);
    CHECK(out[0].freq == 0.0);
}

TEST_CASE("NMS removes sidelobes one bin away") {
    std::vector<Peak> peaks{{100, 10.0, 0, 0}, {101, 4.0, 0, 0}};
    const auto out = nms(peaks, 256);
    REQUIRE(out.size() == 1);
    CHECK(out[0].bin == 100);
}

TEST_CASE("NMS keeps peaks five bins apart") {
    std::vector<Peak> peaks{{100, 10.0, 0, 0}, {105, 9.0, 0, 0}};
    CHECK(nms(peaks, 256).size() == 2);
}

TEST_CASE("NMS breaks plateau ties toward the lower bin, circularly") {
    std::vector<Peak> peaks{{0, 5.0, 0, 0}, {255, 5.0, 0, 0}};
    const auto out = nms(peaks, 256);
    REQUIRE(out.size() == 1);
    CHECK(out[0].bin == 0);
}
