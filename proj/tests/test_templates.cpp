#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lzn/rng.hpp"
#include "lzn/templates.hpp"

using namespace lzn;

TEST_CASE("bank holds five unit-norm templates of 15 taps") {
    TemplateBank bank(256, 2);
    REQUIRE(bank.size() == 5);
    for (std::size_t i = 0; i < bank.size(); ++i) {
        REQUIRE(bank[i].size() == 15);
        double e = 0.0;
        for (double v : bank[i]) e += v * v;
        CHECK(e == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("bank is symmetric: template(-s) is the reverse of template(s)") {
    TemplateBank bank(256, 2);
    for (int s = 0; s <= 2; ++s) {
        const auto& pos = bank[std::size_t(2 + s)];
        const auto& neg = bank[std::size_t(2 - s)];
        for (std::size_t n = 0; n < pos.size(); ++n)
            CHECK(pos[n] == Catch::Approx(neg[pos.size() - 1 - n]).margin(1e-12));
    }
}

TEST_CASE("an exact centered kernel scores ~1") {
    TemplateBank bank(256, 2);
    std::vector<double> z(256, 0.0);
    for (int n = -7; n <= 7; ++n)
        z[std::size_t((100 + n + 256) % 256)] = dirichlet_magnitude(double(-n), 256);
    CHECK(correlate_segment(z, 100, bank) >= 0.999);
}

TEST_CASE("an eighth-bin shifted kernel still scores >= 0.97") {
    TemplateBank bank(256, 2);
    for (double shift : {0.125, -0.125, 0.0625}) {
        std::vector<double> z(256, 0.0);
        for (int n = -7; n <= 7; ++n)
            z[std::size_t((100 + n + 256) % 256)] =
                dirichlet_magnitude(shift - double(n), 256);
        CHECK(correlate_segment(z, 100, bank) >= 0.97);
    }
}

TEST_CASE("flat Rayleigh noise scores below threshold most of the time") {
    TemplateBank bank(256, 2);
    auto rng = make_rng(21);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    int below = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> z(256);
        for (auto& v : z) v = std::hypot(gauss(rng), gauss(rng));
        if (correlate_segment(z, 100, bank) < 0.7) ++below;
    }
    CHECK(double(below) / trials >= 0.95);
}

TEST_CASE("score is scale invariant") {
    TemplateBank bank(128, 2);
    std::vector<double> z(128, 0.1);
    for (int n = -7; n <= 7; ++n)
        z[std::size_t((64 + n) % 128)] += dirichlet_magnitude(0.25 - n, 128);
    const double s1 = correlate_segment(z, 64, bank);
    for (auto& v : z) v *= 37.5;
    CHECK(correlate_segment(z, 64, bank) == Catch::Approx(s1).epsilon(1e-12));
}
