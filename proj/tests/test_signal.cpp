#include <catch2/catch_amalgamated.hpp>

#include <spikeforge/rng.hpp>
#include <spikeforge/signal.hpp>

#include "reference.hpp"

using namespace spikeforge;
using Catch::Approx;

TEST_CASE("median of odd and even length sequences") {
    CHECK(median(std::vector<double>{5.0}) == 5.0);
    CHECK(median(std::vector<double>{3.0, 1.0, 2.0}) == 2.0);
    CHECK(median(std::vector<double>{1.0, 2.0, 3.0, 4.0}) == 2.5);
}

TEST_CASE("median rejects empty input") {
    CHECK_THROWS_WITH(median(std::vector<double>{}), "empty sequence");
}

TEST_CASE("median equals a sorted-copy reference on random sequences") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_below(100));
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform(-50.0, 50.0);
        CHECK(median(values) == reference::sorted_median(values));
    }
}

TEST_CASE("mad of a constant sequence is zero") {
    CHECK(mad(std::vector<double>{7.0, 7.0, 7.0, 7.0}) == 0.0);
}

TEST_CASE("mad hand example") {
    // median 3, abs devs {2,1,0,1,2}, their median 1, scaled by 1/0.6745
    CHECK(mad(std::vector<double>{1, 2, 3, 4, 5}) == Approx(1.0 / 0.6745).epsilon(1e-12));
}

TEST_CASE("mad rejects empty input") {
    CHECK_THROWS_WITH(mad(std::vector<double>{}), "empty sequence");
}

TEST_CASE("scaled mad estimates the sd of gaussian noise") {
    Rng rng(7);
    std::vector<double> x(1'000'000);
    for (double& v : x) v = rng.gaussian();
    CHECK(mad(x) == Approx(1.0).margin(0.01));
}

TEST_CASE("mad tracks sd within 2 percent on long gaussian sequences") {
    Rng rng(11);
    std::vector<double> x(100'000);
    for (double& v : x) v = rng.gaussian();
    CHECK(std::abs(mad(x) / sd(x) - 1.0) < 0.02);
}

TEST_CASE("mad is translation invariant and absolutely homogeneous") {
    Rng rng(13);
    std::vector<double> x(501);
    for (double& v : x) v = rng.uniform(-5.0, 5.0);
    const double base = mad(x);

    std::vector<double> shifted = x;
    for (double& v : shifted) v += 123.25;  // dyadic shift keeps arithmetic exact
    CHECK(mad(shifted) == Approx(base).margin(1e-12));

    std::vector<double> scaled = x;
    for (double& v : scaled) v *= -4.0;
    CHECK(mad(scaled) == Approx(4.0 * base).epsilon(1e-12));
}

TEST_CASE("renormalize drives the scaled mad to one") {
    Rng rng(17);
    Recording rec;
    rec.id = "r";
    rec.samples.resize(4096);
    for (double& v : rec.samples) v = 3.5 * rng.gaussian();
    const Recording out = renormalize(rec);
    CHECK(mad(out.samples) == Approx(1.0).epsilon(1e-9));
    CHECK(out.id == rec.id);
    CHECK(out.sample_rate_hz == rec.sample_rate_hz);
}

TEST_CASE("renormalize hand example divides by the scaled mad") {
    Recording rec;
    rec.samples = {2, 4, 6, 8, 10};
    const double scale = reference::scaled_mad(rec.samples);
    const Recording out = renormalize(rec);
    for (std::size_t i = 0; i < rec.samples.size(); ++i)
        CHECK(out.samples[i] == rec.samples[i] / scale);
}

TEST_CASE("renormalize leaves unit-mad samples unchanged") {
    // abs devs from median 0 are {1,0,1}; mad = 0.6745/0.6745 = 1
    Recording rec;
    rec.samples = {-0.6745, 0.0, 0.6745};
    const Recording out = renormalize(rec);
    for (std::size_t i = 0; i < rec.samples.size(); ++i)
        CHECK(out.samples[i] == Approx(rec.samples[i]).margin(1e-15));
}

TEST_CASE("renormalize rejects a constant signal") {
    Recording rec;
    rec.samples.assign(100, 2.5);
    CHECK_THROWS_WITH(renormalize(rec), "degenerate signal: zero MAD");
}

TEST_CASE("box filter width one is the identity") {
    const std::vector<double> x{4.0, -1.0, 0.5};
    CHECK(box_filter(x, 1) == x);
}

TEST_CASE("box filter shrinks its window at the edges") {
    const std::vector<double> out = box_filter(std::vector<double>{0.0, 3.0, 0.0}, 3);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == 1.5);
    CHECK(out[1] == 1.0);
    CHECK(out[2] == 1.5);
}

TEST_CASE("box filter preserves constant signals exactly") {
    const std::vector<double> x{1.0, 1.0, 1.0, 1.0};
    CHECK(box_filter(x, 3) == x);
}

TEST_CASE("box filter rejects even widths") {
    CHECK_THROWS_WITH(box_filter(std::vector<double>{1.0, 2.0}, 2),
                      "box filter width must be odd");
}

TEST_CASE("box filter output stays within the input range") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_below(200));
        std::vector<double> x(n);
        for (double& v : x) v = rng.uniform(-10.0, 10.0);
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        const std::size_t width = 1 + 2 * static_cast<std::size_t>(rng.next_below(6));
        for (double v : box_filter(x, width)) {
            CHECK(v >= *lo);
            CHECK(v <= *hi);
        }
    }
}

TEST_CASE("rectify takes elementwise absolute values") {
    CHECK(rectify(std::vector<double>{-1.0, 2.0, -3.0}) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(rectify(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("rectify is idempotent") {
    Rng rng(29);
    std::vector<double> x(300);
    for (double& v : x) v = rng.uniform(-4.0, 4.0);
    const std::vector<double> once = rectify(x);
    CHECK(rectify(once) == once);
}

TEST_CASE("signal stats agree on a constant signal") {
    const std::vector<double> x(10, 3.0);
    const SignalStats s = signal_stats(x);
    CHECK(s.median == 3.0);
    CHECK(s.mad == 0.0);
    CHECK(s.sd == 0.0);
}
