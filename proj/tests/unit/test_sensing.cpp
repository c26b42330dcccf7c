#include "sparsense/oracle.hpp"
#include "sparsense/sensing.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>
#include <set>

using namespace sparsense;
using Catch::Matchers::WithinAbs;

TEST_CASE("regressor rows are conjugated roots of unity") {
    const auto x0 = regressor_row(4, 0);
    for (const auto& v : x0) CHECK(v == cplx{1.0, 0.0});

    const auto x1 = regressor_row(4, 1);
    CHECK(x1[0] == cplx{1.0, 0.0});
    CHECK(x1[1] == cplx{0.0, -1.0});
    CHECK(x1[2] == cplx{-1.0, 0.0});
    CHECK(x1[3] == cplx{0.0, 1.0});
}

TEST_CASE("regressor entries have unit magnitude and match exp(-j 2 pi k n / N)") {
    for (std::size_t N : {2u, 3u, 7u, 8u, 33u, 64u}) {
        const RegressorTable table(N);
        for (std::size_t n = 0; n < N; ++n) {
            const auto x = table.row(n);
            for (std::size_t k = 0; k < N; ++k) {
                const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * n) / static_cast<double>(N);
                CHECK_THAT(std::abs(x[k]), WithinAbs(1.0, 1e-15));
                CHECK(std::abs(x[k] - std::polar(1.0, angle)) < 1e-12);
            }
        }
    }
}

TEST_CASE("second moment over a full period is the identity") {
    const std::size_t N = 8;
    double worst = 0.0;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
            cplx acc{};
            for (std::size_t n = 0; n < N; ++n) {
                const auto x = regressor_row(N, n);
                acc += x[a] * std::conj(x[b]);
            }
            worst = std::max(worst, std::abs(acc / 8.0 - (a == b ? cplx{1.0, 0.0} : cplx{})));
        }
    CHECK(worst < 1e-12);
    CHECK(oracle::second_moment_deviation(N) < 1e-12);
}

TEST_CASE("regressor rejects out-of-range index") {
    CHECK_THROWS_AS(regressor_row(4, 4), std::invalid_argument);
    CHECK_THROWS_AS(regressor_row(0, 0), std::invalid_argument);
}

TEST_CASE("full sampling selects every index") {
    const SensingConfig cfg{4, 4, RepeatedPass{1}, 99};
    CHECK(sample_indices(cfg, 0) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("index draws are deterministic, unique and sorted") {
    const SensingConfig cfg{1000, 200, Windowed{5}, 1234};
    const auto a = sample_indices(cfg, 3);
    CHECK(a == sample_indices(cfg, 3));
    CHECK(a.size() == 200);
    CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 200);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(a.back() < 1000);
    CHECK(a != sample_indices(cfg, 4));
}

TEST_CASE("each index is drawn with frequency M/N") {
    const SensingConfig cfg{1000, 200, Windowed{10000}, 77};
    std::vector<double> hits(1000, 0.0);
    for (std::size_t w = 0; w < 10000; ++w)
        for (auto i : sample_indices(cfg, w)) hits[i] += 1.0;
    for (double h : hits) CHECK_THAT(h / 10000.0, WithinAbs(0.2, 0.02));
}

TEST_CASE("sensing config validation") {
    CHECK_THROWS_AS((SensingConfig{4, 5, RepeatedPass{1}, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SensingConfig{4, 0, RepeatedPass{1}, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SensingConfig{4, 2, RepeatedPass{0}, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SensingConfig{4, 2, Windowed{0}, 0}).validate(), std::invalid_argument);
    CHECK_NOTHROW((SensingConfig{4, 4, Windowed{1}, 0}).validate());
}

namespace {

std::vector<MeasurementSample> drain(MeasurementStream& s) {
    std::vector<MeasurementSample> out;
    MeasurementSample m;
    while (s.next(m)) out.push_back(m);
    return out;
}

} // namespace

TEST_CASE("repeated passes replay the same samples") {
    SignalSource src{{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, {0.3}, 5};
    MeasurementStream stream({8, 3, RepeatedPass{2}, 11}, src);
    CHECK(stream.size() == 6);
    const auto s = drain(stream);
    REQUIRE(s.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s[i].index == s[i + 3].index);
        CHECK(s[i].y == s[i + 3].y); // noise is drawn once and replayed
        CHECK(s[i].x == s[i + 3].x);
        CHECK(s[i].y != cplx{static_cast<double>(s[i].index), 0.0});
    }
    for (std::size_t i = 0; i < 6; ++i) CHECK(s[i].n == i);
    CHECK(stream.done());
    MeasurementSample extra;
    CHECK_FALSE(stream.next(extra));
}

TEST_CASE("windowed stream draws fresh indices per window") {
    SignalSource src;
    src.samples.resize(2000);
    for (std::size_t i = 0; i < 2000; ++i) src.samples[i] = static_cast<double>(i);
    MeasurementStream stream({1000, 200, Windowed{2}, 3}, src);
    const auto s = drain(stream);
    REQUIRE(s.size() == 400);
    std::vector<std::size_t> first, second;
    for (std::size_t i = 0; i < 200; ++i) {
        first.push_back(s[i].index);
        second.push_back(s[200 + i].index);
        CHECK(s[i].window == 0);
        CHECK(s[200 + i].window == 1);
        // Window w reads samples [w N, (w+1) N).
        CHECK(s[200 + i].y.real() == 1000.0 + static_cast<double>(s[200 + i].index));
    }
    CHECK(first != second);
}

TEST_CASE("short source raises stream exhaustion") {
    SignalSource src{std::vector<double>(1999, 0.0), {}, 0};
    CHECK_THROWS_AS(MeasurementStream({1000, 200, Windowed{2}, 0}, src), StreamExhausted);
    SignalSource ok{std::vector<double>(1000, 0.0), {}, 0};
    CHECK_NOTHROW(MeasurementStream({1000, 200, RepeatedPass{5}, 0}, ok));
}
