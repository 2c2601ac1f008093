#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "elmfs/impairments.hpp"
#include "elmfs/sync_metric.hpp"

#include <algorithm>
#include <cmath>

using namespace elmfs;

namespace {

// S with column j holding s shifted down by j rows, truncated at M rows.
CMatrix shift_matrix(const CVector& s, Eigen::Index m) {
    const Eigen::Index n = s.size();
    CMatrix out = CMatrix::Zero(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n && i + j < m; ++i) out(i + j, j) = s[i];
    return out;
}

CVector clean_received(const CVector& x, int tau) {
    Rng unused(0);
    return transmit(x, tau, ChannelRealization{CVector::Ones(1), 0.0}, NoiseModel{0.0}, unused);
}

} // namespace

TEST_CASE("correlation_metric: zero input and toy case") {
    const auto s = zadoff_chu(8, 1);
    const auto g = correlation_metric(CVector::Zero(16), s);
    REQUIRE(g.size() == 8);
    CHECK(g.values.norm() == 0.0);
    CHECK_FALSE(g.normalized);

    TrainingSequence ones{CVector::Ones(2), 1};
    CVector y(4);
    y << 1.0, 1.0, 0.0, 0.0;
    const auto toy = correlation_metric(y, ones);
    REQUIRE(toy.size() == 2);
    CHECK(toy.values[0] == doctest::Approx(4.0));
    CHECK(toy.values[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(correlation_metric(CVector::Zero(4), s), std::invalid_argument);
}

TEST_CASE("correlation_metric: clean peak sits at the offset for every offset") {
    for (int n : {8, 16, 64}) {
        const auto s = zadoff_chu(n, 1);
        for (int tau = 0; tau <= n; ++tau) {
            const auto g = correlation_metric(clean_received(s.samples, tau), s);
            int best = 0;
            for (int j = 1; j < n; ++j)
                if (g.values[j] > g.values[best]) best = j;
            if (tau < n) {
                CHECK(best == tau);
                CHECK(peak_index(g.values) == tau);
            }
        }
    }
}

TEST_CASE("correlation_metric: equals the explicit matrix form") {
    Rng rng = Rng::stream(31, StreamTag::Test);
    for (int n = 1; n <= 8; ++n) {
        const auto s = zadoff_chu(n, 1);
        CVector y(2 * n);
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.complex_normal(1.0);
        const RVector expected = (shift_matrix(s.samples, y.size()).adjoint() * y).cwiseAbs2();
        const auto g = correlation_metric(y, s);
        CHECK((g.values - expected).norm() <= 1e-10 * expected.norm());
    }
}

TEST_CASE("correlation_metric: peak dominance in clean single-path frames") {
    for (int n : {16, 32, 64, 128}) {
        const auto s = zadoff_chu(n, 1);
        for (int tau : {0, n / 3, n - 1}) {
            const auto g = correlation_metric(clean_received(s.samples, tau), s);
            double side = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != tau) side = std::max(side, g.values[j]);
            CHECK(g.values[tau] >= 10.0 * side);
        }
    }
}

TEST_CASE("normalize_metric") {
    MetricVector g{RVector(2), false};
    g.values << 3.0, 4.0;
    const auto u = normalize_metric(g);
    CHECK(u.normalized);
    CHECK(u.values[0] == doctest::Approx(0.6));
    CHECK(u.values[1] == doctest::Approx(0.8));

    Rng rng = Rng::stream(32, StreamTag::Test);
    MetricVector r{RVector(20), false};
    for (Eigen::Index i = 0; i < 20; ++i) r.values[i] = rng.uniform();
    const auto once = normalize_metric(r);
    CHECK((normalize_metric(once).values - once.values).norm() < 1e-15);
    CHECK((normalize_metric(MetricVector{7.3 * r.values, false}).values - once.values).norm() < 1e-15);
    CHECK(peak_index(once.values) == peak_index(r.values));

    CHECK_THROWS_AS(normalize_metric(MetricVector{RVector::Zero(5), false}), DegenerateMetricError);
}

TEST_CASE("peak_index: ties go to the smallest index") {
    RVector v(4);
    v << 1.0, 3.0, 3.0, 2.0;
    CHECK(peak_index(v) == 1);
    CHECK(peak_index(RVector::Constant(5, 2.0)) == 0);
    CHECK_THROWS_AS(peak_index(RVector()), std::invalid_argument);
}

TEST_CASE("td_correlation_metric") {
    const int n = 32, ns = 8;
    const auto pre = zadoff_chu(ns, 1);
    CHECK(td_correlation_metric(CVector::Zero(2 * n), pre, n).values.norm() == 0.0);

    // Preamble followed by zero data: the clean peak lands on the offset.
    CVector frame = CVector::Zero(n);
    frame.head(ns) = pre.samples;
    for (int tau = 0; tau < n; ++tau) {
        const CVector y = clean_received(frame, tau);
        const auto g = td_correlation_metric(y, pre, n);
        REQUIRE(g.size() == n);
        CHECK(peak_index(g.values) == tau);
        CHECK(peak_index(td_correlation_metric(2.0 * y, pre, n).values) == tau);
    }

    CHECK_THROWS_AS(td_correlation_metric(CVector::Zero(n + ns - 2), pre, n), std::invalid_argument);
    CHECK_NOTHROW(td_correlation_metric(CVector::Zero(n + ns - 1), pre, n));
}
