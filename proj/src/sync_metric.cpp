#include "elmfs/sync_metric.hpp"

#include <algorithm>
#include <stdexcept>

namespace elmfs {

namespace {

RVector sliding_power(const CVector& y, const CVector& ref, Eigen::Index positions) {
    RVector out(positions);
    const Eigen::Index len = ref.size();
    for (Eigen::Index j = 0; j < positions; ++j) {
        const Eigen::Index avail = std::min(len, y.size() - j);
        // dot() conjugates its first argument.
        const Complex acc = avail > 0 ? ref.head(avail).dot(y.segment(j, avail)) : Complex{};
        out[j] = std::norm(acc);
    }
    return out;
}

} // namespace

MetricVector correlation_metric(const CVector& y, const TrainingSequence& s) {
    if (s.size() == 0) throw std::invalid_argument("correlation_metric: empty training sequence");
    if (y.size() < s.size())
        throw std::invalid_argument("correlation_metric: received vector shorter than N");
    return {sliding_power(y, s.samples, s.size()), false};
}

MetricVector td_correlation_metric(const CVector& y, const TrainingSequence& preamble, int window) {
    if (preamble.size() == 0 || window < 1)
        throw std::invalid_argument("td_correlation_metric: empty preamble or window");
    if (y.size() < preamble.size() + window - 1)
        throw std::invalid_argument("td_correlation_metric: search window overruns received vector");
    return {sliding_power(y, preamble.samples, window), false};
}

MetricVector normalize_metric(const MetricVector& g) {
    const double norm = g.values.norm();
    if (!(norm > 0.0)) throw DegenerateMetricError("normalize_metric: all-zero metric");
    return {g.values / norm, true};
}

int peak_index(const RVector& values) {
    if (values.size() == 0) throw std::invalid_argument("peak_index: empty vector");
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < values.size(); ++j)
        if (values[j] > values[best]) best = j;
    return static_cast<int>(best);
}

} // namespace elmfs
