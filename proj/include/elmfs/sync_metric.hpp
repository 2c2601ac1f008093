#pragma once

#include "elmfs/errors.hpp"
#include "elmfs/types.hpp"
#include "elmfs/waveform.hpp"

namespace elmfs {

struct MetricVector {
    RVector values;
    bool normalized = false;

    Eigen::Index size() const { return values.size(); }
};

/// Squared cross-correlation of the received window against the training
/// sequence: g[j] = |sum_i conj(s_i) y_{j+i}|^2 for j = 0..N-1. Samples past
/// the end of y count as zero. Requires y.size() >= N.
MetricVector correlation_metric(const CVector& y, const TrainingSequence& s);

/// Sliding squared correlation of a short preamble over `window` candidate
/// offsets. Requires y.size() >= preamble length + window - 1.
MetricVector td_correlation_metric(const CVector& y, const TrainingSequence& preamble, int window);

// g / ||g||_2. Throws DegenerateMetricError on an all-zero metric.
MetricVector normalize_metric(const MetricVector& g);

// Smallest index attaining the maximum.
int peak_index(const RVector& values);

} // namespace elmfs
