#pragma once

#include "elmfs/errors.hpp"
#include "elmfs/impairments.hpp"
#include "elmfs/types.hpp"
#include "elmfs/waveform.hpp"

#include <cstdint>

namespace elmfs {

struct DetectionResult {
    CVector symbols_hat;
    Bits bits_hat;
    std::int64_t bit_errors = 0;
    std::int64_t bits_total = 0;
};

/// Minimum-norm least-squares inversion H^+ y of the full convolution
/// matrix (receiver has the true channel), then the N samples starting at
/// tau_hat of the recovered extended vector.
CVector invert_channel(const CVector& y, const ChannelRealization& channel, int tau_hat, int n);

// c_hat = (x_est - sqrt(rho E) s) / sqrt((1 - rho) E). Throws NoDataError for rho = 1.
CVector cancel_training(const CVector& x_est, const TrainingSequence& s, double rho, double energy);

DetectionResult demap_and_count(const CVector& c_hat, const Bits& true_bits);

} // namespace elmfs
