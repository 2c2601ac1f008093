#include "elmfs/detection.hpp"

#include "elmfs/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace elmfs {

CVector invert_channel(const CVector& y, const ChannelRealization& channel, int tau_hat, int n) {
    const auto len = static_cast<int>(channel.length());
    if (len < 1 || len > n) throw std::invalid_argument("invert_channel: channel length outside [1, N]");
    if (tau_hat < 0 || tau_hat > n - len + 1)
        throw std::invalid_argument("invert_channel: tau_hat outside [0, N - L + 1]");
    const Eigen::Index cols = 2 * n - len + 1;
    if (y.size() != cols + len - 1)
        throw std::invalid_argument("invert_channel: received length must be 2N");

    const CMatrix h = convolution_matrix<Complex>(channel.taps, cols);
    const CVector full = min_norm_solve(h, y);
    return full.segment(tau_hat, n);
}

CVector cancel_training(const CVector& x_est, const TrainingSequence& s, double rho, double energy) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("cancel_training: rho outside [0, 1]");
    if (rho >= 1.0) throw NoDataError("cancel_training: rho = 1 leaves no data component");
    if (x_est.size() != s.size()) throw std::invalid_argument("cancel_training: length mismatch");
    return (x_est - std::sqrt(rho * energy) * s.samples) / std::sqrt((1.0 - rho) * energy);
}

DetectionResult demap_and_count(const CVector& c_hat, const Bits& true_bits) {
    if (true_bits.size() != 2 * static_cast<std::size_t>(c_hat.size()))
        throw std::invalid_argument("demap_and_count: bit count must be twice the symbol count");
    DetectionResult r;
    r.symbols_hat = c_hat;
    r.bits_hat = qpsk_demodulate(c_hat);
    r.bits_total = static_cast<std::int64_t>(true_bits.size());
    for (std::size_t i = 0; i < true_bits.size(); ++i) r.bit_errors += (r.bits_hat[i] != true_bits[i]);
    return r;
}

} // namespace elmfs
