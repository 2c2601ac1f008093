#include "elmfs/impairments.hpp"

#include <cmath>
#include <limits>

namespace elmfs {

CVector saleh_hpa(const CVector& signal, const SalehParams& params, double drive_gain) {
    if (!(drive_gain > 0.0)) throw std::invalid_argument("saleh_hpa: drive_gain must be positive");
    CVector out(signal.size());
    for (Eigen::Index n = 0; n < signal.size(); ++n) {
        const Complex z = signal[n];
        const double mag = std::abs(z);
        if (mag == 0.0) {
            out[n] = 0.0;
            continue;
        }
        const double r = drive_gain * mag;
        out[n] = std::polar(params.amplitude(r), std::arg(z) + params.phase(r));
    }
    return out;
}

double hpa_evm(const CVector& probe, const SalehParams& params, double drive_gain) {
    return evm(saleh_hpa(probe, params, drive_gain), (params.alpha_a * drive_gain) * probe);
}

double calibrate_drive(double target_evm, const SalehParams& params, const CVector& probe) {
    if (!(target_evm > 0.0 && target_evm < 100.0))
        throw std::invalid_argument("calibrate_drive: target must lie in (0, 100)");
    constexpr double kLow = 1e-3;
    constexpr double kHigh = 1e3;

    double lo = std::log(kLow);
    double hi = std::log(kHigh);
    const double evm_lo = hpa_evm(probe, params, kLow);
    const double evm_hi = hpa_evm(probe, params, kHigh);
    if (target_evm < evm_lo || target_evm > evm_hi)
        throw CalibrationError("calibrate_drive: target EVM " + std::to_string(target_evm) +
                               "% unreachable in drive bracket [1e-3, 1e3] (EVM range " +
                               std::to_string(evm_lo) + "%.." + std::to_string(evm_hi) + "%)");

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double e = hpa_evm(probe, params, std::exp(mid));
        if (std::abs(e - target_evm) < 1e-6) return std::exp(mid);
        (e < target_evm ? lo : hi) = mid;
        if (hi - lo < 1e-14) break;
    }
    return std::exp(0.5 * (lo + hi));
}

CVector rescale_power(const CVector& x, double energy) {
    if (x.size() == 0) return x;
    const double power = x.squaredNorm() / static_cast<double>(x.size());
    if (!(power > 0.0)) return x;
    return std::sqrt(energy / power) * x;
}

CVector distort(const CVector& x, const HpaStage& stage, double energy) {
    if (!stage.enabled) return x;
    return rescale_power(saleh_hpa(x, stage.params, stage.drive_gain), energy);
}

ChannelRealization draw_channel(int length, double eta, Rng& rng) {
    if (length < 1) throw std::invalid_argument("draw_channel: length must be >= 1");
    ChannelRealization ch;
    ch.eta = eta;
    ch.taps.resize(length);
    for (int l = 0; l < length; ++l) {
        const Complex g = rng.complex_normal(std::exp(-eta * l));
        // The first path is always present; later paths vanish with probability 1/2.
        const bool zeroed = l > 0 && rng.uniform() < 0.5;
        ch.taps[l] = zeroed ? Complex{} : g;
    }
    // A zero-probability draw of exactly 0 on the first tap is redrawn.
    while (ch.taps[0] == Complex{}) ch.taps[0] = rng.complex_normal(1.0);
    ch.taps /= ch.taps.norm();
    return ch;
}

CVector extend_frame(const CVector& x, int tau, int channel_length) {
    const auto n = static_cast<int>(x.size());
    if (channel_length < 1 || channel_length > n)
        throw std::invalid_argument("extend_frame: channel length must lie in [1, N]");
    if (tau < 0 || tau > n - channel_length + 1)
        throw std::invalid_argument("extend_frame: offset outside [0, N - L + 1]");
    CVector ext = CVector::Zero(2 * n - channel_length + 1);
    ext.segment(tau, n) = x;
    return ext;
}

CVector convolve(const CVector& x, const CVector& taps) {
    CVector y = CVector::Zero(x.size() + taps.size() - 1);
    for (Eigen::Index l = 0; l < taps.size(); ++l) {
        if (taps[l] == Complex{}) continue;
        y.segment(l, x.size()) += taps[l] * x;
    }
    return y;
}

CVector transmit(const CVector& distorted, int tau, const ChannelRealization& channel,
                 const NoiseModel& noise, Rng& rng) {
    CVector y = convolve(extend_frame(distorted, tau, static_cast<int>(channel.length())),
                         channel.taps);
    for (Eigen::Index m = 0; m < y.size(); ++m) {
        const Complex n = rng.complex_normal(noise.sigma2);
        y[m] += n;
    }
    return y;
}

double snr_to_sigma2(double snr_db, double energy) {
    if (!(energy > 0.0)) throw std::invalid_argument("snr_to_sigma2: energy must be positive");
    return energy / std::pow(10.0, snr_db / 10.0);
}

} // namespace elmfs
