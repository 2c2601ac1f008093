#pragma once

#include "elmfs/errors.hpp"
#include "elmfs/random.hpp"
#include "elmfs/types.hpp"
#include "elmfs/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace elmfs {

// Memoryless Saleh AM-AM / AM-PM model.
struct SalehParams {
    double alpha_a = 1.96;
    double beta_a = 0.99;
    double alpha_phi = 2.53;
    double beta_phi = 2.82;

    double amplitude(double r) const { return alpha_a * r / (1.0 + beta_a * r * r); }
    double phase(double r) const { return alpha_phi * r * r / (1.0 + beta_phi * r * r); }
};

struct ChannelRealization {
    CVector taps;
    double eta = 0.0;

    Eigen::Index length() const { return taps.size(); }
};

struct NoiseModel {
    double sigma2 = 0.0; // total complex variance per sample
};

// Transmitter nonlinearity as configured for one frame family.
struct HpaStage {
    bool enabled = true;
    SalehParams params;
    double drive_gain = 1.0;
};

struct FrameInstance {
    SuperimposedFrame frame;
    CVector distorted;
    int tau = 0;
    ChannelRealization channel;
    CVector received;
};

// Each sample z with r = drive_gain |z| maps to A(r) exp(j(arg z + Phi(r))).
CVector saleh_hpa(const CVector& signal, const SalehParams& params, double drive_gain);

/// EVM in percent: 100 sqrt(sum |d - r|^2 / sum |r|^2).
/// Throws UndefinedMetricError for an all-zero reference.
template <typename DerivedA, typename DerivedB>
double evm(const Eigen::MatrixBase<DerivedA>& distorted, const Eigen::MatrixBase<DerivedB>& reference) {
    if (distorted.size() != reference.size() || reference.size() == 0)
        throw std::invalid_argument("evm: lengths must be equal and nonzero");
    const double ref_energy = reference.squaredNorm();
    if (!(ref_energy > 0.0)) throw UndefinedMetricError("evm: reference is all zero");
    return 100.0 * std::sqrt((distorted - reference).squaredNorm() / ref_energy);
}

// EVM of the HPA output at a given drive against the small-signal linear
// output alpha_a * drive_gain * probe.
double hpa_evm(const CVector& probe, const SalehParams& params, double drive_gain);

/// Finds the drive gain whose HPA EVM on `probe` matches `target_evm`
/// percent. Bisection on log(drive) inside [1e-3, 1e3]; throws
/// CalibrationError when the target is outside the bracket.
double calibrate_drive(double target_evm, const SalehParams& params, const CVector& probe);

// HPA (if enabled) followed by rescaling to mean power `energy`.
CVector distort(const CVector& x, const HpaStage& stage, double energy);

// Rescales to mean |x_n|^2 = energy. All-zero input is returned unchanged.
CVector rescale_power(const CVector& x, double energy);

ChannelRealization draw_channel(int length, double eta, Rng& rng);

// Zero-padded vector [0 x tau, x, 0 x (N - L - tau + 1)] of length 2N - L + 1.
CVector extend_frame(const CVector& x, int tau, int channel_length);

/// Full linear-convolution (Toeplitz) matrix: column k holds the taps at
/// rows k..k+L-1. Size (cols + L - 1) x cols.
template <typename Scalar>
Matrix<Scalar> convolution_matrix(const Vector<Scalar>& taps, Eigen::Index cols) {
    const Eigen::Index len = taps.size();
    Matrix<Scalar> h = Matrix<Scalar>::Zero(cols + len - 1, cols);
    for (Eigen::Index k = 0; k < cols; ++k) h.col(k).segment(k, len) = taps;
    return h;
}

// Linear convolution of x with taps, output length x.size() + taps.size() - 1.
CVector convolve(const CVector& x, const CVector& taps);

/// y = H x_ext + n with M = 2N. Throws std::invalid_argument for tau outside
/// [0, N - L + 1].
CVector transmit(const CVector& distorted, int tau, const ChannelRealization& channel,
                 const NoiseModel& noise, Rng& rng);

double snr_to_sigma2(double snr_db, double energy);

} // namespace elmfs
