#include "elmfs/waveform.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace elmfs {

TrainingSequence zadoff_chu(int length, int root) {
    if (length <= 0) throw std::invalid_argument("zadoff_chu: length must be positive");
    if (root <= 0 || std::gcd(root, length) != 1)
        throw std::invalid_argument("zadoff_chu: root must be positive and coprime with length");

    TrainingSequence seq;
    seq.root = root;
    seq.samples.resize(length);
    const bool odd = (length % 2) == 1;
    // Phase reduced modulo 2N in integer arithmetic keeps large n exact.
    const long long two_n = 2LL * length;
    for (long long n = 0; n < length; ++n) {
        const long long k = odd ? n * (n + 1) : n * n;
        const long long r = (static_cast<long long>(root) * (k % two_n)) % two_n;
        const double phase = -std::numbers::pi * static_cast<double>(r) / length;
        seq.samples[n] = std::polar(1.0, phase);
    }
    return seq;
}

DataSymbols qpsk_modulate(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_modulate: odd bit count");
    const double a = 1.0 / std::numbers::sqrt2;
    DataSymbols out;
    out.bits.assign(bits.begin(), bits.end());
    out.symbols.resize(static_cast<Eigen::Index>(bits.size() / 2));
    for (std::size_t k = 0; k < bits.size() / 2; ++k) {
        const double re = 1.0 - 2.0 * (bits[2 * k] & 1);
        const double im = 1.0 - 2.0 * (bits[2 * k + 1] & 1);
        out.symbols[static_cast<Eigen::Index>(k)] = {a * re, a * im};
    }
    return out;
}

Bits qpsk_demodulate(const CVector& symbols) {
    Bits bits(static_cast<std::size_t>(symbols.size()) * 2);
    for (Eigen::Index k = 0; k < symbols.size(); ++k) {
        bits[2 * k] = symbols[k].real() < 0.0 ? 1 : 0;
        bits[2 * k + 1] = symbols[k].imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

Bits random_bits(std::size_t count, Rng& rng) {
    Bits bits(count);
    for (auto& b : bits) b = rng.bit();
    return bits;
}

SuperimposedFrame superimpose(const TrainingSequence& s, const DataSymbols& c, double rho,
                              double energy) {
    if (s.size() != c.symbols.size())
        throw std::invalid_argument("superimpose: training and data lengths differ");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("superimpose: rho outside [0, 1]");
    if (!(energy > 0.0)) throw std::invalid_argument("superimpose: energy must be positive");

    SuperimposedFrame frame;
    frame.rho = rho;
    frame.energy = energy;
    frame.x = std::sqrt(rho * energy) * s.samples + std::sqrt((1.0 - rho) * energy) * c.symbols;
    return frame;
}

} // namespace elmfs
