#pragma once

#include "elmfs/random.hpp"
#include "elmfs/types.hpp"

#include <span>

namespace elmfs {

struct TrainingSequence {
    CVector samples;
    int root = 1;

    Eigen::Index size() const { return samples.size(); }
};

struct DataSymbols {
    CVector symbols;
    Bits bits;
};

struct SuperimposedFrame {
    CVector x;
    double rho = 0.0;
    double energy = 1.0;
};

// Zadoff-Chu sequence. Even lengths use phase -pi*u*n^2/N, odd lengths
// -pi*u*n(n+1)/N. Throws std::invalid_argument when length is 0 or the
// root is not coprime with the length.
TrainingSequence zadoff_chu(int length, int root = 1);

// Gray-mapped QPSK: bit pair (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
DataSymbols qpsk_modulate(std::span<const std::uint8_t> bits);

// Hard minimum-distance decisions followed by the inverse Gray map.
Bits qpsk_demodulate(const CVector& symbols);

Bits random_bits(std::size_t count, Rng& rng);

// x = sqrt(rho E) s + sqrt((1 - rho) E) c.
SuperimposedFrame superimpose(const TrainingSequence& s, const DataSymbols& c, double rho,
                              double energy);

} // namespace elmfs
