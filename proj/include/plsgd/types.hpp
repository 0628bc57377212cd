#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace plsgd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// All randomness in the library flows through explicitly seeded streams.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Stream for an independent sub-task (e.g. one SGD run) of a seeded job.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{seed, index};
    return Rng(seq);
}

}  // namespace plsgd
