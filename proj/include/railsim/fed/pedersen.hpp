#ifndef RAILSIM_FED_PEDERSEN_HPP
#define RAILSIM_FED_PEDERSEN_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "railsim/core/rng.hpp"

namespace railsim::fed {

/// Pedersen commitment group: primes p, q with q | p-1, generators g, h
/// of the order-q subgroup with log_g(h) unknown.
struct CommitmentParams {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    std::uint64_t g = 0;
    std::uint64_t h = 0;

    void validate() const;  // throws std::invalid_argument
};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
bool is_prime_u64(std::uint64_t n);

/// Fresh toy parameters (p >= 2^63, q_bits-bit subgroup order). h = g^s
/// for a discarded random s.
CommitmentParams gen_commitment_params(core::RngStream& stream,
                                       int q_bits = 62);

/// pc = g^a * h^r mod p. a and r must lie in [0, q).
std::uint64_t pedersen_commit(std::uint64_t value, std::uint64_t blind,
                              const CommitmentParams& params);

/// Recomputes the commitment from an opening and compares.
bool pedersen_verify(std::uint64_t commitment, std::uint64_t value,
                     std::uint64_t blind, const CommitmentParams& params);

using Signature = std::array<std::uint8_t, 32>;

/// sigma = Hash(model, dataset digest) with length framing; SHA-256.
/// Throws std::invalid_argument on an empty model.
Signature sign_model(const std::vector<std::uint8_t>& model_bytes,
                     const std::vector<std::uint8_t>& dataset_digest);

}  // namespace railsim::fed

#endif
