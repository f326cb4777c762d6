#include "railsim/fed/pedersen.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace railsim::fed {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1u) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t small : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                                19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % small == 0) return n == small;
    }
    // Deterministic Miller-Rabin for 64-bit integers with the first twelve
    // prime bases.
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1u) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

void CommitmentParams::validate() const {
    if (p < 2 || q < 2) throw std::invalid_argument("p and q must be primes");
    if (!is_prime_u64(p) || !is_prime_u64(q))
        throw std::invalid_argument("p and q must be primes");
    if ((p - 1) % q != 0) throw std::invalid_argument("q must divide p-1");
    if (g <= 1 || g >= p || powmod(g, q, p) != 1)
        throw std::invalid_argument("g must generate the order-q subgroup");
    if (h <= 1 || h >= p || powmod(h, q, p) != 1)
        throw std::invalid_argument("h must lie in the order-q subgroup");
}

CommitmentParams gen_commitment_params(core::RngStream& stream, int q_bits) {
    if (q_bits < 16 || q_bits > 62)
        throw std::invalid_argument("q_bits must be in [16, 62]");

    CommitmentParams params;
    const std::uint64_t q_lo = 1ull << (q_bits - 1);
    while (true) {
        std::uint64_t q = q_lo | stream.next_u64() % q_lo | 1u;
        if (!is_prime_u64(q)) continue;
        // Small even cofactor keeping p above 2^63 and inside 64 bits.
        std::uint64_t p = 0;
        for (std::uint64_t k = 2; k <= 64; k += 2) {
            if (q > (UINT64_MAX - 1) / k) break;
            const std::uint64_t candidate = k * q + 1;
            if (candidate >= (1ull << 63) && is_prime_u64(candidate)) {
                p = candidate;
                break;
            }
        }
        if (p == 0) continue;

        params.p = p;
        params.q = q;
        const std::uint64_t cofactor = (p - 1) / q;
        do {
            const std::uint64_t x = 2 + stream.next_u64() % (p - 3);
            params.g = powmod(x, cofactor, p);
        } while (params.g <= 1);
        do {
            const std::uint64_t s = 1 + stream.next_u64() % (q - 1);
            params.h = powmod(params.g, s, p);  // s is discarded
        } while (params.h <= 1);
        params.validate();
        return params;
    }
}

std::uint64_t pedersen_commit(std::uint64_t value, std::uint64_t blind,
                              const CommitmentParams& params) {
    if (value >= params.q || blind >= params.q)
        throw std::out_of_range("value and blind must be in [0, q)");
    return mulmod(powmod(params.g, value, params.p),
                  powmod(params.h, blind, params.p), params.p);
}

bool pedersen_verify(std::uint64_t commitment, std::uint64_t value,
                     std::uint64_t blind, const CommitmentParams& params) {
    if (value >= params.q || blind >= params.q) return false;
    return pedersen_commit(value, blind, params) == commitment;
}

Signature sign_model(const std::vector<std::uint8_t>& model_bytes,
                     const std::vector<std::uint8_t>& dataset_digest) {
    if (model_bytes.empty())
        throw std::invalid_argument("model bytes must be non-empty");
    if (dataset_digest.empty())
        throw std::invalid_argument("dataset digest must be non-empty");

    std::vector<std::uint8_t> framed;
    framed.reserve(16 + model_bytes.size() + dataset_digest.size());
    auto append_framed = [&](const std::vector<std::uint8_t>& part) {
        std::uint64_t len = part.size();
        for (int i = 0; i < 8; ++i) {
            framed.push_back(static_cast<std::uint8_t>(len & 0xFF));
            len >>= 8;
        }
        framed.insert(framed.end(), part.begin(), part.end());
    };
    append_framed(model_bytes);
    append_framed(dataset_digest);

    Signature sig{};
    unsigned int out_len = 0;
    if (EVP_Digest(framed.data(), framed.size(), sig.data(), &out_len,
                   EVP_sha256(), nullptr) != 1 ||
        out_len != sig.size())
        throw std::runtime_error("SHA-256 failed");
    return sig;
}

}  // namespace railsim::fed
