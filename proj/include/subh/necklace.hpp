#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subh/errors.hpp"

namespace subh {

/// Moebius function: mu(1) = 1, (-1)^s for a product of s distinct primes,
/// 0 for squareful arguments. Trial factorization.
int moebius(std::uint64_t l);

/// Witt's formula S_n(k) = (1/k) sum_{l | k} mu(l) n^{k/l}: the number of
/// aperiodic necklaces of length k over n colors. Exact integer arithmetic;
/// the divisibility of the sum by k is asserted before dividing.
std::uint64_t witt_count(std::uint64_t n, std::uint64_t k);

/// All n-ary Lyndon words of length exactly k in lexicographic order
/// (Duval's algorithm), over the alphabet 'a', 'b', ... for n <= 26 and
/// digit tuples otherwise. Guarded by n^k <= 10^7.
std::vector<std::string> lyndon_words(unsigned n, unsigned k);

/// Aperiodic-necklace table for one (n, k): the count from Witt's formula,
/// optionally with the canonical words enumerated (small n^k only).
struct NecklaceTable {
    unsigned n = 0;
    unsigned k = 0;
    std::uint64_t count = 0;
    std::vector<std::string> words;  ///< empty unless enumeration was requested
};

NecklaceTable make_necklace_table(unsigned n, unsigned k, bool enumerate = false);

struct NecklaceForm {
    std::string canonical;  ///< lexicographically least rotation
    bool aperiodic = false; ///< least rotation has full period
};

/// Canonical necklace representative of s and its aperiodicity.
NecklaceForm canonical_necklace(const std::string& s);

/// Lower bound on the number of order-k subharmonic classes for a weight
/// with m positive humps: S_{2^m}(k).
std::uint64_t predicted_subharmonic_count(unsigned m, unsigned k);

}  // namespace subh
