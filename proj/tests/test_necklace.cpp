#include <map>
#include <set>
#include <string>

#include "doctest.h"
#include "subh/necklace.hpp"

using namespace subh;

namespace {

/// Brute-force count of aperiodic strings under rotation.
std::uint64_t brute_aperiodic_necklaces(unsigned n, unsigned k) {
    std::uint64_t total = 1;
    for (unsigned i = 0; i < k; ++i) total *= n;

    std::set<std::string> canon;
    for (std::uint64_t v = 0; v < total; ++v) {
        std::string s(k, 'a');
        std::uint64_t x = v;
        for (unsigned i = 0; i < k; ++i) {
            s[i] = static_cast<char>('a' + x % n);
            x /= n;
        }
        const NecklaceForm f = canonical_necklace(s);
        if (f.aperiodic) canon.insert(f.canonical);
    }
    return canon.size();
}

}  // namespace

TEST_SUITE_BEGIN("necklace");

TEST_CASE("Moebius values") {
    CHECK(moebius(1) == 1);
    CHECK(moebius(6) == 1);
    CHECK(moebius(12) == 0);
    // against brute factorization for the first values
    const int expected[] = {1,  -1, -1, 0, -1, 1,  -1, 0,  0, 1,  -1, 0,  -1, 1, 1,
                            0,  -1, 0,  -1, 0, 1,  1,  -1, 0, 0,  1,  0,  0,  -1, -1};
    for (int i = 0; i < 30; ++i) CHECK(moebius(i + 1) == expected[i]);
}

TEST_CASE("Witt counts for binary words") {
    const std::uint64_t expected[] = {1, 2, 3, 6, 9, 18, 30, 56, 99};
    for (unsigned k = 2; k <= 10; ++k) CHECK(witt_count(2, k) == expected[k - 2]);
    CHECK(witt_count(2, 1) == 2);
    CHECK(witt_count(4, 2) == 6);
}

TEST_CASE("Witt counts equal brute-force aperiodic necklace counts") {
    for (unsigned n = 2; n <= 4; ++n)
        for (unsigned k = 1; k <= 8; ++k) CHECK(witt_count(n, k) == brute_aperiodic_necklaces(n, k));
}

TEST_CASE("Lyndon words by Duval's algorithm") {
    CHECK(lyndon_words(2, 2) == std::vector<std::string>{"ab"});
    CHECK(lyndon_words(2, 3) == std::vector<std::string>{"aab", "abb"});
    CHECK(lyndon_words(2, 4) == std::vector<std::string>{"aaab", "aabb", "abbb"});
    for (unsigned k = 1; k <= 10; ++k)
        CHECK(lyndon_words(2, k).size() == witt_count(2, k));
    for (unsigned k = 1; k <= 7; ++k)
        CHECK(lyndon_words(3, k).size() == witt_count(3, k));
}

TEST_CASE("necklace canonical forms") {
    CHECK(canonical_necklace("bbaa").canonical == "aabb");
    CHECK(canonical_necklace("bbaa").aperiodic);
    CHECK(canonical_necklace("abab").canonical == "abab");
    CHECK(!canonical_necklace("abab").aperiodic);
    CHECK(canonical_necklace("a").canonical == "a");
    CHECK(canonical_necklace("a").aperiodic);
}

TEST_CASE("canonical_necklace is idempotent and rotation invariant") {
    for (const std::string s : {"abcab", "bbbab", "aabba", "cabca"}) {
        const NecklaceForm f = canonical_necklace(s);
        CHECK(canonical_necklace(f.canonical).canonical == f.canonical);
        for (std::size_t r = 1; r < s.size(); ++r)
            CHECK(canonical_necklace(s.substr(r) + s.substr(0, r)).canonical == f.canonical);
    }
}

TEST_CASE("necklace factorization identity") {
    // sum over divisors d of k of d * L_n(d) = n^k
    for (unsigned n = 2; n <= 3; ++n)
        for (unsigned k = 1; k <= 10; ++k) {
            std::uint64_t sum = 0;
            for (unsigned d = 1; d <= k; ++d)
                if (k % d == 0) sum += d * witt_count(n, d);
            std::uint64_t nk = 1;
            for (unsigned i = 0; i < k; ++i) nk *= n;
            CHECK(sum == nk);
        }
}

TEST_CASE("necklace table ties counts to enumerations") {
    const NecklaceTable t = make_necklace_table(2, 6, true);
    CHECK(t.count == 9);
    CHECK(t.words.size() == t.count);
    const NecklaceTable bare = make_necklace_table(3, 4);
    CHECK(bare.count == witt_count(3, 4));
    CHECK(bare.words.empty());
}

TEST_CASE("predicted subharmonic counts") {
    CHECK(predicted_subharmonic_count(1, 2) == 1);
    CHECK(predicted_subharmonic_count(1, 5) == 6);
    // S_8(2) = (8^2 - 8)/2: ordered pairs of distinct symbols, halved
    CHECK(predicted_subharmonic_count(3, 2) == (8 * 8 - 8) / 2);
    CHECK(predicted_subharmonic_count(3, 2) == 28);
}

TEST_SUITE_END();
