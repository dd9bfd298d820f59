#include "subh/necklace.hpp"

#include <algorithm>
#include <cmath>

namespace subh {

namespace {

using u128 = unsigned __int128;

u128 ipow(std::uint64_t base, std::uint64_t exp) {
    u128 r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        const u128 next = r * base;
        if (next / base != r) throw TooLargeError("witt_count: n^k exceeds 128-bit range");
        r = next;
    }
    return r;
}

std::vector<std::uint64_t> divisors(std::uint64_t k) {
    std::vector<std::uint64_t> d;
    for (std::uint64_t i = 1; i * i <= k; ++i)
        if (k % i == 0) {
            d.push_back(i);
            if (i != k / i) d.push_back(k / i);
        }
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace

int moebius(std::uint64_t l) {
    if (l == 0) throw BadParamsError("moebius: argument must be >= 1");
    if (l == 1) return 1;
    int factors = 0;
    for (std::uint64_t p = 2; p * p <= l; ++p) {
        if (l % p == 0) {
            l /= p;
            if (l % p == 0) return 0;  // squareful
            ++factors;
        }
    }
    if (l > 1) ++factors;
    return (factors % 2 == 0) ? 1 : -1;
}

std::uint64_t witt_count(std::uint64_t n, std::uint64_t k) {
    if (n < 2 || k < 1) throw BadParamsError("witt_count: need n >= 2, k >= 1");
    // signed 128-bit accumulation: the Moebius-weighted terms may cancel
    __int128 sum = 0;
    for (std::uint64_t l : divisors(k)) {
        const int mu = moebius(l);
        if (mu == 0) continue;
        const u128 term = ipow(n, k / l);
        sum += mu > 0 ? static_cast<__int128>(term) : -static_cast<__int128>(term);
    }
    if (sum < 0 || sum % static_cast<__int128>(k) != 0)
        throw Error("witt_count: Moebius sum not divisible by k (implementation fault)");
    const u128 q = static_cast<u128>(sum) / k;
    if (q > static_cast<u128>(UINT64_MAX)) throw TooLargeError("witt_count: result exceeds 64 bits");
    return static_cast<std::uint64_t>(q);
}

std::vector<std::string> lyndon_words(unsigned n, unsigned k) {
    if (n < 2 || n > 26 || k < 1) throw BadParamsError("lyndon_words: need 2 <= n <= 26, k >= 1");
    if (k * std::log2(double(n)) > 23.3)  // n^k > ~1e7
        throw TooLargeError("lyndon_words: n^k enumeration too large");

    // Duval's iteration: enumerate all Lyndon words of length <= k in
    // lexicographic order, keep those of length exactly k
    std::vector<std::string> out;
    std::vector<int> w{0};
    while (!w.empty()) {
        if (w.size() == k) {
            std::string s;
            for (int digit : w) s.push_back(static_cast<char>('a' + digit));
            out.push_back(std::move(s));
        }
        const std::size_t len = w.size();
        while (w.size() < k) w.push_back(w[w.size() - len]);
        while (!w.empty() && w.back() == static_cast<int>(n) - 1) w.pop_back();
        if (!w.empty()) ++w.back();
    }
    return out;
}

NecklaceTable make_necklace_table(unsigned n, unsigned k, bool enumerate) {
    NecklaceTable t;
    t.n = n;
    t.k = k;
    t.count = witt_count(n, k);
    if (enumerate) {
        t.words = lyndon_words(n, k);
        if (t.words.size() != t.count)
            throw Error("make_necklace_table: enumeration disagrees with Witt's formula");
    }
    return t;
}

NecklaceForm canonical_necklace(const std::string& s) {
    if (s.empty()) throw BadParamsError("canonical_necklace: empty string");
    const std::size_t k = s.size();
    NecklaceForm f;
    f.canonical = s;
    for (std::size_t r = 1; r < k; ++r) {
        std::string rot = s.substr(r) + s.substr(0, r);
        if (rot < f.canonical) f.canonical = rot;
    }
    // aperiodic iff no proper divisor period reproduces the string
    f.aperiodic = true;
    for (std::size_t d = 1; d < k; ++d) {
        if (k % d != 0) continue;
        bool periodic = true;
        for (std::size_t i = d; i < k && periodic; ++i)
            periodic = (f.canonical[i] == f.canonical[i - d]);
        if (periodic) {
            f.aperiodic = false;
            break;
        }
    }
    return f;
}

std::uint64_t predicted_subharmonic_count(unsigned m, unsigned k) {
    if (m < 1 || k < 2) throw BadParamsError("predicted_subharmonic_count: need m >= 1, k >= 2");
    if (m >= 12) throw TooLargeError("predicted_subharmonic_count: alphabet 2^m too large");
    return witt_count(std::uint64_t{1} << m, k);
}

}  // namespace subh
