#include "acqfam/rng.hpp"

#include <stdexcept>

namespace acqfam {
namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c,
                       const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMult0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMult1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ull;

inline std::uint64_t fnv_byte(std::uint64_t h, std::uint8_t b) noexcept {
    return (h ^ b) * kFnvPrime;
}

inline std::uint64_t fnv_u64(std::uint64_t h, std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) h = fnv_byte(h, static_cast<std::uint8_t>(v >> (8 * i)));
    return h;
}

inline std::uint64_t fnv_text(std::uint64_t h, std::string_view s) noexcept {
    for (unsigned char ch : s) h = fnv_byte(h, ch);
    return fnv_byte(h, 0xFFu); // terminator keeps ("ab","c") != ("a","bc")
}

} // namespace

std::array<std::uint32_t, 4> CounterRng::block(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) noexcept {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int r = 0; r < 9; ++r) {
        round_once(c, k);
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    round_once(c, k);
    return c;
}

CounterRng::CounterRng(std::uint64_t key, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
      counter_{0u, 0u,
               static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)},
      buffer_pos_(4) {}

void CounterRng::refill() {
    buffer_ = block(counter_, key_);
    if (++counter_[0] == 0u) ++counter_[1]; // 64-bit position, wraps after 2^66 draws
    buffer_pos_ = 0;
}

std::uint32_t CounterRng::next_u32() {
    if (buffer_pos_ == 4) refill();
    return buffer_[buffer_pos_++];
}

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
}

double CounterRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int CounterRng::next_below(int n) {
    if (n <= 0) throw std::invalid_argument("CounterRng::next_below: n must be positive");
    // floor(u*n) instead of std::uniform_int_distribution: identical output on
    // every platform, and the bias for the n used here (< 2^31) is < 2^-22.
    int v = static_cast<int>(next_double() * static_cast<double>(n));
    return v < n ? v : n - 1;
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::string_view label_a,
                          std::string_view label_b,
                          std::uint64_t index) {
    std::uint64_t h = kFnvOffset;
    h = fnv_u64(h, base);
    h = fnv_text(h, label_a);
    h = fnv_text(h, label_b);
    h = fnv_u64(h, index);
    return splitmix64(h);
}

std::uint64_t derive_seed(std::uint64_t run_seed,
                          std::uint32_t purpose,
                          std::uint32_t iteration) {
    return splitmix64(run_seed ^ (std::uint64_t{purpose} << 32) ^ iteration);
}

} // namespace acqfam
