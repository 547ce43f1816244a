#include "vrcq/rng.hpp"

#include <cmath>
#include <numbers>

namespace vrcq {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t key)
    : key_(key),
      philox_key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

std::array<std::uint64_t, 2> RngStream::block(std::uint64_t index, std::uint32_t pair,
                                               std::uint32_t lane) const {
    const auto out = Philox4x32::apply(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), pair, lane},
        philox_key_);
    return {join(out[0], out[1]), join(out[2], out[3])};
}

RngStream::result_type RngStream::operator()() {
    if (seq_left_ == 0) {
        seq_buf_ = block(seq_index_++, 0, kSequentialLane);
        seq_left_ = 2;
    }
    return seq_buf_[2 - seq_left_--];
}

namespace {
__extension__ using u128 = unsigned __int128;
}

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n <= 1) return 0;
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
    const auto a = (*this)();
    const auto b = (*this)();
    return box_muller(a, b);
}

double box_muller(std::uint64_t a, std::uint64_t b) {
    // 1 - u lies in (0, 1], keeping the log finite.
    const double u1 = 1.0 - to_unit(a);
    const double u2 = to_unit(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream spawn_stream(std::uint64_t root_seed, std::uint64_t trial_id) {
    return RngStream(mix64(trial_id ^ mix64(root_seed + 0x9e3779b97f4a7c15ull)));
}

}  // namespace vrcq
