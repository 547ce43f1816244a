#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace vrcq {

/// Philox4x32-10 counter-based bijection.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key);
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Map a 64-bit word to a double in [0, 1) using its top 53 bits.
inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Number of full synchronous draws taken from a generative model.
class SampleCounter {
  public:
    std::uint64_t draws() const { return draws_; }
    void advance(std::uint64_t n = 1) { draws_ += n; }

  private:
    std::uint64_t draws_ = 0;
};

/// Reproducible random stream for one trial.
///
/// Generative draws are addressed by (draw_index, pair, lane) so the n-th draw
/// of a trial is fixed by the key alone, independent of what else the stream
/// produced. The sequential interface (`operator()`, `uniform`, `normal`)
/// lives in a disjoint counter domain and is used for instance construction.
class RngStream {
  public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t key);

    std::uint64_t key() const { return key_; }

    /// Two 64-bit words for draw `index`, state-action pair `pair`, lane `lane`.
    std::array<std::uint64_t, 2> block(std::uint64_t index, std::uint32_t pair,
                                       std::uint32_t lane) const;

    SampleCounter& counter() { return counter_; }
    const SampleCounter& counter() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    double uniform() { return to_unit((*this)()); }
    /// Uniform integer in [0, n), unbiased (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t n);
    double normal();

  private:
    static constexpr std::uint32_t kSequentialLane = 0xffffffffu;

    std::uint64_t key_;
    Philox4x32::Key philox_key_;
    std::uint64_t seq_index_ = 0;
    std::array<std::uint64_t, 2> seq_buf_{};
    int seq_left_ = 0;
    SampleCounter counter_;
};

/// Child stream for trial `trial_id` under `root_seed`. For a fixed root the
/// key is a bijection of the trial id, so distinct trials never share a stream.
RngStream spawn_stream(std::uint64_t root_seed, std::uint64_t trial_id);

/// Standard normal from two unit uniforms (Box-Muller, cosine branch).
double box_muller(std::uint64_t a, std::uint64_t b);

}  // namespace vrcq
