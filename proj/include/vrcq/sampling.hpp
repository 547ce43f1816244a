#pragma once

#include <cstdint>
#include <vector>

#include "vrcq/mdp.hpp"
#include "vrcq/rng.hpp"

namespace vrcq {

/// One synchronous generative draw: a successor and a noisy reward for every
/// state-action pair, indexed by pair = x*|U| + u.
struct GenerativeSample {
    std::vector<std::uint32_t> next_state;
    std::vector<double> reward_obs;
};

/// Draw index `draw` of `stream` without touching its counter.
void draw_sample_at(const MdpInstance& mdp, const RngStream& stream, std::uint64_t draw,
                    GenerativeSample& out);

/// Take the next draw from `stream` into `out` (buffers are reused) and
/// advance the stream's sample counter by one.
///
/// next_state[p] ~ P(.|x,u) independently across pairs; reward_obs[p] =
/// r(x,u) + sigma_r * g with g standard normal. With sigma_r = 0 the reward is
/// returned exactly.
void draw_sample(const MdpInstance& mdp, RngStream& stream, GenerativeSample& out);
GenerativeSample draw_sample(const MdpInstance& mdp, RngStream& stream);

}  // namespace vrcq
