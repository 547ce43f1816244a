#include "vrcq/sampling.hpp"

#include <algorithm>

namespace vrcq {

namespace {

// Linear scan beats binary search for the short rows Garnet instances have.
constexpr std::size_t kLinearScanMax = 16;

std::uint32_t pick_successor(const MdpInstance& mdp, std::size_t pair, double u) {
    const auto succ = mdp.successors(pair);
    const auto cdf = mdp.successor_cdf(pair);
    if (cdf.size() <= kLinearScanMax) {
        std::size_t k = 0;
        while (u >= cdf[k]) ++k;
        return succ[k];
    }
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return succ[static_cast<std::size_t>(it - cdf.begin())];
}

}  // namespace

void draw_sample_at(const MdpInstance& mdp, const RngStream& stream, std::uint64_t draw,
                    GenerativeSample& out) {
    const std::size_t pairs = mdp.num_pairs();
    out.next_state.resize(pairs);
    out.reward_obs.resize(pairs);
    const auto rewards = mdp.rewards();
    const double sigma = mdp.sigma_r();
    for (std::size_t p = 0; p < pairs; ++p) {
        const auto pair = static_cast<std::uint32_t>(p);
        const auto words = stream.block(draw, pair, 0);
        out.next_state[p] = pick_successor(mdp, p, to_unit(words[0]));
        if (sigma > 0.0) {
            const auto noise = stream.block(draw, pair, 1);
            out.reward_obs[p] = rewards[p] + sigma * box_muller(noise[0], noise[1]);
        } else {
            out.reward_obs[p] = rewards[p];
        }
    }
}

void draw_sample(const MdpInstance& mdp, RngStream& stream, GenerativeSample& out) {
    draw_sample_at(mdp, stream, stream.counter().draws(), out);
    stream.counter().advance();
}

GenerativeSample draw_sample(const MdpInstance& mdp, RngStream& stream) {
    GenerativeSample s;
    draw_sample(mdp, stream, s);
    return s;
}

}  // namespace vrcq
