#ifndef PHONECAL_POOLING_HPP
#define PHONECAL_POOLING_HPP

#include <map>
#include <span>
#include <string>

#include "phonecal/types.hpp"

namespace phonecal {

enum class PoolMethod { kSum, kMean, kLogDurMean };

PoolMethod pool_method_from_string(const std::string& name);
std::string to_string(PoolMethod m);

// Componentwise sum of the frame vectors, in frame order.
LogLikVector pool_sum(std::span<const LogLikVector> frames);

// Sum divided by the frame count.
LogLikVector pool_mean(std::span<const LogLikVector> frames);

// Mean scaled by ln(n); a single-frame phone pools to the zero vector.
LogLikVector pool_logdur_mean(std::span<const LogLikVector> frames);

LogLikVector pool_frames(std::span<const LogLikVector> frames, PoolMethod m);

// Joins alignment segments to frame log-likelihood matrices and pools each
// segment's rows into one PhoneTrial, in segment order.
std::vector<PhoneTrial> pool(
    const std::vector<PhoneSegment>& segments,
    const std::map<std::string, Matrix>& llk_by_utterance, PoolMethod method);

}  // namespace phonecal

#endif
