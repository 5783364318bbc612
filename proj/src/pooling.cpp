#include "phonecal/pooling.hpp"

#include <cmath>
#include <sstream>

namespace phonecal {

PoolMethod pool_method_from_string(const std::string& name) {
  if (name == "sum") return PoolMethod::kSum;
  if (name == "mean") return PoolMethod::kMean;
  if (name == "logdur") return PoolMethod::kLogDurMean;
  throw InvalidInput("unknown pooling method: " + name);
}

std::string to_string(PoolMethod m) {
  switch (m) {
    case PoolMethod::kSum: return "sum";
    case PoolMethod::kMean: return "mean";
    case PoolMethod::kLogDurMean: return "logdur";
  }
  return "?";
}

static void check_frames(std::span<const LogLikVector> frames) {
  if (frames.empty())
    throw InvalidInput("cannot pool a zero-length phone segment");
  const int n = frames[0].size();
  for (const auto& f : frames)
    if (f.size() != n)
      throw InvalidInput("frame log-likelihood vectors differ in length");
}

LogLikVector pool_sum(std::span<const LogLikVector> frames) {
  check_frames(frames);
  LogLikVector out = frames[0];
  for (size_t t = 1; t < frames.size(); ++t)
    for (int i = 0; i < out.size(); ++i)
      out.values[i] += frames[t].values[i];
  return out;
}

LogLikVector pool_mean(std::span<const LogLikVector> frames) {
  LogLikVector out = pool_sum(frames);
  const double n = static_cast<double>(frames.size());
  for (double& v : out.values) v /= n;
  return out;
}

LogLikVector pool_logdur_mean(std::span<const LogLikVector> frames) {
  LogLikVector out = pool_mean(frames);
  const double scale = std::log(static_cast<double>(frames.size()));
  for (double& v : out.values) v *= scale;
  return out;
}

LogLikVector pool_frames(std::span<const LogLikVector> frames, PoolMethod m) {
  switch (m) {
    case PoolMethod::kSum: return pool_sum(frames);
    case PoolMethod::kMean: return pool_mean(frames);
    case PoolMethod::kLogDurMean: return pool_logdur_mean(frames);
  }
  throw InvalidInput("bad pooling method");
}

std::vector<PhoneTrial> pool(
    const std::vector<PhoneSegment>& segments,
    const std::map<std::string, Matrix>& llk_by_utterance, PoolMethod method) {
  std::vector<PhoneTrial> trials;
  trials.reserve(segments.size());
  for (size_t s = 0; s < segments.size(); ++s) {
    const PhoneSegment& seg = segments[s];
    auto it = llk_by_utterance.find(seg.utterance_id);
    if (it == llk_by_utterance.end())
      throw InvalidInput("segment " + std::to_string(s) +
                         ": no log-likelihood matrix for utterance " +
                         seg.utterance_id);
    const Matrix& m = it->second;
    if (seg.start_frame < 0 || seg.end_frame > m.rows ||
        seg.end_frame <= seg.start_frame) {
      std::ostringstream os;
      os << "segment " << s << " in utterance " << seg.utterance_id
         << ": frames [" << seg.start_frame << "," << seg.end_frame
         << ") out of range for " << m.rows << "-frame matrix";
      throw InvalidInput(os.str());
    }
    std::vector<LogLikVector> frames;
    frames.reserve(seg.duration());
    for (int t = seg.start_frame; t < seg.end_frame; ++t) {
      LogLikVector v;
      v.values.assign(m.row(t), m.row(t) + m.cols);
      frames.push_back(std::move(v));
    }
    PhoneTrial trial;
    trial.true_phone = seg.phone;
    trial.llk = pool_frames(frames, method);
    trial.duration = seg.duration();
    trial.stress = seg.stress;
    trials.push_back(std::move(trial));
  }
  return trials;
}

}  // namespace phonecal
