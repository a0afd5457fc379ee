#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "patsim/corpus.hpp"

namespace patsim {

/// Generator for one smooth effect on a covariate range [lo, hi]:
/// f(x) = slope*z + amplitude*sin(2*pi*frequency*z + phase) + decay*exp(-decay_rate*z),
/// with z = (x - lo) / (hi - lo) clamped to [0, 1].
struct SmoothShape {
  double lo = 0.0;
  double hi = 1.0;
  double slope = 0.0;
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;
  double decay = 0.0;
  double decay_rate = 1.0;

  double operator()(double x) const;
  bool operator==(const SmoothShape&) const = default;
};

/// True effects used to generate synthetic similarity responses.
struct SynthProfile {
  double intercept = 45.0;
  double noise_sd = 12.0;
  SmoothShape pub_date;
  SmoothShape temporal_lag;
  SmoothShape log_citations;
  double same_org = 0.0;
  double sender_org = 0.0;
  double receiver_org = 0.0;
  std::array<double, 5> jaccard{};  // section .. sub-group

  /// Effects of the magnitude reported for the real corpus.
  static SynthProfile standard();
  /// All effects zero: responses are noise around the intercept.
  static SynthProfile null_effects();

  bool operator==(const SynthProfile&) const = default;
};

struct SynthCorpus {
  CorpusStore corpus;
  SynthProfile profile;
  std::uint64_t seed = 0;
};

/// Deterministic synthetic corpus. Grant dates fall in [1976-01-01, 2021-09-30];
/// receivers are mostly granted before their senders, often share the
/// sender's technology subclass and sometimes its assignee. Throws
/// ValidationError when n_edges cannot be realised with n_patents.
SynthCorpus synth_corpus(std::uint64_t seed, std::size_t n_patents, std::size_t n_edges,
                         const SynthProfile& profile);

std::string ground_truth_json(const SynthCorpus& synth);
void write_ground_truth(const std::filesystem::path& path, const SynthCorpus& synth);

/// Profile and seed recorded by write_ground_truth.
struct GroundTruth {
  SynthProfile profile;
  std::uint64_t seed = 0;
};
GroundTruth read_ground_truth(const std::filesystem::path& path);

}  // namespace patsim
