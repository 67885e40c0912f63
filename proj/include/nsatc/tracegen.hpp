#pragma once

// Seeded synthetic physical-channel traces for two application classes.
//
// Each class is a two-state renewal process: activity bursts with
// exponentially distributed lengths separated by exponentially distributed
// idle gaps. Inside a subframe every (slot, channel) pair is present with a
// per-channel Bernoulli probability that depends on the state, and present
// records draw their fields from truncated Gaussians around the profile's
// baselines. Link quality (SNR, EPRE) follows a slow AR(1) drift per cell.
//
// Records emitted during idle gaps use a class-neutral control signature, so
// windows with little user data carry little class information.
//
// Randomness: std::mt19937_64 streams seeded by SplitMix64-derived substreams
// of the single trace seed (see rng.hpp).

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "nsatc/record.hpp"

namespace nsatc {

inline constexpr std::uint8_t kLabelWeb = 0;
inline constexpr std::uint8_t kLabelVideo = 1;

struct TrafficProfile {
  std::uint8_t label = kLabelWeb;
  double burst_period_ms = 100.0;  // mean idle gap between bursts
  double burst_duration_ms = 100.0;
  double dl_tb_len_mean = 200.0;
  double dl_tb_len_sd = 80.0;
  double ul_tb_len_mean = 60.0;
  double ul_tb_len_sd = 25.0;
  std::array<double, kChannelKinds> channel_occupancy{};  // indexed by ChannelKind
  std::array<double, kChannelKinds> idle_occupancy{};
  double snr_mean_db = 20.0;
  double epre_mean_db = -90.0;
  double mcs_mean = 16.0;

  // Control-channel signature during bursts. PDCCH CCE indices come from a
  // two-component mixture centred on cce_center; PUCCH EPRE is offset by
  // +/- pucch_epre_split_db with probability pucch_split_prob.
  double cce_center = 20.0;
  double cce_narrow_sd = 3.0;
  double cce_wide_sd = 12.0;
  double cce_wide_prob = 0.5;
  double pucch_epre_split_db = 4.0;
  double pucch_split_prob = 0.5;

  /// Throws InputDomain when a probability, mean, or deviation is out of range.
  void validate() const;
};

struct LabeledTrace {
  std::vector<ChannelRecord> records;  // canonical order
  std::vector<std::uint8_t> labels;    // one per frame
  std::uint64_t seed = 0;
  std::uint64_t duration_ms = 0;

  std::uint32_t frames() const { return static_cast<std::uint32_t>(labels.size()); }

  friend bool operator==(const LabeledTrace&, const LabeledTrace&) = default;
};

/// (web navigation, video streaming) with the shipped benchmark parameters.
std::pair<TrafficProfile, TrafficProfile> default_profiles();

/// Web-labelled profile that never leaves its idle state: background control
/// records only, far below any practical filter threshold.
TrafficProfile idle_profile();

/// Deterministic in (profile, duration_ms, seed). duration_ms must be a
/// positive multiple of 10.
LabeledTrace generate_trace(const TrafficProfile& profile, std::uint64_t duration_ms,
                            std::uint64_t seed);

struct TraceSegment {
  TrafficProfile profile;
  std::uint64_t duration_ms = 0;
};

/// Concatenated segments; labels switch at segment boundaries.
LabeledTrace generate_mixed_trace(const std::vector<TraceSegment>& segments, std::uint64_t seed);

/// Throws Validation on the first record or label that breaks a trace
/// invariant (ordering, uniqueness, per-record rules, label coverage).
void validate_trace(const LabeledTrace& trace);

}  // namespace nsatc
