#include "nsatc/tracegen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsatc/error.hpp"
#include "nsatc/rng.hpp"

namespace nsatc {

namespace {

constexpr std::uint32_t kLtePrbs = 100;
constexpr std::uint32_t kNrPrbs = 106;
constexpr std::uint32_t kMaxCce = 87;

// Control signature used while no burst is active, shared by every class.
struct ControlSignature {
  double cce_center, cce_narrow_sd, cce_wide_sd, cce_wide_prob;
  double pucch_split_db, pucch_split_prob;
};
constexpr ControlSignature kIdleSignature{20.0, 3.0, 12.0, 0.3, 4.0, 0.3};

enum Substream : std::uint64_t { kBurst = 1, kOccupancy = 2, kValues = 3, kDrift = 4 };

double round_tenth(double x) { return std::round(x * 10.0) / 10.0; }

std::uint32_t to_count(double x, double lo, double hi) {
  return static_cast<std::uint32_t>(std::clamp(std::round(x), lo, hi));
}

void check_prob(double p, const char* name) {
  require(p >= 0.0 && p <= 1.0, ErrorKind::InputDomain,
          std::string("profile ") + name + " must lie in [0,1]");
}

void check_positive(double x, const char* name) {
  require(x > 0.0, ErrorKind::InputDomain, std::string("profile ") + name + " must be > 0");
}

void check_duration(std::uint64_t duration_ms) {
  if (duration_ms == 0 || duration_ms % 10 != 0)
    fail(ErrorKind::InputDomain, "duration " + std::to_string(duration_ms) +
                                     " ms is not a positive multiple of 10 ms");
}

class TraceBuilder {
 public:
  explicit TraceBuilder(std::uint64_t seed)
      : burst_(derive_seed(seed, kBurst)),
        occupancy_(derive_seed(seed, kOccupancy)),
        values_(derive_seed(seed, kValues)),
        drift_rng_(derive_seed(seed, kDrift)) {}

  void append_segment(const TrafficProfile& p, std::uint64_t duration_ms, LabeledTrace& out) {
    auto first_frame = static_cast<std::uint32_t>(out.labels.size());
    auto frames = static_cast<std::uint32_t>(duration_ms / 10);
    out.labels.insert(out.labels.end(), frames, p.label);

    // Restart the renewal process in its stationary state.
    double duty = p.burst_duration_ms / (p.burst_duration_ms + p.burst_period_ms);
    active_ = burst_.bernoulli(duty);
    remaining_ = draw_sojourn(p);

    for (std::uint32_t f = first_frame; f < first_frame + frames; ++f) {
      for (int sf = 0; sf < kSubframesPerFrame; ++sf) {
        if (remaining_ == 0) {
          active_ = !active_;
          remaining_ = draw_sojourn(p);
        }
        --remaining_;
        step_drift();
        for (const TimeIndex& t : time_units_of_subframe(f, sf)) {
          bool dl = false, ul = false;
          for (ChannelKind ch : channels_for(t.slot)) {
            bool here = present(p, ch, dl, ul);
            if (here) out.records.push_back(make_record(p, t, ch));
            if (ch == ChannelKind::Pdsch) dl = here;
            if (ch == ChannelKind::Pusch) ul = here;
          }
        }
      }
    }
    out.duration_ms += duration_ms;
  }

 private:
  // During bursts, grants (PDCCH) need a data allocation in the same unit and
  // uplink control (PUCCH) needs downlink data to acknowledge. Background
  // control traffic follows the idle occupancy in both states.
  bool present(const TrafficProfile& p, ChannelKind ch, bool dl, bool ul) {
    auto c = static_cast<int>(ch);
    if (!active_) return occupancy_.bernoulli(p.idle_occupancy[c]);
    double occ = p.channel_occupancy[c];
    switch (ch) {
      case ChannelKind::Pdcch:
        return occupancy_.bernoulli((dl || ul) ? occ : p.idle_occupancy[c]);
      case ChannelKind::Pucch:
        return occupancy_.bernoulli(dl ? occ : p.idle_occupancy[c]);
      default:
        return occupancy_.bernoulli(occ);
    }
  }

  std::uint32_t draw_sojourn(const TrafficProfile& p) {
    double mean = active_ ? p.burst_duration_ms : p.burst_period_ms;
    return static_cast<std::uint32_t>(std::max(1.0, std::round(burst_.exponential(mean))));
  }

  void step_drift() {
    for (int cell = 0; cell < 2; ++cell) {
      snr_drift_[cell] = 0.98 * snr_drift_[cell] + drift_rng_.normal(0.0, 0.2);
      epre_drift_[cell] = 0.98 * epre_drift_[cell] + drift_rng_.normal(0.0, 0.1);
    }
  }

  ChannelRecord make_record(const TrafficProfile& p, const TimeIndex& t, ChannelKind ch) {
    const int cell = t.slot == CellSlot::Lte ? 0 : 1;
    const std::uint32_t max_prb = cell == 0 ? kLtePrbs : kNrPrbs;
    const ControlSignature sig =
        active_ ? ControlSignature{p.cce_center, p.cce_narrow_sd, p.cce_wide_sd, p.cce_wide_prob,
                                   p.pucch_epre_split_db, p.pucch_split_prob}
                : kIdleSignature;

    ChannelRecord r;
    r.time = t;
    r.channel = ch;
    double snr = p.snr_mean_db + snr_drift_[cell] + values_.normal(0.0, 1.0);
    double epre = p.epre_mean_db - 3.0 * cell + epre_drift_[cell] + values_.normal(0.0, 0.5);
    r.snr_db = round_tenth(snr);
    r.epre_db = round_tenth(epre);

    switch (ch) {
      case ChannelKind::Pdsch:
      case ChannelKind::Pusch: {
        bool dl = ch == ChannelKind::Pdsch;
        double mean = dl ? p.dl_tb_len_mean : p.ul_tb_len_mean;
        double sd = dl ? p.dl_tb_len_sd : p.ul_tb_len_sd;
        r.tb_len = to_count(values_.normal(mean, sd), 0.0, 1e9);
        r.mcs = to_count(p.mcs_mean + 0.5 * (snr - p.snr_mean_db) + values_.normal(0.0, 1.5),
                         0.0, 28.0);
        double bytes_per_prb = (8.0 + 4.0 * r.mcs) * numerology_of(t.slot).time_unit_ms;
        r.prb_count = to_count(std::ceil(r.tb_len / bytes_per_prb), 1.0, max_prb);
        r.prb_start = static_cast<std::uint32_t>(values_.uniform_int(0, max_prb - r.prb_count));
        r.harq_ack = values_.bernoulli(0.92) ? 1 : 0;
        break;
      }
      case ChannelKind::Pdcch: {
        double sd = values_.bernoulli(sig.cce_wide_prob) ? sig.cce_wide_sd : sig.cce_narrow_sd;
        r.cce_index = to_count(values_.normal(sig.cce_center, sd), 0.0, kMaxCce);
        double u = values_.uniform();
        r.aggregation_level = u < 0.4 ? 1 : u < 0.7 ? 2 : u < 0.9 ? 4 : 8;
        r.prb_count = r.aggregation_level;
        break;
      }
      case ChannelKind::Pucch: {
        if (values_.bernoulli(sig.pucch_split_prob))
          epre += values_.bernoulli(0.5) ? sig.pucch_split_db : -sig.pucch_split_db;
        r.epre_db = round_tenth(epre + values_.normal(0.0, 1.0));
        r.format_type = values_.bernoulli(0.7) ? 1 : 2;
        r.prb_count = 1;
        r.prb_start = max_prb - 1;
        break;
      }
      case ChannelKind::Srs: {
        static constexpr std::uint32_t kSrsBandwidths[] = {4, 8, 16, 32};
        r.srs_bw_rb = kSrsBandwidths[values_.uniform_int(0, 3)];
        r.prb_count = r.srs_bw_rb;
        break;
      }
      case ChannelKind::Phich:
        r.ack_nack = values_.bernoulli(0.9) ? 1 : 0;
        break;
    }
    return r;
  }

  Rng burst_, occupancy_, values_, drift_rng_;
  bool active_ = false;
  std::uint32_t remaining_ = 0;
  double snr_drift_[2] = {0.0, 0.0};
  double epre_drift_[2] = {0.0, 0.0};
};

}  // namespace

void TrafficProfile::validate() const {
  require(label <= 1, ErrorKind::InputDomain, "profile label must be 0 or 1");
  check_positive(burst_period_ms, "burst_period_ms");
  check_positive(burst_duration_ms, "burst_duration_ms");
  check_positive(dl_tb_len_mean, "dl_tb_len_mean");
  check_positive(ul_tb_len_mean, "ul_tb_len_mean");
  require(dl_tb_len_sd >= 0 && ul_tb_len_sd >= 0 && cce_narrow_sd >= 0 && cce_wide_sd >= 0,
          ErrorKind::InputDomain, "profile standard deviations must be >= 0");
  for (int c = 0; c < kChannelKinds; ++c) {
    check_prob(channel_occupancy[c], "channel_occupancy");
    check_prob(idle_occupancy[c], "idle_occupancy");
  }
  check_prob(cce_wide_prob, "cce_wide_prob");
  check_prob(pucch_split_prob, "pucch_split_prob");
}

std::pair<TrafficProfile, TrafficProfile> default_profiles() {
  //                      PDSCH PUSCH PDCCH PUCCH  SRS  PHICH
  TrafficProfile web;
  web.label = kLabelWeb;
  web.burst_period_ms = 150.0;
  web.burst_duration_ms = 80.0;
  web.dl_tb_len_mean = 220.0;
  web.dl_tb_len_sd = 90.0;
  web.ul_tb_len_mean = 70.0;
  web.ul_tb_len_sd = 30.0;
  web.channel_occupancy = {0.80, 0.50, 0.90, 0.60, 0.20, 0.50};
  web.idle_occupancy = {0.02, 0.03, 0.05, 0.20, 0.10, 0.03};
  web.cce_narrow_sd = 2.0;
  web.cce_wide_sd = 14.0;
  web.cce_wide_prob = 0.7;
  web.pucch_epre_split_db = 5.0;
  web.pucch_split_prob = 0.6;

  TrafficProfile video = web;
  video.label = kLabelVideo;
  video.burst_period_ms = 50.0;
  video.burst_duration_ms = 200.0;
  video.dl_tb_len_mean = 230.0;
  video.cce_wide_prob = 0.1;
  video.pucch_split_prob = 0.05;
  return {web, video};
}

TrafficProfile idle_profile() {
  TrafficProfile idle = default_profiles().first;
  idle.channel_occupancy = idle.idle_occupancy;
  return idle;
}

LabeledTrace generate_trace(const TrafficProfile& profile, std::uint64_t duration_ms,
                            std::uint64_t seed) {
  return generate_mixed_trace({TraceSegment{profile, duration_ms}}, seed);
}

LabeledTrace generate_mixed_trace(const std::vector<TraceSegment>& segments, std::uint64_t seed) {
  require(!segments.empty(), ErrorKind::InputDomain, "mixed trace needs at least one segment");
  for (const auto& s : segments) {
    check_duration(s.duration_ms);
    s.profile.validate();
  }
  LabeledTrace trace;
  trace.seed = seed;
  TraceBuilder builder(seed);
  for (const auto& s : segments) builder.append_segment(s.profile, s.duration_ms, trace);
  return trace;
}

void validate_trace(const LabeledTrace& trace) {
  require(trace.duration_ms % 10 == 0, ErrorKind::Validation,
          "trace duration is not a whole number of frames");
  require(trace.labels.size() == trace.duration_ms / 10, ErrorKind::Validation,
          "trace must carry exactly one label per frame");
  for (std::size_t i = 0; i < trace.labels.size(); ++i)
    require(trace.labels[i] <= 1, ErrorKind::Validation,
            "frame " + std::to_string(i) + " has a non-binary label");
  const ChannelRecord* prev = nullptr;
  for (const auto& r : trace.records) {
    validate_record(r);
    require(r.time.frame < trace.frames(), ErrorKind::Validation,
            "record at frame " + std::to_string(r.time.frame) + " lies beyond the trace end");
    if (prev && !canonical_less(*prev, r))
      fail(ErrorKind::Validation, "records out of canonical order or duplicated at frame " +
                                      std::to_string(r.time.frame) + " subframe " +
                                      std::to_string(r.time.subframe));
    prev = &r;
  }
}

}  // namespace nsatc
