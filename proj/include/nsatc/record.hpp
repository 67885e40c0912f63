#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "nsatc/grid.hpp"

namespace nsatc {

/// Numeric fields of a physical-channel record, in serialization order.
enum class RecordField : std::uint8_t {
  TbLen = 0,
  PrbCount,
  PrbStart,
  Mcs,
  EpreDb,
  SnrDb,
  HarqAck,
  CceIndex,
  AggregationLevel,
  FormatType,
  SrsBwRb,
  AckNack,
};
inline constexpr int kRecordFields = 12;

std::string_view to_string(RecordField field);

/// One merged record: everything a single physical channel carried in one
/// cell time unit. Channel-specific fields are zero on other channels.
struct ChannelRecord {
  TimeIndex time;
  ChannelKind channel = ChannelKind::Pdsch;
  std::uint32_t tb_len = 0;
  std::uint32_t prb_count = 0;
  std::uint32_t prb_start = 0;
  std::uint32_t mcs = 0;
  double epre_db = 0.0;
  double snr_db = 0.0;
  std::uint32_t harq_ack = 0;
  std::uint32_t cce_index = 0;
  std::uint32_t aggregation_level = 0;
  std::uint32_t format_type = 0;
  std::uint32_t srs_bw_rb = 0;
  std::uint32_t ack_nack = 0;

  double value(RecordField field) const;

  friend bool operator==(const ChannelRecord&, const ChannelRecord&) = default;
};

/// Canonical record order: time, then slot, then channel.
bool canonical_less(const ChannelRecord& a, const ChannelRecord& b);

/// Throws Validation when a record breaks a per-record invariant.
void validate_record(const ChannelRecord& record);

}  // namespace nsatc
