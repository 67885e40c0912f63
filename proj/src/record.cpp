#include "nsatc/record.hpp"

#include <string>

#include "nsatc/error.hpp"

namespace nsatc {

namespace {

constexpr std::array<std::string_view, kRecordFields> kFieldNames{
    "tb_len",   "prb_count", "prb_start",         "mcs",         "epre_db",   "snr_db",
    "harq_ack", "cce_index", "aggregation_level", "format_type", "srs_bw_rb", "ack_nack"};

std::string where(const ChannelRecord& r) {
  return "record at frame " + std::to_string(r.time.frame) + " subframe " +
         std::to_string(r.time.subframe) + " " + std::string(to_string(r.time.slot)) + " " +
         std::string(to_string(r.channel));
}

}  // namespace

std::string_view to_string(RecordField field) { return kFieldNames[static_cast<int>(field)]; }

double ChannelRecord::value(RecordField field) const {
  switch (field) {
    case RecordField::TbLen: return tb_len;
    case RecordField::PrbCount: return prb_count;
    case RecordField::PrbStart: return prb_start;
    case RecordField::Mcs: return mcs;
    case RecordField::EpreDb: return epre_db;
    case RecordField::SnrDb: return snr_db;
    case RecordField::HarqAck: return harq_ack;
    case RecordField::CceIndex: return cce_index;
    case RecordField::AggregationLevel: return aggregation_level;
    case RecordField::FormatType: return format_type;
    case RecordField::SrsBwRb: return srs_bw_rb;
    case RecordField::AckNack: return ack_nack;
  }
  return 0.0;
}

bool canonical_less(const ChannelRecord& a, const ChannelRecord& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.channel < b.channel;
}

void validate_record(const ChannelRecord& r) {
  auto check = [&](bool ok, const char* msg) {
    if (!ok) fail(ErrorKind::Validation, where(r) + ": " + msg);
  };
  check(r.time.subframe < kSubframesPerFrame, "subframe outside 0..9");
  check(channel_valid_in(r.channel, r.time.slot), "PHICH is only valid in the LTE slot");
  bool shared = r.channel == ChannelKind::Pdsch || r.channel == ChannelKind::Pusch;
  check(shared || r.tb_len == 0, "tb_len is only carried by PDSCH/PUSCH");
  check(r.mcs <= 28, "mcs outside 0..28");
  check(r.harq_ack <= 1 && r.ack_nack <= 1, "binary indicator outside {0,1}");
  if (r.channel == ChannelKind::Pdcch) {
    auto al = r.aggregation_level;
    check(al == 1 || al == 2 || al == 4 || al == 8, "PDCCH aggregation level not in {1,2,4,8}");
  } else {
    check(r.cce_index == 0 && r.aggregation_level == 0, "CCE fields are PDCCH-only");
  }
  check(r.channel == ChannelKind::Pucch || r.format_type == 0, "format_type is PUCCH-only");
  check(r.channel == ChannelKind::Srs || r.srs_bw_rb == 0, "srs_bw_rb is SRS-only");
  check(r.channel == ChannelKind::Phich || r.ack_nack == 0, "ack_nack is PHICH-only");
}

}  // namespace nsatc
