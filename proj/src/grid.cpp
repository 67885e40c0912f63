#include "nsatc/grid.hpp"

#include <string>

#include "nsatc/error.hpp"

namespace nsatc {

namespace {

constexpr std::array<ChannelKind, 6> kLteChannels{ChannelKind::Pdsch, ChannelKind::Pusch,
                                                  ChannelKind::Pdcch, ChannelKind::Pucch,
                                                  ChannelKind::Srs,   ChannelKind::Phich};
constexpr std::array<ChannelKind, 5> kNrChannels{ChannelKind::Pdsch, ChannelKind::Pusch,
                                                 ChannelKind::Pdcch, ChannelKind::Pucch,
                                                 ChannelKind::Srs};

constexpr std::array<std::string_view, 3> kSlotNames{"LTE", "NR1", "NR2"};
constexpr std::array<std::string_view, 6> kChannelNames{"PDSCH", "PUSCH", "PDCCH",
                                                        "PUCCH", "SRS",   "PHICH"};

}  // namespace

const Numerology& numerology_of(CellSlot slot) {
  return slot == CellSlot::Lte ? kLteNumerology : kNrNumerology;
}

double TimeIndex::start_ms() const {
  double t = kFrameMs * frame + kSubframeMs * subframe;
  if (slot == CellSlot::Nr2) t += kNrNumerology.time_unit_ms;
  return t;
}

std::array<TimeIndex, 3> time_units_of_subframe(std::uint32_t frame, int subframe) {
  if (subframe < 0 || subframe >= kSubframesPerFrame)
    fail(ErrorKind::InputDomain, "subframe " + std::to_string(subframe) + " outside 0..9");
  auto sf = static_cast<std::uint8_t>(subframe);
  return {TimeIndex{frame, sf, CellSlot::Lte}, TimeIndex{frame, sf, CellSlot::Nr1},
          TimeIndex{frame, sf, CellSlot::Nr2}};
}

std::span<const ChannelKind> channels_for(CellSlot slot) {
  if (slot == CellSlot::Lte) return kLteChannels;
  return kNrChannels;
}

bool channel_valid_in(ChannelKind channel, CellSlot slot) {
  return channel != ChannelKind::Phich || slot == CellSlot::Lte;
}

std::string_view to_string(CellSlot slot) { return kSlotNames[static_cast<int>(slot)]; }

std::string_view to_string(ChannelKind channel) {
  return kChannelNames[static_cast<int>(channel)];
}

std::optional<CellSlot> parse_cell_slot(std::string_view text) {
  for (std::size_t i = 0; i < kSlotNames.size(); ++i)
    if (kSlotNames[i] == text) return static_cast<CellSlot>(i);
  return std::nullopt;
}

std::optional<ChannelKind> parse_channel(std::string_view text) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i)
    if (kChannelNames[i] == text) return static_cast<ChannelKind>(i);
  return std::nullopt;
}

}  // namespace nsatc
