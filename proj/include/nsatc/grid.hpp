#pragma once

// Time/frequency resource model of a 5G non-standalone deployment: one LTE
// cell (15 kHz, 1 ms units) paired with one NR cell (30 kHz, 0.5 ms units).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace nsatc {

struct Numerology {
  double scs_khz;
  int symbols_per_time_unit;
  int subcarriers_per_rb;
  double time_unit_ms;

  int resource_elements_per_rb() const { return symbols_per_time_unit * subcarriers_per_rb; }
};

// Two 7-symbol slots per LTE RB, one 14-symbol slot per NR RB.
inline constexpr Numerology kLteNumerology{15.0, 14, 12, 1.0};
inline constexpr Numerology kNrNumerology{30.0, 14, 12, 0.5};

inline constexpr int kSubframesPerFrame = 10;
inline constexpr double kSubframeMs = 1.0;
inline constexpr double kFrameMs = 10.0;

enum class CellSlot : std::uint8_t { Lte = 0, Nr1 = 1, Nr2 = 2 };
inline constexpr std::array<CellSlot, 3> kCellSlots{CellSlot::Lte, CellSlot::Nr1, CellSlot::Nr2};

// Canonical channel order.
enum class ChannelKind : std::uint8_t { Pdsch = 0, Pusch, Pdcch, Pucch, Srs, Phich };
inline constexpr int kChannelKinds = 6;

const Numerology& numerology_of(CellSlot slot);

struct TimeIndex {
  std::uint32_t frame = 0;
  std::uint8_t subframe = 0;
  CellSlot slot = CellSlot::Lte;

  double start_ms() const;
  double duration_ms() const { return numerology_of(slot).time_unit_ms; }
  std::uint64_t absolute_subframe() const {
    return static_cast<std::uint64_t>(frame) * kSubframesPerFrame + subframe;
  }

  friend bool operator==(const TimeIndex&, const TimeIndex&) = default;
  // Time order, ties broken by slot position inside the subframe.
  friend auto operator<=>(const TimeIndex& a, const TimeIndex& b) {
    if (auto c = a.frame <=> b.frame; c != 0) return c;
    if (auto c = a.subframe <=> b.subframe; c != 0) return c;
    return static_cast<int>(a.slot) <=> static_cast<int>(b.slot);
  }
};

/// The three cell time units of one subframe, in [LTE, NR1, NR2] order.
/// Throws InputDomain when subframe is outside 0..9.
std::array<TimeIndex, 3> time_units_of_subframe(std::uint32_t frame, int subframe);

/// Channels carried by a cell slot in canonical order. PHICH is LTE-only.
std::span<const ChannelKind> channels_for(CellSlot slot);

bool channel_valid_in(ChannelKind channel, CellSlot slot);

std::string_view to_string(CellSlot slot);
std::string_view to_string(ChannelKind channel);
std::optional<CellSlot> parse_cell_slot(std::string_view text);
std::optional<ChannelKind> parse_channel(std::string_view text);

}  // namespace nsatc
