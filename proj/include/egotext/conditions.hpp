#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace egotext {

enum class Lighting { kNatural, kNaturalArtificial, kNaturalEnhanced, kNight };

inline constexpr std::array kAllLightings = {Lighting::kNatural, Lighting::kNaturalArtificial,
                                             Lighting::kNaturalEnhanced, Lighting::kNight};

// Canonical names: "natural", "natural+artificial", "natural+enhanced", "night".
std::string_view to_string(Lighting lighting);
std::optional<Lighting> parse_lighting(std::string_view name);

// Experimental axes of one capture.
struct ConditionMetadata {
  Lighting lighting = Lighting::kNatural;
  double distance_m = 0.5;
  int capture_width = 0;
  int capture_height = 0;

  bool valid() const { return distance_m > 0.0 && capture_width > 0 && capture_height > 0; }

  // "natural|0.5|1408x1408"; identifies a condition cell.
  std::string cell_key() const;

  friend bool operator==(const ConditionMetadata&, const ConditionMetadata&) = default;
};

}  // namespace egotext
