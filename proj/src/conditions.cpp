#include "egotext/conditions.hpp"

#include "egotext/fsutil.hpp"

namespace egotext {

std::string_view to_string(Lighting lighting) {
  switch (lighting) {
    case Lighting::kNatural:
      return "natural";
    case Lighting::kNaturalArtificial:
      return "natural+artificial";
    case Lighting::kNaturalEnhanced:
      return "natural+enhanced";
    case Lighting::kNight:
      return "night";
  }
  return "natural";
}

std::optional<Lighting> parse_lighting(std::string_view name) {
  for (Lighting l : kAllLightings) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

std::string ConditionMetadata::cell_key() const {
  return std::string(to_string(lighting)) + "|" + format_double(distance_m) + "|" +
         std::to_string(capture_width) + "x" + std::to_string(capture_height);
}

}  // namespace egotext
