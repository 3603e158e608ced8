#pragma once

#include <string>

#include "egotext/geometry.hpp"

namespace egotext {

// Annotated text instance.
struct GroundTruthRegion {
  Box box;
  std::string text;

  friend bool operator==(const GroundTruthRegion&, const GroundTruthRegion&) = default;
};

// Pipeline output: a merged detection and what the recognizer read in it.
struct TextRegion {
  Box box;
  std::string text;
  double detection_confidence = 1.0;
  double recognition_confidence = 0.0;
  bool error = false;      // recognizer failed on this crop; text is empty
  bool truncated = false;  // region was cut by a processing-window border
  std::string error_message;
};

}  // namespace egotext
