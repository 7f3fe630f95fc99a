#pragma once

#include <string>
#include <vector>

#include "vrecon/views/viewset.hpp"

namespace vrecon::views {

// Blueprints are dark lines on a light background.
inline constexpr float kDefaultBlankThreshold = 0.98f;
inline constexpr float kInkThreshold = 0.5f;

// Recursively splits at the widest interior run of blank rows or columns (a
// line is blank when every pixel is >= blank_threshold) until `expected`
// regions exist. Returns tight content boxes; throws CutFailed otherwise.
std::vector<BoundingBox> line_cut(const img::GrayImage& img, int expected,
                                  float blank_threshold = kDefaultBlankThreshold);

// Boxes of the external outlines (ink plus enclosed regions), area >= min_area,
// by descending area.
std::vector<BoundingBox> contour_cut(const img::GrayImage& img, std::int64_t min_area,
                                     float ink_threshold = kInkThreshold);

// Keeps the four largest boxes. Of the two widest, the taller is Top and the
// other Side; the rest stay Unresolved for the user. Throws
// IdentificationFailed (< 4 boxes) or TieUnresolvedError.
ViewSet identify_views(std::vector<BoundingBox> boxes);

enum class ExtractStatus { Ok, TieUnresolved, ManualRequired };

struct ExtractResult {
  ExtractStatus status = ExtractStatus::ManualRequired;
  ViewSet views;                       // valid when status == Ok
  std::vector<BoundingBox> candidates; // best boxes found, for review
  std::string method;                  // "line", "contour" or ""
  std::string message;
};

// line_cut, then contour_cut on failure, then identify_views.
ExtractResult extract_views(const img::GrayImage& img, int expected = 4);

// Fills each entry's image by cropping its box out of `source`.
void attach_images(ViewSet& set, const img::GrayImage& source);

}  // namespace vrecon::views
