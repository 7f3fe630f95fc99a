#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrecon/core/error.hpp"
#include "vrecon/geometry/ortho_view.hpp"
#include "vrecon/img/image.hpp"

namespace vrecon::views {

// Pixel box, top-left origin.
struct BoundingBox {
  int x = 0, y = 0, w = 0, h = 0;
  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
  bool operator==(const BoundingBox&) const = default;
};

enum class Kind { Front, Back, Side, Top, Unresolved };
// PositiveAxis: drawn as the canonical camera sees it; NegativeAxis: mirrored.
enum class Facing { PositiveAxis, NegativeAxis, Unknown };

struct ViewLabel {
  Kind kind = Kind::Unresolved;
  Facing facing = Facing::Unknown;
  bool operator==(const ViewLabel&) const = default;
};

struct ViewEntry {
  img::GrayImage image;  // crop of `box` from the source blueprint
  BoundingBox box;
  ViewLabel label;
  std::optional<img::GrayImage> interior;  // windows-removed drawing, when known
  std::optional<img::GrayImage> mask;      // solid silhouette, when known
};

struct ViewSet {
  int source_width = 0;
  int source_height = 0;
  std::vector<ViewEntry> views;

  // Exactly one of each kind and facing known for Side/Top.
  bool finalized() const;
  const ViewEntry& get(Kind kind) const;
  ViewEntry& get(Kind kind);
};

const char* to_string(Kind kind);
const char* to_string(Facing facing);
Kind kind_from_string(const std::string& s);      // throws Invalid
Facing facing_from_string(const std::string& s);  // throws Invalid
geometry::ViewKind to_view_kind(Kind kind);

inline constexpr std::array<Kind, 4> kCanonicalOrder{Kind::Front, Kind::Back, Kind::Side, Kind::Top};

// The drawing for `kind` mirrored back into the canonical orientation.
img::GrayImage oriented_image(const ViewSet& set, Kind kind);
std::optional<img::GrayImage> oriented_mask(const ViewSet& set, Kind kind);

class TieUnresolvedError : public Error {
 public:
  TieUnresolvedError(const std::string& what, std::vector<BoundingBox> candidates)
      : Error(ErrorCode::TieUnresolved, what), candidates_(std::move(candidates)) {}
  const std::vector<BoundingBox>& candidates() const { return candidates_; }

 private:
  std::vector<BoundingBox> candidates_;
};

}  // namespace vrecon::views
