#include "vrecon/views/viewset.hpp"

#include "vrecon/img/ops.hpp"

namespace vrecon::views {

bool ViewSet::finalized() const {
  if (views.size() != 4) return false;
  int counts[4] = {0, 0, 0, 0};
  for (const auto& v : views) {
    if (v.label.kind == Kind::Unresolved) return false;
    ++counts[static_cast<int>(v.label.kind)];
    if ((v.label.kind == Kind::Side || v.label.kind == Kind::Top) && v.label.facing == Facing::Unknown)
      return false;
  }
  return counts[0] == 1 && counts[1] == 1 && counts[2] == 1 && counts[3] == 1;
}

const ViewEntry& ViewSet::get(Kind kind) const {
  for (const auto& v : views)
    if (v.label.kind == kind) return v;
  throw Error(ErrorCode::UnresolvedViews, std::string("view set has no ") + to_string(kind) + " view");
}

ViewEntry& ViewSet::get(Kind kind) {
  return const_cast<ViewEntry&>(static_cast<const ViewSet&>(*this).get(kind));
}

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::Front: return "front";
    case Kind::Back: return "back";
    case Kind::Side: return "side";
    case Kind::Top: return "top";
    case Kind::Unresolved: return "unresolved";
  }
  return "unresolved";
}

const char* to_string(Facing facing) {
  switch (facing) {
    case Facing::PositiveAxis: return "positive";
    case Facing::NegativeAxis: return "negative";
    case Facing::Unknown: return "unknown";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& s) {
  for (Kind k : {Kind::Front, Kind::Back, Kind::Side, Kind::Top, Kind::Unresolved})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::Invalid, "unknown view kind '" + s + "'");
}

Facing facing_from_string(const std::string& s) {
  for (Facing f : {Facing::PositiveAxis, Facing::NegativeAxis, Facing::Unknown})
    if (s == to_string(f)) return f;
  throw Error(ErrorCode::Invalid, "unknown facing '" + s + "'");
}

geometry::ViewKind to_view_kind(Kind kind) {
  switch (kind) {
    case Kind::Front: return geometry::ViewKind::Front;
    case Kind::Back: return geometry::ViewKind::Back;
    case Kind::Side: return geometry::ViewKind::Side;
    case Kind::Top: return geometry::ViewKind::Top;
    case Kind::Unresolved: break;
  }
  throw Error(ErrorCode::UnresolvedViews, "unresolved view has no camera");
}

img::GrayImage oriented_image(const ViewSet& set, Kind kind) {
  const auto& v = set.get(kind);
  return v.label.facing == Facing::NegativeAxis ? img::flip_horizontal(v.image) : v.image;
}

std::optional<img::GrayImage> oriented_mask(const ViewSet& set, Kind kind) {
  const auto& v = set.get(kind);
  if (!v.mask) return std::nullopt;
  return v.label.facing == Facing::NegativeAxis ? img::flip_horizontal(*v.mask) : *v.mask;
}

}  // namespace vrecon::views
