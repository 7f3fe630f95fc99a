#include "vrecon/views/json.hpp"

namespace vrecon::views {

using nlohmann::json;

json to_json(const ViewSet& set) {
  json views = json::array();
  for (const auto& v : set.views)
    views.push_back({{"box", {{"x", v.box.x}, {"y", v.box.y}, {"w", v.box.w}, {"h", v.box.h}}},
                     {"kind", to_string(v.label.kind)},
                     {"facing", to_string(v.label.facing)}});
  return {{"source_size", {{"width", set.source_width}, {"height", set.source_height}}},
          {"views", views}};
}

namespace {

bool is_int(const json& j, const char* key) {
  return j.is_object() && j.contains(key) && j[key].is_number_integer();
}

// Shape errors shared by parsing and validation.
std::vector<FieldError> shape_errors(const json& doc) {
  std::vector<FieldError> errs;
  if (!doc.is_object()) return {{"", "descriptor must be an object"}};
  if (doc.contains("source_size")) {
    const auto& s = doc["source_size"];
    if (!is_int(s, "width") || !is_int(s, "height"))
      errs.push_back({"source_size", "width and height must be integers"});
  }
  if (!doc.contains("views") || !doc["views"].is_array()) {
    errs.push_back({"views", "views must be an array"});
    return errs;
  }
  const auto& views = doc["views"];
  for (std::size_t i = 0; i < views.size(); ++i) {
    const std::string path = "views[" + std::to_string(i) + "]";
    const auto& v = views[i];
    if (!v.is_object()) { errs.push_back({path, "view must be an object"}); continue; }
    const json box = v.value("box", json());
    if (!is_int(box, "x") || !is_int(box, "y") || !is_int(box, "w") || !is_int(box, "h"))
      errs.push_back({path + ".box", "box needs integer x, y, w, h"});
    try {
      kind_from_string(v.value("kind", std::string()));
    } catch (const Error&) {
      errs.push_back({path + ".kind", "kind must be front, back, side, top or unresolved"});
    }
    try {
      facing_from_string(v.value("facing", std::string("unknown")));
    } catch (const Error&) {
      errs.push_back({path + ".facing", "facing must be positive, negative or unknown"});
    } catch (const json::exception&) {
      errs.push_back({path + ".facing", "facing must be a string"});
    }
  }
  return errs;
}

}  // namespace

ViewSet viewset_from_json(const json& doc) {
  std::vector<FieldError> errs;
  try {
    errs = shape_errors(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Invalid, std::string("malformed view descriptor: ") + e.what());
  }
  if (!errs.empty()) throw Error(ErrorCode::Invalid, errs.front().field + ": " + errs.front().message);
  ViewSet set;
  if (doc.contains("source_size")) {
    set.source_width = doc["source_size"]["width"].get<int>();
    set.source_height = doc["source_size"]["height"].get<int>();
  }
  for (const auto& v : doc["views"]) {
    ViewEntry e;
    const auto& b = v["box"];
    e.box = {b["x"].get<int>(), b["y"].get<int>(), b["w"].get<int>(), b["h"].get<int>()};
    e.label.kind = kind_from_string(v["kind"].get<std::string>());
    e.label.facing = facing_from_string(v.value("facing", std::string("unknown")));
    set.views.push_back(std::move(e));
  }
  return set;
}

std::vector<FieldError> validate_descriptor(const json& doc, int source_width, int source_height) {
  std::vector<FieldError> errs;
  try {
    errs = shape_errors(doc);
  } catch (const json::exception& e) {
    return {{"", std::string("malformed descriptor: ") + e.what()}};
  }
  if (!errs.empty()) return errs;
  const ViewSet set = viewset_from_json(doc);
  if (set.views.size() != 4) errs.push_back({"views", "exactly four views are required"});
  int seen[5] = {0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < set.views.size(); ++i) {
    const std::string path = "views[" + std::to_string(i) + "]";
    const auto& v = set.views[i];
    const auto& b = v.box;
    if (b.w <= 0 || b.h <= 0)
      errs.push_back({path + ".box", "width and height must be positive"});
    else if (b.x < 0 || b.y < 0 || b.x + b.w > source_width || b.y + b.h > source_height)
      errs.push_back({path + ".box", "box lies outside the image"});
    const int k = static_cast<int>(v.label.kind);
    if (v.label.kind == Kind::Unresolved)
      errs.push_back({path + ".kind", "every view needs a kind"});
    else if (seen[k]++)
      errs.push_back({path + ".kind", std::string("duplicate ") + to_string(v.label.kind) + " view"});
    if ((v.label.kind == Kind::Side || v.label.kind == Kind::Top) && v.label.facing == Facing::Unknown)
      errs.push_back({path + ".facing", "side and top views need a facing"});
  }
  return errs;
}

}  // namespace vrecon::views
