#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vrecon/views/viewset.hpp"

namespace vrecon::views {

// {"source_size": {"width", "height"},
//  "views": [{"box": {"x","y","w","h"}, "kind", "facing"}]}
nlohmann::json to_json(const ViewSet& set);

struct FieldError {
  std::string field;  // JSON path, e.g. "views[2].box"
  std::string message;
};

// Structural checks for a finalized descriptor against a source image size:
// four views, boxes inside the image, one of each kind, facing for side/top.
std::vector<FieldError> validate_descriptor(const nlohmann::json& doc, int source_width,
                                            int source_height);

// Parses the descriptor (images are not attached). Throws Invalid with the
// first field error when the document is malformed; labels may be partial.
ViewSet viewset_from_json(const nlohmann::json& doc);

}  // namespace vrecon::views
