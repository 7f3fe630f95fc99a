#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vrecon/core/error.hpp"
#include "vrecon/field/train.hpp"
#include "vrecon/pipeline/config.hpp"

namespace vrecon::pipeline {

// 0 success, 1 internal error, 2 invalid input, 3 a human has to step in.
enum ExitCode { kOk = 0, kInternal = 1, kInvalidInput = 2, kNeedsHuman = 3 };
int exit_code_for(ErrorCode code);

// Mesh id used in file names and log tags: the file stem.
std::string mesh_id(const std::string& path);

// Per mesh: <samples>/<id>.sdfs and <id>.weights.ply. Failures are logged and
// skipped; the return value is nonzero when any mesh failed.
int cmd_prep(const std::vector<std::string>& meshes, const ProjectConfig& cfg, std::ostream& log);

// Per mesh: <blueprints>/<id>.png (sheet), <id>.json (descriptor), one crop
// per view <id>.<kind>.png and, with glass groups, <id>.interior.png.
int cmd_synth(const std::vector<std::string>& meshes, const ProjectConfig& cfg, std::ostream& log);

// Every <blueprints>/<id>.json paired with <samples>/<id>.sdfs.
std::vector<field::TrainExample> load_dataset(const ProjectConfig& cfg);

// Writes <checkpoints>/<name>.pafw, <name>.state and appends <name>.loss.csv.
// With `resume` it continues from <name>.state.
int cmd_train(const ProjectConfig& cfg, bool resume, std::ostream& log);

// Input is a blueprint PNG (auto-cut; front/back still need a person, so this
// ends with exit 3 unless the cut labels everything) or a descriptor JSON next
// to its sheet PNG (`image` overrides the sheet path).
int cmd_reconstruct(const std::string& input, const std::string& checkpoint, const std::string& output,
                    const ProjectConfig& cfg, std::ostream& log, const std::optional<std::string>& image = {});

// Prints IoU and Chamfer distance as JSON. Reconstructions come out in
// normalized units, so the truth is normalized first unless `raw_truth`.
int cmd_eval(const std::string& recon_mesh, const std::string& truth_mesh, std::ostream& out,
             std::size_t samples = 20000, int resolution = 128, bool raw_truth = false);

// Descriptor + sheet to a ViewSet with images (and interiors when the
// interior sheet exists).
views::ViewSet load_blueprint(const std::string& json_path, const std::optional<std::string>& image = {});

}  // namespace vrecon::pipeline
