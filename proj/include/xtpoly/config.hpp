#pragma once

#include "xtpoly/assembly.hpp"
#include "xtpoly/verify.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xtpoly {

enum class SourceKind : std::uint8_t { None, Manufactured, MomentPoint };

struct ReceiverSpec {
  std::string name;
  Vec2 x{0.0, 0.0};
};

struct OutputSpec {
  std::filesystem::path receiver_dir;  // one <name>.csv per receiver; empty disables
  std::filesystem::path snapshot_dir;  // snapshot_<slab>.vtk; empty disables
  int snapshot_every = 0;              // slabs between snapshots
  std::filesystem::path energy_csv;    // t,energy,dissipated,total; empty disables
  std::filesystem::path report;        // text report; empty disables
};

/// Everything needed for one simulation. Produced by parse_config, which validates.
struct SimulationConfig {
  std::vector<RegionRect> rectangles;  // used when mesh_file is empty
  std::filesystem::path mesh_file;
  Materials materials;
  BoundaryConditions bc;
  double delta = 1.0;
  PenaltyParams penalty;
  int n_elements = 0;  // derived from h when only h is given
  double h = 0.0;
  int p_e = 2;
  int p_p = 2;
  double dt = 0.0;
  int r = 1;
  double T = 0.0;
  SourceKind source = SourceKind::None;
  std::vector<PointSource> point_sources;
  std::vector<ReceiverSpec> receivers;
  OutputSpec outputs;
  std::uint64_t seed = 1;
  bool condition_estimate = false;

  int num_slabs() const;
};

/// Parses and validates a JSON document. Throws ValidationError listing every issue.
SimulationConfig parse_config(const std::string& json_text);
SimulationConfig load_config(const std::filesystem::path& path);

/// Cross-checks that need the mesh: receivers and sources must lie inside it.
/// Throws ValidationError.
void validate_against_mesh(const SimulationConfig& cfg, const PolyMesh& mesh);

/// One sweep of the verify command.
struct StudySpec {
  std::string name;
  SweepVariable variable = SweepVariable::H;
  std::string metric = "energy";
  std::vector<RunParams> points;
  std::filesystem::path csv;  // empty disables
};

struct StudyConfig {
  Materials materials = ManufacturedCase::default_materials();
  double delta = 1.0;
  std::vector<StudySpec> studies;
  std::filesystem::path report;  // empty disables
};

StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace xtpoly
