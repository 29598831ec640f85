#pragma once

#include "xtpoly/config.hpp"
#include "xtpoly/output.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xtpoly {

struct PhaseTiming {
  std::string name;
  double seconds = 0.0;
};

struct SimulationResult {
  int n_elements = 0;
  double h = 0.0;  // sqrt(|domain| / n_elements)
  int ndof = 0;
  long long nnz_M = 0, nnz_D = 0, nnz_K = 0, nnz_slab = 0, factor_nnz = 0;
  double cond_est = 0.0;  // 0 unless requested
  std::vector<PhaseTiming> phases;
  std::vector<ReceiverSeries> receivers;
  std::vector<EnergySample> energy;  // slab ends, entry 0 at t = 0
  SlabState final;
  std::optional<ErrorReport> errors;  // manufactured source only
  std::vector<std::filesystem::path> written;
};

struct RunOptions {
  bool write_outputs = true;  // false keeps everything in memory
  std::ostream* log = nullptr;
};

/// Builds the mesh, space and operators from a validated configuration, integrates to T
/// and writes the requested outputs. Throws ValidationError for inputs that only the
/// mesh can reject, InstabilityError or SolverError on runtime failure.
SimulationResult run_simulation(const SimulationConfig& cfg, const RunOptions& opts = {});

void write_run_report(std::ostream& out, const SimulationConfig& cfg, const SimulationResult& res);

}  // namespace xtpoly
