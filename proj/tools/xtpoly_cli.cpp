// xtpoly command-line tool: run, verify, mesh gen|check.
// Exit codes: 0 success, 2 validation error, 3 runtime failure.

#include "xtpoly/config.hpp"
#include "xtpoly/driver.hpp"
#include "xtpoly/error.hpp"
#include "xtpoly/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

using namespace xtpoly;

int cmd_run(const std::string& path, bool quiet, bool no_outputs) {
  const SimulationConfig cfg = load_config(path);
  RunOptions opts;
  opts.write_outputs = !no_outputs;
  opts.log = quiet ? nullptr : &std::cerr;
  if (!quiet) std::cerr << "[run] " << path << " threads=" << num_threads() << std::endl;
  const SimulationResult res = run_simulation(cfg, opts);
  if (!quiet) {
    if (res.errors)
      std::cout << "L2 " << format_double(res.errors->l2) << "  energy "
                << format_double(res.errors->energy) << "\n";
    for (const auto& p : res.written) std::cout << "wrote " << p.string() << "\n";
  }
  return kOk;
}

int cmd_verify(const std::string& path, bool quiet) {
  const StudyConfig cfg = load_study_config(path);
  std::ostringstream report;
  for (const auto& st : cfg.studies) {
    if (!quiet) std::cerr << "[verify] " << st.name << ": " << to_string(st.variable) << " sweep, "
                          << st.points.size() << " points" << std::endl;
    const ManufacturedCase mcase(cfg.materials, cfg.delta);
    const StudyResult res =
        convergence_study(mcase, st.points, st.variable, st.metric, quiet ? nullptr : &std::cerr);
    if (!st.csv.empty()) {
      if (st.csv.has_parent_path()) std::filesystem::create_directories(st.csv.parent_path());
      write_study_csv(st.csv, res);
      if (!quiet) std::cout << "wrote " << st.csv.string() << "\n";
    }
    report << "## " << st.name << "\n";
    write_study_report(report, res);
    report << "\n";
    std::cout << st.name << ": " << to_string(st.variable) << " slope (" << st.metric
              << ") = " << format_double(res.slope) << (res.monotone ? "" : " (not monotone)") << "\n";
  }
  if (!cfg.report.empty()) {
    if (cfg.report.has_parent_path()) std::filesystem::create_directories(cfg.report.parent_path());
    std::ofstream out(cfg.report);
    if (!out) throw std::runtime_error("cannot open " + cfg.report.string() + " for writing");
    out << report.str();
    if (!quiet) std::cout << "wrote " << cfg.report.string() << "\n";
  }
  return kOk;
}

RegionRect parse_rect(const std::string& s) {
  // region:xmin:xmax:ymin:ymax
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.size() != 5) throw ValidationError({"--rect '" + s + "': expected region:xmin:xmax:ymin:ymax"});
  RegionRect r;
  if (parts[0] == "elastic") r.region = Region::Elastic;
  else if (parts[0] == "poroelastic") r.region = Region::Poroelastic;
  else throw ValidationError({"--rect '" + s + "': region must be elastic or poroelastic"});
  try {
    r.xmin = std::stod(parts[1]);
    r.xmax = std::stod(parts[2]);
    r.ymin = std::stod(parts[3]);
    r.ymax = std::stod(parts[4]);
  } catch (const std::exception&) {
    throw ValidationError({"--rect '" + s + "': bounds must be numbers"});
  }
  if (!(r.xmin < r.xmax && r.ymin < r.ymax))
    throw ValidationError({"--rect '" + s + "': needs xmin < xmax and ymin < ymax"});
  return r;
}

int cmd_mesh_gen(const std::string& config, const std::vector<std::string>& rects, int n,
                 long long seed, const std::string& out) {
  std::vector<RegionRect> regions;
  std::uint64_t s = seed < 0 ? 1 : static_cast<std::uint64_t>(seed);
  if (!config.empty()) {
    const SimulationConfig cfg = load_config(config);
    if (!cfg.mesh_file.empty()) throw ValidationError({"--config: geometry already names a mesh file"});
    regions = cfg.rectangles;
    if (n <= 0) n = cfg.n_elements;
    if (seed < 0) s = cfg.seed;
  }
  for (const auto& r : rects) regions.push_back(parse_rect(r));
  if (regions.empty()) throw ValidationError({"give --config or at least one --rect"});
  if (n < 2) throw ValidationError({"-n: need at least two elements"});
  const PolyMesh mesh = generate_mesh(regions, n, s);
  write_mesh(out, mesh);
  std::cout << "wrote " << out << ": " << mesh.num_elements() << " elements, " << mesh.num_faces()
            << " faces\n";
  return kOk;
}

int cmd_mesh_check(const std::string& path, int degree) {
  PolyMesh mesh = [&] {
    try {
      return read_mesh(std::filesystem::path(path));
    } catch (const ParseError& e) {
      throw ValidationError({path + ": " + e.what()});
    } catch (const TopologyError& e) {
      throw ValidationError({path + ": " + e.what()});
    }
  }();
  std::cout << "elements: " << mesh.num_elements() << " (elastic " << mesh.count(Region::Elastic)
            << ", poroelastic " << mesh.count(Region::Poroelastic) << ")\n";
  std::cout << "faces: " << mesh.num_faces() << "\n";
  for (FaceClass c : {FaceClass::InteriorElastic, FaceClass::InteriorPoro, FaceClass::BoundaryElastic,
                      FaceClass::BoundaryPoro, FaceClass::Interface})
    std::cout << "  " << to_string(c) << ": " << mesh.count(c) << "\n";
  std::cout << "area: " << format_double(mesh.domain_area()) << "\n";
  std::vector<int> deg(mesh.num_elements(), degree);
  const RegularityReport rep = check_regularity(mesh, deg);
  std::cout << "shape ratio: min " << format_double(rep.min_ratio) << " max "
            << format_double(rep.max_ratio) << "\n";
  std::cout << "max neighbor h ratio: " << format_double(rep.max_h_variation) << "\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time polygonal dG solver for coupled poroelastic-elastic waves"};
  app.require_subcommand(1);

  std::string run_cfg;
  bool quiet = false, no_outputs = false;
  auto* run = app.add_subcommand("run", "Run a simulation from a JSON configuration");
  run->add_option("config", run_cfg, "Simulation configuration")->required();
  run->add_flag("-q,--quiet", quiet, "Suppress the log");
  run->add_flag("--no-outputs", no_outputs, "Skip writing files");

  std::string study_cfg;
  auto* verify = app.add_subcommand("verify", "Run convergence studies on the manufactured case");
  verify->add_option("study-config", study_cfg, "Study configuration")->required();
  verify->add_flag("-q,--quiet", quiet, "Suppress progress output");

  auto* mesh = app.add_subcommand("mesh", "Generate or check polygonal meshes");
  mesh->require_subcommand(1);
  std::string gen_cfg, gen_out;
  std::vector<std::string> gen_rects;
  int gen_n = 0;
  long long gen_seed = -1;
  auto* gen = mesh->add_subcommand("gen", "Generate a Voronoi mesh");
  gen->add_option("--config", gen_cfg, "Take rectangles, element count and seed from a run config");
  gen->add_option("--rect", gen_rects, "Rectangle region:xmin:xmax:ymin:ymax (repeatable)");
  gen->add_option("-n,--elements", gen_n, "Number of elements");
  gen->add_option("--seed", gen_seed, "Random seed (default 1)");
  gen->add_option("-o,--output", gen_out, "Output mesh file")->required();
  std::string check_path;
  int check_degree = 2;
  auto* check = mesh->add_subcommand("check", "Validate a mesh file and print shape diagnostics");
  check->add_option("mesh", check_path, "Mesh file")->required();
  check->add_option("-p,--degree", check_degree, "Polynomial degree for the diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*run) return cmd_run(run_cfg, quiet, no_outputs);
    if (*verify) return cmd_verify(study_cfg, quiet);
    if (*gen) return cmd_mesh_gen(gen_cfg, gen_rects, gen_n, gen_seed, gen_out);
    if (*check) return cmd_mesh_check(check_path, check_degree);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kValidation;
  } catch (const ParameterError& e) {
    std::cerr << "error: invalid parameter: " << e.what() << std::endl;
    return kValidation;
  } catch (const InstabilityError& e) {
    std::cerr << "error: instability: " << e.what() << std::endl;
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kRuntime;
  }
  return kRuntime;
}
