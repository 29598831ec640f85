#include "xtpoly/driver.hpp"

#include "xtpoly/error.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace xtpoly {

namespace {

using Clock = std::chrono::steady_clock;

class PhaseClock {
 public:
  PhaseClock(SimulationResult& res, std::ostream* log) : res_(res), log_(log), t_(Clock::now()) {}
  void done(const std::string& name, const std::string& detail = {}) {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - t_).count();
    res_.phases.push_back({name, s});
    if (log_) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%-12s %9.3f s", name.c_str(), s);
      *log_ << "[phase] " << buf;
      if (!detail.empty()) *log_ << "  " << detail;
      *log_ << std::endl;
    }
    t_ = now;
  }

 private:
  SimulationResult& res_;
  std::ostream* log_;
  Clock::time_point t_;
};

const char* region_name(Region r) { return r == Region::Elastic ? "elastic" : "poroelastic"; }

}  // namespace

SimulationResult run_simulation(const SimulationConfig& cfg, const RunOptions& opts) {
  SimulationResult res;
  std::ostream* log = opts.log;
  PhaseClock clock(res, log);

  // Mesh
  std::shared_ptr<const PolyMesh> mesh;
  if (!cfg.mesh_file.empty()) {
    try {
      mesh = std::make_shared<const PolyMesh>(read_mesh(cfg.mesh_file));
    } catch (const ParseError& e) {
      throw ValidationError({"geometry.mesh_file: " + std::string(e.what())});
    } catch (const TopologyError& e) {
      throw ValidationError({"geometry.mesh_file: " + std::string(e.what())});
    }
  } else {
    mesh = std::make_shared<const PolyMesh>(generate_mesh(cfg.rectangles, cfg.n_elements, cfg.seed));
  }
  validate_against_mesh(cfg, *mesh);
  res.n_elements = mesh->num_elements();
  res.h = std::sqrt(mesh->domain_area() / mesh->num_elements());
  clock.done("mesh", std::to_string(res.n_elements) + " elements (" +
                         std::to_string(mesh->count(Region::Elastic)) + " elastic, " +
                         std::to_string(mesh->count(Region::Poroelastic)) + " poroelastic), h=" +
                         format_double(res.h));

  // Space and operators
  auto space = std::make_shared<const FESpace>(mesh, cfg.p_e, cfg.p_p);
  res.ndof = space->ndof();
  AssemblyOptions aopt;
  aopt.materials = cfg.materials;
  aopt.bc = cfg.bc;
  aopt.penalty = cfg.penalty;
  aopt.delta = cfg.delta;
  const Assembler assembler(space, aopt);
  const BlockSystem sys = assembler.assemble();
  SparseMatrix K = sys.K();
  res.nnz_M = sys.M.nonZeros();
  res.nnz_D = sys.D.nonZeros();
  res.nnz_K = K.nonZeros();
  clock.done("assembly", "ndof=" + std::to_string(res.ndof) + " nnz(M)=" + std::to_string(res.nnz_M) +
                             " nnz(D)=" + std::to_string(res.nnz_D) +
                             " nnz(K)=" + std::to_string(res.nnz_K));

  // Loads and initial state
  std::optional<ManufacturedCase> mcase;
  LoadData data;
  if (cfg.source == SourceKind::Manufactured) {
    mcase.emplace(cfg.materials, cfg.delta);
    data = mcase->loads();
  } else {
    for (PointSource ps : cfg.point_sources) {
      ps.region = mesh->element(mesh->locate(ps.x)).region;
      data.sources.push_back(ps);
    }
  }
  const LoadAssembler load(assembler, std::move(data));
  SlabState s0;
  if (mcase) {
    s0 = mcase->projected_state(*space, 0.0);
  } else {
    s0.U = Eigen::VectorXd::Zero(res.ndof);
    s0.V = Eigen::VectorXd::Zero(res.ndof);
  }
  clock.done("loads");

  const SlabSolver solver(sys.M, sys.D, std::move(K), build_time_matrices(cfg.r, cfg.dt));
  res.nnz_slab = solver.slab_matrix().nonZeros();
  res.factor_nnz = solver.factorization().factor_nnz();
  clock.done("factorize", "slab size=" + std::to_string(solver.slab_matrix().rows()) +
                              " nnz=" + std::to_string(res.nnz_slab) +
                              " lu_nnz=" + std::to_string(res.factor_nnz));
  if (cfg.condition_estimate) {
    res.cond_est = estimate_condition(solver.slab_matrix(), solver.factorization());
    clock.done("condition", "cond1_est=" + format_double(res.cond_est));
  }

  // Observers: receivers, snapshots, damping integral of the error.
  std::vector<ReceiverProbe> probes;
  for (const auto& r : cfg.receivers) {
    probes.emplace_back(*space, r.name, r.x);
    ReceiverSeries s;
    s.name = r.name;
    s.x = r.x;
    res.receivers.push_back(std::move(s));
    if (log)
      *log << "[receiver] " << r.name << " in element " << probes.back().element() << " ("
           << region_name(probes.back().region()) << ")" << std::endl;
  }
  auto record = [&](double t, const SlabState& s) {
    for (size_t i = 0; i < probes.size(); ++i) {
      res.receivers[i].t.push_back(t);
      res.receivers[i].rows.push_back(probes[i].sample(s.U, s.V));
    }
  };
  const bool snapshots = opts.write_outputs && !cfg.outputs.snapshot_dir.empty();
  auto snapshot = [&](int slab, const SlabState& s) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06d.vtk", slab);
    const auto path = cfg.outputs.snapshot_dir / name;
    write_vtk_snapshot(path, *space, s.U, s.V, s.t);
    res.written.push_back(path);
  };

  std::optional<ErrorEvaluator> eval;
  double initial_damping = 0.0, damping_integral = 0.0;
  if (mcase) {
    eval.emplace(assembler, *mcase);
    initial_damping = eval->damping_form(s0.U, 0.0, false);
  }
  s0.t = 0.0;
  record(0.0, s0);
  if (snapshots) snapshot(0, s0);

  const auto& tm = solver.time();
  SlabObserver observer;
  if (!probes.empty() || snapshots || eval) {
    observer = [&](int slab, const SlabState& end, const SlabNodes& nodes) {
      record(end.t, end);
      if (snapshots && slab % cfg.outputs.snapshot_every == 0) snapshot(slab, end);
      if (eval)
        for (int l = 0; l < tm.stages(); ++l)
          damping_integral +=
              tm.weights[l] * eval->damping_form(nodes.V.col(l), nodes.t0 + tm.nodes[l], true);
    };
  }
  const LoadFn fn = load.empty() ? LoadFn{}
                                 : LoadFn([&](double t, double scale, Eigen::Ref<Eigen::VectorXd> out) {
                                     load.add(t, scale, out);
                                   });
  const int nslab = cfg.num_slabs();
  RunResult run = run_time_dg(solver, s0, nslab, fn, observer, true);
  res.final = std::move(run.final);
  res.energy = std::move(run.energy);
  clock.done("time_loop", std::to_string(nslab) + " slabs, final energy=" +
                              format_double(res.energy.back().energy));

  if (mcase) {
    ErrorReport rep;
    rep.n_elements = res.n_elements;
    rep.h = res.h;
    rep.p = std::max(cfg.p_e, cfg.p_p);
    rep.dt = cfg.dt;
    rep.r = cfg.r;
    eval->fill(rep, res.final, damping_integral, initial_damping);
    rep.cond_est = res.cond_est;
    res.errors = rep;
    clock.done("errors", "L2=" + format_double(rep.l2) + " energy=" + format_double(rep.energy));
  }

  if (opts.write_outputs) {
    if (!cfg.outputs.receiver_dir.empty())
      for (const auto& s : res.receivers) {
        const auto path = cfg.outputs.receiver_dir / (s.name + ".csv");
        write_receiver_csv(path, s);
        res.written.push_back(path);
      }
    if (!cfg.outputs.energy_csv.empty()) {
      write_energy_csv(cfg.outputs.energy_csv, res.energy);
      res.written.push_back(cfg.outputs.energy_csv);
    }
    clock.done("output");
    if (!cfg.outputs.report.empty()) {
      const auto& path = cfg.outputs.report;
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
      write_run_report(out, cfg, res);
      res.written.push_back(path);
    }
  }
  return res;
}

void write_run_report(std::ostream& out, const SimulationConfig& cfg, const SimulationResult& res) {
  auto f = [](double v) { return format_double(v); };
  out << "# xtpoly run report\n\n";
  out << "source: "
      << (cfg.source == SourceKind::Manufactured ? "manufactured"
          : cfg.source == SourceKind::MomentPoint ? "moment_point"
                                                  : "none")
      << "\n";
  out << "boundary: left=" << to_string(cfg.bc.left) << " right=" << to_string(cfg.bc.right)
      << " bottom=" << to_string(cfg.bc.bottom) << " top=" << to_string(cfg.bc.top) << "\n";
  out << "delta: " << f(cfg.delta) << "  c1: " << f(cfg.penalty.c1) << "  c2: " << f(cfg.penalty.c2)
      << "\n";
  out << "elements: " << res.n_elements << "  h: " << f(res.h) << "  p_e: " << cfg.p_e
      << "  p_p: " << cfg.p_p << "\n";
  out << "dt: " << f(cfg.dt) << "  r: " << cfg.r << "  T: " << f(cfg.T) << "  slabs: " << cfg.num_slabs()
      << "\n";
  out << "seed: " << cfg.seed << "\n\n";
  out << "ndof: " << res.ndof << "\n";
  out << "nnz: M=" << res.nnz_M << " D=" << res.nnz_D << " K=" << res.nnz_K << " slab=" << res.nnz_slab
      << " lu=" << res.factor_nnz << "\n";
  if (cfg.condition_estimate) out << "condition estimate (1-norm): " << f(res.cond_est) << "\n";
  out << "\nphase wall times (s):\n";
  double total = 0.0;
  for (const auto& p : res.phases) {
    out << "  " << p.name << ": " << f(p.seconds) << "\n";
    total += p.seconds;
  }
  out << "  total: " << f(total) << "\n";
  if (!res.energy.empty()) {
    const auto& e0 = res.energy.front();
    const auto& e1 = res.energy.back();
    out << "\nenergy: initial " << f(e0.energy) << "  final " << f(e1.energy) << "  dissipated "
        << f(e1.dissipated) << "\n";
  }
  if (res.errors) {
    const auto& r = *res.errors;
    out << "\nerrors at T:\n";
    out << "  L2: " << f(r.l2) << "\n  energy: " << f(r.energy) << "\n  kinetic: " << f(r.kinetic)
        << "\n  dg_elastic: " << f(r.dg_e) << "\n  dg_solid: " << f(r.dg_p)
        << "\n  dg_div: " << f(r.dg_div) << "\n  interface: " << f(r.interface)
        << "\n  damping: " << f(r.damping) << "\n";
    out << "  (convergence rates come from `xtpoly verify` sweeps)\n";
  }
  if (!res.receivers.empty()) {
    out << "\nreceivers:\n";
    for (const auto& s : res.receivers)
      out << "  " << s.name << " at (" << f(s.x.x()) << ", " << f(s.x.y()) << "), " << s.rows.size()
          << " samples\n";
  }
}

}  // namespace xtpoly
