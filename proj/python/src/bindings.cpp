#include "xtpoly/assembly.hpp"
#include "xtpoly/config.hpp"
#include "xtpoly/driver.hpp"
#include "xtpoly/error.hpp"
#include "xtpoly/materials.hpp"
#include "xtpoly/mesh.hpp"
#include "xtpoly/timedg.hpp"
#include "xtpoly/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <sstream>

namespace py = pybind11;
using namespace xtpoly;

namespace {

Region parse_region(const std::string& s) {
  if (s == "elastic" || s == "E") return Region::Elastic;
  if (s == "poroelastic" || s == "P") return Region::Poroelastic;
  throw py::value_error("region must be 'elastic' or 'poroelastic' (got '" + s + "')");
}

BoundaryKind parse_bc(const std::string& s) {
  if (s == "dirichlet") return BoundaryKind::Dirichlet;
  if (s == "absorbing") return BoundaryKind::Absorbing;
  if (s == "free_surface" || s == "free") return BoundaryKind::Free;
  throw py::value_error("boundary kind must be dirichlet, absorbing or free_surface (got '" + s + "')");
}

std::vector<RegionRect> to_rects(const std::vector<std::tuple<std::string, double, double, double, double>>& in) {
  std::vector<RegionRect> out;
  for (const auto& [reg, x0, x1, y0, y1] : in) out.push_back({x0, x1, y0, y1, parse_region(reg)});
  return out;
}

// Receivers as (times, 12 column array) with NaN for absent fields.
py::dict result_to_dict(const SimulationResult& res) {
  py::dict d;
  d["n_elements"] = res.n_elements;
  d["h"] = res.h;
  d["ndof"] = res.ndof;
  d["nnz_slab"] = res.nnz_slab;
  d["factor_nnz"] = res.factor_nnz;
  d["cond_est"] = res.cond_est;
  py::dict phases;
  for (const auto& p : res.phases) phases[py::str(p.name)] = p.seconds;
  d["phases"] = phases;
  py::dict recs;
  for (const auto& s : res.receivers) {
    Eigen::MatrixXd rows(s.rows.size(), kReceiverColumns);
    for (size_t i = 0; i < s.rows.size(); ++i)
      for (int c = 0; c < kReceiverColumns; ++c) rows(i, c) = s.rows[i][c];
    const Eigen::VectorXd t = Eigen::VectorXd::Map(s.t.data(), static_cast<Eigen::Index>(s.t.size()));
    recs[py::str(s.name)] = py::make_tuple(t, rows);
  }
  d["receivers"] = recs;
  Eigen::MatrixXd en(res.energy.size(), 3);
  for (size_t i = 0; i < res.energy.size(); ++i)
    en.row(i) << res.energy[i].t, res.energy[i].energy, res.energy[i].dissipated;
  d["energy"] = en;
  d["U"] = res.final.U;
  d["V"] = res.final.V;
  if (res.errors) d["errors"] = *res.errors;
  std::vector<std::string> written;
  for (const auto& p : res.written) written.push_back(p.string());
  d["written"] = written;
  return d;
}

// Explicit CSR hand-off; copies the compressed arrays.
py::object to_scipy(SparseMatrix X) {
  X.makeCompressed();
  const py::ssize_t nnz = X.nonZeros(), np1 = X.rows() + 1;
  py::array_t<double> data(std::vector<py::ssize_t>{nnz});
  py::array_t<int> indices(std::vector<py::ssize_t>{nnz}), indptr(std::vector<py::ssize_t>{np1});
  std::copy_n(X.valuePtr(), nnz, data.mutable_data());
  std::copy_n(X.innerIndexPtr(), nnz, indices.mutable_data());
  std::copy_n(X.outerIndexPtr(), np1, indptr.mutable_data());
  return py::module_::import("scipy.sparse")
      .attr("csr_matrix")(py::make_tuple(data, indices, indptr), py::make_tuple(X.rows(), X.cols()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Space-time dG solver for coupled elastic / poroelastic waves on polygonal meshes";

  static py::exception<ValidationError> validation_exc(m, "ValidationError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetString(validation_exc.ptr(), e.what());
    }
  });
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
  py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<ElasticParams>(m, "ElasticParams")
      .def(py::init<>())
      .def(py::init([](double rho, double lambda, double mu, double zeta) {
             return ElasticParams{rho, lambda, mu, zeta};
           }),
           py::arg("rho"), py::arg("lam"), py::arg("mu"), py::arg("zeta") = 0.0)
      .def_readwrite("rho", &ElasticParams::rho)
      .def_readwrite("lam", &ElasticParams::lambda)
      .def_readwrite("mu", &ElasticParams::mu)
      .def_readwrite("zeta", &ElasticParams::zeta);

  py::class_<PoroParams>(m, "PoroParams")
      .def(py::init<>())
      .def_readwrite("rho_s", &PoroParams::rho_s)
      .def_readwrite("rho_f", &PoroParams::rho_f)
      .def_readwrite("phi", &PoroParams::phi)
      .def_readwrite("a", &PoroParams::a)
      .def_readwrite("eta", &PoroParams::eta)
      .def_readwrite("k", &PoroParams::k)
      .def_readwrite("lam", &PoroParams::lambda)
      .def_readwrite("mu", &PoroParams::mu)
      .def_readwrite("m", &PoroParams::m)
      .def_readwrite("beta", &PoroParams::beta)
      .def_readwrite("zeta", &PoroParams::zeta);

  py::class_<Materials>(m, "Materials")
      .def(py::init<>())
      .def_readwrite("elastic", &Materials::elastic)
      .def_readwrite("poro", &Materials::poro);

  py::class_<PoroSpeeds>(m, "PoroSpeeds")
      .def_readonly("c_p1", &PoroSpeeds::c_p1)
      .def_readonly("c_p2", &PoroSpeeds::c_p2)
      .def_readonly("c_s", &PoroSpeeds::c_s);
  py::class_<ElasticSpeeds>(m, "ElasticSpeeds")
      .def_readonly("c_p", &ElasticSpeeds::c_p)
      .def_readonly("c_s", &ElasticSpeeds::c_s);
  m.def("poro_speeds", &poro_speeds, py::arg("params"));
  m.def("elastic_speeds", &elastic_speeds, py::arg("params"));
  m.def("validate_poro", py::overload_cast<const PoroParams&>(&validate), py::arg("params"),
        "Raises ValueError on a violated invariant; returns soft warnings.");

  py::class_<PolyMesh, std::shared_ptr<PolyMesh>>(m, "PolyMesh")
      .def_property_readonly("num_elements", &PolyMesh::num_elements)
      .def_property_readonly("num_faces", &PolyMesh::num_faces)
      .def_property_readonly("domain_area", &PolyMesh::domain_area)
      .def_property_readonly("vertices",
                             [](const PolyMesh& mesh) {
                               Eigen::MatrixXd v(mesh.vertices().size(), 2);
                               for (size_t i = 0; i < mesh.vertices().size(); ++i) v.row(i) = mesh.vertices()[i];
                               return v;
                             })
      .def("polygon",
           [](const PolyMesh& mesh, int e) {
             if (e < 0 || e >= mesh.num_elements()) throw py::index_error("element index out of range");
             const auto poly = mesh.polygon(e);
             Eigen::MatrixXd v(poly.size(), 2);
             for (size_t i = 0; i < poly.size(); ++i) v.row(i) = poly[i];
             return v;
           })
      .def("areas",
           [](const PolyMesh& mesh) {
             Eigen::VectorXd a(mesh.num_elements());
             for (int e = 0; e < mesh.num_elements(); ++e) a[e] = mesh.element(e).area;
             return a;
           })
      .def("regions",
           [](const PolyMesh& mesh) {
             std::vector<std::string> r;
             for (const auto& el : mesh.elements())
               r.push_back(el.region == Region::Elastic ? "elastic" : "poroelastic");
             return r;
           })
      .def("locate", [](const PolyMesh& mesh, double x, double y) { return mesh.locate(Vec2(x, y)); })
      .def("write", [](const PolyMesh& mesh, const std::filesystem::path& p) { write_mesh(p, mesh); });

  m.def(
      "generate_mesh",
      [](const std::vector<std::tuple<std::string, double, double, double, double>>& rects, int n,
         std::uint64_t seed) { return std::make_shared<PolyMesh>(generate_mesh(to_rects(rects), n, seed)); },
      py::arg("rects"), py::arg("n_elements"), py::arg("seed") = 1,
      "rects: list of (region, xmin, xmax, ymin, ymax), region 'elastic' or 'poroelastic'.");
  m.def(
      "read_mesh", [](const std::filesystem::path& p) { return std::make_shared<PolyMesh>(read_mesh(p)); },
      py::arg("path"));

  m.def(
      "time_matrices",
      [](int r, double dt) {
        const TimeMatrices tm = build_time_matrices(r, dt);
        py::dict d;
        d["nodes"] = tm.nodes;
        d["weights"] = tm.weights;
        d["N1"] = tm.N1;
        d["N2"] = tm.N2;
        d["N3"] = tm.N3;
        d["N4"] = tm.N4;
        d["N5"] = tm.N5;
        d["N6"] = tm.N6;
        d["N7"] = tm.N7;
        return d;
      },
      py::arg("r"), py::arg("dt"));

  m.def(
      "assemble",
      [](std::shared_ptr<PolyMesh> mesh, int p_e, int p_p, const Materials& mat,
         const std::map<std::string, std::string>& bc, double delta, double c1, double c2) {
        AssemblyOptions o;
        o.materials = mat;
        o.delta = delta;
        o.penalty.c1 = c1;
        o.penalty.c2 = c2;
        for (const auto& [side, kind] : bc) {
          const BoundaryKind k = parse_bc(kind);
          if (side == "left") o.bc.left = k;
          else if (side == "right") o.bc.right = k;
          else if (side == "bottom") o.bc.bottom = k;
          else if (side == "top") o.bc.top = k;
          else throw py::value_error("unknown boundary side '" + side + "'");
        }
        auto space = std::make_shared<const FESpace>(mesh, p_e, p_p);
        const BlockSystem sys = Assembler(space, o).assemble();
        py::dict d;
        d["M"] = to_scipy(sys.M);
        d["D"] = to_scipy(sys.D);
        d["A"] = to_scipy(sys.A);
        d["C"] = to_scipy(sys.C);
        d["field_offsets"] = std::vector<int>{space->field_offset(Field::Elastic), space->field_offset(Field::Solid),
                                              space->field_offset(Field::Fluid)};
        return d;
      },
      py::arg("mesh"), py::arg("p_e"), py::arg("p_p"), py::arg("materials"),
      py::arg("bc") = std::map<std::string, std::string>{}, py::arg("delta") = 1.0, py::arg("c1") = 10.0,
      py::arg("c2") = 10.0, "Returns scipy.sparse M, D, A (A + B) and C; the stiffness is A + C.");

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("h", &ErrorReport::h)
      .def_readonly("n_elements", &ErrorReport::n_elements)
      .def_readonly("p", &ErrorReport::p)
      .def_readonly("dt", &ErrorReport::dt)
      .def_readonly("r", &ErrorReport::r)
      .def_readonly("t", &ErrorReport::t)
      .def_readonly("l2", &ErrorReport::l2)
      .def_readonly("energy", &ErrorReport::energy)
      .def_readonly("kinetic", &ErrorReport::kinetic)
      .def_readonly("dg_e", &ErrorReport::dg_e)
      .def_readonly("dg_p", &ErrorReport::dg_p)
      .def_readonly("dg_div", &ErrorReport::dg_div)
      .def_readonly("interface", &ErrorReport::interface)
      .def_readonly("damping", &ErrorReport::damping)
      .def_readonly("wall_s", &ErrorReport::wall_s)
      .def_readonly("cond_est", &ErrorReport::cond_est)
      .def("__repr__", [](const ErrorReport& e) {
        std::ostringstream s;
        s << "ErrorReport(n=" << e.n_elements << ", p=" << e.p << ", dt=" << e.dt << ", r=" << e.r
          << ", l2=" << e.l2 << ", energy=" << e.energy << ")";
        return s.str();
      });

  m.def(
      "solve_manufactured",
      [](int n_elements, int p, double dt, int r, double T, std::uint64_t seed) {
        RunParams prm;
        prm.n_elements = n_elements;
        prm.p = p;
        prm.dt = dt;
        prm.r = r;
        prm.T = T;
        prm.seed = seed;
        py::gil_scoped_release release;
        return solve_manufactured(ManufacturedCase(), prm);
      },
      py::arg("n_elements"), py::arg("p"), py::arg("dt"), py::arg("r") = 1, py::arg("T") = 1.0,
      py::arg("seed") = 1, "Manufactured solution with the default unit materials; errors at T.");

  m.def(
      "run_config_text",
      [](const std::string& text, bool write_outputs) {
        const SimulationConfig cfg = parse_config(text);
        RunOptions opt;
        opt.write_outputs = write_outputs;
        SimulationResult res;
        {
          py::gil_scoped_release release;
          res = run_simulation(cfg, opt);
        }
        return result_to_dict(res);
      },
      py::arg("json_text"), py::arg("write_outputs") = false);
  m.def(
      "run_config",
      [](const std::filesystem::path& path, bool write_outputs) {
        const SimulationConfig cfg = load_config(path);
        RunOptions opt;
        opt.write_outputs = write_outputs;
        SimulationResult res;
        {
          py::gil_scoped_release release;
          res = run_simulation(cfg, opt);
        }
        return result_to_dict(res);
      },
      py::arg("path"), py::arg("write_outputs") = true);

  m.attr("RECEIVER_COLUMNS") = py::str(kReceiverHeader);
}
