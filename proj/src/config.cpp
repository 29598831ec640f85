#include "xtpoly/config.hpp"

#include "xtpoly/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace xtpoly {

using nlohmann::json;

namespace {

/// Collects every problem instead of stopping at the first.
class Checker {
 public:
  void add(const std::string& where, const std::string& what) { issues_.push_back(where + ": " + what); }
  bool ok() const { return issues_.empty(); }
  void throw_if_any() const {
    if (!issues_.empty()) throw ValidationError(issues_);
  }

  void unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const bool found = std::any_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; });
      if (!found) add(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
    }
  }

  bool object(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) return false;
    if (!parent[key].is_object()) {
      add(where, "must be an object");
      return false;
    }
    return true;
  }

  /// Reads an optional number; returns false when absent or wrong type.
  bool number(const json& obj, const char* key, const std::string& where, double& out) {
    if (!obj.contains(key)) return false;
    const auto& v = obj[key];
    if (!v.is_number()) {
      add(where, "must be a number");
      return false;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) {
      add(where, "must be finite");
      return false;
    }
    return true;
  }

  bool integer(const json& obj, const char* key, const std::string& where, long long& out) {
    if (!obj.contains(key)) return false;
    const auto& v = obj[key];
    if (!v.is_number_integer()) {
      add(where, "must be an integer");
      return false;
    }
    out = v.get<long long>();
    return true;
  }

  bool string(const json& obj, const char* key, const std::string& where, std::string& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_string()) {
      add(where, "must be a string");
      return false;
    }
    out = obj[key].get<std::string>();
    return true;
  }

  bool boolean(const json& obj, const char* key, const std::string& where, bool& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_boolean()) {
      add(where, "must be true or false");
      return false;
    }
    out = obj[key].get<bool>();
    return true;
  }

  bool point(const json& obj, const char* key, const std::string& where, Vec2& out) {
    if (!obj.contains(key)) return false;
    const auto& v = obj[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      add(where, "must be an array of two numbers");
      return false;
    }
    out = Vec2(v[0].get<double>(), v[1].get<double>());
    return true;
  }

 private:
  std::vector<std::string> issues_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("JSON syntax: ") + e.what()});
  }
}

void read_materials(const json& root, Checker& chk, Materials& mat, bool required) {
  if (!root.contains("materials")) {
    if (required) chk.add("materials", "missing");
    return;
  }
  if (!chk.object(root, "materials", "materials")) return;
  const json& m = root["materials"];
  chk.unknown_keys(m, "materials", {"elastic", "poroelastic"});

  auto field = [&](const json& obj, const std::string& where, const char* key, double& out) {
    if (!chk.number(obj, key, where + "." + key, out) && !obj.contains(key))
      chk.add(where + "." + key, "missing");
  };

  if (!m.contains("elastic")) {
    chk.add("materials.elastic", "missing");
  } else if (chk.object(m, "elastic", "materials.elastic")) {
    const json& e = m["elastic"];
    const std::string w = "materials.elastic";
    chk.unknown_keys(e, w, {"rho", "lambda", "mu", "zeta"});
    ElasticParams p;
    field(e, w, "rho", p.rho);
    field(e, w, "lambda", p.lambda);
    field(e, w, "mu", p.mu);
    field(e, w, "zeta", p.zeta);
    try {
      validate(p);
    } catch (const ParameterError& err) {
      chk.add(w, err.what());
    }
    mat.elastic = p;
  }

  if (!m.contains("poroelastic")) {
    chk.add("materials.poroelastic", "missing");
  } else if (chk.object(m, "poroelastic", "materials.poroelastic")) {
    const json& e = m["poroelastic"];
    const std::string w = "materials.poroelastic";
    chk.unknown_keys(e, w, {"rho_s", "rho_f", "phi", "a", "eta", "k", "lambda", "mu", "m", "beta", "zeta"});
    PoroParams p;
    field(e, w, "rho_s", p.rho_s);
    field(e, w, "rho_f", p.rho_f);
    field(e, w, "phi", p.phi);
    field(e, w, "a", p.a);
    field(e, w, "eta", p.eta);
    field(e, w, "k", p.k);
    field(e, w, "lambda", p.lambda);
    field(e, w, "mu", p.mu);
    field(e, w, "m", p.m);
    field(e, w, "beta", p.beta);
    field(e, w, "zeta", p.zeta);
    try {
      (void)validate(p);
    } catch (const ParameterError& err) {
      chk.add(w, err.what());
    }
    mat.poro = p;
  }
}

void read_penalty(const json& obj, Checker& chk, const std::string& where, PenaltyParams& pen) {
  chk.number(obj, "c1", where + ".c1", pen.c1);
  chk.number(obj, "c2", where + ".c2", pen.c2);
  if (!(pen.c1 > 0.0)) chk.add(where + ".c1", "must be positive");
  if (!(pen.c2 > 0.0)) chk.add(where + ".c2", "must be positive");
}

void read_delta(const json& obj, Checker& chk, const std::string& where, double& delta) {
  if (chk.number(obj, "delta", where, delta) && !(delta >= 0.0 && delta <= 1.0)) {
    std::ostringstream os;
    os << "delta must lie in [0, 1] (got " << delta << ")";
    chk.add(where, os.str());
  }
}

bool inside_rects(const std::vector<RegionRect>& rects, const Vec2& x) {
  return std::any_of(rects.begin(), rects.end(), [&](const RegionRect& r) {
    return x.x() >= r.xmin && x.x() <= r.xmax && x.y() >= r.ymin && x.y() <= r.ymax;
  });
}

bool parse_region(const std::string& s, Region& out) {
  if (s == "elastic") {
    out = Region::Elastic;
    return true;
  }
  if (s == "poroelastic") {
    out = Region::Poroelastic;
    return true;
  }
  return false;
}

bool parse_bc(const std::string& s, BoundaryKind& out) {
  if (s == "dirichlet") out = BoundaryKind::Dirichlet;
  else if (s == "free_surface") out = BoundaryKind::Free;
  else if (s == "absorbing") out = BoundaryKind::Absorbing;
  else return false;
  return true;
}

void read_geometry(const json& root, Checker& chk, SimulationConfig& cfg, bool manufactured) {
  if (!root.contains("geometry")) {
    if (manufactured) cfg.rectangles = ManufacturedCase().regions();
    else chk.add("geometry", "missing");
    return;
  }
  if (!chk.object(root, "geometry", "geometry")) return;
  const json& g = root["geometry"];
  chk.unknown_keys(g, "geometry", {"rectangles", "mesh_file"});
  const bool has_rects = g.contains("rectangles"), has_file = g.contains("mesh_file");
  if (has_rects == has_file) {
    chk.add("geometry", "give exactly one of 'rectangles' or 'mesh_file'");
    return;
  }
  if (has_file) {
    std::string f;
    if (chk.string(g, "mesh_file", "geometry.mesh_file", f)) {
      cfg.mesh_file = f;
      if (!std::filesystem::exists(cfg.mesh_file)) chk.add("geometry.mesh_file", "file not found: " + f);
    }
    if (manufactured) cfg.rectangles = ManufacturedCase().regions();
    return;
  }
  if (manufactured) {
    chk.add("geometry.rectangles", "the manufactured source fixes the domain; omit rectangles");
    return;
  }
  const json& rs = g["rectangles"];
  if (!rs.is_array() || rs.empty()) {
    chk.add("geometry.rectangles", "must be a non-empty array");
    return;
  }
  for (size_t i = 0; i < rs.size(); ++i) {
    const std::string w = "geometry.rectangles[" + std::to_string(i) + "]";
    if (!rs[i].is_object()) {
      chk.add(w, "must be an object");
      continue;
    }
    chk.unknown_keys(rs[i], w, {"region", "xmin", "xmax", "ymin", "ymax"});
    RegionRect r;
    std::string reg;
    if (!chk.string(rs[i], "region", w + ".region", reg)) chk.add(w + ".region", "missing");
    else if (!parse_region(reg, r.region)) chk.add(w + ".region", "must be 'elastic' or 'poroelastic'");
    bool ok = true;
    for (auto [key, dst] : {std::pair{"xmin", &r.xmin}, std::pair{"xmax", &r.xmax},
                            std::pair{"ymin", &r.ymin}, std::pair{"ymax", &r.ymax}}) {
      if (!chk.number(rs[i], key, w + "." + key, *dst)) {
        if (!rs[i].contains(key)) chk.add(w + "." + key, "missing");
        ok = false;
      }
    }
    if (ok && !(r.xmin < r.xmax && r.ymin < r.ymax)) {
      chk.add(w, "needs xmin < xmax and ymin < ymax");
      ok = false;
    }
    if (ok) cfg.rectangles.push_back(r);
  }
  if (cfg.rectangles.size() != rs.size()) return;
  // The union must be a rectangle without overlaps so each outer side gets one tag.
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300, sum = 0.0;
  for (const auto& r : cfg.rectangles) {
    lo_x = std::min(lo_x, r.xmin);
    hi_x = std::max(hi_x, r.xmax);
    lo_y = std::min(lo_y, r.ymin);
    hi_y = std::max(hi_y, r.ymax);
    sum += r.area();
  }
  for (size_t i = 0; i < cfg.rectangles.size(); ++i)
    for (size_t j = i + 1; j < cfg.rectangles.size(); ++j) {
      const auto &a = cfg.rectangles[i], &b = cfg.rectangles[j];
      const double w = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
      const double h = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
      if (w > 0 && h > 0)
        chk.add("geometry.rectangles", "rectangles " + std::to_string(i) + " and " +
                                           std::to_string(j) + " overlap");
    }
  const double box = (hi_x - lo_x) * (hi_y - lo_y);
  if (std::abs(sum - box) > 1e-10 * box)
    chk.add("geometry.rectangles", "the union of the rectangles must be a rectangle");
}

void read_boundary(const json& root, Checker& chk, SimulationConfig& cfg, bool manufactured) {
  if (!root.contains("boundary")) {
    if (manufactured) cfg.bc = BoundaryConditions::all(BoundaryKind::Dirichlet);
    else chk.add("boundary", "missing; tag each of left, right, bottom, top");
    return;
  }
  if (!chk.object(root, "boundary", "boundary")) return;
  const json& b = root["boundary"];
  chk.unknown_keys(b, "boundary", {"left", "right", "bottom", "top"});
  for (auto [key, dst] : {std::pair{"left", &cfg.bc.left}, std::pair{"right", &cfg.bc.right},
                          std::pair{"bottom", &cfg.bc.bottom}, std::pair{"top", &cfg.bc.top}}) {
    const std::string w = std::string("boundary.") + key;
    std::string tag;
    if (!b.contains(key)) {
      chk.add(w, "missing");
    } else if (chk.string(b, key, w, tag)) {
      if (!parse_bc(tag, *dst)) chk.add(w, "must be one of dirichlet, free_surface, absorbing");
      else if (manufactured && *dst != BoundaryKind::Dirichlet)
        chk.add(w, "the manufactured source requires dirichlet");
    }
  }
}

void read_discretization(const json& root, Checker& chk, SimulationConfig& cfg) {
  if (!root.contains("discretization")) {
    chk.add("discretization", "missing");
    return;
  }
  if (!chk.object(root, "discretization", "discretization")) return;
  const json& d = root["discretization"];
  const std::string w = "discretization";
  chk.unknown_keys(d, w, {"n_elements", "h", "p", "p_e", "p_p", "dt", "r", "T"});

  long long n = 0;
  const bool has_n = chk.integer(d, "n_elements", w + ".n_elements", n);
  const bool has_h = chk.number(d, "h", w + ".h", cfg.h);
  if (cfg.mesh_file.empty()) {
    if (d.contains("n_elements") && d.contains("h")) chk.add(w, "give n_elements or h, not both");
    else if (!d.contains("n_elements") && !d.contains("h")) chk.add(w, "needs n_elements or h");
  }
  if (has_n) {
    if (n < 2 || n > 10'000'000) chk.add(w + ".n_elements", "must lie in [2, 1e7]");
    else cfg.n_elements = static_cast<int>(n);
  }
  if (has_h && !(cfg.h > 0.0)) chk.add(w + ".h", "must be positive");

  long long p = 0;
  if (chk.integer(d, "p", w + ".p", p)) cfg.p_e = cfg.p_p = static_cast<int>(p);
  if (chk.integer(d, "p_e", w + ".p_e", p)) cfg.p_e = static_cast<int>(p);
  if (chk.integer(d, "p_p", w + ".p_p", p)) cfg.p_p = static_cast<int>(p);
  if (cfg.p_e < 1 || cfg.p_e > 12) chk.add(w + ".p_e", "must lie in [1, 12]");
  if (cfg.p_p < 1 || cfg.p_p > 12) chk.add(w + ".p_p", "must lie in [1, 12]");

  long long r = 1;
  if (chk.integer(d, "r", w + ".r", r)) cfg.r = static_cast<int>(r);
  if (cfg.r < 1 || cfg.r > 10) chk.add(w + ".r", "must lie in [1, 10]");

  const bool has_dt = chk.number(d, "dt", w + ".dt", cfg.dt);
  const bool has_T = chk.number(d, "T", w + ".T", cfg.T);
  if (!d.contains("dt")) chk.add(w + ".dt", "missing");
  if (!d.contains("T")) chk.add(w + ".T", "missing");
  if (has_dt && !(cfg.dt > 0.0)) chk.add(w + ".dt", "must be positive");
  if (has_T && !(cfg.T > 0.0)) chk.add(w + ".T", "must be positive");
  if (has_dt && has_T && cfg.dt > 0.0 && cfg.T > 0.0) {
    const double k = std::llround(cfg.T / cfg.dt);
    if (k < 1 || std::abs(k * cfg.dt - cfg.T) > 1e-12 * cfg.T)
      chk.add(w + ".dt", "must divide T within 1e-12 T");
  }
}

bool safe_name(const std::string& s) {
  if (s.empty() || s.size() > 64) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }) && s != "." && s != "..";
}

void read_sources(const json& root, Checker& chk, SimulationConfig& cfg) {
  if (!root.contains("sources")) return;
  const json& s = root["sources"];
  if (!s.is_array()) {
    chk.add("sources", "must be an array");
    return;
  }
  for (size_t i = 0; i < s.size(); ++i) {
    const std::string w = "sources[" + std::to_string(i) + "]";
    if (!s[i].is_object()) {
      chk.add(w, "must be an object");
      continue;
    }
    std::string type;
    if (!chk.string(s[i], "type", w + ".type", type)) {
      if (!s[i].contains("type")) chk.add(w + ".type", "missing");
      continue;
    }
    if (type == "manufactured") {
      chk.unknown_keys(s[i], w, {"type"});
      if (s.size() != 1) chk.add(w, "a manufactured source cannot be combined with others");
      cfg.source = SourceKind::Manufactured;
    } else if (type == "moment_point") {
      chk.unknown_keys(s[i], w, {"type", "x", "M0", "f_p", "t0"});
      PointSource ps;
      if (!chk.point(s[i], "x", w + ".x", ps.x) && !s[i].contains("x")) chk.add(w + ".x", "missing");
      chk.number(s[i], "M0", w + ".M0", ps.M0);
      if (!chk.number(s[i], "f_p", w + ".f_p", ps.f_p) && !s[i].contains("f_p"))
        chk.add(w + ".f_p", "missing");
      else if (!(ps.f_p > 0.0)) chk.add(w + ".f_p", "must be positive");
      chk.number(s[i], "t0", w + ".t0", ps.t0);
      if (ps.t0 < 0.0) chk.add(w + ".t0", "must be non-negative");
      cfg.point_sources.push_back(ps);
      if (cfg.source == SourceKind::None) cfg.source = SourceKind::MomentPoint;
    } else {
      chk.add(w + ".type", "must be 'manufactured' or 'moment_point'");
    }
  }
}

void read_receivers(const json& root, Checker& chk, SimulationConfig& cfg) {
  if (!root.contains("receivers")) return;
  const json& rs = root["receivers"];
  if (!rs.is_array()) {
    chk.add("receivers", "must be an array");
    return;
  }
  std::set<std::string> names;
  for (size_t i = 0; i < rs.size(); ++i) {
    const std::string w = "receivers[" + std::to_string(i) + "]";
    if (!rs[i].is_object()) {
      chk.add(w, "must be an object");
      continue;
    }
    chk.unknown_keys(rs[i], w, {"name", "x"});
    ReceiverSpec rec;
    if (!chk.string(rs[i], "name", w + ".name", rec.name)) {
      if (!rs[i].contains("name")) chk.add(w + ".name", "missing");
    } else if (!safe_name(rec.name)) {
      chk.add(w + ".name", "must be 1-64 characters from [A-Za-z0-9_.-]");
    } else if (!names.insert(rec.name).second) {
      chk.add(w + ".name", "duplicate receiver name '" + rec.name + "'");
    }
    if (!chk.point(rs[i], "x", w + ".x", rec.x) && !rs[i].contains("x")) chk.add(w + ".x", "missing");
    cfg.receivers.push_back(rec);
  }
}

void read_outputs(const json& root, Checker& chk, SimulationConfig& cfg) {
  if (!root.contains("outputs")) return;
  if (!chk.object(root, "outputs", "outputs")) return;
  const json& o = root["outputs"];
  chk.unknown_keys(o, "outputs", {"receiver_dir", "snapshot_dir", "snapshot_every", "energy_csv", "report"});
  std::string s;
  if (chk.string(o, "receiver_dir", "outputs.receiver_dir", s)) cfg.outputs.receiver_dir = s;
  if (chk.string(o, "snapshot_dir", "outputs.snapshot_dir", s)) cfg.outputs.snapshot_dir = s;
  if (chk.string(o, "energy_csv", "outputs.energy_csv", s)) cfg.outputs.energy_csv = s;
  if (chk.string(o, "report", "outputs.report", s)) cfg.outputs.report = s;
  long long every = 0;
  if (chk.integer(o, "snapshot_every", "outputs.snapshot_every", every)) {
    if (every < 1) chk.add("outputs.snapshot_every", "must be positive");
    else cfg.outputs.snapshot_every = static_cast<int>(std::min<long long>(every, 1 << 30));
  }
  if (!cfg.outputs.snapshot_dir.empty() && !o.contains("snapshot_every"))
    chk.add("outputs.snapshot_every", "required when snapshot_dir is set");
}

}  // namespace

int SimulationConfig::num_slabs() const { return static_cast<int>(std::llround(T / dt)); }

SimulationConfig parse_config(const std::string& json_text) {
  const json root = parse_json(json_text);
  Checker chk;
  if (!root.is_object()) throw ValidationError({"document: must be a JSON object"});
  chk.unknown_keys(root, "", {"geometry", "materials", "boundary", "interface", "penalty",
                              "discretization", "sources", "receivers", "outputs", "seed",
                              "condition_estimate"});
  SimulationConfig cfg;
  read_sources(root, chk, cfg);
  const bool manufactured = cfg.source == SourceKind::Manufactured;
  if (manufactured && !root.contains("materials")) cfg.materials = ManufacturedCase::default_materials();
  else read_materials(root, chk, cfg.materials, true);
  read_geometry(root, chk, cfg, manufactured);
  read_boundary(root, chk, cfg, manufactured);
  if (root.contains("interface") && chk.object(root, "interface", "interface")) {
    chk.unknown_keys(root["interface"], "interface", {"delta"});
    read_delta(root["interface"], chk, "interface.delta", cfg.delta);
  }
  if (root.contains("penalty") && chk.object(root, "penalty", "penalty")) {
    chk.unknown_keys(root["penalty"], "penalty", {"c1", "c2"});
    read_penalty(root["penalty"], chk, "penalty", cfg.penalty);
  }
  read_discretization(root, chk, cfg);
  read_receivers(root, chk, cfg);
  read_outputs(root, chk, cfg);
  long long seed = 1;
  if (chk.integer(root, "seed", "seed", seed)) {
    if (seed < 0) chk.add("seed", "must be non-negative");
    else cfg.seed = static_cast<std::uint64_t>(seed);
  }
  chk.boolean(root, "condition_estimate", "condition_estimate", cfg.condition_estimate);

  if (!cfg.rectangles.empty()) {
    if (cfg.mesh_file.empty() && cfg.h > 0.0 && cfg.n_elements == 0) {
      double area = 0.0;
      for (const auto& r : cfg.rectangles) area += r.area();
      cfg.n_elements = std::max<int>(2, static_cast<int>(std::llround(area / (cfg.h * cfg.h))));
    }
    for (size_t i = 0; i < cfg.receivers.size(); ++i)
      if (!inside_rects(cfg.rectangles, cfg.receivers[i].x))
        chk.add("receivers[" + std::to_string(i) + "].x", "lies outside the domain");
    for (size_t i = 0; i < cfg.point_sources.size(); ++i)
      if (!inside_rects(cfg.rectangles, cfg.point_sources[i].x))
        chk.add("sources[" + std::to_string(i) + "].x", "lies outside the domain");
  }
  chk.throw_if_any();
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot read " + path.string()});
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SimulationConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

void validate_against_mesh(const SimulationConfig& cfg, const PolyMesh& mesh) {
  Checker chk;
  for (size_t i = 0; i < cfg.receivers.size(); ++i)
    if (mesh.locate(cfg.receivers[i].x) < 0)
      chk.add("receivers[" + std::to_string(i) + "].x", "lies outside the mesh");
  for (size_t i = 0; i < cfg.point_sources.size(); ++i)
    if (mesh.locate(cfg.point_sources[i].x) < 0)
      chk.add("sources[" + std::to_string(i) + "].x", "lies outside the mesh");
  chk.throw_if_any();
}

// ---------------------------------------------------------------------------
// Study configuration

namespace {

bool parse_variable(const std::string& s, SweepVariable& v) {
  if (s == "h") v = SweepVariable::H;
  else if (s == "p") v = SweepVariable::P;
  else if (s == "dt") v = SweepVariable::Dt;
  else if (s == "r") v = SweepVariable::R;
  else return false;
  return true;
}

}  // namespace

StudyConfig parse_study_config(const std::string& json_text) {
  const json root = parse_json(json_text);
  if (!root.is_object()) throw ValidationError({"document: must be a JSON object"});
  Checker chk;
  chk.unknown_keys(root, "", {"materials", "delta", "studies", "report"});
  StudyConfig cfg;
  if (root.contains("materials")) read_materials(root, chk, cfg.materials, true);
  read_delta(root, chk, "delta", cfg.delta);
  std::string s;
  if (chk.string(root, "report", "report", s)) cfg.report = s;

  if (!root.contains("studies") || !root["studies"].is_array() || root["studies"].empty()) {
    chk.add("studies", "must be a non-empty array");
    chk.throw_if_any();
  }
  const json& studies = root["studies"];
  for (size_t i = 0; i < studies.size(); ++i) {
    const std::string w = "studies[" + std::to_string(i) + "]";
    const json& st = studies[i];
    if (!st.is_object()) {
      chk.add(w, "must be an object");
      continue;
    }
    chk.unknown_keys(st, w, {"name", "variable", "metric", "values", "base", "csv"});
    StudySpec spec;
    spec.name = "study" + std::to_string(i);
    chk.string(st, "name", w + ".name", spec.name);
    std::string var;
    if (!chk.string(st, "variable", w + ".variable", var)) {
      if (!st.contains("variable")) chk.add(w + ".variable", "missing");
    } else if (!parse_variable(var, spec.variable)) {
      chk.add(w + ".variable", "must be one of h, p, dt, r");
    }
    if (chk.string(st, "metric", w + ".metric", spec.metric) && spec.metric != "energy" &&
        spec.metric != "l2")
      chk.add(w + ".metric", "must be 'energy' or 'l2'");
    if (chk.string(st, "csv", w + ".csv", s)) spec.csv = s;

    RunParams base;
    if (st.contains("base") && chk.object(st, "base", w + ".base")) {
      const json& b = st["base"];
      const std::string wb = w + ".base";
      chk.unknown_keys(b, wb, {"n_elements", "p", "dt", "r", "T", "seed", "c1", "c2", "condition_estimate"});
      long long v = 0;
      if (chk.integer(b, "n_elements", wb + ".n_elements", v)) base.n_elements = static_cast<int>(v);
      if (chk.integer(b, "p", wb + ".p", v)) base.p = static_cast<int>(v);
      if (chk.integer(b, "r", wb + ".r", v)) base.r = static_cast<int>(v);
      if (chk.integer(b, "seed", wb + ".seed", v)) base.seed = static_cast<std::uint64_t>(std::max(0LL, v));
      chk.number(b, "dt", wb + ".dt", base.dt);
      chk.number(b, "T", wb + ".T", base.T);
      read_penalty(b, chk, wb, base.penalty);
      chk.boolean(b, "condition_estimate", wb + ".condition_estimate", base.condition);
    }
    if (!st.contains("values") || !st["values"].is_array() || st["values"].size() < 3) {
      chk.add(w + ".values", "must be an array of at least three numbers");
      continue;
    }
    for (size_t k = 0; k < st["values"].size(); ++k) {
      const json& v = st["values"][k];
      const std::string wv = w + ".values[" + std::to_string(k) + "]";
      RunParams prm = base;
      const bool integral = spec.variable != SweepVariable::Dt;
      if (integral ? !v.is_number_integer() : !v.is_number()) {
        chk.add(wv, integral ? "must be an integer" : "must be a number");
        continue;
      }
      switch (spec.variable) {
        case SweepVariable::H: prm.n_elements = v.get<int>(); break;
        case SweepVariable::P: prm.p = v.get<int>(); break;
        case SweepVariable::R: prm.r = v.get<int>(); break;
        case SweepVariable::Dt: prm.dt = v.get<double>(); break;
      }
      if (prm.n_elements < 2) chk.add(wv, "n_elements must be >= 2");
      if (prm.p < 1 || prm.p > 12) chk.add(wv, "p must lie in [1, 12]");
      if (prm.r < 1 || prm.r > 10) chk.add(wv, "r must lie in [1, 10]");
      if (!(prm.dt > 0.0) || !(prm.T > 0.0)) {
        chk.add(wv, "dt and T must be positive");
      } else {
        const double n = std::llround(prm.T / prm.dt);
        if (n < 1 || std::abs(n * prm.dt - prm.T) > 1e-12 * prm.T)
          chk.add(wv, "dt must divide T within 1e-12 T");
      }
      spec.points.push_back(prm);
    }
    cfg.studies.push_back(std::move(spec));
  }
  chk.throw_if_any();
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  return parse_study_config(read_text_file(path));
}

}  // namespace xtpoly
