#include "fadforge/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fadforge {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(what) + ": cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& path) {
  if (!path.empty()) std::filesystem::create_directories(path);
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  auto in = open_input(path, "KeyValueFile");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
  KeyValueFile kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv.set(key, value);
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& KeyValueFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("config: missing required key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  const std::string& v = get(key);
  size_t pos = 0;
  const double d = std::stod(v, &pos);
  if (pos != v.size())
    throw std::invalid_argument("config: key '" + key + "' is not a number: '" + v + "'");
  return d;
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueFile::get_int_or(const std::string& key, int fallback) const {
  return has(key) ? int(std::llround(get_double(key))) : fallback;
}

bool KeyValueFile::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> KeyValueFile::get_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    out.push_back(std::stod(t));
  }
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' holds no values");
  return out;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = value;
}

void KeyValueFile::set_double(const std::string& key, double value) { set(key, fmt_g17(value)); }

std::vector<std::string> KeyValueFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& k : order_)
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  return out;
}

std::string KeyValueFile::serialize(const std::string& kind) const {
  std::ostringstream out;
  out << "# " << kFormatVersion << ' ' << kind << '\n';
  for (const auto& k : order_) out << k << " = " << values_.at(k) << '\n';
  return out.str();
}

void KeyValueFile::save(const std::string& path, const std::string& kind) const {
  auto out = open_output(path, "KeyValueFile");
  out << serialize(kind);
}

RunConfig RunConfig::load(const std::string& path) {
  RunConfig c;
  c.kv = KeyValueFile::load(path);
  c.validate_keys();
  return c;
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig c;
  c.kv = KeyValueFile::parse_text(text);
  c.validate_keys();
  return c;
}

void RunConfig::validate_keys() const {
  static const std::vector<std::string> exact = {
      "geometry",      "field.file",    "field.synthetic", "out.fields",
      "out.every",     "run.label",     "sweep.Gc",        "sweep.r_y",
      "sweep.a0_over_W", "sweep.Gc_flaw",
  };
  static const std::vector<std::string> prefixes = {
      "material.", "weld_material.", "hydrogen.", "weld_hydrogen.", "bc.",
      "sent.",     "pipe.",          "mesh.",     "solver.",        "load.",
      "rcurve.",   "weld_field.",
  };
  for (const auto& key : kv.keys()) {
    if (std::find(exact.begin(), exact.end(), key) != exact.end()) continue;
    bool ok = false;
    for (const auto& p : prefixes)
      if (key.rfind(p, 0) == 0) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

MaterialParams RunConfig::material(const std::string& prefix) const {
  MaterialParams p;
  p.E = kv.get_double_or(prefix + "E", p.E);
  p.nu = kv.get_double_or(prefix + "nu", p.nu);
  p.sigma_y0 = kv.get_double_or(prefix + "sigma_y0", p.sigma_y0);
  p.n = kv.get_double_or(prefix + "n", p.n);
  p.Gc = kv.get_double_or(prefix + "Gc", p.Gc);
  p.ell = kv.get_double_or(prefix + "ell", p.ell);
  p.beta = kv.get_double_or(prefix + "beta", p.beta);
  p.validate();
  return p;
}

HydrogenParams RunConfig::hydrogen(const std::string& prefix) const {
  HydrogenParams h;
  h.D = kv.get_double_or(prefix + "D", h.D);
  h.Vh = kv.get_double_or(prefix + "Vh", h.Vh);
  h.S = kv.get_double_or(prefix + "S", h.S);
  h.f_min = kv.get_double_or(prefix + "f_min", h.f_min);
  h.q1 = kv.get_double_or(prefix + "q1", h.q1);
  h.q2 = kv.get_double_or(prefix + "q2", h.q2);
  h.T = kv.get_double_or(prefix + "T", h.T);
  h.R = kv.get_double_or(prefix + "R", h.R);
  h.validate();
  return h;
}

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.stagger_tol = kv.get_double_or("solver.stagger_tol", s.stagger_tol);
  s.newton_tol = kv.get_double_or("solver.newton_tol", s.newton_tol);
  s.max_stagger = kv.get_int_or("solver.max_stagger", s.max_stagger);
  s.max_newton = kv.get_int_or("solver.max_newton", s.max_newton);
  s.n_steps = kv.get_int_or("solver.n_steps", s.n_steps);
  s.min_step_frac = kv.get_double_or("solver.min_step_frac", s.min_step_frac);
  s.phi_failure_threshold = kv.get_double_or("solver.phi_threshold", s.phi_failure_threshold);
  s.front_advance_scale = kv.get_double_or("solver.front_advance_scale", s.front_advance_scale);
  s.reaction_drop = kv.get_double_or("solver.reaction_drop", s.reaction_drop);
  s.dt = kv.get_double_or("solver.dt", s.dt);
  return s;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  auto out = open_output(path, "write_mesh");
  out << "# " << kFormatVersion << " mesh\n";
  out << "NODES " << mesh.n_nodes() << '\n';
  for (int n = 0; n < mesh.n_nodes(); ++n)
    out << n + 1 << ' ' << fmt_g17(mesh.nodes[n].x) << ' ' << fmt_g17(mesh.nodes[n].y) << '\n';
  out << "ELEMENTS " << mesh.n_elems() << '\n';
  for (int e = 0; e < mesh.n_elems(); ++e) {
    out << e + 1;
    for (int a : mesh.elems[e]) out << ' ' << a + 1;
    out << '\n';
  }
  for (const auto& [name, set] : mesh.nsets) {
    out << "NSET " << name << ' ' << set.size() << '\n';
    for (size_t i = 0; i < set.size(); ++i)
      out << set[i] + 1 << (((i + 1) % 16 == 0 || i + 1 == set.size()) ? '\n' : ' ');
  }
  for (const auto& [name, set] : mesh.elsets) {
    out << "ELSET " << name << ' ' << set.size() << '\n';
    for (size_t i = 0; i < set.size(); ++i)
      out << set[i] + 1 << (((i + 1) % 16 == 0 || i + 1 == set.size()) ? '\n' : ' ');
  }
  out << "SEAM " << mesh.seams.size() << '\n';
  for (auto [a, b] : mesh.seams) out << a + 1 << ' ' << b + 1 << '\n';
}

Mesh read_mesh(const std::string& path) {
  auto in = open_input(path, "read_mesh");
  Mesh mesh;
  std::map<int, int> node_index, elem_index;
  std::string line;
  std::vector<std::string> tokens;
  auto next_tokens = [&]() -> bool {
    while (std::getline(in, line)) {
      const std::string body = trim(strip_comment(line));
      if (body.empty()) continue;
      tokens.clear();
      std::istringstream ss(body);
      std::string t;
      while (ss >> t) tokens.push_back(t);
      return true;
    }
    return false;
  };
  auto read_ids = [&](size_t count) {
    std::vector<int> ids;
    while (ids.size() < count) {
      if (!next_tokens()) throw std::runtime_error("read_mesh: truncated id list");
      for (const auto& t : tokens) ids.push_back(std::stoi(t));
    }
    if (ids.size() != count) throw std::runtime_error("read_mesh: id count mismatch");
    return ids;
  };

  while (next_tokens()) {
    const std::string& kw = tokens[0];
    if (kw == "NODES") {
      const int n = std::stoi(tokens[1]);
      mesh.nodes.reserve(n);
      for (int i = 0; i < n; ++i) {
        if (!next_tokens() || tokens.size() != 3) throw std::runtime_error("read_mesh: bad node line");
        const int id = std::stoi(tokens[0]);
        if (node_index.count(id)) throw std::runtime_error("read_mesh: duplicate node id");
        node_index[id] = int(mesh.nodes.size());
        mesh.nodes.push_back({std::stod(tokens[1]), std::stod(tokens[2])});
      }
    } else if (kw == "ELEMENTS") {
      const int n = std::stoi(tokens[1]);
      mesh.elems.reserve(n);
      for (int i = 0; i < n; ++i) {
        if (!next_tokens() || tokens.size() != 5)
          throw std::runtime_error("read_mesh: bad element line");
        const int id = std::stoi(tokens[0]);
        if (elem_index.count(id)) throw std::runtime_error("read_mesh: duplicate element id");
        elem_index[id] = int(mesh.elems.size());
        Quad q;
        for (int k = 0; k < 4; ++k) {
          const int nid = std::stoi(tokens[k + 1]);
          if (!node_index.count(nid)) throw std::runtime_error("read_mesh: element references missing node");
          q[k] = node_index[nid];
        }
        mesh.elems.push_back(q);
      }
    } else if (kw == "NSET" || kw == "ELSET") {
      const bool ns = kw == "NSET";
      const std::string name = tokens[1];
      const size_t count = std::stoul(tokens[2]);
      auto ids = read_ids(count);
      std::vector<int> mapped;
      mapped.reserve(ids.size());
      for (int id : ids) {
        auto& index = ns ? node_index : elem_index;
        auto it = index.find(id);
        if (it == index.end()) throw std::runtime_error("read_mesh: set '" + name + "' references missing id");
        mapped.push_back(it->second);
      }
      (ns ? mesh.nsets : mesh.elsets)[name] = mapped;
    } else if (kw == "SEAM") {
      const int n = std::stoi(tokens[1]);
      for (int i = 0; i < n; ++i) {
        if (!next_tokens() || tokens.size() != 2) throw std::runtime_error("read_mesh: bad seam line");
        mesh.seams.push_back({node_index.at(std::stoi(tokens[0])), node_index.at(std::stoi(tokens[1]))});
      }
    } else {
      throw std::runtime_error("read_mesh: unknown block '" + kw + "'");
    }
  }
  mesh.validate();
  return mesh;
}

void PropertyFieldMap::validate(const Mesh& mesh) const {
  auto check = [&](const std::map<int, double>& m, const char* what) {
    for (const auto& [e, v] : m) {
      (void)v;
      if (e < 0 || e >= mesh.n_elems())
        throw std::domain_error(std::string("PropertyFieldMap: ") + what +
                                " references missing element " + std::to_string(e + 1));
    }
  };
  check(sigma_y0, "sigma_y0");
  check(Gc, "Gc");
  check(xb, "xb");
  check(eps_p_eq, "eps_p_eq");
  for (const auto& [e, v] : residual_stress) {
    (void)v;
    if (e < 0 || e >= mesh.n_elems())
      throw std::domain_error("PropertyFieldMap: residual_stress references missing element " +
                              std::to_string(e + 1));
  }
  for (const auto& [e, v] : xb)
    if (v < 0.0 || v > 1.0)
      throw std::domain_error("PropertyFieldMap: xb out of [0,1] on element " + std::to_string(e + 1));
}

void write_property_field(const PropertyFieldMap& map, const std::string& path) {
  auto out = open_output(path, "write_property_field");
  out << "# " << kFormatVersion << " property-field\n";
  auto dump = [&](const std::map<int, double>& m, const char* name) {
    if (m.empty()) return;
    out << "FIELD " << name << ' ' << m.size() << '\n';
    for (const auto& [e, v] : m) out << e + 1 << ' ' << fmt_g17(v) << '\n';
  };
  dump(map.sigma_y0, "sigma_y0");
  dump(map.Gc, "Gc");
  dump(map.xb, "xb");
  dump(map.eps_p_eq, "eps_p_eq");
  if (!map.residual_stress.empty()) {
    out << "FIELD residual_stress " << map.residual_stress.size() << '\n';
    for (const auto& [e, s] : map.residual_stress)
      out << e + 1 << ' ' << fmt_g17(s.xx) << ' ' << fmt_g17(s.yy) << ' ' << fmt_g17(s.zz) << ' '
          << fmt_g17(s.xy) << '\n';
  }
}

PropertyFieldMap load_property_field(const std::string& path) {
  auto in = open_input(path, "load_property_field");
  PropertyFieldMap map;
  std::string line;
  std::string field;
  size_t remaining = 0;
  while (std::getline(in, line)) {
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    std::istringstream ss(body);
    std::string first;
    ss >> first;
    if (first == "FIELD") {
      ss >> field >> remaining;
      if (!ss) throw std::runtime_error("load_property_field: malformed FIELD header");
      continue;
    }
    if (remaining == 0) throw std::runtime_error("load_property_field: data outside a FIELD block");
    const int e = std::stoi(first) - 1;
    if (field == "residual_stress") {
      SymTensor2 s;
      ss >> s.xx >> s.yy >> s.zz >> s.xy;
      if (!ss) throw std::runtime_error("load_property_field: bad residual_stress row");
      map.residual_stress[e] = s;
    } else {
      double v;
      ss >> v;
      if (!ss) throw std::runtime_error("load_property_field: bad field row");
      if (field == "sigma_y0")
        map.sigma_y0[e] = v;
      else if (field == "Gc")
        map.Gc[e] = v;
      else if (field == "xb")
        map.xb[e] = v;
      else if (field == "eps_p_eq")
        map.eps_p_eq[e] = v;
      else
        throw std::runtime_error("load_property_field: unknown field '" + field + "'");
    }
    --remaining;
  }
  if (remaining != 0) throw std::runtime_error("load_property_field: truncated FIELD block");
  return map;
}

void write_fad_bundle(const FadBundle& bundle, const std::string& path) {
  auto out = open_output(path, "write_fad_bundle");
  out << "# " << kFormatVersion << " fad-bundle\n";
  for (const auto& [k, v] : bundle.meta) out << "# meta " << k << ' ' << v << '\n';
  for (const auto& fs : bundle.fals) {
    out << "# section fal " << fs.name << '\n';
    out << "# attr option " << int(fs.fal.option) << '\n';
    out << "# attr Lr_max " << fmt_g17(fs.fal.Lr_max) << '\n';
    if (!fs.fal.provenance.empty()) out << "# attr provenance " << fs.fal.provenance << '\n';
    out << "Lr,f\n";
    for (size_t i = 0; i < fs.fal.Lr.size(); ++i)
      out << fmt_g17(fs.fal.Lr[i]) << ',' << fmt_g17(fs.fal.f[i]) << '\n';
  }
  for (const auto& ps : bundle.series) {
    out << "# section points " << ps.name << '\n';
    out << "load,Lr,Kr,failed,label\n";
    for (size_t i = 0; i < ps.points.size(); ++i) {
      const auto& p = ps.points[i];
      if (p.label.find(',') != std::string::npos)
        throw std::domain_error("write_fad_bundle: labels must not contain commas");
      out << fmt_g17(p.load) << ',' << fmt_g17(p.Lr) << ',' << fmt_g17(p.Kr) << ','
          << (i < ps.failed.size() ? ps.failed[i] : 0) << ',' << p.label << '\n';
    }
  }
}

FadBundle read_fad_bundle(const std::string& path) {
  auto in = open_input(path, "read_fad_bundle");
  FadBundle bundle;
  std::string line;
  enum class Mode { none, fal, points } mode = Mode::none;
  bool header_pending = false;
  while (std::getline(in, line)) {
    if (line.rfind("# meta ", 0) == 0) {
      const std::string rest = line.substr(7);
      const auto sp = rest.find(' ');
      bundle.meta.emplace_back(rest.substr(0, sp),
                               sp == std::string::npos ? "" : rest.substr(sp + 1));
      continue;
    }
    if (line.rfind("# section fal ", 0) == 0) {
      bundle.fals.push_back({line.substr(14), {}});
      mode = Mode::fal;
      header_pending = true;
      continue;
    }
    if (line.rfind("# section points ", 0) == 0) {
      bundle.series.push_back({line.substr(17), {}, {}});
      mode = Mode::points;
      header_pending = true;
      continue;
    }
    if (line.rfind("# attr ", 0) == 0) {
      if (mode != Mode::fal) throw std::runtime_error("read_fad_bundle: attr outside a fal section");
      const std::string rest = line.substr(7);
      const auto sp = rest.find(' ');
      const std::string k = rest.substr(0, sp);
      const std::string v = sp == std::string::npos ? "" : rest.substr(sp + 1);
      auto& fal = bundle.fals.back().fal;
      if (k == "option")
        fal.option = FalOption(std::stoi(v));
      else if (k == "Lr_max")
        fal.Lr_max = std::stod(v);
      else if (k == "provenance")
        fal.provenance = v;
      else
        throw std::runtime_error("read_fad_bundle: unknown attr '" + k + "'");
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (header_pending) {  // column header line
      header_pending = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (mode == Mode::fal) {
      if (cells.size() != 2) throw std::runtime_error("read_fad_bundle: bad fal row");
      bundle.fals.back().fal.Lr.push_back(std::stod(cells[0]));
      bundle.fals.back().fal.f.push_back(std::stod(cells[1]));
    } else if (mode == Mode::points) {
      if (cells.size() < 4) throw std::runtime_error("read_fad_bundle: bad points row");
      AssessmentPoint p;
      p.load = std::stod(cells[0]);
      p.Lr = std::stod(cells[1]);
      p.Kr = std::stod(cells[2]);
      p.label = cells.size() >= 5 ? cells[4] : "";
      bundle.series.back().points.push_back(p);
      bundle.series.back().failed.push_back(std::stoi(cells[3]));
    } else {
      throw std::runtime_error("read_fad_bundle: data before any section");
    }
  }
  return bundle;
}

void write_fields_csv(const Simulation& sim, int step, double load, const std::string& path) {
  const Mesh& mesh = sim.mesh();
  const int nn = mesh.n_nodes();
  std::vector<double> den(nn, 0.0), sxx(nn, 0.0), syy(nn, 0.0), sxy(nn, 0.0), epq(nn, 0.0);
  const auto& pts = QuadShape::gauss_points();
  double N[4], dN[4][2];
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int q = 0; q < 4; ++q) {
      QuadShape::eval(pts[q][0], pts[q][1], N, dN);
      const double w = sim.geometry(e)[q].weight;
      const PointState& st = sim.state().qp[e][q];
      for (int a = 0; a < 4; ++a) {
        const int n = mesh.elems[e][a];
        den[n] += w * N[a];
        sxx[n] += w * N[a] * st.sigma.xx;
        syy[n] += w * N[a] * st.sigma.yy;
        sxy[n] += w * N[a] * st.sigma.xy;
        epq[n] += w * N[a] * st.eps_p_eq;
      }
    }
  auto out = open_output(path, "write_fields_csv");
  out << "# " << kFormatVersion << " fields\n";
  out << "step,load,node_id,x,y,u_x,u_y,phi,C,sigma_xx,sigma_yy,sigma_xy,eps_p_eq\n";
  for (int n = 0; n < nn; ++n) {
    const auto [ux, uy] = sim.global_displacement(n);
    const double d = den[n] > 0.0 ? den[n] : 1.0;
    out << step << ',' << fmt_g17(load) << ',' << n + 1 << ',' << fmt_g17(mesh.nodes[n].x) << ','
        << fmt_g17(mesh.nodes[n].y) << ',' << fmt_g17(ux) << ',' << fmt_g17(uy) << ','
        << fmt_g17(sim.state().phi[n]) << ',' << fmt_g17(sim.state().conc[n]) << ','
        << fmt_g17(sxx[n] / d) << ',' << fmt_g17(syy[n] / d) << ',' << fmt_g17(sxy[n] / d) << ','
        << fmt_g17(epq[n] / d) << '\n';
  }
}

void write_summary(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::string& path) {
  auto out = open_output(path, "write_summary");
  out << "# " << kFormatVersion << " summary\n";
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
}

std::map<std::string, std::string> read_summary(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::load(path);
  std::map<std::string, std::string> out;
  for (const auto& k : kv.keys()) out[k] = kv.get(k);
  return out;
}

}  // namespace fadforge
