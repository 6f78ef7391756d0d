#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fadforge/fad.hpp"
#include "fadforge/fem.hpp"
#include "fadforge/mesh.hpp"

namespace fadforge {

/// Version tag carried as the first line of every text artifact.
inline constexpr const char* kFormatVersion = "FADFORGE-v1";

/// Round-trip-exact double formatting shared by all writers.
std::string fmt_g17(double v);

/// Line-oriented `key = value` file with `#` comments. Keys keep insertion
/// order so that re-serialization is deterministic.
class KeyValueFile {
 public:
  static KeyValueFile load(const std::string& path);
  static KeyValueFile parse_text(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;  // throws when missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int_or(const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;  // comma separated

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);

  std::vector<std::string> keys() const { return order_; }
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  void save(const std::string& path, const std::string& kind) const;
  std::string serialize(const std::string& kind) const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

/// Run configuration: a key-value file validated against the schema of known
/// keys. Unknown keys are rejected to catch typos early.
struct RunConfig {
  KeyValueFile kv;

  static RunConfig load(const std::string& path);
  static RunConfig from_text(const std::string& text);

  /// Throws std::invalid_argument naming the first unknown key.
  void validate_keys() const;

  MaterialParams material(const std::string& prefix = "material.") const;
  HydrogenParams hydrogen(const std::string& prefix = "hydrogen.") const;
  SolverConfig solver() const;
};

void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

/// Per-element heterogeneous property overrides.
struct PropertyFieldMap {
  std::map<int, double> sigma_y0;
  std::map<int, double> Gc;
  std::map<int, double> xb;        // bainite fraction in [0, 1]
  std::map<int, double> eps_p_eq;  // initial equivalent plastic strain
  std::map<int, SymTensor2> residual_stress;

  bool empty() const {
    return sigma_y0.empty() && Gc.empty() && xb.empty() && eps_p_eq.empty() &&
           residual_stress.empty();
  }
  /// Throws when referenced elements do not exist or xb leaves [0, 1].
  void validate(const Mesh& mesh) const;
};

PropertyFieldMap load_property_field(const std::string& path);
void write_property_field(const PropertyFieldMap& map, const std::string& path);

/// FAD export bundle: FAL sample series plus assessment/failure point series,
/// written to a single sectioned CSV. The writer/reader pair round-trips
/// bit-exactly.
struct FadBundle {
  struct FalSeries {
    std::string name;
    FailureAssessmentLine fal;
  };
  struct PointSeries {
    std::string name;
    std::vector<AssessmentPoint> points;
    std::vector<int> failed;  // 1 when the point is a failure point
  };
  std::vector<FalSeries> fals;
  std::vector<PointSeries> series;
  std::vector<std::pair<std::string, std::string>> meta;
};

void write_fad_bundle(const FadBundle& bundle, const std::string& path);
FadBundle read_fad_bundle(const std::string& path);

/// Per-step nodal field CSV: columns
/// step,load,node_id,x,y,u_x,u_y,phi,C,sigma_xx,sigma_yy,sigma_xy,eps_p_eq
/// (stresses and plastic strain are volume-averaged to the nodes).
void write_fields_csv(const Simulation& sim, int step, double load, const std::string& path);

/// Ordered key=value summary file.
void write_summary(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::string& path);
std::map<std::string, std::string> read_summary(const std::string& path);

void ensure_directory(const std::string& path);

}  // namespace fadforge
