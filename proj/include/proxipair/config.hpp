#pragma once

// Problem configuration: a flat INI-style text format.
//
//   # comment            ; also a comment
//   dimension = 2        top-level keys come before the first section
//   [set_a]
//   type = box
//   lo = 0, 0
//
// Lists are comma separated, matrix rows are separated by ';', and a halfspace is
// written "n_1, ..., n_d <= offset". The full grammar is documented in README.md.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "proxipair/core.hpp"
#include "proxipair/geometry.hpp"
#include "proxipair/mappings.hpp"
#include "proxipair/stability.hpp"

namespace proxipair {

/// A configuration problem with its position in the source file.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& field,
              const std::string& message)
      : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
              (field.empty() ? "" : field + ": ") + message),
        line_(line), column_(column), field_(field) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  int column_;
  std::string field_;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
  int column = 0;  // column of the first character of the value

  std::string field() const { return section.empty() ? key : "[" + section + "] " + key; }
};

/// Raw key/value document with source positions.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::istream& in, std::string source) {
    ConfigDocument doc;
    doc.source_ = std::move(source);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' || line[i] == ';') {
          // ';' separates matrix rows; only treat it as a comment at line start
          if (line[i] == '#' || line.find_first_not_of(" \t") == i) {
            line.erase(i);
            break;
          }
        }
      }
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      std::string body = line.substr(first, last - first + 1);
      if (body.front() == '[') {
        if (body.back() != ']')
          throw ConfigError(doc.source_, line_no, static_cast<int>(first) + 1, "",
                            "unterminated section header");
        section = trim(body.substr(1, body.size() - 2));
        if (section.empty())
          throw ConfigError(doc.source_, line_no, static_cast<int>(first) + 1, "", "empty section name");
        doc.sections_.insert(section);
        doc.section_lines_[section] = line_no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(doc.source_, line_no, static_cast<int>(first) + 1, "",
                          "expected 'key = value'");
      ConfigEntry e;
      e.section = section;
      e.key = trim(line.substr(0, eq));
      if (e.key.empty())
        throw ConfigError(doc.source_, line_no, static_cast<int>(first) + 1, "", "missing key");
      const auto vstart = line.find_first_not_of(" \t", eq + 1);
      e.column = static_cast<int>(vstart == std::string::npos ? eq + 2 : vstart + 1);
      e.value = vstart == std::string::npos ? "" : trim(line.substr(vstart));
      e.line = line_no;
      doc.entries_.push_back(std::move(e));
    }
    return doc;
  }

  static ConfigDocument parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, 0, "", "cannot open config file");
    return parse(in, path.string());
  }

  const std::string& source() const noexcept { return source_; }
  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  int section_line(const std::string& s) const {
    auto it = section_lines_.find(s);
    return it == section_lines_.end() ? 0 : it->second;
  }

  std::vector<const ConfigEntry*> all(const std::string& section, const std::string& key) const {
    std::vector<const ConfigEntry*> out;
    for (const auto& e : entries_)
      if (e.section == section && e.key == key) out.push_back(&e);
    return out;
  }

  /// The single entry for (section, key), or nullptr; duplicates are an error.
  const ConfigEntry* find(const std::string& section, const std::string& key) const {
    auto v = all(section, key);
    if (v.size() > 1)
      throw ConfigError(source_, v[1]->line, 1, v[1]->field(), "duplicate key");
    return v.empty() ? nullptr : v.front();
  }

  const ConfigEntry& require(const std::string& section, const std::string& key) const {
    if (const auto* e = find(section, key)) return *e;
    const std::string field = section.empty() ? key : "[" + section + "] " + key;
    throw ConfigError(source_, section_line(section), 1, field, "required key is missing");
  }

  /// Rejects keys outside `allowed` for a section.
  void restrict_keys(const std::string& section, const std::set<std::string>& allowed) const {
    for (const auto& e : entries_)
      if (e.section == section && !allowed.count(e.key))
        throw ConfigError(source_, e.line, 1, e.field(), "unknown key");
  }

  void restrict_sections(const std::set<std::string>& allowed) const {
    for (const auto& s : sections_)
      if (!allowed.count(s))
        throw ConfigError(source_, section_line(s), 1, "[" + s + "]", "unknown section");
  }

  [[noreturn]] void fail(const ConfigEntry& e, const std::string& message, int offset = 0) const {
    throw ConfigError(source_, e.line, e.column + offset, e.field(), message);
  }

  // -- typed accessors ------------------------------------------------------

  double number(const ConfigEntry& e) const {
    auto v = numbers_with_offsets(e, e.value, 0);
    if (v.size() != 1) fail(e, "expected a single number");
    return v.front();
  }

  long integer(const ConfigEntry& e) const {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(e.value, &pos);
    } catch (const std::exception&) {
      fail(e, "expected an integer, got '" + e.value + "'");
    }
    if (pos != e.value.size()) fail(e, "expected an integer, got '" + e.value + "'");
    return v;
  }

  std::vector<double> list(const ConfigEntry& e) const { return numbers_with_offsets(e, e.value, 0); }

  Vector vector(const ConfigEntry& e, std::size_t dim) const {
    auto v = list(e);
    if (v.size() != dim)
      fail(e, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(v.size()));
    return Vector(v);
  }

  Matrix matrix(const ConfigEntry& e, std::size_t dim) const {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start <= e.value.size()) {
      auto end = e.value.find(';', start);
      if (end == std::string::npos) end = e.value.size();
      auto row = numbers_with_offsets(e, e.value.substr(start, end - start), static_cast<int>(start));
      if (row.size() != dim)
        fail(e, "matrix row " + std::to_string(rows.size() + 1) + " needs " + std::to_string(dim) +
                    " entries", static_cast<int>(start));
      rows.push_back(std::move(row));
      start = end + 1;
    }
    if (rows.size() != dim) fail(e, "matrix needs " + std::to_string(dim) + " rows separated by ';'");
    return Matrix(rows);
  }

  Halfspace halfspace(const ConfigEntry& e, std::size_t dim) const {
    const auto le = e.value.find("<=");
    if (le == std::string::npos) fail(e, "expected 'n_1, ..., n_d <= offset'");
    auto normal = numbers_with_offsets(e, e.value.substr(0, le), 0);
    if (normal.size() != dim) fail(e, "normal needs " + std::to_string(dim) + " entries");
    auto off = numbers_with_offsets(e, e.value.substr(le + 2), static_cast<int>(le + 2));
    if (off.size() != 1) fail(e, "expected one offset after '<='", static_cast<int>(le + 2));
    return Halfspace{Vector(normal), off.front()};
  }

  std::vector<std::string> words(const ConfigEntry& e) const {
    std::vector<std::string> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::vector<double> numbers_with_offsets(const ConfigEntry& e, const std::string& text,
                                           int base) const {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find(',', start);
      if (end == std::string::npos) end = text.size();
      const std::string raw = text.substr(start, end - start);
      const auto lead = raw.find_first_not_of(" \t");
      const int col = base + static_cast<int>(start + (lead == std::string::npos ? 0 : lead));
      const std::string tok = trim(raw);
      if (tok.empty()) fail(e, "empty list element", col);
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        fail(e, "expected a number, got '" + tok + "'", col);
      }
      if (pos != tok.size() || !std::isfinite(v)) fail(e, "expected a number, got '" + tok + "'", col);
      out.push_back(v);
      start = end + 1;
    }
    return out;
  }

  std::string source_;
  std::vector<ConfigEntry> entries_;
  std::set<std::string> sections_;
  std::map<std::string, int> section_lines_;
};

// ---------------------------------------------------------------------------
// Typed problem configuration
// ---------------------------------------------------------------------------

struct SolverSettings {
  double tol = 1e-10;
  int max_iter = 100000;
  double gap_tol = 1e-12;
  int n_starts = 5;  // uniqueness check (contraction maps)
  std::optional<ProductPoint> start;
  // nonexpansive maps
  std::vector<long> schedule;
  double outer_tol = 1e-6;
  int max_inner = 1000000;
  std::optional<ProximalPair> anchor;  // nullopt: use the pair computed by gap
};

struct StabilitySettings {
  std::vector<double> epsilons;
  long n_samples = 1000;
  std::vector<BoundKind> kinds;
};

struct OracleSettings {
  double resolution = 0.05;
  double threshold = 1e-8;
};

struct ProblemConfig {
  std::string source;
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> output_dir;
  ConvexSet set_a;
  ConvexSet set_b;
  CyclicMap map;
  SolverSettings solver;
  int check_samples = 1000;
  std::optional<StabilitySettings> stability;
  std::optional<OracleSettings> oracle;
};

namespace detail {

inline ConvexSet read_set(const ConfigDocument& doc, const std::string& section, std::size_t dim) {
  if (!doc.has_section(section))
    throw ConfigError(doc.source(), 0, 0, "[" + section + "]", "required section is missing");
  const auto& type = doc.require(section, "type");
  try {
    if (type.value == "box") {
      doc.restrict_keys(section, {"type", "lo", "hi"});
      const auto& lo = doc.require(section, "lo");
      const auto& hi = doc.require(section, "hi");
      Vector vlo = doc.vector(lo, dim), vhi = doc.vector(hi, dim);
      for (std::size_t i = 0; i < dim; ++i)
        if (vlo[i] > vhi[i]) doc.fail(hi, "hi[" + std::to_string(i) + "] is below lo[" + std::to_string(i) + "]");
      return ConvexSet::box(vlo, vhi);
    }
    if (type.value == "ball") {
      doc.restrict_keys(section, {"type", "center", "radius"});
      const auto& c = doc.require(section, "center");
      const auto& r = doc.require(section, "radius");
      const double radius = doc.number(r);
      if (!(radius > 0.0)) doc.fail(r, "radius must be positive");
      return ConvexSet::ball(doc.vector(c, dim), radius);
    }
    if (type.value == "polytope") {
      doc.restrict_keys(section, {"type", "halfspace"});
      auto entries = doc.all(section, "halfspace");
      if (entries.empty()) doc.fail(type, "polytope needs at least one 'halfspace' line");
      std::vector<Halfspace> hs;
      for (const auto* e : entries) hs.push_back(doc.halfspace(*e, dim));
      try {
        return ConvexSet::polytope(std::move(hs));
      } catch (const InvalidArgument& ex) {
        doc.fail(*entries.front(), ex.what());
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& ex) {
    doc.fail(type, ex.what());
  }
  doc.fail(type, "unknown set type '" + type.value + "' (expected box, ball or polytope)");
}

inline DeclaredClass read_class(const ConfigDocument& doc, const ConfigEntry& cls) {
  if (cls.value == "nonexpansive") return Nonexpansive{};
  if (cls.value == "contraction") {
    const auto& lam = doc.require("map", "lambda");
    const double l = doc.number(lam);
    if (!(l > 0.0 && l < 1.0)) doc.fail(lam, "must lie in (0,1), got " + lam.value);
    return Contraction{l};
  }
  doc.fail(cls, "unknown class '" + cls.value + "' (expected contraction or nonexpansive)");
}

inline CyclicMap read_map(const ConfigDocument& doc, std::size_t dim, const ConvexSet& a,
                          const ConvexSet& b) {
  if (!doc.has_section("map"))
    throw ConfigError(doc.source(), 0, 0, "[map]", "required section is missing");
  const auto& fam = doc.require("map", "family");
  if (const auto* lam = doc.find("map", "lambda")) {
    const double l = doc.number(*lam);
    if (!(l > 0.0 && l < 1.0)) doc.fail(*lam, "must lie in (0,1), got " + lam->value);
  }
  try {
    if (fam.value == "anchored_affine") {
      doc.restrict_keys("map", {"family", "class", "lambda", "a_star", "b_star", "iso_ab", "iso_ba"});
      if (const auto* cls = doc.find("map", "class"); cls && cls->value != "contraction")
        doc.fail(*cls, "anchored_affine maps are contractions");
      const auto& lam = doc.require("map", "lambda");
      Matrix ab = doc.find("map", "iso_ab") ? doc.matrix(*doc.find("map", "iso_ab"), dim) : Matrix::identity(dim);
      Matrix ba = doc.find("map", "iso_ba") ? doc.matrix(*doc.find("map", "iso_ba"), dim) : Matrix::identity(dim);
      return make_anchored_affine(doc.vector(doc.require("map", "a_star"), dim),
                                  doc.vector(doc.require("map", "b_star"), dim), doc.number(lam),
                                  ab, ba, a, b);
    }
    if (fam.value == "sin_example") {
      doc.restrict_keys("map", {"family", "class"});
      if (dim != 2) doc.fail(fam, "sin_example is planar (dimension must be 2)");
      if (!is_sin_example_domain(a, b))
        doc.fail(fam, "sin_example is defined only on A = [0,1]^2, B = [0,1] x [2,3]");
      if (const auto* cls = doc.find("map", "class"); cls && cls->value != "nonexpansive")
        doc.fail(*cls, "sin_example is nonexpansive, not a contraction");
      return make_sin_example();
    }
    if (fam.value == "constant_proximal") {
      doc.restrict_keys("map", {"family", "class", "lambda", "a_star", "b_star"});
      const auto& cls = doc.require("map", "class");
      return make_constant_proximal(doc.vector(doc.require("map", "a_star"), dim),
                                    doc.vector(doc.require("map", "b_star"), dim),
                                    read_class(doc, cls));
    }
    if (fam.value == "composite") {
      doc.restrict_keys("map", {"family", "class", "lambda", "ab_first", "ab_second", "ab_offset",
                                "ba_first", "ba_second", "ba_offset"});
      auto piece = [&](const std::string& p) {
        return AffinePiece{doc.matrix(doc.require("map", p + "_first"), dim),
                           doc.matrix(doc.require("map", p + "_second"), dim),
                           doc.vector(doc.require("map", p + "_offset"), dim)};
      };
      return make_composite(piece("ab"), piece("ba"), read_class(doc, doc.require("map", "class")));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& ex) {
    doc.fail(fam, ex.what());
  }
  doc.fail(fam, "unknown map family '" + fam.value +
                    "' (expected anchored_affine, sin_example, constant_proximal or composite)");
}

inline BoundKind read_bound_kind(const ConfigDocument& doc, const ConfigEntry& e, const std::string& w) {
  if (w == "contraction") return BoundKind::Contraction;
  if (w == "nonexpansive") return BoundKind::Nonexpansive;
  if (w == "strict_convex") return BoundKind::StrictConvex;
  doc.fail(e, "unknown bound kind '" + w + "' (expected contraction, nonexpansive, strict_convex)");
}

}  // namespace detail

inline ProblemConfig load_config(const ConfigDocument& doc) {
  doc.restrict_sections({"set_a", "set_b", "map", "solver", "checks", "stability", "oracle"});
  doc.restrict_keys("", {"dimension", "seed", "output_dir"});
  const auto& dim_e = doc.require("", "dimension");
  const long dim = doc.integer(dim_e);
  if (dim < 1) doc.fail(dim_e, "must be a positive integer");
  const auto d = static_cast<std::size_t>(dim);

  ConvexSet a = detail::read_set(doc, "set_a", d);
  ConvexSet b = detail::read_set(doc, "set_b", d);
  CyclicMap map = detail::read_map(doc, d, a, b);
  ProblemConfig cfg{doc.source(), d, 0, std::nullopt, a, b, map, {}, 1000, std::nullopt, std::nullopt};

  if (const auto* s = doc.find("", "seed")) {
    const long v = doc.integer(*s);
    if (v < 0) doc.fail(*s, "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  if (const auto* o = doc.find("", "output_dir")) cfg.output_dir = o->value;

  doc.restrict_keys("solver", {"tol", "max_iter", "gap_tol", "n_starts", "start_a", "start_b",
                               "schedule", "outer_tol", "max_inner", "anchor", "anchor_a", "anchor_b"});
  auto positive = [&](const char* key, double& out) {
    if (const auto* e = doc.find("solver", key)) {
      out = doc.number(*e);
      if (!(out > 0.0)) doc.fail(*e, "must be positive");
    }
  };
  auto count = [&](const std::string& section, const char* key, auto& out, long min) {
    if (const auto* e = doc.find(section, key)) {
      const long v = doc.integer(*e);
      if (v < min) doc.fail(*e, "must be at least " + std::to_string(min));
      out = static_cast<std::remove_reference_t<decltype(out)>>(v);
    }
  };
  SolverSettings& sv = cfg.solver;
  positive("tol", sv.tol);
  positive("gap_tol", sv.gap_tol);
  positive("outer_tol", sv.outer_tol);
  count("solver", "max_iter", sv.max_iter, 0);
  count("solver", "max_inner", sv.max_inner, 0);
  count("solver", "n_starts", sv.n_starts, 1);
  const auto* sa = doc.find("solver", "start_a");
  const auto* sb = doc.find("solver", "start_b");
  if ((sa == nullptr) != (sb == nullptr))
    doc.fail(sa ? *sa : *sb, "start_a and start_b must be given together");
  if (sa) {
    ProductPoint start(doc.vector(*sa, d), doc.vector(*sb, d));
    if (!contains(a, start.first, 1e-9)) doc.fail(*sa, "start point is not in A");
    if (!contains(b, start.second, 1e-9)) doc.fail(*sb, "start point is not in B");
    sv.start = start;
  }
  if (const auto* e = doc.find("solver", "schedule")) {
    const auto w = doc.words(*e);
    if (w.size() == 3 && w[0] == "geometric") {
      // "geometric, first, last"
      try {
        sv.schedule = geometric_schedule(std::stol(w[1]), std::stol(w[2]));
      } catch (const std::exception&) {
        doc.fail(*e, "expected 'geometric, first, last'");
      }
    } else {
      for (double v : doc.list(*e)) {
        if (v != std::floor(v)) doc.fail(*e, "schedule entries must be integers");
        sv.schedule.push_back(static_cast<long>(v));
      }
    }
    for (std::size_t i = 0; i < sv.schedule.size(); ++i) {
      if (sv.schedule[i] < 2) doc.fail(*e, "schedule entries must be >= 2");
      if (i > 0 && sv.schedule[i] <= sv.schedule[i - 1]) doc.fail(*e, "schedule must be strictly increasing");
    }
    if (sv.schedule.empty()) doc.fail(*e, "schedule is empty");
  } else {
    sv.schedule = geometric_schedule(2, 1024);
  }
  if (const auto* e = doc.find("solver", "anchor")) {
    if (e->value == "explicit") {
      Vector x0 = doc.vector(doc.require("solver", "anchor_a"), d);
      Vector y0 = doc.vector(doc.require("solver", "anchor_b"), d);
      if (!contains(a, x0, 1e-9)) doc.fail(doc.require("solver", "anchor_a"), "anchor is not in A");
      if (!contains(b, y0, 1e-9)) doc.fail(doc.require("solver", "anchor_b"), "anchor is not in B");
      const double dist = distance(x0, y0);
      sv.anchor = ProximalPair{std::move(x0), std::move(y0), dist, 0, true, {}};
    } else if (e->value != "gap") {
      doc.fail(*e, "expected 'gap' or 'explicit'");
    }
  }

  doc.restrict_keys("checks", {"n_samples"});
  count("checks", "n_samples", cfg.check_samples, 1);

  if (doc.has_section("stability")) {
    doc.restrict_keys("stability", {"epsilon", "n_samples", "bounds"});
    StabilitySettings st;
    const auto& eps = doc.require("stability", "epsilon");
    st.epsilons = doc.list(eps);
    for (double v : st.epsilons)
      if (!(v > 0.0)) doc.fail(eps, "every epsilon must be positive");
    count("stability", "n_samples", st.n_samples, 1);
    if (const auto* k = doc.find("stability", "bounds")) {
      for (const auto& w : doc.words(*k)) st.kinds.push_back(detail::read_bound_kind(doc, *k, w));
      for (BoundKind kind : st.kinds)
        if (kind == BoundKind::Contraction && !cfg.map.is_contraction())
          doc.fail(*k, "the contraction bound needs a map of class contraction");
    } else if (cfg.map.is_contraction()) {
      st.kinds = {BoundKind::Contraction};
    } else {
      st.kinds = {BoundKind::Nonexpansive, BoundKind::StrictConvex};
    }
    cfg.stability = st;
  }

  if (doc.has_section("oracle")) {
    doc.restrict_keys("oracle", {"resolution", "threshold"});
    OracleSettings os;
    if (const auto* e = doc.find("oracle", "resolution")) {
      os.resolution = doc.number(*e);
      if (!(os.resolution > 0.0)) doc.fail(*e, "must be positive");
    }
    if (const auto* e = doc.find("oracle", "threshold")) os.threshold = doc.number(*e);
    if (d > 3)
      throw ConfigError(doc.source(), doc.section_line("oracle"), 1, "[oracle]",
                        "grid oracle supports dimension <= 3");
    cfg.oracle = os;
  }
  return cfg;
}

inline ProblemConfig load_config(const std::filesystem::path& path) {
  return load_config(ConfigDocument::parse_file(path));
}

}  // namespace proxipair
