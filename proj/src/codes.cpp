#include "dlq/codes.h"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "dlq/gf2.h"

namespace dlq {

namespace {

using Point = std::pair<int, int>;

// One vertex of a lattice tiling, identified by the three faces that meet there.
struct Vertex {
  std::array<Point, 3> faces;
  Coord at;
  bool operator<(const Vertex& o) const { return faces < o.faces; }
};

struct FaceSpec {
  Point key;
  Coord center;
  PlaquetteColor color;
};

// Turns a face set plus the tiling vertices into a color code: vertices touching two or
// more chosen faces become qubits, and each odd-weight face receives one corner vertex.
CodeBlock assemble(CodeFamily family, int d, const std::vector<FaceSpec>& faces,
                   const std::vector<Vertex>& vertices) {
  std::map<Point, std::size_t> face_index;
  for (std::size_t f = 0; f < faces.size(); ++f) face_index[faces[f].key] = f;

  std::vector<Vertex> chosen;
  std::vector<std::size_t> weight(faces.size(), 0);
  std::map<std::size_t, Vertex> corner;
  for (const auto& v : vertices) {
    int inside = 0;
    for (const auto& p : v.faces) inside += face_index.count(p) ? 1 : 0;
    if (inside >= 2) {
      chosen.push_back(v);
      for (const auto& p : v.faces) {
        auto it = face_index.find(p);
        if (it != face_index.end()) ++weight[it->second];
      }
    }
  }
  for (const auto& v : vertices) {
    int inside = 0;
    std::size_t owner = 0;
    for (const auto& p : v.faces) {
      auto it = face_index.find(p);
      if (it != face_index.end()) {
        ++inside;
        owner = it->second;
      }
    }
    if (inside != 1 || weight[owner] % 2 == 0) continue;
    auto it = corner.find(owner);
    if (it == corner.end() || v < it->second) corner[owner] = v;
  }
  for (const auto& [f, v] : corner) chosen.push_back(v);

  int min_x = 0, min_y = 0;
  if (!chosen.empty()) {
    min_x = chosen.front().at.x;
    min_y = chosen.front().at.y;
  }
  for (const auto& v : chosen) {
    min_x = std::min(min_x, v.at.x);
    min_y = std::min(min_y, v.at.y);
  }
  for (auto& v : chosen) v.at = {v.at.x - min_x, v.at.y - min_y};
  std::sort(chosen.begin(), chosen.end(), [](const Vertex& a, const Vertex& b) {
    return std::pair(a.at.x, a.at.y) < std::pair(b.at.x, b.at.y);
  });

  CodeBlock block;
  block.family = family;
  block.distance = d;
  block.n = chosen.size();
  for (const auto& v : chosen) block.coords.push_back(v.at);

  std::vector<std::vector<std::size_t>> supports(faces.size());
  for (std::size_t q = 0; q < chosen.size(); ++q) {
    for (const auto& p : chosen[q].faces) {
      auto it = face_index.find(p);
      if (it != face_index.end()) supports[it->second].push_back(q);
    }
  }
  std::size_t plaquette = 0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (supports[f].empty()) continue;
    for (CheckKind kind : {CheckKind::X, CheckKind::Z}) {
      Check c;
      c.id = block.checks.size();
      c.kind = kind;
      c.support = supports[f];
      c.color = faces[f].color;
      c.plaquette = plaquette;
      block.checks.push_back(std::move(c));
    }
    ++plaquette;
  }
  for (auto& c : block.checks) c.ancilla = block.n + c.id;
  return block;
}

bool is_octagon(Point p) { return ((p.first + p.second) % 2 + 2) % 2 == 0; }

CodeBlock build_488(int d) {
  // Face centers on the square lattice: octagons where i+j is even, squares elsewhere.
  // The region is a staircase triangle whose right edge halves a column of octagons.
  const int right = d;
  const int bottom = 1;
  std::set<Point> region;
  for (int j = bottom; j <= bottom + d - 3; j += 2) region.insert({right, j});
  for (int k = 0; k < (d - 1) / 2; ++k) {
    const int lo = bottom + 2 * (k / 2);
    const int hi = bottom + d - 2 - 2 * ((k + 1) / 2);
    for (int j = lo; j <= hi; ++j) region.insert({right - 1 - k, j});
  }

  std::vector<FaceSpec> faces;
  for (const auto& p : region) {
    PlaquetteColor color = PlaquetteColor::Blue;
    if (is_octagon(p)) color = (p.first % 2 == 0) ? PlaquetteColor::Red : PlaquetteColor::Green;
    faces.push_back({p, {4 * p.first, 4 * p.second}, color});
  }

  // Tiling vertices: each square corner touches the square and two octagons.
  std::set<Vertex> vertices;
  for (const auto& p : region) {
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const Point s{p.first + di, p.second + dj};
        if (is_octagon(s)) continue;
        const std::array<Point, 4> nb = {Point{s.first + 1, s.second}, Point{s.first, s.second + 1},
                                         Point{s.first - 1, s.second}, Point{s.first, s.second - 1}};
        for (int a = 0; a < 4; ++a) {
          const Point& o1 = nb[a];
          const Point& o2 = nb[(a + 1) % 4];
          Vertex v;
          v.faces = {s, o1, o2};
          v.at = {4 * s.first + (o1.first + o2.first - 2 * s.first),
                  4 * s.second + (o1.second + o2.second - 2 * s.second)};
          vertices.insert(v);
        }
      }
    }
  }
  return assemble(CodeFamily::Hex488, d, faces, {vertices.begin(), vertices.end()});
}

CodeBlock build_666(int d) {
  // Triangular point lattice; every third point is a hexagon center, the rest are qubits.
  const int side = 3 * (d - 1) / 2;
  auto is_face = [](int i, int j) { return ((i - j) % 3 + 3) % 3 == 1; };
  std::vector<FaceSpec> faces;
  std::vector<Vertex> vertices;
  for (int j = 0; j <= side; ++j) {
    for (int i = 0; i + j <= side; ++i) {
      if (is_face(i, j)) {
        faces.push_back({{i, j}, {2 * i + j, 2 * j}, static_cast<PlaquetteColor>(i % 3)});
      }
    }
  }
  for (int j = 0; j <= side; ++j) {
    for (int i = 0; i + j <= side; ++i) {
      if (is_face(i, j)) continue;
      // A qubit belongs to the hexagons among its six neighbours.
      const std::array<Point, 6> nb = {Point{i + 1, j}, Point{i - 1, j},     Point{i, j + 1},
                                       Point{i, j - 1}, Point{i + 1, j - 1}, Point{i - 1, j + 1}};
      std::vector<Point> touching;
      for (const auto& p : nb) {
        if (p.first >= 0 && p.second >= 0 && p.first + p.second <= side && is_face(p.first, p.second)) {
          touching.push_back(p);
        }
      }
      // Pad with sentinel faces outside the region so every vertex lists three faces.
      Vertex v;
      for (std::size_t k = 0; k < 3; ++k) {
        v.faces[k] = k < touching.size() ? touching[k] : Point{-100 - i, -100 - j - static_cast<int>(k)};
      }
      v.at = {2 * i + j, 2 * j};
      vertices.push_back(v);
    }
  }
  // Every qubit must be kept even when it touches a single hexagon.
  std::map<Point, std::size_t> face_index;
  for (std::size_t f = 0; f < faces.size(); ++f) face_index[faces[f].key] = f;

  CodeBlock block;
  block.family = CodeFamily::Hex666;
  block.distance = d;
  std::sort(vertices.begin(), vertices.end(), [](const Vertex& a, const Vertex& b) {
    return std::pair(a.at.x, a.at.y) < std::pair(b.at.x, b.at.y);
  });
  block.n = vertices.size();
  std::vector<std::vector<std::size_t>> supports(faces.size());
  for (std::size_t q = 0; q < vertices.size(); ++q) {
    block.coords.push_back(vertices[q].at);
    for (const auto& p : vertices[q].faces) {
      auto it = face_index.find(p);
      if (it != face_index.end()) supports[it->second].push_back(q);
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (CheckKind kind : {CheckKind::X, CheckKind::Z}) {
      Check c;
      c.id = block.checks.size();
      c.kind = kind;
      c.support = supports[f];
      c.color = faces[f].color;
      c.plaquette = f;
      block.checks.push_back(std::move(c));
    }
  }
  for (auto& c : block.checks) c.ancilla = block.n + c.id;
  return block;
}

CodeBlock build_4612(int d) {
  // Barycentric subdivision of the triangular lattice in sixth-lattice units: lattice
  // points are dodecagons, triangle centroids hexagons, edge midpoints squares. Tiling
  // vertices are the flags (corner, triangle, edge).
  const int m = (d - 1) / 2;
  auto inside = [m](Point p) {
    const int a = p.first + 2;
    const int b = p.second + 6 * m - 2;
    return a >= 0 && b >= 0 && a + b <= 6 * m;
  };
  auto kind_of = [](Point p) {
    const int a = ((p.first % 6) + 6) % 6;
    if (a == 0 && ((p.second % 6) + 6) % 6 == 0) return PlaquetteColor::Red;
    if (a == 2 || a == 4) return PlaquetteColor::Green;
    return PlaquetteColor::Blue;
  };
  std::set<Point> region_set;
  std::set<Vertex> vertices;
  for (int a = -2; a <= m + 2; ++a) {
    for (int b = -m - 2; b <= 2; ++b) {
      const std::array<std::array<Point, 3>, 2> tris = {
          std::array<Point, 3>{Point{a, b}, Point{a + 1, b}, Point{a, b + 1}},
          std::array<Point, 3>{Point{a + 1, b}, Point{a, b + 1}, Point{a + 1, b + 1}}};
      for (const auto& t : tris) {
        const Point h{2 * (t[0].first + t[1].first + t[2].first), 2 * (t[0].second + t[1].second + t[2].second)};
        for (int ci = 0; ci < 3; ++ci) {
          for (int oi = 0; oi < 3; ++oi) {
            if (oi == ci) continue;
            const Point c{6 * t[ci].first, 6 * t[ci].second};
            const Point q{3 * (t[ci].first + t[oi].first), 3 * (t[ci].second + t[oi].second)};
            Vertex v;
            v.faces = {c, h, q};
            const int sa = c.first + h.first + q.first;
            const int sb = c.second + h.second + q.second;
            v.at = {2 * sa + sb, 2 * sb};
            vertices.insert(v);
            for (const auto& p : v.faces) {
              if (inside(p)) region_set.insert(p);
            }
          }
        }
      }
    }
  }
  std::vector<FaceSpec> faces;
  for (const auto& p : region_set) faces.push_back({p, {2 * p.first + p.second, 2 * p.second}, kind_of(p)});
  return assemble(CodeFamily::Hex4612, d, faces, {vertices.begin(), vertices.end()});
}

CodeBlock build_steane() {
  CodeBlock block;
  block.family = CodeFamily::Steane;
  block.distance = 3;
  block.n = 7;
  block.coords = {{0, 0}, {2, 0}, {4, 0}, {1, 2}, {3, 2}, {5, 2}, {2, 4}};
  const std::vector<std::vector<std::size_t>> faces = {{0, 1, 2, 3}, {1, 2, 4, 5}, {2, 3, 5, 6}};
  const std::array<PlaquetteColor, 3> colors = {PlaquetteColor::Red, PlaquetteColor::Green, PlaquetteColor::Blue};
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (CheckKind kind : {CheckKind::X, CheckKind::Z}) {
      Check c;
      c.id = block.checks.size();
      c.kind = kind;
      c.support = faces[f];
      c.color = colors[f];
      c.plaquette = f;
      c.ancilla = block.n + c.id;
      block.checks.push_back(std::move(c));
    }
  }
  return block;
}

CodeBlock build_five_qubit() {
  CodeBlock block;
  block.family = CodeFamily::FiveQubitPerfect;
  block.distance = 3;
  block.n = 5;
  for (int i = 0; i < 5; ++i) block.coords.push_back({2 * i, 0});
  const std::string base = "XZZXI";
  for (std::size_t g = 0; g < 4; ++g) {
    Check c;
    c.id = g;
    c.kind = CheckKind::Mixed;
    c.plaquette = g;
    for (std::size_t q = 0; q < 5; ++q) {
      const char p = base[(q + 5 - g) % 5];
      if (p == 'I') continue;
      c.support.push_back(q);
      c.paulis.push_back(p);
    }
    c.ancilla = block.n + c.id;
    block.checks.push_back(std::move(c));
  }
  return block;
}

}  // namespace

std::size_t CodeBlock::plaquette_count() const {
  std::set<std::size_t> seen;
  for (const auto& c : checks) seen.insert(c.plaquette);
  return seen.size();
}

bool CodeBlock::is_lattice() const noexcept { return is_lattice_family(family); }

bool is_lattice_family(CodeFamily family) noexcept {
  return family == CodeFamily::Hex488 || family == CodeFamily::Hex666 || family == CodeFamily::Hex4612;
}

std::string family_name(CodeFamily family) {
  switch (family) {
    case CodeFamily::Hex488: return "Hex488";
    case CodeFamily::Hex666: return "Hex666";
    case CodeFamily::Hex4612: return "Hex4612";
    case CodeFamily::Steane: return "Steane";
    case CodeFamily::FiveQubitPerfect: return "FiveQubitPerfect";
  }
  throw std::invalid_argument("Unknown code family");
}

CodeFamily parse_family(const std::string& text) {
  std::string t;
  for (char ch : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (t == "488" || t == "hex488" || t == "4.8.8") return CodeFamily::Hex488;
  if (t == "666" || t == "hex666" || t == "6.6.6") return CodeFamily::Hex666;
  if (t == "4612" || t == "hex4612" || t == "4.6.12") return CodeFamily::Hex4612;
  if (t == "steane" || t == "7") return CodeFamily::Steane;
  if (t == "five" || t == "5" || t == "fivequbitperfect" || t == "perfect") return CodeFamily::FiveQubitPerfect;
  throw std::invalid_argument("Unknown code family '" + text + "'");
}

std::string kind_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::X: return "X";
    case CheckKind::Z: return "Z";
    case CheckKind::Mixed: return "Mixed";
  }
  return "?";
}

std::string color_name(PlaquetteColor color) {
  switch (color) {
    case PlaquetteColor::Red: return "red";
    case PlaquetteColor::Green: return "green";
    case PlaquetteColor::Blue: return "blue";
    case PlaquetteColor::None: return "none";
  }
  return "none";
}

std::size_t expected_data_qubits(CodeFamily family, int d) {
  const auto dd = static_cast<std::size_t>(d);
  switch (family) {
    case CodeFamily::Hex488: return (dd * dd + 2 * dd - 1) / 2;
    case CodeFamily::Hex666: return (3 * dd * dd + 1) / 4;
    case CodeFamily::Hex4612: return (3 * dd * dd - 2 * dd + 1) / 2;
    case CodeFamily::Steane: return 7;
    case CodeFamily::FiveQubitPerfect: return 5;
  }
  return 0;
}

CodeBlock build_code(CodeFamily family, int d, int max_distance) {
  if (family == CodeFamily::Steane) return build_steane();
  if (family == CodeFamily::FiveQubitPerfect) return build_five_qubit();
  if (d < 3 || d % 2 == 0) {
    throw std::invalid_argument("Distance must be an odd integer greater than or equal to 3");
  }
  if (d > max_distance) {
    throw std::invalid_argument("Distance " + std::to_string(d) + " exceeds the configured maximum " +
                                std::to_string(max_distance));
  }
  switch (family) {
    case CodeFamily::Hex488: return build_488(d);
    case CodeFamily::Hex666: return build_666(d);
    case CodeFamily::Hex4612: return build_4612(d);
    default: break;
  }
  throw std::invalid_argument("Unsupported code family");
}

namespace {

BitRow support_row(const Check& c, std::size_t n) {
  BitRow r(n);
  for (auto q : c.support) r.set(q);
  return r;
}

// Symplectic (x|z) row for a check.
BitRow symplectic_row(const Check& c, std::size_t n) {
  BitRow r(2 * n);
  for (std::size_t k = 0; k < c.support.size(); ++k) {
    char p = 'X';
    if (c.kind == CheckKind::Z) p = 'Z';
    if (c.kind == CheckKind::Mixed) p = c.paulis.at(k);
    if (p == 'X' || p == 'Y') r.set(c.support[k]);
    if (p == 'Z' || p == 'Y') r.set(n + c.support[k]);
  }
  return r;
}

bool symplectic_commute(const BitRow& a, const BitRow& b, std::size_t n) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += (a.get(i) && b.get(n + i)) ? 1 : 0;
    s += (a.get(n + i) && b.get(i)) ? 1 : 0;
  }
  return s % 2 == 0;
}

bool is_css(const CodeBlock& block) {
  return std::none_of(block.checks.begin(), block.checks.end(),
                      [](const Check& c) { return c.kind == CheckKind::Mixed; });
}

// Minimum weight of x with (checks_commute . x) = 0 and x outside span(checks_same).
int css_min_weight(const std::vector<BitRow>& commute_with, const std::vector<BitRow>& stabilizers, std::size_t n) {
  std::vector<std::uint64_t> column_syndrome(n, 0);
  for (std::size_t r = 0; r < commute_with.size(); ++r) {
    for (std::size_t q = 0; q < n; ++q) {
      if (commute_with[r].get(q)) column_syndrome[q] |= 1ULL << r;
    }
  }
  RowSpace span(n);
  for (const auto& s : stabilizers) span.insert(s);
  int best = static_cast<int>(n) + 1;
  std::uint64_t syndrome = 0;
  std::uint32_t current = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const int bit = std::countr_zero(g);
    current ^= 1U << bit;
    syndrome ^= column_syndrome[static_cast<std::size_t>(bit)];
    if (syndrome != 0) continue;
    const int w = std::popcount(current);
    if (w >= best) continue;
    BitRow v(n);
    for (std::size_t q = 0; q < n; ++q) {
      if ((current >> q) & 1U) v.set(q);
    }
    if (!span.contains(v)) best = w;
  }
  return best;
}

}  // namespace

int verify_distance(const CodeBlock& block) {
  const std::size_t n = block.n;
  if (n > kMaxDistanceCheckQubits) {
    throw std::domain_error("Exhaustive distance check is limited to 20 data qubits; use invariant checks only");
  }
  if (is_css(block)) {
    std::vector<BitRow> xs, zs;
    for (const auto& c : block.checks) (c.kind == CheckKind::X ? xs : zs).push_back(support_row(c, n));
    if (xs.size() > 64 || zs.size() > 64) throw std::domain_error("Too many checks for exhaustive search");
    return std::min(css_min_weight(zs, xs, n), css_min_weight(xs, zs, n));
  }
  if (n > 10) throw std::domain_error("Exhaustive non-CSS distance check is limited to 10 qubits");
  std::vector<BitRow> gens;
  for (const auto& c : block.checks) gens.push_back(symplectic_row(c, n));
  RowSpace group(2 * n);
  for (const auto& g : gens) group.insert(g);
  int best = static_cast<int>(n) + 1;
  const std::uint64_t total = 1ULL << (2 * n);
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    BitRow p(2 * n);
    int w = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const bool x = (mask >> q) & 1U;
      const bool z = (mask >> (n + q)) & 1U;
      if (x) p.set(q);
      if (z) p.set(n + q);
      if (x || z) ++w;
    }
    if (w >= best) continue;
    bool commutes = true;
    for (const auto& g : gens) {
      if (!symplectic_commute(p, g, n)) {
        commutes = false;
        break;
      }
    }
    if (commutes && !group.contains(p)) best = w;
  }
  return best;
}

InvariantReport check_invariants(const CodeBlock& block) {
  InvariantReport rep;
  const std::size_t n = block.n;
  auto fail = [&rep](bool& flag, const std::string& msg) {
    flag = false;
    rep.violations.push_back(msg);
  };

  for (const auto& c : block.checks) {
    for (auto q : c.support) {
      if (q >= n) {
        fail(rep.commutation, "check " + std::to_string(c.id) + " references qubit outside the block");
        return rep;
      }
    }
  }

  if (is_css(block)) {
    std::vector<BitRow> xs, zs;
    for (const auto& c : block.checks) (c.kind == CheckKind::X ? xs : zs).push_back(support_row(c, n));
    for (std::size_t a = 0; a < xs.size() && rep.commutation; ++a) {
      for (std::size_t b = 0; b < zs.size(); ++b) {
        if (xs[a].dot(zs[b]) != 0) {
          fail(rep.commutation, "X check " + std::to_string(a) + " anticommutes with Z check " + std::to_string(b));
          break;
        }
      }
    }
    rep.logical_qubits = n - gf2_rank(xs) - gf2_rank(zs);
  } else {
    std::vector<BitRow> gens;
    for (const auto& c : block.checks) gens.push_back(symplectic_row(c, n));
    for (std::size_t a = 0; a < gens.size() && rep.commutation; ++a) {
      for (std::size_t b = a + 1; b < gens.size(); ++b) {
        if (!symplectic_commute(gens[a], gens[b], n)) {
          fail(rep.commutation, "generators " + std::to_string(a) + " and " + std::to_string(b) + " anticommute");
          break;
        }
      }
    }
    rep.logical_qubits = n - gf2_rank(gens);
  }
  if (rep.logical_qubits != 1) {
    fail(rep.one_logical, "block encodes " + std::to_string(rep.logical_qubits) + " logical qubits");
  }

  if (block.is_lattice()) {
    const std::size_t expected = expected_data_qubits(block.family, block.distance);
    if (n != expected) {
      fail(rep.qubit_count, "expected " + std::to_string(expected) + " data qubits, found " + std::to_string(n));
    }
    if (2 * block.plaquette_count() != n - 1 || block.checks.size() != n - 1) {
      fail(rep.qubit_count, "plaquette count does not equal (n-1)/2");
    }
  }

  std::set<std::size_t> allowed;
  switch (block.family) {
    case CodeFamily::Hex488: allowed = {4, 8}; break;
    case CodeFamily::Hex666: allowed = {4, 6}; break;
    case CodeFamily::Hex4612: allowed = {4, 6, 8, 10, 12}; break;
    case CodeFamily::Steane: allowed = {4}; break;
    case CodeFamily::FiveQubitPerfect: allowed = {4}; break;
  }
  for (const auto& c : block.checks) {
    if (!allowed.count(c.weight())) {
      fail(rep.face_sizes, "check " + std::to_string(c.id) + " has weight " + std::to_string(c.weight()));
      break;
    }
  }

  if (is_css(block)) {
    std::map<std::size_t, std::vector<const Check*>> by_plaquette;
    for (const auto& c : block.checks) by_plaquette[c.plaquette].push_back(&c);
    for (const auto& [p, list] : by_plaquette) {
      if (list.size() != 2 || list[0]->kind == list[1]->kind || list[0]->support != list[1]->support) {
        fail(rep.paired_supports, "plaquette " + std::to_string(p) + " lacks a matching X/Z pair");
        break;
      }
    }
  }

  for (const auto& c : block.checks) {
    if (c.ancilla != n + c.id) {
      fail(rep.ancillas, "check " + std::to_string(c.id) + " does not own ancilla n+id");
      break;
    }
  }
  return rep;
}

nlohmann::json to_json(const CodeBlock& block) {
  nlohmann::json doc;
  doc["family"] = family_name(block.family);
  doc["distance"] = block.distance;
  doc["n"] = block.n;
  doc["block_id"] = block.block_id;
  doc["qubits"] = nlohmann::json::array();
  for (std::size_t q = 0; q < block.n; ++q) {
    doc["qubits"].push_back({{"id", q}, {"x", block.coords[q].x}, {"y", block.coords[q].y}});
  }
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : block.checks) {
    nlohmann::json jc = {{"id", c.id},           {"kind", kind_name(c.kind)}, {"color", color_name(c.color)},
                         {"support", c.support}, {"ancilla", c.ancilla},      {"plaquette", c.plaquette}};
    if (c.kind == CheckKind::Mixed) jc["paulis"] = c.paulis;
    doc["checks"].push_back(std::move(jc));
  }
  return doc;
}

CodeBlock code_from_json(const nlohmann::json& doc) {
  CodeBlock block;
  block.family = parse_family(doc.at("family").get<std::string>());
  block.distance = doc.at("distance").get<int>();
  block.n = doc.at("n").get<std::size_t>();
  block.block_id = doc.value("block_id", std::string());
  block.coords.assign(block.n, Coord{});
  for (const auto& q : doc.at("qubits")) {
    const auto id = q.at("id").get<std::size_t>();
    if (id >= block.n) throw std::invalid_argument("Qubit id out of range in code JSON");
    block.coords[id] = {q.at("x").get<int>(), q.at("y").get<int>()};
  }
  for (const auto& jc : doc.at("checks")) {
    Check c;
    c.id = jc.at("id").get<std::size_t>();
    const auto kind = jc.at("kind").get<std::string>();
    c.kind = kind == "X" ? CheckKind::X : kind == "Z" ? CheckKind::Z : CheckKind::Mixed;
    const auto color = jc.value("color", std::string("none"));
    c.color = color == "red"     ? PlaquetteColor::Red
              : color == "green" ? PlaquetteColor::Green
              : color == "blue"  ? PlaquetteColor::Blue
                                 : PlaquetteColor::None;
    c.support = jc.at("support").get<std::vector<std::size_t>>();
    c.ancilla = jc.at("ancilla").get<std::size_t>();
    c.plaquette = jc.value("plaquette", c.id);
    c.paulis = jc.value("paulis", std::string());
    block.checks.push_back(std::move(c));
  }
  return block;
}

}  // namespace dlq
