#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace dlq {

enum class CodeFamily { Hex488, Hex666, Hex4612, Steane, FiveQubitPerfect };

// Mixed marks a non-CSS generator (only the five-qubit code uses it).
enum class CheckKind { X, Z, Mixed };

enum class PlaquetteColor { Red, Green, Blue, None };

struct Coord {
  int x = 0;
  int y = 0;
  bool operator==(const Coord&) const = default;
};

struct Check {
  std::size_t id = 0;
  CheckKind kind = CheckKind::X;
  std::vector<std::size_t> support;
  std::size_t ancilla = 0;  // physical qubit id inside the block
  PlaquetteColor color = PlaquetteColor::None;
  std::size_t plaquette = 0;
  std::string paulis;  // per-support Pauli letters, Mixed checks only

  std::size_t weight() const noexcept { return support.size(); }
  bool operator==(const Check&) const = default;
};

// Physical qubit ids: data qubits are 0..n-1, the ancilla of check c is n + c.
struct CodeBlock {
  CodeFamily family = CodeFamily::Steane;
  int distance = 3;
  std::size_t n = 0;
  std::vector<Coord> coords;
  std::vector<Check> checks;
  std::string block_id;

  std::size_t data_count() const noexcept { return n; }
  std::size_t ancilla_count() const noexcept { return checks.size(); }
  std::size_t physical_count() const noexcept { return n + checks.size(); }
  std::size_t plaquette_count() const;
  bool is_lattice() const noexcept;
  bool operator==(const CodeBlock&) const = default;
};

constexpr int kDefaultMaxDistance = 25;
constexpr std::size_t kMaxDistanceCheckQubits = 20;

std::string family_name(CodeFamily family);
CodeFamily parse_family(const std::string& text);
std::string kind_name(CheckKind kind);
std::string color_name(PlaquetteColor color);

bool is_lattice_family(CodeFamily family) noexcept;

// Closed-form data qubit count for the lattice families.
std::size_t expected_data_qubits(CodeFamily family, int d);

CodeBlock build_code(CodeFamily family, int d, int max_distance = kDefaultMaxDistance);

// Exhaustive minimum logical weight; refuses blocks with more than 20 data qubits.
int verify_distance(const CodeBlock& block);

struct InvariantReport {
  bool commutation = true;
  bool one_logical = true;
  bool qubit_count = true;
  bool face_sizes = true;
  bool paired_supports = true;
  bool ancillas = true;
  std::size_t logical_qubits = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

InvariantReport check_invariants(const CodeBlock& block);

nlohmann::json to_json(const CodeBlock& block);
CodeBlock code_from_json(const nlohmann::json& doc);

}  // namespace dlq
