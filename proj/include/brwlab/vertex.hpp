#pragma once

// Canonical encodings for vertices of the lazily generated infinite graphs:
// rooted trees, Cartesian products of two trees, and free products of two
// groups. Equal encodings denote equal vertices and vice versa.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace brw {

class EncodingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Path from the root: entry i is the child index taken at depth i.
struct TreeWord {
  std::vector<std::uint32_t> path;

  std::size_t depth() const { return path.size(); }
  bool is_root() const { return path.empty(); }
  TreeWord parent() const;
  TreeWord child(std::uint32_t index) const;

  friend auto operator<=>(const TreeWord&, const TreeWord&) = default;
};

/// Tree distance between two words of the same rooted tree.
std::size_t tree_distance(const TreeWord& a, const TreeWord& b);
/// True if `ancestor` lies on the path from the root to `w` (inclusive).
bool is_prefix(const TreeWord& ancestor, const TreeWord& w);

struct ProductVertex {
  TreeWord first;
  TreeWord second;

  friend auto operator<=>(const ProductVertex&, const ProductVertex&) = default;
};

/// One token of a free-product word. `factor` is 1 or 2. For a cyclic factor
/// of order k, `gen` is a residue in [1, k). For a free factor, `gen` is a
/// signed generator index (+i or -i for the i-th generator).
struct Letter {
  std::uint8_t factor = 0;
  std::int32_t gen = 0;

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

/// Reduced word in Γ₁ ∗ Γ₂. A syllable is a maximal run of tokens of the
/// same factor; cyclic syllables are a single token, free syllables are
/// freely reduced. The empty word is the identity.
struct GroupWord {
  std::vector<Letter> letters;

  bool is_identity() const { return letters.empty(); }
  friend auto operator<=>(const GroupWord&, const GroupWord&) = default;
};

using VertexId = std::variant<TreeWord, ProductVertex, GroupWord>;

struct VertexHash {
  std::size_t operator()(const VertexId& v) const noexcept;
  std::size_t operator()(const TreeWord& w) const noexcept;
};

std::string to_string(const TreeWord& w);
std::string to_string(const GroupWord& w);
std::string to_string(const VertexId& v);

/// Parses "o", "0.1.2" style tree words.
TreeWord parse_tree_word(const std::string& text);

template <class T>
const T& expect(const VertexId& v, const char* family) {
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw EncodingError(std::string("vertex ") + to_string(v) + " is not a valid " + family + " vertex");
}

}  // namespace brw
