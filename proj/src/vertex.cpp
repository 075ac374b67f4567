#include "brwlab/vertex.hpp"

#include <algorithm>
#include <sstream>

namespace brw {

namespace {

inline std::size_t mix(std::size_t h, std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return h ^ (x + 0x9e3779b9 + (h << 6) + (h >> 2));
}

std::size_t hash_path(const std::vector<std::uint32_t>& p, std::size_t seed) {
  std::size_t h = mix(seed, p.size());
  for (auto c : p) h = mix(h, c);
  return h;
}

}  // namespace

TreeWord TreeWord::parent() const {
  if (path.empty()) throw EncodingError("root has no parent");
  TreeWord w{path};
  w.path.pop_back();
  return w;
}

TreeWord TreeWord::child(std::uint32_t index) const {
  TreeWord w{path};
  w.path.push_back(index);
  return w;
}

std::size_t tree_distance(const TreeWord& a, const TreeWord& b) {
  const auto n = std::min(a.depth(), b.depth());
  std::size_t lcp = 0;
  while (lcp < n && a.path[lcp] == b.path[lcp]) ++lcp;
  return a.depth() + b.depth() - 2 * lcp;
}

bool is_prefix(const TreeWord& ancestor, const TreeWord& w) {
  if (ancestor.depth() > w.depth()) return false;
  return std::equal(ancestor.path.begin(), ancestor.path.end(), w.path.begin());
}

std::size_t VertexHash::operator()(const TreeWord& w) const noexcept { return hash_path(w.path, 1); }

std::size_t VertexHash::operator()(const VertexId& v) const noexcept {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TreeWord>) {
          return hash_path(x.path, 1);
        } else if constexpr (std::is_same_v<T, ProductVertex>) {
          return mix(hash_path(x.first.path, 2), hash_path(x.second.path, 3));
        } else {
          std::size_t h = mix(4, x.letters.size());
          for (const auto& l : x.letters) h = mix(h, (std::uint64_t(l.factor) << 32) ^ std::uint32_t(l.gen));
          return h;
        }
      },
      v);
}

std::string to_string(const TreeWord& w) {
  if (w.is_root()) return "o";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.path.size(); ++i) {
    if (i) os << '.';
    os << w.path[i];
  }
  return os.str();
}

std::string to_string(const GroupWord& w) {
  if (w.is_identity()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) os << ' ';
    os << (w.letters[i].factor == 1 ? 'a' : 'b') << w.letters[i].gen;
  }
  return os.str();
}

std::string to_string(const VertexId& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ProductVertex>) {
          return "(" + to_string(x.first) + "," + to_string(x.second) + ")";
        } else {
          return to_string(x);
        }
      },
      v);
}

TreeWord parse_tree_word(const std::string& text) {
  TreeWord w;
  if (text.empty() || text == "o") return w;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, '.')) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit))
      throw EncodingError("malformed tree word: " + text);
    w.path.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
  }
  return w;
}

}  // namespace brw
