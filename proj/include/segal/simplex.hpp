#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace segal {

// An order-preserving map [source] -> [target].
class MonotoneMap {
 public:
  MonotoneMap() = default;
  MonotoneMap(int target, std::vector<int> values);

  static MonotoneMap identity(int n);
  // d^i : [n-1] -> [n], skips i.
  static MonotoneMap coface(int n, int i);
  // s^i : [n+1] -> [n], hits i twice.
  static MonotoneMap codegeneracy(int n, int i);
  static MonotoneMap constant(int source, int target, int value);
  // Values as a string, digits concatenated ("012"), comma separated if any value exceeds 9.
  static MonotoneMap parse(std::string_view text, int target);

  int source() const { return static_cast<int>(values_.size()) - 1; }
  int target() const { return target_; }
  int operator()(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& values() const { return values_; }

  bool is_injective() const;
  bool is_surjective() const;
  bool is_identity() const;
  std::string str() const;

  friend bool operator==(const MonotoneMap&, const MonotoneMap&) = default;
  friend auto operator<=>(const MonotoneMap& a, const MonotoneMap& b) {
    if (auto c = a.target_ <=> b.target_; c != 0) return c;
    return a.values_ <=> b.values_;
  }

 private:
  int target_ = 0;
  std::vector<int> values_{0};
};

// Lexicographic order, binomial(n+m+1, n+1) maps.
std::vector<MonotoneMap> enumerate_monotone(int n, int m);
// Position of f inside enumerate_monotone(f.source(), f.target()).
std::size_t monotone_rank(const MonotoneMap& f);
std::size_t monotone_count(int n, int m);

// f o g; throws std::invalid_argument when g.target() != f.source().
MonotoneMap compose(const MonotoneMap& f, const MonotoneMap& g);

struct EpiMono {
  MonotoneMap surjection;
  MonotoneMap injection;
};
EpiMono epi_mono_factor(const MonotoneMap& f);

// A generating map of Delta seen from the presheaf side. `level` is the
// level the action starts from: a face d_i goes level -> level-1, a
// degeneracy s_i goes level -> level+1.
struct Generator {
  enum class Kind : std::uint8_t { Face, Degeneracy };
  Kind kind = Kind::Face;
  int level = 0;
  int index = 0;

  MonotoneMap map() const;
  int target_level() const { return kind == Kind::Face ? level - 1 : level + 1; }
  friend bool operator==(const Generator&, const Generator&) = default;
};

// Generators available at `level` under truncation `bound`:
// faces d_0..d_level (level >= 1) then degeneracies s_0..s_level (level < bound).
int generator_count(int level, int bound);
Generator generator_at(int level, int bound, int slot);
int generator_slot(const Generator& g, int bound);
// Recognizes a generating map; returns false for anything else.
bool as_generator(const MonotoneMap& theta, Generator& out);

// Generators whose successive actions realize theta^* (first element acts first).
std::vector<Generator> generator_chain(const MonotoneMap& theta);

struct SliceObject {
  MonotoneMap anchor;
  int level() const { return anchor.source(); }
  friend bool operator==(const SliceObject&, const SliceObject&) = default;
};

struct SliceMorphism {
  MonotoneMap mediator;
  SliceObject from;
  SliceObject to;
};

// Delta/p truncated at level_bound. Objects are ordered by level then
// lexicographically; generators are grouped by target object in generator-slot order.
class SliceCategory {
 public:
  SliceCategory(int p, int level_bound);

  int p() const { return p_; }
  int level_bound() const { return bound_; }
  const std::vector<SliceObject>& objects() const { return objects_; }
  const std::vector<SliceMorphism>& generators() const { return generators_; }

  std::size_t index_of(const MonotoneMap& anchor) const;
  std::size_t level_begin(int n) const { return level_begin_[static_cast<std::size_t>(n)]; }
  std::size_t level_size(int n) const { return level_begin_[static_cast<std::size_t>(n) + 1] - level_begin_[static_cast<std::size_t>(n)]; }

  // Generators into object `obj`, and their source objects.
  std::size_t generator_begin(std::size_t obj) const { return gen_begin_[obj]; }
  std::size_t generator_end(std::size_t obj) const { return gen_begin_[obj + 1]; }
  std::size_t generator_source(std::size_t gen) const { return gen_from_[gen]; }
  std::size_t generator_target(std::size_t gen) const { return gen_to_[gen]; }
  // Index of the generator (obj, slot) where slot follows generator_slot.
  std::size_t generator_index(std::size_t obj, int slot) const { return gen_begin_[obj] + static_cast<std::size_t>(slot); }
  // Index of the object f(0) viewed as an anchor [0] -> [p].
  std::size_t initial_vertex(std::size_t obj) const { return initial_vertex_[obj]; }

 private:
  int p_;
  int bound_;
  std::vector<SliceObject> objects_;
  std::vector<std::size_t> level_begin_;
  std::vector<SliceMorphism> generators_;
  std::vector<std::size_t> gen_begin_;
  std::vector<std::size_t> gen_from_;
  std::vector<std::size_t> gen_to_;
  std::vector<std::size_t> initial_vertex_;
};

// Shared, cached instance.
std::shared_ptr<const SliceCategory> slice_category(int p, int level_bound);

SliceObject postcompose(const MonotoneMap& delta, const SliceObject& object);
SliceMorphism postcompose(const MonotoneMap& delta, const SliceMorphism& morphism);

}  // namespace segal
