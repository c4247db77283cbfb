#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segal/simplex.hpp"

namespace segal {

// Per-direction truncation bounds and level indices; unused directions stay 0.
// For arity 3 the directions are (k, n, l).
using Bounds = std::array<int, 3>;
using Index = std::array<int, 3>;

std::string index_str(const Index& index, int arity);
Index parse_index(std::string_view text, int arity);

// Labels of all elements, concatenated into one buffer.
class LabelTable {
 public:
  void add(std::string_view label) {
    buffer_.append(label);
    offsets_.push_back(static_cast<std::uint32_t>(buffer_.size()));
  }
  std::size_t size() const { return offsets_.size() - 1; }
  std::string_view operator[](std::size_t i) const {
    return std::string_view(buffer_).substr(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  void reserve(std::size_t elements, std::size_t bytes) {
    offsets_.reserve(elements + 1);
    buffer_.reserve(bytes);
  }
  friend bool operator==(const LabelTable&, const LabelTable&) = default;

 private:
  std::string buffer_;
  std::vector<std::uint32_t> offsets_{0};
};

class TruncatedPresheaf {
 public:
  TruncatedPresheaf();
  // level_sizes is indexed by flat cell; labels run over all elements in flat order.
  // Action tables start zeroed and are filled through action_mut.
  TruncatedPresheaf(int arity, Bounds bounds, std::vector<std::uint32_t> level_sizes, LabelTable labels);
  // Labels "0".."s-1" at every cell.
  TruncatedPresheaf(int arity, Bounds bounds, std::vector<std::uint32_t> level_sizes);
  TruncatedPresheaf(const TruncatedPresheaf& other);
  TruncatedPresheaf(TruncatedPresheaf&&) noexcept = default;
  TruncatedPresheaf& operator=(const TruncatedPresheaf& other);
  TruncatedPresheaf& operator=(TruncatedPresheaf&&) noexcept = default;

  int arity() const { return arity_; }
  const Bounds& bounds() const { return bounds_; }
  std::size_t cell_count() const { return sizes_.size(); }
  bool contains(const Index& index) const;
  std::size_t flat(const Index& index) const;
  Index index(std::size_t flat) const;

  std::uint32_t size(const Index& index) const { return sizes_[flat(index)]; }
  std::uint32_t size_at(std::size_t flat) const { return sizes_[flat]; }
  const std::vector<std::uint32_t>& sizes() const { return sizes_; }
  std::size_t element_count() const { return element_begin_.back(); }
  std::size_t element_begin(std::size_t flat) const { return element_begin_[flat]; }
  std::string_view label(const Index& index, std::uint32_t e) const { return labels_[element_begin_[flat(index)] + e]; }
  std::string_view label_at(std::size_t flat, std::uint32_t e) const { return labels_[element_begin_[flat] + e]; }
  const LabelTable& labels() const { return labels_; }
  std::optional<std::uint32_t> find(const Index& index, std::string_view label) const;

  // Generator action out of cell `source` in direction `dir`.
  std::span<const std::uint32_t> action(int dir, const Generator& g, const Index& source) const;
  std::span<const std::uint32_t> action_slot(int dir, std::size_t flat, int slot) const {
    auto s = slot_base_[flat * 3 + static_cast<std::size_t>(dir)] + static_cast<std::size_t>(slot);
    return {pool_.data() + slot_offset_[s], sizes_[flat]};
  }
  std::span<std::uint32_t> action_mut(int dir, const Generator& g, const Index& source);
  std::span<std::uint32_t> action_slot_mut(int dir, std::size_t flat, int slot);
  int generator_count_at(int dir, std::size_t flat) const;

  // theta^* : X_{..b..} -> X_{..a..} in direction dir, derived from generators and memoized.
  const std::vector<std::uint32_t>& act(int dir, const MonotoneMap& theta, const Index& source) const;
  std::uint32_t act_one(int dir, const MonotoneMap& theta, const Index& source, std::uint32_t e) const;

  friend bool operator==(const TruncatedPresheaf& a, const TruncatedPresheaf& b);

 private:
  struct Memo {
    std::mutex mutex;
    // Maps with at most 15 values below 16 are packed into one word.
    std::map<std::pair<std::size_t, std::uint64_t>, std::vector<std::uint32_t>> packed;
    std::map<std::pair<std::size_t, std::vector<int>>, std::vector<std::uint32_t>> table;
  };
  void layout();

  int arity_ = 1;
  Bounds bounds_{0, 0, 0};
  std::vector<std::uint32_t> sizes_;
  std::vector<std::size_t> element_begin_;
  LabelTable labels_;
  std::vector<std::size_t> slot_base_;
  std::vector<std::size_t> slot_offset_;
  std::vector<std::uint32_t> pool_;
  std::unique_ptr<Memo> memo_;
};

Index shift(Index index, int dir, int level);

struct Violation {
  std::string identity;
  int direction = 0;
  Index index{0, 0, 0};
  std::uint32_t element = 0;
  std::string str(int arity) const;
};

// First violated simplicial identity in lexicographic index order, if any.
std::optional<Violation> validate(const TruncatedPresheaf& x);

class PresheafMap {
 public:
  using Ptr = std::shared_ptr<const TruncatedPresheaf>;
  PresheafMap(Ptr domain, Ptr codomain, std::vector<std::uint32_t> images);

  const TruncatedPresheaf& domain() const { return *domain_; }
  const TruncatedPresheaf& codomain() const { return *codomain_; }
  const Ptr& domain_ptr() const { return domain_; }
  const Ptr& codomain_ptr() const { return codomain_; }
  const std::vector<std::uint32_t>& images() const { return images_; }
  std::uint32_t image_at(std::size_t flat, std::uint32_t e) const { return images_[domain_->element_begin(flat) + e]; }
  std::uint32_t operator()(const Index& index, std::uint32_t e) const { return image_at(domain_->flat(index), e); }

  std::optional<Violation> naturality_violation() const;

  // Domain elements over codomain element b at a cell, in domain order.
  std::span<const std::uint32_t> fiber(std::size_t flat, std::uint32_t b) const;
  // Position of domain element e inside its fiber.
  std::uint32_t fiber_rank(std::size_t flat, std::uint32_t e) const;
  // fiber_rank for every domain element in flat order.
  std::span<const std::uint32_t> fiber_ranks() const;

 private:
  struct FiberIndex {
    std::once_flag once;
    std::vector<std::uint32_t> begin;
    std::vector<std::uint32_t> members;
    std::vector<std::uint32_t> rank;
  };
  Ptr domain_;
  Ptr codomain_;
  std::vector<std::uint32_t> images_;
  std::shared_ptr<FiberIndex> fibers_;
};

bool same_shape(const TruncatedPresheaf& a, const TruncatedPresheaf& b);

TruncatedPresheaf terminal(int arity, Bounds bounds);
TruncatedPresheaf empty_presheaf(int arity, Bounds bounds);

enum class RepKind { Phi, F, Delta };
TruncatedPresheaf representable(RepKind kind, int r, Bounds bounds);
// F(p) x Delta[q] with bounds (K, N, L); element (f1, f2) at (k,n,l) sits at rank(f1) * |Hom([l],[q])| + rank(f2).
std::shared_ptr<const TruncatedPresheaf> base_presheaf(int p, int q, Bounds bounds);
// F(p1) x Delta[q1] -> F(p2) x Delta[q2] induced by (delta1, delta2).
PresheafMap base_map(const MonotoneMap& delta1, const MonotoneMap& delta2, Bounds bounds);

TruncatedPresheaf product(const TruncatedPresheaf& x, const TruncatedPresheaf& y);

struct Pullback {
  std::shared_ptr<const TruncatedPresheaf> object;
  PresheafMap left;
  PresheafMap right;
};
// Strict fibered product of f: A -> B and g: C -> B; elements are pairs (a, c), a-major.
Pullback pullback(const PresheafMap& f, const PresheafMap& g);
// Same, with label of (a, c) chosen by the caller.
Pullback pullback(const PresheafMap& f, const PresheafMap& g,
                  const std::function<std::string(std::string_view, std::string_view)>& label);
// Same, labelled by position within each cell; for throwaway pullbacks in bulk checks.
Pullback pullback_positional(const PresheafMap& f, const PresheafMap& g);

PresheafMap identity_map(std::shared_ptr<const TruncatedPresheaf> x);
PresheafMap to_terminal(std::shared_ptr<const TruncatedPresheaf> x);
PresheafMap compose(const PresheafMap& f, const PresheafMap& g);

// Arity 2 -> arity 3, constant in the new k direction.
TruncatedPresheaf standard_embed(const TruncatedPresheaf& x, int k_bound);
// Arity 3 -> arity 2 by merging k and n.
TruncatedPresheaf delta_diag(const TruncatedPresheaf& x);
// Arity 1 (a k-indexed space) -> arity 3, constant in n and l.
TruncatedPresheaf constant_over_base(const TruncatedPresheaf& s, int n_bound, int l_bound);
// Same presheaf with fewer levels.
TruncatedPresheaf truncate(const TruncatedPresheaf& x, Bounds bounds);
// Fix one coordinate of an arity-3 presheaf (direction dir at level) and drop that direction.
TruncatedPresheaf slice_direction(const TruncatedPresheaf& x, int dir, int level);

PresheafMap standard_embed(const PresheafMap& f, int k_bound);
PresheafMap delta_diag(const PresheafMap& f);

// Labels replaced by positions.
TruncatedPresheaf index_relabel(const TruncatedPresheaf& x);
// Elements sorted by label and renamed to positions.
TruncatedPresheaf canonical_relabel(const TruncatedPresheaf& x);
TruncatedPresheaf relabel(const TruncatedPresheaf& x, const std::function<std::string(std::size_t, std::uint32_t)>& label);

// Natural maps A -> X (optionally over a common base through a and x), by backtracking.
// The callback receives images indexed like PresheafMap::images and returns false to stop.
using MapVisitor = std::function<bool(const std::vector<std::uint32_t>&)>;
void enumerate_maps(const TruncatedPresheaf& a, const TruncatedPresheaf& x, const MapVisitor& visit,
                    const PresheafMap* over_a = nullptr, const PresheafMap* over_x = nullptr);
std::size_t count_maps(const TruncatedPresheaf& a, const TruncatedPresheaf& x);

// Maps A -> X commuting with a: A -> base and x: X -> base.
std::vector<PresheafMap> hom_over(const PresheafMap& a, const PresheafMap& x);

// All arity-1 presheaves with k-bound K and at most m elements per level,
// labels "0".."s-1", in deterministic order.
std::vector<TruncatedPresheaf> enumerate_spaces(int k_bound, int max_size);
// Simplicial maps a -> b as per-level image arrays.
std::vector<std::vector<std::vector<std::uint32_t>>> enumerate_space_maps(const TruncatedPresheaf& a,
                                                                          const TruncatedPresheaf& b);

}  // namespace segal
