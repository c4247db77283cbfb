#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "segal/presheaf.hpp"
#include "segal/simplex.hpp"

namespace segal {

// A functor (Delta/p)^op x (Delta/q)^op -> truncated spaces.
// Bounds are (K, N, L): the value k-bound and the two slice level bounds.
// Anchor (i1, i2) indexes objects of slice_p() and slice_q(). Actions are
// stored for generating slice morphisms only: an action id names either a
// generator of slice_p paired with an object of slice_q, or an object of
// slice_p paired with a generator of slice_q, and maps the value at the
// generator's target anchor to the value at its source anchor.
class IndexedFunctor {
 public:
  using Value = std::shared_ptr<const TruncatedPresheaf>;

  IndexedFunctor(int p, int q, Bounds bounds, std::vector<Value> values);

  int p() const { return p_; }
  int q() const { return q_; }
  const Bounds& bounds() const { return bounds_; }
  int k_bound() const { return bounds_[0]; }
  const SliceCategory& slice_p() const { return *slice_p_; }
  const SliceCategory& slice_q() const { return *slice_q_; }

  std::size_t anchor(std::size_t i1, std::size_t i2) const { return i1 * slice_q_->objects().size() + i2; }
  std::size_t anchor_count() const { return values_.size(); }
  const TruncatedPresheaf& value(std::size_t i1, std::size_t i2) const { return *values_[anchor(i1, i2)]; }
  const TruncatedPresheaf& value_at(std::size_t anchor) const { return *values_[anchor]; }
  const Value& value_ptr(std::size_t anchor) const { return values_[anchor]; }
  // Index of the value at the top anchor (id_p, id_q).
  std::size_t top_anchor() const;

  std::size_t action_count() const { return action_to_.size(); }
  std::size_t action_p(std::size_t gen, std::size_t i2) const { return gen * slice_q_->objects().size() + i2; }
  std::size_t action_q(std::size_t i1, std::size_t gen) const {
    return slice_p_->generators().size() * slice_q_->objects().size() + i1 * slice_q_->generators().size() + gen;
  }
  std::size_t action_source(std::size_t id) const { return action_from_[id]; }
  std::size_t action_target(std::size_t id) const { return action_to_[id]; }
  std::span<const std::uint32_t> action(std::size_t id, int k) const {
    auto s = id * static_cast<std::size_t>(bounds_[0] + 1) + static_cast<std::size_t>(k);
    return {pool_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
  }
  std::span<std::uint32_t> action_mut(std::size_t id, int k) {
    auto s = id * static_cast<std::size_t>(bounds_[0] + 1) + static_cast<std::size_t>(k);
    return {pool_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
  }

  friend bool operator==(const IndexedFunctor& a, const IndexedFunctor& b);

 private:
  int p_;
  int q_;
  Bounds bounds_;
  std::shared_ptr<const SliceCategory> slice_p_;
  std::shared_ptr<const SliceCategory> slice_q_;
  std::vector<Value> values_;
  std::vector<std::size_t> action_from_;
  std::vector<std::size_t> action_to_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> pool_;
};

// Sum construction: Sigma G -> F(p) x Delta[q]. Elements are labelled "f1.f2:x".
PresheafMap sum_construction(const IndexedFunctor& g);
// Inverse: the functor of fibers. Values carry positional labels.
IndexedFunctor fiber_construction(const PresheafMap& alpha, int p, int q);

// First violated functoriality law, read off Sigma G (slice identities,
// naturality of actions), if any.
std::optional<std::string> functoriality_violation(const IndexedFunctor& g);

std::optional<std::string> roundtrip_check(const IndexedFunctor& g);
std::optional<std::string> roundtrip_check(const PresheafMap& alpha, int p, int q);

// G o (delta1, delta2), a functor over (delta1.source(), delta2.source()).
IndexedFunctor restrict(const IndexedFunctor& g, const MonotoneMap& delta1, const MonotoneMap& delta2);

// Constant functor with the given value at every anchor and identity actions.
IndexedFunctor constant_functor(int p, int q, Bounds bounds, const std::shared_ptr<const TruncatedPresheaf>& value);

// A functor on (Delta/r)^op x (Delta/p)^op x (Delta/q)^op with set values.
// Anchors are (ir, i1, i2) with ir an object of Delta/r truncated at K.
struct TripleFunctor {
  int r = 0;
  int p = 0;
  int q = 0;
  Bounds bounds{0, 0, 0};
  std::vector<std::vector<std::string>> sets;
  // actions[dir][generator-triple] as in IndexedFunctor, with direction 0 for Delta/r.
  std::array<std::vector<std::vector<std::uint32_t>>, 3> actions;

  std::size_t anchor(std::size_t ir, std::size_t i1, std::size_t i2) const;
  friend bool operator==(const TripleFunctor&, const TripleFunctor&) = default;
};

// (pi_r)^* G: the value at (g, f1, f2) is G(f1, f2) at level(g).
TripleFunctor pull_back_r(const IndexedFunctor& g, int r);
// (pi_r)_* H, defined only on the image of pull_back_r.
std::optional<IndexedFunctor> push_forward_r(const TripleFunctor& h);

struct PointedIndexedFunctor {
  IndexedFunctor base;
  int r = 0;
  std::uint32_t basepoint = 0;
  friend bool operator==(const PointedIndexedFunctor&, const PointedIndexedFunctor&) = default;
};

// A pointed triple functor: a basepoint in the (id_r, id_p, id_q) cell.
struct PointedTriple {
  TripleFunctor functor;
  std::uint32_t basepoint = 0;
  friend bool operator==(const PointedTriple&, const PointedTriple&) = default;
};

// F_* : (G, x0) -> pointed triple functor.
PointedTriple point_backward(const PointedIndexedFunctor& pointed);
// I : pointed triple functor -> (G, x0).
PointedIndexedFunctor point_forward(const PointedTriple& pointed);
// Every pointed functor over G at level r.
std::vector<PointedIndexedFunctor> pointed_over(const IndexedFunctor& g, int r);

}  // namespace segal
