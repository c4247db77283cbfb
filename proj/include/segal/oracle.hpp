#pragma once

// Independent brute-force counters used to cross-check the classifier and the
// fibration predicates. None of them goes through IndexedFunctor or the classifier.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segal/classifier.hpp"
#include "segal/presheaf.hpp"

namespace segal::oracle {

// A small category given by its morphisms. Morphism i < objects is the identity of object i.
struct FiniteCategory {
  int objects = 0;
  std::vector<int> source;
  std::vector<int> target;
  // compose[g * n + f] = g o f when target(f) == source(g), else -1.
  std::vector<int> compose;
  int morphisms() const { return static_cast<int>(source.size()); }
  int after(int g, int f) const { return compose[static_cast<std::size_t>(g * morphisms() + f)]; }
};

// A poset on {0..n-1} given by its strict relations (i, j) with i < j in the order.
struct Poset {
  int size = 0;
  std::vector<std::pair<int, int>> less;
  bool leq(int a, int b) const;
};

FiniteCategory poset_category(const Poset& p);
// The one-object category of the cyclic group of the given order.
FiniteCategory cyclic_group(int order);

// Nerve truncated at k_bound, as a space (arity 1). Simplices are composable
// chains; labels are object ids at level 0 and dot-separated morphism ids above.
TruncatedPresheaf nerve(const FiniteCategory& c, int k_bound);
// A space seen as an arity-2 presheaf whose first direction is the space's direction (l-bound 0).
TruncatedPresheaf as_simplicial_space(const TruncatedPresheaf& space);
// A space embedded in the k direction over the point, with its projection.
PresheafMap over_point(const TruncatedPresheaf& space, int n_bound = 0, int l_bound = 0);

// Every labelled poset on {0..n-1}.
std::vector<Poset> labelled_posets(int n);

// Functors from the poset into sets {0..s-1} with s <= max_set, counted directly.
std::size_t count_poset_functors(const Poset& p, int max_set);
// Left fibrations over the nerve (levels <= n_bound) with fibers of size <= max_set, in
// transport-normalized form, counted by building every candidate presheaf over the nerve
// (arbitrary maps on every edge, degenerate ones included) and running validate and
// is_left_fibration_ss.
std::size_t count_nerve_left_fibrations(const Poset& p, int n_bound, int max_set);

// Distinct nerve tables (up to relabelling every level) of categories with at most
// max_size simplices per level up to k_bound and no non-identity isomorphisms.
std::size_t count_category_nerves(int k_bound, int max_size);

// Transport-normalized fibrations over standard_embed(X) passing the variant predicate,
// with fibers from the spaces of size <= m. X is arity 2 with bounds (P, Q).
std::size_t count_fibrations_over(Variant v, const TruncatedPresheaf& x, int k_bound, int max_size);

// Arity-2 presheaves used as bases: F(r), Delta[r] and F(r) x Delta[s] at bounds (P, Q).
TruncatedPresheaf base_f(int r, int P, int Q);
TruncatedPresheaf base_delta(int r, int P, int Q);
TruncatedPresheaf base_product(int r, int s, int P, int Q);

// A string that determines a presheaf's table up to labels.
std::string table_key(const TruncatedPresheaf& x);

}  // namespace segal::oracle
