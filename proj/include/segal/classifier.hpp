#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "segal/fibration.hpp"
#include "segal/grothendieck.hpp"
#include "segal/presheaf.hpp"

namespace segal {

enum class Variant { SSpaces, Seg, CSS, Spaces };

const char* variant_name(Variant v);
Variant parse_variant(std::string_view name);
FibrationClass variant_class(Variant v);
int variant_min_k(Variant v);
// Next larger variant in SSpaces > Seg > CSS > Spaces.
std::optional<Variant> larger_variant(Variant v);

// Level bounds P, Q (also the slice bounds of every functor), value k-bound K, fiber bound m.
struct Params {
  int P = 1;
  int Q = 1;
  int K = 2;
  int m = 2;
  Bounds functor_bounds() const { return {K, P, Q}; }
  friend bool operator==(const Params&, const Params&) = default;
};

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
void check_params(Variant v, const Params& params);

// The truncated spaces with at most m elements per level and the simplicial maps between them.
class ValueCatalogue {
 public:
  ValueCatalogue(int k_bound, int max_size);

  int k_bound() const { return k_bound_; }
  int max_size() const { return max_size_; }
  std::size_t size() const { return spaces_.size(); }
  const std::shared_ptr<const TruncatedPresheaf>& space(std::size_t i) const { return spaces_[i]; }

  struct Arrow {
    std::uint32_t source;
    std::uint32_t target;
    std::vector<std::uint32_t> images;  // flat over elements of the source, level by level
  };
  const Arrow& arrow(std::size_t id) const { return arrows_[id]; }
  std::size_t arrow_count() const { return arrows_.size(); }
  const std::vector<std::uint32_t>& arrows_between(std::uint32_t a, std::uint32_t b) const {
    return between_[a * spaces_.size() + b];
  }
  std::uint32_t identity(std::uint32_t a) const { return identity_[a]; }
  // Arrow id of second o first.
  std::uint32_t compose(std::uint32_t second, std::uint32_t first) const;
  // Whether every space at this position passes the variant's predicate over the point.
  bool passes(Variant v, std::uint32_t space) const;
  std::optional<std::uint32_t> find_space(const TruncatedPresheaf& x) const;
  std::optional<std::uint32_t> find_arrow(std::uint32_t a, std::uint32_t b, const std::vector<std::uint32_t>& images) const;

 private:
  int k_bound_;
  int max_size_;
  std::vector<std::shared_ptr<const TruncatedPresheaf>> spaces_;
  std::vector<Arrow> arrows_;
  std::vector<std::vector<std::uint32_t>> between_;
  std::vector<std::uint32_t> identity_;
  std::array<std::vector<char>, 4> passes_;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::vector<std::uint32_t>>, std::uint32_t> lookup_;
};

std::shared_ptr<const ValueCatalogue> value_catalogue(int k_bound, int max_size);

// A canonical functor over (p, q): value ids at the grid vertices (i, j) in row-major
// order, then arrow ids of the horizontal edges (i,j)->(i+1,j) and the vertical
// edges (i,j)->(i,j+1). Values at other anchors are copies of the value at the
// anchor's initial vertex, reached by identity vertex maps.
using FunctorCode = std::vector<std::uint32_t>;

std::size_t code_width(int p, int q);
IndexedFunctor decode(const ValueCatalogue& cat, int p, int q, Bounds bounds, const std::uint32_t* code);
// Exact inverse of decode: returns a code only when decoding it reproduces g.
std::optional<FunctorCode> encode(const ValueCatalogue& cat, const IndexedFunctor& g);

// Code of G o (delta1, delta2), read off the code of G.
FunctorCode restrict_code(const ValueCatalogue& cat, int p, int q, const std::uint32_t* code, const MonotoneMap& delta1,
                          const MonotoneMap& delta2);

// All canonical functors over (p, q) passing the variant's predicate on Sigma G, in code order.
std::vector<FunctorCode> enumerate_functor_codes(Variant v, int p, int q, const Params& params);
std::vector<IndexedFunctor> enumerate_functors(Variant v, int p, int q, const Params& params);

struct ClassifierLevel {
  int p = 0;
  int q = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> data;  // codes, concatenated and sorted
  std::size_t size() const { return width == 0 ? 0 : data.size() / width; }
  const std::uint32_t* code(std::size_t i) const { return data.data() + i * width; }
  std::optional<std::uint32_t> find(const std::uint32_t* code) const;
};

class ClassifierComplex {
 public:
  Variant variant() const { return variant_; }
  const Params& params() const { return params_; }
  const ValueCatalogue& catalogue() const { return *catalogue_; }
  const ClassifierLevel& level(int p, int q) const;
  const std::vector<ClassifierLevel>& levels() const { return levels_; }
  IndexedFunctor element(int p, int q, std::size_t i) const;
  std::optional<std::uint32_t> find(const IndexedFunctor& g) const;
  bool has_operators() const { return presheaf_ != nullptr; }
  // Arity-2 presheaf with bounds (P, Q); labels are element positions; actions are the
  // restriction operators along generators.
  const std::shared_ptr<const TruncatedPresheaf>& as_presheaf() const;

 private:
  friend ClassifierComplex build_classifier(Variant, const Params&, int, bool);
  friend ClassifierComplex filter_classifier(const ClassifierComplex&, Variant);
  friend ClassifierComplex classifier_from_levels(Variant, const Params&, std::vector<ClassifierLevel>, int, bool);
  Variant variant_ = Variant::SSpaces;
  Params params_;
  std::shared_ptr<const ValueCatalogue> catalogue_;
  std::vector<ClassifierLevel> levels_;
  std::shared_ptr<const TruncatedPresheaf> presheaf_;
};

class ClosureViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Levels by enumeration; operators by restriction along generators (optional); the
// operator tables are validated as a presheaf before returning.
ClassifierComplex build_classifier(Variant v, const Params& params, int jobs = 1, bool with_operators = true);

// Same, from previously enumerated levels (one per (p, q), row-major, codes sorted). The
// levels are trusted; operators are rebuilt and validated.
ClassifierComplex classifier_from_levels(Variant v, const Params& params, std::vector<ClassifierLevel> levels, int jobs = 1,
                                         bool with_operators = true);

// Pointed classifier: arity-3 presheaf (r, p, q) with bounds (R, P, Q) whose elements are
// pairs (G, x0) with x0 in G(id_p, id_q)_r, labelled "G.x0", with its projection onto
// standard_embed(C, R).
struct PointedClassifier {
  std::shared_ptr<const TruncatedPresheaf> object;
  PresheafMap projection;
};
PointedClassifier build_pointed(const ClassifierComplex& c, int r_bound);

// Map F(p) x Delta[q] -> standard_embed(C, K) named by the i-th element of level (p, q).
PresheafMap yoneda_map(const ClassifierComplex& c, int p, int q, std::size_t i);
// Same, into a given copy of standard_embed(C, K).
PresheafMap yoneda_map(const ClassifierComplex& c, const PresheafMap::Ptr& embedded, int p, int q, std::size_t i);

struct CheckFailure {
  int p = 0;
  int q = 0;
  std::size_t element = 0;
  std::string detail;
};

struct UniversalReport {
  std::size_t checked = 0;
  std::vector<CheckFailure> failures;
};
// For every element G: the strict pullback of the pointed classifier along the named map
// equals Sigma G after anchor relabelling, and passes the variant predicate.
UniversalReport universal_check(const ClassifierComplex& c, const PointedClassifier& pointed, int jobs = 1);

// classify: pulls the pointed classifier back along f: X -> C; the result is a fibration
// over standard_embed(X) with elements labelled "<x>:<i>".
PresheafMap classify(const ClassifierComplex& c, const PointedClassifier& pointed, const PresheafMap& f);
// name: x in X_{nl} goes to the functor of fibers of g pulled back along x.
PresheafMap name(const ClassifierComplex& c, const PresheafMap& g);

// Relabels a fibration over standard_embed(X) to "<x>:<rank in fiber>".
PresheafMap fiber_canonical(const PresheafMap& g);

// Sub-classifier as the subset of c whose elements pass variant v, with c's codes and operators.
ClassifierComplex filter_classifier(const ClassifierComplex& c, Variant v);

struct SubclassifierReport {
  std::size_t checked = 0;
  std::vector<CheckFailure> failures;
};
// Level (p, q) of `sub` equals the set of elements of `whole` (SSpaces) whose point fibers
// are all Segal / complete / constant, per point_fiber_classification.
SubclassifierReport subclassifier_check(const ClassifierComplex& whole, const ClassifierComplex& sub, int jobs = 1);
// Several sub-classifiers against one pass over `whole`; one report per entry of `subs`.
std::vector<SubclassifierReport> subclassifier_check(const ClassifierComplex& whole, const std::vector<const ClassifierComplex*>& subs,
                                                     int jobs = 1);

// delta_diag of the pointed classifier (built with R = P) and its projection onto C.
PresheafMap diagonal_universal(const ClassifierComplex& c, const PointedClassifier& pointed);

// Inclusion of a smaller classifier into a larger one with the same catalogue.
PresheafMap inclusion(const ClassifierComplex& small, const ClassifierComplex& large);

}  // namespace segal
