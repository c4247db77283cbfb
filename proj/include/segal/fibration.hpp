#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "segal/presheaf.hpp"

namespace segal {

// Nested: Left within CoCartesian within SegalCoCartesian within ReedyLeft.
enum class FibrationClass { ReedyLeft, SegalCoCartesian, CoCartesian, Left };

const char* class_name(FibrationClass c);
FibrationClass parse_class(std::string_view name);

// A comparison map that failed to be a bijection.
struct Witness {
  std::string condition;
  Index index{0, 0, 0};
  std::size_t lhs_count = 0;
  std::size_t rhs_count = 0;
  // Label of an element with a colliding image, when the sizes agree.
  std::string element;
};

struct Verdict {
  FibrationClass cls = FibrationClass::ReedyLeft;
  bool holds = true;
  std::optional<Witness> witness;
  explicit operator bool() const { return holds; }
};

class BoundShortfall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Minimum k-bound each predicate needs.
int minimum_k_bound(FibrationClass c);

// Arity 2: L_{n,l} -> L_{0,l} x_{X_{0,l}} X_{n,l} along the vertex 0 in direction 0.
Verdict is_left_fibration_ss(const PresheafMap& p);

// Arity 3 over a base that is constant in k.
// Reedy left: left in the base direction n at every (k, l), and covering in the
// space direction l (L_{knl} -> L_{kn0} x X_{knl}) as a discrete stand-in for fibrancy.
Verdict is_reedy_left(const PresheafMap& p);
// Reedy left plus the Segal spine condition in the k direction.
Verdict is_segal_cocartesian(const PresheafMap& p);
// Segal plus completeness: L_0 -> L_3 x_{L_1 x L_1} (L_0 x L_0), edges {0,2} and {1,3}.
Verdict is_cocartesian(const PresheafMap& p);
// Reedy left plus L_0 -> L_k bijective for every k.
Verdict is_left_fibration_sss(const PresheafMap& p);

Verdict check_class(FibrationClass c, const PresheafMap& p);

// The individual k-direction conditions, without the Reedy-left prerequisite.
std::optional<Witness> segal_witness(const TruncatedPresheaf& l);
std::optional<Witness> complete_witness(const TruncatedPresheaf& l);
std::optional<Witness> constant_witness(const TruncatedPresheaf& l);

struct FinestClass {
  std::optional<FibrationClass> cls;  // empty when not even Reedy left
  std::optional<Verdict> next_failure;
};
// Walks the chain ReedyLeft -> SegalCoCartesian -> CoCartesian -> Left while the
// bounds allow and reports the last class that holds and the first failure.
FinestClass finest_class(const PresheafMap& p);

struct VertexClass {
  int v1 = 0;
  int v2 = 0;
  bool segal = false;
  std::optional<bool> complete;  // needs k-bound 3
  bool constant = false;
};

struct PointFiberReport {
  std::vector<VertexClass> vertices;
  bool global_segal = false;
  std::optional<bool> global_cocartesian;
  bool global_left = false;
  // Whether each global verdict equals the conjunction over vertex fibers.
  bool agrees = false;
  std::optional<VertexClass> first_non_segal;
};

// p must be Reedy left over F(pp) x Delta[qq]; classifies the strict fiber over every vertex.
PointFiberReport point_fiber_classification(const PresheafMap& p, int pp, int qq);
// Only the per-vertex classes; p is assumed Reedy left over F(pp) x Delta[qq].
std::vector<VertexClass> vertex_fiber_classes(const PresheafMap& p, int pp, int qq);

}  // namespace segal
