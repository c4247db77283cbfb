#pragma once

// JSON interchange for presheaves, maps, functors, verdicts and classifier catalogs.

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "segal/classifier.hpp"
#include "segal/fibration.hpp"
#include "segal/grothendieck.hpp"
#include "segal/presheaf.hpp"

namespace segal::io {

using Json = nlohmann::ordered_json;

// A malformed document. `where` is a JSON path ("$.actions[3].map") or "line L, column C".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what) : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Text -> JSON with line and column on syntax errors.
Json parse_text(std::string_view text);
Json read_file(const std::string& path);
// Deterministic rendering; indent < 0 gives one line.
std::string dump(const Json& j, int indent = 1);

// {"arity", "bounds", "levels": {"k,n,l": [labels]}, "actions": [{"direction", "generator", "index", "map"}]}
// where "generator" reads "d<i>" or "s<i>" and "map" lists target labels in source order.
Json to_json(const TruncatedPresheaf& x);
TruncatedPresheaf presheaf_from_json(const Json& j, const std::string& path = "$");

// {"domain", "codomain", "components": {"k,n,l": [codomain labels]}}
Json to_json(const PresheafMap& f);
PresheafMap map_from_json(const Json& j, const std::string& path = "$");

// {"p", "q", "bounds", "values": [{"anchor": [f1, f2], "value"}], "actions": [{"direction", "mediator",
// "from": [f1, f2], "to": [f1, f2], "levels": [[labels]...]}]}; actions map the value at "from" to the
// value at "to" and are listed for generating slice morphisms only.
Json to_json(const IndexedFunctor& g);
IndexedFunctor functor_from_json(const Json& j, const std::string& path = "$");
// Functor fields plus "r" and "basepoint" (a label of the top value at level r).
Json to_json(const PointedIndexedFunctor& g);
PointedIndexedFunctor pointed_from_json(const Json& j, const std::string& path = "$");

Json to_json(const Witness& w, int arity);
// {"class", "verdict", "witness"?}
Json to_json(const Verdict& v, int arity);

// {"variant", "params", "counts", "spaces", "arrows", "levels": [{"p", "q", "count", "functors": [codes]}],
// "operators": [{"level", "direction", "generator", "table"}]}. Functors are codes over the catalog's own
// space and arrow tables.
Json catalog_json(const ClassifierComplex& c);

struct CatalogLevels {
  Variant variant = Variant::SSpaces;
  Params params;
  std::vector<ClassifierLevel> levels;
};
// Reads the variant, params and levels back; the space and arrow tables must match the value
// catalogue the library builds for the same (K, m).
CatalogLevels catalog_levels_from_json(const Json& j);

}  // namespace segal::io
