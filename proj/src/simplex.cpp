#include "segal/simplex.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace segal {

namespace {

std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

}  // namespace

MonotoneMap::MonotoneMap(int target, std::vector<int> values) : target_(target), values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("monotone map needs at least one value");
  if (target_ < 0) throw std::invalid_argument("negative target");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0 || values_[i] > target_) throw std::invalid_argument("value out of range: " + str());
    if (i > 0 && values_[i] < values_[i - 1]) throw std::invalid_argument("not monotone: " + str());
  }
}

MonotoneMap MonotoneMap::identity(int n) {
  std::vector<int> v(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = i;
  return {n, std::move(v)};
}

MonotoneMap MonotoneMap::coface(int n, int i) {
  if (n < 1 || i < 0 || i > n) throw std::invalid_argument("bad coface");
  std::vector<int> v;
  for (int x = 0; x <= n; ++x)
    if (x != i) v.push_back(x);
  return {n, std::move(v)};
}

MonotoneMap MonotoneMap::codegeneracy(int n, int i) {
  if (n < 0 || i < 0 || i > n) throw std::invalid_argument("bad codegeneracy");
  std::vector<int> v;
  for (int x = 0; x <= n + 1; ++x) v.push_back(x <= i ? x : x - 1);
  return {n, std::move(v)};
}

MonotoneMap MonotoneMap::constant(int source, int target, int value) {
  return {target, std::vector<int>(static_cast<std::size_t>(source) + 1, value)};
}

MonotoneMap MonotoneMap::parse(std::string_view text, int target) {
  std::vector<int> v;
  if (text.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto next = text.find(',', pos);
      if (next == std::string_view::npos) next = text.size();
      auto part = text.substr(pos, next - pos);
      if (part.empty()) throw std::invalid_argument("empty value in map string");
      int x = 0;
      for (char c : part) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad map string");
        x = x * 10 + (c - '0');
      }
      v.push_back(x);
      pos = next + 1;
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad map string");
      v.push_back(c - '0');
    }
  }
  return {target, std::move(v)};
}

bool MonotoneMap::is_injective() const {
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (values_[i] == values_[i - 1]) return false;
  return true;
}

bool MonotoneMap::is_surjective() const { return values_.front() == 0 && values_.back() == target_ && [this] {
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (values_[i] > values_[i - 1] + 1) return false;
  return true;
}(); }

bool MonotoneMap::is_identity() const { return source() == target_ && is_injective(); }

std::string MonotoneMap::str() const {
  bool wide = std::any_of(values_.begin(), values_.end(), [](int x) { return x > 9; });
  std::string s;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (wide && i > 0) s += ',';
    s += std::to_string(values_[i]);
  }
  return s;
}

std::vector<MonotoneMap> enumerate_monotone(int n, int m) {
  std::vector<MonotoneMap> out;
  if (n < 0 || m < 0) return out;
  out.reserve(monotone_count(n, m));
  std::vector<int> v(static_cast<std::size_t>(n) + 1, 0);
  while (true) {
    out.emplace_back(m, v);
    int i = n;
    while (i >= 0 && v[static_cast<std::size_t>(i)] == m) --i;
    if (i < 0) break;
    int x = v[static_cast<std::size_t>(i)] + 1;
    for (int j = i; j <= n; ++j) v[static_cast<std::size_t>(j)] = x;
  }
  return out;
}

std::size_t monotone_count(int n, int m) { return binomial(n + m + 1, n + 1); }

std::size_t monotone_rank(const MonotoneMap& f) {
  const int n = f.source();
  const int m = f.target();
  std::size_t rank = 0;
  int lo = 0;
  for (int i = 0; i <= n; ++i) {
    for (int c = lo; c < f(i); ++c) rank += binomial(m - c + n - i, n - i);
    lo = f(i);
  }
  return rank;
}

MonotoneMap compose(const MonotoneMap& f, const MonotoneMap& g) {
  if (g.target() != f.source())
    throw std::invalid_argument("ill-typed composition: [" + std::to_string(g.target()) + "] vs [" +
                                std::to_string(f.source()) + "]");
  std::vector<int> v(g.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.values()[i]);
  return {f.target(), std::move(v)};
}

EpiMono epi_mono_factor(const MonotoneMap& f) {
  std::vector<int> image;
  std::vector<int> surj;
  for (int x : f.values()) {
    if (image.empty() || image.back() != x) image.push_back(x);
    surj.push_back(static_cast<int>(image.size()) - 1);
  }
  int k = static_cast<int>(image.size()) - 1;
  return {MonotoneMap(k, std::move(surj)), MonotoneMap(f.target(), std::move(image))};
}

MonotoneMap Generator::map() const {
  return kind == Kind::Face ? MonotoneMap::coface(level, index) : MonotoneMap::codegeneracy(level, index);
}

int generator_count(int level, int bound) {
  return (level >= 1 ? level + 1 : 0) + (level < bound ? level + 1 : 0);
}

Generator generator_at(int level, int bound, int slot) {
  int faces = level >= 1 ? level + 1 : 0;
  if (slot < faces) return {Generator::Kind::Face, level, slot};
  if (level >= bound || slot - faces > level) throw std::out_of_range("generator slot");
  return {Generator::Kind::Degeneracy, level, slot - faces};
}

int generator_slot(const Generator& g, int /*bound*/) {
  if (g.kind == Generator::Kind::Face) return g.index;
  return (g.level >= 1 ? g.level + 1 : 0) + g.index;
}

bool as_generator(const MonotoneMap& theta, Generator& out) {
  const int a = theta.source();
  const int b = theta.target();
  if (a == b - 1 && theta.is_injective()) {
    int missing = b;
    for (int i = 0; i <= a; ++i)
      if (theta(i) != i) {
        missing = i;
        break;
      }
    out = {Generator::Kind::Face, b, missing};
    return true;
  }
  if (a == b + 1 && theta.is_surjective()) {
    for (int i = 0; i < a; ++i)
      if (theta(i) == theta(i + 1)) {
        out = {Generator::Kind::Degeneracy, b, i};
        return true;
      }
  }
  return false;
}

std::vector<Generator> generator_chain(const MonotoneMap& theta) {
  if (theta.is_identity()) return {};
  const auto& v = theta.values();
  if (!theta.is_injective()) {
    // theta = theta' o s^i at the first repeat i.
    std::size_t i = 0;
    while (v[i] != v[i + 1]) ++i;
    std::vector<int> w(v);
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    auto chain = generator_chain(MonotoneMap(theta.target(), std::move(w)));
    chain.push_back({Generator::Kind::Degeneracy, theta.source() - 1, static_cast<int>(i)});
    return chain;
  }
  // theta = d^j o theta'' at the largest value j missing from the image.
  int j = theta.target();
  while (std::find(v.begin(), v.end(), j) != v.end()) --j;
  std::vector<int> w(v);
  for (int& x : w)
    if (x > j) --x;
  std::vector<Generator> chain{{Generator::Kind::Face, theta.target(), j}};
  auto rest = generator_chain(MonotoneMap(theta.target() - 1, std::move(w)));
  chain.insert(chain.end(), rest.begin(), rest.end());
  return chain;
}

SliceCategory::SliceCategory(int p, int level_bound) : p_(p), bound_(level_bound) {
  if (p < 0 || level_bound < 0) throw std::invalid_argument("negative slice parameters");
  level_begin_.push_back(0);
  for (int n = 0; n <= bound_; ++n) {
    for (auto& f : enumerate_monotone(n, p)) objects_.push_back({std::move(f)});
    level_begin_.push_back(objects_.size());
  }
  gen_begin_.push_back(0);
  for (std::size_t obj = 0; obj < objects_.size(); ++obj) {
    const auto& to = objects_[obj];
    int n = to.level();
    int count = generator_count(n, bound_);
    for (int slot = 0; slot < count; ++slot) {
      MonotoneMap mediator = generator_at(n, bound_, slot).map();
      SliceObject from{compose(to.anchor, mediator)};
      gen_from_.push_back(index_of(from.anchor));
      gen_to_.push_back(obj);
      generators_.push_back({std::move(mediator), std::move(from), to});
    }
    gen_begin_.push_back(generators_.size());
    initial_vertex_.push_back(index_of(MonotoneMap(p, {to.anchor(0)})));
  }
}

std::size_t SliceCategory::index_of(const MonotoneMap& anchor) const {
  if (anchor.target() != p_ || anchor.source() > bound_) throw std::out_of_range("anchor outside slice: " + anchor.str());
  return level_begin_[static_cast<std::size_t>(anchor.source())] + monotone_rank(anchor);
}

std::shared_ptr<const SliceCategory> slice_category(int p, int level_bound) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SliceCategory>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{p, level_bound}];
  if (!slot) slot = std::make_shared<const SliceCategory>(p, level_bound);
  return slot;
}

SliceObject postcompose(const MonotoneMap& delta, const SliceObject& object) {
  return {compose(delta, object.anchor)};
}

SliceMorphism postcompose(const MonotoneMap& delta, const SliceMorphism& morphism) {
  return {morphism.mediator, postcompose(delta, morphism.from), postcompose(delta, morphism.to)};
}

}  // namespace segal
