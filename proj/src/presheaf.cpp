#include "segal/presheaf.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace segal {

std::string index_str(const Index& index, int arity) {
  std::string s;
  for (int d = 0; d < arity; ++d) {
    if (d > 0) s += ',';
    s += std::to_string(index[static_cast<std::size_t>(d)]);
  }
  return s;
}

Index parse_index(std::string_view text, int arity) {
  Index idx{0, 0, 0};
  int d = 0;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(',', pos);
    auto part = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (part.empty() || d >= arity) throw std::invalid_argument("bad index \"" + std::string(text) + "\"");
    int x = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad index \"" + std::string(text) + "\"");
      x = x * 10 + (c - '0');
    }
    idx[static_cast<std::size_t>(d++)] = x;
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (d != arity) throw std::invalid_argument("index \"" + std::string(text) + "\" has wrong length");
  return idx;
}

Index shift(Index index, int dir, int level) {
  index[static_cast<std::size_t>(dir)] = level;
  return index;
}

namespace {

std::size_t cells_for(const Bounds& b) {
  return static_cast<std::size_t>(b[0] + 1) * static_cast<std::size_t>(b[1] + 1) * static_cast<std::size_t>(b[2] + 1);
}

Bounds checked_bounds(int arity, Bounds bounds) {
  if (arity < 1 || arity > 3) throw std::invalid_argument("arity must be 1, 2 or 3");
  for (int d = 0; d < 3; ++d) {
    if (bounds[static_cast<std::size_t>(d)] < 0) throw std::invalid_argument("negative bound");
    if (d >= arity && bounds[static_cast<std::size_t>(d)] != 0) throw std::invalid_argument("bound set for unused direction");
  }
  return bounds;
}

LabelTable positional_labels(const std::vector<std::uint32_t>& sizes) {
  LabelTable t;
  for (auto s : sizes)
    for (std::uint32_t i = 0; i < s; ++i) t.add(std::to_string(i));
  return t;
}

}  // namespace

TruncatedPresheaf::TruncatedPresheaf() : sizes_(1, 0) { layout(); }

TruncatedPresheaf::TruncatedPresheaf(int arity, Bounds bounds, std::vector<std::uint32_t> level_sizes, LabelTable labels)
    : arity_(arity), bounds_(checked_bounds(arity, bounds)), sizes_(std::move(level_sizes)), labels_(std::move(labels)) {
  if (sizes_.size() != cells_for(bounds_)) throw std::invalid_argument("level table does not match bounds");
  layout();
  if (labels_.size() != element_count()) throw std::invalid_argument("label count does not match level sizes");
}

TruncatedPresheaf::TruncatedPresheaf(int arity, Bounds bounds, std::vector<std::uint32_t> level_sizes)
    : TruncatedPresheaf(arity, bounds, level_sizes, positional_labels(level_sizes)) {}

TruncatedPresheaf::TruncatedPresheaf(const TruncatedPresheaf& other)
    : arity_(other.arity_),
      bounds_(other.bounds_),
      sizes_(other.sizes_),
      element_begin_(other.element_begin_),
      labels_(other.labels_),
      slot_base_(other.slot_base_),
      slot_offset_(other.slot_offset_),
      pool_(other.pool_) {}

TruncatedPresheaf& TruncatedPresheaf::operator=(const TruncatedPresheaf& other) {
  if (this != &other) {
    TruncatedPresheaf copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void TruncatedPresheaf::layout() {
  element_begin_.assign(sizes_.size() + 1, 0);
  for (std::size_t f = 0; f < sizes_.size(); ++f) element_begin_[f + 1] = element_begin_[f] + sizes_[f];
  slot_base_.assign(sizes_.size() * 3, 0);
  slot_offset_.clear();
  std::size_t pool = 0;
  for (std::size_t f = 0; f < sizes_.size(); ++f) {
    Index idx = index(f);
    for (int d = 0; d < 3; ++d) {
      slot_base_[f * 3 + static_cast<std::size_t>(d)] = slot_offset_.size();
      if (d >= arity_) continue;
      int count = generator_count(idx[static_cast<std::size_t>(d)], bounds_[static_cast<std::size_t>(d)]);
      for (int s = 0; s < count; ++s) {
        slot_offset_.push_back(pool);
        pool += sizes_[f];
      }
    }
  }
  slot_offset_.push_back(pool);
  pool_.assign(pool, 0);
  memo_.reset();
}

bool TruncatedPresheaf::contains(const Index& index) const {
  for (std::size_t d = 0; d < 3; ++d)
    if (index[d] < 0 || index[d] > bounds_[d]) return false;
  return true;
}

std::size_t TruncatedPresheaf::flat(const Index& index) const {
  if (!contains(index)) throw std::out_of_range("index " + index_str(index, 3) + " outside bounds");
  return (static_cast<std::size_t>(index[0]) * static_cast<std::size_t>(bounds_[1] + 1) + static_cast<std::size_t>(index[1])) *
             static_cast<std::size_t>(bounds_[2] + 1) +
         static_cast<std::size_t>(index[2]);
}

Index TruncatedPresheaf::index(std::size_t flat) const {
  Index idx{0, 0, 0};
  auto b2 = static_cast<std::size_t>(bounds_[2] + 1);
  auto b1 = static_cast<std::size_t>(bounds_[1] + 1);
  idx[2] = static_cast<int>(flat % b2);
  flat /= b2;
  idx[1] = static_cast<int>(flat % b1);
  idx[0] = static_cast<int>(flat / b1);
  return idx;
}

std::optional<std::uint32_t> TruncatedPresheaf::find(const Index& index, std::string_view label) const {
  auto f = flat(index);
  for (std::uint32_t e = 0; e < sizes_[f]; ++e)
    if (labels_[element_begin_[f] + e] == label) return e;
  return std::nullopt;
}

int TruncatedPresheaf::generator_count_at(int dir, std::size_t flat) const {
  if (dir < 0 || dir >= arity_) return 0;
  Index idx = index(flat);
  return generator_count(idx[static_cast<std::size_t>(dir)], bounds_[static_cast<std::size_t>(dir)]);
}

std::span<const std::uint32_t> TruncatedPresheaf::action(int dir, const Generator& g, const Index& source) const {
  auto f = flat(source);
  if (dir < 0 || dir >= arity_ || g.level != source[static_cast<std::size_t>(dir)])
    throw std::invalid_argument("generator does not start at this index");
  int slot = generator_slot(g, bounds_[static_cast<std::size_t>(dir)]);
  if (slot >= generator_count_at(dir, f) || g.index < 0 || g.index > g.level) throw std::out_of_range("generator outside bounds");
  return action_slot(dir, f, slot);
}

std::span<std::uint32_t> TruncatedPresheaf::action_slot_mut(int dir, std::size_t flat, int slot) {
  memo_.reset();
  auto s = slot_base_[flat * 3 + static_cast<std::size_t>(dir)] + static_cast<std::size_t>(slot);
  return {pool_.data() + slot_offset_[s], sizes_[flat]};
}

std::span<std::uint32_t> TruncatedPresheaf::action_mut(int dir, const Generator& g, const Index& source) {
  auto view = action(dir, g, source);
  memo_.reset();
  return {const_cast<std::uint32_t*>(view.data()), view.size()};
}

const std::vector<std::uint32_t>& TruncatedPresheaf::act(int dir, const MonotoneMap& theta, const Index& source) const {
  if (dir < 0 || dir >= arity_ || theta.target() != source[static_cast<std::size_t>(dir)])
    throw std::invalid_argument("derived action does not start at this index");
  if (theta.source() > bounds_[static_cast<std::size_t>(dir)]) throw std::out_of_range("derived action leaves bounds");
  auto f = flat(source);
  // The memo is created lazily and dropped on copy or mutation.
  static std::mutex create_mutex;
  Memo* memo;
  {
    std::lock_guard lock(create_mutex);
    if (!memo_) const_cast<TruncatedPresheaf*>(this)->memo_ = std::make_unique<Memo>();
    memo = memo_.get();
  }
  auto compute = [&] {
    if (Generator g; as_generator(theta, g)) {
      auto step = action(dir, g, source);
      return std::vector<std::uint32_t>(step.begin(), step.end());
    }
    std::vector<std::uint32_t> result(sizes_[f]);
    std::iota(result.begin(), result.end(), 0u);
    Index at = source;
    for (const auto& g : generator_chain(theta)) {
      auto step = action(dir, g, at);
      for (auto& x : result) x = step[x];
      at = shift(at, dir, g.target_level());
    }
    return result;
  };
  const auto slot = f * 3 + static_cast<std::size_t>(dir);
  const auto& values = theta.values();
  if (values.size() <= 15 && theta.target() < 16) {
    std::uint64_t packed = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) packed |= static_cast<std::uint64_t>(values[i]) << (4 * (i + 1));
    std::lock_guard lock(memo->mutex);
    auto [it, fresh] = memo->packed.try_emplace({slot, packed});
    if (fresh) it->second = compute();
    return it->second;
  }
  std::pair<std::size_t, std::vector<int>> key{slot, values};
  std::lock_guard lock(memo->mutex);
  if (auto it = memo->table.find(key); it != memo->table.end()) return it->second;
  return memo->table.emplace(std::move(key), compute()).first->second;
}

std::uint32_t TruncatedPresheaf::act_one(int dir, const MonotoneMap& theta, const Index& source, std::uint32_t e) const {
  Index at = source;
  for (const auto& g : generator_chain(theta)) {
    e = action(dir, g, at)[e];
    at = shift(at, dir, g.target_level());
  }
  return e;
}

bool operator==(const TruncatedPresheaf& a, const TruncatedPresheaf& b) {
  return a.arity_ == b.arity_ && a.bounds_ == b.bounds_ && a.sizes_ == b.sizes_ && a.labels_ == b.labels_ && a.pool_ == b.pool_;
}

std::string Violation::str(int arity) const {
  return identity + " fails in direction " + std::to_string(direction) + " at index (" + index_str(index, arity) +
         ") on element " + std::to_string(element);
}

namespace {

// Reports the first violation at cell f in element-major order.
std::optional<Violation> cell_violation(const TruncatedPresheaf& x, std::size_t f) {
  using K = Generator::Kind;
  const auto& b = x.bounds();
  auto apply = [&](int dir, K kind, int i, const Index& at, std::uint32_t e) {
    return x.action(dir, Generator{kind, at[static_cast<std::size_t>(dir)], i}, at)[e];
  };
  auto moved = [](Index at, int dir, int delta) {
    at[static_cast<std::size_t>(dir)] += delta;
    return at;
  };
  {
    const Index at = x.index(f);
    const std::uint32_t n_el = x.size_at(f);
    // Range of every action out of this cell.
    for (int d = 0; d < x.arity(); ++d) {
      int j = at[static_cast<std::size_t>(d)];
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto g = generator_at(j, b[static_cast<std::size_t>(d)], slot);
        auto target = x.size(shift(at, d, g.target_level()));
        auto table = x.action_slot(d, f, slot);
        for (std::uint32_t e = 0; e < n_el; ++e)
          if (table[e] >= target)
            return Violation{(g.kind == K::Face ? "range of d" : "range of s") + std::to_string(g.index), d, at, e};
      }
    }
    for (std::uint32_t e = 0; e < n_el; ++e) {
      for (int d = 0; d < x.arity(); ++d) {
        const int j = at[static_cast<std::size_t>(d)];
        const int bound = b[static_cast<std::size_t>(d)];
        // d_i d_k = d_{k-1} d_i for i < k.
        if (j >= 2) {
          for (int k = 1; k <= j; ++k)
            for (int i = 0; i < k; ++i) {
              auto lhs = apply(d, K::Face, i, moved(at, d, -1), apply(d, K::Face, k, at, e));
              auto rhs = apply(d, K::Face, k - 1, moved(at, d, -1), apply(d, K::Face, i, at, e));
              if (lhs != rhs)
                return Violation{"d" + std::to_string(i) + " d" + std::to_string(k) + " = d" + std::to_string(k - 1) + " d" + std::to_string(i), d, at, e};
            }
        }
        if (j + 1 <= bound) {
          const Index up = moved(at, d, 1);
          for (int k = 0; k <= j; ++k) {
            auto sx = apply(d, K::Degeneracy, k, at, e);
            for (int i = 0; i <= j + 1; ++i) {
              auto lhs = apply(d, K::Face, i, up, sx);
              std::uint32_t rhs;
              if (i < k)
                rhs = apply(d, K::Degeneracy, k - 1, moved(at, d, -1), apply(d, K::Face, i, at, e));
              else if (i == k || i == k + 1)
                rhs = e;
              else
                rhs = apply(d, K::Degeneracy, k, moved(at, d, -1), apply(d, K::Face, i - 1, at, e));
              if (lhs != rhs)
                return Violation{"d" + std::to_string(i) + " s" + std::to_string(k), d, at, e};
            }
          }
        }
        // s_i s_k = s_{k+1} s_i for i <= k.
        if (j + 2 <= bound) {
          const Index up = moved(at, d, 1);
          for (int k = 0; k <= j; ++k)
            for (int i = 0; i <= k; ++i) {
              auto lhs = apply(d, K::Degeneracy, i, up, apply(d, K::Degeneracy, k, at, e));
              auto rhs = apply(d, K::Degeneracy, k + 1, up, apply(d, K::Degeneracy, i, at, e));
              if (lhs != rhs)
                return Violation{"s" + std::to_string(i) + " s" + std::to_string(k) + " = s" + std::to_string(k + 1) + " s" + std::to_string(i), d, at, e};
            }
        }
      }
      // Actions in different directions commute.
      for (int d = 0; d < x.arity(); ++d)
        for (int d2 = d + 1; d2 < x.arity(); ++d2) {
          const int j = at[static_cast<std::size_t>(d)];
          const int j2 = at[static_cast<std::size_t>(d2)];
          for (int s1 = 0; s1 < generator_count(j, b[static_cast<std::size_t>(d)]); ++s1)
            for (int s2 = 0; s2 < generator_count(j2, b[static_cast<std::size_t>(d2)]); ++s2) {
              auto g1 = generator_at(j, b[static_cast<std::size_t>(d)], s1);
              auto g2 = generator_at(j2, b[static_cast<std::size_t>(d2)], s2);
              Index a1 = shift(at, d, g1.target_level());
              Index a2 = shift(at, d2, g2.target_level());
              auto lhs = x.action(d2, g2, a1)[x.action(d, g1, at)[e]];
              auto rhs = x.action(d, g1, a2)[x.action(d2, g2, at)[e]];
              if (lhs != rhs) return Violation{"directions " + std::to_string(d) + "," + std::to_string(d2) + " commute", d, at, e};
            }
        }
    }
  }
  return std::nullopt;
}

// Same identities as cell_violation, table by table; only answers whether cell f is sound.
bool cell_holds(const TruncatedPresheaf& x, std::size_t f) {
  using K = Generator::Kind;
  const auto& b = x.bounds();
  const Index at = x.index(f);
  const std::uint32_t n_el = x.size_at(f);
  if (n_el == 0) return true;
  auto tab = [&](int dir, K kind, int i, const Index& from) {
    const auto cell = x.flat(from);
    return x.action_slot(dir, cell, generator_slot(Generator{kind, from[static_cast<std::size_t>(dir)], i}, b[static_cast<std::size_t>(dir)]));
  };
  for (int d = 0; d < x.arity(); ++d) {
    const int j = at[static_cast<std::size_t>(d)];
    for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
      auto g = generator_at(j, b[static_cast<std::size_t>(d)], slot);
      auto target = x.size(shift(at, d, g.target_level()));
      auto table = x.action_slot(d, f, slot);
      for (std::uint32_t e = 0; e < n_el; ++e)
        if (table[e] >= target) return false;
    }
  }
  for (int d = 0; d < x.arity(); ++d) {
    const int j = at[static_cast<std::size_t>(d)];
    const int bound = b[static_cast<std::size_t>(d)];
    const Index down = shift(at, d, j - 1);
    const Index up = shift(at, d, j + 1);
    if (j >= 2)
      for (int k = 1; k <= j; ++k)
        for (int i = 0; i < k; ++i) {
          auto dk = tab(d, K::Face, k, at), di = tab(d, K::Face, i, at);
          auto di_down = tab(d, K::Face, i, down), dk1_down = tab(d, K::Face, k - 1, down);
          for (std::uint32_t e = 0; e < n_el; ++e)
            if (di_down[dk[e]] != dk1_down[di[e]]) return false;
        }
    if (j + 1 <= bound)
      for (int k = 0; k <= j; ++k) {
        auto sk = tab(d, K::Degeneracy, k, at);
        for (int i = 0; i <= j + 1; ++i) {
          auto di_up = tab(d, K::Face, i, up);
          if (i == k || i == k + 1) {
            for (std::uint32_t e = 0; e < n_el; ++e)
              if (di_up[sk[e]] != e) return false;
          } else {
            const int face = i < k ? i : i - 1;
            const int degeneracy = i < k ? k - 1 : k;
            auto df = tab(d, K::Face, face, at);
            auto sd = tab(d, K::Degeneracy, degeneracy, down);
            for (std::uint32_t e = 0; e < n_el; ++e)
              if (di_up[sk[e]] != sd[df[e]]) return false;
          }
        }
      }
    if (j + 2 <= bound)
      for (int k = 0; k <= j; ++k)
        for (int i = 0; i <= k; ++i) {
          auto sk = tab(d, K::Degeneracy, k, at), si = tab(d, K::Degeneracy, i, at);
          auto si_up = tab(d, K::Degeneracy, i, up), sk1_up = tab(d, K::Degeneracy, k + 1, up);
          for (std::uint32_t e = 0; e < n_el; ++e)
            if (si_up[sk[e]] != sk1_up[si[e]]) return false;
        }
  }
  for (int d = 0; d < x.arity(); ++d)
    for (int d2 = d + 1; d2 < x.arity(); ++d2) {
      const int j = at[static_cast<std::size_t>(d)];
      const int j2 = at[static_cast<std::size_t>(d2)];
      for (int s1 = 0; s1 < generator_count(j, b[static_cast<std::size_t>(d)]); ++s1)
        for (int s2 = 0; s2 < generator_count(j2, b[static_cast<std::size_t>(d2)]); ++s2) {
          auto g1 = generator_at(j, b[static_cast<std::size_t>(d)], s1);
          auto g2 = generator_at(j2, b[static_cast<std::size_t>(d2)], s2);
          const Index a1 = shift(at, d, g1.target_level());
          const Index a2 = shift(at, d2, g2.target_level());
          auto t1 = x.action_slot(d, f, s1), t2 = x.action_slot(d2, f, s2);
          auto t21 = x.action(d2, g2, a1), t12 = x.action(d, g1, a2);
          for (std::uint32_t e = 0; e < n_el; ++e)
            if (t21[t1[e]] != t12[t2[e]]) return false;
        }
    }
  return true;
}

}  // namespace

std::optional<Violation> validate(const TruncatedPresheaf& x) {
  for (std::size_t f = 0; f < x.cell_count(); ++f)
    if (!cell_holds(x, f))
      if (auto v = cell_violation(x, f)) return v;
  return std::nullopt;
}

bool same_shape(const TruncatedPresheaf& a, const TruncatedPresheaf& b) {
  return a.arity() == b.arity() && a.bounds() == b.bounds();
}

PresheafMap::PresheafMap(Ptr domain, Ptr codomain, std::vector<std::uint32_t> images)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), images_(std::move(images)), fibers_(std::make_shared<FiberIndex>()) {
  if (!same_shape(*domain_, *codomain_)) throw std::invalid_argument("map between presheaves of different shape");
  if (images_.size() != domain_->element_count()) throw std::invalid_argument("map has wrong number of components");
  for (std::size_t f = 0; f < domain_->cell_count(); ++f)
    for (std::uint32_t e = 0; e < domain_->size_at(f); ++e)
      if (image_at(f, e) >= codomain_->size_at(f)) throw std::invalid_argument("map component out of range");
}

std::optional<Violation> PresheafMap::naturality_violation() const {
  const auto& x = *domain_;
  const auto& y = *codomain_;
  for (std::size_t f = 0; f < x.cell_count(); ++f) {
    const Index at = x.index(f);
    for (int d = 0; d < x.arity(); ++d)
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto g = generator_at(at[static_cast<std::size_t>(d)], x.bounds()[static_cast<std::size_t>(d)], slot);
        auto tf = x.flat(shift(at, d, g.target_level()));
        auto ax = x.action_slot(d, f, slot);
        auto ay = y.action_slot(d, f, slot);
        for (std::uint32_t e = 0; e < x.size_at(f); ++e)
          if (image_at(tf, ax[e]) != ay[image_at(f, e)])
            return Violation{std::string("naturality along ") + (g.kind == Generator::Kind::Face ? "d" : "s") + std::to_string(g.index), d, at, e};
      }
  }
  return std::nullopt;
}

std::uint32_t PresheafMap::fiber_rank(std::size_t flat, std::uint32_t e) const {
  if (images_.empty() || domain_->size_at(flat) == 0) throw std::out_of_range("no such element");
  fiber(flat, image_at(flat, e));
  return fibers_->rank[domain_->element_begin(flat) + e];
}

std::span<const std::uint32_t> PresheafMap::fiber_ranks() const {
  if (images_.empty()) return {};
  fiber(0, 0);
  return fibers_->rank;
}

std::span<const std::uint32_t> PresheafMap::fiber(std::size_t flat, std::uint32_t b) const {
  std::call_once(fibers_->once, [this] {
    const auto& y = *codomain_;
    auto& fi = *fibers_;
    fi.begin.assign(y.element_count() + 1, 0);
    for (std::size_t f = 0; f < domain_->cell_count(); ++f)
      for (std::uint32_t e = 0; e < domain_->size_at(f); ++e) ++fi.begin[y.element_begin(f) + image_at(f, e) + 1];
    for (std::size_t i = 1; i < fi.begin.size(); ++i) fi.begin[i] += fi.begin[i - 1];
    fi.members.assign(domain_->element_count(), 0);
    std::vector<std::uint32_t> fill(fi.begin.begin(), fi.begin.end() - 1);
    fi.rank.assign(domain_->element_count(), 0);
    for (std::size_t f = 0; f < domain_->cell_count(); ++f)
      for (std::uint32_t e = 0; e < domain_->size_at(f); ++e) {
        auto& slot = fill[y.element_begin(f) + image_at(f, e)];
        fi.rank[domain_->element_begin(f) + e] = slot - fi.begin[y.element_begin(f) + image_at(f, e)];
        fi.members[slot++] = e;
      }
  });
  auto g = codomain_->element_begin(flat) + b;
  return {fibers_->members.data() + fibers_->begin[g], fibers_->begin[g + 1] - fibers_->begin[g]};
}

TruncatedPresheaf terminal(int arity, Bounds bounds) {
  return TruncatedPresheaf(arity, bounds, std::vector<std::uint32_t>(cells_for(checked_bounds(arity, bounds)), 1));
}

TruncatedPresheaf empty_presheaf(int arity, Bounds bounds) {
  return TruncatedPresheaf(arity, bounds, std::vector<std::uint32_t>(cells_for(checked_bounds(arity, bounds)), 0));
}

TruncatedPresheaf representable(RepKind kind, int r, Bounds bounds) {
  if (r < 0) throw std::invalid_argument("negative representable level");
  const int dir = kind == RepKind::Phi ? 0 : kind == RepKind::F ? 1 : 2;
  const auto cells = cells_for(checked_bounds(3, bounds));
  std::vector<std::uint32_t> sizes(cells);
  LabelTable labels;
  Bounds probe = bounds;
  TruncatedPresheaf shape(3, probe, std::vector<std::uint32_t>(cells, 0));
  std::vector<std::vector<MonotoneMap>> homs;
  for (int c = 0; c <= bounds[static_cast<std::size_t>(dir)]; ++c) homs.push_back(enumerate_monotone(c, r));
  for (std::size_t f = 0; f < cells; ++f) {
    int c = shape.index(f)[static_cast<std::size_t>(dir)];
    sizes[f] = static_cast<std::uint32_t>(homs[static_cast<std::size_t>(c)].size());
    for (const auto& h : homs[static_cast<std::size_t>(c)]) labels.add(h.str());
  }
  TruncatedPresheaf x(3, bounds, std::move(sizes), std::move(labels));
  for (std::size_t f = 0; f < cells; ++f) {
    Index at = x.index(f);
    for (int d = 0; d < 3; ++d)
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto table = x.action_slot_mut(d, f, slot);
        if (d != dir) {
          std::iota(table.begin(), table.end(), 0u);
          continue;
        }
        auto theta = generator_at(at[static_cast<std::size_t>(d)], bounds[static_cast<std::size_t>(d)], slot).map();
        const auto& src = homs[static_cast<std::size_t>(at[static_cast<std::size_t>(d)])];
        for (std::size_t e = 0; e < src.size(); ++e) table[e] = static_cast<std::uint32_t>(monotone_rank(compose(src[e], theta)));
      }
  }
  return x;
}

std::shared_ptr<const TruncatedPresheaf> base_presheaf(int p, int q, Bounds bounds) {
  static std::mutex mutex;
  static std::map<std::pair<std::pair<int, int>, Bounds>, std::shared_ptr<const TruncatedPresheaf>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{{p, q}, bounds}];
  if (!slot) slot = std::make_shared<const TruncatedPresheaf>(product(representable(RepKind::F, p, bounds), representable(RepKind::Delta, q, bounds)));
  return slot;
}

PresheafMap base_map(const MonotoneMap& delta1, const MonotoneMap& delta2, Bounds bounds) {
  auto dom = base_presheaf(delta1.source(), delta2.source(), bounds);
  auto cod = base_presheaf(delta1.target(), delta2.target(), bounds);
  std::vector<std::uint32_t> images;
  images.reserve(dom->element_count());
  for (std::size_t f = 0; f < dom->cell_count(); ++f) {
    Index at = dom->index(f);
    auto h1 = enumerate_monotone(at[1], delta1.source());
    auto h2 = enumerate_monotone(at[2], delta2.source());
    auto width = monotone_count(at[2], delta2.target());
    for (const auto& f1 : h1)
      for (const auto& f2 : h2)
        images.push_back(static_cast<std::uint32_t>(monotone_rank(compose(delta1, f1)) * width + monotone_rank(compose(delta2, f2))));
  }
  return PresheafMap(dom, cod, std::move(images));
}

namespace {

Pullback pullback_impl(const PresheafMap& f, const PresheafMap& g,
                       const std::function<std::string(std::string_view, std::string_view)>& label, bool positional) {
  const auto& a = f.domain();
  const auto& c = g.domain();
  if (!same_shape(a, c) || !(f.codomain_ptr() == g.codomain_ptr() || f.codomain() == g.codomain()))
    throw std::invalid_argument("pullback needs maps into a common presheaf");
  // Start of every a's block.
  std::vector<std::uint32_t> start(a.element_count());
  std::vector<std::uint32_t> sizes(a.cell_count(), 0);
  for (std::size_t cell = 0; cell < a.cell_count(); ++cell) {
    std::uint32_t total = 0;
    for (std::uint32_t e = 0; e < a.size_at(cell); ++e) {
      start[a.element_begin(cell) + e] = total;
      total += static_cast<std::uint32_t>(g.fiber(cell, f.image_at(cell, e)).size());
    }
    sizes[cell] = total;
  }
  LabelTable labels;
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;
  left.reserve(a.element_count());
  right.reserve(a.element_count());
  for (std::size_t cell = 0; cell < a.cell_count(); ++cell) {
    const auto first_of_cell = left.size();
    for (std::uint32_t e = 0; e < a.size_at(cell); ++e)
      for (auto ce : g.fiber(cell, f.image_at(cell, e))) {
        if (positional)
          labels.add(std::to_string(left.size() - first_of_cell));
        else
          labels.add(label ? label(a.label_at(cell, e), c.label_at(cell, ce)) : "(" + std::string(a.label_at(cell, e)) + "," + std::string(c.label_at(cell, ce)) + ")");
        left.push_back(e);
        right.push_back(ce);
      }
  }
  TruncatedPresheaf p(a.arity(), a.bounds(), std::move(sizes), std::move(labels));
  const auto ranks = g.fiber_ranks();
  for (std::size_t cell = 0; cell < p.cell_count(); ++cell) {
    Index at = p.index(cell);
    auto base = p.element_begin(cell);
    for (int d = 0; d < p.arity(); ++d)
      for (int slot = 0; slot < p.generator_count_at(d, cell); ++slot) {
        auto gen = generator_at(at[static_cast<std::size_t>(d)], p.bounds()[static_cast<std::size_t>(d)], slot);
        auto tcell = p.flat(shift(at, d, gen.target_level()));
        auto act_a = a.action_slot(d, cell, slot);
        auto act_c = c.action_slot(d, cell, slot);
        auto table = p.action_slot_mut(d, cell, slot);
        const auto* start_t = start.data() + a.element_begin(tcell);
        const auto* rank_t = ranks.data() + c.element_begin(tcell);
        for (std::uint32_t e = 0; e < p.size_at(cell); ++e) table[e] = start_t[act_a[left[base + e]]] + rank_t[act_c[right[base + e]]];
      }
  }
  auto obj = std::make_shared<const TruncatedPresheaf>(std::move(p));
  return Pullback{obj, PresheafMap(obj, f.domain_ptr(), std::move(left)), PresheafMap(obj, g.domain_ptr(), std::move(right))};
}

}  // namespace

Pullback pullback(const PresheafMap& f, const PresheafMap& g,
                  const std::function<std::string(std::string_view, std::string_view)>& label) {
  return pullback_impl(f, g, label, false);
}

Pullback pullback(const PresheafMap& f, const PresheafMap& g) { return pullback_impl(f, g, nullptr, false); }

Pullback pullback_positional(const PresheafMap& f, const PresheafMap& g) { return pullback_impl(f, g, nullptr, true); }

PresheafMap identity_map(std::shared_ptr<const TruncatedPresheaf> x) {
  std::vector<std::uint32_t> images;
  images.reserve(x->element_count());
  for (std::size_t f = 0; f < x->cell_count(); ++f)
    for (std::uint32_t e = 0; e < x->size_at(f); ++e) images.push_back(e);
  return PresheafMap(x, x, std::move(images));
}

PresheafMap to_terminal(std::shared_ptr<const TruncatedPresheaf> x) {
  auto t = std::make_shared<const TruncatedPresheaf>(terminal(x->arity(), x->bounds()));
  return PresheafMap(x, t, std::vector<std::uint32_t>(x->element_count(), 0));
}

PresheafMap compose(const PresheafMap& f, const PresheafMap& g) {
  if (!(g.codomain_ptr() == f.domain_ptr() || g.codomain() == f.domain())) throw std::invalid_argument("ill-typed map composition");
  std::vector<std::uint32_t> images(g.domain().element_count());
  for (std::size_t cell = 0; cell < g.domain().cell_count(); ++cell)
    for (std::uint32_t e = 0; e < g.domain().size_at(cell); ++e)
      images[g.domain().element_begin(cell) + e] = f.image_at(cell, g.image_at(cell, e));
  return PresheafMap(g.domain_ptr(), f.codomain_ptr(), std::move(images));
}

TruncatedPresheaf product(const TruncatedPresheaf& x, const TruncatedPresheaf& y) {
  if (!same_shape(x, y)) throw std::invalid_argument("product of presheaves of different shape");
  auto px = std::make_shared<const TruncatedPresheaf>(x);
  auto py = std::make_shared<const TruncatedPresheaf>(y);
  auto tx = to_terminal(px);
  PresheafMap ty(py, tx.codomain_ptr(), std::vector<std::uint32_t>(py->element_count(), 0));
  return *pullback(tx, ty).object;
}

namespace {

// Builds a presheaf whose cell `f` copies cell source_cell(f) of `src`, with actions
// given by a callback that maps (direction, slot, cell) to a function on elements.
template <typename CellOf, typename Action>
TruncatedPresheaf reindex(int arity, Bounds bounds, const TruncatedPresheaf& src, CellOf cell_of, Action action) {
  TruncatedPresheaf shape(arity, bounds, std::vector<std::uint32_t>(cells_for(bounds), 0));
  std::vector<std::uint32_t> sizes(shape.cell_count());
  LabelTable labels;
  for (std::size_t f = 0; f < shape.cell_count(); ++f) {
    auto sf = cell_of(shape.index(f));
    sizes[f] = src.size_at(sf);
    for (std::uint32_t e = 0; e < sizes[f]; ++e) labels.add(src.label_at(sf, e));
  }
  TruncatedPresheaf x(arity, bounds, std::move(sizes), std::move(labels));
  for (std::size_t f = 0; f < x.cell_count(); ++f) {
    Index at = x.index(f);
    for (int d = 0; d < arity; ++d)
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto g = generator_at(at[static_cast<std::size_t>(d)], bounds[static_cast<std::size_t>(d)], slot);
        auto table = x.action_slot_mut(d, f, slot);
        for (std::uint32_t e = 0; e < x.size_at(f); ++e) table[e] = action(d, g, at, e);
      }
  }
  return x;
}

}  // namespace

TruncatedPresheaf standard_embed(const TruncatedPresheaf& x, int k_bound) {
  if (x.arity() != 2) throw std::invalid_argument("standard_embed needs an arity-2 presheaf");
  Bounds b{k_bound, x.bounds()[0], x.bounds()[1]};
  return reindex(3, b, x, [&](const Index& i) { return x.flat({i[1], i[2], 0}); },
                 [&](int d, const Generator& g, const Index& i, std::uint32_t e) -> std::uint32_t {
                   if (d == 0) return e;
                   return x.action(d - 1, g, {i[1], i[2], 0})[e];
                 });
}

TruncatedPresheaf delta_diag(const TruncatedPresheaf& x) {
  if (x.arity() != 3) throw std::invalid_argument("delta_diag needs an arity-3 presheaf");
  if (x.bounds()[0] != x.bounds()[1]) throw std::invalid_argument("delta_diag needs equal k and n bounds");
  Bounds b{x.bounds()[1], x.bounds()[2], 0};
  return reindex(2, b, x, [&](const Index& i) { return x.flat({i[0], i[0], i[1]}); },
                 [&](int d, const Generator& g, const Index& i, std::uint32_t e) -> std::uint32_t {
                   Index at{i[0], i[0], i[1]};
                   if (d == 1) return x.action(2, g, at)[e];
                   auto once = x.action(0, g, at)[e];
                   return x.action(1, g, shift(at, 0, g.target_level()))[once];
                 });
}

TruncatedPresheaf constant_over_base(const TruncatedPresheaf& s, int n_bound, int l_bound) {
  if (s.arity() != 1) throw std::invalid_argument("constant_over_base needs an arity-1 presheaf");
  Bounds b{s.bounds()[0], n_bound, l_bound};
  return reindex(3, b, s, [&](const Index& i) { return s.flat({i[0], 0, 0}); },
                 [&](int d, const Generator& g, const Index& i, std::uint32_t e) -> std::uint32_t {
                   if (d != 0) return e;
                   return s.action(0, g, {i[0], 0, 0})[e];
                 });
}

TruncatedPresheaf truncate(const TruncatedPresheaf& x, Bounds bounds) {
  for (std::size_t d = 0; d < 3; ++d)
    if (bounds[d] > x.bounds()[d]) throw std::invalid_argument("truncate cannot enlarge bounds");
  return reindex(x.arity(), bounds, x, [&](const Index& i) { return x.flat(i); },
                 [&](int d, const Generator& g, const Index& i, std::uint32_t e) { return x.action(d, g, i)[e]; });
}

TruncatedPresheaf slice_direction(const TruncatedPresheaf& x, int dir, int level) {
  if (x.arity() < 2 || dir < 0 || dir >= x.arity()) throw std::invalid_argument("bad direction to slice");
  Bounds b{0, 0, 0};
  int k = 0;
  for (int d = 0; d < x.arity(); ++d)
    if (d != dir) b[static_cast<std::size_t>(k++)] = x.bounds()[static_cast<std::size_t>(d)];
  auto lift = [&](const Index& i) {
    Index out{0, 0, 0};
    int kk = 0;
    for (int d = 0; d < x.arity(); ++d) out[static_cast<std::size_t>(d)] = d == dir ? level : i[static_cast<std::size_t>(kk++)];
    return out;
  };
  return reindex(x.arity() - 1, b, x, [&](const Index& i) { return x.flat(lift(i)); },
                 [&](int d, const Generator& g, const Index& i, std::uint32_t e) {
                   return x.action(d >= dir ? d + 1 : d, g, lift(i))[e];
                 });
}

PresheafMap standard_embed(const PresheafMap& f, int k_bound) {
  auto dom = std::make_shared<const TruncatedPresheaf>(standard_embed(f.domain(), k_bound));
  auto cod = std::make_shared<const TruncatedPresheaf>(standard_embed(f.codomain(), k_bound));
  std::vector<std::uint32_t> images;
  images.reserve(dom->element_count());
  for (std::size_t c = 0; c < dom->cell_count(); ++c) {
    Index i = dom->index(c);
    auto src = f.domain().flat({i[1], i[2], 0});
    for (std::uint32_t e = 0; e < dom->size_at(c); ++e) images.push_back(f.image_at(src, e));
  }
  return PresheafMap(dom, cod, std::move(images));
}

PresheafMap delta_diag(const PresheafMap& f) {
  auto dom = std::make_shared<const TruncatedPresheaf>(delta_diag(f.domain()));
  auto cod = std::make_shared<const TruncatedPresheaf>(delta_diag(f.codomain()));
  std::vector<std::uint32_t> images;
  images.reserve(dom->element_count());
  for (std::size_t c = 0; c < dom->cell_count(); ++c) {
    Index i = dom->index(c);
    auto src = f.domain().flat({i[0], i[0], i[1]});
    for (std::uint32_t e = 0; e < dom->size_at(c); ++e) images.push_back(f.image_at(src, e));
  }
  return PresheafMap(dom, cod, std::move(images));
}

TruncatedPresheaf relabel(const TruncatedPresheaf& x, const std::function<std::string(std::size_t, std::uint32_t)>& label) {
  LabelTable labels;
  for (std::size_t f = 0; f < x.cell_count(); ++f)
    for (std::uint32_t e = 0; e < x.size_at(f); ++e) labels.add(label(f, e));
  TruncatedPresheaf y(x.arity(), x.bounds(), x.sizes(), std::move(labels));
  for (std::size_t f = 0; f < x.cell_count(); ++f)
    for (int d = 0; d < x.arity(); ++d)
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto src = x.action_slot(d, f, slot);
        auto dst = y.action_slot_mut(d, f, slot);
        std::copy(src.begin(), src.end(), dst.begin());
      }
  return y;
}

TruncatedPresheaf index_relabel(const TruncatedPresheaf& x) {
  return relabel(x, [](std::size_t, std::uint32_t e) { return std::to_string(e); });
}

TruncatedPresheaf canonical_relabel(const TruncatedPresheaf& x) {
  // order[f][i] is the old element placed at position i; pos is its inverse.
  std::vector<std::vector<std::uint32_t>> order(x.cell_count());
  std::vector<std::vector<std::uint32_t>> pos(x.cell_count());
  for (std::size_t f = 0; f < x.cell_count(); ++f) {
    auto& o = order[f];
    o.resize(x.size_at(f));
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(), [&](auto a, auto b) { return x.label_at(f, a) < x.label_at(f, b); });
    pos[f].resize(o.size());
    for (std::uint32_t i = 0; i < o.size(); ++i) pos[f][o[i]] = i;
  }
  TruncatedPresheaf y(x.arity(), x.bounds(), x.sizes());
  for (std::size_t f = 0; f < x.cell_count(); ++f) {
    Index at = x.index(f);
    for (int d = 0; d < x.arity(); ++d)
      for (int slot = 0; slot < x.generator_count_at(d, f); ++slot) {
        auto g = generator_at(at[static_cast<std::size_t>(d)], x.bounds()[static_cast<std::size_t>(d)], slot);
        auto tf = x.flat(shift(at, d, g.target_level()));
        auto src = x.action_slot(d, f, slot);
        auto dst = y.action_slot_mut(d, f, slot);
        for (std::uint32_t i = 0; i < src.size(); ++i) dst[i] = pos[tf][src[order[f][i]]];
      }
  }
  return y;
}

void enumerate_maps(const TruncatedPresheaf& a, const TruncatedPresheaf& x, const MapVisitor& visit, const PresheafMap* over_a,
                    const PresheafMap* over_x) {
  if (!same_shape(a, x)) throw std::invalid_argument("maps between presheaves of different shape");
  if ((over_a == nullptr) != (over_x == nullptr)) throw std::invalid_argument("both anchor maps are needed");
  // Cells by total degree, so faces of an element are decided before it.
  std::vector<std::size_t> cells(a.cell_count());
  std::iota(cells.begin(), cells.end(), 0);
  std::stable_sort(cells.begin(), cells.end(), [&](auto c1, auto c2) {
    auto i1 = a.index(c1);
    auto i2 = a.index(c2);
    return i1[0] + i1[1] + i1[2] < i2[0] + i2[1] + i2[2];
  });
  std::vector<std::size_t> order_pos(a.cell_count());
  for (std::size_t i = 0; i < cells.size(); ++i) order_pos[cells[i]] = i;

  struct Edge {
    std::size_t other;  // global id of the other endpoint in a
    int dir;
    int slot;
    std::size_t slot_cell;  // cell the generator acts out of
    bool outgoing;          // constraint x.g(img(self)) == img(other)
  };
  std::vector<std::vector<Edge>> edges(a.element_count());
  for (std::size_t c = 0; c < a.cell_count(); ++c) {
    Index at = a.index(c);
    for (int d = 0; d < a.arity(); ++d)
      for (int slot = 0; slot < a.generator_count_at(d, c); ++slot) {
        auto g = generator_at(at[static_cast<std::size_t>(d)], a.bounds()[static_cast<std::size_t>(d)], slot);
        auto tc = a.flat(shift(at, d, g.target_level()));
        auto table = a.action_slot(d, c, slot);
        for (std::uint32_t e = 0; e < a.size_at(c); ++e) {
          auto self = a.element_begin(c) + e;
          auto other = a.element_begin(tc) + table[e];
          if (order_pos[tc] < order_pos[c])
            edges[self].push_back({other, d, slot, c, true});
          else
            edges[other].push_back({self, d, slot, c, false});
        }
      }
  }
  std::vector<std::size_t> sequence;
  for (auto c : cells)
    for (std::uint32_t e = 0; e < a.size_at(c); ++e) sequence.push_back(a.element_begin(c) + e);
  std::vector<std::size_t> cell_of(a.element_count());
  for (std::size_t c = 0; c < a.cell_count(); ++c)
    for (std::uint32_t e = 0; e < a.size_at(c); ++e) cell_of[a.element_begin(c) + e] = c;

  // Preimage lists of x's actions, built on first use.
  std::map<std::pair<std::size_t, int>, std::vector<std::vector<std::uint32_t>>> preimages;
  auto preimage = [&](int d, std::size_t c, int slot, std::size_t tc) -> const std::vector<std::vector<std::uint32_t>>& {
    auto key = std::make_pair(c * 3 + static_cast<std::size_t>(d), slot);
    auto it = preimages.find(key);
    if (it != preimages.end()) return it->second;
    std::vector<std::vector<std::uint32_t>> lists(x.size_at(tc));
    auto table = x.action_slot(d, c, slot);
    for (std::uint32_t y = 0; y < x.size_at(c); ++y) lists[table[y]].push_back(y);
    return preimages.emplace(key, std::move(lists)).first->second;
  };

  std::vector<std::uint32_t> img(a.element_count(), 0);
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (stop) return;
    if (pos == sequence.size()) {
      std::vector<std::uint32_t> images(a.element_count());
      for (std::size_t c = 0; c < a.cell_count(); ++c)
        for (std::uint32_t e = 0; e < a.size_at(c); ++e) images[a.element_begin(c) + e] = img[a.element_begin(c) + e];
      if (!visit(images)) stop = true;
      return;
    }
    const auto self = sequence[pos];
    const auto c = cell_of[self];
    const auto e = static_cast<std::uint32_t>(self - a.element_begin(c));
    auto check = [&](std::uint32_t y) {
      if (over_a && over_x->image_at(c, y) != over_a->image_at(c, e)) return false;
      for (const auto& ed : edges[self]) {
        auto oc = cell_of[ed.other];
        auto oy = img[ed.other];
        if (ed.outgoing) {
          if (x.action_slot(ed.dir, c, ed.slot)[y] != oy) return false;
        } else {
          if (x.action_slot(ed.dir, oc, ed.slot)[oy] != y) return false;
        }
      }
      return true;
    };
    // An incoming constraint fixes the candidate; an outgoing one narrows it.
    for (const auto& ed : edges[self])
      if (!ed.outgoing) {
        auto y = x.action_slot(ed.dir, cell_of[ed.other], ed.slot)[img[ed.other]];
        if (check(y)) {
          img[self] = y;
          rec(pos + 1);
        }
        return;
      }
    for (const auto& ed : edges[self])
      if (ed.outgoing) {
        const auto& lists = preimage(ed.dir, c, ed.slot, cell_of[ed.other]);
        for (auto y : lists[img[ed.other]]) {
          if (!check(y)) continue;
          img[self] = y;
          rec(pos + 1);
          if (stop) return;
        }
        return;
      }
    for (std::uint32_t y = 0; y < x.size_at(c); ++y) {
      if (!check(y)) continue;
      img[self] = y;
      rec(pos + 1);
      if (stop) return;
    }
  };
  rec(0);
}

std::size_t count_maps(const TruncatedPresheaf& a, const TruncatedPresheaf& x) {
  std::size_t n = 0;
  enumerate_maps(a, x, [&](const std::vector<std::uint32_t>&) {
    ++n;
    return true;
  });
  return n;
}

std::vector<PresheafMap> hom_over(const PresheafMap& a, const PresheafMap& x) {
  std::vector<PresheafMap> out;
  enumerate_maps(
      a.domain(), x.domain(),
      [&](const std::vector<std::uint32_t>& images) {
        out.emplace_back(a.domain_ptr(), x.domain_ptr(), images);
        return true;
      },
      &a, &x);
  return out;
}

namespace {

struct SpaceSearch {
  int k_bound;
  int max_size;
  std::vector<std::uint32_t> sizes;
  // faces[j][i]: d_i X_j -> X_{j-1}; degens[j][i]: s_i X_{j-1} -> X_j.
  std::vector<std::vector<std::vector<std::uint32_t>>> faces;
  std::vector<std::vector<std::vector<std::uint32_t>>> degens;
  std::vector<TruncatedPresheaf> out;

  void emit() {
    TruncatedPresheaf x(1, {k_bound, 0, 0}, sizes);
    for (int j = 0; j <= k_bound; ++j)
      for (int slot = 0; slot < generator_count(j, k_bound); ++slot) {
        auto g = generator_at(j, k_bound, slot);
        auto table = x.action_slot_mut(0, static_cast<std::size_t>(j), slot);
        const auto& src = g.kind == Generator::Kind::Face ? faces[static_cast<std::size_t>(j)][static_cast<std::size_t>(g.index)]
                                                          : degens[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(g.index)];
        std::copy(src.begin(), src.end(), table.begin());
      }
    out.push_back(std::move(x));
  }

  void level(int j) {
    if (j > k_bound) {
      emit();
      return;
    }
    for (int s = 0; s <= max_size; ++s) {
      sizes[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(s);
      if (j == 0) {
        level(1);
        continue;
      }
      auto& dg = degens[static_cast<std::size_t>(j)];
      dg.assign(static_cast<std::size_t>(j), std::vector<std::uint32_t>(sizes[static_cast<std::size_t>(j - 1)], 0));
      degeneracies(j, 0, 0);
    }
  }

  // Enumerates degeneracy table entries one at a time.
  void degeneracies(int j, std::size_t table, std::uint32_t entry) {
    auto& dg = degens[static_cast<std::size_t>(j)];
    const auto below = sizes[static_cast<std::size_t>(j - 1)];
    if (table == dg.size()) {
      if (!degeneracy_identities(j)) return;
      faces[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(j + 1), std::vector<std::uint32_t>(sizes[static_cast<std::size_t>(j)], 0));
      face_element(j, 0);
      return;
    }
    if (entry == below) {
      degeneracies(j, table + 1, 0);
      return;
    }
    for (std::uint32_t v = 0; v < sizes[static_cast<std::size_t>(j)]; ++v) {
      dg[table][entry] = v;
      degeneracies(j, table, entry + 1);
    }
  }

  // s_i s_k = s_{k+1} s_i on X_{j-2} -> X_j.
  bool degeneracy_identities(int j) {
    if (j < 2) return true;
    const auto& lo = degens[static_cast<std::size_t>(j - 1)];
    const auto& hi = degens[static_cast<std::size_t>(j)];
    for (std::uint32_t y = 0; y < sizes[static_cast<std::size_t>(j - 2)]; ++y)
      for (int k = 0; k <= j - 2; ++k)
        for (int i = 0; i <= k; ++i)
          if (hi[static_cast<std::size_t>(i)][lo[static_cast<std::size_t>(k)][y]] != hi[static_cast<std::size_t>(k + 1)][lo[static_cast<std::size_t>(i)][y]])
            return false;
    return true;
  }

  void face_element(int j, std::uint32_t x) {
    if (x == sizes[static_cast<std::size_t>(j)]) {
      level(j + 1);
      return;
    }
    // Faces of a degenerate element are forced.
    std::vector<int> forced(static_cast<std::size_t>(j + 1), -1);
    const auto& dg = degens[static_cast<std::size_t>(j)];
    for (int k = 0; k < j; ++k)
      for (std::uint32_t y = 0; y < sizes[static_cast<std::size_t>(j - 1)]; ++y) {
        if (dg[static_cast<std::size_t>(k)][y] != x) continue;
        for (int i = 0; i <= j; ++i) {
          int v;
          if (i == k || i == k + 1)
            v = static_cast<int>(y);
          else if (i < k)
            v = static_cast<int>(degens[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)][faces[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)][y]]);
          else
            v = static_cast<int>(degens[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)][faces[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)][y]]);
          auto& slot = forced[static_cast<std::size_t>(i)];
          if (slot >= 0 && slot != v) return;
          slot = v;
        }
      }
    face_tuple(j, x, 0, forced);
  }

  void face_tuple(int j, std::uint32_t x, int i, const std::vector<int>& forced) {
    auto& fc = faces[static_cast<std::size_t>(j)];
    if (i > j) {
      // d_a d_b = d_{b-1} d_a for a < b.
      if (j >= 2) {
        const auto& lower = faces[static_cast<std::size_t>(j - 1)];
        for (int b = 1; b <= j; ++b)
          for (int a = 0; a < b; ++a)
            if (lower[static_cast<std::size_t>(a)][fc[static_cast<std::size_t>(b)][x]] != lower[static_cast<std::size_t>(b - 1)][fc[static_cast<std::size_t>(a)][x]]) return;
      }
      face_element(j, x + 1);
      return;
    }
    if (forced[static_cast<std::size_t>(i)] >= 0) {
      fc[static_cast<std::size_t>(i)][x] = static_cast<std::uint32_t>(forced[static_cast<std::size_t>(i)]);
      face_tuple(j, x, i + 1, forced);
      return;
    }
    for (std::uint32_t v = 0; v < sizes[static_cast<std::size_t>(j - 1)]; ++v) {
      fc[static_cast<std::size_t>(i)][x] = v;
      face_tuple(j, x, i + 1, forced);
    }
  }
};

}  // namespace

std::vector<TruncatedPresheaf> enumerate_spaces(int k_bound, int max_size) {
  if (k_bound < 0 || max_size < 0) throw std::invalid_argument("negative space bounds");
  SpaceSearch search{k_bound, max_size, std::vector<std::uint32_t>(static_cast<std::size_t>(k_bound) + 1, 0),
                     std::vector<std::vector<std::vector<std::uint32_t>>>(static_cast<std::size_t>(k_bound) + 1),
                     std::vector<std::vector<std::vector<std::uint32_t>>>(static_cast<std::size_t>(k_bound) + 2),
                     {}};
  search.level(0);
  return std::move(search.out);
}

std::vector<std::vector<std::vector<std::uint32_t>>> enumerate_space_maps(const TruncatedPresheaf& a, const TruncatedPresheaf& b) {
  if (a.arity() != 1 || !same_shape(a, b)) throw std::invalid_argument("space maps need arity-1 presheaves of equal bounds");
  std::vector<std::vector<std::vector<std::uint32_t>>> out;
  enumerate_maps(a, b, [&](const std::vector<std::uint32_t>& img) {
    std::vector<std::vector<std::uint32_t>> levels;
    for (std::size_t c = 0; c < a.cell_count(); ++c)
      levels.emplace_back(img.begin() + static_cast<std::ptrdiff_t>(a.element_begin(c)),
                          img.begin() + static_cast<std::ptrdiff_t>(a.element_begin(c) + a.size_at(c)));
    out.push_back(std::move(levels));
    return true;
  });
  return out;
}

}  // namespace segal
