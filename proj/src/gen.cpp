#include "rsched/gen.h"

#include <algorithm>
#include <stdexcept>

#include "rsched/random.h"

namespace rsched {
namespace {

constexpr std::int64_t kWeightScale = std::int64_t{1} << 20;

Rational ratio(std::int64_t num, std::int64_t den) {
  Rational r(static_cast<long>(num), static_cast<unsigned long>(den));
  r.canonicalize();
  return r;
}

std::vector<ExactTaskSpec> exact_tasks_of(const Instance& instance) {
  if (instance.has_exact()) return instance.exact_tasks();
  std::vector<ExactTaskSpec> tasks;
  for (const TaskSpec& t : instance.tasks()) {
    auto exact = to_exact_task(t);
    if (!exact) throw InvalidInstanceError("instance has no exact representation");
    tasks.push_back(std::move(*exact));
  }
  return tasks;
}

Instance with_metadata(Instance instance, const Instance& source) {
  for (const auto& [k, v] : source.metadata()) instance.metadata().emplace(k, v);
  return instance;
}

}  // namespace

std::string to_string(FamilyTag family) {
  switch (family) {
    case FamilyTag::kDenseBase: return "dense-base";
    case FamilyTag::kSparseBase: return "sparse-base";
    case FamilyTag::kDenseLong: return "dense-long";
    case FamilyTag::kSparseLong: return "sparse-long";
  }
  return "?";
}

FamilyTag parse_family(const std::string& text) {
  for (FamilyTag f : kAllFamilies) {
    if (to_string(f) == text) return f;
  }
  throw std::invalid_argument("unknown family '" + text + "'");
}

Instance generate_instance(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 2) throw std::invalid_argument("generate_instance needs n >= 1 and m >= 2");
  Rng rng = Rng::stream(seed, StreamTag::kGenerator, 0);
  std::vector<ExactTaskSpec> tasks;
  for (TaskId id = 1; id <= n; ++id) {
    const auto x = static_cast<Slot>(rng.uniform_int(1, m));
    const auto y = static_cast<Slot>(rng.uniform_int(1, m));
    const Slot a = std::min(x, y);
    const Slot d = std::max(x, y);
    const auto u = static_cast<Slot>(rng.uniform_int(a, d));
    const auto v = static_cast<Slot>(rng.uniform_int(a, d));
    const Slot b = std::min(u, v);
    const Slot c = std::max(u, v);
    const Rational weight = ratio(rng.uniform_int(0, kWeightScale), kWeightScale);
    tasks.push_back(make_task(id, weight, ExactSlotPMF::uniform(a, b), ExactSlotPMF::uniform(c, d)));
  }
  Instance instance(m, std::move(tasks));
  instance.metadata()["generator"] = "uniform";
  instance.metadata()["seed"] = std::to_string(seed);
  return instance;
}

Instance sparsify(const Instance& instance) {
  if (instance.n() < 2) throw DegenerateInstanceError("sparsify needs at least two tasks");
  const std::size_t keep = static_cast<std::size_t>(instance.n() / 2);
  Instance result = [&] {
    if (instance.has_exact()) {
      const auto& all = instance.exact_tasks();
      return Instance(instance.m(), std::vector<ExactTaskSpec>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep)));
    }
    const auto& all = instance.tasks();
    return Instance(instance.m(), std::vector<TaskSpec>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep)));
  }();
  result = with_metadata(std::move(result), instance);
  result.metadata()["sparsify"] = "first floor(n/2)";
  return result;
}

Instance double_lengths(const Instance& instance) {
  struct Shape {
    Slot a, b, c, d;
  };
  const std::vector<ExactTaskSpec> source = exact_tasks_of(instance);
  std::vector<Shape> shapes;
  int m = instance.m();
  for (const ExactTaskSpec& t : source) {
    const Slot a = t.a(), b = t.b(), c = t.c(), d = t.d();
    const Slot gap = c - b;
    Shape s{};
    s.b = b - (gap + 1) / 2;
    s.c = c + gap / 2;
    s.a = s.b - 2 * (b - a);
    s.d = s.c + 2 * (d - c);
    if (s.a < 1) {
      const Slot shift = 1 - s.a;
      s.a += shift;
      s.b += shift;
      s.c += shift;
      s.d += shift;
    }
    m = std::max(m, s.d);
    shapes.push_back(s);
  }
  std::vector<ExactTaskSpec> tasks;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Shape& s = shapes[i];
    tasks.push_back(make_task(source[i].id, source[i].weight, ExactSlotPMF::uniform(s.a, s.b),
                              ExactSlotPMF::uniform(s.c, s.d)));
  }
  Instance result = with_metadata(Instance(m, std::move(tasks)), instance);
  result.metadata()["length_transform"] = "double: b-=ceil((c-b)/2), c+=floor((c-b)/2), uncertain x2, shift to 1";
  return result;
}

Instance make_family(const Instance& base, FamilyTag family) {
  Instance result = [&] {
    switch (family) {
      case FamilyTag::kDenseBase: return base;
      case FamilyTag::kSparseBase: return sparsify(base);
      case FamilyTag::kDenseLong: return double_lengths(base);
      case FamilyTag::kSparseLong: return sparsify(double_lengths(base));
    }
    return base;
  }();
  result.metadata()["family"] = to_string(family);
  return result;
}

Instance star_instance(std::span<const Rational> p, std::span<const Rational> w, const Rational& w0) {
  const int n = static_cast<int>(p.size());
  if (n < 1 || w.size() != p.size()) throw std::invalid_argument("star_instance needs n >= 1 leaves");
  std::vector<ExactTaskSpec> tasks;
  for (int i = 1; i <= n; ++i) {
    const Rational& pi = p[static_cast<std::size_t>(i - 1)];
    if (pi < 0 || pi > 1) throw InvalidTaskError("leaf probability outside [0, 1]");
    std::vector<ExactJointIntervalPMF::Entry> law;
    if (pi > 0) law.push_back({i, i, pi});
    if (pi < 1) law.push_back({n + i, n + i, Rational(1 - pi)});
    tasks.push_back(make_task_from_law(i, w[static_cast<std::size_t>(i - 1)], ExactJointIntervalPMF(std::move(law))));
  }
  tasks.push_back(make_task(n + 1, w0, ExactSlotPMF::point(1), ExactSlotPMF::point(n)));
  Instance instance(2 * n, std::move(tasks));
  instance.metadata()["generator"] = "star";
  return instance;
}

Instance star_instance(std::span<const double> p, std::span<const double> w, double w0) {
  std::vector<Rational> pe;
  std::vector<Rational> we;
  for (double x : p) pe.push_back(exact_from_double(x));
  for (double x : w) we.push_back(exact_from_double(x));
  return star_instance(pe, we, exact_from_double(w0));
}

StarParams random_star_params(int n, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, StreamTag::kFixture, 1);
  StarParams params;
  for (int i = 0; i < n; ++i) {
    params.p.push_back(static_cast<double>(rng.uniform_int(1, 63)) / 64.0);
    params.w.push_back(static_cast<double>(rng.uniform_int(1, 32)) / 16.0);
  }
  params.w0 = static_cast<double>(rng.uniform_int(1, 64)) / 16.0;
  return params;
}

Instance point_mass_instance(int n, int m, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, StreamTag::kFixture, 2);
  std::vector<ExactTaskSpec> tasks;
  for (TaskId id = 1; id <= n; ++id) {
    const auto x = static_cast<Slot>(rng.uniform_int(1, m));
    const auto y = static_cast<Slot>(rng.uniform_int(1, m));
    const Rational weight = ratio(rng.uniform_int(0, kWeightScale), kWeightScale);
    tasks.push_back(make_task(id, weight, ExactSlotPMF::point(std::min(x, y)), ExactSlotPMF::point(std::max(x, y))));
  }
  Instance instance(m, std::move(tasks));
  instance.metadata()["generator"] = "point-mass";
  return instance;
}

Instance single_slot_instance(int n, int m, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, StreamTag::kFixture, 3);
  std::vector<ExactTaskSpec> tasks;
  for (TaskId id = 1; id <= n; ++id) {
    const int support = static_cast<int>(rng.uniform_int(1, std::min(3, m)));
    std::vector<Slot> slots;
    while (static_cast<int>(slots.size()) < support) {
      const auto k = static_cast<Slot>(rng.uniform_int(1, m));
      if (std::find(slots.begin(), slots.end(), k) == slots.end()) slots.push_back(k);
    }
    std::vector<std::int64_t> mass;
    std::int64_t total = 0;
    for (int i = 0; i < support; ++i) {
      mass.push_back(rng.uniform_int(1, 4));
      total += mass.back();
    }
    std::vector<ExactJointIntervalPMF::Entry> law;
    for (int i = 0; i < support; ++i) {
      law.push_back({slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(i)], ratio(mass[static_cast<std::size_t>(i)], total)});
    }
    tasks.push_back(make_task_from_law(id, Rational(static_cast<long>(rng.uniform_int(1, 6))), ExactJointIntervalPMF(std::move(law))));
  }
  Instance instance(m, std::move(tasks));
  instance.metadata()["generator"] = "single-slot";
  return instance;
}

}  // namespace rsched
