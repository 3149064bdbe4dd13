#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "fixtures.h"
#include "rsched/gen.h"
#include "rsched/instance_io.h"

using namespace rsched;

TEST(Generator, SpanLawIsUniformPairOrderStatistic) {
  const int m = 12;
  std::vector<long> counts(static_cast<std::size_t>(m * m), 0);
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    const Instance inst = generate_instance(50, m, seed);
    for (const TaskSpec& t : inst.tasks()) {
      ++counts[static_cast<std::size_t>((t.a() - 1) * m + (t.d() - 1))];
    }
  }
  std::vector<long> observed;
  std::vector<double> probs;
  for (int a = 1; a <= m; ++a) {
    for (int d = a; d <= m; ++d) {
      observed.push_back(counts[static_cast<std::size_t>((a - 1) * m + (d - 1))]);
      probs.push_back((a == d ? 1.0 : 2.0) / (m * m));
    }
  }
  const int dof = static_cast<int>(observed.size()) - 1;
  EXPECT_LT(rsched::testing::chi2_statistic(observed, probs), rsched::testing::chi2_critical(dof));
}

TEST(Generator, ShapeWeightsAndMetadata) {
  const Instance inst = generate_instance(20, 15, 9);
  EXPECT_EQ(inst.n(), 20);
  EXPECT_EQ(inst.m(), 15);
  ASSERT_TRUE(inst.has_exact());
  EXPECT_TRUE(inst.all_product_laws());
  for (const ExactTaskSpec& t : inst.exact_tasks()) {
    EXPECT_GE(t.weight, 0);
    EXPECT_LE(t.weight, 1);
    const Rational scaled = t.weight * (1 << 20);
    EXPECT_EQ(scaled.get_den(), 1);
    EXPECT_LE(t.b(), t.c());
    EXPECT_EQ(t.start, ExactSlotPMF::uniform(t.a(), t.b()));
    EXPECT_EQ(t.end, ExactSlotPMF::uniform(t.c(), t.d()));
  }
  EXPECT_EQ(inst.metadata().at("generator"), "uniform");
  EXPECT_EQ(inst.metadata().at("seed"), "9");
  EXPECT_EQ(generate_instance(20, 15, 9), inst);
  EXPECT_FALSE(generate_instance(20, 15, 10) == inst);
  EXPECT_THROW(generate_instance(0, 5, 1), std::invalid_argument);
}

TEST(Families, SparsifyKeepsFirstHalf) {
  const Instance base = generate_instance(9, 14, 3);
  const Instance sparse = sparsify(base);
  ASSERT_EQ(sparse.n(), 4);
  for (TaskId i = 1; i <= 4; ++i) EXPECT_EQ(sparse.task(i), base.task(i));
  EXPECT_EQ(sparse.metadata().count("sparsify"), 1u);
}

TEST(Families, DoubleLengthsExample) {
  const Instance base(6, std::vector<ExactTaskSpec>{
                             make_task(1, Rational(1), ExactSlotPMF::uniform(2, 3), ExactSlotPMF::uniform(5, 6))});
  const Instance longer = double_lengths(base);
  const TaskSpec& t = longer.task(1);
  EXPECT_EQ(t.a(), 1);
  EXPECT_EQ(t.b(), 3);
  EXPECT_EQ(t.c(), 7);
  EXPECT_EQ(t.d(), 9);
  EXPECT_EQ(longer.m(), 9);
}

TEST(Families, DoubleLengthsDoublesUncertainParts) {
  const Instance base = generate_instance(30, 20, 5);
  const Instance longer = double_lengths(base);
  for (TaskId i = 1; i <= base.n(); ++i) {
    const TaskSpec& s = base.task(i);
    const TaskSpec& t = longer.task(i);
    EXPECT_EQ(t.b() - t.a(), 2 * (s.b() - s.a()));
    EXPECT_EQ(t.d() - t.c(), 2 * (s.d() - s.c()));
    EXPECT_EQ(t.c() - t.b(), 2 * (s.c() - s.b()));
    EXPECT_GE(t.a(), 1);
    EXPECT_LE(t.d(), longer.m());
  }
}

TEST(Families, MakeFamilyTagsEachVariant) {
  const Instance base = generate_instance(8, 12, 1);
  for (FamilyTag f : kAllFamilies) {
    const Instance inst = make_family(base, f);
    EXPECT_EQ(inst.metadata().at("family"), to_string(f));
    EXPECT_EQ(parse_family(to_string(f)), f);
  }
  EXPECT_EQ(make_family(base, FamilyTag::kSparseLong).n(), 4);
  EXPECT_THROW(parse_family("medium"), std::invalid_argument);
}

TEST(Fixtures, StarInstanceShape) {
  const std::vector<double> p{0.25, 0.5, 1.0};
  const std::vector<double> w{1.0, 2.0, 3.0};
  const Instance star = star_instance(p, w, 4.0);
  EXPECT_EQ(star.n(), 4);
  EXPECT_EQ(star.m(), 6);
  EXPECT_EQ(star.task(1).law, JointIntervalPMF({{1, 1, 0.25}, {4, 4, 0.75}}));
  EXPECT_EQ(star.task(3).law, JointIntervalPMF({{3, 3, 1.0}}));
  EXPECT_EQ(star.task(4).law, JointIntervalPMF({{1, 3, 1.0}}));
  EXPECT_EQ(star.task(4).weight, 4.0);
  EXPECT_TRUE(star.has_exact());
}

TEST(Fixtures, PointMassAndSingleSlot) {
  const Instance pm = point_mass_instance(10, 12, 4);
  for (const TaskSpec& t : pm.tasks()) EXPECT_EQ(t.law.size(), 1u);
  const Instance ss = single_slot_instance(10, 12, 4);
  ASSERT_TRUE(ss.has_exact());
  for (const TaskSpec& t : ss.tasks()) {
    EXPECT_LE(t.law.size(), 3u);
    for (const auto& e : t.law.entries()) EXPECT_EQ(e.start, e.end);
    EXPECT_EQ(t.weight, std::floor(t.weight));
  }
}

TEST(Json, RoundTripExact) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = make_family(generate_instance(8, 12, seed), kAllFamilies[seed % 4]);
    const Instance back = instance_from_json(instance_to_json(inst));
    EXPECT_TRUE(back.has_exact());
    EXPECT_EQ(back, inst);
    EXPECT_EQ(back.exact_tasks(), inst.exact_tasks());
    EXPECT_EQ(back.metadata(), inst.metadata());
  }
}

TEST(Json, RoundTripExplicitLawAndFloat) {
  const Instance ss = single_slot_instance(5, 8, 2);
  EXPECT_EQ(instance_from_json(instance_to_json(ss)), ss);
  const auto law = nlohmann::json::parse(instance_to_json(ss));
  EXPECT_TRUE(law["tasks"][0].contains("joint"));

  const Instance thirds(4, std::vector<TaskSpec>{make_task(1, 0.7, SlotPMF::uniform(1, 3), SlotPMF::point(3))});
  const Instance back = instance_from_json(instance_to_json(thirds));
  EXPECT_FALSE(back.has_exact());
  EXPECT_EQ(back, thirds);
}

TEST(Json, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "rsched_test_instance.json";
  const Instance inst = generate_instance(6, 10, 12);
  save_instance(inst, path);
  EXPECT_EQ(load_instance(path), inst);
  std::filesystem::remove(path);
  EXPECT_THROW(load_instance(path), Error);
}

TEST(Json, RejectsMalformedInput) {
  EXPECT_THROW(instance_from_json("{"), ParseError);
  EXPECT_THROW(instance_from_json(R"({"m": 3})"), ParseError);
  auto doc = nlohmann::json::parse(instance_to_json(*rsched::testing::example1()));
  doc["tasks"][1]["start"]["probs"][0] = "1/3";
  EXPECT_THROW(instance_from_json(doc.dump()), Error);
  doc["tasks"][1]["start"]["probs"][0] = "x/3";
  EXPECT_THROW(instance_from_json(doc.dump()), ParseError);
}
