#include <gtest/gtest.h>

#include "fixtures.h"
#include "rsched/core.h"
#include "rsched/rational.h"

using namespace rsched;
using rsched::testing::example1;

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-4"), Rational(-4));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("1.5e-3"), Rational(3, 2000));
  EXPECT_EQ(parse_rational("2E2"), Rational(200));
  EXPECT_EQ(parse_rational("010/3"), Rational(10, 3));
  EXPECT_EQ(parse_rational("0.0625"), Rational(1, 16));
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
}

TEST(Rational, FormatsAndConvertsDoublesExactly) {
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(Rational(5)), "5");
  EXPECT_EQ(exact_from_double(0.375), Rational(3, 8));
  EXPECT_EQ(exact_from_double(0.1).get_d(), 0.1);
  EXPECT_NE(exact_from_double(0.1), Rational(1, 10));
}

TEST(SlotPMF, ValidatesInput) {
  EXPECT_THROW(SlotPMF({{1, 0.5}, {2, 0.4}}), InvalidTaskError);
  EXPECT_THROW(SlotPMF({{0, 1.0}}), InvalidTaskError);
  EXPECT_THROW(SlotPMF({{1, 0.5}, {1, 0.5}}), InvalidTaskError);
  EXPECT_THROW(SlotPMF({{1, 1.5}, {2, -0.5}}), InvalidTaskError);
  EXPECT_THROW(ExactSlotPMF({{1, Rational(1, 3)}, {2, Rational(1, 3)}}), InvalidTaskError);
  const SlotPMF pmf({{3, 0.25}, {1, 0.75}, {2, 0.0}});
  ASSERT_EQ(pmf.size(), 2u);
  EXPECT_EQ(pmf.min_slot(), 1);
  EXPECT_EQ(pmf.max_slot(), 3);
  EXPECT_EQ(pmf.prob(2), 0.0);
}

TEST(JointFromMarginals, PointMasses) {
  const auto j = joint_from_marginals(ExactSlotPMF::point(1), ExactSlotPMF::point(2));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j.prob(1, 2), 1);
}

TEST(JointFromMarginals, ExampleTaskTwo) {
  const auto j = joint_from_marginals(ExactSlotPMF::uniform(2, 3), ExactSlotPMF::point(3));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j.prob(2, 3), Rational(1, 2));
  EXPECT_EQ(j.prob(3, 3), Rational(1, 2));
}

TEST(JointFromMarginals, ProductOfUniforms) {
  const auto j = joint_from_marginals(ExactSlotPMF::uniform(1, 2), ExactSlotPMF::uniform(3, 4));
  ASSERT_EQ(j.size(), 4u);
  for (const auto& e : j.entries()) EXPECT_EQ(e.prob, Rational(1, 4));
}

TEST(JointFromMarginals, RejectsStartAfterEnd) {
  EXPECT_THROW(joint_from_marginals(SlotPMF::uniform(2, 4), SlotPMF::uniform(3, 5)), InvalidTaskError);
}

TEST(Occupancy, DeterministicRow) {
  const Instance inst(3, std::vector<TaskSpec>{rsched::testing::interval_task(1, 1.0, 1, 2)});
  const auto occ = occupancy_profile(inst);
  EXPECT_EQ(occ.occ(1, 1), 1.0);
  EXPECT_EQ(occ.occ(1, 2), 1.0);
  EXPECT_EQ(occ.occ(1, 3), 0.0);
}

TEST(Occupancy, ExampleTaskTwo) {
  const auto occ = occupancy_profile(*example1());
  EXPECT_EQ(occ.occ(2, 1), 0.0);
  EXPECT_DOUBLE_EQ(occ.occ(2, 2), 0.5);
  EXPECT_EQ(occ.occ(2, 3), 1.0);
  EXPECT_DOUBLE_EQ(occ.start(2, 2), 0.5);
  EXPECT_EQ(occ.end(2, 3), 1.0);
}

TEST(Occupancy, CertainSegmentAndRowSums) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = generate_instance(6, 15, seed);
    const auto occ = occupancy_profile(inst);
    for (const TaskSpec& t : inst.tasks()) {
      double row = 0.0;
      for (Slot k = 1; k <= inst.m(); ++k) {
        row += occ.occ(t.id, k);
        if (k >= t.b() && k <= t.c()) {
          EXPECT_EQ(occ.occ(t.id, k), 1.0);
        }
        // Independent check against the joint law.
        EXPECT_NEAR(occ.occ(t.id, k), occupancy_row(t.law, inst.m())[static_cast<std::size_t>(k - 1)], 1e-12);
      }
      EXPECT_NEAR(row, expected_length(t.law), 1e-9);
    }
  }
}

TEST(Conflict, Examples) {
  const auto ex = example1();
  const auto& t2 = ex->task(2);
  EXPECT_DOUBLE_EQ(conflict_probability(t2.law, 1, 2), 0.5);
  const JointIntervalPMF far({{5, 6, 1.0}});
  EXPECT_EQ(conflict_probability(far, 1, 2), 0.0);
  EXPECT_EQ(conflict_probability(t2.law, 3, 3), 1.0);
}

TEST(Conflict, ComplementsAvoidExactly) {
  const auto ex = example1();
  const auto& law = ex->exact_tasks()[1].law;
  for (Slot lo = 1; lo <= 3; ++lo) {
    for (Slot hi = lo; hi <= 3; ++hi) {
      EXPECT_EQ(conflict_probability(law, lo, hi) + avoid_probability(law, lo, hi), 1);
    }
  }
}

TEST(Condition, ExampleTaskTwoAvoidingTaskOne) {
  SlotSet occupied(3);
  occupied.insert(1, 2);
  const auto ex = example1();
  const auto cond = condition_on_avoid(ex->exact_tasks()[1].law, occupied);
  ASSERT_TRUE(cond.has_value());
  ASSERT_EQ(cond->size(), 1u);
  EXPECT_EQ(cond->prob(3, 3), 1);
}

TEST(Condition, EmptySetLeavesLawAndFullConflictSignalsEmpty) {
  const auto ex = example1();
  const auto& law = ex->task(2).law;
  EXPECT_EQ(*condition_on_avoid(law, SlotSet(3)), law);
  const JointIntervalPMF one({{1, 2, 1.0}});
  SlotSet two(3);
  two.insert(2);
  EXPECT_FALSE(condition_on_avoid(one, two).has_value());
}

TEST(Condition, IdempotentAndComposes) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = generate_instance(4, 12, seed);
    Rng rng = Rng::stream(seed, StreamTag::kFixture, 7);
    for (const TaskSpec& t : inst.tasks()) {
      SlotSet o1(12);
      SlotSet o2(12);
      o1.insert(static_cast<Slot>(rng.uniform_int(1, 12)));
      o2.insert(static_cast<Slot>(rng.uniform_int(1, 12)));
      SlotSet both = o1;
      for (Slot k : o2.slots()) both.insert(k);
      const auto once = condition_on_avoid(t.law, o1);
      if (!once) continue;
      const auto twice = condition_on_avoid(*once, o1);
      ASSERT_TRUE(twice.has_value());
      EXPECT_EQ(*twice, *once);
      const auto seq = condition_on_avoid(*once, o2);
      const auto joint = condition_on_avoid(t.law, both);
      ASSERT_EQ(seq.has_value(), joint.has_value());
      if (!seq) continue;
      ASSERT_EQ(seq->size(), joint->size());
      for (std::size_t i = 0; i < seq->size(); ++i) {
        EXPECT_EQ(seq->entries()[i].start, joint->entries()[i].start);
        EXPECT_NEAR(seq->entries()[i].prob, joint->entries()[i].prob, 1e-12);
      }
    }
  }
}

TEST(Marginals, RecoverProductFactors) {
  const auto law = joint_from_marginals(ExactSlotPMF({{1, Rational(1, 3)}, {2, Rational(2, 3)}}),
                                        ExactSlotPMF({{2, Rational(1, 5)}, {4, Rational(4, 5)}}));
  const auto [s, e] = marginals(law);
  EXPECT_EQ(s.prob(2), Rational(2, 3));
  EXPECT_EQ(e.prob(4), Rational(4, 5));
}

TEST(Instance, ValidatesIdsAndSupport) {
  using rsched::testing::interval_task;
  EXPECT_THROW(Instance(3, std::vector<TaskSpec>{interval_task(2, 1.0, 1, 1)}), InvalidInstanceError);
  EXPECT_THROW(Instance(3, std::vector<TaskSpec>{interval_task(1, 1.0, 1, 4)}), InvalidInstanceError);
  EXPECT_THROW(Instance(3, std::vector<TaskSpec>{interval_task(1, 1.0, 1, 1), interval_task(1, 1.0, 2, 2)}),
               InvalidInstanceError);
  EXPECT_THROW(interval_task(1, -1.0, 1, 1), InvalidTaskError);
  const Instance empty(3, std::vector<TaskSpec>{});
  EXPECT_EQ(empty.n(), 0);
}

TEST(Instance, KeepsExactCopyWhenSumsAreExact) {
  const auto ex = example1();
  EXPECT_TRUE(ex->has_exact());
  const Instance dyadic(4, std::vector<TaskSpec>{make_task(1, 0.5, SlotPMF({{1, 0.25}, {2, 0.75}}), SlotPMF::point(3))});
  EXPECT_TRUE(dyadic.has_exact());
  const Instance thirds(4, std::vector<TaskSpec>{make_task(1, 1.0, SlotPMF::uniform(1, 3), SlotPMF::point(3))});
  EXPECT_FALSE(thirds.has_exact());
  EXPECT_THROW(thirds.exact_tasks(), InvalidInstanceError);
}

TEST(Instance, ExplicitLawTasksAllowStartAfterEarliestEnd) {
  const auto task = make_task_from_law(1, 1.0, JointIntervalPMF({{1, 1, 0.5}, {4, 4, 0.5}}));
  const Instance inst(4, std::vector<TaskSpec>{task});
  EXPECT_FALSE(inst.all_product_laws());
  EXPECT_EQ(task.a(), 1);
  EXPECT_EQ(task.b(), 4);
  EXPECT_EQ(task.c(), 1);
  EXPECT_EQ(task.d(), 4);
  const SlotSet fp = footprint(task, 4);
  EXPECT_EQ(fp.slots(), (std::vector<Slot>{1, 4}));
  const auto occ = occupancy_profile(inst);
  EXPECT_EQ(occ.occ(1, 2), 0.0);
  EXPECT_EQ(occ.occ(1, 4), 0.5);
}

TEST(Footprint, ProductTaskCoversItsSpan) {
  const TaskSpec t = make_task(1, 1.0, SlotPMF({{2, 0.5}, {4, 0.5}}), SlotPMF({{5, 0.5}, {8, 0.5}}));
  EXPECT_EQ(footprint(t, 9).slots(), (std::vector<Slot>{2, 3, 4, 5, 6, 7, 8}));
}

TEST(SlotSet, Basics) {
  SlotSet s(70);
  s.insert(3, 5);
  s.insert(66);
  EXPECT_TRUE(s.contains(4));
  EXPECT_FALSE(s.contains(6));
  EXPECT_TRUE(s.intersects(5, 9));
  EXPECT_FALSE(s.intersects(6, 65));
  EXPECT_EQ(s.slots(), (std::vector<Slot>{3, 4, 5, 66}));
  EXPECT_EQ(SlotSet::from_mask(0b1010, 4).slots(), (std::vector<Slot>{2, 4}));
}
