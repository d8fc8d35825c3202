#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hydraplan;
using namespace hydraplan::test;

namespace {

class Zeno : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    problem_ = new Problem(bundled("zeno"));
    trajectory_ = new Trajectory(build_trajectory(problem_->th, problem_->inst, reference_plan()));
  }
  static void TearDownTestSuite() {
    delete trajectory_;
    delete problem_;
  }
  const Theory& th() const { return problem_->th; }
  const Instance& inst() const { return problem_->inst; }
  // states()[k] ends when step k of the reference plan happens
  const std::vector<State>& states() const { return trajectory_->states; }

  static inline Problem* problem_ = nullptr;
  static inline Trajectory* trajectory_ = nullptr;
};

State with(State s, const Term& term, Value v) {
  for (auto it = s.atoms.begin(); it != s.atoms.end();)
    if (it->term == term) it = s.atoms.erase(it);
    else ++it;
  s.atoms.insert(Atom{term, std::move(v)});
  return s;
}

State ending(State s, Rational end) {
  s.end = std::move(end);
  return s;
}

const Trigger& trigger_for(const Theory& th, const std::string& action) {
  for (const auto& r : th.triggers)
    if (r.action.name == action) return r;
  throw std::runtime_error("no trigger for " + action);
}

}  // namespace

TEST_F(Zeno, ReferenceTrajectoryBuilds) {
  ASSERT_TRUE(trajectory_->verdict) << trajectory_->verdict.str();
  ASSERT_EQ(states().size(), 11u);
  EXPECT_EQ(states()[0].start, TimeValue(0));
  EXPECT_EQ(states()[0].end, TimeValue(5));
  EXPECT_TRUE(states()[10].end.is_omega());
}

TEST_F(Zeno, CnZEmptyIsIdentity) {
  AtomSet s = states()[3].atoms;
  EXPECT_EQ(cn_z(s, {}, th().signature), s);
}

TEST_F(Zeno, CnZPlacesPassengersWithThePlane) {
  AtomSet s{{Term{"location", {"plane"}}, std::string("c")}, {Term{"on_board", {"ernie"}}, std::string("true")}};
  AtomSet out = cn_z(s, th().constraints, th().signature);
  EXPECT_TRUE(out.count(Atom{Term{"location", {"ernie"}}, std::string("c")}));
  EXPECT_EQ(out.size(), 3u);
}

TEST_F(Zeno, CnZContradictionIsReported) {
  AtomSet s{{Term{"location", {"plane"}}, std::string("c")},
            {Term{"on_board", {"ernie"}}, std::string("true")},
            {Term{"location", {"ernie"}}, std::string("a")}};
  EXPECT_THROW(cn_z(s, th().constraints, th().signature), ContradictionError);
}

TEST(CnZ, ChainedConstraintsMatchBruteForce) {
  auto p = load(R"(fluent a : bool.
fluent b : bool.
fluent c : bool.
fluent d : bool.
b if a.
c if b.
-d if c, a.
)",
                "");
  for (int mask = 0; mask < 16; ++mask) {
    AtomSet s;
    const char* names[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i)
      if (mask & (1 << i)) s.insert(Atom{Term{names[i], {}}, std::string("true")});
    // naive fixpoint over the three rules
    AtomSet expect = s;
    auto has = [&](const char* n, const char* v) { return expect.count(Atom{Term{n, {}}, std::string(v)}) > 0; };
    for (bool changed = true; changed;) {
      changed = false;
      auto add = [&](const char* n, const char* v) { changed = expect.insert(Atom{Term{n, {}}, std::string(v)}).second || changed; };
      if (has("a", "true")) add("b", "true");
      if (has("b", "true")) add("c", "true");
      if (has("c", "true") && has("a", "true")) add("d", "false");
    }
    if (!is_consistent(expect)) {
      EXPECT_THROW(cn_z(s, p.th.constraints, p.th.signature), ContradictionError);
      continue;
    }
    EXPECT_EQ(cn_z(s, p.th.constraints, p.th.signature), expect) << mask;
  }
}

TEST_F(Zeno, FuelTriggerFiresAtFullTank) {
  const Trigger& r = trigger_for(th(), "end_refueling");
  const State& s = states()[6];
  EXPECT_EQ(s.end, TimeValue(q(1345, 6)));
  EXPECT_TRUE(satisfies_trigger(s, r));
  EXPECT_FALSE(satisfies_trigger(ending(s, 220), r));
  EXPECT_FALSE(satisfies_trigger(with(s, Term{"refueling", {}}, std::string("false")), r));
}

TEST_F(Zeno, TriggerClosure) {
  EXPECT_TRUE(closed_under_triggers(states()[6], th()));
  EXPECT_FALSE(closed_under_triggers(ending(states()[6], 230), th()));
  EXPECT_TRUE(closed_under_triggers(states()[0], th()));
}

TEST_F(Zeno, TriggerClosureIsMonotoneInEnd) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> step(1, 600);
  for (int k : {3, 6, 7, 9}) {
    const State& s = states()[k];
    auto violation = trigger_closure_violation(ending(s, s.end.value() + 1), th());
    ASSERT_TRUE(violation) << k;
    Rational t2 = s.end.value() + 1;
    for (int i = 0; i < 50; ++i) {
      Rational t3 = t2 + q(step(rng), 7);
      EXPECT_FALSE(closed_under_triggers(ending(s, t3), th())) << k << " " << to_string(t3);
    }
  }
}

TEST_F(Zeno, IsState) {
  EXPECT_TRUE(is_state(states()[0], th()));
  State bad = with(states()[4], Term{"on_board", {"ernie"}}, std::string("true"));
  bad = with(bad, Term{"location", {"ernie"}}, std::string("a"));
  Verdict v = is_state(bad, th());
  EXPECT_FALSE(v);
  EXPECT_EQ(v.rule, Rule::constraint_closure) << v.str();
  State inverted = states()[0];
  inverted.start = 10;
  inverted.end = 5;
  EXPECT_EQ(is_state(inverted, th()).rule, Rule::interval);
  State missing = states()[0];
  missing.atoms.erase(missing.atoms.begin());
  EXPECT_EQ(is_state(missing, th()).rule, Rule::valuation);
}

TEST_F(Zeno, ActionPossible) {
  const State& at_c = states()[4];
  ASSERT_EQ(*value_of(at_c, "location", {"plane"}), Value(std::string("c")));
  EXPECT_EQ(eval_process(std::get<ClampedLinear>(*value_of(at_c, "fuel_level")), 195), q(500, 3));
  EXPECT_FALSE(action_possible(at_c, {act("start_flying", {"c", "d", "600"})}, th()));
  EXPECT_FALSE(action_possible(states()[5], {act("start_refueling")}, th()));
  EXPECT_TRUE(action_possible(states()[0], {act("start_boarding", {"scott", "a"})}, th()));
}

TEST_F(Zeno, DirectEffects) {
  AtomSet e = direct_effects(states()[1], {act("end_boarding", {"scott", "a"})}, th());
  EXPECT_TRUE(e.count(Atom{Term{"boarding", {"scott", "a"}}, std::string("false")}));
  EXPECT_TRUE(e.count(Atom{Term{"on_board", {"scott"}}, std::string("true")}));

  AtomSet r = direct_effects(states()[4], {act("start_refueling")}, th());
  EXPECT_TRUE(r.count(Atom{Term{"refueling", {}}, std::string("true")}));
  const Value* fuel = lookup(r, Term{"fuel_level", {}});
  ASSERT_NE(fuel, nullptr);
  const auto& f = std::get<ClampedLinear>(*fuel);
  EXPECT_EQ(f.base, q(500, 3));
  EXPECT_EQ(f.anchor, 195);
  EXPECT_EQ(f.rate, 20);
  EXPECT_EQ(f.ceiling, Rational(750));

}

TEST(DirectEffects, NoLawBodyHolds) {
  auto p = load("fluent f : bool.\nfluent g : bool.\naction a : agent.\na causes f if g.\n", "init -f.\ninit -g.\n");
  State s;
  s.end = 1;
  s.atoms = initial_atoms(p.th, p.inst);
  EXPECT_TRUE(direct_effects(s, {act("a")}, p.th).empty());
}

TEST_F(Zeno, ActionComplete) {
  const State& flight = states()[3];
  EXPECT_EQ(flight.end, TimeValue(190));
  EXPECT_TRUE(action_complete(flight, {act("end_flying", {"a", "c"})}, th()));
  EXPECT_FALSE(action_complete(flight, {}, th()));
  EXPECT_TRUE(action_complete(states()[0], {act("start_refueling")}, th()));
}

TEST_F(Zeno, IsTransition) {
  CompoundAction fly{act("start_flying", {"a", "c", "400"})};
  EXPECT_TRUE(is_transition(states()[2], fly, states()[3], th()));
  State wrong = with(states()[3], Term{"refueling", {}}, std::string("true"));
  Verdict v = is_transition(states()[2], fly, wrong, th());
  EXPECT_FALSE(v);
  EXPECT_EQ(v.rule, Rule::fixpoint) << v.str();
  Verdict late = is_transition(states()[2], fly, ending(states()[3], 200), th());
  EXPECT_EQ(late.rule, Rule::trigger_closure) << late.str();
}

TEST_F(Zeno, EveryReferenceTransitionPasses) {
  auto plan = reference_plan();
  for (std::size_t k = 0; k < plan.size(); ++k)
    EXPECT_TRUE(is_transition(states()[k], plan[k].actions, states()[k + 1], th())) << k;
}

TEST_F(Zeno, SuccessorIsUniqueAmongDiscreteVariants) {
  auto plan = reference_plan();
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const State& target = states()[k + 1];
    int passing = 0;
    for (const auto& atom : target.atoms) {
      const auto* sym = std::get_if<std::string>(&atom.value);
      if (!sym) continue;
      const FluentDecl* fd = th().signature.fluent(atom.term.name);
      for (const auto& other : th().signature.values_of(*fd)) {
        if (other == *sym) continue;
        if (is_transition(states()[k], plan[k].actions, with(target, atom.term, other), th())) ++passing;
      }
    }
    EXPECT_EQ(passing, 0) << "step " << k;
  }
}

TEST_F(Zeno, InertiaForUntouchedFluents) {
  std::set<std::string> derived;
  for (const auto& c : th().constraints) derived.insert(c.head.term().str());
  auto plan = reference_plan();
  for (std::size_t k = 0; k < plan.size(); ++k) {
    std::set<std::string> touched;
    for (const auto& law : th().laws)
      if (contains(plan[k].actions, law.action)) touched.insert(law.head.term().str());
    for (const auto& atom : states()[k].atoms) {
      std::string t = atom.term.str();
      if (touched.count(t) || derived.count(t)) continue;
      const Value* after = lookup(states()[k + 1].atoms, atom.term);
      ASSERT_NE(after, nullptr);
      EXPECT_TRUE(compare_values(*after, atom.value) == 0) << t << " at step " << k;
    }
  }
}

TEST_F(Zeno, CnZIsAClosureOnVisitedStates) {
  std::mt19937 rng(5);
  for (const auto& s : states()) {
    std::vector<Atom> atoms(s.atoms.begin(), s.atoms.end());
    for (int trial = 0; trial < 20; ++trial) {
      AtomSet small, large;
      for (const auto& a : atoms) {
        int r = static_cast<int>(rng() % 3);
        if (r == 0) small.insert(a);
        if (r <= 1) large.insert(a);
      }
      AtomSet c = cn_z(small, th().constraints, th().signature, s.start, s.end);
      EXPECT_TRUE(std::includes(c.begin(), c.end(), small.begin(), small.end()));
      EXPECT_EQ(cn_z(c, th().constraints, th().signature, s.start, s.end), c);
      AtomSet cl = cn_z(large, th().constraints, th().signature, s.start, s.end);
      EXPECT_TRUE(std::includes(cl.begin(), cl.end(), c.begin(), c.end()));
    }
  }
}

TEST_F(Zeno, ReferencePlanValidates) {
  Trajectory t;
  Verdict v = validate_trajectory(th(), inst(), reference_plan(), &t);
  ASSERT_TRUE(v) << v.str();
  EXPECT_EQ(t.goal_state, 10);
  EXPECT_EQ(t.states[10].start, TimeValue(329));
}

TEST_F(Zeno, PlanWithoutRefuelFailsOnFuel) {
  TimedPlan plan;
  for (auto& st : reference_plan())
    if (st.actions[0].name != "start_refueling" && st.actions[0].name != "end_refueling") plan.push_back(st);
  Verdict v = validate_trajectory(th(), inst(), plan);
  EXPECT_FALSE(v);
  EXPECT_EQ(v.rule, Rule::executability) << v.str();
  ASSERT_GE(v.step, 0);
  EXPECT_EQ(plan[static_cast<std::size_t>(v.step)].actions[0], act("start_flying", {"c", "d", "600"}));
  EXPECT_NE(v.witness.find("X < 1000 / 2"), std::string::npos) << v.witness;
}

TEST_F(Zeno, EmptyPlanMissesGoal) {
  Verdict v = validate_trajectory(th(), inst(), {});
  EXPECT_FALSE(v);
  EXPECT_EQ(v.rule, Rule::goal);
}

TEST_F(Zeno, TamperedRefuelEndIsRejectedAtStepSix) {
  auto plan = reference_plan();
  plan[6].time = 220;
  Verdict v = validate_trajectory(th(), inst(), plan);
  EXPECT_FALSE(v);
  EXPECT_EQ(v.step, 6) << v.str();
  EXPECT_TRUE(v.rule == Rule::action_completeness || v.rule == Rule::trigger_closure) << v.str();
}

TEST_F(Zeno, BoardingTakesThirtyMinutes) {
  std::mt19937 rng(9);
  for (int i = 0; i < 20; ++i) {
    Rational t = q(static_cast<long long>(rng() % 3000), 10);
    TimedPlan plan{{t, {act("start_boarding", {"scott", "a"})}}, {t + 30, {act("end_boarding", {"scott", "a"})}}};
    Instance free = inst();
    free.goal.clear();
    free.goal_before.reset();
    EXPECT_TRUE(validate_trajectory(th(), free, plan)) << to_string(t);
    plan[1].time = t + 29;
    EXPECT_FALSE(validate_trajectory(th(), free, plan));
  }
}
