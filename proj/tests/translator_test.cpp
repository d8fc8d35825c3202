#include "hydraplan/translator.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace hydraplan;
using namespace hydraplan::test;

namespace {

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

std::string zeno_text(int n = 10) {
  auto p = bundled("zeno");
  return emit_casp_text(translate(p.th, p.inst, n));
}

bool contains_rule(const std::string& program, const std::string& rule) {
  return squash(program).find(squash(rule)) != std::string::npos;
}

std::size_t count_lines_with(const std::string& program, const std::string& needle) {
  std::size_t n = 0;
  std::istringstream in(program);
  for (std::string line; std::getline(in, line);)
    if (line.find(needle) != std::string::npos) ++n;
  return n;
}

const char* kSwitch = "fluent f : bool.\naction a : agent.\na causes f.\n";

}  // namespace

TEST(Translator, GoldenZenoProgram) {
  EXPECT_EQ(zeno_text(), slurp(source_dir() / "domains" / "zeno.n10.casp"));
}

TEST(Translator, EmissionIsDeterministic) { EXPECT_EQ(zeno_text(), zeno_text()); }

TEST(Translator, RefuelRules) {
  std::string prog = zeno_text();
  EXPECT_TRUE(contains_rule(prog, "#const n=10."));
  EXPECT_TRUE(contains_rule(prog, "step(0..n)."));
  EXPECT_TRUE(contains_rule(prog, "#domain step(I;I1)."));
  EXPECT_TRUE(contains_rule(prog, "required(f_initial(I1)==f_final(I)) :- occurs(start_refueling,I), I1 = I+1."));
  EXPECT_TRUE(contains_rule(prog, "required(f_time(I1)==end(I)) :- occurs(start_refueling,I), I1 = I+1."));
  EXPECT_TRUE(contains_rule(prog, "v(true,refueling,I+1) :- occurs(start_refueling,I)."));
  EXPECT_TRUE(contains_rule(prog, "required(f_final(I)==max(750,f_initial(I) + 20*(end(I)-f_time(I)) )) :- v(true,refueling,I)."));
}

TEST(Translator, FuelTriggerBlock) {
  std::string prog = zeno_text();
  EXPECT_TRUE(contains_rule(prog, "1{p(I), q(I)}1 :- v(true,refueling,I)."));
  EXPECT_TRUE(contains_rule(prog, "required(end(I) == (750-f_initial(I))/20 + f_time(I) ) :- p(I)."));
  EXPECT_TRUE(contains_rule(prog, "required(end(I) < (750-f_initial(I))/20 + f_time(I) ) :- q(I)."));
  EXPECT_TRUE(contains_rule(prog, "occurs(end_refueling,I) :- v(true,refueling,I), p(I)."));
}

TEST(Translator, BoardingTriggerRootIsThirtyMinutesOn) {
  std::string prog = zeno_text();
  EXPECT_TRUE(contains_rule(prog, "required(end(I) == (tb_initial(scott,a,I)-0)/1 + tb_time(scott,a,I) ) :- p(end_boarding(scott,a),I).") ||
              contains_rule(prog, "required(end(I) == tb_initial(scott,a,I) + tb_time(scott,a,I) ) :- p(end_boarding(scott,a),I)."))
      << "boarding root not found";
}

TEST(Translator, GoalBlock) {
  std::string prog = zeno_text();
  EXPECT_TRUE(contains_rule(prog, "goal(I) :- v(d,location(scott),I), v(d,location(ernie),I), required(start(I)<330)."));
  EXPECT_TRUE(contains_rule(prog, "1{g(I),ng(I)}1."));
  EXPECT_TRUE(contains_rule(prog, "required(start(I)<330) :- g(I)."));
  EXPECT_TRUE(contains_rule(prog, "required(start(I) >=330) :- ng(I)."));
  EXPECT_TRUE(contains_rule(prog, "success :- goal(I)."));
  EXPECT_TRUE(contains_rule(prog, ":- not success."));
}

TEST(Translator, SingleDeadlineRule) {
  std::string prog = zeno_text();
  EXPECT_EQ(count_lines_with(prog, "required(end(I)< 330 )"), 1u);
  EXPECT_TRUE(contains_rule(prog, "required(end(I)< 330 ) :- occurs(A,I), action(A)."));
}

TEST(Translator, DeclaredVariableRanges) {
  std::string prog = zeno_text();
  for (const char* decl : {"cspvar(f_time(3),0,400).", "cspvar(f_initial(3),0,750).", "cspvar(f_final(3),0,750).",
                           "cspvar(end(0),0,400)."})
    EXPECT_EQ(count_lines_with(prog, decl), 1u) << decl;
}

TEST(Translator, VariableAccounting) {
  auto p = bundled("zeno");
  for (int n : {1, 4, 10}) {
    auto prog = translate(p.th, p.inst, n);
    std::string text = emit_casp_text(prog);
    std::size_t processes = prog.processes.size();
    EXPECT_EQ(prog.cspvars.size(), 3 * processes + 2);
    EXPECT_EQ(count_lines_with(text, "cspvar("), prog.cspvars.size() * static_cast<std::size_t>(n + 1));
  }
}

TEST(Translator, OnePairPerTriggerPerStep) {
  auto p = bundled("zeno");
  auto prog = translate(p.th, p.inst, 10);
  std::set<std::string> keys;
  for (const auto& t : prog.triggers) EXPECT_TRUE(keys.insert(t.atom("p", "I")).second) << t.source;
  EXPECT_EQ(count_lines_with(emit_casp_text(prog), "1{p("), prog.triggers.size());
  EXPECT_LE(prog.triggers.size(), p.th.triggers.size());
}

TEST(Translator, OnlyInitiatingActionsAreGenerated) {
  auto p = bundled("zeno");
  auto prog = translate(p.th, p.inst, 10);
  for (const auto& a : prog.generated) {
    EXPECT_TRUE(is_agent_action(p.th.signature, a)) << a.str();
    EXPECT_FALSE(p.th.triggered(a)) << a.str();
  }
  EXPECT_TRUE(std::find(prog.generated.begin(), prog.generated.end(), act("start_refueling")) != prog.generated.end());
}

TEST(Translator, NoTriggersNoPq) {
  auto p = load(kSwitch, "init -f.\ngoal f.\nhorizon 1.\n");
  std::string text = emit_casp_text(translate(p.th, p.inst, 1));
  EXPECT_EQ(text.find(":- p(I)"), std::string::npos);
  EXPECT_EQ(text.find(":- q(I)"), std::string::npos);
  EXPECT_EQ(text.find("1{p"), std::string::npos);
  EXPECT_TRUE(contains_rule(text, "goal(I) :- v(true,f,I)."));
  EXPECT_EQ(text.find("g(I),ng(I)"), std::string::npos);
}

TEST(Translator, TwoLiteralGoalAtBoundHundred) {
  auto p = load("fluent f : bool.\nfluent g : bool.\naction a : agent.\na causes f.\na causes g.\n",
                "init -f.\ninit -g.\ngoal f, g before 100.\nhorizon 2.\n");
  std::string text = emit_casp_text(translate(p.th, p.inst, 2));
  EXPECT_TRUE(contains_rule(text, "goal(I) :- v(true,f,I), v(true,g,I), required(start(I)<100)."));
}

TEST(Translator, HorizonMustBePositive) {
  auto p = load(kSwitch, "init -f.\ngoal f.\n");
  EXPECT_THROW(translate(p.th, p.inst, 0), Error);
}

TEST(Translator, EmptyProgramIsHeaderOnly) {
  std::string text = emit_casp_text(CaspProgram{});
  EXPECT_EQ(text, "#const n=0.\nstep(0..n).\n#domain step(I;I1).\n");
}

TEST(Translator, QuadraticProcessIsUnsupported) {
  auto p = bundled("brick");
  try {
    translate(p.th, p.inst, 2);
    FAIL() << "expected an unsupported-fragment error";
  } catch (const UnsupportedFragmentError& e) {
    EXPECT_NE(std::string(e.what()).find("height(b)"), std::string::npos) << e.what();
  }
}

TEST(Translator, TriggerOnConstantProcessIsRejected) {
  auto p = load(R"(fluent on : bool.
process x : [0, 10] via x_initial, x_time, x_final.
action a : agent.
action b : exogenous.
a causes on.
a causes x = 5 if end = T0.
x(end) = 0, on triggers b.
)",
                "init -on.\ninit x = 5.\ngoal on.\n");
  EXPECT_THROW(translate(p.th, p.inst, 2), UnsupportedFragmentError);
}
