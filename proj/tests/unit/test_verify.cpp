#include <gtest/gtest.h>

#include "sgdlab/oracles.hpp"
#include "sgdlab/verify.hpp"

namespace {

using namespace sgdlab;

TEST(Verify, SuiteNames) {
  for (const Suite s : {Suite::kLemmas, Suite::kClosedForm, Suite::kConjugation, Suite::kEnvelopes, Suite::kAll}) {
    EXPECT_EQ(parse_suite(to_string(s)), s);
  }
  EXPECT_EQ(parse_suite("closed-form"), Suite::kClosedForm);
  EXPECT_THROW(parse_suite("everything"), std::invalid_argument);
}

TEST(Verify, AllSuitesPassWithShippedCalibration) {
  const CalibrationTable cal = load_calibration(SGDLAB_CALIBRATION_PATH);
  VerifyOptions opt;
  opt.calibration = &cal;
  const VerifyReport r = run_verify(Suite::kAll, opt);
  EXPECT_TRUE(r.all_passed()) << r.to_text();
  EXPECT_EQ(r.failures(), 0u);
  bool seen[4] = {};
  for (const CheckResult& c : r.checks) {
    seen[0] |= c.suite == "lemmas";
    seen[1] |= c.suite == "closed-form";
    seen[2] |= c.suite == "conjugation";
    seen[3] |= c.suite == "envelopes";
  }
  for (const bool s : seen) EXPECT_TRUE(s);
}

TEST(Verify, PassesAcrossSeeds) {
  for (const std::uint64_t seed : {1u, 99u, 31337u}) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.closed_form_instances = 200;
    opt.conjugation_rotations = 20;
    const VerifyReport r = run_verify(Suite::kAll, opt);
    EXPECT_TRUE(r.all_passed()) << seed << "\n" << r.to_text();
  }
}

TEST(Verify, BrokenMomentFormulaIsCaught) {
  VerifyOptions opt;
  opt.hooks.perm_moment_formula = [](std::size_t m, std::size_t n) {
    const Rational good = perm_moment_formula(m, n);
    return Rational(-good.num(), good.den());
  };
  const VerifyReport r = run_verify(Suite::kLemmas, opt);
  EXPECT_FALSE(r.all_passed());
  EXPECT_GT(r.failures(), 0u);
  EXPECT_NE(r.to_text().find("FAIL"), std::string::npos);
}

TEST(Verify, TightenedCalibrationIsCaught) {
  CalibrationTable cal = load_calibration(SGDLAB_CALIBRATION_PATH);
  CalibratedConstant c = *cal.find(calibration_names::kKeyup);
  c.value *= 0.5;
  cal.set(c);
  VerifyOptions opt;
  opt.calibration = &cal;
  EXPECT_FALSE(run_verify(Suite::kEnvelopes, opt).all_passed());
}

TEST(Verify, ReportText) {
  VerifyReport r;
  r.checks.push_back({"lemmas", "x", true, 1.0, 2.0, ""});
  r.checks.push_back({"lemmas", "y", false, 3.0, 2.0, "too big"});
  EXPECT_EQ(r.failures(), 1u);
  const std::string t = r.to_text();
  EXPECT_NE(t.find("PASS lemmas/x"), std::string::npos);
  EXPECT_NE(t.find("FAIL lemmas/y"), std::string::npos);
}

}  // namespace
