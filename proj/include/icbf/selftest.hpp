#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace icbf::selftest {

struct SuiteResult {
  std::string name;
  long cases = 0;
  long failures = 0;
  double worst = 0.0;  // largest error seen, in the suite's own measure
  std::string first_failure;

  bool passed() const { return failures == 0 && cases > 0; }
};

struct Options {
  long single = 10000;
  long pairs = 10000;
  long antiparallel = 1000;
  long compat = 10000;  // includes `antiparallel` exact constructions
  long gradient_points = 1000;
  std::uint64_t seed = 0x1cbf5eedULL;
};

// solve_single against the dual line search (and the interval answer for m = 1).
SuiteResult qp_single(const Options& opt);
// solve_two against the two-multiplier dual search on random pairs, and
// against the exact interval answer on anti-parallel constructions.
SuiteResult qp_pairs(const Options& opt);
SuiteResult qp_antiparallel(const Options& opt);
// check_compatibility versus solve_two feasibility.
SuiteResult compatibility(const Options& opt);
// Prediction error against a fine-step reference, and its decay when dt halves.
SuiteResult predictor_accuracy(const Options& opt);
// Analytic ACC barrier and controller gradients against five-point differences.
SuiteResult gradients(const Options& opt);

std::vector<SuiteResult> run_all(const Options& opt);

// One line per suite; returns true when all pass.
bool report(std::ostream& out, const std::vector<SuiteResult>& results);

}  // namespace icbf::selftest
