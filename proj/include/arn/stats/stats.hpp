#pragma once

#include <vector>

namespace arn::stats {

struct McNemarResult {
    double chi2 = 0.0;
    double p = 1.0;
};

// Continuity-corrected McNemar test on the discordant pair counts b and c.
// With b + c = 0 the test is undefined and p is reported as 1.
McNemarResult mcnemar(long b, long c);

struct WilcoxonResult {
    double w_minus = 0.0;  // rank sum of negative differences
    double w_plus = 0.0;
    int n = 0;             // non-zero differences
    double p = 1.0;        // two-sided
    bool exact = false;    // exact enumeration (n <= 25) vs normal approx
};

// Two-sided Wilcoxon signed-rank test on paired differences. Zeros are
// dropped, ties get average ranks. For n <= 25 the p-value comes from the
// exact sign-flip distribution of the observed ranks; above that, from the
// normal approximation with tie correction and continuity correction.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs);

}  // namespace arn::stats
