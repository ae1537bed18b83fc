#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "arn/stats/stats.hpp"

namespace arn::stats {

McNemarResult mcnemar(long b, long c) {
    if (b < 0 || c < 0) throw std::invalid_argument("mcnemar: negative count");
    McNemarResult r;
    if (b + c == 0) return r;
    double d = std::abs(static_cast<double>(b - c)) - 1.0;
    r.chi2 = d * d / static_cast<double>(b + c);
    // upper tail of chi-square with 1 dof
    r.p = std::erfc(std::sqrt(r.chi2 / 2.0));
    return r;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
    WilcoxonResult res;
    struct Entry {
        double mag;
        bool positive;
    };
    std::vector<Entry> e;
    for (double d : diffs)
        if (d != 0.0) e.push_back({std::abs(d), d > 0.0});
    res.n = static_cast<int>(e.size());
    if (res.n == 0) return res;

    std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.mag < b.mag; });
    // average ranks, doubled so tied ranks stay integral
    std::vector<long> rank2(e.size());
    std::vector<long> tie_sizes;
    for (size_t i = 0; i < e.size();) {
        size_t j = i;
        while (j < e.size() && e[j].mag == e[i].mag) ++j;
        long r2 = static_cast<long>(i + 1 + j);  // 2 * average of ranks i+1 .. j
        for (size_t k = i; k < j; ++k) rank2[k] = r2;
        tie_sizes.push_back(static_cast<long>(j - i));
        i = j;
    }

    long wplus2 = 0, wminus2 = 0;
    for (size_t i = 0; i < e.size(); ++i) (e[i].positive ? wplus2 : wminus2) += rank2[i];
    res.w_plus = wplus2 / 2.0;
    res.w_minus = wminus2 / 2.0;

    if (res.n <= 25) {
        res.exact = true;
        // subset-sum counts over the doubled ranks: dp[s] = number of sign
        // assignments whose positive-rank sum (doubled) equals s
        long total2 = wplus2 + wminus2;
        std::vector<double> dp(total2 + 1, 0.0);
        dp[0] = 1.0;
        for (long r2 : rank2)
            for (long s = total2; s >= r2; --s) dp[s] += dp[s - r2];
        long w2 = std::min(wplus2, wminus2);
        double cum = 0.0;
        for (long s = 0; s <= w2; ++s) cum += dp[s];
        res.p = std::min(1.0, 2.0 * cum / std::pow(2.0, res.n));
    } else {
        double n = res.n;
        double mean = n * (n + 1.0) / 4.0;
        double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
        for (long t : tie_sizes)
            var -= static_cast<double>(t * t * t - t) / 48.0;  // tie correction
        double w = std::min(res.w_plus, res.w_minus);
        double z = (w - mean + 0.5) / std::sqrt(var);  // continuity correction
        res.p = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));  // 2 * lower tail
    }
    return res;
}

}  // namespace arn::stats
