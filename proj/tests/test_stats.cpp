#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "arn/stats/stats.hpp"

using namespace arn::stats;

namespace {

// Independent upper-tail oracle for chi-square with one degree of freedom:
// Q(x) = regularized upper incomplete gamma(1/2, x/2), evaluated by the
// series / continued-fraction split (Numerical-Recipes-style).
double chi2_1_upper_tail(double x) {
    const double a = 0.5, half = x / 2.0;
    if (half <= 0.0) return 1.0;
    auto gamma_p_series = [&](double v) {  // lower regularized P(a, v)
        double sum = 1.0 / a, term = sum, ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= v / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-v + a * std::log(v) - std::lgamma(a));
    };
    auto gamma_q_cf = [&](double v) {  // upper regularized Q(a, v)
        double b = v + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
        for (int i = 1; i <= 500; ++i) {
            double an = -i * (i - a);
            b += 2.0;
            d = an * d + b;
            if (std::abs(d) < 1e-300) d = 1e-300;
            c = b + an / c;
            if (std::abs(c) < 1e-300) c = 1e-300;
            d = 1.0 / d;
            double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) break;
        }
        return std::exp(-v + a * std::log(v) - std::lgamma(a)) * h;
    };
    return half < a + 1.0 ? 1.0 - gamma_p_series(half) : gamma_q_cf(half);
}

// Exact two-sided signed-rank p by explicit enumeration of all 2^n sign
// assignments (test-local brute force; fine for n <= 16).
double wilcoxon_brute_force(const std::vector<double>& diffs) {
    std::vector<double> mags;
    for (double d : diffs)
        if (d != 0.0) mags.push_back(std::abs(d));
    int n = static_cast<int>(mags.size());
    if (n == 0) return 1.0;
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    auto rank_of = [&](double m) {
        double lo = std::lower_bound(sorted.begin(), sorted.end(), m) - sorted.begin() + 1;
        double hi = std::upper_bound(sorted.begin(), sorted.end(), m) - sorted.begin();
        return (lo + hi) / 2.0;  // average rank under ties
    };
    double wminus = 0.0, total = 0.0;
    for (double d : diffs)
        if (d < 0.0) wminus += rank_of(std::abs(d));
    for (double m : sorted) total += rank_of(m);
    double wplus = total - wminus;
    double w = std::min(wminus, wplus);

    long leq = 0;
    for (long mask = 0; mask < (1L << n); ++mask) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1L << i)) s += rank_of(mags[i]);
        if (s <= w + 1e-12) ++leq;
    }
    return std::min(1.0, 2.0 * static_cast<double>(leq) / std::pow(2.0, n));
}

}  // namespace

TEST_CASE("mcnemar against the chi-square oracle") {
    auto r = mcnemar(10, 2);
    CHECK(r.chi2 == doctest::Approx(49.0 / 12.0).epsilon(1e-14));
    CHECK(r.p == doctest::Approx(chi2_1_upper_tail(49.0 / 12.0)).epsilon(1e-10));
    CHECK(r.p == doctest::Approx(0.0433).epsilon(0.01));

    auto r2 = mcnemar(5, 5);
    CHECK(r2.chi2 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(r2.p == doctest::Approx(chi2_1_upper_tail(0.1)).epsilon(1e-10));
    CHECK(r2.p == doctest::Approx(0.752).epsilon(0.01));

    CHECK(mcnemar(0, 0).p == 1.0);
    // the continuity correction zeroes the statistic at |b - c| = 1
    CHECK(mcnemar(4, 5).chi2 == 0.0);
    CHECK(mcnemar(4, 5).p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(mcnemar(-1, 3));
}

TEST_CASE("mcnemar is symmetric in the discordant counts") {
    for (auto [b, c] : {std::pair{10L, 2L}, {3L, 17L}, {0L, 9L}}) {
        auto ab = mcnemar(b, c), ba = mcnemar(c, b);
        CHECK(ab.chi2 == ba.chi2);
        CHECK(ab.p == ba.p);
    }
}

TEST_CASE("wilcoxon frozen examples") {
    auto r = wilcoxon_signed_rank({1.0, -2.0, 3.0, 4.0});
    CHECK(r.n == 4);
    CHECK(r.w_minus == 2.0);
    CHECK(r.exact);
    CHECK(r.p == doctest::Approx(0.375).epsilon(1e-12));

    // all-positive differences, n = 10
    std::vector<double> pos;
    for (int i = 1; i <= 10; ++i) pos.push_back(0.5 * i);
    auto r2 = wilcoxon_signed_rank(pos);
    CHECK(r2.w_minus == 0.0);
    CHECK(r2.p == doctest::Approx(2.0 / 1024.0).epsilon(1e-12));

    // perfectly symmetric pair
    auto r3 = wilcoxon_signed_rank({0.7, -0.7});
    CHECK(r3.p == doctest::Approx(1.0).epsilon(1e-12));

    // all-zero differences
    CHECK(wilcoxon_signed_rank({0.0, 0.0}).p == 1.0);
    CHECK(wilcoxon_signed_rank({0.0, 0.0}).n == 0);
}

TEST_CASE("wilcoxon exact branch equals brute-force enumeration") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> size(3, 12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> diffs(size(rng));
        for (auto& d : diffs) d = u(rng);
        if (trial % 3 == 0 && diffs.size() > 2) diffs[1] = -diffs[0];  // force tied magnitudes
        CAPTURE(trial);
        auto r = wilcoxon_signed_rank(diffs);
        CHECK(r.exact);
        CHECK(r.p == doctest::Approx(wilcoxon_brute_force(diffs)).epsilon(1e-10));
    }
}

TEST_CASE("wilcoxon exact branch agrees with the normal approximation at n = 25") {
    // test-local normal oracle: continuity-corrected z on min(W-, W+)
    auto normal_p = [](const WilcoxonResult& r) {
        double n = r.n;
        double mean = n * (n + 1.0) / 4.0;
        double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
        double z = (std::min(r.w_minus, r.w_plus) - mean + 0.5) / std::sqrt(var);
        return std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
    };
    std::mt19937_64 rng(34);
    std::normal_distribution<double> g(0.3, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> diffs(25);
        for (auto& v : diffs) v = g(rng);
        auto exact = wilcoxon_signed_rank(diffs);
        CHECK(exact.exact);
        CHECK(std::abs(exact.p - normal_p(exact)) < 0.01);
    }
}

TEST_CASE("p-values live in [0, 1] and flip-symmetry holds") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + trial;
        std::vector<double> diffs(n), neg(n);
        for (int i = 0; i < n; ++i) {
            diffs[i] = u(rng);
            neg[i] = -diffs[i];
        }
        auto a = wilcoxon_signed_rank(diffs);
        auto b = wilcoxon_signed_rank(neg);
        CHECK(a.p >= 0.0);
        CHECK(a.p <= 1.0);
        CHECK(a.p == doctest::Approx(b.p).epsilon(1e-12));
        CHECK(a.w_minus == b.w_plus);
    }
}
