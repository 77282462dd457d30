#include "dynprice/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "dynprice/errors.hpp"

namespace dynprice::numeric {

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    double tol;
    int max_depth;
};

double simpson_step(const SimpsonState& st, double a, double b, double fa, double fm,
                    double fb, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= st.max_depth || std::abs(delta) <= 15.0 * st.tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(st, a, m, fa, flm, fm, left, depth + 1) +
           simpson_step(st, m, b, fm, frm, fb, right, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -adaptive_simpson(f, b, a, rel_tol, abs_tol, max_depth);

    // Coarse 9-point composite Simpson estimate sets the relative scale.
    constexpr int n = 8;
    const double h = (b - a) / n;
    double coarse = f(a) + f(b);
    for (int i = 1; i < n; ++i) coarse += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    coarse *= h / 3.0;

    const double tol = std::max(abs_tol, rel_tol * std::abs(coarse));
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    SimpsonState st{f, tol, max_depth};
    return simpson_step(st, a, b, fa, fm, fb, whole, 0);
}

BisectResult bisect(const std::function<double(double)>& f, double lo, double hi,
                    double x_tol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0, true};
    if (fhi == 0.0) return {hi, 0, true};
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw DomainError("bisect: root not bracketed");
    }
    for (int it = 1; it <= max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0 || 0.5 * std::abs(hi - lo) <= x_tol) return {mid, it, true};
        if (std::signbit(fmid) == std::signbit(flo)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), max_iter, false};
}

}  // namespace dynprice::numeric
