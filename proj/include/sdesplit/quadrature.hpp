#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace sdesplit {

// Adaptive Simpson quadrature on [a, b]. The interval is pre-split into
// `panels` equal pieces so narrow peaks are not missed by the first probe.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-9, int panels = 64, int max_depth = 40) {
  if (!(b > a)) return 0.0;
  struct Simpson {
    const std::function<double(double)>& f;
    int max_depth;
    double recurse(double lo, double hi, double flo, double fmid, double fhi, double whole,
                   double tol, int depth) const {
      const double mid = (lo + hi) / 2.0;
      const double lmid = (lo + mid) / 2.0;
      const double rmid = (mid + hi) / 2.0;
      const double fl = f(lmid);
      const double fr = f(rmid);
      const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
      const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
      if (depth >= max_depth || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return recurse(lo, mid, flo, fl, fmid, left, tol / 2.0, depth + 1) +
             recurse(mid, hi, fmid, fr, fhi, right, tol / 2.0, depth + 1);
    }
  };
  const Simpson s{f, max_depth};
  double total = 0.0;
  const double w = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * w;
    const double hi = i + 1 == panels ? b : lo + w;
    const double mid = (lo + hi) / 2.0;
    const double flo = f(lo);
    const double fmid = f(mid);
    const double fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += s.recurse(lo, hi, flo, fmid, fhi, whole, tol / panels, 0);
  }
  return total;
}

}  // namespace sdesplit
