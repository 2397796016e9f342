#include "mpctune/opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace mpctune::opt {

namespace {

Eigen::VectorXd clamp_to(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

Result nelder_mead_max(const Objective& f, const Eigen::VectorXd& x0,
                       const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, int max_evals,
                       double step_frac) {
  const int n = static_cast<int>(x0.size());
  const double inf = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : -inf;
  };

  // Initial simplex: x0 plus one shifted vertex per coordinate, nudged
  // inward when the shift would leave the box.
  std::vector<Eigen::VectorXd> verts;
  std::vector<double> vals;
  verts.push_back(clamp_to(x0, lower, upper));
  vals.push_back(eval(verts[0]));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = verts[0];
    double h = step_frac * (upper[i] - lower[i]);
    if (h <= 0) h = std::max(1e-8, 0.1 * std::abs(v[i]));
    if (v[i] + h > upper[i]) h = -h;
    v[i] += h;
    verts.push_back(clamp_to(v, lower, upper));
    vals.push_back(eval(verts.back()));
  }

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  auto order = [&] {
    std::vector<int> idx(verts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[a] > vals[b]; });
    std::vector<Eigen::VectorXd> vs(verts.size());
    std::vector<double> fs(vals.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      vs[k] = verts[idx[k]];
      fs[k] = vals[idx[k]];
    }
    verts.swap(vs);
    vals.swap(fs);
  };

  order();
  while (evals < max_evals) {
    // Centroid of all but the worst vertex.
    Eigen::VectorXd cen = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) cen += verts[k];
    cen /= n;
    const int w = n;  // worst index after ordering

    Eigen::VectorXd xr = clamp_to(cen + alpha * (cen - verts[w]), lower, upper);
    const double fr = eval(xr);
    if (fr > vals[0]) {
      Eigen::VectorXd xe = clamp_to(cen + gamma * (xr - cen), lower, upper);
      const double fe = eval(xe);
      if (fe > fr) {
        verts[w] = xe;
        vals[w] = fe;
      } else {
        verts[w] = xr;
        vals[w] = fr;
      }
    } else if (fr > vals[w - 1]) {
      verts[w] = xr;
      vals[w] = fr;
    } else {
      Eigen::VectorXd xc = clamp_to(cen + rho * (verts[w] - cen), lower, upper);
      const double fc = eval(xc);
      if (fc > vals[w]) {
        verts[w] = xc;
        vals[w] = fc;
      } else {
        for (int k = 1; k <= n; ++k) {
          verts[k] = clamp_to(verts[0] + sigma * (verts[k] - verts[0]), lower,
                              upper);
          vals[k] = eval(verts[k]);
          if (evals >= max_evals) break;
        }
      }
    }
    order();

    double spread = 0.0;
    for (int k = 1; k <= n; ++k)
      spread = std::max(spread, (verts[k] - verts[0]).cwiseAbs().maxCoeff());
    if (spread < 1e-11 && std::isfinite(vals[0])) break;
  }

  Result r;
  r.x = verts[0];
  r.value = vals[0];
  r.evals = evals;
  return r;
}

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, int iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace mpctune::opt
