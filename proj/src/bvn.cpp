#include "ppdcpp/bvn.hpp"

#include <algorithm>
#include <cmath>

#include "ppdcpp/dists.hpp"
#include "ppdcpp/errors.hpp"

namespace ppdcpp::stats {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;
constexpr double kDegenerateEps = 1e-12;

// Gauss-Legendre rules used by the Genz scheme: 6, 12 and 20 points,
// stored as half-rules (weights symmetric about 0).
constexpr double kW6[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double kX6[3] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
constexpr double kW12[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                            0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
constexpr double kX12[6] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                            0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
constexpr double kW20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                             0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                             0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                             0.1527533871307259};
constexpr double kX20[10] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                             0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                             0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                             0.07652652113349733};

}  // namespace

void SymmetricBvnSpec::validate() const {
  if (!std::isfinite(mean_delta) || !std::isfinite(var) || !std::isfinite(cov)) {
    throw ValidationError("bivariate spec has non-finite entries");
  }
  if (!(var > 0.0)) throw ValidationError("bivariate spec requires var > 0");
  if (std::fabs(cov) > var) {
    throw ValidationError("bivariate spec requires |cov| <= var");
  }
}

// Genz (2004) rewrite of Drezner-Wesolowsky. phi2 accuracy ~5e-16.
double bvn_upper(double dh, double dk, double r) {
  double h = dh, k = dk, hk = h * k, bvn = 0.0;
  const double* w;
  const double* x;
  int lg;
  const double ar = std::fabs(r);
  if (ar < 0.3) {
    lg = 3;
    w = kW6;
    x = kX6;
  } else if (ar < 0.75) {
    lg = 6;
    w = kW12;
    x = kX12;
  } else {
    lg = 10;
    w = kW20;
    x = kX20;
  }
  if (ar < 0.925) {
    if (ar > 0.0) {
      const double hs = 0.5 * (h * h + k * k);
      const double asr = std::asin(r);
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * x[i] + 1.0) * 0.5);
          bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn *= asr / (2.0 * kTwoPi);
    }
    bvn += norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (ar < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -0.5 * (bs / as + hk);
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
      }
      if (-hk < 100.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a *= 0.5;
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double xs = a * (is * x[i] + 1.0);
          const double xs2 = xs * xs;
          const double rs = std::sqrt(1.0 - xs2);
          asr = -0.5 * (bs / xs2 + hk);
          if (asr > -100.0) {
            bvn += a * w[i] * std::exp(asr) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                    (1.0 + c * xs2 * (1.0 + d * xs2)));
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

double orthant_double(const SymmetricBvnSpec& spec) {
  spec.validate();
  const double sd = std::sqrt(spec.var);
  const double d = spec.mean_delta / sd;
  const double rho = spec.cov / spec.var;
  if (rho >= 1.0 - kDegenerateEps) {
    // U = V almost surely: the two orthant events partition the line.
    return 1.0;
  }
  if (rho <= -1.0 + kDegenerateEps) {
    // V = 2*delta - U: the joint events collapse to one-sided intervals.
    return std::fabs(2.0 * norm_cdf(d) - 1.0);
  }
  const double p = bvn_upper(-d, -d, rho) + bvn_upper(d, d, rho);
  return std::clamp(p, 0.0, 1.0);
}

namespace {

struct BvnDensity {
  double rho;
  double norm;    // 1 / (2 pi sqrt(1-rho^2))
  double inv_q;   // 1 / (2 (1-rho^2))
  explicit BvnDensity(double r)
      : rho(r),
        norm(1.0 / (kTwoPi * std::sqrt(1.0 - r * r))),
        inv_q(1.0 / (2.0 * (1.0 - r * r))) {}
  double operator()(double x, double y) const {
    return norm * std::exp(-(x * x - 2.0 * rho * x * y + y * y) * inv_q);
  }
};

double simpson(double lo, double hi, double flo, double fmid, double fhi) {
  return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

template <class F>
double adaptive_step(const F& f, double lo, double hi, double flo, double fmid, double fhi,
                     double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lmid = 0.5 * (lo + mid);
  const double rmid = 0.5 * (mid + hi);
  const double flmid = f(lmid);
  const double frmid = f(rmid);
  const double left = simpson(lo, mid, flo, flmid, fmid);
  const double right = simpson(mid, hi, fmid, frmid, fhi);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw NumericError("quadrature oracle: recursion budget exhausted");
  }
  if (std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, lo, mid, flo, flmid, fmid, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, mid, hi, fmid, frmid, fhi, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double lo, double hi, double tol, int depth = 48) {
  const double mid = 0.5 * (lo + hi);
  const double flo = f(lo);
  const double fmid = f(mid);
  const double fhi = f(hi);
  const double whole = simpson(lo, hi, flo, fmid, fhi);
  return adaptive_step(f, lo, hi, flo, fmid, fhi, whole, tol, depth);
}

// P(X >= a, Y >= a) for correlation rho, by iterated integration of the raw
// joint density over the truncated box [a, hi]^2.
double box_upper(double a, double rho, double abs_tol) {
  const BvnDensity dens(rho);
  const double hi = std::max(a, 0.0) + 9.0;  // tail mass beyond is < 1e-18
  if (hi <= a) return 0.0;
  const double inner_tol = abs_tol / (20.0 * (hi - a));
  auto outer = [&](double xv) {
    auto inner = [&](double yv) { return dens(xv, yv); };
    return adaptive_simpson(inner, a, hi, inner_tol);
  };
  return adaptive_simpson(outer, a, hi, 0.5 * abs_tol);
}

}  // namespace

double orthant_quadrature_oracle(const SymmetricBvnSpec& spec, double abs_tol) {
  spec.validate();
  if (std::fabs(spec.cov) >= spec.var) {
    throw ValidationError("quadrature oracle requires |cov| < var");
  }
  if (!(abs_tol > 0.0)) throw ValidationError("quadrature oracle requires abs_tol > 0");
  const double sd = std::sqrt(spec.var);
  const double d = spec.mean_delta / sd;
  const double rho = spec.cov / spec.var;
  // Both orthants as upper boxes: (U,V) <= 0 maps to (-U,-V) >= 0.
  return box_upper(-d, rho, 0.5 * abs_tol) + box_upper(d, rho, 0.5 * abs_tol);
}

}  // namespace ppdcpp::stats
