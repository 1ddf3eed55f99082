#include "dstori/rotation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dstori/errors.h"

namespace dstori {

LiftPoint Lift::operator()(LiftPoint t) const {
  double v = base_->lift01(t.s);  // in [0, 2]
  double fl = std::floor(v);
  LiftPoint out;
  out.n = t.n + shift_ + static_cast<long long>(fl);
  out.s = v - fl;
  if (out.s >= 1.0) {  // guards v = nextafter(k, k+1) rounding
    out.s = 0;
    ++out.n;
  }
  return out;
}

double Lift::operator()(double t) const {
  double fl = std::floor(t);
  LiftPoint r = (*this)(LiftPoint{static_cast<long long>(fl), t - fl});
  return r.value();
}

namespace {

void bracket_step(const LiftPoint& x, long k, double& lo, double& hi) {
  double p = static_cast<double>(x.n);
  lo = std::max(lo, p / k);
  hi = std::min(hi, x.s == 0 ? p / k : (p + 1) / k);
  if (x.s == 0) lo = hi = p / k;  // exact return to an integer
}

}  // namespace

TranslationEstimate translation_number(const Lift& F, long budget, double tol) {
  if (budget < 1) throw Error(ErrorCode::DomainError, "budget must be >= 1");
  TranslationEstimate est;
  double lo = -INFINITY, hi = INFINITY;
  LiftPoint x{0, 0.0};
  for (long k = 1; k <= budget; ++k) {
    x = F(x);
    bracket_step(x, k, lo, hi);
    est.iterations = k;
    if (hi - lo <= 2 * tol) break;
  }
  est.lo = lo;
  est.hi = hi;
  est.value = (lo + hi) / 2;
  est.error_bound = (hi - lo) / 2;
  if (est.error_bound > tol)
    throw Error(ErrorCode::BudgetExceeded, "translation number not resolved within budget",
                Json{{"estimate", est.value}, {"error_bound", est.error_bound},
                     {"iterations", est.iterations}});
  return est;
}

bool cyclic_order_matches(const std::vector<double>& orbit, long p, long q) {
  if (static_cast<long>(orbit.size()) != q || q < 1)
    throw Error(ErrorCode::DomainError, "orbit length must equal q");
  if (q == 1) return true;
  std::vector<long> idx(static_cast<size_t>(q));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](long i, long j) { return orbit[i] < orbit[j]; });
  for (long k = 0; k + 1 < q; ++k)
    if (orbit[idx[k]] == orbit[idx[k + 1]])
      throw Error(ErrorCode::DuplicatePoints, "orbit points coincide");
  std::vector<long> rank(static_cast<size_t>(q));
  for (long k = 0; k < q; ++k) rank[idx[k]] = k;
  long pm = ((p % q) + q) % q;
  // rank(m) must be m p + c mod q for one constant c
  long c = rank[0];
  for (long m = 1; m < q; ++m)
    if (rank[m] != (m * pm + c) % q) return false;
  return true;
}

namespace {

// F^q(s) - s - p
double displacement(const Lift& F, double s, long p, long q) {
  LiftPoint x{0, s};
  for (long k = 0; k < q; ++k) x = F(x);
  return static_cast<double>(x.n - p) + (x.s - s);
}

}  // namespace

std::optional<RotationNumber> certify_rational(const CircleMap& m, long p, long q,
                                               const std::vector<double>& hints,
                                               double return_tol) {
  Lift F(m);
  std::vector<double> samples;
  const int grid = 256;
  for (int i = 0; i < grid; ++i) samples.push_back(static_cast<double>(i) / grid);
  for (double h : hints) samples.push_back(h - std::floor(h));
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  std::vector<double> vals;
  for (double s : samples) vals.push_back(displacement(F, s, p, q));

  std::vector<double> candidates;
  for (size_t i = 0; i < samples.size(); ++i)
    if (std::abs(vals[i]) <= return_tol) candidates.push_back(samples[i]);
  for (size_t i = 0; i < samples.size() && candidates.size() < 8; ++i) {
    size_t j = (i + 1) % samples.size();
    double a = samples[i], b = j == 0 ? samples[0] + 1 : samples[j];
    double ga = vals[i], gb = vals[j];
    if (!((ga < 0 && gb > 0) || (ga > 0 && gb < 0))) continue;
    for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
      double mid = 0.5 * (a + b);
      double gm = displacement(F, mid - std::floor(mid), p, q);
      if ((gm < 0) == (ga < 0)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    candidates.push_back(a - std::floor(a));
  }
  for (double s : candidates) {
    double err = std::abs(displacement(F, s, p, q));
    if (err > return_tol) continue;
    std::vector<double> orbit;
    double t = s;
    for (long k = 0; k < q; ++k) {
      orbit.push_back(t);
      t = m.eval(t);
    }
    try {
      if (!cyclic_order_matches(orbit, p, q)) continue;
    } catch (const Error&) {
      continue;
    }
    RotationNumber r;
    r.kind = RotationNumber::Kind::rational;
    long g = std::gcd(p, q);
    r.p = p / g;
    r.q = q / g;
    r.orbit = orbit;
    r.return_error = err;
    r.value = static_cast<double>(r.p) / static_cast<double>(r.q);
    r.value -= std::floor(r.value);
    r.lo = r.hi = static_cast<double>(p) / static_cast<double>(q);
    return r;
  }
  return std::nullopt;
}

RotationNumber rotation_number(const CircleMap& m, const RotationOptions& opt) {
  Lift F(m);
  double lo = -INFINITY, hi = INFINITY;
  LiftPoint x{0, 0.0};
  std::vector<double> tail;  // recent orbit points as certificate hints
  long k = 0;
  long next_check = 64;
  auto finish_estimate = [&](bool budget_ok) {
    RotationNumber r;
    r.kind = RotationNumber::Kind::estimate;
    r.lo = lo;
    r.hi = hi;
    r.value = (lo + hi) / 2;
    r.error_bound = (hi - lo) / 2;
    r.iterations = k;
    if (!budget_ok)
      throw Error(ErrorCode::BudgetExceeded, "rotation number not resolved within budget",
                  Json{{"estimate", r.value - std::floor(r.value)},
                       {"error_bound", r.error_bound},
                       {"iterations", k}});
    r.value -= std::floor(r.value);
    return r;
  };
  while (k < opt.budget) {
    x = F(x);
    ++k;
    bracket_step(x, k, lo, hi);
    if (static_cast<long>(tail.size()) >= 2 * opt.q_max) tail.erase(tail.begin());
    tail.push_back(x.s);
    bool last = k == opt.budget || hi - lo <= 2 * opt.tol;
    if (k == next_check || last) {
      next_check *= 2;
      // rationals p/q (q <= q_max) still inside the bracket
      std::vector<std::pair<long, long>> cands;
      for (long q = 1; q <= opt.q_max && cands.size() <= 6; ++q) {
        long p0 = static_cast<long>(std::ceil(lo * q - 1e-12));
        long p1 = static_cast<long>(std::floor(hi * q + 1e-12));
        for (long p = p0; p <= p1; ++p)
          if (std::gcd(p, q) == 1) cands.emplace_back(p, q);
      }
      if (!cands.empty() && cands.size() <= 6) {
        for (auto [p, q] : cands) {
          auto r = certify_rational(m, p, q, tail, opt.return_tol);
          if (r) {
            r->iterations = k;
            r->lo = lo;
            r->hi = hi;
            return *r;
          }
        }
      }
      if (lo == hi) {
        // exact integer return of 0 without a combinatorial certificate
        // (e.g. endomorphisms): report as an exact estimate
        return finish_estimate(true);
      }
    }
    if (hi - lo <= 2 * opt.tol) return finish_estimate(true);
  }
  return finish_estimate(false);
}

std::optional<std::pair<long, long>> orbit_cyclic_order(const CircleMap& m, double s0, int q_max,
                                                        double return_tol) {
  Lift F(m);
  s0 -= std::floor(s0);
  LiftPoint x{0, s0};
  std::vector<double> orbit = {s0};
  for (int q = 1; q <= q_max; ++q) {
    x = F(x);
    double d = x.s - s0;
    double circ = std::min(std::abs(d), 1 - std::abs(d));
    if (circ <= return_tol) {
      long p = std::lround(x.value() - s0);
      try {
        if (cyclic_order_matches(orbit, p, q)) {
          long pm = ((p % q) + q) % q;
          long g = std::gcd(pm, static_cast<long>(q));
          return std::make_pair(pm / g, static_cast<long>(q) / g);
        }
      } catch (const Error&) {
      }
      return std::nullopt;
    }
    orbit.push_back(x.s);
  }
  return std::nullopt;
}

Json RotationNumber::to_json() const {
  Json j;
  if (kind == Kind::rational) {
    j["kind"] = "rational";
    j["p"] = p;
    j["q"] = q;
    j["orbit"] = orbit;
    j["return_error"] = return_error;
  } else {
    j["kind"] = "estimate";
  }
  j["value"] = value;
  j["error_bound"] = error_bound;
  j["bracket"] = {json_double(lo), json_double(hi)};
  j["iterations"] = iterations;
  return j;
}

HomologyRay asymptotic_cycle(const RotationNumber& u, long n,
                             const std::pair<std::string, std::string>& basis_labels) {
  HomologyRay r;
  r.first_label = basis_labels.first;
  r.second_label = basis_labels.second;
  r.first = 1;
  if (u.is_rational()) {
    long q = u.q, p = ((u.p % q) + q) % q;
    r.rational = true;
    r.first_int = q;
    r.second_int = p + static_cast<long long>(n) * q;
    r.second = static_cast<double>(r.second_int) / static_cast<double>(q);
  } else {
    r.second = u.value + static_cast<double>(n);
    r.slope_error = u.error_bound;
  }
  return r;
}

Json HomologyRay::to_json() const {
  Json j{{"basis", {first_label, second_label}},
         {"coefficients", {first, second}},
         {"rational", rational}};
  if (rational) j["integer_class"] = {first_int, second_int};
  else j["slope_error"] = slope_error;
  return j;
}

}  // namespace dstori
