#include "lexmarket/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace lexmarket {

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  std::string t = s;
  // mpq_class accepts "p/q" directly but tolerates some junk; validate first.
  auto is_int = [](const std::string& v) {
    if (v.empty()) return false;
    std::size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i == v.size()) return false;
    for (; i < v.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
    return true;
  };
  auto slash = t.find('/');
  if (slash == std::string::npos) {
    if (!is_int(t)) throw std::invalid_argument("bad rational literal: " + s);
  } else {
    std::string num = t.substr(0, slash), den = t.substr(slash + 1);
    if (!is_int(num) || !is_int(den))
      throw std::invalid_argument("bad rational literal: " + s);
  }
  Rat r;
  if (r.set_str(t, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

double rat_to_double(const Rat& r) { return r.get_d(); }

Rat rationalize(double v, std::uint64_t max_den) {
  if (!std::isfinite(v)) throw std::invalid_argument("rationalize: non-finite value");
  if (max_den == 0) throw std::invalid_argument("rationalize: zero denominator cap");
  bool neg = v < 0;
  double x = neg ? -v : v;
  if (x >= 1e18) throw std::invalid_argument("rationalize: value too large");

  const mpz_class cap(std::to_string(max_den));
  // Continued-fraction convergents h_n/k_n; the best approximation with
  // k <= cap is the last in-cap convergent or a semiconvergent off it.
  mpz_class h2 = 0, k2 = 1;  // h_{n-2}/k_{n-2}
  mpz_class h1 = 1, k1 = 0;  // h_{n-1}/k_{n-1}
  mpz_class best_p = 0, best_q = 1;
  double best_err = x;
  auto consider = [&](const mpz_class& p, const mpz_class& q) {
    if (q <= 0 || q > cap) return;
    double val = mpz_get_d(p.get_mpz_t()) / mpz_get_d(q.get_mpz_t());
    double err = std::fabs(x - val);
    if (err < best_err) {
      best_p = p;
      best_q = q;
      best_err = err;
    }
  };
  double xi = x;
  for (int it = 0; it < 64; ++it) {
    double fa = std::floor(xi);
    mpz_class a(std::to_string(static_cast<long long>(fa)));
    mpz_class h = a * h1 + h2, k = a * k1 + k2;
    if (k > cap) {
      // Best semiconvergent between the last two convergents.
      if (k1 > 0) {
        mpz_class t = (cap - k2) / k1;
        if (t > 0) consider(h2 + t * h1, k2 + t * k1);
      }
      break;
    }
    consider(h, k);
    h2 = h1;
    k2 = k1;
    h1 = h;
    k1 = k;
    double frac = xi - fa;
    if (frac < 1e-15 * std::max(1.0, std::fabs(fa))) break;
    xi = 1.0 / frac;
    if (!std::isfinite(xi)) break;
  }
  Rat r(best_p, best_q);
  r.canonicalize();
  if (neg) r = -r;
  return r;
}

Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec vec_sub(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: size mismatch");
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RatVec vec_add(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_add: size mismatch");
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RatVec vec_scale(const Rat& c, const RatVec& a) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

Rat vec_sum(const RatVec& a) {
  Rat s = 0;
  for (const auto& v : a) s += v;
  return s;
}

bool is_zero_vec(const RatVec& a) {
  for (const auto& v : a)
    if (v != 0) return false;
  return true;
}

bool lex_less(const RatVec& a, const RatVec& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

}  // namespace lexmarket
