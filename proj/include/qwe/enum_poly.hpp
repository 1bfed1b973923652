#pragma once

// Weight schemes and sparse exact multivariate polynomials.
//
// A WeightScheme names the variables an enumerator polynomial is written in
// and how one Pauli site (exponent pair (a, b)) contributes a monomial:
//
//   shor_laflamme : z^{wt}            (homogeneous: w^{n-wt} z^{wt})
//   double        : x^{wtX} z^{wtZ}   (homogeneous: x^{wtX} y^{n-wtX} z^{wtZ} w^{n-wtZ})
//   refined_double: prod_site x_{a} z_{b}          (always homogeneous)
//   complete      : prod_site u_{(a,b)}            (always homogeneous)
//
// EnumPoly stores terms sparsely with exact cyclotomic-rational coefficients,
// keyed by exponent vectors packed into one uint64 (16 bits per variable for
// up to 4 variables, 64/nvars bits otherwise, overflow-checked).

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwe/cyclotomic.hpp"
#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"

namespace qwe {

enum class SchemeKind { shor_laflamme, double_, refined_double, complete };

inline std::string scheme_kind_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::shor_laflamme: return "shor-laflamme";
    case SchemeKind::double_: return "double";
    case SchemeKind::refined_double: return "refined-double";
    case SchemeKind::complete: return "complete";
  }
  return "?";
}

inline SchemeKind scheme_kind_from_name(const std::string& s) {
  if (s == "shor-laflamme" || s == "shor_laflamme" || s == "scalar")
    return SchemeKind::shor_laflamme;
  if (s == "double") return SchemeKind::double_;
  if (s == "refined-double" || s == "refined_double") return SchemeKind::refined_double;
  if (s == "complete") return SchemeKind::complete;
  throw ValidationError("unknown weight scheme '" + s + "'");
}

struct WeightScheme {
  SchemeKind kind = SchemeKind::shor_laflamme;
  uint32_t q = 2;

  friend bool operator==(const WeightScheme& a, const WeightScheme& b) {
    return a.kind == b.kind && a.q == b.q;
  }
  friend bool operator!=(const WeightScheme& a, const WeightScheme& b) {
    return !(a == b);
  }

  // Schemes whose variables already grade every site (no dehomogenized form).
  bool intrinsically_homogeneous() const {
    return kind == SchemeKind::refined_double || kind == SchemeKind::complete;
  }

  uint32_t num_vars(bool homogeneous) const {
    switch (kind) {
      case SchemeKind::shor_laflamme: return homogeneous ? 2 : 1;
      case SchemeKind::double_: return homogeneous ? 4 : 2;
      case SchemeKind::refined_double: return 2 * q;
      case SchemeKind::complete: return q * q;
    }
    return 0;
  }

  std::vector<std::string> var_names(bool homogeneous) const {
    switch (kind) {
      case SchemeKind::shor_laflamme:
        return homogeneous ? std::vector<std::string>{"w", "z"}
                           : std::vector<std::string>{"z"};
      case SchemeKind::double_:
        return homogeneous ? std::vector<std::string>{"w", "x", "y", "z"}
                           : std::vector<std::string>{"x", "z"};
      case SchemeKind::refined_double: {
        std::vector<std::string> v;
        for (uint32_t a = 0; a < q; ++a) v.push_back("x" + std::to_string(a));
        for (uint32_t b = 0; b < q; ++b) v.push_back("z" + std::to_string(b));
        return v;
      }
      case SchemeKind::complete: {
        std::vector<std::string> v;
        if (q == 2) return {"uI", "uZ", "uX", "uY"};  // (a,b) lex order
        for (uint32_t a = 0; a < q; ++a)
          for (uint32_t b = 0; b < q; ++b)
            v.push_back("u" + std::to_string(a) + "_" + std::to_string(b));
        return v;
      }
    }
    return {};
  }

  // Exponent increments contributed by one site with exponents (a, b).
  // Returned as (var index, increment) pairs over the chosen variable list.
  void site_exponents(uint32_t a, uint32_t b, bool homogeneous,
                      std::vector<std::pair<uint32_t, uint32_t>>& out) const {
    out.clear();
    const bool id = (a == 0 && b == 0);
    switch (kind) {
      case SchemeKind::shor_laflamme:
        if (homogeneous) {
          out.push_back({id ? 0u : 1u, 1u});  // w or z
        } else if (!id) {
          out.push_back({0u, 1u});  // z
        }
        return;
      case SchemeKind::double_:
        if (homogeneous) {
          // variables (w, x, y, z): x grades wtX (else y), z grades wtZ (else w)
          out.push_back({a != 0 ? 1u : 2u, 1u});
          out.push_back({b != 0 ? 3u : 0u, 1u});
        } else {
          if (a != 0) out.push_back({0u, 1u});  // x
          if (b != 0) out.push_back({1u, 1u});  // z
        }
        return;
      case SchemeKind::refined_double:
        out.push_back({a, 1u});
        out.push_back({q + b, 1u});
        return;
      case SchemeKind::complete:
        out.push_back({a * q + b, 1u});
        return;
    }
  }
};

// ---- packed exponent keys ------------------------------------------------

struct ExpPacking {
  uint32_t nvars;
  uint32_t bits;
  uint64_t mask;

  explicit ExpPacking(uint32_t nv) : nvars(nv) {
    if (nv == 0) {
      bits = 0;
      mask = 0;
      return;
    }
    bits = nv <= 4 ? 16 : 64 / nv;
    if (bits < 2)
      throw ResourceError("weight scheme has too many variables (" +
                          std::to_string(nv) + ") for packed exponents");
    mask = (bits >= 64) ? ~0ull : ((1ull << bits) - 1);
  }

  uint64_t pack(const std::vector<uint64_t>& exps) const {
    if (exps.size() != nvars)
      throw ValidationError("exponent vector length mismatch");
    uint64_t key = 0;
    for (uint32_t v = 0; v < nvars; ++v) {
      if (exps[v] > mask)
        throw ResourceError("exponent " + std::to_string(exps[v]) +
                            " exceeds packed width for this scheme");
      key = (key << bits) | exps[v];
    }
    return key;
  }

  std::vector<uint64_t> unpack(uint64_t key) const {
    std::vector<uint64_t> exps(nvars, 0);
    for (uint32_t v = nvars; v-- > 0;) {
      exps[v] = key & mask;
      key >>= bits;
    }
    return exps;
  }

  uint64_t get(uint64_t key, uint32_t v) const {
    const uint32_t shift = bits * (nvars - 1 - v);
    return (key >> shift) & mask;
  }

  // Checked per-field addition of two packed keys.
  uint64_t add(uint64_t k1, uint64_t k2) const {
    uint64_t key = 0;
    for (uint32_t v = 0; v < nvars; ++v) {
      const uint32_t shift = bits * (nvars - 1 - v);
      const uint64_t s = ((k1 >> shift) & mask) + ((k2 >> shift) & mask);
      if (s > mask) throw ResourceError("packed exponent overflow");
      key |= s << shift;
    }
    return key;
  }
};

// One variable's image under a linear substitution:
// var -> q^{-half_q_pow/2} * sum coeff_v * var_v.
struct LinForm {
  int half_q_pow = 0;
  std::vector<std::pair<uint32_t, Cyc>> coeffs;
};

class EnumPoly {
 public:
  EnumPoly() : packing_(1) {}
  EnumPoly(WeightScheme scheme, bool homogeneous)
      : scheme_(scheme),
        homogeneous_(homogeneous || scheme.intrinsically_homogeneous()),
        packing_(scheme.num_vars(homogeneous || scheme.intrinsically_homogeneous())) {}

  const WeightScheme& scheme() const { return scheme_; }
  bool homogeneous() const { return homogeneous_; }
  uint32_t num_vars() const { return packing_.nvars; }
  const ExpPacking& packing() const { return packing_; }
  bool is_zero() const { return terms_.empty(); }
  size_t num_terms() const { return terms_.size(); }
  const std::map<uint64_t, Cyc>& terms() const { return terms_; }

  static EnumPoly constant(WeightScheme scheme, bool homogeneous, Cyc c) {
    EnumPoly p(scheme, homogeneous);
    if (!c.is_zero()) p.terms_.emplace(0, std::move(c));
    return p;
  }
  static EnumPoly one(WeightScheme scheme, bool homogeneous) {
    return constant(scheme, homogeneous, Cyc::one(scheme.q));
  }

  void add_term(const std::vector<uint64_t>& exps, const Cyc& c) {
    add_term_key(packing_.pack(exps), c);
  }
  void add_term_key(uint64_t key, const Cyc& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Cyc coeff_of(const std::vector<uint64_t>& exps) const {
    auto it = terms_.find(packing_.pack(exps));
    return it == terms_.end() ? Cyc::zero(scheme_.q) : it->second;
  }
  Cyc constant_term() const {
    auto it = terms_.find(0);
    return it == terms_.end() ? Cyc::zero(scheme_.q) : it->second;
  }

  void check_same_shape(const EnumPoly& o) const {
    if (scheme_ != o.scheme_ || homogeneous_ != o.homogeneous_)
      throw ValidationError("polynomial scheme/form mismatch");
  }

  EnumPoly& operator+=(const EnumPoly& o) {
    check_same_shape(o);
    for (const auto& [k, c] : o.terms_) add_term_key(k, c);
    return *this;
  }
  friend EnumPoly operator+(EnumPoly a, const EnumPoly& b) { a += b; return a; }

  EnumPoly& operator-=(const EnumPoly& o) {
    check_same_shape(o);
    for (const auto& [k, c] : o.terms_) add_term_key(k, -c);
    return *this;
  }
  friend EnumPoly operator-(EnumPoly a, const EnumPoly& b) { a -= b; return a; }

  friend EnumPoly operator*(const EnumPoly& a, const EnumPoly& b) {
    a.check_same_shape(b);
    EnumPoly out(a.scheme_, a.homogeneous_);
    for (const auto& [k1, c1] : a.terms_)
      for (const auto& [k2, c2] : b.terms_)
        out.add_term_key(a.packing_.add(k1, k2), c1 * c2);
    return out;
  }

  // this += src * c, with all exponents shifted by monomial key `shift`.
  void accumulate_scaled(const EnumPoly& src, uint64_t shift, const Cyc& c) {
    check_same_shape(src);
    if (c.is_zero()) return;
    for (const auto& [k, v] : src.terms_)
      add_term_key(packing_.add(k, shift), v * c);
  }

  EnumPoly& scale(const Cyc& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
  }
  EnumPoly& scale(const Rat& r) {
    if (r == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, v] : terms_) v.scale(r);
    return *this;
  }

  friend bool operator==(const EnumPoly& a, const EnumPoly& b) {
    return a.scheme_ == b.scheme_ && a.homogeneous_ == b.homogeneous_ &&
           a.terms_ == b.terms_;
  }
  friend bool operator!=(const EnumPoly& a, const EnumPoly& b) { return !(a == b); }

  uint64_t total_degree() const {
    uint64_t deg = 0;
    for (const auto& [k, v] : terms_) {
      uint64_t d = 0;
      for (uint32_t j = 0; j < packing_.nvars; ++j) d += packing_.get(k, j);
      deg = std::max(deg, d);
    }
    return deg;
  }

  uint64_t max_var_degree(uint32_t v) const {
    uint64_t deg = 0;
    for (const auto& [k, c] : terms_) deg = std::max(deg, packing_.get(k, v));
    return deg;
  }

  bool is_homogeneous_of_degree(uint64_t n) const {
    for (const auto& [k, c] : terms_) {
      uint64_t d = 0;
      for (uint32_t j = 0; j < packing_.nvars; ++j) d += packing_.get(k, j);
      if (d != n) return false;
    }
    return true;
  }

  Cyc evaluate(const std::vector<Cyc>& point) const {
    if (point.size() != packing_.nvars)
      throw ValidationError("evaluation point has wrong arity");
    Cyc acc = Cyc::zero(scheme_.q);
    for (const auto& [k, c] : terms_) {
      Cyc t = c;
      for (uint32_t v = 0; v < packing_.nvars; ++v) {
        uint64_t e = packing_.get(k, v);
        for (uint64_t i = 0; i < e; ++i) t *= point[v];
      }
      acc += t;
    }
    return acc;
  }

  // Scalar: w^{n-deg} fills variable 0.  Double: y fills x and w fills z
  // (bidegree (n, n)).  Intrinsically homogeneous schemes pass through.
  EnumPoly homogenize(uint64_t n) const {
    if (scheme_.intrinsically_homogeneous() || homogeneous_) {
      if (!is_homogeneous_consistent(n))
        throw ValidationError("degree bound below actual degree");
      return *this;
    }
    EnumPoly out(scheme_, true);
    std::vector<uint64_t> e;
    for (const auto& [k, c] : terms_) {
      if (scheme_.kind == SchemeKind::shor_laflamme) {
        const uint64_t dz = packing_.get(k, 0);
        if (dz > n) throw ValidationError("degree bound below actual degree");
        e = {n - dz, dz};
      } else {  // double: (x, z) -> (w, x, y, z)
        const uint64_t dx = packing_.get(k, 0), dz = packing_.get(k, 1);
        if (dx > n || dz > n)
          throw ValidationError("degree bound below actual degree");
        e = {n - dz, dx, n - dx, dz};
      }
      out.add_term(e, c);
    }
    return out;
  }

  EnumPoly dehomogenize() const {
    if (scheme_.intrinsically_homogeneous())
      throw ValidationError("scheme has no dehomogenized form");
    if (!homogeneous_) return *this;
    EnumPoly out(scheme_, false);
    std::vector<uint64_t> e;
    for (const auto& [k, c] : terms_) {
      if (scheme_.kind == SchemeKind::shor_laflamme) {
        e = {packing_.get(k, 1)};
      } else {
        e = {packing_.get(k, 1), packing_.get(k, 3)};
      }
      out.add_term(e, c);
    }
    if (out.num_terms() != terms_.size())
      throw ValidationError("dehomogenize would merge distinct terms (input not homogeneous)");
    return out;
  }

  // Exact linear substitution var_v -> forms[v]; per-term scale
  // q^{-(sum e_v * half_v)/2}, whose exponent must come out even.
  EnumPoly substitute_linear(const std::vector<LinForm>& forms) const {
    if (forms.size() != packing_.nvars)
      throw ValidationError("substitution must define every scheme variable");
    EnumPoly out(scheme_, homogeneous_);
    // Cache of form powers per variable.
    std::vector<std::vector<EnumPoly>> powers(packing_.nvars);
    auto form_poly = [&](uint32_t v) {
      EnumPoly f(scheme_, homogeneous_);
      std::vector<uint64_t> e(packing_.nvars, 0);
      for (const auto& [var, c] : forms[v].coeffs) {
        std::fill(e.begin(), e.end(), 0);
        e.at(var) = 1;
        f.add_term(e, c);
      }
      return f;
    };
    auto power_of = [&](uint32_t v, uint64_t e) -> const EnumPoly& {
      auto& cache = powers[v];
      if (cache.empty()) {
        cache.push_back(one(scheme_, homogeneous_));
        cache.push_back(form_poly(v));
      }
      while (cache.size() <= e) cache.push_back(cache.back() * cache[1]);
      return cache[e];
    };
    for (const auto& [k, c] : terms_) {
      EnumPoly t = constant(scheme_, homogeneous_, c);
      int64_t half = 0;
      for (uint32_t v = 0; v < packing_.nvars; ++v) {
        const uint64_t e = packing_.get(k, v);
        if (e == 0) continue;
        half += static_cast<int64_t>(e) * forms[v].half_q_pow;
        t = t * power_of(v, e);
      }
      if (half % 2 != 0)
        throw ConsistencyError("substitution leaves an odd power of sqrt(q)");
      Rat s(1);
      const int64_t hp = half / 2;
      for (int64_t i = 0; i < (hp >= 0 ? hp : -hp); ++i) s *= scheme_.q;
      t.scale(hp >= 0 ? Rat(1) / s : s);
      out += t;
    }
    return out;
  }

  // ---- serialization -----------------------------------------------------

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : terms_) {
      nlohmann::json t;
      t["exp"] = packing_.unpack(k);
      t["coeff"] = rat_to_string(c.as_rational());
      terms.push_back(std::move(t));
    }
    return nlohmann::json{{"scheme", scheme_kind_name(scheme_.kind)},
                          {"q", scheme_.q},
                          {"vars", scheme_.var_names(homogeneous_)},
                          {"terms", std::move(terms)}};
  }

  static Rat parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rat(BigInt(s));
      BigInt num(s.substr(0, slash));
      BigInt den(s.substr(slash + 1));
      if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
      return Rat(num, den);
    } catch (const std::exception& e) {
      throw ValidationError("bad rational '" + s + "': " + e.what());
    }
  }

  static EnumPoly from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("scheme") || !j.contains("q") ||
        !j.contains("terms"))
      throw ValidationError("polynomial JSON needs scheme, q, terms");
    WeightScheme scheme{scheme_kind_from_name(j.at("scheme").get<std::string>()),
                        j.at("q").get<uint32_t>()};
    check_prime_q(scheme.q);
    // Infer homogeneous form from the exponent arity.
    bool homogeneous = true;
    if (!scheme.intrinsically_homogeneous() && !j.at("terms").empty()) {
      const size_t arity = j.at("terms").at(0).at("exp").size();
      if (arity == scheme.num_vars(false)) homogeneous = false;
      else if (arity != scheme.num_vars(true))
        throw ValidationError("exponent arity matches neither form of scheme " +
                              scheme_kind_name(scheme.kind));
    }
    EnumPoly out(scheme, homogeneous);
    for (const auto& t : j.at("terms")) {
      std::vector<uint64_t> exps = t.at("exp").get<std::vector<uint64_t>>();
      Cyc c(scheme.q, parse_rational(t.at("coeff").get<std::string>()));
      if (exps.size() != out.num_vars())
        throw ValidationError("inconsistent exponent arity in terms");
      out.add_term(exps, c);
    }
    return out;
  }

  // Matrix CSV for bivariate views: rows = d_x, cols = d_z (double scheme);
  // scalar polynomials export as (d, coeff) rows.
  std::string to_csv() const {
    std::ostringstream os;
    if (scheme_.kind == SchemeKind::shor_laflamme) {
      const uint32_t zvar = homogeneous_ ? 1 : 0;
      os << "d,coeff\n";
      const uint64_t dmax = max_var_degree(zvar);
      for (uint64_t d = 0; d <= dmax; ++d) {
        Cyc c = Cyc::zero(scheme_.q);
        for (const auto& [k, v] : terms_)
          if (packing_.get(k, zvar) == d) c += v;
        os << d << "," << rat_to_string(c.as_rational()) << "\n";
      }
      return os.str();
    }
    if (scheme_.kind != SchemeKind::double_)
      throw ValidationError("CSV export supports scalar and double schemes");
    const uint32_t xvar = homogeneous_ ? 1 : 0;
    const uint32_t zvar = homogeneous_ ? 3 : 1;
    const uint64_t xmax = max_var_degree(xvar), zmax = max_var_degree(zvar);
    os << "dx\\dz";
    for (uint64_t dz = 0; dz <= zmax; ++dz) os << "," << dz;
    os << "\n";
    for (uint64_t dx = 0; dx <= xmax; ++dx) {
      os << dx;
      for (uint64_t dz = 0; dz <= zmax; ++dz) {
        Cyc c = Cyc::zero(scheme_.q);
        for (const auto& [k, v] : terms_)
          if (packing_.get(k, xvar) == dx && packing_.get(k, zvar) == dz) c += v;
        os << "," << rat_to_string(c.as_rational());
      }
      os << "\n";
    }
    return os.str();
  }

  std::string to_pretty() const {
    if (terms_.empty()) return "0";
    const auto names = scheme_.var_names(homogeneous_);
    // Natural reading order: ascending total degree, then ascending exponents
    // of the trailing (weight-grading) variables.
    std::vector<std::pair<std::vector<uint64_t>, uint64_t>> order;
    for (const auto& [k, c] : terms_) {
      uint64_t d = 0;
      for (uint32_t v = 0; v < packing_.nvars; ++v) d += packing_.get(k, v);
      std::vector<uint64_t> sort_key{d};
      for (uint32_t v = packing_.nvars; v-- > 0;) sort_key.push_back(packing_.get(k, v));
      order.push_back({std::move(sort_key), k});
    }
    std::sort(order.begin(), order.end());
    std::ostringstream os;
    bool first = true;
    for (const auto& [d, k] : order) {
      const Cyc& c = terms_.at(k);
      std::string cs = c.to_string();
      if (!first) os << (cs[0] == '-' ? " - " : " + ");
      if (!first && cs[0] == '-') cs = cs.substr(1);
      bool allzero = true;
      for (uint32_t v = 0; v < packing_.nvars; ++v)
        if (packing_.get(k, v)) allzero = false;
      const bool unit_coeff = (cs == "1" && !allzero);
      if (!unit_coeff) os << cs;
      bool printed = !unit_coeff;
      for (uint32_t v = 0; v < packing_.nvars; ++v) {
        const uint64_t e = packing_.get(k, v);
        if (!e) continue;
        if (printed) os << " ";
        os << names[v];
        if (e > 1) os << "^" << e;
        printed = true;
      }
      first = false;
    }
    return os.str();
  }

 private:
  bool is_homogeneous_consistent(uint64_t n) const {
    const uint64_t want =
        scheme_.kind == SchemeKind::double_ || scheme_.kind == SchemeKind::refined_double
            ? 2 * n
            : n;
    return is_homogeneous_of_degree(want) || terms_.empty();
  }

  WeightScheme scheme_;
  bool homogeneous_ = false;
  ExpPacking packing_;
  std::map<uint64_t, Cyc> terms_;
};

}  // namespace qwe
