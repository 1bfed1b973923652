#pragma once

// Stabilizer groups: validated generator sets, group enumeration, symplectic
// linear algebra over F_q, logical operator frames, and encoding states.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"

namespace qwe {

using FqVec = std::vector<uint8_t>;  // entries mod q

inline uint32_t fq_inv(uint32_t a, uint32_t q) {
  a %= q;
  if (a == 0) throw ConsistencyError("inverse of 0 mod " + std::to_string(q));
  // Fermat: a^{q-2} mod q (q prime, tiny).
  uint64_t r = 1, base = a;
  for (uint32_t e = q - 2; e; e >>= 1) {
    if (e & 1) r = r * base % q;
    base = base * base % q;
  }
  return static_cast<uint32_t>(r);
}

// Symplectic coordinates: v = (x_0..x_{n-1} | z_0..z_{n-1}).
inline FqVec to_symplectic(const PauliString& p) {
  FqVec v(2 * p.n());
  for (size_t i = 0; i < p.n(); ++i) {
    v[i] = p.x[i];
    v[p.n() + i] = p.z[i];
  }
  return v;
}

inline PauliString from_symplectic(const FqVec& v, uint32_t q) {
  PauliString p(q, v.size() / 2);
  for (size_t i = 0; i < p.n(); ++i) {
    p.x[i] = static_cast<uint8_t>(v[i] % q);
    p.z[i] = static_cast<uint8_t>(v[p.n() + i] % q);
  }
  return p;
}

// <u, v> = sum(u_z * v_x - u_x * v_z) mod q; zero iff the operators commute.
// Matches omega_exp on the corresponding strings.
inline uint32_t symp_inner(const FqVec& u, const FqVec& v, uint32_t q) {
  const size_t n = u.size() / 2;
  uint64_t s = 0;
  for (size_t i = 0; i < n; ++i) {
    s += static_cast<uint64_t>(u[n + i]) * v[i] % q;
    s += q - static_cast<uint64_t>(u[i]) * v[n + i] % q;
  }
  return static_cast<uint32_t>(s % q);
}

// Row-reduced echelon form over F_q with tracked row operations:
// rref_rows = transform * original_rows.  Rows of `mat` are modified in place.
struct FqRref {
  uint32_t q;
  std::vector<FqVec> rows;       // RREF rows (zero rows removed)
  std::vector<FqVec> transform;  // coefficients over the original rows
  std::vector<size_t> pivots;    // pivot column per RREF row

  FqRref(std::vector<FqVec> mat, uint32_t q_) : q(q_) {
    const size_t m = mat.size();
    std::vector<FqVec> t(m, FqVec(m, 0));
    for (size_t i = 0; i < m; ++i) t[i][i] = 1;
    const size_t cols = m ? mat[0].size() : 0;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < m; ++c) {
      size_t piv = r;
      while (piv < m && mat[piv][c] % q == 0) ++piv;
      if (piv == m) continue;
      std::swap(mat[piv], mat[r]);
      std::swap(t[piv], t[r]);
      const uint32_t inv = fq_inv(mat[r][c], q);
      for (size_t j = 0; j < cols; ++j)
        mat[r][j] = static_cast<uint8_t>(mat[r][j] * inv % q);
      for (size_t j = 0; j < m; ++j)
        t[r][j] = static_cast<uint8_t>(t[r][j] * inv % q);
      for (size_t i = 0; i < m; ++i) {
        if (i == r || mat[i][c] % q == 0) continue;
        const uint32_t f = mat[i][c] % q;
        for (size_t j = 0; j < cols; ++j)
          mat[i][j] = static_cast<uint8_t>((mat[i][j] + (q - f) * mat[r][j]) % q);
        for (size_t j = 0; j < m; ++j)
          t[i][j] = static_cast<uint8_t>((t[i][j] + (q - f) * t[r][j]) % q);
      }
      pivots.push_back(c);
      ++r;
    }
    rows.assign(mat.begin(), mat.begin() + r);
    transform.assign(t.begin(), t.begin() + r);
  }

  size_t rank() const { return rows.size(); }

  // Express v over the original rows; nullopt if v is outside the row space.
  std::optional<FqVec> solve(const FqVec& v) const {
    FqVec res = v;
    const size_t norig = transform.empty() ? 0 : transform[0].size();
    FqVec coeff(norig, 0);
    for (size_t r = 0; r < rows.size(); ++r) {
      const uint32_t f = res[pivots[r]] % q;
      if (!f) continue;
      for (size_t j = 0; j < res.size(); ++j)
        res[j] = static_cast<uint8_t>((res[j] + (q - f) * rows[r][j]) % q);
      for (size_t j = 0; j < norig; ++j)
        coeff[j] = static_cast<uint8_t>((coeff[j] + f * transform[r][j]) % q);
    }
    for (auto x : res)
      if (x % q) return std::nullopt;
    return coeff;
  }

  bool in_row_space(const FqVec& v) const { return solve(v).has_value(); }
};

// Basis of {v : mat * v = 0} over F_q.
inline std::vector<FqVec> fq_kernel_basis(const std::vector<FqVec>& mat, uint32_t q) {
  if (mat.empty()) return {};
  const size_t cols = mat[0].size();
  FqRref rr(mat, q);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : rr.pivots) is_pivot[c] = true;
  std::vector<FqVec> basis;
  for (size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    FqVec v(cols, 0);
    v[c] = 1;
    for (size_t r = 0; r < rr.rows.size(); ++r) {
      const uint32_t val = rr.rows[r][c] % q;
      if (val) v[rr.pivots[r]] = static_cast<uint8_t>((q - val) % q);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

class StabilizerGroup {
 public:
  StabilizerGroup(uint32_t q, size_t n, std::vector<PhasedPauli> gens)
      : q_(check_prime_q(q)), n_(n), gens_(std::move(gens)) {
    validate();
  }

  // Copies drop the lazily built caches (they are rebuilt on demand).
  StabilizerGroup(const StabilizerGroup& o) : q_(o.q_), n_(o.n_), gens_(o.gens_) {}
  StabilizerGroup& operator=(const StabilizerGroup& o) {
    q_ = o.q_;
    n_ = o.n_;
    gens_ = o.gens_;
    powers_.reset();
    solver_.reset();
    return *this;
  }
  StabilizerGroup(StabilizerGroup&&) = default;
  StabilizerGroup& operator=(StabilizerGroup&&) = default;

  uint32_t q() const { return q_; }
  size_t n() const { return n_; }
  size_t num_generators() const { return gens_.size(); }
  int64_t k() const { return static_cast<int64_t>(n_) - gens_.size(); }
  const std::vector<PhasedPauli>& generators() const { return gens_; }

  uint64_t group_order() const {
    uint64_t size = 1;
    for (size_t i = 0; i < gens_.size(); ++i) {
      if (size > (1ull << 62) / q_)
        throw ResourceError("stabilizer group order overflows uint64");
      size *= q_;
    }
    return size;
  }

  // Visits all q^m signed elements exactly once, identity first, in
  // lexicographic exponent order.  visit(const PhasedPauli&).
  template <typename Visitor>
  void enumerate(uint64_t cap, Visitor&& visit) const {
    const uint64_t total = checked_order(cap);
    enumerate_range(0, total, std::forward<Visitor>(visit));
  }

  // Element with lexicographic exponent index idx (most significant digit =
  // generator 0).
  PhasedPauli element_at(uint64_t idx) const {
    PhasedPauli acc = identity_op(q_, n_);
    for (size_t i = gens_.size(); i-- > 0;) {
      const uint32_t d = static_cast<uint32_t>(idx % q_);
      idx /= q_;
      if (d) acc = mul(gen_pow(i, d), acc);
    }
    return acc;
  }

  // Visits elements with indices in [from, to) in order; supports sharding.
  template <typename Visitor>
  void enumerate_range(uint64_t from, uint64_t to, Visitor&& visit) const {
    const size_t m = gens_.size();
    if (from >= to) return;
    // digits of `from`, most significant first
    std::vector<uint32_t> digits(m, 0);
    {
      uint64_t rem = from;
      for (size_t i = m; i-- > 0;) {
        digits[i] = static_cast<uint32_t>(rem % q_);
        rem /= q_;
      }
    }
    // prefix[i] = product of gens_[0..i-1]^digits; prefix[0] = I
    std::vector<PhasedPauli> prefix(m + 1, identity_op(q_, n_));
    for (size_t i = 0; i < m; ++i)
      prefix[i + 1] = digits[i] ? mul(prefix[i], gen_pow(i, digits[i])) : prefix[i];
    for (uint64_t idx = from; idx < to; ++idx) {
      visit(static_cast<const PhasedPauli&>(prefix[m]));
      if (idx + 1 == to) break;
      // odometer increment on the least significant digit
      size_t pos = m;
      while (pos > 0 && digits[pos - 1] == q_ - 1) {
        digits[--pos] = 0;
      }
      if (pos == 0) break;  // wrapped; to must have been q^m
      --pos;
      ++digits[pos];
      prefix[pos + 1] = mul(prefix[pos], gen_pow(pos, digits[pos]));
      for (size_t i = pos + 1; i < m; ++i) prefix[i + 1] = prefix[i];
    }
  }

  std::vector<PhasedPauli> elements(uint64_t cap = kDefaultGroupCap) const {
    std::vector<PhasedPauli> out;
    out.reserve(checked_order(cap));
    enumerate(cap, [&](const PhasedPauli& p) { out.push_back(p); });
    return out;
  }

  // Membership with exact phase: returns the exponent vector if sigma times
  // the group contains op (unsigned solve + exact phase comparison).
  std::optional<FqVec> decompose(const PhasedPauli& op) const {
    ensure_solver();
    auto coeff = solver_->solve(to_symplectic(op.u));
    if (!coeff) return std::nullopt;
    PhasedPauli acc = identity_op(q_, n_);
    for (size_t i = 0; i < gens_.size(); ++i)
      if ((*coeff)[i]) acc = mul(acc, gen_pow(i, (*coeff)[i]));
    if (acc == op) return coeff;
    return std::nullopt;
  }

  bool contains(const PhasedPauli& op) const { return decompose(op).has_value(); }
  bool contains_unsigned(const PauliString& u) const {
    ensure_solver();
    return solver_->in_row_space(to_symplectic(u));
  }

  static constexpr uint64_t kDefaultGroupCap = 1ull << 26;

  uint64_t checked_order(uint64_t cap) const {
    uint64_t total = 1;
    for (size_t i = 0; i < gens_.size(); ++i) {
      total *= q_;
      if (total > cap)
        throw ResourceError("group enumeration size q^" +
                            std::to_string(gens_.size()) + " exceeds cap " +
                            std::to_string(cap));
    }
    return total;
  }

 private:
  void validate() const {
    for (const auto& g : gens_) {
      if (g.q() != q_ || g.n() != n_)
        throw ValidationError("generator has wrong local dimension or length");
      if (!pow(g, q_).is_identity())
        throw ValidationError("generator " + phased_pauli_to_text(g) +
                              " does not have order dividing q (bad phase?)");
    }
    for (size_t i = 0; i < gens_.size(); ++i)
      for (size_t j = i + 1; j < gens_.size(); ++j)
        if (omega_exp(gens_[i].u, gens_[j].u) != 0)
          throw ValidationError("generators " + std::to_string(i) + " and " +
                                std::to_string(j) + " do not commute");
    std::vector<FqVec> rows;
    for (const auto& g : gens_) rows.push_back(to_symplectic(g.u));
    if (FqRref(rows, q_).rank() != gens_.size())
      throw ValidationError("generators are dependent over F_q (or include a "
                            "phase times identity)");
    if (gens_.size() > n_)
      throw ValidationError("more independent commuting generators than sites");
  }

  PhasedPauli gen_pow(size_t i, uint32_t e) const {
    ensure_powers();
    return (*powers_)[i][e];
  }

  void ensure_powers() const {
    if (powers_) return;
    auto p = std::make_unique<std::vector<std::vector<PhasedPauli>>>();
    p->resize(gens_.size());
    for (size_t i = 0; i < gens_.size(); ++i) {
      (*p)[i].push_back(identity_op(q_, n_));
      for (uint32_t e = 1; e < q_; ++e)
        (*p)[i].push_back(mul((*p)[i][e - 1], gens_[i]));
    }
    powers_ = std::move(p);
  }

  void ensure_solver() const {
    if (solver_) return;
    std::vector<FqVec> rows;
    for (const auto& g : gens_) rows.push_back(to_symplectic(g.u));
    solver_ = std::make_unique<FqRref>(std::move(rows), q_);
  }

  uint32_t q_;
  size_t n_;
  std::vector<PhasedPauli> gens_;
  // lazily built, logically const caches
  mutable std::unique_ptr<std::vector<std::vector<PhasedPauli>>> powers_;
  mutable std::unique_ptr<FqRref> solver_;
};

struct LogicalFrame {
  // one (X-bar, Z-bar) pair per logical qudit
  std::vector<std::pair<PhasedPauli, PhasedPauli>> pairs;
  size_t k() const { return pairs.size(); }
};

// Checks the frame invariants against the group, throwing on violation.
inline void validate_frame(const StabilizerGroup& g, const LogicalFrame& f) {
  if (static_cast<int64_t>(f.pairs.size()) != g.k())
    throw ValidationError("logical frame size != k");
  const uint32_t q = g.q();
  for (size_t i = 0; i < f.pairs.size(); ++i) {
    const auto& [xb, zb] = f.pairs[i];
    for (const auto& op : {xb, zb}) {
      if (op.n() != g.n() || op.q() != q)
        throw ValidationError("logical operator has wrong shape");
      if (!pow(op, q).is_identity())
        throw ValidationError("logical operator is not order q");
      for (const auto& s : g.generators())
        if (omega_exp(op.u, s.u) != 0)
          throw ValidationError("logical operator does not commute with group");
      if (g.contains_unsigned(op.u))
        throw ValidationError("logical operator lies in the stabilizer group");
    }
    for (size_t j = 0; j < f.pairs.size(); ++j) {
      const uint32_t want_xz = (i == j) ? (q - 1) : 0;  // omega(X, Z) = zeta^{-1}
      if (omega_exp(f.pairs[i].first.u, f.pairs[j].second.u) != want_xz)
        throw ValidationError("logical frame commutation pattern broken (X,Z)");
      if (omega_exp(f.pairs[i].first.u, f.pairs[j].first.u) != 0 ||
          omega_exp(f.pairs[i].second.u, f.pairs[j].second.u) != 0)
        throw ValidationError("logical frame commutation pattern broken (X,X)/(Z,Z)");
    }
  }
}

// Symplectic completion: a canonical logical frame for the group.
// Unsigned basis of the normalizer N(S) = {v : <g_i, v> = 0 for all i} as an
// F_q subspace of exponent vectors; dimension n + k.  Kernel of the
// commutation map v -> (<g_i, v>)_i, whose matrix rows are (g_z | -g_x).
inline std::vector<FqVec> normalizer_kernel(const StabilizerGroup& g) {
  const uint32_t q = g.q();
  const size_t n = g.n();
  std::vector<FqVec> rows;
  for (const auto& gen : g.generators()) {
    FqVec s = to_symplectic(gen.u);
    FqVec row(2 * n);
    for (size_t i = 0; i < n; ++i) {
      row[i] = s[n + i];
      row[n + i] = static_cast<uint8_t>((q - s[i]) % q);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    // No generators: the normalizer is everything.
    std::vector<FqVec> all;
    for (size_t c = 0; c < 2 * n; ++c) {
      FqVec v(2 * n, 0);
      v[c] = 1;
      all.push_back(std::move(v));
    }
    return all;
  }
  return fq_kernel_basis(rows, q);
}

inline std::vector<PauliString> normalizer_kernel_basis(
    const StabilizerGroup& g) {
  std::vector<PauliString> out;
  for (const auto& v : normalizer_kernel(g)) out.push_back(from_symplectic(v, g.q()));
  return out;
}

inline LogicalFrame logical_operators(const StabilizerGroup& g) {
  const uint32_t q = g.q();
  const size_t n = g.n();
  LogicalFrame frame;
  if (g.k() == 0) return frame;

  std::vector<FqVec> normalizer = normalizer_kernel(g);

  // Complement of the stabilizer row space inside the normalizer.
  std::vector<FqVec> span;
  for (const auto& gen : g.generators()) span.push_back(to_symplectic(gen.u));
  std::vector<FqVec> complement;
  for (const auto& v : normalizer) {
    std::vector<FqVec> trial = span;
    trial.push_back(v);
    if (FqRref(trial, q).rank() > span.size()) {
      span.push_back(v);
      complement.push_back(v);
    }
  }
  if (complement.size() != 2 * static_cast<size_t>(g.k()))
    throw ConsistencyError("symplectic completion found wrong complement size");

  // Hyperbolic pairing: repeatedly extract (x, z) with <x, z> = -1 and
  // sweep the rest orthogonal to the pair.
  std::vector<FqVec> pool = complement;
  while (!pool.empty()) {
    FqVec x = pool.front();
    pool.erase(pool.begin());
    size_t partner = pool.size();
    uint32_t s = 0;
    for (size_t j = 0; j < pool.size(); ++j) {
      s = symp_inner(x, pool[j], q);
      if (s != 0) {
        partner = j;
        break;
      }
    }
    if (partner == pool.size())
      throw ConsistencyError("symplectic pairing failed (degenerate form)");
    FqVec z = pool[partner];
    pool.erase(pool.begin() + partner);
    // scale z so that <x, z> = -1 mod q
    const uint32_t t = static_cast<uint32_t>(
        (static_cast<uint64_t>(q - 1) * fq_inv(s, q)) % q);
    for (auto& e : z) e = static_cast<uint8_t>(e * t % q);
    // sweep remaining vectors: v += <v,z>/<x,z> ... alpha = <v, z>, beta = -<v, x>
    for (auto& v : pool) {
      const uint32_t alpha = symp_inner(v, z, q);          // v += alpha * x
      const uint32_t beta = (q - symp_inner(v, x, q)) % q;  // v += beta * z
      for (size_t e = 0; e < v.size(); ++e)
        v[e] = static_cast<uint8_t>((v[e] + alpha * x[e] + beta * z[e]) % q);
    }
    frame.pairs.push_back({canonical_rep(from_symplectic(x, q)),
                           canonical_rep(from_symplectic(z, q))});
  }
  validate_frame(g, frame);
  return frame;
}

// Encoding state: the code's stabilizers padded with identity on k new legs,
// plus per logical qudit i the generators Xbar_i (x) X^{-1}(leg i) and
// Zbar_i (x) Z(leg i).  Yields an [[n+k, 0]] stabilizer state.
inline StabilizerGroup encoding_state(const StabilizerGroup& g,
                                      const LogicalFrame& frame) {
  validate_frame(g, frame);
  if (frame.pairs.empty()) return g;
  const uint32_t q = g.q();
  const size_t n = g.n(), k = frame.pairs.size();
  std::vector<PhasedPauli> gens;
  auto pad = [&](const PhasedPauli& p) {
    PhasedPauli out(tensor(p.u, PauliString(q, k)), p.phase);
    return out;
  };
  for (const auto& s : g.generators()) gens.push_back(pad(s));
  for (size_t i = 0; i < k; ++i) {
    PhasedPauli xb = pad(frame.pairs[i].first);
    xb.u.x[n + i] = static_cast<uint8_t>(q - 1);  // X^{-1} on leg i
    gens.push_back(xb);
    PhasedPauli zb = pad(frame.pairs[i].second);
    zb.u.z[n + i] = 1;
    gens.push_back(zb);
  }
  return StabilizerGroup(q, n + k, std::move(gens));
}

// ---- code file (JSON) ----------------------------------------------------
// {"q":2, "n":5, "stabilizers":[{"phase":"+1","paulis":"XZZXI"},...],
//  "logical": [{"x":{"phase":"+1","paulis":"XXXXX"},
//               "z":{"phase":"+1","paulis":"ZZZZZ"}}, ...]}   (optional)

struct StabCode {
  StabilizerGroup group;
  std::optional<LogicalFrame> logical;

  const LogicalFrame& frame() {
    if (!logical) logical = logical_operators(group);
    return *logical;
  }
};

inline PhasedPauli phased_pauli_from_json(const nlohmann::json& j, uint32_t q) {
  if (!j.is_object() || !j.contains("paulis"))
    throw ValidationError("operator JSON needs a 'paulis' field");
  const std::string phase = j.value("phase", "+1");
  return parse_phased_pauli(phase, j.at("paulis").get<std::string>(), q);
}

inline nlohmann::json phased_pauli_to_json(const PhasedPauli& p) {
  const std::string text = phased_pauli_to_text(p);
  const auto space = text.find(' ');
  return nlohmann::json{{"phase", text.substr(0, space)},
                        {"paulis", text.substr(space + 1)}};
}

inline StabCode code_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("code document must be an object");
  for (const char* field : {"q", "n", "stabilizers"})
    if (!j.contains(field))
      throw ValidationError(std::string("code document missing '") + field + "'");
  const uint32_t q = j.at("q").get<uint32_t>();
  const size_t n = j.at("n").get<size_t>();
  std::vector<PhasedPauli> gens;
  for (const auto& s : j.at("stabilizers")) {
    auto op = phased_pauli_from_json(s, q);
    if (op.n() != n)
      throw ValidationError("stabilizer length != n: " + phased_pauli_to_text(op));
    gens.push_back(std::move(op));
  }
  StabCode code{StabilizerGroup(q, n, std::move(gens)), std::nullopt};
  if (j.contains("logical")) {
    LogicalFrame f;
    for (const auto& pair : j.at("logical"))
      f.pairs.push_back({phased_pauli_from_json(pair.at("x"), q),
                         phased_pauli_from_json(pair.at("z"), q)});
    validate_frame(code.group, f);
    code.logical = std::move(f);
  }
  return code;
}

inline nlohmann::json code_to_json(const StabilizerGroup& g,
                                   const std::optional<LogicalFrame>& frame = {}) {
  nlohmann::json stabs = nlohmann::json::array();
  for (const auto& s : g.generators()) stabs.push_back(phased_pauli_to_json(s));
  nlohmann::json out{{"q", g.q()}, {"n", g.n()}, {"stabilizers", std::move(stabs)}};
  if (frame) {
    nlohmann::json lj = nlohmann::json::array();
    for (const auto& [x, z] : frame->pairs)
      lj.push_back(nlohmann::json{{"x", phased_pauli_to_json(x)},
                                  {"z", phased_pauli_to_json(z)}});
    out["logical"] = std::move(lj);
  }
  return out;
}

}  // namespace qwe
