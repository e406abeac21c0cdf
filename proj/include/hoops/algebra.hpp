#pragma once

// Normal-ordered bosonic operator algebra over a finite set of modes.
// Monomials store per-mode (creation, annihilation) exponents; polynomials
// are sparse maps from monomial signature to complex coefficient.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hoops {

using cplx = std::complex<double>;

enum class ModeKind { photonic, phononic };

struct ModeId {
  std::string label;
  ModeKind kind = ModeKind::photonic;
};

/// Shared algebra context: an ordered list of uniquely labeled modes.
class ModeSet {
 public:
  ModeSet() = default;
  explicit ModeSet(std::vector<ModeId> modes) : modes_(std::move(modes)) {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      for (std::size_t j = i + 1; j < modes_.size(); ++j)
        if (modes_[i].label == modes_[j].label)
          throw std::invalid_argument("duplicate mode label: " + modes_[i].label);
  }

  std::size_t size() const { return modes_.size(); }
  const ModeId& mode(std::size_t i) const { return modes_.at(i); }

  std::size_t index(const std::string& label) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i].label == label) return i;
    throw std::out_of_range("no such mode: " + label);
  }

  bool operator==(const ModeSet& o) const {
    if (modes_.size() != o.modes_.size()) return false;
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i].label != o.modes_[i].label) return false;
    return true;
  }

 private:
  std::vector<ModeId> modes_;
};

/// Per-mode exponent pair of a normal-ordered monomial: a†^c a^a.
struct ModeExp {
  int c = 0;  // creation exponent
  int a = 0;  // annihilation exponent
  auto operator<=>(const ModeExp&) const = default;
};

/// Signature of a monomial: one exponent pair per mode of the context.
using MonoSig = std::vector<ModeExp>;

inline int total_degree(const MonoSig& s) {
  int d = 0;
  for (const auto& e : s) d += e.c + e.a;
  return d;
}

namespace detail {

inline double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

// k! * C(q,k) * C(r,k), exact for the small exponents used here
inline double wick_weight(int q, int r, int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= double(i);
  return f * binomial(q, k) * binomial(r, k);
}

}  // namespace detail

/// Weighted sum of normal-ordered monomials; the algebra's currency.
class OperatorPolynomial {
 public:
  OperatorPolynomial() = default;
  explicit OperatorPolynomial(const ModeSet& ctx) : ctx_(ctx) {}

  static OperatorPolynomial zero(const ModeSet& ctx) { return OperatorPolynomial(ctx); }

  static OperatorPolynomial identity(const ModeSet& ctx) {
    OperatorPolynomial p(ctx);
    p.add_term(MonoSig(ctx.size()), 1.0);
    return p;
  }

  static OperatorPolynomial monomial(const ModeSet& ctx, const MonoSig& sig, cplx coeff) {
    if (sig.size() != ctx.size()) throw std::invalid_argument("signature/context size mismatch");
    OperatorPolynomial p(ctx);
    p.add_term(sig, coeff);
    return p;
  }

  /// Single ladder operator on the named mode: a (dagger=false) or a† (true).
  static OperatorPolynomial ladder(const ModeSet& ctx, const std::string& label, bool dagger) {
    MonoSig s(ctx.size());
    auto i = ctx.index(label);
    if (dagger) s[i].c = 1; else s[i].a = 1;
    return monomial(ctx, s, 1.0);
  }

  static OperatorPolynomial annihilator(const ModeSet& ctx, const std::string& label) {
    return ladder(ctx, label, false);
  }
  static OperatorPolynomial creator(const ModeSet& ctx, const std::string& label) {
    return ladder(ctx, label, true);
  }
  /// Number operator a†a of the named mode.
  static OperatorPolynomial number(const ModeSet& ctx, const std::string& label) {
    MonoSig s(ctx.size());
    auto i = ctx.index(label);
    s[i].c = 1;
    s[i].a = 1;
    return monomial(ctx, s, 1.0);
  }
  /// Square field operator (1/2) a^2 of the named mode.
  static OperatorPolynomial half_square(const ModeSet& ctx, const std::string& label) {
    MonoSig s(ctx.size());
    s[ctx.index(label)].a = 2;
    return monomial(ctx, s, 0.5);
  }

  const ModeSet& context() const { return ctx_; }
  const std::map<MonoSig, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [s, c] : terms_) d = std::max(d, total_degree(s));
    return d;
  }

  void add_term(const MonoSig& sig, cplx coeff) {
    if (std::abs(coeff) == 0.0) return;
    auto it = terms_.find(sig);
    if (it == terms_.end()) {
      terms_.emplace(sig, coeff);
    } else {
      it->second += coeff;
      if (std::abs(it->second) < prune_tol_) terms_.erase(it);
    }
  }

  cplx coeff(const MonoSig& sig) const {
    auto it = terms_.find(sig);
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  OperatorPolynomial& operator+=(const OperatorPolynomial& o) {
    check_context(o);
    for (const auto& [s, c] : o.terms_) add_term(s, c);
    return *this;
  }
  OperatorPolynomial& operator-=(const OperatorPolynomial& o) {
    check_context(o);
    for (const auto& [s, c] : o.terms_) add_term(s, -c);
    return *this;
  }
  OperatorPolynomial& operator*=(cplx k) {
    if (std::abs(k) == 0.0) { terms_.clear(); return *this; }
    for (auto& [s, c] : terms_) c *= k;
    return *this;
  }

  friend OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b) { return a += b; }
  friend OperatorPolynomial operator-(OperatorPolynomial a, const OperatorPolynomial& b) { return a -= b; }
  friend OperatorPolynomial operator*(cplx k, OperatorPolynomial p) { return p *= k; }
  friend OperatorPolynomial operator*(OperatorPolynomial p, cplx k) { return p *= k; }

  /// Hermitian conjugate: swaps exponents per mode, conjugates coefficients.
  OperatorPolynomial dagger() const {
    OperatorPolynomial r(ctx_);
    for (const auto& [s, c] : terms_) {
      MonoSig t = s;
      for (auto& e : t) std::swap(e.c, e.a);
      r.add_term(t, std::conj(c));
    }
    return r;
  }

  double max_abs_coeff() const {
    double m = 0;
    for (const auto& [s, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  void check_context(const OperatorPolynomial& o) const {
    if (!(ctx_ == o.ctx_)) throw std::invalid_argument("operator polynomials from different algebra contexts");
  }

 private:
  ModeSet ctx_;
  std::map<MonoSig, cplx> terms_;
  static constexpr double prune_tol_ = 1e-14;
};

/// Product of two normal-ordered monomial signatures on one mode:
/// (a†^p a^q)(a†^r a^s) = sum_k k! C(q,k) C(r,k) a†^{p+r-k} a^{q+s-k}.
inline void mode_product(int p, int q, int r, int s,
                         std::vector<std::pair<ModeExp, double>>& out) {
  out.clear();
  int kmax = std::min(q, r);
  for (int k = 0; k <= kmax; ++k)
    out.push_back({ModeExp{p + r - k, q + s - k}, detail::wick_weight(q, r, k)});
}

/// Normal-ordered product, exact coefficients.
inline OperatorPolynomial multiply(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  a.check_context(b);
  const auto& ctx = a.context();
  OperatorPolynomial r(ctx);
  std::vector<std::pair<ModeExp, double>> buf;
  for (const auto& [sa, ca] : a.terms()) {
    for (const auto& [sb, cb] : b.terms()) {
      // expand mode by mode; modes commute with each other
      std::vector<std::pair<MonoSig, cplx>> acc{{MonoSig{}, ca * cb}};
      for (std::size_t m = 0; m < ctx.size(); ++m) {
        mode_product(sa[m].c, sa[m].a, sb[m].c, sb[m].a, buf);
        std::vector<std::pair<MonoSig, cplx>> next;
        next.reserve(acc.size() * buf.size());
        for (const auto& [sig, coeff] : acc) {
          for (const auto& [me, w] : buf) {
            MonoSig s2 = sig;
            s2.push_back(me);
            next.push_back({std::move(s2), coeff * w});
          }
        }
        acc = std::move(next);
      }
      for (auto& [sig, coeff] : acc) r.add_term(sig, coeff);
    }
  }
  return r;
}

/// ab - ba, normal-ordered.
inline OperatorPolynomial commutator(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  return multiply(a, b) - multiply(b, a);
}

// ---------------------------------------------------------------------------
// Span tests and closure

namespace detail {

/// Collect every monomial signature appearing in the given polynomials.
inline std::vector<MonoSig> signature_union(const std::vector<const OperatorPolynomial*>& ps) {
  std::map<MonoSig, int> seen;
  for (auto* p : ps)
    for (const auto& [s, c] : p->terms()) seen.emplace(s, 0);
  std::vector<MonoSig> out;
  out.reserve(seen.size());
  for (auto& [s, i] : seen) out.push_back(s);
  return out;
}

}  // namespace detail

struct SpanFit {
  bool in_span = false;
  double residual = 0.0;                 // least-squares residual norm
  Eigen::VectorXcd coords;               // coordinates on the span elements
};

/// Least-squares membership test of p in span(basis), over monomial coordinates.
inline SpanFit span_fit(const OperatorPolynomial& p,
                        const std::vector<OperatorPolynomial>& basis,
                        double tol = 1e-12) {
  std::vector<const OperatorPolynomial*> all;
  for (const auto& b : basis) all.push_back(&b);
  all.push_back(&p);
  auto sigs = detail::signature_union(all);

  Eigen::MatrixXcd A(sigs.size(), basis.size());
  Eigen::VectorXcd y(sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) A(i, j) = basis[j].coeff(sigs[i]);
    y(i) = p.coeff(sigs[i]);
  }
  SpanFit fit;
  if (basis.empty()) {
    fit.residual = y.norm();
    fit.in_span = fit.residual < tol * std::max(1.0, y.norm());
    return fit;
  }
  fit.coords = A.colPivHouseholderQr().solve(y);
  fit.residual = (A * fit.coords - y).norm();
  double scale = std::max(1.0, y.norm());
  fit.in_span = fit.residual < tol * scale;
  return fit;
}

struct ClosureEscape {
  std::size_t i = 0, j = 0;              // offending basis pair
  OperatorPolynomial residual_poly;      // commutator part outside the span
  double residual = 0.0;
};

struct ClosureReport {
  std::vector<OperatorPolynomial> basis;
  bool closed = false;
  std::vector<ClosureEscape> escapes;
};

/// Checks whether every pairwise commutator of the basis lies in
/// span(basis [+ identity]).  The identity monomial is admitted only when
/// allow_identity is set.
inline ClosureReport check_closure(const std::vector<OperatorPolynomial>& basis,
                                   bool allow_identity, double tol = 1e-12) {
  if (basis.empty()) throw std::invalid_argument("closure check needs a non-empty basis");
  ClosureReport rep;
  rep.basis = basis;
  std::vector<OperatorPolynomial> span = basis;
  if (allow_identity) span.push_back(OperatorPolynomial::identity(basis[0].context()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      auto com = commutator(basis[i], basis[j]);
      if (com.empty()) continue;
      auto fit = span_fit(com, span, tol);
      if (!fit.in_span) {
        // reconstruct the out-of-span residue
        OperatorPolynomial resid = com;
        for (std::size_t k = 0; k < span.size(); ++k) resid -= fit.coords(k) * span[k];
        rep.escapes.push_back({i, j, resid, fit.residual});
      }
    }
  }
  rep.closed = rep.escapes.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Mean-field reduction

/// Scalar means for number operators, keyed by mode label.
using MeanMap = std::map<std::string, double>;

namespace detail {

// Splits a signature into its diagonal part (per-mode number powers) and
// off-diagonal residue.
inline void split_diag(const MonoSig& s, std::vector<int>& npow, MonoSig& resid) {
  npow.assign(s.size(), 0);
  resid.assign(s.size(), ModeExp{});
  for (std::size_t m = 0; m < s.size(); ++m) {
    int k = std::min(s[m].c, s[m].a);
    npow[m] = k;
    resid[m] = ModeExp{s[m].c - k, s[m].a - k};
  }
}

inline double mean_for(const ModeSet& ctx, const MeanMap& means, std::size_t mode) {
  auto it = means.find(ctx.mode(mode).label);
  if (it == means.end())
    throw std::invalid_argument("mean_field_reduce: no mean supplied for mode '" +
                                ctx.mode(mode).label + "'");
  return it->second;
}

// Key of an operator product  n1^p1 n2^p2 ... * residue  (number powers
// multiplying the residue monomial from the left).
struct PowerKey {
  std::vector<int> npow;
  MonoSig resid;
  bool operator<(const PowerKey& o) const {
    if (npow != o.npow) return npow < o.npow;
    return resid < o.resid;
  }
};

// Reconstructs the left-ordered operator product n^p m^q ... * residue.
inline OperatorPolynomial from_power_key(const ModeSet& ctx, const PowerKey& key, cplx coeff) {
  auto r = OperatorPolynomial::monomial(ctx, key.resid, coeff);
  for (std::size_t m = 0; m < key.npow.size(); ++m) {
    auto nop = OperatorPolynomial::number(ctx, ctx.mode(m).label);
    for (int j = 0; j < key.npow[m]; ++j) r = multiply(nop, r);
  }
  return r;
}

// Expands a polynomial onto left-ordered number-power products by greedy
// elimination of the highest-diagonal monomials.
inline std::map<PowerKey, cplx> to_power_form(const OperatorPolynomial& p) {
  std::map<PowerKey, cplx> out;
  OperatorPolynomial rest = p;
  std::vector<int> npow;
  MonoSig resid;
  for (;;) {
    // locate the monomial with the largest total diagonal power
    int best = -1;
    MonoSig pick;
    cplx coeff = 0.0;
    for (const auto& [sig, c] : rest.terms()) {
      if (std::abs(c) < 1e-13) continue;
      split_diag(sig, npow, resid);
      int tot = 0;
      for (int k : npow) tot += k;
      if (tot > best) {
        best = tot;
        pick = sig;
        coeff = c;
      }
    }
    if (best < 0) break;
    split_diag(pick, npow, resid);
    PowerKey key{npow, resid};
    out[key] += coeff;
    rest -= from_power_key(rest.context(), key, coeff);
  }
  return out;
}

}  // namespace detail

/// Mean-field reduction of a polynomial onto a target span.
///
/// Number operators are replaced by their scalar means where needed so that
/// every surviving monomial lies in the span (plus identity).  Pure-diagonal
/// two-mode cubics n^2 m and n m^2 reduce through the symmetrized rule
/// 4xyz -> x̄(yz) + x̄ȳ z + ȳ z̄ x + z̄ x̄ y, keeping the cross pair; all other
/// excess number factors are peeled plainly as n -> n̄.  An empty span fully
/// scalarizes the number content.
inline OperatorPolynomial mean_field_reduce(const OperatorPolynomial& p,
                                            const MeanMap& means,
                                            const std::vector<OperatorPolynomial>& span = {},
                                            bool drop_unreachable = false) {
  const auto& ctx = p.context();

  // span keys in the power representation (each span element must be a single
  // operator product, which holds for every basis used here)
  std::set<detail::PowerKey> span_keys;
  for (const auto& sp : span)
    for (const auto& [key, c] : detail::to_power_form(sp)) span_keys.insert(key);
  span_keys.insert(detail::PowerKey{std::vector<int>(ctx.size(), 0), MonoSig(ctx.size())});
  auto in_span = [&](const detail::PowerKey& k) { return span_keys.count(k) > 0; };

  auto power = detail::to_power_form(p);
  OperatorPolynomial out(ctx);

  for (const auto& [key, coeff] : power) {
    if (std::abs(coeff) < 1e-14) continue;
    if (in_span(key)) {
      out += detail::from_power_key(ctx, key, coeff);
      continue;
    }
    const auto& npow = key.npow;
    bool diag_only = total_degree(key.resid) == 0;
    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < npow.size(); ++m)
      if (npow[m] > 0) active.push_back(m);

    if (diag_only && active.size() == 2 && npow[active[0]] + npow[active[1]] == 3) {
      // two-mode cubic x²y: symmetrized rule 4x(xy) -> x̄(xy) + x̄²y + 2x̄ȳx
      std::size_t x = npow[active[0]] == 2 ? active[0] : active[1];
      std::size_t y = x == active[0] ? active[1] : active[0];
      double xbar = detail::mean_for(ctx, means, x);
      double ybar = detail::mean_for(ctx, means, y);
      auto nx = OperatorPolynomial::number(ctx, ctx.mode(x).label);
      auto ny = OperatorPolynomial::number(ctx, ctx.mode(y).label);
      out += (coeff * 0.25 * xbar) * multiply(nx, ny);
      out += (coeff * 0.25 * xbar * xbar) * ny;
      out += (coeff * 0.5 * xbar * ybar) * nx;
      continue;
    }
    if (diag_only && active.size() == 2 && npow[active[0]] == 1 && npow[active[1]] == 1) {
      // pair rule 2xy -> x̄y + ȳx
      double x = detail::mean_for(ctx, means, active[0]);
      double y = detail::mean_for(ctx, means, active[1]);
      out += (coeff * 0.5 * x) * OperatorPolynomial::number(ctx, ctx.mode(active[1]).label);
      out += (coeff * 0.5 * y) * OperatorPolynomial::number(ctx, ctx.mode(active[0]).label);
      continue;
    }

    // peel the fewest number quanta that land the product in the span
    std::vector<int> best_peel;
    int best_cost = std::numeric_limits<int>::max();
    std::vector<int> peel(npow.size(), 0);
    std::function<void(std::size_t)> search = [&](std::size_t mode) {
      if (mode == npow.size()) {
        detail::PowerKey cand = key;
        int cost = 0;
        for (std::size_t m = 0; m < npow.size(); ++m) {
          cand.npow[m] -= peel[m];
          cost += peel[m];
        }
        if (in_span(cand) && cost < best_cost) {
          best_cost = cost;
          best_peel = peel;
        }
        return;
      }
      for (int j = 0; j <= npow[mode]; ++j) {
        peel[mode] = j;
        search(mode + 1);
      }
      peel[mode] = 0;
    };
    search(0);

    bool reachable = best_cost < std::numeric_limits<int>::max();
    if (!reachable && drop_unreachable && total_degree(key.resid) > 0) continue;
    detail::PowerKey work = key;
    double scalar = 1.0;
    const auto& chosen = reachable ? best_peel : npow;
    for (std::size_t m = 0; m < npow.size(); ++m) {
      work.npow[m] -= chosen[m];
      for (int j = 0; j < chosen[m]; ++j) scalar *= detail::mean_for(ctx, means, m);
    }
    out += detail::from_power_key(ctx, work, coeff * scalar);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convenience: named second-order operators used throughout

struct OpSet {
  ModeSet ctx;
  OperatorPolynomial a, ad, b, bd, n, m, c, cd, d, dd, one;

  static OpSet two_mode(const std::string& opt = "a", const std::string& mech = "b") {
    OpSet s{ModeSet({{opt, ModeKind::photonic}, {mech, ModeKind::phononic}}),
            {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    const auto& ctx = s.ctx;
    s.a = OperatorPolynomial::annihilator(ctx, opt);
    s.ad = OperatorPolynomial::creator(ctx, opt);
    s.b = OperatorPolynomial::annihilator(ctx, mech);
    s.bd = OperatorPolynomial::creator(ctx, mech);
    s.n = OperatorPolynomial::number(ctx, opt);
    s.m = OperatorPolynomial::number(ctx, mech);
    s.c = OperatorPolynomial::half_square(ctx, opt);
    s.cd = s.c.dagger();
    s.d = OperatorPolynomial::half_square(ctx, mech);
    s.dd = s.d.dagger();
    s.one = OperatorPolynomial::identity(ctx);
    return s;
  }

  static OpSet one_mode(const std::string& opt = "a") {
    OpSet s{ModeSet({{opt, ModeKind::photonic}}),
            {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    const auto& ctx = s.ctx;
    s.a = OperatorPolynomial::annihilator(ctx, opt);
    s.ad = OperatorPolynomial::creator(ctx, opt);
    s.n = OperatorPolynomial::number(ctx, opt);
    s.c = OperatorPolynomial::half_square(ctx, opt);
    s.cd = s.c.dagger();
    s.one = OperatorPolynomial::identity(ctx);
    s.b = s.bd = s.m = s.d = s.dd = OperatorPolynomial::zero(ctx);
    return s;
  }
};

}  // namespace hoops
