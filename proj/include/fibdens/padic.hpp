#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibdens/errors.hpp"
#include "fibdens/modfib.hpp"
#include "fibdens/primes.hpp"
#include "fibdens/rational.hpp"

namespace fibdens::padic {

// Coordinate basis for elements of O_K:
//   Rational  a            in Z_p          (p = 1,4 mod 5)
//   Sqrt5     a + b sqrt5  in Z_p[sqrt5]   (p = 2,3 mod 5, p odd)
//   Phi       a + b phi    in Z_2[phi]     (p = 2)
enum class Basis { Rational, Sqrt5, Phi };

struct Valuation {
    int value = 0;
    bool infinite = false; // indistinguishable from 0 at current precision

    friend bool operator==(const Valuation&, const Valuation&) = default;
};

// A finite-precision element of Z_p or the quadratic extension: both
// coordinates are residues mod p^prec. Elements are immutable values.
class Element {
public:
    Element(std::uint64_t p, Basis basis, Integer a, Integer b, int prec)
        : p_(p), basis_(basis), prec_(prec),
          pk_(pow_u64(p, static_cast<unsigned long>(prec))),
          a_(std::move(a)), b_(std::move(b)) {
        if (prec_ < 1) throw std::invalid_argument("Element: precision must be >= 1");
        if (basis_ == Basis::Phi && p_ != 2)
            throw std::invalid_argument("Element: Phi basis is only for p = 2");
        if (basis_ == Basis::Sqrt5 && (p_ == 2 || p_ % 5 == 1 || p_ % 5 == 4))
            throw std::invalid_argument("Element: Sqrt5 basis requires odd p = 2,3 mod 5");
        reduce(a_);
        reduce(b_);
        if (basis_ == Basis::Rational && b_ != 0)
            throw std::invalid_argument("Element: Rational basis has no second coordinate");
    }

    static Element from_integer(std::uint64_t p, Basis basis, const Integer& n, int prec) {
        return Element(p, basis, n, 0, prec);
    }
    static Element zero(std::uint64_t p, Basis basis, int prec) {
        return from_integer(p, basis, 0, prec);
    }
    static Element one(std::uint64_t p, Basis basis, int prec) {
        return from_integer(p, basis, 1, prec);
    }

    std::uint64_t p() const { return p_; }
    Basis basis() const { return basis_; }
    int prec() const { return prec_; }
    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    const Integer& modulus() const { return pk_; }

    // Residue field size is p^f.
    int f() const { return basis_ == Basis::Rational ? 1 : 2; }

    Element with_prec(int new_prec) const {
        if (new_prec > prec_)
            throw precision_error("with_prec: cannot raise claimed precision");
        return Element(p_, basis_, a_, b_, new_prec);
    }

    Element operator-() const { return Element(p_, basis_, -a_, -b_, prec_); }

    friend Element operator+(const Element& x, const Element& y) {
        int prec = x.match(y);
        return Element(x.p_, x.basis_, x.a_ + y.a_, x.b_ + y.b_, prec);
    }
    friend Element operator-(const Element& x, const Element& y) {
        int prec = x.match(y);
        return Element(x.p_, x.basis_, x.a_ - y.a_, x.b_ - y.b_, prec);
    }
    friend Element operator*(const Element& x, const Element& y) {
        int prec = x.match(y);
        switch (x.basis_) {
        case Basis::Rational:
            return Element(x.p_, x.basis_, x.a_ * y.a_, 0, prec);
        case Basis::Sqrt5:
            return Element(x.p_, x.basis_, x.a_ * y.a_ + 5 * x.b_ * y.b_,
                           x.a_ * y.b_ + x.b_ * y.a_, prec);
        case Basis::Phi: // phi^2 = phi + 1
            return Element(x.p_, x.basis_, x.a_ * y.a_ + x.b_ * y.b_,
                           x.a_ * y.b_ + x.b_ * y.a_ + x.b_ * y.b_, prec);
        }
        throw std::logic_error("unreachable");
    }

    Element scaled(const Integer& c) const {
        return Element(p_, basis_, c * a_, c * b_, prec_);
    }

    // Galois conjugate: sqrt5 -> -sqrt5, phi -> 1 - phi.
    Element conj() const {
        switch (basis_) {
        case Basis::Rational: return *this;
        case Basis::Sqrt5:    return Element(p_, basis_, a_, -b_, prec_);
        case Basis::Phi:      return Element(p_, basis_, a_ + b_, -b_, prec_);
        }
        throw std::logic_error("unreachable");
    }

    // Field norm x * conj(x), as a scalar.
    Integer norm() const {
        switch (basis_) {
        case Basis::Rational: return (a_ * a_) % pk_;
        case Basis::Sqrt5:    return ((a_ * a_ - 5 * b_ * b_) % pk_ + pk_) % pk_;
        case Basis::Phi:      return ((a_ * a_ + a_ * b_ - b_ * b_) % pk_ + pk_) % pk_;
        }
        throw std::logic_error("unreachable");
    }

    Valuation valuation() const {
        if (a_ == 0 && b_ == 0) return Valuation{prec_, true};
        int va = coord_valuation(a_);
        int vb = basis_ == Basis::Rational ? prec_ : coord_valuation(b_);
        int v = std::min(va, vb);
        return Valuation{v, false};
    }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_unit() const {
        Valuation v = valuation();
        return !v.infinite && v.value == 0;
    }

    // Multiplicative inverse of a unit.
    Element inverse() const {
        if (!is_unit()) throw std::invalid_argument("inverse: element is not a unit");
        Integer n = norm();
        Integer ninv;
        if (mpz_invert(ninv.get_mpz_t(), n.get_mpz_t(), pk_.get_mpz_t()) == 0)
            throw internal_inconsistency_error("inverse: norm of unit not invertible");
        return conj().scaled(ninv);
    }

    Element pow(Integer e) const {
        if (e < 0) return inverse().pow(-e);
        Element r = one(p_, basis_, prec_);
        Element base = *this;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    // Exact division by p^k; both coordinates must be divisible.
    // The claimed precision drops by k.
    Element shifted_down(int k) const {
        if (k == 0) return *this;
        if (k >= prec_) throw precision_error("shifted_down: precision exhausted");
        Integer q = pow_u64(p_, static_cast<unsigned long>(k));
        if (a_ % q != 0 || b_ % q != 0)
            throw precision_error("shifted_down: coordinates not divisible by p^k");
        return Element(p_, basis_, a_ / q, b_ / q, prec_ - k);
    }

    // General division: divide by the unit part, then shift by the
    // divisor's valuation (which the claimed precision pays for).
    Element div(const Element& y) const {
        Valuation vy = y.valuation();
        if (vy.infinite) throw std::domain_error("div: divisor is zero at this precision");
        if (vy.value == 0) return *this * y.inverse();
        Element yunit = y.shifted_down(vy.value);
        Element q = this->with_prec(std::min(prec_, yunit.prec())) * yunit.inverse();
        return q.shifted_down(vy.value);
    }

    // Agreement of both coordinates mod p^digits.
    bool congruent(const Element& y, int digits) const {
        if (digits > prec_ || digits > y.prec_)
            throw precision_error("congruent: comparison beyond claimed precision");
        Integer q = pow_u64(p_, static_cast<unsigned long>(digits));
        return (a_ - y.a_) % q == 0 && (b_ - y.b_) % q == 0;
    }

    // Base-p digits of a coordinate, least significant first.
    std::vector<unsigned> digits_a(int count) const { return digits_of(a_, count); }
    std::vector<unsigned> digits_b(int count) const { return digits_of(b_, count); }

    // Scalar value of a Rational-basis (or rational-valued) element.
    Integer rational_value(int digits) const {
        if (basis_ != Basis::Rational) {
            Integer q = pow_u64(p_, static_cast<unsigned long>(digits));
            if (b_ % q != 0)
                throw precision_error("rational_value: second coordinate does not vanish");
        }
        return a_ % pow_u64(p_, static_cast<unsigned long>(digits));
    }

private:
    void reduce(Integer& x) const {
        x %= pk_;
        if (x < 0) x += pk_;
    }

    int match(const Element& y) const {
        if (p_ != y.p_ || basis_ != y.basis_)
            throw std::invalid_argument("Element: mixed p or basis in arithmetic");
        return std::min(prec_, y.prec_);
    }

    int coord_valuation(const Integer& x) const {
        if (x == 0) return prec_;
        Integer t = x;
        int v = 0;
        while (v < prec_ && t % static_cast<unsigned long>(p_) == 0) {
            t /= static_cast<unsigned long>(p_);
            ++v;
        }
        return v;
    }

    std::vector<unsigned> digits_of(const Integer& x, int count) const {
        if (count > prec_)
            throw precision_error("digits: requested more digits than claimed precision");
        std::vector<unsigned> out;
        Integer t = x;
        for (int i = 0; i < count; ++i) {
            Integer d = t % static_cast<unsigned long>(p_);
            out.push_back(static_cast<unsigned>(d.get_ui()));
            t /= static_cast<unsigned long>(p_);
        }
        return out;
    }

    std::uint64_t p_;
    Basis basis_;
    int prec_;
    Integer pk_;
    Integer a_, b_;
};

// Natural coordinate basis for O_K at a given prime (p != 5).
inline Basis basis_for_prime(std::uint64_t p) {
    if (p == 2) return Basis::Phi;
    if (p == 5) throw std::invalid_argument("basis_for_prime: p = 5 is unsupported (ramified)");
    std::uint64_t r = p % 5;
    return (r == 1 || r == 4) ? Basis::Rational : Basis::Sqrt5;
}

// Canonical square root of 5 in Z_p for p = 1,4 mod 5: the Hensel lift of
// the residue in {1, ..., (p-1)/2}.
inline Element sqrt5(std::uint64_t p, int prec) {
    if (p == 5 || p % 5 == 2 || p % 5 == 3)
        throw std::invalid_argument("sqrt5: 5 is not a square in Z_p for this p");
    std::uint64_t r0 = 0;
    for (std::uint64_t x = 1; x <= (p - 1) / 2; ++x) {
        if (mulmod_u64(x, x, p) == 5 % p) { r0 = x; break; }
    }
    if (r0 == 0) throw internal_inconsistency_error("sqrt5: no square root found mod p");
    // Newton: r <- r - (r^2 - 5) / (2r), doubling the number of valid digits.
    Integer pk = pow_u64(p, static_cast<unsigned long>(prec));
    Integer r(static_cast<unsigned long>(r0));
    int valid = 1;
    while (valid < prec) {
        Integer denom = 2 * r;
        Integer dinv;
        mpz_invert(dinv.get_mpz_t(), denom.get_mpz_t(), pk.get_mpz_t());
        r = (r - (r * r - 5) * dinv) % pk;
        if (r < 0) r += pk;
        valid *= 2;
    }
    return Element(p, Basis::Rational, r, 0, prec);
}

// Teichmuller lift: the (p^f - 1)th root of unity congruent to x mod p,
// computed by iterating y -> y^(p^f) to a fixed point.
inline Element teichmuller(const Element& x) {
    if (x.p() == 5) throw std::invalid_argument("teichmuller: p = 5 is unsupported");
    if (!x.is_unit()) throw std::invalid_argument("teichmuller: input must be a unit");
    Integer q = pow_u64(x.p(), static_cast<unsigned long>(x.f()));
    Element y = x;
    // Each step gains at least one digit; prec + 2 iterations is a tripwire.
    for (int iter = 0; iter <= x.prec() + 2; ++iter) {
        Element next = y.pow(q);
        if (next.congruent(y, x.prec())) return next;
        y = next;
    }
    throw internal_inconsistency_error("teichmuller: iteration failed to stabilize");
}

// log_p(1 + u) = sum (-1)^(m+1) u^m / m, for |x - 1|_p < 1.
// Claimed precision of the result degrades by the worst nu_p(m) met,
// which operand precision pays for via shifted_down.
inline Element plog(const Element& x) {
    Element u0 = x - Element::one(x.p(), x.basis(), x.prec());
    Valuation vu = u0.valuation();
    if (vu.infinite) return Element::zero(x.p(), x.basis(), x.prec());
    if (vu.value < 1) throw std::domain_error("plog: |x - 1|_p < 1 required");
    std::uint64_t p = x.p();
    int target = x.prec();
    auto logp = [&](std::int64_t m) {
        int l = 0;
        for (std::int64_t t = m; t >= static_cast<std::int64_t>(p); t /= p) ++l;
        return l;
    };
    // m * nu(u) - log_p(m) is increasing, so stop at the first m past target.
    std::int64_t last = 0;
    while ((last + 1) * vu.value - logp(last + 1) <= target) ++last;
    // Division by p^nu(m) drops the claimed precision, but u^m is in fact
    // determined mod p^(target + (m-1) nu) >> p^(target + nu(m)), so padding
    // the working precision by log_p(last) keeps every digit honest.
    int pad = last > 0 ? logp(last) : 0;
    int wprec = target + pad;
    Element u(p, x.basis(), u0.a(), u0.b(), wprec);
    Element sum = Element::zero(p, x.basis(), wprec);
    Element upow = Element::one(p, x.basis(), wprec);
    for (std::int64_t m = 1; m <= last; ++m) {
        upow = upow * u;
        std::int64_t munit = m;
        int s = 0;
        while (munit % p == 0) { munit /= p; ++s; }
        Integer minv;
        Integer mu(static_cast<long>(munit));
        mpz_invert(minv.get_mpz_t(), mu.get_mpz_t(), upow.modulus().get_mpz_t());
        Element term = upow.scaled(minv).shifted_down(s);
        sum = (m % 2 == 1) ? sum + term : sum - term;
    }
    return sum.with_prec(target);
}

// exp_p x = sum x^m / m!, for |x|_p < p^(-1/(p-1)); that is nu >= 1 for
// odd p and nu >= 2 for p = 2.
inline Element pexp(const Element& x) {
    Valuation vx = x.valuation();
    std::uint64_t p = x.p();
    if (vx.infinite) return Element::one(p, x.basis(), x.prec());
    int min_val = p == 2 ? 2 : 1;
    if (vx.value < min_val)
        throw std::domain_error("pexp: argument outside the convergence domain");
    int target = x.prec();
    // nu_p(m!) = (m - s_p(m))/(p - 1), so the term valuation is at least
    // m*(nu - 1/(p-1)); that lower bound is monotone, giving a term cutoff.
    std::int64_t pm1 = static_cast<std::int64_t>(p) - 1;
    std::int64_t last = 0;
    while ((last + 1) * (vx.value * pm1 - 1) <= static_cast<std::int64_t>(target) * pm1)
        ++last;
    // As in plog, x^m carries valuation m nu >= nu_p(m!) + nu, so padding the
    // working precision by nu_p(last!) keeps the claimed digits honest.
    int pad = 0;
    for (Integer q(static_cast<unsigned long>(p)); q <= last; q *= static_cast<unsigned long>(p))
        pad += static_cast<int>(Integer(last / q).get_ui());
    int wprec = target + pad;
    Element xw(p, x.basis(), x.a(), x.b(), wprec);
    Element sum = Element::one(p, x.basis(), wprec);
    Element xpow = Element::one(p, x.basis(), wprec);
    Integer fact_unit = 1; // unit part of m! mod p^wprec
    int fact_s = 0;        // nu_p(m!)
    for (std::int64_t m = 1; m <= last; ++m) {
        std::int64_t munit = m;
        while (munit % p == 0) { munit /= p; ++fact_s; }
        fact_unit = (fact_unit * munit) % xpow.modulus();
        xpow = xpow * xw;
        Integer finv;
        mpz_invert(finv.get_mpz_t(), fact_unit.get_mpz_t(), xpow.modulus().get_mpz_t());
        sum = sum + xpow.scaled(finv).shifted_down(fact_s);
    }
    return sum.with_prec(target);
}

// Newton/Hensel root of f (coefficients low-to-high) near y0, under
// |f(y0)|_p < |f'(y0)|_p^2.
inline Element hensel_root(const std::vector<Element>& coeffs, const Element& y0) {
    if (coeffs.size() < 2) throw std::invalid_argument("hensel_root: need degree >= 1");
    auto eval = [&](const Element& y) {
        Element acc = coeffs.back();
        for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * y + coeffs[i];
        return acc;
    };
    auto eval_deriv = [&](const Element& y) {
        Element acc = coeffs.back().scaled(Integer(static_cast<long>(coeffs.size() - 1)));
        for (std::size_t i = coeffs.size() - 1; i-- > 1;)
            acc = acc * y + coeffs[i].scaled(Integer(static_cast<long>(i)));
        return acc;
    };
    Valuation vf = eval(y0).valuation();
    Valuation vd = eval_deriv(y0).valuation();
    if (vd.infinite || (!vf.infinite && vf.value <= 2 * vd.value))
        throw no_convergence_error("hensel_root: |f(y0)| < |f'(y0)|^2 fails",
                                   vf.infinite ? -1 : vf.value, vd.infinite ? -1 : vd.value);
    Element y = y0;
    for (int iter = 0; iter <= y0.prec() + 4; ++iter) {
        Element fy = eval(y);
        if (fy.is_zero()) return y;
        Element step = fy.div(eval_deriv(y));
        if (step.is_zero()) return y;
        y = y - step.with_prec(std::min(y.prec(), step.prec()));
    }
    throw no_convergence_error("hensel_root: iteration budget exhausted",
                               vf.value, vd.value);
}

// Shared context for the piecewise interpolation at odd p != 5:
// phi, its Teichmuller lift, and L = log_p(phi / omega(phi)).
class Interpolator {
public:
    Interpolator(std::uint64_t p, int prec)
        : p_(p), prec_(prec), basis_(basis_for_prime(p)),
          sqrt5_(make_sqrt5(p, basis_, prec)),
          phi_(make_phi(p, basis_, sqrt5_, prec)),
          omega_(teichmuller(phi_)),
          omegabar_(make_omegabar(basis_, phi_, omega_)),
          log_ratio_(plog(phi_ * omega_.inverse())),
          sqrt5_inv_(sqrt5_.inverse()) {
        if (p == 2) throw std::invalid_argument("Interpolator: use Interpolator2 for p = 2");
        info_ = period_info(p);
    }

    std::uint64_t p() const { return p_; }
    int prec() const { return prec_; }
    const PeriodInfo& period() const { return info_; }
    const Element& phi() const { return phi_; }
    const Element& omega_phi() const { return omega_; }
    const Element& omega_phibar() const { return omegabar_; }
    const Element& sqrt5_element() const { return sqrt5_; }
    const Element& log_phi_ratio() const { return log_ratio_; }

    // Wall exponent read off the p-adic side: nu(phi/omega(phi) - 1).
    Valuation unit_distance() const {
        Element d = phi_ * omega_.inverse() - Element::one(p_, basis_, prec_);
        return d.valuation();
    }

    // F_i(x) = (omega(phi)^i exp(xL) - omega(phibar)^i exp(-xL)) / sqrt5.
    Element interp(std::uint64_t i, const Integer& x) const {
        i %= info_.pi; // omega(phi)^pi = 1
        Element ex = pexp(log_ratio_.scaled(x));
        Element exneg = ex.inverse();
        Element y = omega_.pow(Integer(static_cast<unsigned long>(i))) * ex -
                    omegabar_.pow(Integer(static_cast<unsigned long>(i))) * exneg;
        Element res = y * sqrt5_inv_;
        return res;
    }

    // F_i(x) as a residue mod p^digits (the extension coordinate must vanish).
    Integer interp_value(std::uint64_t i, const Integer& x, int digits) const {
        return interp(i, x).rational_value(digits);
    }

    // zeta = omega(phi)^i for a Lucas zero i; lies in sqrt5 Z_p.
    Element zeta(std::uint64_t i) const {
        return omega_.pow(Integer(static_cast<unsigned long>(i % info_.pi)));
    }

    // c_i = omega(phi)^i * 2 / sqrt5, a p-adic integer for Lucas zeros i.
    Integer branch_center(std::uint64_t i, int digits) const {
        Element c = zeta(i).scaled(2) * sqrt5_inv_;
        return c.rational_value(digits);
    }

    // zeta * sqrt5 mod p, the unit gating quadratic-residue offsets.
    std::uint64_t zeta_sqrt5_mod_p(std::uint64_t i) const {
        Element zs = zeta(i) * sqrt5_;
        Integer r = zs.rational_value(1);
        return r.get_ui();
    }

private:
    static Element make_sqrt5(std::uint64_t p, Basis basis, int prec) {
        if (basis == Basis::Rational) return sqrt5(p, prec);
        return Element(p, basis, 0, 1, prec);
    }
    static Element make_phi(std::uint64_t p, Basis basis, const Element& s5, int prec) {
        // phi = (1 + sqrt5) / 2; 2 is a unit for odd p.
        Element num = Element::one(p, basis, prec) + s5;
        Integer two(2), inv2;
        mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), num.modulus().get_mpz_t());
        return num.scaled(inv2);
    }
    static Element make_omegabar(Basis basis, const Element& phi, const Element& omega) {
        // Conjugation commutes with reduction mod p, so omega(phibar) = conj(omega(phi))
        // in the extension; in the rational case lift phibar separately.
        if (basis != Basis::Rational) return omega.conj();
        Element phibar = Element::one(phi.p(), basis, phi.prec()) - phi;
        return teichmuller(phibar);
    }

    std::uint64_t p_;
    int prec_;
    Basis basis_;
    Element sqrt5_;
    Element phi_;
    Element omega_;
    Element omegabar_;
    Element log_ratio_;
    Element sqrt5_inv_;
    PeriodInfo info_;
};

// The p = 2 interpolation: six functions F_{i,r} on r + 2 Z_2, built from
// log_2((phi/omega(phi))^2), which has valuation 2 and so lies in the
// domain of exp_2.
class Interpolator2 {
public:
    explicit Interpolator2(int prec)
        : phi_(Element(2, Basis::Phi, 0, 1, prec)),
          omega_(teichmuller(phi_)),
          sqrt5_(Element(2, Basis::Phi, -1, 2, prec)), // sqrt5 = 2 phi - 1
          log_ratio_sq_(plog((phi_ * omega_.inverse()).pow(2))),
          sqrt5_inv_(sqrt5_.inverse()) {}

    const Element& phi() const { return phi_; }
    const Element& omega_phi() const { return omega_; }
    const Element& log_ratio_sq() const { return log_ratio_sq_; }

    // F_{i,r}(r + 2x) with i in {0,1,2}, r in {0,1}.
    Element interp(int i, int r, const Integer& x) const {
        int k = ((i - r) % 3 + 3) % 3;
        Element ex = pexp(log_ratio_sq_.scaled(x));
        Element exneg = ex.inverse();
        Element left = omega_.pow(k) * phi_.pow(r) * ex;
        Element right = omega_.conj().pow(k) * phi_.conj().pow(r) * exneg;
        return (left - right) * sqrt5_inv_;
    }

    // F_{(n mod 3), (n mod 2)}(n) as a residue mod 2^digits.
    Integer interp_at(std::uint64_t n, int digits) const {
        Integer x(static_cast<unsigned long>(n / 2));
        return interp(static_cast<int>(n % 3), static_cast<int>(n % 2), x)
            .rational_value(digits);
    }

private:
    Element phi_;
    Element omega_;
    Element sqrt5_;
    Element log_ratio_sq_;
    Element sqrt5_inv_;
};

// Render a scalar digit expansion the way the CLI prints it:
// least-significant digit first, space separated.
inline std::string render_digits(const std::vector<unsigned>& digits) {
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(digits[i]);
    }
    return out;
}

} // namespace fibdens::padic
