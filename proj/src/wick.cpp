#include "qfock/wick.hpp"

#include "qfock/errors.hpp"

#include <algorithm>
#include <memory>

namespace qfock {

FieldPolynomial::FieldPolynomial(const TruncationParams& params) : params_(params) { params_.validate(); }

FieldPolynomial FieldPolynomial::constant(const TruncationParams& params, double c) {
    FieldPolynomial p(params);
    p.add_term({}, c);
    return p;
}

int FieldPolynomial::degree() const {
    int deg = -1;
    for (const auto& [m, c] : terms_) deg = std::max(deg, static_cast<int>(m.size()));
    return deg;
}

void FieldPolynomial::add_term(const Monomial& m, double c) {
    for (const auto& l : m) {
        if (l.index < 0 || l.index >= params_.d) throw PreconditionError("field letter outside alphabet");
    }
    const double v = (terms_[m] += c);
    if (v == 0.0) terms_.erase(m);
}

FieldPolynomial FieldPolynomial::adjoint() const {
    FieldPolynomial out(params_);
    for (const auto& [m, c] : terms_) out.add_term(Monomial(m.rbegin(), m.rend()), c);
    return out;
}

namespace {

// Monomials sharing their rightmost letters share work.
struct Trie {
    double coef = 0.0;
    std::map<FieldLetter, std::unique_ptr<Trie>> children;
};

void evaluate(const Trie& node, const GradedArray& v, double q, GradedArray& acc) {
    if (node.coef != 0.0) acc.axpy(node.coef, v);
    for (const auto& [letter, child] : node.children) {
        GradedArray w(v.d(), v.N());
        apply_letter_field(letter.side, letter.index, q, v, w);
        evaluate(*child, w, q, acc);
    }
}

}  // namespace

GradedArray FieldPolynomial::apply(const GradedArray& v) const {
    if (v.d() != params_.d || v.N() != params_.N) throw PreconditionError("apply: vector lives in another space");
    Trie root;
    for (const auto& [m, c] : terms_) {
        Trie* node = &root;
        for (auto it = m.rbegin(); it != m.rend(); ++it) {
            auto& slot = node->children[*it];
            if (!slot) slot = std::make_unique<Trie>();
            node = slot.get();
        }
        node->coef += c;
    }
    GradedArray acc(v.d(), v.N());
    evaluate(root, v, params_.q, acc);
    return acc;
}

FockVector FieldPolynomial::apply(const FockVector& v) const {
    if (!(v.params() == params_)) throw PreconditionError("apply: vector lives in another space");
    return to_fock(apply(to_graded(v)), params_);
}

FockOperator FieldPolynomial::to_operator(OperatorTag tag) const {
    return materialize(params_, tag, "field polynomial of degree " + std::to_string(degree()),
                       [this](const GradedArray& in, GradedArray& out) { out = apply(in); });
}

FieldPolynomial operator+(const FieldPolynomial& a, const FieldPolynomial& b) {
    if (!(a.params_ == b.params_)) throw PreconditionError("polynomials act on different spaces");
    FieldPolynomial out = a;
    for (const auto& [m, c] : b.terms_) out.add_term(m, c);
    return out;
}

FieldPolynomial operator*(double c, const FieldPolynomial& a) {
    FieldPolynomial out(a.params_);
    if (c == 0.0) return out;
    for (const auto& [m, x] : a.terms_) out.add_term(m, c * x);
    return out;
}

FieldPolynomial operator*(const FieldPolynomial& a, const FieldPolynomial& b) {
    if (!(a.params_ == b.params_)) throw PreconditionError("polynomials act on different spaces");
    FieldPolynomial out(a.params_);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            FieldPolynomial::Monomial m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            out.add_term(m, ca * cb);
        }
    }
    return out;
}

int homogeneous_degree(const FockVector& v) {
    if (v.is_zero()) throw PreconditionError("Wick word of the zero vector has no degree");
    const int k = v.coeffs().begin()->first.degree();
    if (!v.is_homogeneous(k)) throw PreconditionError("Wick recursion needs a homogeneous vector");
    return k;
}

namespace {

using Word = std::vector<int>;
using LetterPoly = std::map<Word, double>;

void accumulate(LetterPoly& dst, const LetterPoly& src, double c) {
    if (c == 0.0) return;
    for (const auto& [m, x] : src) {
        const double v = (dst[m] += c * x);
        if (v == 0.0) dst.erase(m);
    }
}

double qpow(double q, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= q;
    return r;
}

Word drop_slot(const Word& w, std::size_t i) {
    Word r = w;
    r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
    return r;
}

// Basis-word Wick polynomials in letter indices; monomials read in product order.
class WickRecursion {
public:
    WickRecursion(double q, Side side) : q_(q), side_(side) {}

    const LetterPoly& of(const Word& w) {
        if (auto it = memo_.find(w); it != memo_.end()) return it->second;
        LetterPoly out;
        if (w.empty()) {
            out[{}] = 1.0;
        } else if (side_ == Side::left) {
            const int a = w.front();
            const Word rest(w.begin() + 1, w.end());
            for (const auto& [m, c] : of(rest)) {
                Word mm{a};
                mm.insert(mm.end(), m.begin(), m.end());
                out[mm] += c;
            }
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (rest[i] != a) continue;
                accumulate(out, of(drop_slot(rest, i)), -qpow(q_, static_cast<int>(i)));
            }
        } else {
            const int a = w.back();
            const Word rest(w.begin(), w.end() - 1);
            for (const auto& [m, c] : of(rest)) {
                Word mm{a};
                mm.insert(mm.end(), m.begin(), m.end());
                out[mm] += c;
            }
            const auto len = rest.size();
            for (std::size_t i = 0; i < len; ++i) {
                if (rest[i] != a) continue;
                accumulate(out, of(drop_slot(rest, i)), -qpow(q_, static_cast<int>(len - 1 - i)));
            }
        }
        return memo_.emplace(w, std::move(out)).first->second;
    }

private:
    double q_;
    Side side_;
    std::map<Word, LetterPoly> memo_;
};

FieldPolynomial wick_impl(const FockVector& eta, Side side) {
    homogeneous_degree(eta);
    const auto& p = eta.params();
    WickRecursion rec(p.q, side);
    LetterPoly total;
    for (const auto& [w, c] : eta.coeffs()) accumulate(total, rec.of(w.letters), c);
    FieldPolynomial out(p);
    for (const auto& [m, c] : total) {
        FieldPolynomial::Monomial mono;
        mono.reserve(m.size());
        for (int a : m) mono.push_back({side, a});
        out.add_term(mono, c);
    }
    return out;
}

}  // namespace

FieldPolynomial wick_polynomial(const FockVector& eta) { return wick_impl(eta, Side::left); }

FieldPolynomial right_wick_polynomial(const FockVector& eta) { return wick_impl(eta, Side::right); }

FockOperator wick(const FockVector& eta) { return wick_polynomial(eta).to_operator(OperatorTag::wick); }

FockOperator right_wick(const FockVector& eta) {
    return right_wick_polynomial(eta).to_operator(OperatorTag::right_wick);
}

}  // namespace qfock
