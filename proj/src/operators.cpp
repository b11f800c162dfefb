#include "qfock/operators.hpp"

#include "qfock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qfock {

std::string to_string(OperatorTag tag) {
    switch (tag) {
        case OperatorTag::identity: return "identity";
        case OperatorTag::creation: return "creation";
        case OperatorTag::annihilation: return "annihilation";
        case OperatorTag::field: return "field";
        case OperatorTag::wick: return "wick";
        case OperatorTag::right_creation: return "right_creation";
        case OperatorTag::right_annihilation: return "right_annihilation";
        case OperatorTag::right_field: return "right_field";
        case OperatorTag::right_wick: return "right_wick";
        case OperatorTag::composite: return "composite";
    }
    return "unknown";
}

namespace {

Eigen::Index block_dim(const TruncationParams& p, int k) {
    return static_cast<Eigen::Index>(checked_pow(static_cast<std::uint64_t>(p.d), k));
}

void require_same(const FockOperator& a, const FockOperator& b) {
    if (!(a.params() == b.params())) throw PreconditionError("operators act on different truncated spaces");
}

void require_dense_size(const TruncationParams& p) {
    if (fock_dim(p.d, p.N) > kOperatorMaxDim)
        throw PreconditionError("dense operator on fock_dim " + std::to_string(fock_dim(p.d, p.N)) +
                                " exceeds guard " + std::to_string(kOperatorMaxDim));
}

const FockVector& require_letter_vector(const FockVector& xi) {
    if (xi.is_zero() || !xi.is_homogeneous(1))
        throw PreconditionError("creation/annihilation need a homogeneous degree-1 vector");
    return xi;
}

}  // namespace

// ---------------------------------------------------------------------------
// FockOperator

FockOperator::FockOperator(const TruncationParams& params, OperatorTag tag, std::string generator)
    : params_(params), tag_(tag), generator_(std::move(generator)) {
    params_.validate();
}

const Eigen::MatrixXd& FockOperator::block(int k_out, int k_in) const {
    static const Eigen::MatrixXd empty;
    auto it = blocks_.find({k_out, k_in});
    return it == blocks_.end() ? empty : it->second;
}

void FockOperator::set_block(int k_out, int k_in, Eigen::MatrixXd m) {
    if (k_out < 0 || k_in < 0 || k_out > params_.N || k_in > params_.N)
        throw PreconditionError("operator block degree outside truncation");
    if (m.rows() != block_dim(params_, k_out) || m.cols() != block_dim(params_, k_in))
        throw PreconditionError("operator block has the wrong shape");
    blocks_[{k_out, k_in}] = std::move(m);
}

void FockOperator::add_block(int k_out, int k_in, const Eigen::MatrixXd& m) {
    auto it = blocks_.find({k_out, k_in});
    if (it == blocks_.end()) {
        set_block(k_out, k_in, m);
    } else {
        it->second += m;
    }
}

std::vector<FockOperator::Key> FockOperator::degrees() const {
    std::vector<Key> out;
    for (const auto& [key, m] : blocks_) out.push_back(key);
    return out;
}

GradedArray FockOperator::apply(const GradedArray& v) const {
    if (v.d() != params_.d || v.N() != params_.N) throw PreconditionError("apply: vector lives in another space");
    GradedArray out(params_);
    for (const auto& [key, m] : blocks_) {
        const auto [ko, ki] = key;
        if (!v.has(ki)) continue;
        auto src = v.block(ki);
        Eigen::Map<const Eigen::VectorXd> x(src.data(), static_cast<Eigen::Index>(src.size()));
        auto dst = out.mutable_block(ko);
        Eigen::Map<Eigen::VectorXd> y(dst.data(), static_cast<Eigen::Index>(dst.size()));
        y.noalias() += m * x;
    }
    return out;
}

FockVector FockOperator::apply(const FockVector& v) const {
    if (!(v.params() == params_)) throw PreconditionError("apply: vector lives in another space");
    return to_fock(apply(to_graded(v)), params_);
}

FockOperator FockOperator::retagged(OperatorTag tag, std::string generator) const {
    FockOperator out = *this;
    out.tag_ = tag;
    out.generator_ = std::move(generator);
    return out;
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    require_same(a, b);
    FockOperator out = a.retagged(OperatorTag::composite, "(" + a.generator() + ")+(" + b.generator() + ")");
    for (const auto& [key, m] : b.blocks()) out.add_block(key.first, key.second, m);
    return out;
}

FockOperator operator*(double c, const FockOperator& a) {
    FockOperator out(a.params(), a.tag(), a.generator());
    for (const auto& [key, m] : a.blocks()) out.set_block(key.first, key.second, c * m);
    return out;
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) { return a + (-1.0) * b; }

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    require_same(a, b);
    FockOperator out(a.params(), OperatorTag::composite, "(" + a.generator() + ")*(" + b.generator() + ")");
    for (const auto& [kb, mb] : b.blocks()) {
        const auto [mid, ki] = kb;
        for (const auto& [ka, ma] : a.blocks()) {
            if (ka.second != mid) continue;
            out.add_block(ka.first, ki, ma * mb);
        }
    }
    return out;
}

double max_abs_diff(const FockOperator& a, const FockOperator& b, int max_in_degree) {
    require_same(a, b);
    std::set<FockOperator::Key> keys;
    for (const auto& [k, m] : a.blocks()) keys.insert(k);
    for (const auto& [k, m] : b.blocks()) keys.insert(k);
    double worst = 0.0;
    for (const auto& key : keys) {
        if (max_in_degree >= 0 && key.second > max_in_degree) continue;
        const auto& ma = a.block(key.first, key.second);
        const auto& mb = b.block(key.first, key.second);
        if (ma.size() == 0) {
            worst = std::max(worst, mb.cwiseAbs().maxCoeff());
        } else if (mb.size() == 0) {
            worst = std::max(worst, ma.cwiseAbs().maxCoeff());
        } else {
            worst = std::max(worst, (ma - mb).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

FockOperator identity_operator(const TruncationParams& params) {
    FockOperator out(params, OperatorTag::identity, "1");
    for (int k = 0; k <= params.N; ++k) {
        const auto n = block_dim(params, k);
        out.set_block(k, k, Eigen::MatrixXd::Identity(n, n));
    }
    return out;
}

FockOperator materialize(const TruncationParams& params, OperatorTag tag, std::string generator,
                         const std::function<void(const GradedArray&, GradedArray&)>& apply) {
    require_dense_size(params);
    FockOperator out(params, tag, std::move(generator));
    for (int ki = 0; ki <= params.N; ++ki) {
        const auto n_in = block_dim(params, ki);
        std::vector<GradedArray> cols(static_cast<std::size_t>(n_in), GradedArray(params));
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index c = 0; c < n_in; ++c) {
            GradedArray e(params);
            e.mutable_block(ki)[static_cast<std::size_t>(c)] = 1.0;
            apply(e, cols[static_cast<std::size_t>(c)]);
        }
        for (int ko = 0; ko <= params.N; ++ko) {
            bool any = false;
            for (const auto& col : cols) {
                if (!col.has(ko)) continue;
                auto b = col.block(ko);
                if (std::any_of(b.begin(), b.end(), [](double x) { return x != 0.0; })) {
                    any = true;
                    break;
                }
            }
            if (!any) continue;
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(block_dim(params, ko), n_in);
            for (Eigen::Index c = 0; c < n_in; ++c) {
                const auto& col = cols[static_cast<std::size_t>(c)];
                if (!col.has(ko)) continue;
                auto b = col.block(ko);
                m.col(c) = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
            }
            out.set_block(ko, ki, std::move(m));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Creation / annihilation / field

namespace {

FockOperator creation_impl(const FockVector& xi, Side side) {
    require_letter_vector(xi);
    const auto& p = xi.params();
    const auto c = letter_coeffs(xi);
    const auto d = static_cast<Eigen::Index>(p.d);
    FockOperator out(p, side == Side::left ? OperatorTag::creation : OperatorTag::right_creation,
                     (side == Side::left ? "l(" : "r(") + std::to_string(xi.coeffs().size()) + "-term)");
    for (int k = 0; k < p.N; ++k) {
        const auto n = block_dim(p, k);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n * d, n);
        for (Eigen::Index a = 0; a < d; ++a) {
            const double x = c[static_cast<std::size_t>(a)];
            if (x == 0.0) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                const auto row = side == Side::left ? a * n + j : j * d + a;
                m(row, j) = x;
            }
        }
        out.set_block(k + 1, k, std::move(m));
    }
    return out;
}

// Metric adjoint of a creation-type operator.
FockOperator annihilation_from(const GramCache& cache, const FockOperator& cre, OperatorTag tag) {
    FockOperator adj = adjoint(cache, cre);
    return adj.retagged(tag, cre.generator() + "^*");
}

void require_cache(const GramCache& cache, const FockVector& xi) {
    if (!(cache.params() == xi.params())) throw PreconditionError("Gram cache belongs to another space");
}

}  // namespace

FockOperator creation(const FockVector& xi) { return creation_impl(xi, Side::left); }

FockOperator right_creation(const FockVector& xi) { return creation_impl(xi, Side::right); }

FockOperator annihilation(const GramCache& cache, const FockVector& xi) {
    require_cache(cache, xi);
    return annihilation_from(cache, creation(xi), OperatorTag::annihilation);
}

FockOperator right_annihilation(const GramCache& cache, const FockVector& xi) {
    require_cache(cache, xi);
    return annihilation_from(cache, right_creation(xi), OperatorTag::right_annihilation);
}

FockOperator annihilation_explicit(const FockVector& xi) {
    require_letter_vector(xi);
    const auto c = letter_coeffs(xi);
    const double q = xi.params().q;
    return materialize(xi.params(), OperatorTag::annihilation, "l*(slot formula)",
                       [&](const GradedArray& in, GradedArray& out) { annihilate(Side::left, c, q, in, out); });
}

FockOperator field(const GramCache& cache, const FockVector& xi) {
    return (creation(xi) + annihilation(cache, xi)).retagged(OperatorTag::field, "s");
}

FockOperator right_field(const GramCache& cache, const FockVector& xi) {
    return (right_creation(xi) + right_annihilation(cache, xi)).retagged(OperatorTag::right_field, "t");
}

FockOperator adjoint(const GramCache& cache, const FockOperator& T) {
    if (!(cache.params() == T.params())) throw PreconditionError("Gram cache belongs to another space");
    FockOperator out(T.params(), T.tag(), T.generator() + "^*");
    for (const auto& [key, m] : T.blocks()) {
        const auto [ko, ki] = key;
        const auto& g_in = cache.block(ki);
        const auto& g_out = cache.block(ko);
        out.set_block(ki, ko, g_in.inverse() * m.transpose() * g_out.matrix());
    }
    return out;
}

double op_norm(const GramCache& cache, const FockOperator& T) {
    if (!(cache.params() == T.params())) throw PreconditionError("Gram cache belongs to another space");
    if (T.blocks().empty()) return 0.0;
    std::set<int> outs, ins;
    for (const auto& [key, m] : T.blocks()) {
        outs.insert(key.first);
        ins.insert(key.second);
    }
    const auto& p = T.params();
    std::map<int, Eigen::Index> row_off, col_off;
    Eigen::Index rows = 0, cols = 0;
    for (int k : outs) {
        row_off[k] = rows;
        rows += block_dim(p, k);
    }
    for (int k : ins) {
        col_off[k] = cols;
        cols += block_dim(p, k);
    }
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& [key, m] : T.blocks()) {
        const auto [ko, ki] = key;
        S.block(row_off[ko], col_off[ki], m.rows(), m.cols()) =
            cache.block(ko).sqrt() * m * cache.block(ki).inv_sqrt();
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues()(0);
}

FockVector involution_J(const FockVector& v) {
    FockVector out(v.params());
    for (const auto& [w, c] : v.coeffs()) {
        MultiIndex r(std::vector<int>(w.letters.rbegin(), w.letters.rend()));
        out.set(r, c);
    }
    return out;
}

}  // namespace qfock
