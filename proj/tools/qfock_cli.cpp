#include "qfock/errors.hpp"
#include "qfock/moments.hpp"
#include "qfock/report.hpp"
#include "qfock/separation.hpp"
#include "qfock/symmetrizer.hpp"
#include "qfock/wick.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace {

using namespace qfock;

enum Exit { ok = 0, precondition = 1, numerical = 2, usage = 3 };

struct RunConfig {
    double q = 0.0;
    int d = 2;
    int k = 2;
    std::optional<int> N;
    int n = 4;
    double tol = 1e-10;
    bool tol_given = false;
    bool k_given = false;
    bool d_given = false;
    std::uint64_t seed = 0;
    int k_max = 200;
    double delta_floor = 0.01;
    std::string f_mode = "unit_vector";
    std::string out_format = "json";
    std::string out;
};

void add_flags(CLI::App* app, RunConfig& c) {
    app->add_option("--q", c.q, "deformation parameter, |q| < 1")->capture_default_str();
    app->add_option("--d", c.d, "alphabet size")->capture_default_str();
    app->add_option("--k", c.k, "tensor degree")->capture_default_str();
    app->add_option("--N", c.N, "truncation degree (default 2k+2; n for moments)");
    app->add_option("--n", c.n, "moment word length")->capture_default_str();
    app->add_option("--tol", c.tol, "tolerance")->capture_default_str();
    app->add_option("--seed", c.seed, "seed for randomized inputs")->capture_default_str();
    app->add_option("--k-max", c.k_max, "certificate scan limit")->capture_default_str();
    app->add_option("--delta-floor", c.delta_floor, "certificate gap floor")->capture_default_str();
    app->add_option("--f-mode", c.f_mode, "witness normalization")
        ->check(CLI::IsMember({"unit_wick_norm", "unit_vector"}))
        ->capture_default_str();
    app->add_option("--out-format", c.out_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app->add_option("--out", c.out, "output path (default stdout)");
}

bool csv(const RunConfig& c) { return c.out_format == "csv"; }
int truncation(const RunConfig& c) { return c.N.value_or(2 * c.k + 2); }

void check_common(const RunConfig& c) {
    if (!(c.tol > 0.0)) throw PreconditionError("tol must be > 0");
    if (c.k < 0) throw PreconditionError("k must be >= 0");
    if (c.N && *c.N < c.k) throw PreconditionError("requires 0 <= k <= N");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// One header line and one value line from a flat JSON object.
std::string flat_csv(const Json& j) {
    std::string head, vals;
    for (const auto& [key, v] : j.items()) {
        if (!head.empty()) {
            head += ',';
            vals += ',';
        }
        head += key;
        vals += v.is_number_float() ? format_double(v.get<double>()) : v.is_string() ? v.get<std::string>() : v.dump();
    }
    return head + "\n" + vals + "\n";
}

std::string run_gram(const RunConfig& c) {
    const auto G = gram_matrix(c.k, c.d, c.q);
    if (csv(c)) return gram_csv(G);
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < G.size(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < G.size(); ++j) row.push_back(G.matrix()(i, j));
        rows.push_back(row);
    }
    return dump(Json{{"k", c.k}, {"d", c.d}, {"q", c.q}, {"matrix", rows}});
}

std::string run_spectrum(const RunConfig& c) {
    const auto r = spectral_report(gram_matrix(c.k, c.d, c.q));
    if (r.min_eig < kIllConditionedEig)
        throw NumericalError("ill-conditioned Gram block: min eigenvalue " + format_double(r.min_eig) + " < " +
                             format_double(kIllConditionedEig));
    if (csv(c))
        return "k,d,q,min_eig,max_eig\n" + std::to_string(r.k) + "," + std::to_string(r.d) + "," +
               format_double(r.q) + "," + format_double(r.min_eig) + "," + format_double(r.max_eig) + "\n";
    return dump(to_json(r));
}

std::string run_operators(const RunConfig& c) {
    if (c.k < 1) throw PreconditionError("operators requires k >= 1");
    const auto p = make_params(c.d, truncation(c), c.q);
    const GramCache cache(p);
    const auto e0 = FockVector::basis(p, MultiIndex{0});
    const auto eta = FockVector::basis(p, MultiIndex(std::vector<int>(static_cast<std::size_t>(c.k), 0)));
    const std::vector<FockOperator> ops{creation(e0), annihilation(cache, e0), field(cache, e0), wick(eta),
                                        right_wick(eta)};
    if (csv(c)) {
        std::string s;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            auto block = operator_blocks_csv(ops[i]);
            if (i > 0) block = block.substr(block.find('\n') + 1);
            s += block;
        }
        return s;
    }
    Json arr = Json::array();
    for (const auto& T : ops) arr.push_back(operator_summary(cache, T));
    return dump(arr);
}

std::string word_spec(const MultiIndex& w) {
    std::string s;
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(w.letters[i]);
    }
    return s;
}

std::string run_moments(const RunConfig& c) {
    if (c.n < 1) throw PreconditionError("n must be >= 1");
    const auto p = make_params(c.d, c.N.value_or(c.n), c.q);
    if (checked_pow(c.d, c.n) > 4096) throw PreconditionError("d^n must be <= 4096 for the moment table");
    struct Row {
        std::string spec;
        double matrix, partition;
    };
    std::vector<Row> rows;
    for (const auto& w : enumerate_basis(c.d, c.n)) {
        std::vector<FockVector> xs;
        for (int a : w.letters) xs.push_back(FockVector::basis(p, MultiIndex{a}));
        rows.push_back({word_spec(w), field_moment({xs, p}), pair_partition_moment(xs, c.q)});
    }
    if (csv(c)) {
        std::string s = "n,spec,matrix_value,partition_value,abs_diff\n";
        for (const auto& r : rows)
            s += std::to_string(c.n) + "," + r.spec + "," + format_double(r.matrix) + "," +
                 format_double(r.partition) + "," + format_double(std::abs(r.matrix - r.partition)) + "\n";
        return s;
    }
    Json arr = Json::array();
    for (const auto& r : rows)
        arr.push_back({{"n", c.n},
                       {"spec", r.spec},
                       {"matrix_value", r.matrix},
                       {"partition_value", r.partition},
                       {"abs_diff", std::abs(r.matrix - r.partition)}});
    return dump(arr);
}

std::string run_identity(const RunConfig& c) {
    const int N = truncation(c);
    const auto p = make_params(c.d + 1, N, c.q);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&] {
        FockVector v(p);
        for (const auto& w : enumerate_basis(c.d, c.k)) v.set(w, u(rng));
        return v;
    };
    const auto b = draw();
    const auto cc = draw();
    const auto f = FockVector::basis(p, MultiIndex{c.d});
    const auto r = identity_check(b, cc, f, c.d);
    const Json j{{"k", c.k},
                 {"d", c.d},
                 {"q", c.q},
                 {"N", N},
                 {"seed", c.seed},
                 {"lhs", r.lhs},
                 {"middle", r.middle},
                 {"rhs_with_factor", r.rhs_with_factor},
                 {"rhs_literal", r.rhs_literal},
                 {"rel_diff", r.rel_diff}};
    if (csv(c)) return flat_csv(j);
    return dump(j);
}

std::string run_witness(const RunConfig& c) {
    const auto r = witness_chain(c.k, c.d, c.q, truncation(c), parse_fmode(c.f_mode));
    const auto j = to_json(r);
    if (csv(c)) return flat_csv(j);
    return dump(j);
}

std::string run_certificate(const RunConfig& c) {
    const double tail = c.tol_given ? c.tol : 1e-12;
    const auto res = find_certificate(c.q, c.d, c.k_max, c.delta_floor, tail);
    if (const auto* a = std::get_if<CertificateAbsence>(&res)) throw PreconditionError(a->message);
    const auto& cert = std::get<SeparationCertificate>(res);
    std::string why;
    if (!validate_certificate(cert, &why)) throw PreconditionError("certificate failed re-validation: " + why);
    const auto j = to_json(cert);
    if (csv(c)) return flat_csv(j);
    return dump(j);
}

// Mean seconds per call, repeating until at least 10 ms have elapsed.
template <typename Fn>
double time_per_call(Fn&& fn) {
    using clock = std::chrono::steady_clock;
    int reps = 0;
    const auto t0 = clock::now();
    double elapsed = 0.0;
    do {
        fn();
        ++reps;
        elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    } while (elapsed < 0.01);
    return elapsed / reps;
}

std::string run_bench(const RunConfig& c) {
    const int k_top = c.k_given ? std::min(c.k, kNaiveMaxDegree) : 7;
    const int d_top = c.d_given ? c.d : 3;
    std::string s = "k,d,naive_seconds,fast_seconds,speedup\n";
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int d = 1; d <= d_top; ++d)
        for (int k = 1; k <= k_top; ++k) {
            const auto p = make_params(d, k, c.q);
            FockVector v(p);
            for (const auto& w : enumerate_basis(d, k)) v.set(w, u(rng));
            const double naive = time_per_call([&] { (void)apply_pq_naive(k, c.q, v); });
            const double fast = time_per_call([&] { (void)apply_pq_fast(k, c.q, v); });
            s += std::to_string(k) + "," + std::to_string(d) + "," + format_double(naive) + "," +
                 format_double(fast) + "," + format_double(naive / fast) + "\n";
        }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-deformed Fock space computations"};
    app.require_subcommand(1);
    RunConfig cfg;
    struct Entry {
        const char* name;
        const char* help;
        std::string (*fn)(const RunConfig&);
    };
    const Entry entries[] = {
        {"gram", "Gram block of the q-inner product in degree k", run_gram},
        {"spectrum", "extreme eigenvalues of the degree-k Gram block", run_spectrum},
        {"operators", "summaries of the basic operators over e_0", run_operators},
        {"moments", "field moments against pair partitions for all words of length n", run_moments},
        {"identity", "contraction identity on seeded random b, c", run_identity},
        {"witness", "pairing along the normalized Wick family", run_witness},
        {"certificate", "smallest degree separating the two norm bounds", run_certificate},
        {"bench", "naive vs recursive symmetrizer timing table", run_bench},
    };
    std::vector<std::pair<CLI::App*, const Entry*>> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_flags(sub, cfg);
        subs.emplace_back(sub, &e);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        for (const auto& [sub, entry] : subs) {
            if (!sub->parsed()) continue;
            cfg.tol_given = sub->get_option("--tol")->count() > 0;
            cfg.k_given = sub->get_option("--k")->count() > 0;
            cfg.d_given = sub->get_option("--d")->count() > 0;
            check_common(cfg);
            emit(entry->fn(cfg), cfg.out);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return precondition;
    } catch (const std::overflow_error& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return precondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return precondition;
    }
    return ok;
}
