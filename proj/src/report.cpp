#include "qfock/report.hpp"

#include "qfock/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <system_error>

namespace qfock {

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

Json to_json(const FockVector& v) {
    Json j;
    j["d"] = v.params().d;
    j["N"] = v.params().N;
    j["q"] = v.params().q;
    Json coeffs = Json::array();
    for (const auto& [w, c] : v.coeffs()) coeffs.push_back(Json{{"index", w.letters}, {"value", c}});
    j["coeffs"] = std::move(coeffs);
    return j;
}

FockVector fock_vector_from_json(const Json& j) {
    try {
        const auto p = make_params(j.at("d").get<int>(), j.at("N").get<int>(), j.at("q").get<double>());
        FockVector v(p);
        for (const auto& e : j.at("coeffs")) {
            MultiIndex w(e.at("index").get<std::vector<int>>());
            if (v.get(w) != 0.0) throw PreconditionError("duplicate index " + to_string(w) + " in FockVector JSON");
            v.set(w, e.at("value").get<double>());
        }
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed FockVector JSON: ") + e.what());
    }
}

Json to_json(const SpectralReport& r) {
    return Json{{"k", r.k}, {"d", r.d}, {"q", r.q}, {"min_eig", r.min_eig}, {"max_eig", r.max_eig}};
}

Json operator_summary(const GramCache& cache, const FockOperator& T) {
    Json degrees = Json::array();
    for (const auto& [ko, ki] : T.degrees()) degrees.push_back(Json::array({ko, ki}));
    return Json{{"tag", to_string(T.tag())}, {"degrees", std::move(degrees)}, {"norm", op_norm(cache, T)}};
}

Json to_json(const SeparationCertificate& c) {
    return Json{{"q", c.q},
                {"d", c.d},
                {"k_min", c.k_min},
                {"delta", c.delta},
                {"lower", c.lower},
                {"upper", c.upper},
                {"c_q", c.c_q},
                {"c_q_tail_tol", c.c_q_tail_tol},
                {"c_q_terms", c.c_q_terms},
                {"scan_max", c.scan_max}};
}

Json to_json(const WitnessReport& r) {
    return Json{{"k", r.k},
                {"d", r.d},
                {"q", r.q},
                {"N", r.N},
                {"f_mode", to_string(r.f_mode)},
                {"f_norm", r.f_norm},
                {"wick_f_norm", r.wick_f_norm},
                {"v_norm", r.v_norm},
                {"pairing", r.pairing},
                {"predicted", r.predicted},
                {"rel_err", r.rel_err}};
}

std::string gram_csv(const GramBlock& block) {
    std::string out = "i,j,value\n";
    const auto& G = block.matrix();
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index j = 0; j < G.cols(); ++j) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += format_double(G(i, j));
            out += '\n';
        }
    return out;
}

std::string operator_blocks_csv(const FockOperator& T) {
    std::string out = "tag,k_out,k_in,i,j,value\n";
    const auto tag = to_string(T.tag());
    for (const auto& [key, m] : T.blocks()) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (m(i, j) == 0.0) continue;
                out += tag + ',' + std::to_string(key.first) + ',' + std::to_string(key.second) + ',' +
                       std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(m(i, j)) + '\n';
            }
    }
    return out;
}

void emit(std::string_view content, const std::filesystem::path& path) {
    if (path.empty()) {
        std::cout.write(content.data(), static_cast<std::streamsize>(content.size()));
        std::cout.flush();
        return;
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace qfock
