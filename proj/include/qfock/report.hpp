#pragma once

#include "qfock/fock_space.hpp"
#include "qfock/moments.hpp"
#include "qfock/operators.hpp"
#include "qfock/separation.hpp"
#include "qfock/symmetrizer.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace qfock {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double x);

Json to_json(const FockVector& v);
FockVector fock_vector_from_json(const Json& j);

Json to_json(const SpectralReport& r);
Json operator_summary(const GramCache& cache, const FockOperator& T);
Json to_json(const SeparationCertificate& c);
Json to_json(const WitnessReport& r);

/// "i,j,value" rows over the lexicographic word numbering.
std::string gram_csv(const GramBlock& block);
/// "tag,k_out,k_in,i,j,value" rows, zero entries skipped.
std::string operator_blocks_csv(const FockOperator& T);

/// Writes through a sibling temporary file and renames it into place.
/// An empty path writes to standard output.
void emit(std::string_view content, const std::filesystem::path& path);

}  // namespace qfock
