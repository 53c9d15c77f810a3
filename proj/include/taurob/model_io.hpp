#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"
#include "taurob/models.hpp"

namespace taurob::io {

using Json = nlohmann::json;
using AnyModel = std::variant<JointGaussian, SpectralModel>;

// Parses a model document. Malformed documents and invariant violations both
// raise ValidationError.
AnyModel model_from_json(const Json& doc);
AnyModel load_model(const std::filesystem::path& path);

// Canonical form: sorted keys, complex entries as [re, im] pairs, spectra as
// samples.
Json to_json(const JointGaussian& model);
Json to_json(const SpectralModel& model);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const CMatrix& m);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace taurob::io
