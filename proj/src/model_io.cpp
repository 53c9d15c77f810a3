#include "taurob/model_io.hpp"

#include <fstream>
#include <sstream>

#include "taurob/errors.hpp"

namespace taurob::io {

namespace {

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

int int_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + " must be a number");
  return v.get<double>();
}

linalg::Complex complex_number(const Json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ValidationError(where + " must be a number or an [re, im] pair");
}

Vector parse_vector(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + " must be an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

template <typename M, typename ParseEntry>
M parse_matrix(const Json& v, const std::string& where, ParseEntry parse_entry) {
  if (!v.is_array() || v.empty()) throw ValidationError(where + " must be a non-empty array of rows");
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  M out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      throw ValidationError(where + " rows must be arrays of equal length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_entry(
          v[i][j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return out;
}

std::vector<std::vector<std::vector<double>>> parse_coeff_grid(const Json& v,
                                                               const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + " must be an array of rows");
  std::vector<std::vector<std::vector<double>>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) throw ValidationError(where + " rows must be arrays");
    auto& row = out.emplace_back();
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      const std::string at = where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      const Vector c = parse_vector(v[i][j], at);
      row.emplace_back(c.data(), c.data() + c.size());
    }
  }
  return out;
}

SpectralModel parse_spectral(const Json& doc) {
  const int n = int_field(doc, "n");
  const int p = int_field(doc, "p");
  Vector mean = parse_vector(field(doc, "mean"), "mean");
  const Json& spectrum = field(doc, "spectrum");
  const Json& type = field(spectrum, "type");
  if (type == "samples") {
    const Json& values = field(spectrum, "values");
    if (!values.is_array()) throw ValidationError("spectrum.values must be an array");
    std::vector<CMatrix> samples;
    samples.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      samples.push_back(parse_matrix<CMatrix>(values[k], "spectrum.values[" + std::to_string(k) + "]",
                                              complex_number));
    }
    if (doc.contains("grid_size") && int_field(doc, "grid_size") != static_cast<int>(samples.size())) {
      throw ValidationError("grid_size does not match the number of spectrum samples");
    }
    return SpectralModel(n, p, std::move(mean), std::move(samples));
  }
  if (type == "arma") {
    ArmaSpectrum arma;
    arma.num = parse_coeff_grid(field(spectrum, "num"), "spectrum.num");
    arma.den = parse_coeff_grid(field(spectrum, "den"), "spectrum.den");
    const int m = doc.contains("grid_size") ? int_field(doc, "grid_size") : kDefaultGridSize;
    return SpectralModel::from_arma(n, p, std::move(mean), arma, m);
  }
  throw ValidationError("spectrum.type must be 'samples' or 'arma'");
}

}  // namespace

AnyModel model_from_json(const Json& doc) {
  const Json& kind = field(doc, "kind");
  if (kind == "static") {
    return JointGaussian(int_field(doc, "n"), int_field(doc, "p"),
                         parse_vector(field(doc, "mean"), "mean"),
                         parse_matrix<Matrix>(field(doc, "cov"), "cov", number));
  }
  if (kind == "spectral") return parse_spectral(doc);
  throw ValidationError("kind must be 'static' or 'spectral'");
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  Json doc;
  try {
    in >> doc;
  } catch (const Json::parse_error& e) {
    throw ValidationError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const JointGaussian& model) {
  return Json{{"kind", "static"},
              {"n", model.n()},
              {"p", model.p()},
              {"mean", to_json(model.mean())},
              {"cov", to_json(model.cov())}};
}

Json to_json(const SpectralModel& model) {
  Json values = Json::array();
  for (const auto& s : model.values()) values.push_back(to_json(s));
  return Json{{"kind", "spectral"},
              {"n", model.n()},
              {"p", model.p()},
              {"mean", to_json(model.mean())},
              {"grid_size", model.grid_size()},
              {"spectrum", {{"type", "samples"}, {"values", std::move(values)}}}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace taurob::io
