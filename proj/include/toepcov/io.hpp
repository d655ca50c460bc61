#pragma once

/** @file
 * File formats.
 *
 *  ToeplitzMatrix  {"p": int, "first_row": [reals]}
 *  ToeplitzMask    {"p": int, "weights": [reals]}       (weights >= 0)
 *  SupportSet      {"p": int, "indices": [ints]}
 *  SamplerSpec     {"family": str, "seed": u64, "covariance": <ToeplitzMatrix> | "identity",
 *                   "p": int (with "identity"), "c": real (optional), "K_squared": real (optional)}
 *
 *  SampleMatrix, binary: "TCOV0001", n (u64 LE), p (u64 LE), n*p float64 LE row-major.
 *  SampleMatrix, CSV (selected by a ".csv" extension): one observation per line.
 *
 * Reals are written as shortest round-trip decimals.
 */

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "toepcov/error.hpp"
#include "toepcov/estimators.hpp"
#include "toepcov/masks.hpp"
#include "toepcov/models.hpp"
#include "toepcov/sampling.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

using Json = nlohmann::ordered_json;

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

inline Json read_json_file(const std::filesystem::path& path) { return parse_json(read_text_file(path)); }

namespace detail {
template <class T>
T json_get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::Parse, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("key '") + key + "': " + e.what());
  }
}

inline std::size_t checked_length(const Json& j, const char* array_key) {
  const auto p = json_get<std::size_t>(j, "p");
  const auto& arr = j.at(array_key);
  if (!arr.is_array() || arr.size() != p) {
    throw Error(ErrorCode::Parse, std::string("'") + array_key + "' must be an array of length p");
  }
  return p;
}
}  // namespace detail

inline Json to_json(const ToeplitzMatrix& t) {
  Json j;
  j["p"] = t.size();
  j["first_row"] = std::vector<double>(t.first_row().begin(), t.first_row().end());
  return j;
}

inline ToeplitzMatrix toeplitz_from_json(const Json& j) {
  detail::checked_length(j, "first_row");
  return ToeplitzMatrix(detail::json_get<std::vector<double>>(j, "first_row"));
}

inline Json to_json(const ToeplitzMask& m) {
  Json j;
  j["p"] = m.size();
  j["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
  return j;
}

inline ToeplitzMask mask_from_json(const Json& j) {
  detail::checked_length(j, "weights");
  auto w = detail::json_get<std::vector<double>>(j, "weights");
  for (double v : w) {
    if (v < 0.0) throw Error(ErrorCode::Parse, "mask weights must be nonnegative");
  }
  return ToeplitzMask(std::move(w));
}

inline Json to_json(const SupportSet& s) {
  Json j;
  j["p"] = s.dimension();
  j["indices"] = std::vector<std::size_t>(s.indices().begin(), s.indices().end());
  return j;
}

inline SupportSet support_from_json(const Json& j) {
  return SupportSet(detail::json_get<std::size_t>(j, "p"), detail::json_get<std::vector<std::size_t>>(j, "indices"));
}

inline Json to_json(const SamplerSpec& s) {
  Json j;
  j["family"] = std::string(to_string(s.family));
  j["seed"] = s.seed;
  j["covariance"] = to_json(s.covariance);
  j["c"] = s.c;
  j["K_squared"] = s.k_squared;
  return j;
}

inline SamplerSpec sampler_spec_from_json(const Json& j) {
  const auto family = parse_family(detail::json_get<std::string>(j, "family"));
  const auto seed = detail::json_get<std::uint64_t>(j, "seed");
  const double c = j.contains("c") ? detail::json_get<double>(j, "c") : 1.0;
  std::optional<double> k2;
  if (j.contains("K_squared")) k2 = detail::json_get<double>(j, "K_squared");
  if (!j.contains("covariance")) throw Error(ErrorCode::Parse, "missing key 'covariance'");
  const auto& cov = j.at("covariance");
  if (cov.is_string()) {
    if (cov.get<std::string>() != "identity") throw Error(ErrorCode::Parse, "covariance string must be \"identity\"");
    return make_sampler_spec(family, ToeplitzMatrix::identity(detail::json_get<std::size_t>(j, "p")), seed, c, k2);
  }
  return make_sampler_spec(family, toeplitz_from_json(cov), seed, c, k2);
}

/**
 * Covariance descriptor inside a sweep config: "identity", a ToeplitzMatrix
 * object, or {"model": "geometric"|"polynomial"|"sparse", ...} with keys
 * rho, beta, L0, L, amplitude, support.
 */
inline CovarianceModel covariance_model_from_json(const Json& j) {
  CovarianceModel m;
  if (j.is_string()) {
    if (j.get<std::string>() != "identity") throw Error(ErrorCode::Parse, "covariance string must be \"identity\"");
    return m;
  }
  if (j.contains("first_row")) {
    m.kind = CovarianceModel::Kind::Explicit;
    m.matrix = toeplitz_from_json(j);
    return m;
  }
  const auto model = detail::json_get<std::string>(j, "model");
  if (model == "identity") return m;
  if (model == "geometric") {
    m.kind = CovarianceModel::Kind::Geometric;
  } else if (model == "polynomial") {
    m.kind = CovarianceModel::Kind::Polynomial;
  } else if (model == "sparse") {
    m.kind = CovarianceModel::Kind::Sparse;
    m.support = detail::json_get<std::vector<std::size_t>>(j, "support");
  } else {
    throw Error(ErrorCode::Parse, "unknown covariance model '" + model + "'");
  }
  if (j.contains("rho")) m.rho = detail::json_get<double>(j, "rho");
  if (j.contains("beta")) m.beta = detail::json_get<double>(j, "beta");
  if (j.contains("L0")) m.L0 = detail::json_get<double>(j, "L0");
  if (j.contains("L")) m.L = detail::json_get<double>(j, "L");
  if (j.contains("amplitude")) m.amplitude = detail::json_get<double>(j, "amplitude");
  return m;
}

// ---- SampleMatrix files -------------------------------------------------

inline constexpr std::string_view kSampleMagic = "TCOV0001";

namespace detail {
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
  return v;
}

inline bool has_csv_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".csv";
}
}  // namespace detail

inline std::string encode_samples_binary(const SampleMatrix& x) {
  std::string out(kSampleMagic);
  detail::put_u64(out, x.samples());
  detail::put_u64(out, x.dimension());
  out.reserve(out.size() + 8 * x.data().size());
  for (double v : x.data()) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline SampleMatrix decode_samples_binary(std::string_view in) {
  if (in.size() < 24 || in.substr(0, 8) != kSampleMagic) throw Error(ErrorCode::Parse, "not a TCOV0001 sample file");
  const std::uint64_t n = detail::get_u64(in, 8);
  const std::uint64_t p = detail::get_u64(in, 16);
  if (p != 0 && n > (in.size() - 24) / 8 / p) throw Error(ErrorCode::Parse, "sample file is truncated");
  if (in.size() != 24 + 8 * n * p) throw Error(ErrorCode::Parse, "sample file size does not match header");
  std::vector<double> data(n * p);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::bit_cast<double>(detail::get_u64(in, 24 + 8 * i));
  return SampleMatrix(n, p, std::move(data));
}

inline std::string encode_samples_csv(const SampleMatrix& x) {
  std::string out;
  for (std::size_t i = 0; i < x.samples(); ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

inline SampleMatrix decode_samples_csv(std::string_view in) {
  std::vector<double> data;
  std::size_t n = 0, p = 0;
  while (!in.empty()) {
    const auto eol = in.find('\n');
    auto line = in.substr(0, eol);
    in.remove_prefix(eol == std::string_view::npos ? in.size() : eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::size_t count = 0;
    while (true) {
      const auto cut = line.find(',');
      auto field = line.substr(0, cut);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw Error(ErrorCode::Parse, "bad number in CSV line " + std::to_string(n + 1));
      }
      data.push_back(v);
      ++count;
      if (cut == std::string_view::npos) break;
      line.remove_prefix(cut + 1);
    }
    if (n == 0) p = count;
    if (count != p) throw Error(ErrorCode::Parse, "CSV line " + std::to_string(n + 1) + " has a different width");
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::Parse, "CSV sample file is empty");
  return SampleMatrix(n, p, std::move(data));
}

inline void write_samples(const std::filesystem::path& path, const SampleMatrix& x) {
  write_text_file(path, detail::has_csv_extension(path) ? encode_samples_csv(x) : encode_samples_binary(x));
}

inline SampleMatrix read_samples(const std::filesystem::path& path) {
  const auto bytes = read_text_file(path);
  return detail::has_csv_extension(path) ? decode_samples_csv(bytes) : decode_samples_binary(bytes);
}

}  // namespace toepcov
