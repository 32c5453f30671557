#pragma once

// JSON encodings of measures, models and profiles, plus the binary matrix
// dump format: "SPHI", u32 N, u32 dtype (1 real, 2 complex), 4 reserved
// bytes, then row-major little-endian float64 (complex entries as re, im).

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sphint/errors.hpp"
#include "sphint/ldp.hpp"
#include "sphint/measures.hpp"
#include "sphint/randmat.hpp"
#include "sphint/spherical.hpp"

namespace sphint {

using Json = nlohmann::json;

/// Finite doubles as numbers, the rest as "inf", "-inf" or "nan".
inline Json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double number_from_json(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw DomainError(std::string(what) + ": expected a number");
}

namespace detail {

inline const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw DomainError(std::string(what) + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

inline std::vector<double> number_list(const Json& j, const char* what) {
  if (!j.is_array()) throw DomainError(std::string(what) + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number_from_json(v, what));
  return out;
}

inline double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError(std::string(what) + ": not a number: " + s);
  }
  if (used != s.size()) throw DomainError(std::string(what) + ": not a number: " + s);
  return v;
}

}  // namespace detail

/// {"type": "atoms", "positions": [...], "weights": [...]},
/// {"type": "semicircle"}, {"type": "mp", "alpha": a},
/// {"type": "density", "support": [a, b], "values": [...]}.
/// Named laws accept optional "scale" and "shift".
inline SpectralMeasure measure_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "semicircle") return SpectralMeasure::semicircle();
    if (s.rfind("mp:", 0) == 0) {
      return SpectralMeasure::marchenko_pastur(detail::parse_double(s.substr(3), "mp"));
    }
    if (s.rfind("delta:", 0) == 0) return SpectralMeasure::delta(detail::parse_double(s.substr(6), "delta"));
    throw DomainError("unknown named measure: " + s);
  }
  const auto type = detail::require(j, "type", "measure").get<std::string>();
  SpectralMeasure mu = SpectralMeasure::semicircle();
  if (type == "atoms") {
    const auto pos = detail::number_list(detail::require(j, "positions", "measure"), "positions");
    const auto w = detail::number_list(detail::require(j, "weights", "measure"), "weights");
    if (pos.size() != w.size()) throw ShapeError("measure: positions and weights differ in length");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < pos.size(); ++i) atoms.push_back({pos[i], w[i]});
    return SpectralMeasure::atoms(std::move(atoms));
  }
  if (type == "density") {
    const auto sup = detail::number_list(detail::require(j, "support", "measure"), "support");
    if (sup.size() != 2) throw DomainError("measure: support must be [a, b]");
    return SpectralMeasure::tabulated(sup[0], sup[1],
                                      detail::number_list(detail::require(j, "values", "measure"), "values"));
  }
  if (type == "semicircle") {
    mu = SpectralMeasure::semicircle();
  } else if (type == "mp") {
    mu = SpectralMeasure::marchenko_pastur(number_from_json(detail::require(j, "alpha", "measure"), "alpha"));
  } else {
    throw DomainError("measure: unknown type \"" + type + "\"");
  }
  const double scale = j.contains("scale") ? number_from_json(j.at("scale"), "scale") : 1.0;
  const double shift = j.contains("shift") ? number_from_json(j.at("shift"), "shift") : 0.0;
  return scale == 1.0 && shift == 0.0 ? mu : mu.affine(scale, shift);
}

inline Json measure_to_json(const SpectralMeasure& mu) {
  return std::visit(
      [&](const auto& law) -> Json {
        using T = std::decay_t<decltype(law)>;
        Json j;
        if constexpr (std::is_same_v<T, DiscreteAtoms>) {
          j["type"] = "atoms";
          j["positions"] = Json::array();
          j["weights"] = Json::array();
          for (const auto& a : law.atoms) {
            j["positions"].push_back(a.position);
            j["weights"].push_back(a.weight);
          }
          return j;
        } else if constexpr (std::is_same_v<T, TabulatedDensity>) {
          j["type"] = "density";
          j["support"] = {law.lo, law.hi};
          j["values"] = law.values;
          return j;
        } else {
          if constexpr (std::is_same_v<T, Semicircle>) {
            j["type"] = "semicircle";
          } else {
            j["type"] = "mp";
            j["alpha"] = law.alpha;
          }
          if (mu.scale() != 1.0) j["scale"] = mu.scale();
          if (mu.shift() != 0.0) j["shift"] = mu.shift();
          return j;
        }
      },
      mu.law());
}

/// {"etas": [...], "mult": [...], "bulk": [first, last]} with 0-based
/// inclusive bulk indices.
inline DiscreteModel model_from_json(const Json& j) {
  const auto etas = detail::number_list(detail::require(j, "etas", "model"), "etas");
  const auto& mj = detail::require(j, "mult", "model");
  if (!mj.is_array()) throw DomainError("model: mult must be an array");
  std::vector<std::int64_t> mult;
  for (const auto& v : mj) {
    if (!v.is_number_integer()) throw DomainError("model: multiplicities must be integers");
    mult.push_back(v.get<std::int64_t>());
  }
  const auto& b = detail::require(j, "bulk", "model");
  if (!b.is_array() || b.size() != 2 || !b[0].is_number_unsigned() || !b[1].is_number_unsigned()) {
    throw DomainError("model: bulk must be [first, last] with nonnegative integers");
  }
  return DiscreteModel::make(etas, std::move(mult), b[0].get<std::size_t>(), b[1].get<std::size_t>());
}

inline Json model_to_json(const DiscreteModel& m) {
  return {{"etas", m.etas}, {"mult", m.mult}, {"bulk", {m.bulk_first, m.bulk_last}}};
}

/// Bulk of size n drawn deterministically from mu at the levels
/// (i - 1/2)/n, i = 1..n.
inline std::vector<double> quantile_bulk(const SpectralMeasure& mu, std::size_t n) {
  std::vector<double> x;
  x.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    x.push_back(quantile(mu, (static_cast<double>(i) - 0.5) / static_cast<double>(n)));
  }
  return x;
}

/// {"R": [[...], ...], "alpha": [...]}
inline VarianceProfile profile_from_json(const Json& j) {
  const auto& rj = detail::require(j, "R", "profile");
  if (!rj.is_array() || rj.empty()) throw DomainError("profile: R must be a nonempty array of rows");
  const auto p = static_cast<Eigen::Index>(rj.size());
  Eigen::MatrixXd R(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto row = detail::number_list(rj[static_cast<std::size_t>(i)], "R");
    if (static_cast<Eigen::Index>(row.size()) != p) throw ShapeError("profile: R must be square");
    for (Eigen::Index k = 0; k < p; ++k) R(i, k) = row[static_cast<std::size_t>(k)];
  }
  return VarianceProfile::make(R, detail::number_list(detail::require(j, "alpha", "profile"), "alpha"));
}

inline Json profile_to_json(const VarianceProfile& prof) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < prof.R.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < prof.R.cols(); ++k) row.push_back(prof.R(i, k));
    rows.push_back(row);
  }
  return {{"R", rows}, {"alpha", prof.alpha}};
}

namespace detail {

inline void put_u32(std::ofstream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                       static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

inline void put_f64(std::ofstream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

inline double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline void write_matrix(const std::string& path, const SampledMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  const bool is_complex = std::holds_alternative<Eigen::MatrixXcd>(m);
  const auto n = std::visit([](const auto& a) { return a.rows(); }, m);
  out.write("SPHI", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(n));
  detail::put_u32(out, is_complex ? 2u : 1u);
  detail::put_u32(out, 0u);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (is_complex) {
        const auto z = std::get<Eigen::MatrixXcd>(m)(i, k);
        detail::put_f64(out, z.real());
        detail::put_f64(out, z.imag());
      } else {
        detail::put_f64(out, std::get<Eigen::MatrixXd>(m)(i, k));
      }
    }
  }
  if (!out) throw DomainError("failed writing " + path);
}

inline SampledMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 16 || std::memcmp(buf.data(), "SPHI", 4) != 0) {
    throw DomainError(path + ": not a matrix dump");
  }
  const std::uint32_t n = detail::get_u32(buf.data() + 4);
  const std::uint32_t dtype = detail::get_u32(buf.data() + 8);
  if (dtype != 1 && dtype != 2) throw DomainError(path + ": unknown dtype");
  const std::uint64_t expected = 16 + static_cast<std::uint64_t>(n) * n * 8 * dtype;
  if (buf.size() != expected) throw DomainError(path + ": size does not match header");
  const unsigned char* p = buf.data() + 16;
  const auto N = static_cast<Eigen::Index>(n);
  if (dtype == 1) {
    Eigen::MatrixXd m(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index k = 0; k < N; ++k, p += 8) m(i, k) = detail::get_f64(p);
    }
    return m;
  }
  Eigen::MatrixXcd m(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index k = 0; k < N; ++k, p += 16) m(i, k) = {detail::get_f64(p), detail::get_f64(p + 8)};
  }
  return m;
}

}  // namespace sphint
