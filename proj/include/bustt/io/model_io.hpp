#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/io/csv.hpp"
#include "bustt/nsar.hpp"
#include "bustt/sar.hpp"

namespace bustt::io {

namespace detail {

inline std::string join_coeffs(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

inline std::vector<double> split_coeffs(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(';', start);
    const std::string piece =
        pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start);
    if (!piece.empty()) {
      const auto v = parse_double(piece);
      if (!v) throw DataError("model file: bad coefficient `" + piece + "`");
      out.push_back(*v);
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// One record per section:
/// `section,kind,domain,differenced,p,P,s,intercept,coeffs,noise_var,aic,train_mean`.
/// Doubles are written with 17 significant digits so load(save(m))
/// reproduces forecasts bit-for-bit.
inline void save_sar_models(std::ostream& os, std::span<const sar::SarModel> models) {
  os << "section,kind,domain,differenced,p,P,s,intercept,coeffs,noise_var,aic,train_mean\n";
  for (const auto& m : models) {
    os << m.section << ',' << sar::to_string(m.kind) << ',' << sar::to_string(m.domain) << ','
       << (m.differenced ? 1 : 0) << ',' << m.p << ',' << m.seasonal_order << ',' << m.season
       << ',' << format_double(m.intercept) << ',' << detail::join_coeffs(m.coeffs) << ','
       << format_double(m.noise_variance) << ',' << format_double(m.aic) << ','
       << format_double(m.train_mean) << '\n';
  }
}

inline std::vector<sar::SarModel> load_sar_models(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("sar model file: empty");
  if (split_csv_line(line) !=
      std::vector<std::string>{"section", "kind", "domain", "differenced", "p", "P", "s",
                               "intercept", "coeffs", "noise_var", "aic", "train_mean"})
    throw DataError("sar model file: unexpected header");
  std::vector<sar::SarModel> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw DataError("sar model file: bad row at line " + std::to_string(lineno));
    sar::SarModel m;
    const auto sec = parse_int(f[0]);
    const auto diff = parse_int(f[3]);
    const auto p = parse_int(f[4]);
    const auto cap_p = parse_int(f[5]);
    const auto season = parse_int(f[6]);
    const auto icpt = parse_double(f[7]);
    const auto nv = parse_double(f[9]);
    const auto aic = parse_double(f[10]);
    const auto tm = parse_double(f[11]);
    if (!sec || !diff || !p || !cap_p || !season || !icpt || !nv || !aic || !tm)
      throw DataError("sar model file: bad field at line " + std::to_string(lineno));
    if (f[1] == "additive") m.kind = sar::SarKind::Additive;
    else if (f[1] == "multiplicative") m.kind = sar::SarKind::Multiplicative;
    else throw DataError("sar model file: bad kind at line " + std::to_string(lineno));
    if (f[2] == "log") m.domain = sar::Domain::Log;
    else if (f[2] == "linear") m.domain = sar::Domain::Linear;
    else throw DataError("sar model file: bad domain at line " + std::to_string(lineno));
    m.section = static_cast<int>(*sec);
    m.differenced = *diff != 0;
    m.p = static_cast<int>(*p);
    m.seasonal_order = static_cast<int>(*cap_p);
    m.season = static_cast<int>(*season);
    m.intercept = *icpt;
    m.coeffs = detail::split_coeffs(f[8]);
    m.noise_variance = *nv;
    m.aic = *aic;
    m.train_mean = *tm;
    const std::size_t expect = m.kind == sar::SarKind::Multiplicative
                                   ? static_cast<std::size_t>(m.p) + 1
                                   : static_cast<std::size_t>(m.season);
    if (m.coeffs.size() != expect)
      throw DataError("sar model file: coefficient count mismatch at line " +
                      std::to_string(lineno));
    out.push_back(std::move(m));
  }
  return out;
}

/// One record per (section, bin): `section,bin,k,weights,noise_var`.
/// The format carries no domain column; callers assign it (config).
inline void save_nsar_models(std::ostream& os, std::span<const nsar::NsarModel> models) {
  os << "section,bin,k,weights,noise_var\n";
  for (const auto& m : models) {
    for (int bin = 1; bin <= m.bins; ++bin) {
      const auto& nb = m.per_bin[static_cast<std::size_t>(bin - 1)];
      os << m.section << ',' << bin << ',' << nb.k << ',' << detail::join_coeffs(nb.weights)
         << ',' << format_double(nb.noise_variance) << '\n';
    }
  }
}

inline std::vector<nsar::NsarModel> load_nsar_models(std::istream& is,
                                                     sar::Domain domain = sar::Domain::Log) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("nsar model file: empty");
  if (split_csv_line(line) !=
      std::vector<std::string>{"section", "bin", "k", "weights", "noise_var"})
    throw DataError("nsar model file: unexpected header");

  std::map<int, nsar::NsarModel> by_section;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw DataError("nsar model file: bad row at line " + std::to_string(lineno));
    const auto sec = parse_int(f[0]);
    const auto bin = parse_int(f[1]);
    const auto k = parse_int(f[2]);
    const auto nv = parse_double(f[4]);
    if (!sec || !bin || !k || !nv)
      throw DataError("nsar model file: bad field at line " + std::to_string(lineno));
    auto& m = by_section[static_cast<int>(*sec)];
    m.section = static_cast<int>(*sec);
    m.domain = domain;
    const int b = static_cast<int>(*bin);
    if (b > m.bins) {
      m.bins = b;
      m.per_bin.resize(static_cast<std::size_t>(b));
    }
    nsar::NsarBin nb;
    nb.k = static_cast<int>(*k);
    nb.weights = detail::split_coeffs(f[3]);
    nb.noise_variance = *nv;
    if (nb.weights.size() != static_cast<std::size_t>(nb.k) + 1)
      throw DataError("nsar model file: weight count mismatch at line " + std::to_string(lineno));
    m.per_bin[static_cast<std::size_t>(b - 1)] = std::move(nb);
  }
  std::vector<nsar::NsarModel> out;
  out.reserve(by_section.size());
  for (auto& [_, m] : by_section) out.push_back(std::move(m));
  return out;
}

}  // namespace bustt::io
