// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Link-record ingestion. CSV schema:
//   link_id,path_id,beta,theta_t_rad,theta_r_rad
// one row per multipath component, UTF-8, '.' decimal separator. path_id is
// informational; component order is re-derived by |beta| descending.
#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcassm/channel.hpp"

namespace mcassm {

struct LoadOptions {
  bool normalize = false;  // opt-in; reference gains are used verbatim by default
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

template <class Scalar>
Scalar parse_real(const std::string& s, std::size_t row, const char* what) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw std::invalid_argument("row " + std::to_string(row) + ": cannot parse " + what + " '" + s +
                                "'");
  return static_cast<Scalar>(v);
}

}  // namespace detail

inline constexpr const char* kLinkRecordHeader = "link_id,path_id,beta,theta_t_rad,theta_r_rad";

// One ChannelScenario per distinct link_id, in first-appearance order.
template <class Scalar>
std::vector<ChannelScenario<Scalar>> load_link_records(std::istream& in,
                                                       const ArrayConfig<Scalar>& array,
                                                       const LoadOptions& opts = {}) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> order;
  std::map<std::string, std::vector<MultipathComponent<Scalar>>> by_link;

  bool saw_header = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!saw_header) {
      if (t != kLinkRecordHeader)
        throw std::invalid_argument("row " + std::to_string(row) + ": expected header '" +
                                    std::string(kLinkRecordHeader) + "'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split_csv_row(t);
    if (fields.size() != 5)
      throw std::invalid_argument("row " + std::to_string(row) + ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
    const std::string& id = fields[0];
    if (id.empty()) throw std::invalid_argument("row " + std::to_string(row) + ": empty link_id");
    MultipathComponent<Scalar> c;
    c.gain = Complex<Scalar>(detail::parse_real<Scalar>(fields[2], row, "beta"), Scalar(0));
    c.aod = detail::parse_real<Scalar>(fields[3], row, "theta_t_rad");
    c.aoa = detail::parse_real<Scalar>(fields[4], row, "theta_r_rad");
    if (by_link.find(id) == by_link.end()) order.push_back(id);
    by_link[id].push_back(c);
  }

  std::vector<ChannelScenario<Scalar>> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    auto comps = by_link[id];
    if (comps.empty()) throw std::invalid_argument("link '" + id + "' has zero components");
    if (opts.normalize) comps = normalize_gains(std::move(comps));
    out.push_back(make_scenario(id, std::move(comps), array));
  }
  return out;
}

// Structured-config form: a list of links each carrying beta[] (optionally
// beta_im[]), theta_t[], theta_r[].
template <class Scalar>
std::vector<ChannelScenario<Scalar>> load_link_records_json(const nlohmann::json& j,
                                                            const ArrayConfig<Scalar>& array,
                                                            const LoadOptions& opts = {}) {
  const nlohmann::json& links = j.contains("links") ? j.at("links") : j;
  if (!links.is_array()) throw std::invalid_argument("link config: expected an array of links");
  std::vector<ChannelScenario<Scalar>> out;
  for (const auto& lk : links) {
    const std::string id =
        lk.contains("link_id") ? lk.at("link_id").is_string()
                                     ? lk.at("link_id").get<std::string>()
                                     : std::to_string(lk.at("link_id").get<long long>())
                               : std::to_string(out.size());
    const auto& beta = lk.at("beta");
    const auto& tt = lk.at("theta_t");
    const auto& tr = lk.at("theta_r");
    if (beta.size() != tt.size() || beta.size() != tr.size())
      throw std::invalid_argument("link '" + id + "': beta/theta_t/theta_r length mismatch");
    if (beta.empty()) throw std::invalid_argument("link '" + id + "' has zero components");
    std::vector<MultipathComponent<Scalar>> comps(beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i) {
      Scalar im = Scalar(0);
      if (lk.contains("beta_im")) im = lk.at("beta_im").at(i).template get<Scalar>();
      comps[i].gain = Complex<Scalar>(beta.at(i).template get<Scalar>(), im);
      comps[i].aod = tt.at(i).template get<Scalar>();
      comps[i].aoa = tr.at(i).template get<Scalar>();
    }
    if (opts.normalize) comps = normalize_gains(std::move(comps));
    out.push_back(make_scenario(id, std::move(comps), array));
  }
  return out;
}

template <class Scalar>
void write_link_records(std::ostream& out, const std::vector<ChannelScenario<Scalar>>& links) {
  const auto old_precision = out.precision(17);  // round-trip exact for double
  out << kLinkRecordHeader << "\n";
  for (const auto& s : links) {
    for (std::size_t i = 0; i < s.components.size(); ++i) {
      const auto& c = s.components[i];
      out << s.link_id << ',' << i << ',' << c.gain.real() << ',' << c.aod << ',' << c.aoa << "\n";
    }
  }
  out.precision(old_precision);
}

}  // namespace mcassm
