// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// JSON/CSV emission and the run-config digest used for artifact provenance.
#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mcassm/analysis.hpp"
#include "mcassm/simulate.hpp"

namespace mcassm {

// FNV-1a over the canonical flag string; stable across runs and platforms.
inline std::string config_digest(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

template <class Scalar>
nlohmann::json complex_matrix_json(const CMat<Scalar>& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

template <class Scalar>
nlohmann::json vec_json(const Vec<Scalar>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <class Scalar>
nlohmann::json to_json(const EffectiveChannel<Scalar>& e) {
  return {{"n_s", e.n_s},
          {"ridge_applied", e.ridge_applied},
          {"g", complex_matrix_json(e.g)},
          {"whitener_factor", complex_matrix_json(e.whitener_factor)},
          {"eigvals", vec_json(e.eigvals)},
          {"eigvecs", complex_matrix_json(e.eigvecs)}};
}

template <class Scalar>
nlohmann::json to_json(const MCADesign<Scalar>& d) {
  nlohmann::json v = nlohmann::json::array();
  for (Index r = 0; r < d.v.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < d.v.cols(); ++c) row.push_back(d.v(r, c));
    v.push_back(std::move(row));
  }
  return {{"iota", vec_json(d.iota)},  {"xi", vec_json(d.xi)},
          {"v", std::move(v)},         {"w", complex_matrix_json(d.w)},
          {"min_ed", d.min_ed},        {"mean_power_raw", d.mean_power_raw},
          {"n_sa", d.n_sa}};
}

template <class Scalar>
nlohmann::json to_json(const OptimizeResult<Scalar>& r) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : r.table)
    table.push_back({{"iota", vec_json(row.iota)}, {"min_ed", row.min_ed}});
  return {{"design", to_json(r.design)},
          {"candidates", std::move(table)},
          {"winner_index", r.winner_index}};
}

inline void write_artifact_header(std::ostream& out, const std::string& generated_at,
                                  const std::string& digest, const std::string& cmd) {
  out << "# generated: " << generated_at << "\n";
  out << "# config: " << digest << "\n";
  out << "# cmd: " << cmd << "\n";
}

template <class Scalar>
void write_sim_csv(std::ostream& out, const SimResult<Scalar>& r) {
  out << "snr_db,bits,errors,ber\n";
  const auto old_precision = out.precision(12);
  for (const auto& p : r.points)
    out << p.snr_db << ',' << p.bits_sent << ',' << p.bit_errors << ',' << p.ber << "\n";
  out.precision(old_precision);
}

template <class Scalar>
void write_abep_csv(std::ostream& out, const AbepCurve<Scalar>& c) {
  out << "snr_db,uub" << (c.simulated.size() ? ",ber" : "") << "\n";
  const auto old_precision = out.precision(12);
  for (Index i = 0; i < c.snr_db.size(); ++i) {
    out << c.snr_db(i) << ',' << c.uub(i);
    if (c.simulated.size()) out << ',' << c.simulated(i);
    out << "\n";
  }
  out.precision(old_precision);
}

template <class Scalar>
void write_ed_sweep_csv(std::ostream& out, const std::vector<IotaEdPoint<Scalar>>& pts) {
  out << "iota2,min_ed\n";
  const auto old_precision = out.precision(12);
  for (const auto& p : pts) out << p.iota2 << ',' << p.min_ed << "\n";
  out.precision(old_precision);
}

template <class Scalar>
void write_sweep_aggregate_csv(std::ostream& out, const SweepResult<Scalar>& r) {
  out << "snr_db,uub_mean,uub_median,uub_max,links,failed\n";
  const auto old_precision = out.precision(12);
  for (Index i = 0; i < r.snr_db.size(); ++i)
    out << r.snr_db(i) << ',' << r.mean(i) << ',' << r.median(i) << ',' << r.max(i) << ','
        << r.links.size() << ',' << r.failed_links.size() << "\n";
  out.precision(old_precision);
}

template <class Scalar>
void write_sweep_links_csv(std::ostream& out, const SweepResult<Scalar>& r) {
  out << "link_id,snr_db,uub\n";
  const auto old_precision = out.precision(12);
  for (const auto& lk : r.links)
    for (Index i = 0; i < r.snr_db.size(); ++i)
      out << lk.link_id << ',' << r.snr_db(i) << ',' << lk.uub(i) << "\n";
  out.precision(old_precision);
}

}  // namespace mcassm
