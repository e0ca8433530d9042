// Copyright 2026 The vdaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vdaudit/metrics.hpp"

#include <cmath>

#include "vdaudit/error.hpp"

namespace vdaudit::metrics {

double disparity_di(std::span<const int> predictions, std::span<const int> truths,
                    std::span<const data::Group> groups) {
  if (predictions.size() != truths.size() || truths.size() != groups.size()) {
    throw InvalidArgument("disparity_di: inputs must be aligned");
  }
  std::array<std::size_t, 2> positives{}, hits{};
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] != 1) continue;
    const std::size_t g = group_slot(groups[i]);
    ++positives[g];
    if (predictions[i] == 1) ++hits[g];
  }
  if (positives[0] == 0 || positives[1] == 0) {
    throw UndefinedMetric("disparity_di: a group has no positive-truth records");
  }
  return static_cast<double>(hits[0]) / static_cast<double>(positives[0]) -
         static_cast<double>(hits[1]) / static_cast<double>(positives[1]);
}

double vulnerability_disparity(std::span<const VdRecord> members) {
  std::array<std::size_t, 2> total{}, hits{};
  for (const VdRecord& r : members) {
    const std::size_t g = group_slot(r.group);
    ++total[g];
    if (r.predicted == 1) ++hits[g];
  }
  if (total[0] == 0 || total[1] == 0) {
    throw UndefinedMetric("vulnerability disparity: a group has no members");
  }
  return static_cast<double>(hits[0]) / static_cast<double>(total[0]) -
         static_cast<double>(hits[1]) / static_cast<double>(total[1]);
}

std::optional<double> vd_change(double vd_before, double vd_after) {
  if (vd_before == 0.0) return std::nullopt;
  return (vd_after - vd_before) / vd_before;
}

std::size_t bin_index(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw InvalidArgument("probability outside [0, 1]");
  }
  const auto b = static_cast<std::size_t>(std::floor(probability * static_cast<double>(kBins)));
  return b >= kBins ? kBins - 1 : b;
}

VdReport recall_by_bin(std::span<const VdRecord> members) {
  VdReport rep;
  std::array<std::array<std::size_t, 2>, kBins> counts{};
  for (const VdRecord& r : members) {
    const std::size_t g = group_slot(r.group);
    ++rep.group_members[g];
    if (r.predicted != 1) continue;
    ++rep.group_positives[g];
    ++counts[bin_index(r.probability)][g];
  }
  if (rep.group_members[0] == 0 || rep.group_members[1] == 0) {
    throw UndefinedMetric("bin recall: a group has no members");
  }
  for (std::size_t g = 0; g < 2; ++g) {
    rep.no_positives[g] = rep.group_positives[g] == 0;
    const auto denom = static_cast<double>(rep.group_members[g]);
    for (std::size_t b = 0; b < kBins; ++b) {
      rep.bin_recalls[b][g] = static_cast<double>(counts[b][g]) / denom;
    }
  }
  rep.vd = static_cast<double>(rep.group_positives[0]) /
               static_cast<double>(rep.group_members[0]) -
           static_cast<double>(rep.group_positives[1]) /
               static_cast<double>(rep.group_members[1]);
  return rep;
}

nlohmann::json VdReport::to_json() const {
  nlohmann::json bins = nlohmann::json::array();
  for (std::size_t b = 0; b < kBins; ++b) {
    bins.push_back({{"lo", static_cast<double>(b) / kBins},
                    {"hi", static_cast<double>(b + 1) / kBins},
                    {"protected", bin_recalls[b][0]},
                    {"unprotected", bin_recalls[b][1]}});
  }
  nlohmann::json j = {{"vd", vd},
                      {"bins", std::move(bins)},
                      {"group_members", group_members},
                      {"group_positives", group_positives},
                      {"no_positives", no_positives}};
  j["vd_dp"] = vd_dp ? nlohmann::json(*vd_dp) : nlohmann::json(nullptr);
  j["change_c"] = change_c ? nlohmann::json(*change_c) : nlohmann::json(nullptr);
  return j;
}

VdReport VdReport::from_json(const nlohmann::json& j) {
  VdReport r;
  r.vd = j.at("vd").get<double>();
  if (!j.at("vd_dp").is_null()) r.vd_dp = j.at("vd_dp").get<double>();
  if (!j.at("change_c").is_null()) r.change_c = j.at("change_c").get<double>();
  const auto& bins = j.at("bins");
  if (bins.size() != kBins) throw ParseError("VD report needs 10 bins", 0);
  for (std::size_t b = 0; b < kBins; ++b) {
    r.bin_recalls[b][0] = bins[b].at("protected").get<double>();
    r.bin_recalls[b][1] = bins[b].at("unprotected").get<double>();
  }
  r.group_members = j.at("group_members").get<std::array<std::size_t, 2>>();
  r.group_positives = j.at("group_positives").get<std::array<std::size_t, 2>>();
  r.no_positives = j.at("no_positives").get<std::array<bool, 2>>();
  return r;
}

void VdReport::write_bins_csv(std::ostream& out) const {
  out << "bin_lo,bin_hi,group,recall\n";
  for (std::size_t b = 0; b < kBins; ++b) {
    for (std::size_t g = 0; g < 2; ++g) {
      out << static_cast<double>(b) / kBins << ',' << static_cast<double>(b + 1) / kBins << ','
          << (g == 0 ? "protected" : "unprotected") << ',' << bin_recalls[b][g] << '\n';
    }
  }
}

}  // namespace vdaudit::metrics
