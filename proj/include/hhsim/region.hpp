#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hhsim/core.hpp"
#include "hhsim/csv.hpp"

namespace hhsim {

struct GridCell {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

struct Dwelling {
  std::string id;
  RegionIndex small_region = kNoRegion;
  HousingType housing = HousingType::Detached;
  bool residential = true;   // false: other building, promotable under shortage
  bool promoted = false;     // true once a non-residential building was made a house
  std::optional<GridCell> grid_cell;
};

struct SmallRegion {
  std::string id;
  std::int32_t municipality = -1;
  bool village_flag = false;
  std::vector<DwellingIndex> dwellings;
};

struct Municipality {
  std::string id;
  std::int32_t prefecture = -1;
  std::vector<RegionIndex> small_regions;
};

struct Prefecture {
  std::string id;
  std::vector<std::int32_t> municipalities;
};

/// Prefecture -> municipality -> small region hierarchy plus the dwelling
/// inventory. Immutable once loaded; per-epoch occupancy lives in the
/// snapshot, not here.
class RegionTree {
public:
  std::vector<Prefecture> prefectures;
  std::vector<Municipality> municipalities;
  std::vector<SmallRegion> small_regions;
  std::vector<Dwelling> dwellings;
  double cell_size_m = 500.0;

  RegionIndex region_index(const std::string& id) const {
    auto it = region_by_id_.find(id);
    if (it == region_by_id_.end()) throw ConfigError("unknown small region '" + id + "'");
    return it->second;
  }
  std::int32_t municipality_index(const std::string& id) const {
    auto it = muni_by_id_.find(id);
    if (it == muni_by_id_.end()) throw ConfigError("unknown municipality '" + id + "'");
    return it->second;
  }
  bool has_municipality(const std::string& id) const { return muni_by_id_.count(id) != 0; }
  bool has_region(const std::string& id) const { return region_by_id_.count(id) != 0; }

  std::int32_t municipality_of_region(RegionIndex r) const {
    return small_regions[static_cast<std::size_t>(r)].municipality;
  }
  std::int32_t prefecture_of_municipality(std::int32_t m) const {
    return municipalities[static_cast<std::size_t>(m)].prefecture;
  }
  const std::string& municipality_id_of_region(RegionIndex r) const {
    return municipalities[static_cast<std::size_t>(municipality_of_region(r))].id;
  }
  const std::string& prefecture_id_of_municipality(std::int32_t m) const {
    return prefectures[static_cast<std::size_t>(prefecture_of_municipality(m))].id;
  }

  void rebuild_index() {
    region_by_id_.clear();
    muni_by_id_.clear();
    for (std::size_t i = 0; i < small_regions.size(); ++i) {
      if (!region_by_id_.emplace(small_regions[i].id, static_cast<RegionIndex>(i)).second)
        throw IngestError("duplicate small region id '" + small_regions[i].id + "'");
    }
    for (std::size_t i = 0; i < municipalities.size(); ++i) {
      if (!muni_by_id_.emplace(municipalities[i].id, static_cast<std::int32_t>(i)).second)
        throw IngestError("duplicate municipality id '" + municipalities[i].id + "'");
    }
  }

private:
  std::map<std::string, RegionIndex> region_by_id_;
  std::map<std::string, std::int32_t> muni_by_id_;
};

/// regions CSV: prefecture,municipality,small_region,village_flag
/// Rows are grouped naturally; hierarchy nodes are created on first use.
inline RegionTree load_region_tree(const std::filesystem::path& regions_csv,
                                   const std::filesystem::path& dwellings_csv,
                                   double cell_size_m = 500.0) {
  RegionTree tree;
  tree.cell_size_m = cell_size_m;

  std::map<std::string, std::int32_t> pref_ix, muni_ix;
  const csv::Table regions = csv::read(regions_csv);
  const std::size_t cp = regions.column("prefecture");
  const std::size_t cm = regions.column("municipality");
  const std::size_t cs = regions.column("small_region");
  const std::size_t cv = regions.column("village_flag");
  for (std::size_t r = 0; r < regions.rows.size(); ++r) {
    const auto& row = regions.rows[r];
    auto [pit, pnew] = pref_ix.emplace(row[cp], static_cast<std::int32_t>(tree.prefectures.size()));
    if (pnew) tree.prefectures.push_back({row[cp], {}});
    auto [mit, mnew] = muni_ix.emplace(row[cm], static_cast<std::int32_t>(tree.municipalities.size()));
    if (mnew) {
      tree.municipalities.push_back({row[cm], pit->second, {}});
      tree.prefectures[static_cast<std::size_t>(pit->second)].municipalities.push_back(mit->second);
    }
    SmallRegion sr;
    sr.id = row[cs];
    sr.municipality = mit->second;
    sr.village_flag = csv::parse_int(regions, r, cv) != 0;
    tree.municipalities[static_cast<std::size_t>(mit->second)].small_regions.push_back(
        static_cast<RegionIndex>(tree.small_regions.size()));
    tree.small_regions.push_back(std::move(sr));
  }
  tree.rebuild_index();

  // dwellings CSV: dwelling_id,small_region,housing_type,residential,x_m,y_m
  // (x_m/y_m empty -> no grid cell)
  const csv::Table dw = csv::read(dwellings_csv);
  const std::size_t cd = dw.column("dwelling_id");
  const std::size_t csr = dw.column("small_region");
  const std::size_t ch = dw.column("housing_type");
  const std::size_t cres = dw.column("residential");
  const std::size_t cx = dw.column("x_m");
  const std::size_t cy = dw.column("y_m");
  std::map<std::string, bool> seen;
  for (std::size_t r = 0; r < dw.rows.size(); ++r) {
    const auto& row = dw.rows[r];
    if (!seen.emplace(row[cd], true).second)
      throw IngestError(dw.path, r + 2, "duplicate dwelling id '" + row[cd] + "'");
    Dwelling d;
    d.id = row[cd];
    if (!tree.has_region(row[csr]))
      throw IngestError(dw.path, r + 2, "dwelling references unknown small region '" + row[csr] + "'");
    d.small_region = tree.region_index(row[csr]);
    d.housing = housing_from_name(row[ch]);
    d.residential = csv::parse_int(dw, r, cres) != 0;
    if (!row[cx].empty() && !row[cy].empty()) {
      const double x = csv::parse_double(dw, r, cx);
      const double y = csv::parse_double(dw, r, cy);
      d.grid_cell = GridCell{static_cast<int>(std::floor(x / tree.cell_size_m)),
                             static_cast<int>(std::floor(y / tree.cell_size_m))};
    }
    tree.small_regions[static_cast<std::size_t>(d.small_region)].dwellings.push_back(
        static_cast<DwellingIndex>(tree.dwellings.size()));
    tree.dwellings.push_back(std::move(d));
  }
  return tree;
}

}  // namespace hhsim
