#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hhsim/core.hpp"
#include "hhsim/region.hpp"

namespace hhsim {

/// Occupancy state of one dwelling within a snapshot.
/// Free is the synthesis-output state, before init_vacancies partitions the
/// unoccupied stock into Vacant and Designated (non-dwelling) sets.
enum class DwellingState : std::uint8_t { Free = 0, Occupied = 1, Vacant = 2, Designated = 3 };

struct PopulationSnapshot {
  int epoch = 0;
  std::vector<Household> households;            // sorted by id
  std::vector<DwellingState> dwelling_state;    // parallel to tree->dwellings
  const RegionTree* tree = nullptr;

  std::size_t person_count() const {
    std::size_t n = 0;
    for (const auto& h : households) n += h.members.size();
    return n;
  }

  /// Ids of unoccupied-but-still-dwelling stock, sorted.
  std::vector<std::string> vacancy_registry() const {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < dwelling_state.size(); ++i)
      if (dwelling_state[i] == DwellingState::Vacant) ids.push_back(tree->dwellings[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  std::size_t count_state(DwellingState s) const {
    std::size_t n = 0;
    for (auto st : dwelling_state)
      if (st == s) ++n;
    return n;
  }

  void sort_by_id() {
    std::sort(households.begin(), households.end(),
              [](const Household& a, const Household& b) { return a.id < b.id; });
  }
};

/// Occupied + vacant + designated (+ free before vacancy init) must cover
/// the inventory exactly, and no two households may share a dwelling.
inline void check_dwelling_partition(const PopulationSnapshot& s) {
  if (!s.tree) throw InvariantError("snapshot has no region tree");
  if (s.dwelling_state.size() != s.tree->dwellings.size())
    throw InvariantError("dwelling state vector does not match inventory");
  std::vector<std::uint8_t> seen(s.dwelling_state.size(), 0);
  for (const Household& h : s.households) {
    if (h.dwelling == kNoDwelling) continue;
    const auto d = static_cast<std::size_t>(h.dwelling);
    if (d >= s.dwelling_state.size())
      throw InvariantError("household " + std::to_string(h.id) + " references dwelling out of range");
    if (seen[d]++)
      throw InvariantError("dwelling " + s.tree->dwellings[d].id + " assigned to two households");
    if (s.dwelling_state[d] != DwellingState::Occupied)
      throw InvariantError("dwelling " + s.tree->dwellings[d].id + " occupied but not marked so");
  }
  for (std::size_t d = 0; d < s.dwelling_state.size(); ++d)
    if (s.dwelling_state[d] == DwellingState::Occupied && !seen[d])
      throw InvariantError("dwelling " + s.tree->dwellings[d].id + " marked occupied but empty");
}

inline void check_all_compositions(const PopulationSnapshot& s) {
  for (const Household& h : s.households) {
    const auto v = check_composition(h);
    if (!v.empty()) {
      std::string msg = "household " + std::to_string(h.id) + " (type " +
                        std::to_string(h.family_type) + ") violates composition:";
      for (const auto& x : v)
        msg += " " + x.slot + "=" + std::to_string(x.count) + " allowed [" +
               std::to_string(x.allowed.min) + "," + std::to_string(x.allowed.max) + "]";
      throw InvariantError(msg);
    }
  }
}

// --- tabulation -----------------------------------------------------------

enum class GroupKey { AgeBand, Gender, FamilyType, SmallRegion, Municipality, HousingType };
enum class TabulationUnit { Persons, Households };

struct TabulationSpec {
  TabulationUnit unit = TabulationUnit::Households;
  std::vector<GroupKey> keys;
};

inline GroupKey group_key_from_name(const std::string& s) {
  if (s == "age_band") return GroupKey::AgeBand;
  if (s == "gender") return GroupKey::Gender;
  if (s == "family_type") return GroupKey::FamilyType;
  if (s == "small_region") return GroupKey::SmallRegion;
  if (s == "municipality") return GroupKey::Municipality;
  if (s == "housing_type") return GroupKey::HousingType;
  throw ConfigError("unknown grouping key '" + s + "'");
}

/// Count persons or households grouped by the given keys. Keys of a group
/// are joined with '|' in a fixed order to form the output map key.
/// Person-level keys (age_band, gender) require the Persons unit.
inline std::map<std::string, std::int64_t> tabulate(const PopulationSnapshot& s,
                                                    const TabulationSpec& spec) {
  for (GroupKey k : spec.keys)
    if ((k == GroupKey::AgeBand || k == GroupKey::Gender) &&
        spec.unit != TabulationUnit::Persons)
      throw ConfigError("person-level grouping key requires unit=persons");

  std::map<std::string, std::int64_t> out;
  const auto household_part = [&](const Household& h, std::string& key, GroupKey k) {
    switch (k) {
      case GroupKey::FamilyType:
        key += std::to_string(h.family_type);
        break;
      case GroupKey::SmallRegion:
        key += h.region >= 0 ? s.tree->small_regions[static_cast<std::size_t>(h.region)].id
                             : std::string("unassigned");
        break;
      case GroupKey::Municipality:
        key += h.region >= 0 ? s.tree->municipality_id_of_region(h.region)
                             : std::string("unassigned");
        break;
      case GroupKey::HousingType:
        key += h.dwelling >= 0
                   ? housing_name(s.tree->dwellings[static_cast<std::size_t>(h.dwelling)].housing)
                   : std::string("unassigned");
        break;
      default:
        break;
    }
  };

  for (const Household& h : s.households) {
    if (spec.unit == TabulationUnit::Households) {
      std::string key;
      for (std::size_t i = 0; i < spec.keys.size(); ++i) {
        if (i) key += '|';
        household_part(h, key, spec.keys[i]);
      }
      ++out[key];
    } else {
      for (const Person& p : h.members) {
        std::string key;
        for (std::size_t i = 0; i < spec.keys.size(); ++i) {
          if (i) key += '|';
          switch (spec.keys[i]) {
            case GroupKey::AgeBand:
              key += 'b';
              key += char('0' + age_band_of(p.age) / 10);
              key += char('0' + age_band_of(p.age) % 10);
              break;
            case GroupKey::Gender:
              key += gender_token(p.gender);
              break;
            default:
              household_part(h, key, spec.keys[i]);
              break;
          }
        }
        ++out[key];
      }
    }
  }
  return out;
}

// --- snapshot persistence --------------------------------------------------
//
// Household record file, one household per line:
//   household_id,family_type,ownership,generation_flag,dwelling_id|-,members
// with members = semicolon-separated role:gender:age triples. The writer is
// canonical (households sorted by id), so save(load(f)) == f byte for byte.
// Vacancy/designation state goes to a sibling file: dwelling_id,state lines.

inline std::string format_household_line(const Household& h, const RegionTree& tree) {
  std::string line = std::to_string(h.id);
  line += ',';
  line += std::to_string(h.family_type);
  line += ',';
  line += ownership_token(h.ownership);
  line += ',';
  line += generation_token(h.generation);
  line += ',';
  line += h.dwelling == kNoDwelling ? std::string("-")
                                    : tree.dwellings[static_cast<std::size_t>(h.dwelling)].id;
  line += ',';
  for (std::size_t i = 0; i < h.members.size(); ++i) {
    if (i) line += ';';
    line += role_token(h.members[i].role);
    line += ':';
    line += gender_token(h.members[i].gender);
    line += ':';
    line += std::to_string(h.members[i].age);
  }
  return line;
}

inline void save_households(const PopulationSnapshot& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write snapshot file: " + path.string());
  for (const Household& h : s.households) out << format_household_line(h, *s.tree) << '\n';
}

inline void save_dwelling_states(const PopulationSnapshot& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write dwelling state file: " + path.string());
  out << "dwelling_id,state\n";
  for (std::size_t i = 0; i < s.dwelling_state.size(); ++i) {
    const char* name = nullptr;
    switch (s.dwelling_state[i]) {
      case DwellingState::Free: name = "free"; break;
      case DwellingState::Occupied: name = "occupied"; break;
      case DwellingState::Vacant: name = "vacant"; break;
      case DwellingState::Designated: name = "designated"; break;
    }
    out << s.tree->dwellings[i].id << ',' << name << '\n';
  }
}

inline Household parse_household_line(const std::string& line, const RegionTree& tree,
                                      const std::string& file, std::size_t lineno) {
  const auto fields = csv::split_line(line);
  if (fields.size() != 6) throw IngestError(file, lineno, "expected 6 comma fields");
  Household h;
  {
    const std::string& s = fields[0];
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), h.id);
    if (ec != std::errc() || p != s.data() + s.size())
      throw IngestError(file, lineno, "bad household id '" + s + "'");
  }
  {
    int ft = 0;
    const std::string& s = fields[1];
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), ft);
    if (ec != std::errc() || p != s.data() + s.size() || ft < 1 || ft > 16)
      throw IngestError(file, lineno, "bad family type '" + s + "'");
    h.family_type = static_cast<std::uint8_t>(ft);
  }
  if (fields[2].size() != 1 || fields[3].size() != 1)
    throw IngestError(file, lineno, "bad ownership/generation token");
  h.ownership = ownership_from_token(fields[2][0]);
  h.generation = generation_from_token(fields[3][0]);
  if (fields[4] == "-") {
    h.dwelling = kNoDwelling;
    h.region = kNoRegion;
  } else {
    // dwelling ids resolve through the tree; a linear scan would be O(n^2),
    // so callers pass a prebuilt index via load_snapshot below.
    throw IngestError(file, lineno, "internal: dwelling resolution requires load_snapshot");
  }
  std::size_t pos = 0;
  const std::string& ms = fields[5];
  while (pos < ms.size()) {
    std::size_t end = ms.find(';', pos);
    if (end == std::string::npos) end = ms.size();
    const std::string_view triple(ms.data() + pos, end - pos);
    // role:gender:age
    if (triple.size() < 5 || triple[1] != ':' || triple[3] != ':')
      throw IngestError(file, lineno, "bad member triple '" + std::string(triple) + "'");
    Person p;
    p.role = role_from_token(triple[0]);
    p.gender = gender_from_token(triple[2]);
    int age = 0;
    const char* b = triple.data() + 4;
    const char* e = triple.data() + triple.size();
    const auto [q, ec] = std::from_chars(b, e, age);
    if (ec != std::errc() || q != e || age < 0 || age > kMaxAge)
      throw IngestError(file, lineno, "bad member age in '" + std::string(triple) + "'");
    p.age = static_cast<std::uint8_t>(age);
    h.members.push_back(p);
    pos = end + 1;
  }
  if (h.members.empty()) throw IngestError(file, lineno, "household has no members");
  return h;
}

inline PopulationSnapshot load_snapshot(const std::filesystem::path& households_path,
                                        const std::filesystem::path& dwelling_state_path,
                                        const RegionTree& tree, int epoch) {
  PopulationSnapshot s;
  s.epoch = epoch;
  s.tree = &tree;
  s.dwelling_state.assign(tree.dwellings.size(), DwellingState::Free);

  std::map<std::string, DwellingIndex> dwelling_ix;
  for (std::size_t i = 0; i < tree.dwellings.size(); ++i)
    dwelling_ix.emplace(tree.dwellings[i].id, static_cast<DwellingIndex>(i));

  std::ifstream in(households_path, std::ios::binary);
  if (!in) throw IngestError("cannot open snapshot file: " + households_path.string());
  std::string line;
  std::size_t lineno = 0;
  const std::string fname = households_path.string();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 6) throw IngestError(fname, lineno, "expected 6 comma fields");
    std::string relinked = line;
    Household h;
    if (fields[4] == "-") {
      h = parse_household_line(line, tree, fname, lineno);
    } else {
      // swap the dwelling id for '-' and parse the rest, then resolve here
      std::string tmp;
      for (std::size_t i = 0; i < 6; ++i) {
        if (i) tmp += ',';
        tmp += i == 4 ? "-" : fields[i];
      }
      h = parse_household_line(tmp, tree, fname, lineno);
      auto it = dwelling_ix.find(fields[4]);
      if (it == dwelling_ix.end())
        throw IngestError(fname, lineno, "unknown dwelling id '" + fields[4] + "'");
      h.dwelling = it->second;
      h.region = tree.dwellings[static_cast<std::size_t>(h.dwelling)].small_region;
      s.dwelling_state[static_cast<std::size_t>(h.dwelling)] = DwellingState::Occupied;
    }
    s.households.push_back(std::move(h));
  }
  s.sort_by_id();

  if (!dwelling_state_path.empty() && std::filesystem::exists(dwelling_state_path)) {
    const csv::Table t = csv::read(dwelling_state_path);
    const std::size_t cd = t.column("dwelling_id");
    const std::size_t cs = t.column("state");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      auto it = dwelling_ix.find(t.rows[r][cd]);
      if (it == dwelling_ix.end())
        throw IngestError(t.path, r + 2, "unknown dwelling id '" + t.rows[r][cd] + "'");
      const std::string& st = t.rows[r][cs];
      const auto d = static_cast<std::size_t>(it->second);
      if (st == "vacant") s.dwelling_state[d] = DwellingState::Vacant;
      else if (st == "designated") s.dwelling_state[d] = DwellingState::Designated;
      else if (st == "occupied" || st == "free") {
        // occupied is re-derived from households; free is the default
      } else {
        throw IngestError(t.path, r + 2, "unknown dwelling state '" + st + "'");
      }
    }
  }
  return s;
}

}  // namespace hhsim
