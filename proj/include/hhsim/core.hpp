#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hhsim/errors.hpp"

namespace hhsim {

constexpr int kMaxAge = 120;
constexpr int kNumBands = 18;  // 0-4, 5-9, ..., 80-84, 85+
constexpr int kTopBand = kNumBands - 1;

enum class Role : std::uint8_t { Householder, Spouse, Child, Grandchild, Parent, Other };
enum class Gender : std::uint8_t { Male, Female };
enum class Ownership : std::uint8_t { Owned, Rented, Unknown };
enum class GenerationFlag : std::uint8_t { CoupleGen, ParentGen, NotApplicable };
enum class HousingType : std::uint8_t { Detached, Apartment, Other };

struct Person {
  Role role;
  Gender gender;
  std::uint8_t age;  // whole years, 0..120
};

/// Five-year age band index: floor(age/5), capped at band 17 ("85 and over").
inline int age_band_of(int age) {
  if (age < 0) throw DomainError("age_band_of: negative age " + std::to_string(age));
  return std::min(age / 5, kTopBand);
}

/// Lower bound in years of a band (band 17 -> 85).
inline int band_lower_age(int band) { return band * 5; }

struct RoleBounds {
  int min = 0;
  int max = 0;
  bool admits(int count) const { return count >= min && count <= max; }
};

/// One of the 16 household composition categories. The bounds follow the
/// census family-type definitions; `children` covers both Child and
/// Grandchild members (the generation(s) below the core couple).
struct FamilyType {
  int code = 0;
  const char* name = "";
  RoleBounds spouse, children, parents, others;
  bool multi_generation = false;  // codes 5,6,7,8,11,12

  int min_members() const { return 1 + spouse.min + children.min + parents.min + others.min; }
  int max_members() const { return 1 + spouse.max + children.max + parents.max + others.max; }
};

// Code 8 is published with a bare "9" in the children column where its
// siblings read "1-9"; that is treated as a typo and read as 1-9 (see
// docs/schemas.md).
inline const std::array<FamilyType, 16>& family_types() {
  static const std::array<FamilyType, 16> kTypes = {{
      {1, "Couple", {1, 1}, {0, 0}, {0, 0}, {0, 0}, false},
      {2, "Couple + Children", {1, 1}, {1, 9}, {0, 0}, {0, 0}, false},
      {3, "Father + Children", {0, 0}, {1, 9}, {0, 0}, {0, 0}, false},
      {4, "Mother + Children", {0, 0}, {1, 9}, {0, 0}, {0, 0}, false},
      {5, "Couple + Parents", {1, 1}, {0, 0}, {2, 2}, {0, 0}, true},
      {6, "Couple + Parent", {1, 1}, {0, 0}, {1, 1}, {0, 0}, true},
      {7, "Couple + Children + Parents", {1, 1}, {1, 9}, {2, 2}, {0, 0}, true},
      {8, "Couple + Children + Parent", {1, 1}, {1, 9}, {1, 1}, {0, 0}, true},
      {9, "Couple + Others", {1, 1}, {0, 0}, {0, 0}, {1, 9}, false},
      {10, "Couple + Children + Others", {1, 1}, {1, 9}, {0, 0}, {1, 1}, false},
      {11, "Couple + Parents + Others", {1, 1}, {0, 0}, {1, 1}, {1, 9}, true},
      {12, "Couple + Children + Parents + Others", {1, 1}, {1, 9}, {1, 1}, {1, 1}, true},
      {13, "Brothers and sisters", {0, 0}, {0, 0}, {0, 0}, {1, 9}, false},
      {14, "Others", {0, 0}, {0, 0}, {0, 0}, {1, 9}, false},
      {15, "Nonrelative", {0, 0}, {0, 0}, {0, 0}, {0, 0}, false},
      {16, "Single", {0, 0}, {0, 0}, {0, 0}, {0, 0}, false},
  }};
  return kTypes;
}

inline const FamilyType& family_type(int code) {
  if (code < 1 || code > 16)
    throw DomainError("family type code out of range: " + std::to_string(code));
  return family_types()[static_cast<std::size_t>(code - 1)];
}

inline bool is_multi_generation(int code) { return family_type(code).multi_generation; }

/// Member counts per composition slot.
struct Composition {
  int spouse = 0;
  int children = 0;  // Child + Grandchild
  int parents = 0;
  int others = 0;
};

struct Household;
inline Composition composition_of(const Household& h);

using DwellingIndex = std::int32_t;
using RegionIndex = std::int32_t;
constexpr DwellingIndex kNoDwelling = -1;
constexpr RegionIndex kNoRegion = -1;

struct Household {
  std::uint64_t id = 0;
  std::uint8_t family_type = 16;
  Ownership ownership = Ownership::Unknown;
  GenerationFlag generation = GenerationFlag::NotApplicable;
  DwellingIndex dwelling = kNoDwelling;  // index into RegionTree::dwellings
  RegionIndex region = kNoRegion;        // small-region index; kept even without a dwelling
  std::vector<Person> members;           // members.front() has role Householder

  const Person& householder() const { return members.front(); }
  Person& householder() { return members.front(); }
  std::size_t size() const { return members.size(); }
};

inline Composition composition_of(const Household& h) {
  Composition c;
  for (const Person& p : h.members) {
    switch (p.role) {
      case Role::Householder: break;
      case Role::Spouse: ++c.spouse; break;
      case Role::Child:
      case Role::Grandchild: ++c.children; break;
      case Role::Parent: ++c.parents; break;
      case Role::Other: ++c.others; break;
    }
  }
  return c;
}

struct CompositionViolation {
  std::string slot;   // "spouse" / "children" / "parents" / "others" / "structure"
  int count = 0;
  RoleBounds allowed;
};

/// Checks a household against its family type's composition bounds.
/// Returns every violating (slot, count, allowed-range) triple; empty
/// means valid. Total function, never throws.
inline std::vector<CompositionViolation> check_composition(const Household& h) {
  std::vector<CompositionViolation> v;
  if (h.members.empty()) {
    v.push_back({"structure", 0, {1, 1}});
    return v;
  }
  int householders = 0;
  for (const Person& p : h.members)
    if (p.role == Role::Householder) ++householders;
  if (householders != 1 || h.members.front().role != Role::Householder)
    v.push_back({"structure", householders, {1, 1}});
  if (h.family_type < 1 || h.family_type > 16) {
    v.push_back({"family_type", h.family_type, {1, 16}});
    return v;
  }
  const FamilyType& ft = family_type(h.family_type);
  const Composition c = composition_of(h);
  if (!ft.spouse.admits(c.spouse)) v.push_back({"spouse", c.spouse, ft.spouse});
  if (!ft.children.admits(c.children)) v.push_back({"children", c.children, ft.children});
  if (!ft.parents.admits(c.parents)) v.push_back({"parents", c.parents, ft.parents});
  if (!ft.others.admits(c.others)) v.push_back({"others", c.others, ft.others});
  const bool multi = ft.multi_generation;
  if (multi != (h.generation != GenerationFlag::NotApplicable))
    v.push_back({"generation_flag", static_cast<int>(h.generation), {multi ? 1 : 0, multi ? 2 : 0}});
  return v;
}

/// Exact classification of a composition into a family type code, or 0 when
/// no code matches. Codes 3/4 depend on the householder's gender; 13 vs 14
/// and 15 vs 16 are ambiguous on bounds alone, resolved by `prev_code`
/// (keep the current code when it still fits) with 14/16 as defaults.
inline int classify_exact(const Composition& c, Gender householder_gender, int prev_code) {
  const auto fits = [&](int code) {
    const FamilyType& ft = family_type(code);
    return ft.spouse.admits(c.spouse) && ft.children.admits(c.children) &&
           ft.parents.admits(c.parents) && ft.others.admits(c.others);
  };
  if (prev_code >= 1 && prev_code <= 16 && fits(prev_code)) {
    // 3/4 must still match the (possibly promoted) householder's gender
    if (prev_code == 3 && householder_gender != Gender::Male) {
      // fall through to the scan below
    } else if (prev_code == 4 && householder_gender != Gender::Female) {
      // fall through
    } else {
      return prev_code;
    }
  }
  if (c.spouse == 1) {
    for (int code : {1, 2, 5, 6, 7, 8, 9, 10, 11, 12})
      if (fits(code)) return code;
    return 0;
  }
  if (c.children > 0 && c.parents == 0 && c.others == 0 && c.children <= 9)
    return householder_gender == Gender::Male ? 3 : 4;
  if (c.children == 0 && c.parents == 0 && c.others == 0) return 16;
  if (c.children == 0 && c.parents == 0 && c.others >= 1 && c.others <= 9) return 14;
  return 0;
}

/// Recomputes `family_type` (and the generation flag) after members changed.
/// When no code matches the roles exactly, members are reclassified along a
/// fixed ladder until one does: excess Spouses, then Parents become Others,
/// then Grandchildren, then Children; the terminal shapes are 9 (couple
/// present) and 14 (no couple). The terminal buckets can still exceed the
/// 1-9 "others" bound; callers that remove members run repair_household,
/// which splits the excess off. Returns false only for an empty household.
inline bool recompute_family_type(Household& h) {
  if (h.members.empty()) return false;
  const Gender hg = h.householder().gender;

  const auto apply = [&](int code) {
    h.family_type = static_cast<std::uint8_t>(code);
    if (is_multi_generation(code)) {
      if (h.generation == GenerationFlag::NotApplicable)
        h.generation = GenerationFlag::CoupleGen;
    } else {
      h.generation = GenerationFlag::NotApplicable;
    }
    return true;
  };
  const auto demote_one = [&](Role r) {
    for (auto it = h.members.rbegin(); it != h.members.rend(); ++it)
      if (it->role == r) {
        it->role = Role::Other;
        return true;
      }
    return false;
  };

  Composition c = composition_of(h);
  while (c.spouse > 1) {  // defensive; events never produce this
    demote_one(Role::Spouse);
    --c.spouse;
    ++c.others;
  }
  if (int code = classify_exact(c, hg, h.family_type)) return apply(code);

  // Ladder step 1: demote Parents to Other, one at a time.
  while (c.parents > 0) {
    demote_one(Role::Parent);
    --c.parents;
    ++c.others;
    if (int code = classify_exact(c, hg, h.family_type)) return apply(code);
  }
  // Ladder step 2: demote Grandchildren, then Children.
  while (c.children > 0) {
    if (!demote_one(Role::Grandchild) && !demote_one(Role::Child)) break;
    --c.children;
    ++c.others;
    if (int code = classify_exact(c, hg, h.family_type)) return apply(code);
  }
  // Terminal: only reachable with others > 9.
  return apply(c.spouse == 1 ? 9 : 14);
}

/// Re-derive the family type and, when the terminal classification exceeds
/// the 1-9 "others" bound, split the youngest excess Others out. The caller
/// turns the returned persons into a new household (death/removal paths).
inline std::vector<Person> repair_household(Household& h) {
  recompute_family_type(h);
  std::vector<Person> overflow;
  const FamilyType& ft = family_type(h.family_type);
  Composition c = composition_of(h);
  while (c.others > ft.others.max) {
    std::size_t youngest = 0;
    bool found = false;
    for (std::size_t i = 0; i < h.members.size(); ++i)
      if (h.members[i].role == Role::Other &&
          (!found || h.members[i].age < h.members[youngest].age)) {
        youngest = i;
        found = true;
      }
    if (!found) break;
    overflow.push_back(h.members[youngest]);
    h.members.erase(h.members.begin() + static_cast<std::ptrdiff_t>(youngest));
    --c.others;
  }
  if (!overflow.empty()) recompute_family_type(h);
  return overflow;
}

/// Promote the eldest remaining member to Householder (after the previous
/// householder died or left), remap the other members' roles relative to
/// the new head, and re-derive the family type.
inline void promote_householder(Household& h) {
  if (h.members.empty()) throw InvariantError("promote_householder: empty household");
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.members.size(); ++i)
    if (h.members[i].age > h.members[best].age) best = i;
  const Role prior = h.members[best].role;
  h.members[best].role = Role::Householder;
  std::rotate(h.members.begin(), h.members.begin() + static_cast<std::ptrdiff_t>(best),
              h.members.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  bool all_from_child = true;
  for (std::size_t i = 1; i < h.members.size(); ++i) {
    Role& r = h.members[i].role;
    if (r != Role::Child) all_from_child = false;
    switch (prior) {
      case Role::Spouse:
        break;  // positions relative to the surviving partner are unchanged
      case Role::Child:
        if (r == Role::Spouse) r = Role::Parent;          // the head's parent
        else if (r == Role::Child) r = Role::Other;       // siblings
        else if (r == Role::Grandchild) r = Role::Child;  // generation below
        else if (r == Role::Parent) r = Role::Other;      // grandparents
        break;
      case Role::Grandchild:
        r = (r == Role::Child) ? Role::Parent : Role::Other;
        break;
      case Role::Parent:
        if (r == Role::Parent) r = Role::Spouse;
        else if (r == Role::Child) r = Role::Grandchild;
        else r = Role::Other;
        break;
      default:
        r = Role::Other;
        break;
    }
  }
  recompute_family_type(h);
  // Orphaned siblings living together read as "Brothers and sisters".
  if (prior == Role::Child && all_from_child && h.family_type == 14)
    h.family_type = 13;
}

// --- token maps shared by the snapshot format and the CSV schemas ---

inline char role_token(Role r) {
  switch (r) {
    case Role::Householder: return 'H';
    case Role::Spouse: return 'S';
    case Role::Child: return 'C';
    case Role::Grandchild: return 'G';
    case Role::Parent: return 'P';
    case Role::Other: return 'O';
  }
  return '?';
}

inline Role role_from_token(char c) {
  switch (c) {
    case 'H': return Role::Householder;
    case 'S': return Role::Spouse;
    case 'C': return Role::Child;
    case 'G': return Role::Grandchild;
    case 'P': return Role::Parent;
    case 'O': return Role::Other;
  }
  throw DomainError(std::string("unknown role token '") + c + "'");
}

inline char gender_token(Gender g) { return g == Gender::Male ? 'M' : 'F'; }

inline Gender gender_from_token(char c) {
  if (c == 'M') return Gender::Male;
  if (c == 'F') return Gender::Female;
  throw DomainError(std::string("unknown gender token '") + c + "'");
}

inline char ownership_token(Ownership o) {
  switch (o) {
    case Ownership::Owned: return 'O';
    case Ownership::Rented: return 'R';
    case Ownership::Unknown: return 'U';
  }
  return '?';
}

inline Ownership ownership_from_token(char c) {
  switch (c) {
    case 'O': return Ownership::Owned;
    case 'R': return Ownership::Rented;
    case 'U': return Ownership::Unknown;
  }
  throw DomainError(std::string("unknown ownership token '") + c + "'");
}

inline char generation_token(GenerationFlag g) {
  switch (g) {
    case GenerationFlag::CoupleGen: return 'C';
    case GenerationFlag::ParentGen: return 'P';
    case GenerationFlag::NotApplicable: return 'N';
  }
  return '?';
}

inline GenerationFlag generation_from_token(char c) {
  switch (c) {
    case 'C': return GenerationFlag::CoupleGen;
    case 'P': return GenerationFlag::ParentGen;
    case 'N': return GenerationFlag::NotApplicable;
  }
  throw DomainError(std::string("unknown generation token '") + c + "'");
}

inline std::string housing_name(HousingType t) {
  switch (t) {
    case HousingType::Detached: return "detached";
    case HousingType::Apartment: return "apartment";
    case HousingType::Other: return "other";
  }
  return "?";
}

inline HousingType housing_from_name(const std::string& s) {
  if (s == "detached") return HousingType::Detached;
  if (s == "apartment") return HousingType::Apartment;
  if (s == "other") return HousingType::Other;
  throw DomainError("unknown housing type '" + s + "'");
}

inline std::string ownership_name(Ownership o) {
  switch (o) {
    case Ownership::Owned: return "owned";
    case Ownership::Rented: return "rented";
    case Ownership::Unknown: return "unknown";
  }
  return "?";
}

inline Ownership ownership_from_name(const std::string& s) {
  if (s == "owned") return Ownership::Owned;
  if (s == "rented") return Ownership::Rented;
  if (s == "unknown") return Ownership::Unknown;
  throw DomainError("unknown ownership '" + s + "'");
}

}  // namespace hhsim
