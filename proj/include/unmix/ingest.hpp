#pragma once

#include <map>
#include <string>
#include <vector>

#include "unmix/types.hpp"

namespace unmix {

struct HouseholdSpec {
    std::string household_id;
    std::vector<int> member_account_indices;
};

// How a merged household resolves two members rating the same movie.
enum class TieRule {
    drop_later,  // keep the first member's rating, record the conflict
    average,     // average the ratings, attribute to the first member
};

struct MergeConflict {
    std::string household_id;
    int movie;
    double kept_rating;
    double dropped_rating;
};

struct MergeResult {
    RatingsDataset dataset;
    // Per merged account id: user label for each rating, aligned with the
    // account's ratings sorted ascending by movie index.
    std::map<std::string, std::vector<int>> truths;
    std::vector<MergeConflict> conflicts;
};

// Parses a ratings CSV with header `account,movie,rating`. Rejects
// duplicate (account, movie) rows, malformed rows (reporting the line
// number) and ratings outside [scale_min, scale_max].
RatingsDataset parse_ratings(const std::string& path, double scale_min = 1.0,
                             double scale_max = 5.0);

// Parses a households CSV with header `household,account`; account names
// are resolved against `ds`. Member order follows file order.
std::vector<HouseholdSpec> parse_households(const std::string& path, const RatingsDataset& ds);

// Replaces each household's member accounts with a single merged account
// (id = household id) and derives the ground-truth user labels from member
// identity (labels 0..n-1 in member order). Non-member accounts pass
// through unchanged.
MergeResult merge_households(const RatingsDataset& ds, const std::vector<HouseholdSpec>& specs,
                             TieRule rule = TieRule::drop_later);

}  // namespace unmix
