#include "unmix/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "unmix/errors.hpp"

namespace unmix {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

RatingsDataset parse_ratings(const std::string& path, double scale_min, double scale_max) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ratings file: " + path);

    RatingsDataset ds;
    ds.scale_min = scale_min;
    ds.scale_max = scale_max;

    std::unordered_map<std::string, int> account_index;
    std::unordered_map<std::string, int> movie_index;
    std::set<std::pair<int, int>> seen;
    std::vector<std::string> duplicates;

    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        if (!saw_header) {
            if (trimmed != "account,movie,rating") {
                throw SchemaError("line 1: expected header `account,movie,rating`, got `" +
                                  trimmed + "`");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split_csv_line(trimmed);
        if (fields.size() != 3) {
            throw SchemaError("line " + std::to_string(line_no) +
                              ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        const std::string account = strip(fields[0]);
        const std::string movie = strip(fields[1]);
        if (account.empty() || movie.empty()) {
            throw SchemaError("line " + std::to_string(line_no) + ": empty account or movie id");
        }
        double rating;
        try {
            std::size_t pos = 0;
            rating = std::stod(strip(fields[2]), &pos);
            if (pos != strip(fields[2]).size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw SchemaError("line " + std::to_string(line_no) + ": unparsable rating `" +
                              fields[2] + "`");
        }
        if (!std::isfinite(rating) || rating < scale_min || rating > scale_max) {
            throw SchemaError("line " + std::to_string(line_no) + ": rating " +
                              std::to_string(rating) + " outside scale [" +
                              std::to_string(scale_min) + ", " + std::to_string(scale_max) + "]");
        }
        auto [ait, a_new] = account_index.try_emplace(account, ds.num_accounts());
        if (a_new) ds.account_ids.push_back(account);
        auto [mit, m_new] = movie_index.try_emplace(movie, ds.num_movies());
        if (m_new) ds.movie_ids.push_back(movie);
        if (!seen.insert({ait->second, mit->second}).second) {
            duplicates.push_back("(" + account + ", " + movie + ") at line " +
                                 std::to_string(line_no));
            continue;
        }
        ds.ratings.push_back({ait->second, mit->second, rating});
    }
    if (!saw_header || ds.ratings.empty()) {
        throw SchemaError("empty dataset: " + path + " holds no rating rows");
    }
    if (!duplicates.empty()) {
        std::string msg = "duplicate (account, movie) rows:";
        for (const auto& d : duplicates) msg += " " + d;
        throw SchemaError(msg);
    }
    return ds;
}

std::vector<HouseholdSpec> parse_households(const std::string& path, const RatingsDataset& ds) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open households file: " + path);

    std::unordered_map<std::string, int> account_index;
    for (int a = 0; a < ds.num_accounts(); ++a) account_index[ds.account_ids[a]] = a;

    std::unordered_map<std::string, std::size_t> spec_index;
    std::vector<HouseholdSpec> specs;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        if (!saw_header) {
            if (trimmed != "household,account") {
                throw SchemaError("line 1: expected header `household,account`");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split_csv_line(trimmed);
        if (fields.size() != 2) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected 2 fields");
        }
        const std::string household = strip(fields[0]);
        const std::string account = strip(fields[1]);
        auto it = account_index.find(account);
        if (it == account_index.end()) {
            throw SchemaError("line " + std::to_string(line_no) + ": unknown account `" +
                              account + "`");
        }
        auto [sit, fresh] = spec_index.try_emplace(household, specs.size());
        if (fresh) specs.push_back({household, {}});
        specs[sit->second].member_account_indices.push_back(it->second);
    }
    if (!saw_header) throw SchemaError("empty households file: " + path);
    return specs;
}

MergeResult merge_households(const RatingsDataset& ds, const std::vector<HouseholdSpec>& specs,
                             TieRule rule) {
    std::unordered_map<int, std::pair<int, int>> membership;  // account -> (spec, member order)
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const auto& spec = specs[s];
        if (spec.member_account_indices.empty()) {
            throw SchemaError("household " + spec.household_id + " has no members");
        }
        for (std::size_t k = 0; k < spec.member_account_indices.size(); ++k) {
            const int account = spec.member_account_indices[k];
            if (account < 0 || account >= ds.num_accounts()) {
                throw SchemaError("household " + spec.household_id +
                                  " references an unknown account index");
            }
            if (!membership.emplace(account, std::make_pair(static_cast<int>(s),
                                                            static_cast<int>(k)))
                     .second) {
                throw SchemaError("account " + ds.account_ids[account] +
                                  " appears in more than one household");
            }
        }
    }

    MergeResult out;
    out.dataset.movie_ids = ds.movie_ids;
    out.dataset.scale_min = ds.scale_min;
    out.dataset.scale_max = ds.scale_max;

    // Merged household accounts first (in spec order), then pass-through
    // accounts in their original order.
    std::vector<int> new_index_of_spec(specs.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
        new_index_of_spec[s] = out.dataset.num_accounts();
        out.dataset.account_ids.push_back(specs[s].household_id);
    }
    std::unordered_map<int, int> passthrough;
    for (int a = 0; a < ds.num_accounts(); ++a) {
        if (!membership.count(a)) {
            passthrough[a] = out.dataset.num_accounts();
            out.dataset.account_ids.push_back(ds.account_ids[a]);
        }
    }

    // Per household: movie -> (rating, member label), resolved by tie rule.
    struct Cell {
        double rating;
        int label;
    };
    std::vector<std::map<int, Cell>> merged(specs.size());
    for (const auto& e : ds.ratings) {
        auto it = membership.find(e.account);
        if (it == membership.end()) {
            out.dataset.ratings.push_back({passthrough[e.account], e.movie, e.rating});
            continue;
        }
        const auto [spec_idx, member] = it->second;
        auto& cells = merged[spec_idx];
        auto cit = cells.find(e.movie);
        if (cit == cells.end()) {
            cells[e.movie] = {e.rating, member};
            continue;
        }
        // Both members rated this movie. Keep the earlier member's label;
        // the rating follows the tie rule.
        Cell& kept = cit->second;
        const bool existing_earlier = kept.label <= member;
        const double first_rating = existing_earlier ? kept.rating : e.rating;
        const double second_rating = existing_earlier ? e.rating : kept.rating;
        const int first_label = std::min(kept.label, member);
        if (rule == TieRule::drop_later) {
            out.conflicts.push_back({specs[spec_idx].household_id, e.movie, first_rating,
                                     second_rating});
            kept = {first_rating, first_label};
        } else {
            const double avg = 0.5 * (first_rating + second_rating);
            out.conflicts.push_back({specs[spec_idx].household_id, e.movie, avg, second_rating});
            kept = {avg, first_label};
        }
    }

    for (std::size_t s = 0; s < specs.size(); ++s) {
        if (merged[s].empty()) {
            throw SchemaError("household " + specs[s].household_id + " has no ratings");
        }
        std::vector<int>& truth = out.truths[specs[s].household_id];
        for (const auto& [movie, cell] : merged[s]) {  // std::map: ascending movie order
            out.dataset.ratings.push_back({new_index_of_spec[s], movie, cell.rating});
            truth.push_back(cell.label);
        }
        // Compact labels to 0..n-1 in member order in case a member
        // contributed no ratings, so truths stay surjective.
        std::vector<int> remap(specs[s].member_account_indices.size(), -1);
        int next = 0;
        for (std::size_t k = 0; k < remap.size(); ++k) {
            for (int label : truth) {
                if (label == static_cast<int>(k)) {
                    remap[k] = next++;
                    break;
                }
            }
        }
        for (int& label : truth) label = remap[label];
    }
    return out;
}

}  // namespace unmix
