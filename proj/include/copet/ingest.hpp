#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "copet/records.hpp"

namespace copet {

struct ShareParse {
    std::vector<ShareRecord> records; // input order, deduplicated on tweet_id
    std::vector<Rejection> rejections;
};

struct ItemParse {
    std::vector<ItemRecord> records;
    std::vector<Rejection> rejections;
};

// JSON-lines, one object per line, fields tweet_id, actor_id, item_id,
// posted_at, retweets, favorites, followers, following, verified, bio,
// account_created_at. Malformed lines are logged with line number and
// reason, never silently dropped; records.size() + rejections.size()
// equals the number of input lines. Duplicate tweet_ids keep the first
// occurrence, later ones are rejected. Parsing is chunk-parallel but the
// result is input-order deterministic.
ShareParse parse_shares(std::string_view jsonl);
ShareParse parse_shares_file(const std::string& path); // throws IoError if unreadable

// CSV with header item_id,title,created_at,signatures,department.
ItemParse parse_items(std::string_view csv);
ItemParse parse_items_file(const std::string& path);

// Throws IoError on duplicate item_id, naming the offending id.
Dataset join_dataset(std::vector<ShareRecord> shares, std::vector<ItemRecord> items);

// Normalized serialization; parse(serialize(x)) round-trips to identical
// records (timestamps are emitted as epoch seconds).
std::string write_shares_jsonl(const std::vector<ShareRecord>& shares);
std::string write_items_csv(const std::vector<ItemRecord>& items);
std::string write_rejections_csv(const std::vector<Rejection>& rejections);

} // namespace copet
