#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace copet {

// One tweet linking an actor to an item, with reception and profile metadata.
struct ShareRecord {
    std::string tweet_id;
    std::string actor_id;
    std::string item_id;
    std::int64_t posted_at = 0; // UTC seconds
    std::uint32_t retweet_count = 0;
    std::uint32_t favorite_count = 0;
    std::uint64_t follower_count = 0;
    std::uint64_t following_count = 0;
    bool verified = false;
    std::string bio; // may be empty
    std::optional<std::int64_t> account_created_at;

    bool operator==(const ShareRecord&) const = default;
};

// One petition with creation time, signatures, department, title.
struct ItemRecord {
    std::string item_id;
    std::string title;
    std::int64_t created_at = 0; // UTC seconds
    std::uint64_t signature_count = 0;
    std::string department; // may be empty

    bool operator==(const ItemRecord&) const = default;
};

struct Rejection {
    std::uint64_t line_no = 0; // 1-based
    std::string reason;

    bool operator==(const Rejection&) const = default;
};

constexpr std::uint32_t kNoItem = 0xFFFFFFFFu;

// Joined dataset. Shares whose item_id has no ItemRecord are retained and
// flagged unmatched via share_item[i] == kNoItem. Immutable once joined.
struct Dataset {
    std::vector<ShareRecord> shares; // deduplicated, input order
    std::vector<ItemRecord> items;
    std::vector<std::uint32_t> share_item; // share index -> item index or kNoItem
    std::uint64_t matched = 0;
    std::uint64_t unmatched = 0;
};

} // namespace copet
