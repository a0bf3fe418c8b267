#include "copet/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>
#include <omp.h>

#include "copet/io_util.hpp"

namespace copet {

namespace {

using nlohmann::json;

std::optional<std::int64_t> timestamp_field(const json& v) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) return static_cast<std::int64_t>(v.get<double>());
    if (v.is_string()) return parse_timestamp(v.get_ref<const std::string&>());
    return std::nullopt;
}

bool count_field(const json& v, std::uint64_t& out, std::uint32_t cap, std::string& err,
                 const char* name) {
    if (!v.is_number_integer() || v.is_number_float()) {
        err = std::string("field '") + name + "' is not an integer";
        return false;
    }
    if (v.is_number_unsigned()) {
        out = v.get<std::uint64_t>();
    } else {
        const std::int64_t s = v.get<std::int64_t>();
        if (s < 0) {
            err = std::string("negative ") + name;
            return false;
        }
        out = static_cast<std::uint64_t>(s);
    }
    if (cap && out > cap) {
        err = std::string("field '") + name + "' out of range";
        return false;
    }
    return true;
}

// Parses one JSONL line; returns false with a reason on any malformation.
bool parse_share_line(std::string_view line, ShareRecord& rec, std::string& err) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        err = "not a JSON object";
        return false;
    }
    for (const char* field : {"tweet_id", "actor_id", "item_id"}) {
        auto it = obj.find(field);
        if (it == obj.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
            err = std::string("missing or empty field '") + field + "'";
            return false;
        }
    }
    rec.tweet_id = obj["tweet_id"].get<std::string>();
    rec.actor_id = obj["actor_id"].get<std::string>();
    rec.item_id = obj["item_id"].get<std::string>();

    auto posted = obj.find("posted_at");
    if (posted == obj.end()) {
        err = "missing field 'posted_at'";
        return false;
    }
    auto posted_ts = timestamp_field(*posted);
    if (!posted_ts) {
        err = "unparseable 'posted_at'";
        return false;
    }
    rec.posted_at = *posted_ts;

    std::uint64_t tmp;
    struct Counter {
        const char* name;
        bool is32;
    };
    for (const Counter c : {Counter{"retweets", true}, Counter{"favorites", true},
                            Counter{"followers", false}, Counter{"following", false}}) {
        auto it = obj.find(c.name);
        if (it == obj.end()) {
            err = std::string("missing field '") + c.name + "'";
            return false;
        }
        if (!count_field(*it, tmp, c.is32 ? 0xFFFFFFFFu : 0, err, c.name)) return false;
        if (std::string_view(c.name) == "retweets")
            rec.retweet_count = static_cast<std::uint32_t>(tmp);
        else if (std::string_view(c.name) == "favorites")
            rec.favorite_count = static_cast<std::uint32_t>(tmp);
        else if (std::string_view(c.name) == "followers")
            rec.follower_count = tmp;
        else
            rec.following_count = tmp;
    }

    auto verified = obj.find("verified");
    if (verified == obj.end() || !verified->is_boolean()) {
        err = "missing or non-boolean 'verified'";
        return false;
    }
    rec.verified = verified->get<bool>();

    auto bio = obj.find("bio");
    rec.bio = (bio != obj.end() && bio->is_string()) ? bio->get<std::string>() : "";

    auto created = obj.find("account_created_at");
    rec.account_created_at.reset();
    if (created != obj.end() && !created->is_null()) {
        auto ts = timestamp_field(*created);
        if (!ts) {
            err = "unparseable 'account_created_at'";
            return false;
        }
        rec.account_created_at = *ts;
    }
    if (rec.account_created_at && rec.posted_at < *rec.account_created_at) {
        err = "posted_at predates account_created_at";
        return false;
    }
    return true;
}

} // namespace

ShareParse parse_shares(std::string_view jsonl) {
    const std::vector<std::string_view> lines = split_lines(jsonl);
    const std::size_t n = lines.size();

    std::vector<ShareRecord> records(n);
    std::vector<std::string> errors(n);
    std::vector<std::uint8_t> ok(n, 0);

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        if (lines[i].empty()) {
            errors[i] = "empty line";
            continue;
        }
        ok[i] = parse_share_line(lines[i], records[i], errors[i]) ? 1 : 0;
    }

    ShareParse out;
    out.records.reserve(n);
    std::unordered_map<std::string, std::uint64_t> first_line; // owns keys;
    // the records vector is moved from below, so views would dangle
    first_line.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (!ok[i]) {
            out.rejections.push_back({i + 1, errors[i]});
            continue;
        }
        auto [it, inserted] = first_line.emplace(records[i].tweet_id, i + 1);
        if (!inserted) {
            out.rejections.push_back(
                {i + 1, "duplicate tweet_id (first seen at line " +
                            std::to_string(it->second) + ")"});
            continue;
        }
        out.records.push_back(std::move(records[i]));
    }
    return out;
}

ShareParse parse_shares_file(const std::string& path) {
    return parse_shares(slurp_file(path));
}

ItemParse parse_items(std::string_view csv) {
    static const char* kHeader = "item_id,title,created_at,signatures,department";
    ItemParse out;
    const std::vector<std::string_view> lines = split_lines(csv);
    if (lines.empty()) return out;
    if (lines[0] != kHeader) {
        out.rejections.push_back({1, std::string("bad header (expected ") + kHeader + ")"});
        return out;
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::uint64_t line_no = i + 1;
        if (lines[i].empty()) {
            out.rejections.push_back({line_no, "empty line"});
            continue;
        }
        auto fields = split_csv_line(lines[i]);
        if (!fields) {
            out.rejections.push_back({line_no, "unbalanced quotes"});
            continue;
        }
        if (fields->size() != 5) {
            out.rejections.push_back(
                {line_no, "expected 5 fields, got " + std::to_string(fields->size())});
            continue;
        }
        ItemRecord rec;
        rec.item_id = (*fields)[0];
        rec.title = (*fields)[1];
        if (rec.item_id.empty()) {
            out.rejections.push_back({line_no, "empty item_id"});
            continue;
        }
        auto ts = parse_timestamp((*fields)[2]);
        if (!ts) {
            out.rejections.push_back({line_no, "unparseable created_at"});
            continue;
        }
        rec.created_at = *ts;
        const std::string& sig = (*fields)[3];
        if (sig.empty() || sig.find_first_not_of("0123456789") != std::string::npos) {
            out.rejections.push_back({line_no, "signatures not a non-negative integer"});
            continue;
        }
        rec.signature_count = std::stoull(sig);
        rec.department = (*fields)[4];
        out.records.push_back(std::move(rec));
    }
    return out;
}

ItemParse parse_items_file(const std::string& path) {
    return parse_items(slurp_file(path));
}

Dataset join_dataset(std::vector<ShareRecord> shares, std::vector<ItemRecord> items) {
    Dataset ds;
    ds.shares = std::move(shares);
    ds.items = std::move(items);

    std::unordered_map<std::string_view, std::uint32_t> item_index;
    item_index.reserve(ds.items.size() * 2);
    for (std::uint32_t i = 0; i < ds.items.size(); ++i) {
        auto [it, inserted] = item_index.emplace(ds.items[i].item_id, i);
        if (!inserted)
            throw IoError("duplicate item_id: " + ds.items[i].item_id);
    }

    ds.share_item.resize(ds.shares.size(), kNoItem);
    for (std::size_t s = 0; s < ds.shares.size(); ++s) {
        auto it = item_index.find(ds.shares[s].item_id);
        if (it == item_index.end()) {
            ++ds.unmatched;
        } else {
            ds.share_item[s] = it->second;
            ++ds.matched;
        }
    }
    return ds;
}

std::string write_shares_jsonl(const std::vector<ShareRecord>& shares) {
    std::string out;
    for (const ShareRecord& r : shares) {
        json obj;
        obj["tweet_id"] = r.tweet_id;
        obj["actor_id"] = r.actor_id;
        obj["item_id"] = r.item_id;
        obj["posted_at"] = r.posted_at;
        obj["retweets"] = r.retweet_count;
        obj["favorites"] = r.favorite_count;
        obj["followers"] = r.follower_count;
        obj["following"] = r.following_count;
        obj["verified"] = r.verified;
        obj["bio"] = r.bio;
        if (r.account_created_at) obj["account_created_at"] = *r.account_created_at;
        out += obj.dump();
        out.push_back('\n');
    }
    return out;
}

std::string write_items_csv(const std::vector<ItemRecord>& items) {
    std::string out = "item_id,title,created_at,signatures,department\n";
    for (const ItemRecord& r : items) {
        out += csv_escape(r.item_id);
        out.push_back(',');
        out += csv_escape(r.title);
        out.push_back(',');
        out += std::to_string(r.created_at);
        out.push_back(',');
        out += std::to_string(r.signature_count);
        out.push_back(',');
        out += csv_escape(r.department);
        out.push_back('\n');
    }
    return out;
}

std::string write_rejections_csv(const std::vector<Rejection>& rejections) {
    std::string out = "line_no,reason\n";
    for (const Rejection& r : rejections) {
        out += std::to_string(r.line_no);
        out.push_back(',');
        out += csv_escape(r.reason);
        out.push_back('\n');
    }
    return out;
}

} // namespace copet
